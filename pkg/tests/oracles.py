"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the package's channel/beamsplitter machinery:
states are tracked as amplitude dictionaries and operators as explicit
little matrices, so agreement with the library is a two-implementation
cross-check.
"""

import math
from itertools import product

import numpy as np


def _bs_output_amplitudes(j: int, k: int) -> dict[tuple[int, int], complex]:
    """Fock amplitudes after a balanced splitter for input |j, k>.

    Expands (a+ + b+)^j (b+ - a+)^k / sqrt(2^(j+k) j! k!) over monomials.
    """
    poly: dict[tuple[int, int], complex] = {(0, 0): 1.0}
    for _ in range(j):  # multiply by (a+ + b+)
        nxt: dict[tuple[int, int], complex] = {}
        for (p, q), c in poly.items():
            nxt[(p + 1, q)] = nxt.get((p + 1, q), 0.0) + c
            nxt[(p, q + 1)] = nxt.get((p, q + 1), 0.0) + c
        poly = nxt
    for _ in range(k):  # multiply by (b+ - a+)
        nxt = {}
        for (p, q), c in poly.items():
            nxt[(p + 1, q)] = nxt.get((p + 1, q), 0.0) - c
            nxt[(p, q + 1)] = nxt.get((p, q + 1), 0.0) + c
        poly = nxt
    norm = math.sqrt(2.0 ** (j + k) * math.factorial(j) * math.factorial(k))
    out = {}
    for (p, q), c in poly.items():
        amp = c * math.sqrt(math.factorial(p) * math.factorial(q)) / norm
        if amp != 0.0:
            out[(p, q)] = amp
    return out


def dlcz_lossless_oracle(p_e: float, number_resolving: bool = False):
    """(fidelity, p_success) of symmetric lossless single-click heralding.

    Enumerates every photon-number outcome of the balanced splitter for the
    two-node release state and post-selects patterns where exactly one
    detector fires.  Returns the singlet fidelity of the summed microwave
    state and the total herald weight.
    """
    emission = {(1, 0): math.sqrt(1.0 - p_e), (0, 1): math.sqrt(p_e)}

    # joint amplitudes keyed by (mw_A, mw_B, n_a, n_b)
    joint: dict[tuple[int, int, int, int], complex] = {}
    for (ma, na), ca in emission.items():
        for (mb, nb), cb in emission.items():
            joint[(ma, mb, na, nb)] = ca * cb

    # propagate the optical part through the splitter
    after: dict[tuple[int, int, int, int], complex] = {}
    for (ma, mb, na, nb), c in joint.items():
        for (n1, n2), amp in _bs_output_amplitudes(na, nb).items():
            key = (ma, mb, n1, n2)
            after[key] = after.get(key, 0.0) + c * amp

    def accepted(n1: int, n2: int) -> str | None:
        if number_resolving:
            if n1 == 1 and n2 == 0:
                return "D1"
            if n1 == 0 and n2 == 1:
                return "D2"
            return None
        if n1 >= 1 and n2 == 0:
            return "D1"
        if n1 == 0 and n2 >= 1:
            return "D2"
        return None

    rho = np.zeros((4, 4), dtype=complex)  # microwave pair, qubit basis
    p_success = 0.0
    max_n = max(n for (_, _, n1, n2) in after for n in (n1, n2))
    for n1 in range(max_n + 1):
        for n2 in range(max_n + 1):
            pattern = accepted(n1, n2)
            if pattern is None:
                continue
            vec = np.zeros(4, dtype=complex)
            for (ma, mb, m1, m2), c in after.items():
                if (m1, m2) != (n1, n2):
                    continue
                amp = c * ((-1.0) ** mb if pattern == "D2" else 1.0)
                vec[ma * 2 + mb] += amp
            rho += np.outer(vec, vec.conj())
            p_success += float(np.vdot(vec, vec).real)

    if p_success == 0.0:
        return 0.0, 0.0
    singlet = np.zeros(4, dtype=complex)
    singlet[1] = 1.0 / math.sqrt(2.0)
    singlet[2] = -1.0 / math.sqrt(2.0)
    fid = float((singlet.conj() @ rho @ singlet).real) / p_success
    return fid, p_success


def false_herald_weight_lossless(p_e: float, number_resolving: bool) -> float:
    """Normalized weight of the |0,0> microwave component after heralding."""
    emission = {(1, 0): math.sqrt(1.0 - p_e), (0, 1): math.sqrt(p_e)}
    joint = {}
    for (ma, na), ca in emission.items():
        for (mb, nb), cb in emission.items():
            joint[(ma, mb, na, nb)] = ca * cb
    after = {}
    for (ma, mb, na, nb), c in joint.items():
        for (n1, n2), amp in _bs_output_amplitudes(na, nb).items():
            key = (ma, mb, n1, n2)
            after[key] = after.get(key, 0.0) + c * amp
    total = 0.0
    zero_zero = 0.0
    for (ma, mb, n1, n2), c in after.items():
        if number_resolving:
            ok = (n1 == 1 and n2 == 0) or (n1 == 0 and n2 == 1)
        else:
            ok = (n1 >= 1 and n2 == 0) or (n1 == 0 and n2 >= 1)
        if not ok:
            continue
        w = abs(c) ** 2
        total += w
        if ma == 0 and mb == 0:
            zero_zero += w
    return zero_zero / total if total else 0.0
