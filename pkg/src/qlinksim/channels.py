"""Kraus-channel constructors for the noise processes in the link model.

All constructors return :class:`KrausChannel`.  Trace-preserving channels
satisfy sum_K K^+ K = I to 1e-10 by construction; heralding projections are
flagged trace-decreasing.
"""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import comb

from .errors import DimensionError, ToleranceError, TruncationError

logger = logging.getLogger(__name__)

CPTP_TOL = 1e-10

TRACE_PRESERVING = "trace-preserving"
TRACE_DECREASING = "trace-decreasing"


@dataclass(frozen=True)
class KrausChannel:
    """A set of Kraus operators acting on a stated mode-dimension tuple."""

    operators: tuple[np.ndarray, ...]
    dims: tuple[int, ...]
    kind: str = TRACE_PRESERVING

    def __post_init__(self):
        ops = []
        for K in self.operators:
            K = np.array(K, dtype=complex)
            K.setflags(write=False)
            ops.append(K)
        object.__setattr__(self, "operators", tuple(ops))
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        d = math.prod(self.dims)
        for K in self.operators:
            if K.shape != (d, d):
                raise DimensionError(
                    f"Kraus operator shape {K.shape} does not match dims {self.dims}"
                )
        if self.kind not in (TRACE_PRESERVING, TRACE_DECREASING):
            raise DimensionError(f"unknown channel kind {self.kind!r}")
        S = sum(K.conj().T @ K for K in self.operators)
        if self.kind == TRACE_PRESERVING:
            dev = np.max(np.abs(S - np.eye(d)))
            if dev > CPTP_TOL:
                raise ToleranceError(
                    f"trace-preserving channel violates sum K^+K = I by {dev:.3e}"
                )
        else:
            top = float(np.linalg.eigvalsh(S)[-1])
            if top > 1.0 + CPTP_TOL:
                raise ToleranceError(
                    f"trace-decreasing channel has sum K^+K eigenvalue {top:.12f} > 1"
                )

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    def compose(self, after: "KrausChannel") -> "KrausChannel":
        """Channel equal to `self` followed by `after` (same mode set)."""
        if self.dims != after.dims:
            raise DimensionError("cannot compose channels on different dims")
        ops = tuple(A @ B for A in after.operators for B in self.operators)
        kind = TRACE_PRESERVING if (
            self.kind == after.kind == TRACE_PRESERVING) else TRACE_DECREASING
        return KrausChannel(ops, self.dims, kind)

    def superoperator(self) -> np.ndarray:
        """Matrix acting on row-major vec(rho)."""
        return sum(np.kron(K, K.conj()) for K in self.operators)


# ---------------------------------------------------------------------------
# ladder / subspace helpers


def destroy(dim: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim, dtype=complex),), (dim,))


def _qubit_subspace_op(op2: np.ndarray, dim: int) -> np.ndarray:
    """Embed a 2x2 operator on Fock levels {0,1}, identity on higher levels."""
    full = np.eye(dim, dtype=complex)
    full[:2, :2] = op2
    return full


PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


# ---------------------------------------------------------------------------
# loss and thermal noise


@functools.lru_cache(maxsize=512)
def loss_channel(eta: float, dim: int) -> KrausChannel:
    """Bosonic pure-loss channel (beamsplitter to vacuum) at transmissivity eta.

    K_k = sum_n sqrt(C(n,k) eta^(n-k) (1-eta)^k) |n-k><n|
    """
    if not 0.0 <= eta <= 1.0:
        raise DimensionError(f"transmissivity {eta} outside [0, 1]")
    ops = []
    for k in range(dim):
        K = np.zeros((dim, dim), dtype=complex)
        for n in range(k, dim):
            K[n - k, n] = math.sqrt(
                comb(n, k, exact=True) * eta ** (n - k) * (1.0 - eta) ** k
            )
        if np.any(K):
            ops.append(K)
    return KrausChannel(tuple(ops), (dim,))


def _psd_sqrt(mat: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(mat)
    vals = np.clip(vals, 0.0, None)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def _amplifier_kraus(gain: float, dim: int) -> list[np.ndarray]:
    """Kraus set of the phase-insensitive amplifier (two-mode squeezing with a
    vacuum idler, idler traced out), truncated at ``dim``."""
    lam = math.sqrt((gain - 1.0) / gain)       # tanh r, cosh r = sqrt(gain)
    ad = destroy(dim).conj().T
    n_diag = np.arange(dim, dtype=float)
    damp = np.diag(gain ** (-(n_diag + 1.0) / 2.0)).astype(complex)
    ops = []
    raise_l = np.eye(dim, dtype=complex)
    fact = 1.0
    for l in range(dim):
        if l > 0:
            raise_l = ad @ raise_l
            fact *= l
        ops.append((lam ** l / math.sqrt(fact)) * (raise_l @ damp))
    return ops


@functools.lru_cache(maxsize=512)
def thermal_noise_channel(n_add: float, dim: int) -> KrausChannel:
    """Channel that adds mean thermal occupancy ``n_add`` to a mode.

    Built as pure loss at 1/G followed by a phase-insensitive amplifier of
    gain G = 1 + n_add, so <n> -> <n> + n_add exactly and vacuum maps to a
    thermal state of mean n_add.  A completion operator absorbs the
    truncation-induced trace deficit; the deficit weighted by the thermal
    tail it acts on is logged when above 1e-6.
    """
    if n_add < 0:
        raise DimensionError(f"added occupancy {n_add} < 0")
    if n_add == 0:
        return identity_channel(dim)
    ratio = n_add / (1.0 + n_add)
    if ratio ** dim >= 1e-4:
        raise TruncationError(
            f"dim {dim} too small for n_add={n_add:.4g} "
            f"(thermal tail {ratio ** dim:.2e} >= 1e-4)"
        )
    gain = 1.0 + n_add
    pre = loss_channel(1.0 / gain, dim)
    amp = _amplifier_kraus(gain, dim)
    ops = [A @ B for A in amp for B in pre.operators]
    S = sum(K.conj().T @ K for K in ops)
    deficit = np.eye(dim) - S
    worst = float(np.max(np.abs(deficit)))
    if worst > 1e-12:
        # Deficit sits at the top Fock levels; weight by their thermal weight.
        effective = float(np.max(np.diag(deficit).real * ratio ** np.arange(dim)))
        if effective > 1e-6:
            logger.warning(
                "thermal channel (n_add=%.4g, dim=%d) renormalized a "
                "truncation trace error of %.2e", n_add, dim, effective,
            )
        ops.append(_psd_sqrt(deficit))
    ops = [K for K in ops if np.max(np.abs(K)) > 1e-16]
    return KrausChannel(tuple(ops), (dim,))


# ---------------------------------------------------------------------------
# qubit-subspace noise


@functools.lru_cache(maxsize=256)
def amplitude_damping(gamma: float, dim: int = 2) -> KrausChannel:
    """T1 relaxation on the {|0>,|1>} subspace; higher levels untouched."""
    if not 0.0 <= gamma <= 1.0:
        raise DimensionError(f"decay probability {gamma} outside [0, 1]")
    K0 = np.eye(dim, dtype=complex)
    K0[1, 1] = math.sqrt(1.0 - gamma)
    K1 = np.zeros((dim, dim), dtype=complex)
    K1[0, 1] = math.sqrt(gamma)
    ops = (K0,) if gamma == 0.0 else (K0, K1)
    return KrausChannel(ops, (dim,))


@functools.lru_cache(maxsize=256)
def dephasing(lam: float, dim: int = 2) -> KrausChannel:
    """Phase-flip channel on the {|0>,|1>} subspace.

    Coherence between |0> and |1> is multiplied by (1 - 2 lam).
    """
    if not 0.0 <= lam <= 1.0:
        raise DimensionError(f"phase-flip strength {lam} outside [0, 1]")
    if lam == 0.0:
        return identity_channel(dim)
    Z = _qubit_subspace_op(PAULI["Z"], dim)
    return KrausChannel(
        (math.sqrt(1.0 - lam) * np.eye(dim, dtype=complex), math.sqrt(lam) * Z),
        (dim,),
    )


def _depolarizing_ops(p: float, paulis: list[np.ndarray], dim: int) -> KrausChannel:
    n = len(paulis)
    ops = [math.sqrt(1.0 - (n - 1) * p / n) * np.eye(dim, dtype=complex)]
    ops += [math.sqrt(p / n) * P for P in paulis[1:]]
    return KrausChannel(tuple(ops), (dim,))


@functools.lru_cache(maxsize=256)
def depolarizing_1q(fidelity: float, dim: int = 2) -> KrausChannel:
    """Single-qubit depolarizing channel with average gate fidelity ``fidelity``.

    F_avg = 1 - p/2 for rho -> (1-p) rho + p I/2, hence p = 2 (1 - F).
    """
    if not 0.5 <= fidelity <= 1.0:
        raise DimensionError(f"single-qubit fidelity {fidelity} outside [1/2, 1]")
    p = 2.0 * (1.0 - fidelity)
    paulis = [_qubit_subspace_op(PAULI[s], dim) for s in "IXYZ"]
    ch = _depolarizing_ops(p, paulis, dim)
    return KrausChannel(ch.operators, (dim,))


@functools.lru_cache(maxsize=256)
def depolarizing_2q(f_op: float, dims: tuple[int, int] = (2, 2)) -> KrausChannel:
    """Two-qubit depolarizing channel with average gate fidelity ``f_op``.

    For rho -> (1-p) rho + p I/4 on the qubit subspace, the average gate
    fidelity is F_avg = 1 - 3p/4, so p = 4 (1 - F_op) / 3.  F_op in [1/4, 1].
    The Pauli operators act as identity on Fock levels >= 2.
    """
    if not 0.25 <= f_op <= 1.0:
        raise DimensionError(f"operation fidelity {f_op} outside [1/4, 1]")
    p = 4.0 * (1.0 - f_op) / 3.0
    pa = {s: _qubit_subspace_op(PAULI[s], dims[0]) for s in "IXYZ"}
    pb = {s: _qubit_subspace_op(PAULI[s], dims[1]) for s in "IXYZ"}
    paulis = [np.kron(pa[s1], pb[s2]) for s1 in "IXYZ" for s2 in "IXYZ"]
    ch = _depolarizing_ops(p, paulis, math.prod(dims))
    return KrausChannel(ch.operators, dims)


# ---------------------------------------------------------------------------
# unitaries and projections


def unitary_channel(U: np.ndarray, dims: Sequence[int]) -> KrausChannel:
    return KrausChannel((np.asarray(U, dtype=complex),), tuple(dims))


def phase_rotation(phi: float, dim: int) -> KrausChannel:
    """exp(i phi n) on a single mode (path-length phase)."""
    U = np.diag(np.exp(1j * phi * np.arange(dim)))
    return unitary_channel(U, (dim,))


def parity_phase(dim: int) -> KrausChannel:
    """(-1)^n phase, i.e. a pi rotation: local Z on the qubit subspace."""
    U = np.diag((-1.0 + 0j) ** np.arange(dim))
    return unitary_channel(U, (dim,))


@functools.lru_cache(maxsize=64)
def beamsplitter_unitary(dim_a: int, dim_b: int, theta: float = math.pi / 4.0) -> np.ndarray:
    """Two-mode beamsplitter U = exp[theta (b^+ a - a^+ b)].

    Convention: U a^+ U^+ = cos(theta) a^+ + sin(theta) b^+ and
    U b^+ U^+ = cos(theta) b^+ - sin(theta) a^+; theta = pi/4 is balanced.
    Photon number is conserved, so on modes truncated to hold the maximum
    total occupancy the matrix is exactly block-unitary.
    """
    a = np.kron(destroy(dim_a), np.eye(dim_b, dtype=complex))
    b = np.kron(np.eye(dim_a, dtype=complex), destroy(dim_b))
    gen = b.conj().T @ a - a.conj().T @ b
    return expm(theta * gen)


@functools.lru_cache(maxsize=64)
def cnot_unitary(dim_c: int, dim_t: int) -> np.ndarray:
    """CNOT on the two-qubit subspace: |1,t> -> |1, 1-t> for t in {0,1};
    identity elsewhere (including Fock levels >= 2)."""
    d = dim_c * dim_t
    U = np.eye(d, dtype=complex)
    i10 = 1 * dim_t + 0
    i11 = 1 * dim_t + 1
    U[i10, i10] = U[i11, i11] = 0.0
    U[i10, i11] = U[i11, i10] = 1.0
    return U


def click_projectors(dim: int, number_resolving: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """(no-click, click) projectors for a photon detector on one mode.

    Non-resolving detectors fire on any n >= 1; a number-resolving detector
    (test-only) accepts exactly n = 1.
    """
    P0 = np.zeros((dim, dim), dtype=complex)
    P0[0, 0] = 1.0
    if number_resolving:
        P1 = np.zeros((dim, dim), dtype=complex)
        P1[1, 1] = 1.0
    else:
        P1 = np.eye(dim, dtype=complex) - P0
    return P0, P1


def projection_channel(P: np.ndarray, dims: Sequence[int]) -> KrausChannel:
    return KrausChannel((np.asarray(P, dtype=complex),), tuple(dims),
                        kind=TRACE_DECREASING)
