"""Entanglement metrics on two-node states."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import DimensionError
from .states import DensityMatrix, psi_minus_vector

IMAG_TOL = 1e-12


def fidelity_psi_minus(rho: DensityMatrix) -> float:
    """Overlap <psi-|rho|psi-> with the singlet on the two-mode qubit subspace.

    Population outside {|0>,|1>} x {|0>,|1>} stays in rho but contributes
    zero to the overlap.
    """
    if rho.space.n_modes != 2:
        raise DimensionError(
            f"fidelity_psi_minus needs a two-mode state, got {rho.space.n_modes}"
        )
    d1, d2 = rho.space.dims
    v = psi_minus_vector(d1, d2)
    val = complex(v.conj() @ rho.data @ v)
    if abs(val.imag) > IMAG_TOL:
        raise DimensionError(f"fidelity has imaginary part {val.imag:.3e}")
    return float(val.real)


def partial_transpose(rho: DensityMatrix, transpose_modes: Sequence[int]) -> np.ndarray:
    """Matrix of rho transposed on the given modes."""
    modes = rho.space.check_modes(transpose_modes)
    n = rho.space.n_modes
    tens = rho.tensor_view()
    perm = list(range(2 * n))
    for m in modes:
        perm[m], perm[n + m] = perm[n + m], perm[m]
    return tens.transpose(perm).reshape(rho.dim, rho.dim)


def log_negativity(rho: DensityMatrix, cut: Sequence[int]) -> float:
    """log2 of the trace norm of the partial transpose across ``cut``.

    Upper-bounds the Bell pairs distillable per copy; zero for separable
    (PPT) states, 1 for a maximally entangled qubit pair.
    """
    modes = rho.space.check_modes(cut)
    if not modes or len(modes) == rho.space.n_modes:
        raise DimensionError("cut must be a proper non-empty mode subset")
    pt = partial_transpose(rho, modes)
    vals = np.linalg.eigvalsh(pt)
    trace_norm = float(np.sum(np.abs(vals)))
    return max(0.0, float(np.log2(trace_norm)))
