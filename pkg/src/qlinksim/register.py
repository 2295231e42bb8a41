"""cQED memory model: idling decoherence, noisy two-qubit gates, and
computational-basis readout on bosonic register modes.

All operations act on the {|0>, |1>} subspace of each mode; higher Fock
levels are carried along untouched and are binned as outcome "1" by the
click-like dispersive readout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import (
    KrausChannel,
    amplitude_damping,
    cnot_unitary,
    dephasing,
    depolarizing_2q,
    unitary_channel,
)
from .errors import DimensionError
from .states import DensityMatrix, apply, measurement_outcomes

CAVITY = "cavity"
TRANSMON = "transmon"


@dataclass(frozen=True)
class MemoryParams:
    """Idling and local-operation quality of one register."""

    kind: str = CAVITY
    T1_s: float = 1e-3
    T_phi_s: float = math.inf      # pure dephasing time; inf = negligible
    F_op: float = 0.99             # local two-qubit operation fidelity

    def __post_init__(self):
        if self.kind not in (CAVITY, TRANSMON):
            raise DimensionError(f"unknown register kind {self.kind!r}")
        if self.T1_s <= 0:
            raise DimensionError("T1 must be positive")
        if self.T_phi_s <= 0:
            raise DimensionError("T_phi must be positive (use inf to disable)")
        if not 0.25 < self.F_op <= 1.0:
            raise DimensionError(f"F_op={self.F_op} outside (1/4, 1]")


def decay_probability(t_s: float, T1_s: float) -> float:
    """gamma = 1 - exp(-t/T1)."""
    if T1_s == math.inf:
        return 0.0
    return -math.expm1(-t_s / T1_s)


def phase_flip_strength(t_s: float, T_phi_s: float) -> float:
    """lambda with (1 - 2 lambda) = exp(-t/T_phi), the coherence multiplier."""
    if T_phi_s == math.inf:
        return 0.0
    return 0.5 * -math.expm1(-t_s / T_phi_s)


def idle_kraus(t_s: float, mem: MemoryParams, dim: int) -> KrausChannel:
    """Combined T1 relaxation and pure dephasing for an idle period."""
    if t_s < 0:
        raise DimensionError(f"idle duration {t_s} < 0")
    ad = amplitude_damping(decay_probability(t_s, mem.T1_s), dim)
    pf = dephasing(phase_flip_strength(t_s, mem.T_phi_s), dim)
    return ad.compose(pf)


def idle(rho: DensityMatrix, t_s: float, mem: MemoryParams,
         targets) -> DensityMatrix:
    """Let the given modes decohere for ``t_s`` seconds."""
    targets = rho.space.check_modes(targets)
    for m in targets:
        rho = apply(rho, idle_kraus(t_s, mem, rho.space.dims[m]), [m])
    return rho


def noisy_cnot(rho: DensityMatrix, control: int, target: int,
               mem: MemoryParams) -> DensityMatrix:
    """Ideal CNOT on the two-qubit subspace followed by a two-qubit
    depolarizing channel at the register's operation fidelity."""
    control, target = rho.space.check_modes([control, target])
    dc = rho.space.dims[control]
    dt = rho.space.dims[target]
    rho = apply(rho, unitary_channel(cnot_unitary(dc, dt), (dc, dt)),
                [control, target])
    if mem.F_op < 1.0:
        rho = apply(rho, depolarizing_2q(mem.F_op, (dc, dt)), [control, target])
    return rho


def _binned_projectors(dim: int) -> list[np.ndarray]:
    """Outcome-0 and outcome-1 readout projectors; levels >= 2 read as "1"."""
    P0 = np.zeros((dim, dim), dtype=complex)
    P0[0, 0] = 1.0
    return [P0, np.eye(dim, dtype=complex) - P0]


def measure_z_pair(rho: DensityMatrix, m1: int, m2: int):
    """Projective joint readout of two modes in the computational basis.

    Returns {(b1, b2): (probability, post-state or None)}; probabilities sum
    to one and post-states are normalized.
    """
    m1, m2 = rho.space.check_modes([m1, m2])
    projs = [_binned_projectors(rho.space.dims[m]) for m in (m1, m2)]
    results = {}
    for outcome, weight, data in measurement_outcomes(rho, (m1, m2), projs):
        if weight > 1e-15:
            post = DensityMatrix(rho.space, data / weight, check=False)
        else:
            post, weight = None, 0.0
        results[outcome] = (weight, post)
    return results
