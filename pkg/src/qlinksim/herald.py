"""Optical link and single-click heralding between two emitting nodes.

The flying modes of both nodes are attenuated by fiber and detector
efficiency, interfered on a balanced beamsplitter, and post-selected on
exactly one detector firing.  Both single-click patterns are accepted; the
pattern whose phase heralds the triplet component gets a local pi frame
correction so that both target the singlet.

Flying modes are zero-padded before the beamsplitter so every reachable
total photon number is representable; the splitter is then exactly unitary
on all populated sectors and no truncation overflow can occur.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channels import (
    beamsplitter_unitary,
    click_projectors,
    loss_channel,
    parity_phase,
    phase_rotation,
)
from .errors import DimensionError, ToleranceError
from .metrics import log_negativity
from .states import DensityMatrix, apply, embed_mode, partial_trace, tensor
from .transducer import EmissionState

MIDPOINT = "midpoint"
ONE_SIDED = "one-sided"


@dataclass(frozen=True)
class LinkParams:
    """Fiber link and detection-station geometry."""

    L_km: float = 1.0
    fiber_loss_db_per_km: float = 0.2
    eta_QE: float = 0.9                 # detector efficiency, no dark counts
    geometry: str = MIDPOINT
    fiber_velocity_m_s: float = 2.0e8
    t_pulse_s: float = 1e-6
    duty: float = 1.0                   # idle:pulse ratio; 1.0 is a 1:1 cycle
    phase_offset: float = 0.0           # interferometer path phase (rad)

    def __post_init__(self):
        if self.L_km < 0:
            raise DimensionError(f"distance {self.L_km} km < 0")
        if self.fiber_loss_db_per_km < 0:
            raise DimensionError("fiber loss must be >= 0")
        if not 0.0 <= self.eta_QE <= 1.0:
            raise DimensionError(f"eta_QE={self.eta_QE} outside [0, 1]")
        if self.geometry not in (MIDPOINT, ONE_SIDED):
            raise DimensionError(f"unknown geometry {self.geometry!r}")
        if self.t_pulse_s <= 0 or self.fiber_velocity_m_s <= 0:
            raise DimensionError("pulse length and fiber velocity must be > 0")


@dataclass(frozen=True)
class HeraldOutcome:
    """Post-selected two-node microwave state and its bookkeeping."""

    rho_AB: Optional[DensityMatrix]
    p_success: float
    pattern: tuple[str, ...]
    pattern_weights: dict


def fiber_transmission(L_km: float, link: LinkParams) -> tuple[float, float]:
    """Per-arm fiber transmissivity 10^(-loss*d/10).

    Midpoint detection: each photon travels L/2.  One-sided: node A's photon
    travels the full L while node B sits at the detectors.
    """
    if L_km < 0:
        raise DimensionError(f"distance {L_km} km < 0")
    alpha = link.fiber_loss_db_per_km

    def trans(d_km: float) -> float:
        return 10.0 ** (-alpha * d_km / 10.0)

    if link.geometry == MIDPOINT:
        return trans(L_km / 2.0), trans(L_km / 2.0)
    return trans(L_km), 1.0


def herald_latency(link: LinkParams) -> float:
    """Time from emission to classical confirmation at the nodes.

    Midpoint: photon flies L/2 out, result flies L/2 back -> L/v.
    One-sided: photon L out, result L back -> 2L/v.
    """
    L_m = link.L_km * 1e3
    if link.geometry == MIDPOINT:
        return L_m / link.fiber_velocity_m_s
    return 2.0 * L_m / link.fiber_velocity_m_s


def attempt_cycle_time(link: LinkParams) -> float:
    """Per-attempt cycle: pulsed duty floor or the herald latency."""
    return max((1.0 + link.duty) * link.t_pulse_s, herald_latency(link))


def rate(p_success: float, link: LinkParams) -> float:
    """Heralding rate in Hz: successes per attempt cycle."""
    if not 0.0 <= p_success <= 1.0:
        raise DimensionError(f"p_success={p_success} outside [0, 1]")
    return p_success / attempt_cycle_time(link)


def throughput(rate_hz: float, rho_AB: DensityMatrix) -> float:
    """Rate-weighted entanglement yield Theta = R * E_N(rho_AB)."""
    if rate_hz < 0:
        raise DimensionError(f"rate {rate_hz} < 0")
    return rate_hz * log_negativity(rho_AB, [0])


def herald(a: EmissionState, b: EmissionState, link: LinkParams, *,
           number_resolving: bool = False) -> HeraldOutcome:
    """Interfere the two nodes' flying modes and post-select a single click.

    Steps: pad flying modes so the splitter is exact, fold fiber and
    detector losses into each arm, apply the balanced beamsplitter, project
    on the two one-detector click patterns (non-number-resolving by
    default), apply the pi frame correction on the second pattern, sum the
    branches, trace out light, and normalize.
    """
    dims_a = a.rho.space.dims
    dims_b = b.rho.space.dims
    if len(dims_a) != 2 or len(dims_b) != 2:
        raise DimensionError("emission states must be (memory, flying) pairs")

    # Pad flying modes: totals up to (da-1)+(db-1) photons must fit.
    d_fly = dims_a[1] + dims_b[1] - 1
    rho_a = embed_mode(a.rho, 1, d_fly)
    rho_b = embed_mode(b.rho, 1, d_fly)

    joint = tensor(rho_a, rho_b)  # modes: (mw_A, fly_A, mw_B, fly_B)
    eta_a, eta_b = fiber_transmission(link.L_km, link)
    joint = apply(joint, loss_channel(eta_a * link.eta_QE, d_fly), [1])
    joint = apply(joint, loss_channel(eta_b * link.eta_QE, d_fly), [3])
    if link.phase_offset:
        joint = apply(joint, phase_rotation(link.phase_offset, d_fly), [3])

    U = beamsplitter_unitary(d_fly, d_fly)
    from .channels import unitary_channel

    pre_trace = joint.trace()
    joint = apply(joint, unitary_channel(U, (d_fly, d_fly)), [1, 3])
    if abs(joint.trace() - pre_trace) > 1e-10:
        raise ToleranceError("beamsplitter stage lost trace; truncation overflow")

    P_none, P_click = click_projectors(d_fly, number_resolving)
    tens = joint.tensor_view()
    dims = joint.space.dims
    from .states import _apply_operator

    def project(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
        out = _apply_operator(tens, p1, (1,), dims, bra=False)
        out = _apply_operator(out, p1, (1,), dims, bra=True)
        out = _apply_operator(out, p2, (3,), dims, bra=False)
        out = _apply_operator(out, p2, (3,), dims, bra=True)
        return out.reshape(joint.dim, joint.dim)

    branch_1 = project(P_click, P_none)
    branch_2 = project(P_none, P_click)

    d1 = DensityMatrix(joint.space, branch_1, check=False)
    d2 = DensityMatrix(joint.space, branch_2, check=False)
    # Pattern 2 heralds the triplet; a local pi phase on one memory flips it
    # to the singlet (software frame choice, applied error-free).
    d2 = apply(d2, parity_phase(dims[2]), [2])

    w1 = d1.trace()
    w2 = d2.trace()
    p_success = w1 + w2
    weights = {"D1": w1, "D2": w2}

    if p_success <= 0.0:
        return HeraldOutcome(None, 0.0, ("D1", "D2"), weights)

    summed = DensityMatrix(joint.space, d1.data + d2.data, check=False)
    rho_ab = partial_trace(summed, [0, 2]).normalized().validate()
    return HeraldOutcome(rho_ab, float(p_success), ("D1", "D2"), weights)
