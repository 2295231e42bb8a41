"""Raw entangled-pair factory: emission, heralding, and register delivery.

One call produces the "delivered" raw pair: the heralded two-memory state
after the confirmation-latency idle and the per-node state-handling error,
together with the per-attempt success probability and cycle time.  This is
the unit consumed by sweeps and by the pumping schedule.
"""

from __future__ import annotations

from dataclasses import dataclass

from .channels import depolarizing_1q
from .errors import DimensionError
from .herald import HeraldOutcome, LinkParams, attempt_cycle_time, herald, rate
from .register import MemoryParams, idle
from .states import DensityMatrix, apply
from .transducer import (
    CONVERSION,
    SPDC,
    TransducerParams,
    conversion_efficiency,
    emit_conversion,
    emit_spdc,
    thermal_occupancy,
)


@dataclass(frozen=True)
class RawEbit:
    """A delivered raw pair plus the bookkeeping the sweeps report."""

    rho: DensityMatrix
    p_success: float
    t_cycle_s: float
    rate_hz: float
    herald_outcome: HeraldOutcome
    P_e: float
    n_th: float
    eta_conv: float


def generate_raw_ebit(scheme: str, P_e: float, p_laser_uw: float,
                      device: TransducerParams, link: LinkParams,
                      mem_a: MemoryParams, mem_b: MemoryParams,
                      dim_mw: int = 4, dim_opt: int = 3, *,
                      number_resolving: bool = False) -> RawEbit:
    """Generate one raw pair between two identical emitters.

    The memories idle for the full attempt cycle (photon flight plus
    classical confirmation), and each node's preparation/handling around the
    emission is lumped into one single-qubit depolarizing at its operation
    fidelity.
    """
    if scheme == CONVERSION:
        emission = emit_conversion(P_e, p_laser_uw, device,
                                   dim_mw=dim_mw, dim_opt=dim_opt)
    elif scheme == SPDC:
        emission = emit_spdc(p_laser_uw, device, t_pulse_s=link.t_pulse_s,
                             dim_mw=dim_mw, dim_opt=max(dim_opt, dim_mw))
    else:
        raise DimensionError(f"unknown scheme {scheme!r}")

    outcome = herald(emission, emission, link,
                     number_resolving=number_resolving)
    if outcome.rho_AB is None:
        raise DimensionError("herald probability is zero for this scenario")

    t_cycle = attempt_cycle_time(link)
    rho = outcome.rho_AB
    rho = idle(rho, t_cycle, mem_a, [0])
    rho = idle(rho, t_cycle, mem_b, [1])
    if mem_a.F_op < 1.0:
        rho = apply(rho, depolarizing_1q(mem_a.F_op, rho.space.dims[0]), [0])
    if mem_b.F_op < 1.0:
        rho = apply(rho, depolarizing_1q(mem_b.F_op, rho.space.dims[1]), [1])

    return RawEbit(
        rho=rho.validate(),
        p_success=outcome.p_success,
        t_cycle_s=t_cycle,
        rate_hz=rate(outcome.p_success, link),
        herald_outcome=outcome,
        P_e=emission.P_e,
        n_th=emission.n_th,
        eta_conv=conversion_efficiency(p_laser_uw, device),
    )
