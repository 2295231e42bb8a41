"""Brillouin microwave-optical transducer and emission-state model.

Covers the pump-power chain (intracavity photon number, cooperativity,
conversion efficiency, laser heating) and the joint microwave-optical
emission state of a node for both generation schemes:

* conversion (red-detuned pump): a stored excitation is partially released
  and coherently converted into a flying optical photon;
* pair generation (blue-detuned pump): two-mode squeezing creates
  correlated phonon-photon pairs, with multi-pair events retained.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .channels import loss_channel, thermal_noise_channel
from .errors import DimensionError, TruncationError
from .states import DensityMatrix, ModeSpace, apply, pure_state

HBAR = 1.054571817e-34      # J s
C_LIGHT = 299792458.0       # m/s

CONVERSION = "conversion"
SPDC = "spdc"

# Per-mode population allowed past the pair-source truncation.
SPDC_TAIL_BOUND = 1e-3
SPDC_WARN_PAIR_PROB = 0.5


@dataclass(frozen=True)
class HeatingModel:
    """Added thermal occupancy versus on-chip pump power: n0 + a * P^b.

    The power law is a calibration surface, not a measured device law; fit
    the coefficients against anchor points (see the calibration CLI) before
    trusting absolute numbers.
    """

    n0: float = 0.0
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self):
        if self.n0 < 0 or self.a < 0 or self.b < 0:
            raise DimensionError("heating coefficients must be non-negative")

    def occupancy(self, p_laser_uw: float) -> float:
        if p_laser_uw < 0:
            raise DimensionError(f"pump power {p_laser_uw} < 0")
        if p_laser_uw == 0:
            return self.n0
        return self.n0 + self.a * p_laser_uw ** self.b


@dataclass(frozen=True)
class TransducerParams:
    """Device constants for the Brillouin transducer chain."""

    C0: float = 8.8e-8            # vacuum phonon-photon cooperativity
    Q_o_int: float = 2e6          # optical intrinsic quality factor
    Q_m_int: float = 2e4          # acoustic intrinsic quality factor
    zeta_o: float = 0.5           # optical extraction factor kappa_ext/kappa_tot
    zeta_m: float = 0.9           # acoustic extraction factor
    eta_UDT: float = 0.6          # phonon waveguide-cable transducer efficiency
    eta_opt: float = 0.6          # chip-fiber optical coupling
    eta_swap: float = 0.95        # phonon <-> memory swap efficiency (pair scheme)
    lambda_pump_nm: float = 1550.0
    omega_m_hz: float = 2 * math.pi * 5e9   # acoustic mode frequency (rad/s)
    heating: HeatingModel = field(default_factory=HeatingModel)

    def __post_init__(self):
        for name in ("zeta_o", "zeta_m", "eta_UDT", "eta_opt", "eta_swap"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DimensionError(f"{name}={v} outside [0, 1]")
        if self.zeta_o >= 1.0:
            raise DimensionError("zeta_o must be < 1 for a finite linewidth")
        if self.C0 <= 0 or self.Q_o_int <= 0 or self.Q_m_int <= 0:
            raise DimensionError("C0 and quality factors must be positive")

    @property
    def omega_o_hz(self) -> float:
        return 2 * math.pi * C_LIGHT / (self.lambda_pump_nm * 1e-9)

    @property
    def kappa_o_hz(self) -> float:
        # zeta = kappa_ext / kappa_tot, so kappa_tot = kappa_int / (1 - zeta);
        # zeta_o = 0.5 reproduces critical coupling (Q_tot = Q_int / 2).
        return self.omega_o_hz / (self.Q_o_int * (1.0 - self.zeta_o))

    @property
    def kappa_m_hz(self) -> float:
        return self.omega_m_hz / (self.Q_m_int * (1.0 - self.zeta_m))


@dataclass(frozen=True)
class EmissionState:
    """Joint (microwave memory, flying optical) state of one node."""

    rho: DensityMatrix
    scheme: str
    P_e: float
    P_laser_uw: float
    n_th: float


def pump_photon_number(p_laser_uw: float, p: TransducerParams) -> float:
    """Intracavity pump photon number for a resonant drive.

    n_pump = 4 zeta_o P / (hbar omega_o kappa_o).
    """
    if p_laser_uw < 0:
        raise DimensionError(f"pump power {p_laser_uw} < 0")
    p_watt = p_laser_uw * 1e-6
    return 4.0 * p.zeta_o * p_watt / (HBAR * p.omega_o_hz * p.kappa_o_hz)


def cooperativity(p_laser_uw: float, p: TransducerParams) -> float:
    """Pump-enhanced cooperativity C = C0 * n_pump."""
    return p.C0 * pump_photon_number(p_laser_uw, p)


def conversion_efficiency(p_laser_uw: float, p: TransducerParams) -> float:
    """Phonon-to-fiber photon conversion efficiency of the triply resonant
    chain: eta = zeta_o zeta_m 4C/(1+C)^2, peaking at C = 1."""
    C = cooperativity(p_laser_uw, p)
    return p.zeta_o * p.zeta_m * 4.0 * C / (1.0 + C) ** 2


def thermal_occupancy(p_laser_uw: float, heating: HeatingModel) -> float:
    """Added microwave-mode occupancy from background plus pump heating."""
    return heating.occupancy(p_laser_uw)


def spdc_pair_probability(p_laser_uw: float, p: TransducerParams,
                          t_pulse_s: float) -> float:
    """Pair probability per pulse in the blue-detuned scheme.

    Linearized scattering probability C * kappa_m * t_pulse; the caller is
    responsible for keeping it inside the truncation-safe region.
    """
    return cooperativity(p_laser_uw, p) * p.kappa_m_hz * t_pulse_s


def emit_conversion(P_e: float, p_laser_uw: float, p: TransducerParams,
                    dim_mw: int = 3, dim_opt: int = 3) -> EmissionState:
    """Emission state of the red-detuned (conversion) scheme.

    The memory starts in Fock |1> and releases an excitation with
    probability P_e, giving sqrt(1-P_e)|1,0> + sqrt(P_e)|0,1>.  The flying
    mode then sees the full extraction path loss
    eta_path = eta_UDT * eta_conv(P) * eta_opt, and the microwave mode picks
    up the pump-heating occupancy.
    """
    if not 0.0 <= P_e <= 1.0:
        raise DimensionError(f"release probability {P_e} outside [0, 1]")
    space = ModeSpace((dim_mw, dim_opt), ("microwave", "optical"))
    amp = np.zeros(space.dim, dtype=complex)
    amp[1 * dim_opt + 0] = math.sqrt(1.0 - P_e)
    amp[0 * dim_opt + 1] = math.sqrt(P_e)
    rho = pure_state(space, amp)

    eta_path = p.eta_UDT * conversion_efficiency(p_laser_uw, p) * p.eta_opt
    rho = apply(rho, loss_channel(eta_path, dim_opt), [1])
    n_th = thermal_occupancy(p_laser_uw, p.heating)
    if n_th > 0:
        rho = apply(rho, thermal_noise_channel(n_th, dim_mw), [0])
    return EmissionState(rho.normalized(), CONVERSION, P_e, p_laser_uw, n_th)


def emit_spdc(p_laser_uw: float, p: TransducerParams, t_pulse_s: float = 1e-6,
              dim_mw: int = 4, dim_opt: int = 4) -> EmissionState:
    """Emission state of the blue-detuned (pair generation) scheme.

    Builds a two-mode squeezed vacuum over (phonon, photon) with
    tanh^2(r) = P_e(P_laser), truncated at the mode dimensions, then applies
    the insertion loss eta_UDT * eta_swap on the phonon-to-microwave arm,
    eta_opt on the optical arm, and pump heating on the microwave mode.
    Multi-pair terms up to the truncation are retained.
    """
    P_e = spdc_pair_probability(p_laser_uw, p, t_pulse_s)
    if P_e >= SPDC_WARN_PAIR_PROB:
        warnings.warn(
            f"pair probability {P_e:.3f} >= {SPDC_WARN_PAIR_PROB}; heralds are "
            "dominated by false events", stacklevel=2,
        )
    n_keep = min(dim_mw, dim_opt)
    tail = P_e ** n_keep
    if tail > SPDC_TAIL_BOUND:
        raise TruncationError(
            f"pair probability {P_e:.4f} leaves population {tail:.2e} beyond "
            f"n={n_keep - 1} (> {SPDC_TAIL_BOUND}); raise the truncation or "
            "lower the pump power"
        )
    space = ModeSpace((dim_mw, dim_opt), ("microwave", "optical"))
    lam = math.sqrt(P_e)
    amp = np.zeros(space.dim, dtype=complex)
    for n in range(n_keep):
        amp[n * dim_opt + n] = lam ** n
    rho = pure_state(space, amp)  # normalization absorbs the truncated tail

    rho = apply(rho, loss_channel(p.eta_UDT * p.eta_swap, dim_mw), [0])
    rho = apply(rho, loss_channel(p.eta_opt, dim_opt), [1])
    n_th = thermal_occupancy(p_laser_uw, p.heating)
    if n_th > 0:
        rho = apply(rho, thermal_noise_channel(n_th, dim_mw), [0])
    return EmissionState(rho.normalized(), SPDC, P_e, p_laser_uw, n_th)
