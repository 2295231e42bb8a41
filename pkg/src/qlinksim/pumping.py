"""Asymmetric entanglement pumping of a stored pair by fresh raw pairs.

Protocol: round 0 parks a raw pair in the storage registers.  Each later
round generates one more raw pair (the stored pair decoheres while it
waits), applies a local CNOT at each node from the stored onto the fresh
qubit, and measures the fresh pair; the stored pair survives only on the
(1,1) outcome.  No bilateral pre-rotations are applied, which is what makes
the filter effective against amplitude-damping-type errors.  Any failure
restarts the whole protocol from round 0.

Two engines share one linearized pump map: a deterministic channel-algebra
recursion (exact for fidelities, first-order for rates) and a Monte Carlo
renewal simulation that is the ground truth for rates.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .channels import KrausChannel
from .errors import DimensionError
from .metrics import fidelity_psi_minus, log_negativity
from .register import MemoryParams, idle_kraus, measure_z_pair, noisy_cnot
from .states import DensityMatrix, ModeSpace, _apply_operator, psi_minus_vector, tensor

MAX_ROUNDS = 8
MIN_MC_SAMPLES = 100
_MC_CHUNK = 4096
_IDLE_CACHE_CAP = 2048

ANALYTIC = "analytic"
MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class RawEbitSource:
    """Everything the pump needs to know about raw-pair generation."""

    rho: DensityMatrix          # delivered raw pair (includes its own idle)
    p_herald: float             # per-attempt herald probability
    t_cycle_s: float            # attempt cycle length
    t_local_s: float = 1e-6     # local gate + readout time per round
    mem_a: MemoryParams = field(default_factory=MemoryParams)
    mem_b: MemoryParams = field(default_factory=MemoryParams)

    def __post_init__(self):
        if self.rho.space.n_modes != 2:
            raise DimensionError("raw pair must live on two modes")
        if not 0.0 < self.p_herald <= 1.0:
            raise DimensionError(f"p_herald={self.p_herald} outside (0, 1]")
        if self.t_cycle_s <= 0:
            raise DimensionError("t_cycle must be positive")

    @property
    def raw_rate_hz(self) -> float:
        return self.p_herald / self.t_cycle_s


@dataclass(frozen=True)
class PumpSchedule:
    rounds: int
    source: RawEbitSource
    include_wait_decoherence: bool = True

    def __post_init__(self):
        if not 0 <= self.rounds <= MAX_ROUNDS:
            raise DimensionError(f"rounds={self.rounds} outside [0, {MAX_ROUNDS}]")


@dataclass(frozen=True)
class RoundResult:
    round: int
    F: float
    p_round: float
    rate_hz: float
    E_N: float
    mc_stderr_F: Optional[float] = None
    mc_stderr_rate: Optional[float] = None


@dataclass(frozen=True)
class PumpReport:
    rounds: tuple[RoundResult, ...]
    method: str
    mc_samples: Optional[int] = None
    seed: Optional[int] = None


# ---------------------------------------------------------------------------
# one pump round


def pump_round(stored: DensityMatrix, raw: DensityMatrix,
               mem_a: MemoryParams, mem_b: MemoryParams | None = None, *,
               keep_outcome: tuple[int, int] = (1, 1)):
    """Consume one raw pair to pump the stored pair.

    Applies CNOT(stored_A -> raw_A) and CNOT(stored_B -> raw_B) at the two
    nodes' operation fidelities, measures the raw pair in the computational
    basis, and keeps the stored pair only on ``keep_outcome`` (the (0,0)
    variant is exposed for protocol exploration only).  A successful round
    flips the singlet to the triplet, so a local pi frame correction on
    node B (software frame choice, error-free) restores the singlet target.

    Returns (normalized kept state, success probability).
    """
    if mem_b is None:
        mem_b = mem_a
    if stored.space.n_modes != 2 or raw.space.n_modes != 2:
        raise DimensionError("pump_round expects two-mode stored and raw pairs")
    joint = tensor(stored, raw)    # modes: stored_A, stored_B, raw_A, raw_B
    joint = noisy_cnot(joint, 0, 2, mem_a)
    joint = noisy_cnot(joint, 1, 3, mem_b)
    outcomes = measure_z_pair(joint, 2, 3)
    p_succ, post = outcomes[keep_outcome]
    if post is None:
        return None, 0.0
    from .channels import parity_phase
    from .states import apply, partial_trace

    kept = partial_trace(post, [0, 1])
    kept = apply(kept, parity_phase(kept.space.dims[1]), [1]).validate()
    return kept, p_succ


# ---------------------------------------------------------------------------
# waiting-time decoherence


def _geometric_series(p: float, x: float) -> float:
    """sum_{k>=1} p (1-p)^(k-1) x^k = p x / (1 - (1-p) x)."""
    return p * x / (1.0 - (1.0 - p) * x)


def wait_decay_channel(mem: MemoryParams, p_herald: float, t_cycle_s: float,
                       dim: int = 2) -> KrausChannel:
    """Decoherence of one qubit over a geometrically distributed wait.

    The wait lasts k attempt cycles with probability (1-p)^(k-1) p, and each
    cycle applies the T1/T_phi idle map, so every matrix element is a
    geometric series with closed form p x / (1 - (1-p) x).  The result is an
    amplitude-damping-plus-dephasing channel with population transfer
    g = 1 - S(e^(-t/T1)) and coherence factor c = S(e^(-t/2T1 - t/T_phi)).
    """
    if not 0.0 < p_herald <= 1.0:
        raise DimensionError(f"p_herald={p_herald} outside (0, 1]")
    if t_cycle_s <= 0:
        raise DimensionError("t_cycle must be positive")
    x_pop = math.exp(-t_cycle_s / mem.T1_s) if mem.T1_s != math.inf else 1.0
    x_coh = x_pop ** 0.5
    if mem.T_phi_s != math.inf:
        x_coh *= math.exp(-t_cycle_s / mem.T_phi_s)
    g = 1.0 - _geometric_series(p_herald, x_pop)
    c = _geometric_series(p_herald, x_coh)

    K0 = np.eye(dim, dtype=complex)
    K0[1, 1] = c
    K1 = np.zeros((dim, dim), dtype=complex)
    K1[0, 1] = math.sqrt(g)
    ops = [K0, K1]
    resid = 1.0 - g - c * c
    if resid > 1e-15:
        K2 = np.zeros((dim, dim), dtype=complex)
        K2[1, 1] = math.sqrt(resid)
        ops.append(K2)
    return KrausChannel(tuple(ops), (dim,))


def _pair_kraus(mem_a: MemoryParams, mem_b: MemoryParams, t_s: float,
                dims: tuple[int, int]) -> list[np.ndarray]:
    """Joint Kraus set of simultaneous idling on both halves of a pair."""
    ka = idle_kraus(t_s, mem_a, dims[0]).operators
    kb = idle_kraus(t_s, mem_b, dims[1]).operators
    return [np.kron(A, B) for A in ka for B in kb]


def _superop(ops) -> np.ndarray:
    return sum(np.kron(K, K.conj()) for K in ops)


def _wait_superop(src: RawEbitSource, dims: tuple[int, int]) -> np.ndarray:
    """Geometric mixture of shared-wait joint idle maps, in closed form.

    The wait is one random variable shared by both nodes, so the mixture is
    taken over the joint map, not per qubit:
    G = sum_k p(1-p)^(k-1) M^k = p M (I - (1-p) M)^(-1) with M the
    one-cycle joint idle superoperator.
    """
    M = _superop(_pair_kraus(src.mem_a, src.mem_b, src.t_cycle_s, dims))
    n = M.shape[0]
    p = src.p_herald
    return p * (M @ np.linalg.inv(np.eye(n) - (1.0 - p) * M))


class _PumpContext:
    """Precomputed operators for repeated pump-map evaluation."""

    def __init__(self, src: RawEbitSource, *, keep_outcome=(1, 1)):
        self.src = src
        self.dims = src.rho.space.dims
        self.h = self.dims[0] * self.dims[1]
        self.raw_data = np.asarray(src.rho.data)
        from .channels import cnot_unitary, depolarizing_2q

        da, db = self.dims
        self.circuit = []
        self.circuit.append(((cnot_unitary(da, da),), (0, 2)))
        if src.mem_a.F_op < 1.0:
            self.circuit.append(
                (depolarizing_2q(src.mem_a.F_op, (da, da)).operators, (0, 2)))
        self.circuit.append(((cnot_unitary(db, db),), (1, 3)))
        if src.mem_b.F_op < 1.0:
            self.circuit.append(
                (depolarizing_2q(src.mem_b.F_op, (db, db)).operators, (1, 3)))

        from .register import _binned_projectors

        self.keep_projectors = [
            (_binned_projectors(da)[keep_outcome[0]], 2),
            (_binned_projectors(db)[keep_outcome[1]], 3),
        ]
        from .channels import parity_phase

        # post-success singlet frame restoration: pi phase on node B
        self.frame_z = np.kron(np.eye(da, dtype=complex),
                               parity_phase(db).operators[0])
        self.singlet = psi_minus_vector(da, db)
        self.pump_superop, self.trace_vec = self._build_superop()

    def kept(self, sigma: np.ndarray) -> np.ndarray:
        """Unnormalized kept stored-pair matrix after one pump attempt."""
        dims = self.dims + self.dims
        joint = np.kron(sigma, self.raw_data)
        tens = joint.reshape(dims + dims)
        for ops, targets in self.circuit:
            out = np.zeros_like(tens)
            for K in ops:
                tmp = _apply_operator(tens, K, targets, dims, bra=False)
                out += _apply_operator(tmp, K, targets, dims, bra=True)
            tens = out
        for P, target in self.keep_projectors:
            tens = _apply_operator(tens, P, (target,), dims, bra=False)
            tens = _apply_operator(tens, P, (target,), dims, bra=True)
        h = self.h
        mat = tens.reshape(h, h, h, h)
        kept = np.einsum("abcb->ac", mat)
        return self.frame_z @ kept @ self.frame_z.conj().T

    def _build_superop(self):
        h = self.h
        sup = np.zeros((h * h, h * h), dtype=complex)
        basis = np.zeros((h, h), dtype=complex)
        for i in range(h):
            for j in range(h):
                basis[:] = 0.0
                basis[i, j] = 1.0
                sup[:, i * h + j] = self.kept(basis).reshape(-1)
        trace_vec = np.eye(h, dtype=complex).reshape(-1)
        return sup, trace_vec

    def fidelity(self, sigma: np.ndarray) -> float:
        return float((self.singlet.conj() @ sigma @ self.singlet).real)


def _round_zero_result(src: RawEbitSource) -> RoundResult:
    return RoundResult(
        round=0,
        F=fidelity_psi_minus(src.rho),
        p_round=src.p_herald,
        rate_hz=src.raw_rate_hz,
        E_N=log_negativity(src.rho, [0]),
    )


def _state_result(k, sigma_mat, space, p_round, rate_hz,
                  stderr_f=None, stderr_rate=None) -> RoundResult:
    sigma_mat = 0.5 * (sigma_mat + sigma_mat.conj().T)
    dm = DensityMatrix(space, sigma_mat, check=False).validate()
    return RoundResult(
        round=k,
        F=fidelity_psi_minus(dm),
        p_round=p_round,
        rate_hz=rate_hz,
        E_N=log_negativity(dm, [0]),
        mc_stderr_F=stderr_f,
        mc_stderr_rate=stderr_rate,
    )


def run_schedule(sched: PumpSchedule) -> PumpReport:
    """Deterministic channel-algebra evaluation of the pumping schedule.

    Fidelities are exact expectations: the pump map and the shared-wait
    channel are linear, so averaging the unnormalized kept state over wait
    times and histories commutes with every round.  Rates come from the
    renewal recursion E[T_k] = (E[T_(k-1)] + 1/R_raw + t_local) / p_k, a
    first-order estimate; use the Monte Carlo engine for trusted rates.
    """
    src = sched.source
    ctx = _PumpContext(src)
    results = [_round_zero_result(src)]
    if sched.rounds == 0:
        return PumpReport(tuple(results), ANALYTIC)

    dims = ctx.dims
    if sched.include_wait_decoherence:
        G = _wait_superop(src, dims)
    else:
        G = np.eye(ctx.h * ctx.h, dtype=complex)

    sigma_vec = ctx.raw_data.reshape(-1).astype(complex)
    expected_t = 1.0 / src.raw_rate_hz
    for k in range(1, sched.rounds + 1):
        waited = G @ sigma_vec
        kept_vec = ctx.pump_superop @ waited
        p_k = float((ctx.trace_vec @ kept_vec).real)
        if p_k <= 0:
            raise DimensionError(f"pump round {k} has zero success probability")
        sigma_vec = kept_vec / p_k
        expected_t = (expected_t + 1.0 / src.raw_rate_hz + src.t_local_s) / p_k
        results.append(_state_result(
            k, sigma_vec.reshape(ctx.h, ctx.h), src.rho.space, p_k,
            1.0 / expected_t))
    return PumpReport(tuple(results), ANALYTIC)


# ---------------------------------------------------------------------------
# Monte Carlo renewal simulation


class _IdleCache:
    """Per-wait-count joint idle Kraus operators, capped in size."""

    def __init__(self, src: RawEbitSource, dims):
        self.src = src
        self.dims = dims
        self.cache: dict[int, list[np.ndarray]] = {}

    def ops(self, k: int) -> list[np.ndarray]:
        ops = self.cache.get(k)
        if ops is None:
            ops = _pair_kraus(self.src.mem_a, self.src.mem_b,
                              k * self.src.t_cycle_s, self.dims)
            if len(self.cache) < _IDLE_CACHE_CAP:
                self.cache[k] = ops
        return ops


def _mc_chunk(sched: PumpSchedule, ctx: _PumpContext, idle_cache: _IdleCache,
              n_trials: int, seed_seq: np.random.SeedSequence):
    rng = np.random.default_rng(seed_seq)
    src = sched.source
    n_rounds = sched.rounds
    h = ctx.h
    p_h = src.p_herald
    tc = src.t_cycle_s

    sums = {
        "t": np.zeros(n_rounds + 1),
        "t2": np.zeros(n_rounds + 1),
        "f": np.zeros(n_rounds + 1),
        "f2": np.zeros(n_rounds + 1),
        "sigma": np.zeros((n_rounds + 1, h, h), dtype=complex),
        "attempts": np.zeros(n_rounds + 1),
        "successes": np.zeros(n_rounds + 1),
    }

    def record(r, t_now, sigma, recorded):
        if recorded[r]:
            return
        recorded[r] = True
        sums["t"][r] += t_now
        sums["t2"][r] += t_now * t_now
        f = ctx.fidelity(sigma)
        sums["f"][r] += f
        sums["f2"][r] += f * f
        sums["sigma"][r] += sigma

    raw = ctx.raw_data
    for _ in range(n_trials):
        recorded = [False] * (n_rounds + 1)
        t_now = float(rng.geometric(p_h)) * tc
        sigma = raw
        record(0, t_now, sigma, recorded)
        done = 0
        while done < n_rounds:
            r = done + 1
            k_wait = int(rng.geometric(p_h))
            t_now += k_wait * tc + src.t_local_s
            if sched.include_wait_decoherence:
                waited = np.zeros_like(sigma)
                for K in idle_cache.ops(k_wait):
                    waited += K @ sigma @ K.conj().T
            else:
                waited = sigma
            kept = (ctx.pump_superop @ waited.reshape(-1)).reshape(h, h)
            p = float(np.trace(kept).real)
            sums["attempts"][r] += 1
            if rng.random() < p:
                sums["successes"][r] += 1
                sigma = kept / p
                record(r, t_now, sigma, recorded)
                done = r
            else:
                t_now += float(rng.geometric(p_h)) * tc
                sigma = raw
                done = 0  # restart discards the stored pair entirely
    return sums


def run_schedule_mc(sched: PumpSchedule, samples: int, seed: int,
                    workers: int = 1) -> PumpReport:
    """Monte Carlo renewal simulation of the full restart process.

    Waits are sampled in attempt cycles, pump outcomes are Bernoulli on the
    state-dependent success probability, and failures restart from round 0.
    Per-round times are recorded at the first completion of each round.
    Results are bit-reproducible for a fixed (seed, samples): the trial
    stream is split into fixed-size chunks whose generators derive from the
    master seed by chunk counter, independent of worker scheduling.
    """
    if samples < MIN_MC_SAMPLES:
        raise DimensionError(f"mc samples {samples} < {MIN_MC_SAMPLES}")
    src = sched.source
    ctx = _PumpContext(src)
    idle_cache = _IdleCache(src, ctx.dims)

    chunks = []
    remaining = samples
    idx = 0
    while remaining > 0:
        n = min(_MC_CHUNK, remaining)
        chunks.append((idx, n, np.random.SeedSequence(entropy=seed,
                                                      spawn_key=(idx,))))
        remaining -= n
        idx += 1

    def run(args):
        _, n, seq = args
        return _mc_chunk(sched, ctx, idle_cache, n, seq)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run, chunks))
    else:
        partials = [run(c) for c in chunks]

    total = partials[0]
    for part in partials[1:]:
        for key in total:
            total[key] = total[key] + part[key]

    n = float(samples)
    results = []
    for r in range(sched.rounds + 1):
        mean_t = total["t"][r] / n
        var_t = max(total["t2"][r] / n - mean_t**2, 0.0)
        mean_f = total["f"][r] / n
        var_f = max(total["f2"][r] / n - mean_f**2, 0.0)
        stderr_f = math.sqrt(var_f / n)
        stderr_t = math.sqrt(var_t / n)
        rate_hz = 1.0 / mean_t
        stderr_rate = stderr_t / mean_t**2
        sigma = total["sigma"][r] / n
        if r == 0:
            p_round = src.p_herald
        else:
            p_round = (total["successes"][r] / total["attempts"][r]
                       if total["attempts"][r] else 0.0)
        results.append(_state_result(
            r, sigma, src.rho.space, p_round, rate_hz,
            stderr_f=stderr_f, stderr_rate=stderr_rate))
    return PumpReport(tuple(results), MONTE_CARLO, mc_samples=samples, seed=seed)
