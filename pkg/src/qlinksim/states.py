"""Truncated-Fock density matrices over ordered mode lists.

States are immutable: every operation returns a new ``DensityMatrix``.
Mode indices always refer to positions in ``ModeSpace.dims``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionCapError, DimensionError, ToleranceError

logger = logging.getLogger(__name__)

DEFAULT_DIM_CAP = 4096

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
PSD_CLIP_TOL = 1e-9
PSD_NOISE_FLOOR = 1e-13

MODE_LABELS = ("microwave", "optical", "acoustic", "qubit")

# Counts eigenvalue clips applied by validate(); tests may reset it.
_psd_clip_count = 0


def psd_clip_count() -> int:
    return _psd_clip_count


def reset_psd_clip_count() -> None:
    global _psd_clip_count
    _psd_clip_count = 0


@dataclass(frozen=True)
class ModeSpace:
    """Ordered list of truncated bosonic/qubit modes."""

    dims: tuple[int, ...]
    labels: tuple[str, ...]
    cap: int = DEFAULT_DIM_CAP

    def __post_init__(self):
        object.__setattr__(self, "dims", tuple(int(d) for d in self.dims))
        object.__setattr__(self, "labels", tuple(self.labels))
        if len(self.labels) != len(self.dims):
            raise DimensionError(
                f"{len(self.labels)} labels for {len(self.dims)} modes"
            )
        for d in self.dims:
            if d < 2:
                raise DimensionError(f"mode dimension {d} < 2")
        for lab in self.labels:
            if lab not in MODE_LABELS:
                raise DimensionError(f"unknown mode label {lab!r}")
        if self.dim > self.cap:
            raise DimensionCapError(
                f"total dimension {self.dim} exceeds cap {self.cap}"
            )

    @property
    def dim(self) -> int:
        return math.prod(self.dims)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    def concat(self, other: "ModeSpace") -> "ModeSpace":
        return ModeSpace(
            self.dims + other.dims,
            self.labels + other.labels,
            cap=max(self.cap, other.cap),
        )

    def subspace(self, modes: Sequence[int]) -> "ModeSpace":
        return ModeSpace(
            tuple(self.dims[i] for i in modes),
            tuple(self.labels[i] for i in modes),
            cap=self.cap,
        )

    def check_modes(self, modes: Sequence[int]) -> tuple[int, ...]:
        modes = tuple(int(m) for m in modes)
        if len(set(modes)) != len(modes):
            raise DimensionError(f"repeated mode index in {modes}")
        for m in modes:
            if not 0 <= m < self.n_modes:
                raise DimensionError(f"mode index {m} out of range")
        return modes


class DensityMatrix:
    """Complex Hermitian matrix over a ``ModeSpace``.

    ``check=True`` verifies hermiticity on construction (cheap).  Positivity
    is verified/cleaned by :meth:`validate`, which is applied to surfaced
    results rather than to every pipeline intermediate.
    """

    __slots__ = ("space", "data")

    def __init__(self, space: ModeSpace, data: np.ndarray, *, check: bool = True):
        data = np.asarray(data, dtype=complex)
        if data.shape != (space.dim, space.dim):
            raise DimensionError(
                f"data shape {data.shape} does not match space dim {space.dim}"
            )
        if check:
            herm = np.max(np.abs(data - data.conj().T)) if data.size else 0.0
            if herm > HERMITICITY_TOL:
                raise ToleranceError(f"matrix not Hermitian: deviation {herm:.3e}")
        data = data.copy()
        data.setflags(write=False)
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "data", data)

    def __setattr__(self, name, value):
        raise AttributeError("DensityMatrix is immutable")

    @property
    def dim(self) -> int:
        return self.space.dim

    def trace(self) -> float:
        return float(np.trace(self.data).real)

    def is_normalized(self, tol: float = TRACE_TOL) -> bool:
        return abs(self.trace() - 1.0) <= tol

    def normalized(self) -> "DensityMatrix":
        tr = self.trace()
        if tr <= 0:
            raise ToleranceError(f"cannot normalize state with trace {tr:.3e}")
        return DensityMatrix(self.space, self.data / tr, check=False)

    def validate(self) -> "DensityMatrix":
        """Check PSD within tolerance, clipping tiny negative eigenvalues.

        Violations beyond ``PSD_CLIP_TOL`` are hard errors; smaller ones are
        zeroed and the trace is restored, incrementing a warning counter.
        """
        global _psd_clip_count
        vals, vecs = np.linalg.eigh(self.data)
        lo = float(vals.min()) if vals.size else 0.0
        if lo >= -PSD_NOISE_FLOOR:
            return self  # non-negative up to eigensolver dust
        if lo < -PSD_CLIP_TOL:
            raise ToleranceError(f"state not PSD: min eigenvalue {lo:.3e}")
        tr = float(vals.sum())
        clipped = np.clip(vals, 0.0, None)
        s = float(clipped.sum())
        if s > 0 and tr > 0:
            clipped *= tr / s
        _psd_clip_count += 1
        logger.warning("clipped negative eigenvalue %.3e from state", lo)
        data = (vecs * clipped) @ vecs.conj().T
        return DensityMatrix(self.space, data, check=False)

    def tensor_view(self) -> np.ndarray:
        dims = self.space.dims
        return self.data.reshape(dims + dims)

    def mode_populations(self, mode: int) -> np.ndarray:
        """Diagonal occupation-number distribution of one mode."""
        (mode,) = self.space.check_modes([mode])
        reduced = partial_trace(self, [mode])
        return np.diag(reduced.data).real

    def number_expectation(self, mode: int) -> float:
        pops = self.mode_populations(mode)
        return float(np.dot(pops, np.arange(len(pops))))

    def purity(self) -> float:
        return float(np.trace(self.data @ self.data).real)


# ---------------------------------------------------------------------------
# constructors


def fock_state(dims: Sequence[int], occupations: Sequence[int],
               labels: Sequence[str] | None = None) -> DensityMatrix:
    """Product Fock state |n1, n2, ...><...| over the given truncations."""
    dims = tuple(int(d) for d in dims)
    if labels is None:
        labels = ("microwave",) * len(dims)
    space = ModeSpace(dims, tuple(labels))
    if len(occupations) != len(dims):
        raise DimensionError("occupation list length mismatch")
    idx = 0
    for d, n in zip(dims, occupations):
        if not 0 <= n < d:
            raise DimensionError(f"occupation {n} not representable in dim {d}")
        idx = idx * d + n
    data = np.zeros((space.dim, space.dim), dtype=complex)
    data[idx, idx] = 1.0
    return DensityMatrix(space, data, check=False)


def vacuum_state(dims: Sequence[int], labels: Sequence[str] | None = None) -> DensityMatrix:
    return fock_state(dims, [0] * len(dims), labels)


def thermal_state(nbar: float, dim: int, label: str = "microwave") -> DensityMatrix:
    """Single-mode thermal state, truncated and renormalized."""
    if nbar < 0:
        raise DimensionError(f"mean occupancy {nbar} < 0")
    if nbar == 0:
        return vacuum_state([dim], [label])
    r = nbar / (1.0 + nbar)
    p = r ** np.arange(dim)
    p /= p.sum()
    space = ModeSpace((dim,), (label,))
    return DensityMatrix(space, np.diag(p).astype(complex), check=False)


def pure_state(space: ModeSpace, amplitudes: np.ndarray) -> DensityMatrix:
    """Density matrix of a normalized state vector."""
    v = np.asarray(amplitudes, dtype=complex).reshape(-1)
    if v.shape != (space.dim,):
        raise DimensionError("amplitude vector length mismatch")
    norm = np.linalg.norm(v)
    if norm == 0:
        raise ToleranceError("zero state vector")
    v = v / norm
    return DensityMatrix(space, np.outer(v, v.conj()), check=False)


def psi_minus_vector(d1: int = 2, d2: int = 2) -> np.ndarray:
    """Singlet (|01> - |10>)/sqrt(2) embedded in a (d1, d2) mode pair."""
    v = np.zeros(d1 * d2, dtype=complex)
    v[0 * d2 + 1] = 1.0 / math.sqrt(2.0)
    v[1 * d2 + 0] = -1.0 / math.sqrt(2.0)
    return v


def psi_minus_state(d1: int = 2, d2: int = 2,
                    labels: tuple[str, str] = ("microwave", "microwave")) -> DensityMatrix:
    space = ModeSpace((d1, d2), labels)
    return pure_state(space, psi_minus_vector(d1, d2))


# ---------------------------------------------------------------------------
# structural operations


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker composition; trace is multiplicative."""
    space = a.space.concat(b.space)
    return DensityMatrix(space, np.kron(a.data, b.data), check=False)


def _apply_operator(tens: np.ndarray, op: np.ndarray, targets: tuple[int, ...],
                    dims: tuple[int, ...], bra: bool) -> np.ndarray:
    """Contract a subsystem operator into the ket (or bra) axes of a
    2n-axis density tensor."""
    n = len(dims)
    k = len(targets)
    t_dims = tuple(dims[i] for i in targets)
    op_t = op.reshape(t_dims + t_dims)
    if bra:
        op_t = op_t.conj()
        axes = tuple(n + t for t in targets)
    else:
        axes = targets
    out = np.tensordot(op_t, tens, axes=(tuple(range(k, 2 * k)), axes))
    return np.moveaxis(out, tuple(range(k)), axes)


def apply(rho: DensityMatrix, ch, targets: Sequence[int]) -> DensityMatrix:
    """Apply a Kraus channel on the given modes: rho' = sum_K K rho K^+."""
    dims = rho.space.dims
    targets = rho.space.check_modes(targets)
    t_dims = tuple(dims[i] for i in targets)
    if tuple(ch.dims) != t_dims:
        raise DimensionError(
            f"channel dims {ch.dims} do not match target dims {t_dims}"
        )
    tens = rho.tensor_view()
    out = np.zeros_like(tens)
    for K in ch.operators:
        tmp = _apply_operator(tens, K, targets, dims, bra=False)
        out += _apply_operator(tmp, K, targets, dims, bra=True)
    return DensityMatrix(rho.space, out.reshape(rho.dim, rho.dim), check=False)


def partial_trace(rho: DensityMatrix, keep: Sequence[int]) -> DensityMatrix:
    """Reduced state over the kept modes (original order preserved)."""
    keep = rho.space.check_modes(keep)
    if not keep:
        raise DimensionError("keep must be non-empty")
    keep = tuple(sorted(keep))
    n = rho.space.n_modes
    if keep == tuple(range(n)):
        return rho
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise DimensionError("too many modes for partial trace")
    ket = list(letters[:n])
    bra = list(letters[n:2 * n])
    out = []
    for i in range(n):
        if i in keep:
            out.append((ket[i], bra[i]))
        else:
            bra[i] = ket[i]  # contract traced modes
    subscripts = "".join(ket) + "".join(bra) + "->" + \
        "".join(k for k, _ in out) + "".join(b for _, b in out)
    reduced = np.einsum(subscripts, rho.tensor_view())
    sub = rho.space.subspace(keep)
    return DensityMatrix(sub, reduced.reshape(sub.dim, sub.dim), check=False)


def embed_mode(rho: DensityMatrix, mode: int, new_dim: int) -> DensityMatrix:
    """Zero-pad one mode to a larger truncation (exact embedding)."""
    (mode,) = rho.space.check_modes([mode])
    old = rho.space.dims[mode]
    if new_dim < old:
        raise DimensionError(f"cannot shrink mode {mode} from {old} to {new_dim}")
    if new_dim == old:
        return rho
    dims = list(rho.space.dims)
    tens = rho.tensor_view()
    n = len(dims)
    pad = [(0, 0)] * (2 * n)
    pad[mode] = (0, new_dim - old)
    pad[n + mode] = (0, new_dim - old)
    tens = np.pad(tens, pad)
    dims[mode] = new_dim
    space = ModeSpace(tuple(dims), rho.space.labels, cap=rho.space.cap)
    return DensityMatrix(space, tens.reshape(space.dim, space.dim), check=False)


def measurement_outcomes(rho: DensityMatrix, modes: Sequence[int],
                         projectors: Sequence[Sequence[np.ndarray]]):
    """Joint projective measurement; yields (outcome tuple, weight, unnormalized data)."""
    modes = rho.space.check_modes(modes)
    from itertools import product as iproduct

    dims = rho.space.dims
    for outcome in iproduct(*[range(len(p)) for p in projectors]):
        tens = rho.tensor_view()
        for m, o, projs in zip(modes, outcome, projectors):
            P = projs[o]
            tens = _apply_operator(tens, P, (m,), dims, bra=False)
            tens = _apply_operator(tens, P, (m,), dims, bra=True)
        data = tens.reshape(rho.dim, rho.dim)
        weight = float(np.trace(data).real)
        yield outcome, weight, data
