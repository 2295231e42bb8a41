import numpy as np
import pytest

from qlinksim import states
from qlinksim.channels import loss_channel, identity_channel
from qlinksim.errors import DimensionCapError, DimensionError, ToleranceError
from qlinksim.states import (
    DensityMatrix,
    ModeSpace,
    apply,
    embed_mode,
    fock_state,
    partial_trace,
    psi_minus_state,
    tensor,
    thermal_state,
    vacuum_state,
)


def test_mode_space_invariants():
    sp = ModeSpace((3, 4), ("microwave", "optical"))
    assert sp.dim == 12
    with pytest.raises(DimensionError):
        ModeSpace((1, 2), ("microwave", "optical"))
    with pytest.raises(DimensionError):
        ModeSpace((2, 2), ("microwave",))
    with pytest.raises(DimensionError):
        ModeSpace((2,), ("flying",))
    with pytest.raises(DimensionCapError):
        ModeSpace((64, 64, 64), ("microwave",) * 3)


def test_density_matrix_rejects_non_hermitian():
    sp = ModeSpace((2,), ("qubit",))
    bad = np.array([[0.5, 1e-6], [0.0, 0.5]])
    with pytest.raises(ToleranceError):
        DensityMatrix(sp, bad)


def test_density_matrix_immutable():
    rho = vacuum_state([2])
    with pytest.raises(AttributeError):
        rho.data = np.eye(2)
    with pytest.raises(ValueError):
        rho.data[0, 0] = 2.0


def test_validate_clips_small_negative_eigenvalue():
    states.reset_psd_clip_count()
    sp = ModeSpace((2,), ("qubit",))
    data = np.diag([1.0 + 5e-10, -5e-10]).astype(complex)
    rho = DensityMatrix(sp, data).validate()
    assert np.linalg.eigvalsh(rho.data).min() >= 0
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    assert states.psd_clip_count() == 1


def test_validate_rejects_large_negative_eigenvalue():
    sp = ModeSpace((2,), ("qubit",))
    data = np.diag([1.01, -0.01]).astype(complex)
    with pytest.raises(ToleranceError):
        DensityMatrix(sp, data).validate()


def test_tensor_pure_states():
    # |0><0| (x) |1><1| -> diag(0, 1, 0, 0) on 2x2 modes
    out = tensor(fock_state([2], [0]), fock_state([2], [1]))
    assert np.allclose(out.data, np.diag([0, 1, 0, 0]))


def test_tensor_trace_multiplicative():
    half = DensityMatrix(ModeSpace((2,), ("qubit",)), np.eye(2) / 2)
    out = tensor(psi_minus_state(), half)
    assert out.trace() == pytest.approx(1.0, abs=1e-12)


def test_tensor_thermal_mean_occupancy_adds():
    # Expected value computed directly from the diagonal of each factor.
    a = thermal_state(0.1, 6)
    b = thermal_state(0.1, 6)
    expected = sum(
        float(np.dot(np.diag(s.data).real, np.arange(6))) for s in (a, b)
    )
    out = tensor(a, b)
    total = out.number_expectation(0) + out.number_expectation(1)
    assert total == pytest.approx(expected, abs=1e-12)
    assert total == pytest.approx(0.2, abs=1e-4)


def test_tensor_dimension_cap():
    a = vacuum_state([64, 64])
    b = vacuum_state([64])
    with pytest.raises(DimensionCapError):
        tensor(a, b)


def test_apply_identity_bit_exact():
    rho = thermal_state(0.2, 4)
    out = apply(rho, identity_channel(4), [0])
    assert np.array_equal(out.data, rho.data)


def test_apply_validates_targets():
    rho = vacuum_state([2, 2])
    ch = identity_channel(2)
    with pytest.raises(DimensionError):
        apply(rho, ch, [5])
    with pytest.raises(DimensionError):
        apply(rho, loss_channel(0.5, 3), [0])


def test_partial_trace_of_psi_minus_is_mixed():
    rho = psi_minus_state()
    red = partial_trace(rho, [0])
    assert np.allclose(red.data, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_keep_all_is_input():
    rho = thermal_state(0.3, 3)
    assert partial_trace(rho, [0]) is rho


def test_partial_trace_inverts_tensor():
    a = thermal_state(0.25, 3)
    b = psi_minus_state()
    joint = tensor(a, b)
    back = partial_trace(joint, [0])
    assert np.max(np.abs(back.data - a.data)) < 1e-12
    pair = partial_trace(joint, [1, 2])
    assert np.max(np.abs(pair.data - b.data)) < 1e-12


def test_partial_trace_conversion_emission_example():
    # sqrt(0.75)|1,0> + sqrt(0.25)|0,1>: tracing the flying mode leaves
    # microwave populations diag(0.25, 0.75).
    sp = ModeSpace((2, 2), ("microwave", "optical"))
    v = np.zeros(4, dtype=complex)
    v[2] = np.sqrt(0.75)  # |1,0>
    v[1] = np.sqrt(0.25)  # |0,1>
    rho = states.pure_state(sp, v)
    red = partial_trace(rho, [0])
    assert np.allclose(np.diag(red.data).real, [0.25, 0.75], atol=1e-12)


def test_embed_mode_preserves_content():
    rho = thermal_state(0.2, 3)
    big = embed_mode(rho, 0, 5)
    assert big.space.dims == (5,)
    assert np.allclose(big.data[:3, :3], rho.data)
    assert big.trace() == pytest.approx(rho.trace(), abs=1e-14)
