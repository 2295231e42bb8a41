import math

import numpy as np
import pytest

from qlinksim.channels import dephasing
from qlinksim.errors import DimensionError
from qlinksim.metrics import fidelity_psi_minus
from qlinksim.register import (
    MemoryParams,
    idle,
    idle_kraus,
    measure_z_pair,
    noisy_cnot,
)
from qlinksim.states import (
    DensityMatrix,
    ModeSpace,
    apply,
    fock_state,
    psi_minus_state,
    psi_minus_vector,
    pure_state,
)

MEM = MemoryParams(T1_s=1e-3, T_phi_s=math.inf, F_op=0.99)


def test_memory_params_validation():
    with pytest.raises(DimensionError):
        MemoryParams(kind="spin")
    with pytest.raises(DimensionError):
        MemoryParams(T1_s=0.0)
    with pytest.raises(DimensionError):
        MemoryParams(F_op=0.2)


def test_idle_zero_duration_is_identity():
    rho = psi_minus_state()
    out = idle(rho, 0.0, MEM, [0, 1])
    assert np.max(np.abs(out.data - rho.data)) < 1e-15


def test_idle_t1_definition():
    rho = fock_state([2], [1])
    out = idle(rho, MEM.T1_s, MEM, [0])
    assert out.data[1, 1].real == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_idle_singlet_brute_force():
    # Oracle: explicit 4x4 Kraus application of AD(gamma) on both qubits,
    # gamma = 1 - exp(-0.1).
    t = 0.1 * MEM.T1_s
    gamma = 1 - math.exp(-t / MEM.T1_s)
    K0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    v = psi_minus_vector()
    expected = np.zeros((4, 4), dtype=complex)
    for KA in (K0, K1):
        for KB in (K0, K1):
            K = np.kron(KA, KB)
            expected += K @ np.outer(v, v.conj()) @ K.conj().T
    f_oracle = float((v.conj() @ expected @ v).real)

    out = idle(psi_minus_state(), t, MEM, [0, 1])
    assert fidelity_psi_minus(out) == pytest.approx(f_oracle, abs=1e-12)


def test_idle_semigroup_property():
    mem = MemoryParams(T1_s=2e-3, T_phi_s=5e-3)
    for dim in (2, 3):
        s1 = idle_kraus(1e-4, mem, dim).compose(idle_kraus(3e-4, mem, dim))
        s2 = idle_kraus(4e-4, mem, dim)
        assert np.max(np.abs(s1.superoperator() - s2.superoperator())) < 1e-12


def test_idle_dephasing_only():
    mem = MemoryParams(T1_s=math.inf, T_phi_s=1e-3)
    plus = pure_state(ModeSpace((2,), ("qubit",)), np.ones(2) / math.sqrt(2))
    out = idle(plus, 1e-3, mem, [0])
    assert out.data[0, 1].real == pytest.approx(0.5 * math.exp(-1.0), abs=1e-12)
    assert out.data[0, 0].real == pytest.approx(0.5, abs=1e-12)


def test_noisy_cnot_ideal_action():
    mem = MemoryParams(F_op=1.0)
    rho = fock_state([2, 2], [1, 0])
    out = noisy_cnot(rho, 0, 1, mem)
    assert out.data[3, 3].real == pytest.approx(1.0, abs=1e-14)

    plus = np.array([1, 0, 1, 0], dtype=complex) / math.sqrt(2)  # |+>|0>
    rho = pure_state(ModeSpace((2, 2), ("qubit", "qubit")), plus)
    out = noisy_cnot(rho, 0, 1, mem)
    bell = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)  # Phi+
    assert float((bell.conj() @ out.data @ bell).real) == pytest.approx(1.0, abs=1e-14)


def test_noisy_cnot_is_involution_when_ideal():
    mem = MemoryParams(F_op=1.0)
    rng = np.random.default_rng(11)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    data = A @ A.conj().T
    data /= np.trace(data).real
    rho = DensityMatrix(ModeSpace((2, 2), ("qubit", "qubit")), data)
    out = noisy_cnot(noisy_cnot(rho, 0, 1, mem), 0, 1, mem)
    assert np.max(np.abs(out.data - rho.data)) < 1e-12


def test_noisy_cnot_matches_direct_mixture():
    # Oracle: D(rho) = (1-p) U rho U+ + p * I/4 (x) tr_pair on qubit dims,
    # with p = 4(1 - F_op)/3.
    f_op = 0.99
    p = 4 * (1 - f_op) / 3
    mem = MemoryParams(F_op=f_op)
    rng = np.random.default_rng(5)
    A = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    data = A @ A.conj().T
    data /= np.trace(data).real
    U = np.eye(4)[[0, 1, 3, 2]].astype(complex)
    expected = (1 - p) * (U @ data @ U.conj().T) + p * np.eye(4) / 4

    rho = DensityMatrix(ModeSpace((2, 2), ("qubit", "qubit")), data)
    out = noisy_cnot(rho, 0, 1, mem)
    assert np.max(np.abs(out.data - expected)) < 1e-12


def test_noisy_cnot_rejects_overlap():
    rho = psi_minus_state()
    with pytest.raises(DimensionError):
        noisy_cnot(rho, 1, 1, MEM)


def test_measure_z_pair_fock():
    rho = fock_state([2, 2], [1, 1])
    res = measure_z_pair(rho, 0, 1)
    assert res[(1, 1)][0] == pytest.approx(1.0, abs=1e-12)
    assert res[(0, 0)][0] == 0.0 and res[(0, 0)][1] is None


def test_measure_z_pair_plus_plus_uniform():
    plus = np.ones(4, dtype=complex) / 2
    rho = pure_state(ModeSpace((2, 2), ("qubit", "qubit")), plus)
    res = measure_z_pair(rho, 0, 1)
    total = 0.0
    for outcome, (prob, post) in res.items():
        assert prob == pytest.approx(0.25, abs=1e-12)
        assert post.is_normalized()
        total += prob
    assert total == pytest.approx(1.0, abs=1e-9)


def test_measure_z_pair_matches_diagonal():
    # Amplitude-damped Bell input: outcome distribution equals the diagonal
    # of the oracle-computed matrix.
    gamma = 0.25
    K0 = np.array([[1, 0], [0, math.sqrt(1 - gamma)]], dtype=complex)
    K1 = np.array([[0, math.sqrt(gamma)], [0, 0]], dtype=complex)
    v = psi_minus_vector()
    damped = np.zeros((4, 4), dtype=complex)
    for KA in (K0, K1):
        for KB in (K0, K1):
            K = np.kron(KA, KB)
            damped += K @ np.outer(v, v.conj()) @ K.conj().T

    rho = DensityMatrix(ModeSpace((2, 2), ("qubit", "qubit")), damped)
    res = measure_z_pair(rho, 0, 1)
    diag = np.diag(damped).real
    for (b1, b2), (prob, _) in res.items():
        assert prob == pytest.approx(diag[b1 * 2 + b2], abs=1e-12)


def test_measure_bins_high_levels_as_one():
    rho = fock_state([3, 2], [2, 0])
    res = measure_z_pair(rho, 0, 1)
    assert res[(1, 0)][0] == pytest.approx(1.0, abs=1e-12)


def test_measure_invariant_under_prior_dephasing():
    plus = np.ones(4, dtype=complex) / 2
    rho = pure_state(ModeSpace((2, 2), ("qubit", "qubit")), plus)
    deph = apply(apply(rho, dephasing(0.3), [0]), dephasing(0.2), [1])
    res_a = measure_z_pair(rho, 0, 1)
    res_b = measure_z_pair(deph, 0, 1)
    for outcome in res_a:
        assert res_a[outcome][0] == pytest.approx(res_b[outcome][0], abs=1e-12)
