import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from spinshift.fixtures import nv_tensors
from spinshift.spin import (AmbiguousLabelError, InteractionTensor, Nucleus, SpinError, SpinSystem,
                            build_full_hamiltonian, build_principal_axis_hamiltonian, build_reduced,
                            c13_hyperfine_frequency, diagonal_from_splitting, diagonalize,
                            group_equivalent_nuclei, principal_axis_forms, spin_operators,
                            transition_frequency)

SPINS = [0.5, 1, 1.5, 2, 2.5, 3, 3.5]


def nv_system(D=2870.0, Q=-4.945, A_perp=-2.70, A_zz=-2.16):
    Dt, At, Qt = nv_tensors(D, Q, A_perp, A_zz)
    return SpinSystem(1, Dt, (Nucleus(1, At, Qt, "14N"),))


def test_pauli_matrices():
    op = spin_operators(0.5)
    np.testing.assert_array_equal(op.x, 0.5 * np.array([[0, 1], [1, 0]]))
    np.testing.assert_array_equal(op.y, 0.5 * np.array([[0, -1j], [1j, 0]]))
    np.testing.assert_array_equal(op.z, 0.5 * np.array([[1, 0], [0, -1]]))


def test_spin_one_matrices():
    op = spin_operators(1)
    r = 1 / np.sqrt(2)
    np.testing.assert_allclose(op.x, r * np.array([[0, 1, 0], [1, 0, 1], [0, 1, 0]]), atol=1e-15)
    np.testing.assert_array_equal(op.m, [1, 0, -1])


@pytest.mark.parametrize("j", SPINS)
def test_commutators_and_casimir(j):
    op = spin_operators(j)
    c = lambda a, b: a @ b - b @ a
    np.testing.assert_allclose(c(op.x, op.y), 1j * op.z, atol=1e-12)
    np.testing.assert_allclose(c(op.y, op.z), 1j * op.x, atol=1e-12)
    np.testing.assert_allclose(c(op.z, op.x), 1j * op.y, atol=1e-12)
    casimir = op.x @ op.x + op.y @ op.y + op.z @ op.z
    np.testing.assert_allclose(casimir, j * (j + 1) * np.eye(op.z.shape[0]), atol=1e-12)


def test_invalid_spin():
    with pytest.raises(SpinError):
        spin_operators(0.3)
    with pytest.raises(SpinError):
        spin_operators(-1)


def test_tensor_validation():
    with pytest.raises(SpinError):
        InteractionTensor(np.diag([1.0, 1.0, 1.0]), "D")
    with pytest.raises(SpinError):
        InteractionTensor(np.array([[0, 1, 0], [0, 0, 0], [0, 0, 0.0]]), "Q")
    InteractionTensor(np.array([[1, 2, 0], [0, 1, 0], [0, 0, 3.0]]), "A")


def test_zero_field_splitting_gaps():
    D = 2870.0
    Dt = InteractionTensor(np.diag([-D / 3, -D / 3, 2 * D / 3]), "D")
    E = np.linalg.eigvalsh(build_full_hamiltonian(SpinSystem(1, Dt)))
    np.testing.assert_allclose(E, [-2 * D / 3, D / 3, D / 3], rtol=1e-14)


def test_rhombic_splitting():
    D, eps = 2870.0, 0.01
    Dt = InteractionTensor(np.diag(diagonal_from_splitting(D, eps)), "D")
    E = np.sort(np.linalg.eigvalsh(build_full_hamiltonian(SpinSystem(1, Dt))))
    # the upper doublet splits by |Dxx - Dyy| = eps * Dzz = 2 D eps / 3
    assert E[2] - E[1] == pytest.approx(2 * D * eps / 3, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(Q=st.floats(-10, 10), Azz=st.floats(-5, 5))
def test_reduced_matches_full_diagonal(Q, Azz):
    D = 2870.0
    sys = SpinSystem(1, InteractionTensor(np.diag([-D / 3, -D / 3, 2 * D / 3]), "D"),
                     (Nucleus(1, InteractionTensor(np.diag([0, 0, Azz]), "A"),
                              InteractionTensor(np.diag([-Q / 3, -Q / 3, 2 * Q / 3]), "Q")),))
    lv = diagonalize(build_full_hamiltonian(sys), sys)
    red = build_reduced(D, Q, Azz)
    diffs = [lv.energies[k] - red[tuple(int(v) for v in lab)] for k, lab in enumerate(lv.labels)]
    assert np.ptp(diffs) <= 1e-10


def test_trace_identity():
    sys = nv_system()
    H = build_full_hamiltonian(sys)
    # Traceless D and Q give tr H = 0; the A term is traceless in the spin space too.
    assert abs(np.trace(H)) < 1e-9
    assert np.sum(np.linalg.eigvalsh(H)) == pytest.approx(np.trace(H).real, abs=1e-9)


def test_full_hamiltonian_exactly_hermitian(rng):
    M = rng.normal(size=(3, 3))
    A = InteractionTensor(M, "A")
    Dm = rng.normal(size=(3, 3)); Dm = Dm + Dm.T; Dm -= np.trace(Dm) / 3 * np.eye(3)
    sys = SpinSystem(1.5, InteractionTensor(Dm, "D"), (Nucleus(0.5, A), Nucleus(1, A)))
    H = build_full_hamiltonian(sys)
    assert H.shape == (24, 24)
    assert np.array_equal(H, H.conj().T)


def test_dimension_limit():
    Dt, At, _ = nv_tensors()
    sys = SpinSystem(1, Dt, tuple(Nucleus(0.5, At) for _ in range(6)))
    with pytest.raises(SpinError):
        build_full_hamiltonian(sys, max_dim=64)


def test_principal_axis_forms_round_trip(rng):
    D, eps = 2870.0, 0.02
    diag = diagonal_from_splitting(D, eps)
    R = Rotation.from_rotvec([0.1, -0.05, 0.02]).as_matrix()
    form = principal_axis_forms(R @ np.diag(diag) @ R.T, axis=R[:, 2])
    assert form.D == pytest.approx(D, rel=1e-12)
    assert form.epsilon == pytest.approx(eps, rel=1e-9)
    assert abs(form.D_axes[:, 2] @ R[:, 2]) == pytest.approx(1.0, abs=1e-12)
    assert np.linalg.det(form.D_axes) == pytest.approx(1.0, abs=1e-12)


def test_principal_axis_hamiltonian_equals_full():
    D, eps, Q, eta = 2870.0, 0.03, -4.945, 0.1
    A_diag = (-2.7, -2.6, -2.16)
    Dt = InteractionTensor(np.diag(diagonal_from_splitting(D, eps)), "D")
    Qt = InteractionTensor(np.diag(diagonal_from_splitting(Q, eta)), "Q")
    sys = SpinSystem(1, Dt, (Nucleus(1, InteractionTensor(np.diag(A_diag), "A"), Qt),))
    H_full = build_full_hamiltonian(sys)
    H_pas = build_principal_axis_hamiltonian(1, 1, D, eps, Q, eta, A_diag)
    np.testing.assert_allclose(H_pas, H_full, atol=1e-10)


def test_transition_frequencies_nv():
    sys = nv_system(A_perp=0.0)
    lv = diagonalize(build_full_hamiltonian(sys), sys)
    D, Q, Azz = 2870.0, -4.945, -2.16
    # |0, mI> -> |-1, mI>: D - Azz mI
    for mI in (1, 0, -1):
        f = transition_frequency(lv, (0, mI), (-1, mI))
        assert f == pytest.approx(D - Azz * mI, abs=1e-9)


def test_transition_with_perpendicular_hyperfine_frozen():
    # Second-order shift from A_perp: independent perturbative estimate is a few kHz.
    sys = nv_system()
    lv = diagonalize(build_full_hamiltonian(sys), sys)
    f = transition_frequency(lv, (0, 0), (-1, 0))
    assert abs(f - 2870.0) < 0.02
    assert f != 2870.0


def test_ambiguous_label():
    # Full mixing of |+1> and |-1> by a rhombic term at zero axial splitting.
    Dt = InteractionTensor(np.diag([1.0, -1.0, 0.0]), "D")
    sys = SpinSystem(1, Dt)
    lv = diagonalize(build_full_hamiltonian(sys), sys)
    with pytest.raises(AmbiguousLabelError):
        lv.level_of((1,))


def test_reduced_warning():
    Dt, At, Qt = nv_tensors()
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        build_reduced(2870.0, -4.945, -2.16, warn_tensors=(Dt.matrix, At.matrix, Qt.matrix))
    with pytest.warns(UserWarning):
        build_reduced(100.0, -4.945, -2.16, warn_tensors=(Dt.matrix / 28.7, At.matrix, Qt.matrix))


def test_c13_frequency_value():
    A = np.diag([120.0, 120.0, 129.0])
    assert c13_hyperfine_frequency(A) == pytest.approx(129.0, rel=1e-15)
    A2 = np.array([[120.0, 0, 0], [0, 120.0, 0], [0, 129 * 0.6, 129 * 0.8]])
    assert c13_hyperfine_frequency(A2) == pytest.approx(129.0, rel=1e-14)


def test_c13_rotation_invariance(rng):
    A = np.array([[120.0, 3.0, 0], [3.0, 121.0, 0], [0, 129 * 0.6, 129 * 0.8]])
    z = np.array([0.0, 0.0, 1.0])
    for R in Rotation.random(100, random_state=1).as_matrix():
        f = c13_hyperfine_frequency(R @ A @ R.T, R @ z)
        assert f == pytest.approx(129.0, rel=1e-10)


def test_c13_axis_must_be_unit():
    with pytest.raises(SpinError):
        c13_hyperfine_frequency(np.eye(3), (0, 0, 2))


def test_grouping():
    groups = group_equivalent_nuclei([("a", 129.000), ("b", 12.8), ("c", 129.0001)], tol=1e-3)
    assert [sorted(s for s, _ in g) for g in groups] == [["a", "c"], ["b"]]


@settings(max_examples=30, deadline=None)
@given(st.permutations([("a", 129.0), ("b", 129.5), ("c", 13.7), ("d", 13.7001), ("e", 2.0)]))
def test_grouping_order_independent(items):
    groups = group_equivalent_nuclei(items, tol=1e-3)
    assert [sorted(s for s, _ in g) for g in groups] == [["b"], ["a"], ["c", "d"], ["e"]]
