import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from kraus_forge.errors import NonHermitianInput, OverflowDetected
from kraus_forge.linalg import (
    SIGMA_I,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    hermitian_basis,
    hermitian_eig,
    matrix_exp,
)


def random_hermitian(rng, n=4):
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (m + m.conj().T) / 2


def test_basis_orthonormality():
    g = hermitian_basis()
    for k in range(4):
        for l in range(4):
            overlap = np.trace(g[k] @ g[l]).real
            assert abs(overlap - (1.0 if k == l else 0.0)) < 1e-14


def test_basis_elements_hermitian_and_ordered():
    g = hermitian_basis()
    for el in g:
        assert np.abs(el - el.conj().T).max() < 1e-15
    assert np.allclose(g[0] * np.sqrt(2), SIGMA_I)
    assert np.allclose(g[1] * np.sqrt(2), SIGMA_X)
    assert np.allclose(g[2] * np.sqrt(2), SIGMA_Y)
    assert np.allclose(g[3] * np.sqrt(2), SIGMA_Z)


def test_eig_diagonal_input():
    values, vectors = hermitian_eig(np.diag([2.0, 0.0, 0.0, 0.0]).astype(complex))
    assert np.allclose(values, [2.0, 0.0, 0.0, 0.0])
    assert np.abs(vectors - np.eye(4)).max() == 0.0


def test_eig_dephasing_choi_diagonal():
    # diag(1 + e^(-2rt), 0, 0, 1 - e^(-2rt)) at r*t = 0.3
    decay = np.exp(-0.6)
    values, _ = hermitian_eig(np.diag([1 + decay, 0.0, 0.0, 1 - decay]).astype(complex))
    assert np.abs(values - np.array([1 + decay, 1 - decay, 0.0, 0.0])).max() < 1e-14


def test_eig_damping_choi_spectrum():
    # Choi matrix of the damping channel at theta=1, omega=-1, tau=1; the
    # expected spectrum comes from its closed-form expressions evaluated here.
    from kraus_forge.gad import GadScaled, gad_F_closed
    from kraus_forge.kraus import choi_from_propagator

    omega, tau = -1.0, 1.0
    choi = choi_from_propagator(gad_F_closed(GadScaled(1.0, omega, tau)))
    e2 = np.exp(-2 * tau)
    root = np.sqrt(16 * e2 + omega**2 * (1 - e2) ** 2)
    expected = np.sort(
        [
            0.25 * (1 - e2) * (2 - omega),
            0.25 * (1 - e2) * (2 + omega),
            0.25 * (2 * e2 + 2 - root),
            0.25 * (2 * e2 + 2 + root),
        ]
    )[::-1]
    values, _ = hermitian_eig(choi)
    assert np.abs(values - expected).max() < 1e-10


def test_eig_reconstruction_and_orthonormality():
    rng = np.random.default_rng(7)
    for _ in range(100):
        m = random_hermitian(rng)
        values, vectors = hermitian_eig(m)
        assert np.abs(vectors @ np.diag(values) @ vectors.conj().T - m).max() < 1e-10
        assert np.abs(m @ vectors - vectors * values).max() < 1e-10
        assert np.abs(vectors.conj().T @ vectors - np.eye(4)).max() < 1e-12
        assert np.abs(values - np.sort(np.linalg.eigvalsh(m))[::-1]).max() < 1e-12


def test_eig_descending_order_and_phase_convention():
    rng = np.random.default_rng(11)
    m = random_hermitian(rng)
    values, vectors = hermitian_eig(m)
    assert np.all(np.diff(values) <= 0)
    for i in range(4):
        pivot = vectors[int(np.argmax(np.abs(vectors[:, i]))), i]
        assert pivot.real > 0
        assert abs(pivot.imag) < 1e-13


def test_eig_rejects_nonhermitian():
    with pytest.raises(NonHermitianInput):
        hermitian_eig(np.array([[0, 1], [0, 0]], dtype=complex))


def test_matrix_exp_zero_is_exact_identity():
    result = matrix_exp(np.zeros((4, 4)))
    assert result.tolist() == np.eye(4).tolist()
    result = matrix_exp(np.ones((4, 4)), 0.0)
    assert result.tolist() == np.eye(4).tolist()


def test_matrix_exp_diagonal_generator():
    result = matrix_exp(np.diag([0.0, -2.0, -2.0, 0.0]), np.log(2) / 2)
    assert np.abs(result - np.diag([1.0, 0.5, 0.5, 1.0])).max() < 1e-14


def test_matrix_exp_matches_closed_form_propagator():
    # generator at x=1, y=3, z=1 propagated to t=0.5; expected entries from
    # the damped-rotation closed form at theta=1, omega=-1, tau=1
    x, y, z = 1.0, 3.0, 1.0
    gen = np.array(
        [
            [0, 0, 0, 0],
            [0, -(y + z) / 2, -2 * x, 0],
            [0, 2 * x, -(y + z) / 2, 0],
            [z - y, 0, 0, -(y + z)],
        ],
        dtype=float,
    )
    tau = 1.0
    decay = np.exp(-tau)
    expected = np.array(
        [
            [1, 0, 0, 0],
            [0, decay * np.cos(tau), -decay * np.sin(tau), 0],
            [0, decay * np.sin(tau), decay * np.cos(tau), 0],
            [-decay * np.sinh(tau), 0, 0, np.exp(-2 * tau)],
        ]
    )
    assert np.abs(matrix_exp(gen, 0.5) - expected).max() < 1e-10


def test_matrix_exp_against_scipy():
    rng = np.random.default_rng(3)
    for scale in (0.1, 1.0, 10.0, 50.0):
        m = rng.normal(size=(4, 4))
        m *= scale / np.abs(m).sum(axis=0).max()
        reference = scipy.linalg.expm(m)
        assert np.abs(matrix_exp(m) - reference).max() < 1e-10 * max(
            1.0, np.abs(reference).max()
        )


@settings(max_examples=50, deadline=None)
@given(
    s1=st.floats(min_value=0.0, max_value=5.0),
    s2=st.floats(min_value=0.0, max_value=5.0),
)
def test_matrix_exp_semigroup(s1, s2):
    gen = np.array(
        [[0, 0, 0, 0], [0, -1, -1, 0], [0, 1, -1, 0], [-1, 0, 0, -2]], dtype=float
    )
    combined = matrix_exp(gen, s1 + s2)
    split = matrix_exp(gen, s1) @ matrix_exp(gen, s2)
    assert np.abs(combined - split).max() < 1e-10


def test_matrix_exp_preserves_trace_row():
    # any generator with a vanishing first row exponentiates to a propagator
    # with first row (1, 0, 0, 0)
    rng = np.random.default_rng(5)
    for _ in range(20):
        gen = rng.normal(size=(4, 4))
        gen[0] = 0.0
        prop = matrix_exp(gen, 0.7)
        assert np.abs(prop[0] - np.array([1.0, 0, 0, 0])).max() < 1e-12


def test_matrix_exp_overflow_detection():
    with pytest.raises(OverflowDetected):
        matrix_exp(np.full((4, 4), 1e308), 10.0)
    with pytest.raises(OverflowDetected):
        matrix_exp(np.diag([1e9, 1e9, 1e9, 1e9]), 1.0)
