import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bvprobe.exceptions import BadIndex, InvalidState, NotHermitian
from bvprobe.linalg import (
    DensityOperator,
    PureState,
    basis_state,
    binary_entropy,
    eig_hermitian,
    fidelity,
    maximally_mixed,
    partial_trace,
    purity,
    relative_entropy,
    sqrtm_psd,
    tensor,
    tensor_all,
    trace_distance,
    von_neumann_entropy,
)
from bvprobe.sampling import haar_state, haar_unitary, mix_to_purity, random_density_matrix

seeds = st.integers(0, 2**32 - 1)


def test_pure_state_rejects_unnormalized():
    with pytest.raises(InvalidState):
        PureState([1, 1])
    psi = PureState.from_unnormalized([1, 1])
    assert np.allclose(psi.amplitudes, [2**-0.5, 2**-0.5])


def test_density_operator_validation():
    with pytest.raises(InvalidState):
        DensityOperator([[1, 0], [0, 1]])
    with pytest.raises(InvalidState):
        DensityOperator([[1.5, 0], [0, -0.5]])
    with pytest.raises(InvalidState):
        DensityOperator([[0.5, 0.3], [0.1, 0.5]])
    rho = DensityOperator(np.eye(4) / 4, (2, 2))
    assert rho.dims == (2, 2)
    with pytest.raises(ValueError):
        rho.matrix[0, 0] = 1


def test_tensor_orders_factors_left_to_right():
    zero, one = basis_state(0, (2,)), basis_state(1, (2,))
    v = tensor(one, zero)
    # |10> sits at index 2 in big-endian order
    assert np.argmax(np.abs(v.amplitudes)) == 2
    assert v.dims == (2, 2)
    w = tensor_all([zero, one, one])
    assert np.argmax(np.abs(w.amplitudes)) == 3
    with pytest.raises(TypeError):
        tensor(zero, zero.density())


def test_eig_hermitian_descending_and_reconstructs():
    rng = np.random.default_rng(1)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    h = a + a.conj().T
    w, v = eig_hermitian(h)
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(v @ np.diag(w) @ v.conj().T, h)
    with pytest.raises(NotHermitian):
        eig_hermitian(a)


def test_partial_trace_of_product():
    rng = np.random.default_rng(2)
    a = random_density_matrix(2, rng)
    b = random_density_matrix(3, rng)
    c = random_density_matrix(2, rng)
    abc = np.kron(np.kron(a, b), c)
    assert np.allclose(partial_trace(abc, [1], (2, 3, 2)), b)
    assert np.allclose(partial_trace(abc, [0, 2], (2, 3, 2)), np.kron(a, c))
    assert np.allclose(partial_trace(abc, [2, 0], (2, 3, 2)), np.kron(a, c))
    rho = DensityOperator(abc, (2, 3, 2))
    red = partial_trace(rho, [0])
    assert isinstance(red, DensityOperator) and red.dims == (2,)
    with pytest.raises(BadIndex):
        partial_trace(rho, [3])


def test_partial_trace_bell_is_mixed():
    bell = PureState.from_unnormalized([1, 0, 0, 1], (2, 2))
    assert np.allclose(partial_trace(bell.density(), [0]).matrix, np.eye(2) / 2)


def test_entropies():
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(basis_state(0, (3,)).density()) == pytest.approx(0.0, abs=1e-12)
    assert binary_entropy(0.5) == pytest.approx(1.0)
    assert binary_entropy(0.0) == 0.0
    # S(rho || I/d) = log2 d - S(rho)
    rho = random_density_matrix(4, 3)
    assert relative_entropy(rho, np.eye(4) / 4) == pytest.approx(2 - von_neumann_entropy(rho), abs=1e-10)
    assert relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == float("inf")


def test_fidelity_and_trace_distance_pure():
    rng = np.random.default_rng(4)
    psi, phi = haar_state(3, rng), haar_state(3, rng)
    p, q = np.outer(psi, psi.conj()), np.outer(phi, phi.conj())
    ov = abs(np.vdot(psi, phi)) ** 2
    assert fidelity(p, q) == pytest.approx(ov, abs=1e-8)
    assert trace_distance(p, q) == pytest.approx(np.sqrt(1 - ov), abs=1e-10)


def test_sqrtm_psd_squares_back():
    rho = random_density_matrix(5, 7)
    s = sqrtm_psd(rho)
    assert np.allclose(s @ s, rho)


def test_maximally_mixed_purity():
    assert purity(maximally_mixed(8)) == pytest.approx(1 / 8)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 6))
def test_haar_unitary_is_unitary(seed, d):
    u = haar_unitary(d, seed)
    assert np.allclose(u @ u.conj().T, np.eye(d), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(seeds, st.integers(2, 8), st.floats(0.0, 1.0))
def test_mix_to_purity_hits_target(seed, d, frac):
    psi = haar_state(d, seed)
    gamma = 1 / d + frac * (1 - 1 / d)
    rho = mix_to_purity(np.outer(psi, psi.conj()), gamma)
    assert purity(rho) == pytest.approx(gamma, abs=1e-10)
    DensityOperator(rho)


@settings(max_examples=40, deadline=None)
@given(seeds)
def test_partial_trace_preserves_trace_and_positivity(seed):
    rho = random_density_matrix(12, seed)
    for keep in ([0], [1], [0, 1], [2], [1, 2]):
        red = partial_trace(rho, keep, (2, 3, 2))
        assert np.trace(red).real == pytest.approx(1.0)
        assert np.linalg.eigvalsh(red).min() > -1e-12
