import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bvprobe.coherence import l1_coherence, l1_pure, pseudopure
from bvprobe.exceptions import ExtractionFailed, InvalidState
from bvprobe.model import OracleSpec, all_strings, phase_unitary
from bvprobe.sampling import haar_state, random_density_matrix
from bvprobe.sdp import (
    DiscriminationProblem,
    RobustnessProblem,
    extract_povm,
    group_average,
    solve_discrimination,
    solve_robustness,
    solve_robustness_batch,
)

seeds = st.integers(0, 2**32 - 1)


def test_robustness_of_diagonal_state_is_zero():
    sol = solve_robustness(RobustnessProblem(np.diag([0.5, 0.3, 0.2])))
    assert abs(sol.optimal_value) < 1e-8
    assert sol.duality_gap < 1e-8


def test_robustness_max_coherent_and_pseudopure():
    psi = np.full(4, 0.5)
    assert solve_robustness(RobustnessProblem(np.outer(psi, psi))).optimal_value == pytest.approx(3, abs=1e-8)
    assert solve_robustness(RobustnessProblem(pseudopure(0.5, 4).matrix)).optimal_value == pytest.approx(1.5, abs=1e-8)


def test_robustness_certificates():
    rho = random_density_matrix(6, 11)
    sol = solve_robustness(RobustnessProblem(rho), tol=1e-10)
    x, y = sol.primal_variable, sol.dual_variable
    assert np.allclose(np.diag(x).real, 1, atol=1e-12)
    assert np.linalg.eigvalsh(x).min() > -1e-12
    assert np.linalg.eigvalsh(np.diag(y) - rho).min() > 0
    assert np.real(np.trace(rho @ x)) - 1 == pytest.approx(sol.optimal_value, abs=1e-12)
    assert y.sum() - 1 == pytest.approx(sol.dual_value, abs=1e-12)
    assert 0 <= sol.duality_gap <= 1e-10


def test_robustness_rejects_bad_input():
    with pytest.raises(InvalidState):
        RobustnessProblem(np.eye(2))
    with pytest.raises(ValueError):
        solve_robustness(RobustnessProblem(np.eye(2) / 2), tol=1e-2)


def test_batch_matches_single():
    rhos = np.stack([random_density_matrix(4, s) for s in range(5)])
    batch = solve_robustness_batch(rhos)
    for rho, b in zip(rhos, batch):
        assert b.optimal_value == pytest.approx(solve_robustness(RobustnessProblem(rho)).optimal_value, abs=1e-9)


@pytest.mark.parametrize("d", [2, 4, 8])
def test_pure_state_robustness_equals_l1(d):
    rng = np.random.default_rng(d)
    psis = [haar_state(d, rng) for _ in range(100)]
    sols = solve_robustness_batch(np.stack([np.outer(p, p.conj()) for p in psis]))
    for p, s in zip(psis, sols):
        assert s.optimal_value == pytest.approx(l1_pure(p), abs=1e-6)


@settings(max_examples=30, deadline=None)
@given(seeds, st.sampled_from([2, 3, 4, 6]))
def test_robustness_bounds(seed, d):
    rho = random_density_matrix(d, seed)
    sol = solve_robustness(RobustnessProblem(rho))
    assert -1e-9 <= sol.optimal_value <= d - 1 + 1e-9
    assert sol.optimal_value <= l1_coherence(rho) + 1e-9
    assert sol.duality_gap >= -1e-7
    assert sol.min_constraint_eigenvalue >= -1e-8


@pytest.mark.parametrize("base,n", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2)])
def test_twirl_is_identity_iff_unit_diagonal(base, n):
    d = base**n
    rng = np.random.default_rng(d)
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    x = g @ g.conj().T
    # explicit twirl over the V_k matrices built from the oracle definition
    twirl = sum(phase_unitary(OracleSpec(base, n, k)) @ x @ phase_unitary(OracleSpec(base, n, k)).conj().T for k in all_strings(base, n)) / d
    assert np.allclose(twirl, np.diag(np.diag(x)))
    assert np.allclose(group_average(x, base, n), twirl)
    s = 1 / np.sqrt(np.diag(x).real)
    unit = x * s[:, None] * s[None, :]
    assert np.allclose(group_average(unit, base, n), np.eye(d))
    assert not np.allclose(group_average(x, base, n), np.eye(d))


def test_discrimination_orthogonal_states():
    e0, e1 = np.diag([1.0, 0, 0]), np.diag([0, 1.0, 0])
    prob = DiscriminationProblem.uniform([e0, e1])
    sol = solve_discrimination(prob)
    assert sol.optimal_value == pytest.approx(1, abs=1e-8)
    povm = extract_povm(sol, prob)
    assert povm.elements[0][0, 0].real == pytest.approx(1, abs=1e-7)
    assert povm.elements[1][1, 1].real == pytest.approx(1, abs=1e-7)
    povm.validate()


def test_discrimination_identical_states():
    rho = random_density_matrix(3, 5)
    prob = DiscriminationProblem.uniform([rho] * 4)
    sol = solve_discrimination(prob)
    assert sol.optimal_value == pytest.approx(0.25, abs=1e-8)
    extract_povm(sol, prob).validate()


def test_discrimination_maximally_mixed_phase_ensemble():
    d = 4
    states = [phase_unitary(OracleSpec(2, 2, a)) @ (np.eye(d) / d) @ phase_unitary(OracleSpec(2, 2, a)).conj().T for a in all_strings(2, 2)]
    assert solve_discrimination(DiscriminationProblem.uniform(states)).optimal_value == pytest.approx(1 / d, abs=1e-8)


def test_discrimination_two_pure_states_helstrom():
    rng = np.random.default_rng(9)
    psi, phi = haar_state(3, rng), haar_state(3, rng)
    p = 0.3
    prob = DiscriminationProblem((np.outer(psi, psi.conj()), np.outer(phi, phi.conj())), [p, 1 - p])
    helstrom = 0.5 * (1 + np.sqrt(1 - 4 * p * (1 - p) * abs(np.vdot(psi, phi)) ** 2))
    sol = solve_discrimination(prob)
    assert sol.optimal_value == pytest.approx(helstrom, abs=1e-8)
    assert sol.duality_gap <= 1e-8


def test_discrimination_dual_certificate():
    rng = np.random.default_rng(3)
    states = [random_density_matrix(3, rng, rank=2) for _ in range(4)]
    prob = DiscriminationProblem.uniform(states)
    sol = solve_discrimination(prob, tol=1e-10)
    y = sol.dual_variable
    for p, s in zip(prob.priors, prob.states):
        assert np.linalg.eigvalsh(y - p * s).min() >= -1e-10
    assert np.trace(y).real == pytest.approx(sol.dual_value)
    assert 0 <= sol.duality_gap <= 1e-9


def test_robustness_povm_for_plus_state():
    # M'_a = sigma_z^a X sigma_z^a / 2 with X = 2|+><+|
    plus = np.full((2, 2), 0.5)
    sol = solve_robustness(RobustnessProblem(plus))
    assert np.allclose(sol.primal_variable, 2 * plus, atol=1e-6)
    z = np.diag([1.0, -1.0])
    m0, m1 = sol.primal_variable / 2, z @ sol.primal_variable @ z / 2
    assert np.allclose(m0 + m1, np.eye(2))


def test_extraction_failure_is_detected():
    prob = DiscriminationProblem.uniform([np.diag([1.0, 0]), np.diag([0, 1.0])])
    sol = solve_discrimination(prob)
    broken = type(sol)(**{**sol.__dict__, "primal_variable": sol.primal_variable * 0.5})
    with pytest.raises(ExtractionFailed):
        extract_povm(broken, prob)


def test_problem_validation():
    with pytest.raises(ValueError):
        DiscriminationProblem((np.eye(2) / 2, np.eye(3) / 3), [0.5, 0.5])
    with pytest.raises(ValueError):
        DiscriminationProblem((np.eye(2) / 2,), [0.9])
