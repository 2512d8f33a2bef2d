"""Coherence quantifiers, pseudopure states and the purity frontier.

Every quantifier takes an optional ``basis``: a matrix whose columns are the
reference basis vectors. ``None`` means the computational basis. A
non-square isometry is allowed too; the state is then compressed onto the
spanned subspace (see :func:`compress`).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import GammaOutOfRange
from .linalg import DensityOperator, as_matrix, dephase, purity, von_neumann_entropy
from .sampling import as_rng, haar_state, mix_to_purity, random_density_matrix
from .sdp import RobustnessProblem, solve_robustness, solve_robustness_batch

PURE_TOL = 1e-10


def _in_basis(rho, basis) -> np.ndarray:
    m = as_matrix(rho)
    if basis is None:
        return m
    b = as_matrix(basis)
    if b.shape[0] != m.shape[0]:
        raise ValueError(f"basis has {b.shape[0]} rows, state has dimension {m.shape[0]}")
    if np.max(np.abs(b.conj().T @ b - np.eye(b.shape[1]))) > 1e-10:
        raise ValueError("basis columns are not orthonormal")
    return b.conj().T @ m @ b


def compress(rho, basis) -> tuple[np.ndarray, float]:
    """Express ``rho`` in the (possibly partial) orthonormal ``basis``.

    Returns the renormalized compressed state and the weight of ``rho`` that
    lies in the spanned subspace. A weight below one means the basis does not
    cover the support of ``rho``.
    """
    m = _in_basis(rho, basis)
    w = float(np.trace(m).real)
    if w <= 0:
        raise ValueError("state has no weight on the given subspace")
    return 0.5 * (m + m.conj().T) / w, w


def l1_coherence(rho, basis=None) -> float:
    """Sum of the absolute off-diagonal entries of ``rho`` in ``basis``."""
    m = _in_basis(rho, basis)
    return float(np.sum(np.abs(m)) - np.sum(np.abs(np.diag(m))))


def l1_pure(amplitudes) -> float:
    """``(sum |c_x|)^2 - 1``, the robustness of a pure state."""
    c = np.abs(np.asarray(amplitudes, dtype=complex).reshape(-1))
    return float(c.sum() ** 2 - np.sum(c**2))


def _pure_vector(m: np.ndarray) -> np.ndarray | None:
    w, v = np.linalg.eigh(m)
    if abs(w[-1] - 1.0) > PURE_TOL:
        return None
    return v[:, -1]


def robustness(rho, basis=None, tol: float = 1e-9, method: str = "auto") -> float:
    """Robustness of coherence.

    ``method="sdp"`` always runs the barrier solver, ``"l1"`` requires a pure
    state and uses the closed form, ``"auto"`` picks the closed form for pure
    states and the solver otherwise.
    """
    if method not in ("auto", "sdp", "l1"):
        raise ValueError(f"unknown method {method!r}")
    m = _in_basis(rho, basis)
    if method != "sdp":
        vec = _pure_vector(m)
        if vec is not None:
            return l1_pure(vec)
        if method == "l1":
            raise ValueError("closed form needs a pure state")
    return solve_robustness(RobustnessProblem(m), tol).optimal_value


def relative_entropy_coherence(rho, basis=None) -> float:
    """``S(Delta(rho)) - S(rho)`` in bits, ``Delta`` the full dephasing."""
    m = _in_basis(rho, basis)
    return max(von_neumann_entropy(dephase(m)) - von_neumann_entropy(m), 0.0)


@dataclass(frozen=True)
class CoherenceReport:
    l1: float
    robustness: float
    relative_entropy_coherence: float
    basis_label: str = "computational"


def coherence_report(rho, basis=None, basis_label: str = "computational", tol: float = 1e-9) -> CoherenceReport:
    m = _in_basis(rho, basis)
    return CoherenceReport(
        l1=l1_coherence(m),
        robustness=max(robustness(m, tol=tol), 0.0),
        relative_entropy_coherence=relative_entropy_coherence(m),
        basis_label=basis_label,
    )


def max_coherent_density(d: int) -> np.ndarray:
    return np.full((d, d), 1.0 / d, dtype=complex)


def pseudopure(p: float, d: int) -> DensityOperator:
    """``p |psi_max><psi_max| + (1 - p) I/d``."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    if d < 1:
        raise ValueError("dimension must be positive")
    return DensityOperator(p * max_coherent_density(d) + (1 - p) * np.eye(d) / d)


@dataclass(frozen=True, eq=False)
class PurityFrontierPoint:
    gamma: float
    d: int
    lambda1: float
    lambda2: float
    optimal_state: DensityOperator
    optimal_performance: float


def theorem2_frontier(gamma: float, d: int) -> PurityFrontierPoint:
    """Best guessing performance over system states of purity ``gamma``.

    The optimum is the pseudopure state with weight ``d / (2 lambda1)`` on
    ``|psi_max>``, and its performance is ``1/d + (d - 1) / (2 lambda1)``.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    if not 1.0 / d < gamma <= 1.0:
        raise GammaOutOfRange(f"gamma must lie in (1/{d}, 1], got {gamma}")
    lam1 = d * np.sqrt(1 - 1 / d) / (2 * np.sqrt(gamma - 1 / d))
    lam2 = np.sqrt(1 - 1 / d) / np.sqrt(gamma - 1 / d) - 1
    p = min(d / (2 * lam1), 1.0)
    state = p * max_coherent_density(d) + lam2 / (2 * lam1) * np.eye(d)
    state = state / np.trace(state).real
    return PurityFrontierPoint(
        gamma=float(gamma),
        d=d,
        lambda1=float(lam1),
        lambda2=float(lam2),
        optimal_state=DensityOperator(state),
        optimal_performance=float(1 / d + (d - 1) / (2 * lam1)),
    )


def random_states_at_purity(d: int, gamma: float, count: int, rng=None) -> np.ndarray:
    """``count`` random states of purity exactly ``gamma``.

    Each draw has a uniformly random rank ``k``. It is induced-measure
    distributed for that rank, replaced by a Haar pure state when its purity
    is already below ``gamma``, and then mixed with ``I/d`` down to ``gamma``.
    """
    rng = as_rng(rng)
    out = np.empty((count, d, d), dtype=complex)
    for i in range(count):
        k = int(rng.integers(1, d + 1))
        rho = random_density_matrix(d, rng, rank=k)
        if purity(rho) < gamma:
            psi = haar_state(d, rng)
            rho = np.outer(psi, psi.conj())
        out[i] = mix_to_purity(rho, gamma)
    return out


def frontier_search(d: int, gamma: float, samples: int, rng=None, tol: float = 1e-8) -> dict:
    """Largest robustness found among random states of purity ``gamma``.

    Uses each solve's dual value, which upper-bounds the true robustness, so
    the comparison with the frontier is conservative.
    """
    point = theorem2_frontier(gamma, d)
    rhos = random_states_at_purity(d, gamma, samples, rng)
    best = -np.inf
    chunk = 500
    for lo in range(0, samples, chunk):
        sols = solve_robustness_batch(rhos[lo:lo + chunk], tol)
        best = max(best, max(s.dual_value for s in sols))
    return {
        "gamma": point.gamma,
        "lambda1": point.lambda1,
        "lambda2": point.lambda2,
        "frontier_P": point.optimal_performance,
        "best_random_P": (1 + best) / d,
        "best_random_R": best,
    }


def rotated_basis(phi, n: int, choice: str = "minus") -> np.ndarray:
    """Isometry onto a ``2**n``-dimensional subspace of register x system.

    The first column is ``|+>|phi>``. The others are ``|->|x>`` for nonzero
    ``x`` (``choice="minus"``) or the Gram-Schmidt completion of ``|+>|x>``
    (``choice="plus"``).
    """
    d = 2**n
    phi = np.asarray(phi, dtype=complex).reshape(-1)
    if phi.size != d:
        raise ValueError(f"phi must have {d} amplitudes")
    plus = np.array([1, 1]) / np.sqrt(2)
    minus = np.array([1, -1]) / np.sqrt(2)
    reg = {"minus": minus, "plus": plus}.get(choice)
    if reg is None:
        raise ValueError(f"choice must be 'minus' or 'plus', got {choice!r}")
    cols = [np.kron(plus, phi)] + [np.kron(reg, np.eye(d)[x]) for x in range(1, d)]
    b = np.stack(cols, axis=1)
    if choice == "plus":
        q, r = np.linalg.qr(b)
        if np.min(np.abs(np.diag(r))) < 1e-12:
            raise ValueError("|+>|phi> lies in the span of the other vectors")
        # keep the sign convention of the leading vectors
        b = q * np.sign(np.real(np.diag(r)))
    return b


def robustness_rotated(rho, phi, n: int, choice: str = "minus", tol: float = 1e-9) -> tuple[float, float]:
    """Robustness in a :func:`rotated_basis`; returns ``(R', captured_weight)``."""
    m, w = compress(rho, rotated_basis(phi, n, choice))
    return robustness(m, tol=tol), w
