"""Barrier-method solvers for the two semidefinite programs used here.

Robustness of coherence (dual form, ``d`` real variables)::

    R(rho) = min  sum_i y_i - 1    s.t.  diag(y) - rho >= 0

whose conjugate is ``max tr(rho X) - 1`` over ``X >= 0`` with unit diagonal.

Minimum-error discrimination (dual form, one Hermitian variable)::

    P_guess = min tr(Y)    s.t.  Y - p_a rho_a >= 0  for every a

whose conjugate is the POVM maximization ``max sum_a p_a tr(rho_a M_a)``.

Both are solved with a log-det barrier, Newton centering with backtracking and the
schedule ``mu <- mu / 10`` from ``mu = 1``. Primal points are read off the
central path (``X = S^{-1} / t`` resp. ``M_a = S_a^{-1} / t``) and then
projected onto exact feasibility, so every reported value is attained by a
feasible primal point and bounded above by a feasible dual point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
import scipy.linalg

from .exceptions import ExtractionFailed, InvalidState, NotConverged
from .linalg import as_matrix
from .povm import Povm

MAX_NEWTON = 500
MU_FACTOR = 10.0
CENTERING_TOL = 1e-8
STALL_DECREMENT = 1e-3
TOL_RANGE = (1e-10, 1e-4)
RANGE_CUTOFF = 1e-12


def _check_tol(tol: float) -> float:
    lo, hi = TOL_RANGE
    if not lo <= tol <= hi:
        raise ValueError(f"tol must lie in [{lo}, {hi}], got {tol}")
    return float(tol)


def _check_density(rho, name="rho") -> np.ndarray:
    m = as_matrix(rho)
    if m.shape[0] != m.shape[1]:
        raise InvalidState(f"{name} must be square")
    if np.max(np.abs(m - m.conj().T)) > 1e-10:
        raise InvalidState(f"{name} is not Hermitian")
    if abs(np.trace(m).real - 1) > 1e-10:
        raise InvalidState(f"{name} does not have unit trace")
    return 0.5 * (m + m.conj().T)


@dataclass(frozen=True, eq=False)
class RobustnessProblem:
    rho: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rho", _check_density(self.rho))


@dataclass(frozen=True, eq=False)
class DiscriminationProblem:
    states: tuple[np.ndarray, ...]
    priors: np.ndarray

    def __post_init__(self):
        states = tuple(_check_density(s, "state") for s in self.states)
        if not states:
            raise ValueError("need at least one state")
        if len({s.shape for s in states}) != 1:
            raise ValueError("all states must share one dimension")
        priors = np.asarray(self.priors, dtype=float).reshape(-1)
        if priors.size != len(states):
            raise ValueError("one prior per state required")
        if np.any(priors < 0) or abs(priors.sum() - 1) > 1e-12:
            raise ValueError("priors must be non-negative and sum to 1")
        if len(states) * states[0].shape[0] ** 2 > 10**6:
            raise ValueError("problem too large for the dense solver")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "priors", priors)

    @classmethod
    def uniform(cls, states: Sequence[np.ndarray]) -> "DiscriminationProblem":
        return cls(tuple(states), np.full(len(states), 1.0 / len(states)))


@dataclass(frozen=True, eq=False)
class SdpSolution:
    """Result of one barrier solve.

    ``optimal_value`` is the primal value, attained by ``primal_variable``
    (the unit-diagonal witness ``X`` for robustness, the stacked POVM
    elements for discrimination). ``dual_value`` comes from the strictly
    feasible ``dual_variable``; ``duality_gap = dual_value - optimal_value``.
    """

    kind: str
    optimal_value: float
    dual_value: float
    primal_variable: np.ndarray
    dual_variable: np.ndarray
    duality_gap: float
    min_constraint_eigenvalue: float
    primal_residual: float
    iterations: int
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# robustness of coherence


def _robustness_objective(y: np.ndarray, rhos: np.ndarray, t: float) -> np.ndarray:
    """Barrier objective ``t sum(y) - log det(diag(y) - rho)``; ``inf`` outside the domain."""
    s = -rhos
    idx = np.arange(rhos.shape[1])
    s[:, idx, idx] += y
    w = np.linalg.eigvalsh(s)
    out = np.full(len(y), np.inf)
    pd = w[:, 0] > 0
    out[pd] = t * y[pd].sum(axis=1) - np.log(w[pd]).sum(axis=1)
    return out


def _robustness_core(rhos: np.ndarray, tol: float, max_newton: int = MAX_NEWTON):
    """Solve the diagonal dual for a stack of states in lockstep."""
    B, d, _ = rhos.shape
    idx = np.arange(d)
    diag = np.real(rhos[:, idx, idx])
    lam_max = np.linalg.eigvalsh(rhos)[:, -1]
    # Weyl: diag(rho) - rho >= -lam_max, so this start is strictly feasible
    y = diag + lam_max[:, None] + 0.1
    iters = np.zeros(B, dtype=int)
    t = 1.0

    def slack(yy, sel=slice(None)):
        s = -rhos[sel]
        s[:, idx, idx] += yy
        return s

    while True:
        active = np.ones(B, dtype=bool)
        prev = np.full(B, np.inf)
        while active.any():
            s = slack(y[active], active)
            sinv = np.linalg.inv(s)
            sinv = 0.5 * (sinv + sinv.conj().transpose(0, 2, 1))
            g = t - np.real(sinv[:, idx, idx])
            h = np.abs(sinv) ** 2
            dy = -np.linalg.solve(h, g[..., None])[..., 0]
            lam2 = np.maximum(-np.sum(g * dy, axis=1), 0.0)
            y_act = y[active]
            f0 = _robustness_objective(y_act, rhos[active], t)
            step = np.ones(len(y_act))
            ynew = y_act + dy
            # full steps inside the quadratic region, Armijo backtracking outside it
            for _ in range(60):
                f1 = _robustness_objective(ynew, rhos[active], t)
                ok = np.isfinite(f1) & ((lam2 <= 0.0625) | (f1 <= f0 - 0.25 * step * lam2))
                if ok.all():
                    break
                step[~ok] *= 0.5
                ynew[~ok] = y_act[~ok] + step[~ok, None] * dy[~ok]
            else:
                ynew[~ok] = y_act[~ok]
            y[active] = ynew
            where = np.flatnonzero(active)
            iters[where] += 1
            if iters.max() > max_newton:
                raise NotConverged(int(iters.max()), d / t)
            stalled = (lam2 < STALL_DECREMENT) & (lam2 > 0.5 * prev[where])
            prev[where] = lam2
            active[where[(lam2 <= CENTERING_TOL) | stalled]] = False
        if d / t < tol:
            break
        t *= MU_FACTOR

    s = slack(y)
    x = np.linalg.inv(s) / t
    x = 0.5 * (x + x.conj().transpose(0, 2, 1))
    scale = 1.0 / np.sqrt(np.real(x[:, idx, idx]))
    x = x * scale[:, :, None] * scale[:, None, :]
    primal = np.real(np.einsum("bij,bji->b", rhos, x)) - 1.0
    dual = y.sum(axis=1) - 1.0
    min_eig = np.minimum(np.linalg.eigvalsh(s)[:, 0], np.linalg.eigvalsh(x)[:, 0])
    resid = np.max(np.abs(np.real(x[:, idx, idx]) - 1.0), axis=1)
    return primal, dual, x, y, min_eig, resid, iters


def _robustness_solutions(rhos: np.ndarray, tol: float) -> list[SdpSolution]:
    B, d, _ = rhos.shape
    if d == 1:
        return [
            SdpSolution("robustness", 0.0, 0.0, np.ones((1, 1), complex), np.ones(1), 0.0, 0.0, 0.0, 0)
            for _ in range(B)
        ]
    primal, dual, x, y, min_eig, resid, iters = _robustness_core(rhos, tol)
    return [
        SdpSolution(
            kind="robustness",
            optimal_value=float(primal[b]),
            dual_value=float(dual[b]),
            primal_variable=x[b],
            dual_variable=y[b],
            duality_gap=float(dual[b] - primal[b]),
            min_constraint_eigenvalue=float(min_eig[b]),
            primal_residual=float(resid[b]),
            iterations=int(iters[b]),
        )
        for b in range(B)
    ]


def solve_robustness(problem: RobustnessProblem, tol: float = 1e-9) -> SdpSolution:
    """Robustness of coherence of ``problem.rho`` in the computational basis."""
    tol = _check_tol(tol)
    if problem.rho.shape[0] > 256:
        raise ValueError("dimension above 256 is not supported")
    return _robustness_solutions(problem.rho[None], tol)[0]


def solve_robustness_batch(rhos, tol: float = 1e-9) -> list[SdpSolution]:
    """Vectorized :func:`solve_robustness` over a stack of equal-size states."""
    tol = _check_tol(tol)
    rhos = np.asarray(rhos, dtype=complex)
    if rhos.ndim != 3:
        raise ValueError("expected a (batch, d, d) array")
    rhos = np.stack([_check_density(r) for r in rhos])
    return _robustness_solutions(rhos, tol)


def group_average(x, base: int, n: int) -> np.ndarray:
    """Twirl ``x`` over the diagonal phase group ``{V_k}`` of ``n`` digits."""
    x = as_matrix(x)
    d = base**n
    digits = np.array(np.unravel_index(np.arange(d), (base,) * n)).T
    out = np.zeros_like(x)
    for k in digits:
        ph = np.exp(2j * np.pi * (digits @ k % base) / base)
        out += (ph[:, None] * x) * ph.conj()[None, :]
    return out / d


# ---------------------------------------------------------------------------
# minimum-error discrimination


def _hessian(sinv: np.ndarray) -> np.ndarray:
    """Matrix of ``E -> sum_a S_a^{-1} E S_a^{-1}`` on row-major vec(E)."""
    m, r, _ = sinv.shape
    flat = sinv.reshape(m, r * r)
    # [(i,k),(l,j)] = sum_a Sinv_a[i,k] Sinv_a[l,j]
    h = (flat.T @ flat).reshape(r, r, r, r).transpose(0, 3, 1, 2)
    return h.reshape(r * r, r * r)


def _discrimination_objective(y: np.ndarray, a: np.ndarray, t: float) -> float:
    try:
        chol = np.linalg.cholesky(y[None] - a)
    except np.linalg.LinAlgError:
        return np.inf
    diag = np.real(np.diagonal(chol, axis1=1, axis2=2))
    return t * float(np.real(np.trace(y))) - 2.0 * float(np.log(diag).sum())


def _inv_pd(mats: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(mats)
    inv = np.einsum("...ij,...j,...kj->...ik", v, 1.0 / w, v.conj())
    return 0.5 * (inv + inv.conj().swapaxes(-1, -2))


def _discrimination_core(a: np.ndarray, tol: float, max_newton: int = MAX_NEWTON):
    m, r, _ = a.shape
    nbar = m * r
    total = a.sum(axis=0)
    shift = np.linalg.eigvalsh(total)[-1] + 0.1
    y = total + shift * np.eye(r)
    t = 1.0
    iters = 0
    eye = np.eye(r)
    while True:
        prev = np.inf
        while True:
            s = y[None] - a
            sinv = _inv_pd(s)
            g = t * eye - sinv.sum(axis=0)
            h = _hessian(sinv)
            rhs = -g.reshape(-1)
            try:
                dy = scipy.linalg.cho_solve(scipy.linalg.cho_factor(h), rhs)
            except np.linalg.LinAlgError:
                dy = np.linalg.lstsq(h, rhs, rcond=None)[0]
            dy = dy.reshape(r, r)
            dy = 0.5 * (dy + dy.conj().T)
            lam2 = max(-float(np.real(np.vdot(g, dy))), 0.0)
            f0 = _discrimination_objective(y, a, t)
            step = 1.0
            ynew = y + dy
            for _ in range(60):
                f1 = _discrimination_objective(ynew, a, t)
                if np.isfinite(f1) and (lam2 <= 0.0625 or f1 <= f0 - 0.25 * step * lam2):
                    break
                step *= 0.5
                ynew = y + step * dy
            else:
                ynew = y
            y = ynew
            iters += 1
            if iters > max_newton:
                raise NotConverged(iters, nbar / t)
            # at large t the decrement bottoms out at a roundoff floor
            if lam2 <= CENTERING_TOL or (lam2 < STALL_DECREMENT and lam2 > 0.5 * prev):
                break
            prev = lam2
        if nbar / t < tol:
            break
        t *= MU_FACTOR

    s = y[None] - a
    povm = _inv_pd(s) / t
    tot = povm.sum(axis=0)
    w, v = np.linalg.eigh(tot)
    isq = (v / np.sqrt(w)) @ v.conj().T
    povm = isq[None] @ povm @ isq[None]
    povm = 0.5 * (povm + povm.conj().transpose(0, 2, 1))
    primal = float(np.real(np.einsum("aij,aji->", a, povm)))
    dual = float(np.real(np.trace(y)))
    min_eig = min(float(np.linalg.eigvalsh(s).min()), float(np.linalg.eigvalsh(povm).min()))
    return primal, dual, povm, y, min_eig, iters


def solve_discrimination(problem: DiscriminationProblem, tol: float = 1e-9) -> SdpSolution:
    """Optimal average success probability of identifying the ensemble member.

    The solve runs on the joint support of the ensemble; the measurement is
    lifted back to the full space by splitting the complementary projector
    equally among all outcomes.
    """
    tol = _check_tol(tol)
    p = problem.priors
    a_full = np.stack([pa * s for pa, s in zip(p, problem.states)])
    m, n, _ = a_full.shape
    w, v = np.linalg.eigh(a_full.sum(axis=0))
    keep = w > RANGE_CUTOFF * max(w[-1], 1e-300)
    q = v[:, keep]
    r = q.shape[1]
    a = np.einsum("ij,ajk,kl->ail", q.conj().T, a_full, q)
    a = 0.5 * (a + a.conj().transpose(0, 2, 1))
    primal, dual, povm_r, y_r, min_eig, iters = _discrimination_core(a, tol)

    comp = np.eye(n) - q @ q.conj().T
    povm = np.einsum("ij,ajk,kl->ail", q, povm_r, q.conj().T) + comp[None] / m
    povm = 0.5 * (povm + povm.conj().transpose(0, 2, 1))
    y = q @ y_r @ q.conj().T
    resid = float(np.linalg.norm(povm.sum(axis=0) - np.eye(n)))
    return SdpSolution(
        kind="discrimination",
        optimal_value=primal,
        dual_value=dual,
        primal_variable=povm,
        dual_variable=y,
        duality_gap=dual - primal,
        min_constraint_eigenvalue=min_eig,
        primal_residual=resid,
        iterations=iters,
        meta={"support_dim": r, "tol": tol},
    )


def extract_povm(solution: SdpSolution, problem: DiscriminationProblem, labels=None) -> Povm:
    """Validated measurement attaining the solution's optimal value."""
    if solution.kind != "discrimination":
        raise ValueError("extract_povm() needs a discrimination solution")
    tol = solution.meta.get("tol", 1e-9)
    bound = max(10 * tol, 1e-8)
    povm = Povm.from_elements(list(solution.primal_variable), labels)
    res = povm.completeness_residual()
    if res > bound:
        raise ExtractionFailed(f"completeness residual {res:.3e} exceeds {bound:.1e}")
    if povm.min_eigenvalue() < -bound:
        raise ExtractionFailed("extracted element is not positive semidefinite")
    achieved = povm.success_probability(problem.states, problem.priors)
    if abs(achieved - solution.optimal_value) > bound:
        raise ExtractionFailed(
            f"achieved {achieved:.12f} differs from optimum {solution.optimal_value:.12f}"
        )
    return povm
