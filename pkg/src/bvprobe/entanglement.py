"""Geometric entanglement, W-state families and the one-clean-qubit bound.

Relative entropy of entanglement itself is never computed. The DQC1 part
only evaluates distances to the maximally mixed state, which upper-bound
any distance-based entanglement quantifier once the distance is contractive.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coherence import l1_pure
from .linalg import (
    DensityOperator,
    PureState,
    as_matrix,
    binary_entropy,
    is_unitary,
    partial_trace,
    relative_entropy,
    trace_distance,
    von_neumann_entropy,
)
from .sampling import as_rng, haar_state

MAX_GE_DIM = 256


# ---------------------------------------------------------------------------
# geometric entanglement


@dataclass(frozen=True, eq=False)
class GeometricResult:
    value: float
    overlap: float
    factors: tuple[np.ndarray, ...]
    converged: bool
    sweeps: int


def _dims_of(psi, dims) -> tuple[np.ndarray, tuple[int, ...]]:
    if isinstance(psi, PureState):
        dims = psi.dims if dims is None else tuple(dims)
        vec = psi.amplitudes
    else:
        vec = np.asarray(psi, dtype=complex).reshape(-1)
        if dims is None:
            n = int(round(np.log2(vec.size)))
            if 2**n != vec.size:
                raise ValueError("dims required unless the state is made of qubits")
            dims = (2,) * n
    dims = tuple(int(d) for d in dims)
    if int(np.prod(dims)) != vec.size:
        raise ValueError(f"dims {dims} do not match {vec.size} amplitudes")
    if vec.size > MAX_GE_DIM:
        raise ValueError(f"total dimension above {MAX_GE_DIM}")
    return vec / np.linalg.norm(vec), dims


def _conditioned(t: np.ndarray, factors: list, k: int) -> np.ndarray:
    """Contract every factor except ``k`` (conjugated) into ``t``."""
    out = t
    # contract from the last axis down so earlier axis numbers stay valid
    for j in reversed(range(len(factors))):
        if j == k:
            continue
        out = np.tensordot(out, factors[j].conj(), axes=([j], [0]))
    return out


def product_overlap(psi_tensor: np.ndarray, factors: Sequence[np.ndarray]) -> float:
    out = psi_tensor
    for f in reversed(factors):
        out = out @ f.conj()
    return float(abs(out) ** 2)


def geometric_entanglement(
    psi,
    dims: Sequence[int] | None = None,
    restarts: int = 50,
    tol: float = 1e-10,
    seed=0,
    max_sweeps: int = 1000,
) -> GeometricResult:
    """``1 - max |<p|psi>|^2`` over product states ``p``.

    Alternating maximization: each factor in turn is replaced by the
    normalized contraction of ``psi`` with the other factors, which is the
    dominant eigenvector of the rank-one conditioned operator. A sweep never
    lowers the overlap. The best of ``restarts`` random starts is returned.
    """
    vec, dims = _dims_of(psi, dims)
    t = vec.reshape(dims)
    rng = as_rng(seed)
    best = None
    for _ in range(max(restarts, 1)):
        factors = [haar_state(d, rng) for d in dims]
        prev = product_overlap(t, factors)
        converged = False
        for sweep in range(1, max_sweeps + 1):
            for k in range(len(dims)):
                v = _conditioned(t, factors, k)
                nv = np.linalg.norm(v)
                if nv > 0:
                    factors[k] = v / nv
            cur = product_overlap(t, factors)
            if cur - prev < tol:
                converged = True
                prev = max(cur, prev)
                break
            prev = cur
        if best is None or prev > best[0]:
            best = (prev, tuple(f.copy() for f in factors), converged, sweep)
    ov, factors, converged, sweeps = best
    ov = min(ov, 1.0)
    return GeometricResult(1.0 - ov, ov, factors, converged, sweeps)


def _bloch(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.stack([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def grid_product_overlap(psi, n: int | None = None, points: int = 41, zooms: int = 6) -> float:
    """Max product overlap of a qubit state by Bloch-angle grid search.

    The first ``n - 1`` qubits are scanned on a ``points x points`` grid in
    ``(theta, phi)``. The last qubit is optimized exactly, since the best
    overlap with it fixed is the squared norm of the conditioned vector.
    The grid is then shrunk around the incumbent ``zooms`` times.
    """
    vec = np.asarray(psi, dtype=complex).reshape(-1)
    n = int(round(np.log2(vec.size))) if n is None else n
    if n < 1 or n > 4:
        raise ValueError("grid search supports 1 to 4 qubits")
    vec = vec / np.linalg.norm(vec)
    if n == 1:
        return 1.0
    t = vec.reshape((2,) * n)
    m = n - 1
    centre = np.tile([np.pi / 2, np.pi], (m, 1))
    half = np.tile([np.pi / 2, np.pi], (m, 1))
    best = 0.0
    for _ in range(zooms + 1):
        axes = []
        for q in range(m):
            th = np.clip(np.linspace(centre[q, 0] - half[q, 0], centre[q, 0] + half[q, 0], points), 0, np.pi)
            ph = np.linspace(centre[q, 1] - half[q, 1], centre[q, 1] + half[q, 1], points)
            tt, pp = np.meshgrid(th, ph, indexing="ij")
            axes.append((tt.reshape(-1), pp.reshape(-1)))
        # contract qubits one at a time, keeping a grid axis per scanned qubit
        out = t
        for q in range(m):
            st = _bloch(*axes[q]).conj()  # (G, 2)
            out = np.tensordot(out, st, axes=([q], [1]))
            out = np.moveaxis(out, -1, q)
        vals = np.sum(np.abs(out) ** 2, axis=-1)
        idx = np.unravel_index(int(np.argmax(vals)), vals.shape)
        best = max(best, float(vals[idx]))
        for q in range(m):
            centre[q] = [axes[q][0][idx[q]], axes[q][1][idx[q]]]
        half = half * 4.0 / (points - 1)
    return min(best, 1.0)


# ---------------------------------------------------------------------------
# W states


def theta_basis(theta: float) -> np.ndarray:
    """Columns ``(|0> + e^{i theta}|1>)/sqrt 2`` and ``(|0> - e^{i theta}|1>)/sqrt 2``."""
    e = np.exp(1j * theta)
    return np.array([[1, 1], [e, -e]], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True, eq=False)
class WStateSpec:
    """Single-excitation superposition over arbitrary local bases.

    ``local_bases[k]`` is a 2x2 unitary whose columns are ``|psi_k>`` and
    ``|psi_k^perp>``. Term ``j`` puts ``|psi_j^perp>`` on qubit ``j`` and
    ``|psi_k>`` elsewhere, with phase ``exp(i phases[j])``.
    """

    n: int
    phases: tuple[float, ...] = ()
    local_bases: tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("a W state needs at least two qubits")
        phases = tuple(float(p) for p in self.phases) or (0.0,) * self.n
        bases = tuple(as_matrix(b) for b in self.local_bases) or (np.eye(2, dtype=complex),) * self.n
        if len(phases) != self.n or len(bases) != self.n:
            raise ValueError("need one phase and one local basis per qubit")
        for b in bases:
            if b.shape != (2, 2) or not is_unitary(b, 1e-10):
                raise ValueError("local bases must be orthonormal qubit bases")
        object.__setattr__(self, "phases", phases)
        object.__setattr__(self, "local_bases", bases)

    @classmethod
    def standard(cls, n: int) -> "WStateSpec":
        return cls(n)

    @classmethod
    def random_theta(cls, n: int, rng=None) -> "WStateSpec":
        """Uniform phases, local bases ``theta_basis`` with uniform angles."""
        rng = as_rng(rng)
        phases = rng.uniform(0, 2 * np.pi, n)
        thetas = rng.uniform(0, 2 * np.pi, n)
        return cls(n, tuple(phases), tuple(theta_basis(t) for t in thetas))


def build_w_state(spec: WStateSpec) -> PureState:
    n = spec.n
    out = np.zeros(2**n, dtype=complex)
    for j in range(n):
        term = np.ones(1, dtype=complex)
        for k in range(n):
            term = np.kron(term, spec.local_bases[k][:, 1 if k == j else 0])
        out += np.exp(1j * spec.phases[j]) * term
    return PureState(out / np.sqrt(n), (2,) * n)


def local_patterns(spec: WStateSpec, tol: float = 1e-10) -> list[tuple[int, ...]]:
    """Nonzero coordinate patterns of the W state in its own local bases."""
    psi = build_w_state(spec).amplitudes
    u = np.ones((1, 1), dtype=complex)
    for b in spec.local_bases:
        u = np.kron(u, b)
    coords = u.conj().T @ psi
    nz = np.flatnonzero(np.abs(coords) > tol)
    return [tuple(int(c) for c in np.binary_repr(i, spec.n)) for i in nz]


def max_coherence_deficit(spec: WStateSpec) -> float:
    """``(2**n - 1) - R``: zero exactly when the state is maximally coherent."""
    psi = build_w_state(spec).amplitudes
    return max(float(2**spec.n - 1 - l1_pure(psi)), 0.0)


def deficit_search(n: int, samples: int, rng=None) -> np.ndarray:
    """Deficits of ``samples`` random :meth:`WStateSpec.random_theta` specs."""
    rng = as_rng(rng)
    return np.array([max_coherence_deficit(WStateSpec.random_theta(n, rng)) for _ in range(samples)])


# ---------------------------------------------------------------------------
# DQC1


@dataclass(frozen=True, eq=False)
class Dqc1Instance:
    alpha: float
    n: int
    unitary: np.ndarray

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 1 <= self.n <= 6:
            raise ValueError("target register must have 1 to 6 qubits")
        u = as_matrix(self.unitary)
        if u.shape != (2**self.n, 2**self.n) or not is_unitary(u, 1e-10):
            raise ValueError(f"unitary must be a {2**self.n}x{2**self.n} unitary")
        object.__setattr__(self, "unitary", u)

    def control_state(self) -> np.ndarray:
        sx = np.array([[0, 1], [1, 0]], dtype=complex)
        return (np.eye(2) + self.alpha * sx) / 2

    def trace_signal(self) -> complex:
        """``(alpha / 2) tr(U^+) / 2**n``."""
        return self.alpha / 2 * np.trace(self.unitary.conj().T) / 2**self.n


def controlled(u: np.ndarray) -> np.ndarray:
    """``|0><0| x I + |1><1| x U`` with the control as factor 0."""
    d = u.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = np.eye(d)
    out[d:, d:] = u
    return out


def dqc1_states(inst: Dqc1Instance) -> tuple[DensityOperator, DensityOperator]:
    d = 2**inst.n
    dims = (2,) * (inst.n + 1)
    initial = np.kron(inst.control_state(), np.eye(d) / d)
    v = controlled(inst.unitary)
    final = v @ initial @ v.conj().T
    return DensityOperator(initial, dims), DensityOperator(final, dims)


def control_offdiagonal(inst: Dqc1Instance) -> complex:
    _, final = dqc1_states(inst)
    return complex(partial_trace(final, [0]).matrix[0, 1])


_DISTANCES = {
    "relative_entropy": relative_entropy,
    "rel-entropy": relative_entropy,
    "trace_distance": trace_distance,
    "trace-distance": trace_distance,
}


@dataclass(frozen=True)
class Dqc1BoundReport:
    distance: str
    lhs_chain: float
    rhs: float
    residual: float
    holds: bool


def dqc1_bound_check(inst: Dqc1Instance, distance: str = "relative_entropy", tol: float = 1e-8) -> Dqc1BoundReport:
    """Compare ``D(final, I/2**(n+1))`` with ``D(rho, I/2)``.

    The two agree because the controlled unitary fixes the maximally mixed
    state and ``D`` is unitarily invariant. ``rhs`` is then an upper bound
    on the entanglement of the final state for any contractive ``D``.
    """
    if distance not in _DISTANCES:
        raise ValueError(f"unknown distance {distance!r}")
    dist = _DISTANCES[distance]
    _, final = dqc1_states(inst)
    dim = 2 ** (inst.n + 1)
    lhs = dist(final.matrix, np.eye(dim) / dim)
    rhs = dist(inst.control_state(), np.eye(2) / 2)
    res = abs(lhs - rhs)
    return Dqc1BoundReport(distance, float(lhs), float(rhs), float(res), bool(res <= tol))


def dqc1_bound_closed_form(alpha: float, distance: str = "relative_entropy") -> float:
    """``1 - H2((1 + alpha)/2)`` bits, or ``alpha / 2`` in trace distance."""
    if distance in ("relative_entropy", "rel-entropy"):
        return 1.0 - binary_entropy((1 + alpha) / 2)
    if distance in ("trace_distance", "trace-distance"):
        return alpha / 2
    raise ValueError(f"unknown distance {distance!r}")


# ---------------------------------------------------------------------------
# mutual information


def _split(dims, cut) -> tuple[list[int], list[int]]:
    n = len(dims)
    a = sorted(set(int(k) for k in cut))
    if not a or len(a) == n or any(not 0 <= k < n for k in a):
        raise ValueError(f"cut {cut} is not a bipartition of {n} factors")
    return a, [k for k in range(n) if k not in a]


def marginal_product(rho, dims: Sequence[int], cut: Sequence[int]) -> np.ndarray:
    """``rho_A x rho_B`` laid out in the original factor order."""
    dims = tuple(dims)
    a, b = _split(dims, cut)
    ra = partial_trace(as_matrix(rho), a, dims)
    rb = partial_trace(as_matrix(rho), b, dims)
    prod = np.kron(ra, rb)
    order = a + b
    sub = [dims[k] for k in order]
    n = len(dims)
    t = prod.reshape(sub + sub)
    inv = list(np.argsort(order))
    t = t.transpose(inv + [n + i for i in inv])
    side = int(np.prod(dims))
    return t.reshape(side, side)


def mutual_information(rho, dims: Sequence[int], cut: Sequence[int]) -> float:
    """``S(A) + S(B) - S(AB)`` in bits, with ``A`` the factors in ``cut``."""
    dims = tuple(dims)
    a, b = _split(dims, cut)
    m = as_matrix(rho)
    sa = von_neumann_entropy(partial_trace(m, a, dims))
    sb = von_neumann_entropy(partial_trace(m, b, dims))
    return float(sa + sb - von_neumann_entropy(m))
