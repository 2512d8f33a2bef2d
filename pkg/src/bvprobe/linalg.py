"""Dense linear algebra on small Hilbert spaces.

States are stored as plain numpy arrays wrapped in two light, immutable
containers (:class:`PureState`, :class:`DensityOperator`) that carry the
tensor-factor dimensions. Factor 0 is always the leftmost Kronecker factor,
which is where the oracle register lives throughout the package.

All entropies are in bits.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .exceptions import BadIndex, InvalidState, NotHermitian

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
SUPPORT_TOL = 1e-9


def as_matrix(m) -> np.ndarray:
    """Return ``m`` as a finite complex 2-d array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a matrix, got array of shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def _check_dims(dims, total: int) -> tuple[int, ...]:
    if dims is None:
        return (total,)
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != total:
        raise ValueError(f"dims {dims} do not multiply to {total}")
    return dims


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector over a labelled tensor product."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        dims = _check_dims(self.dims, amps.size)
        if not np.all(np.isfinite(amps)):
            raise InvalidState("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise InvalidState(f"state is not normalized (|psi|^2 = {norm2!r})")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def from_unnormalized(cls, amplitudes, dims=None) -> "PureState":
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        return cls(amps / np.linalg.norm(amps), dims)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def density(self) -> "DensityOperator":
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.amplitudes, dtype=dtype)

    def __len__(self):
        return self.amplitudes.size


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix with factor dims."""

    matrix: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidState(f"density operator must be square, got {m.shape}")
        dims = _check_dims(self.dims, m.shape[0])
        herm_err = float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0
        if herm_err > HERMITIAN_TOL:
            raise InvalidState(f"matrix is not Hermitian (max |M - M^+| = {herm_err:.2e})")
        m = 0.5 * (m + m.conj().T)
        tr = float(np.trace(m).real)
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace is {tr!r}, expected 1")
        lmin = float(np.linalg.eigvalsh(m)[0])
        if lmin < -PSD_TOL:
            raise InvalidState(f"matrix has negative eigenvalue {lmin:.3e}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.matrix, dtype=dtype)


def basis_state(index: int, dims: Sequence[int]) -> PureState:
    dims = tuple(dims)
    amps = np.zeros(int(np.prod(dims)), dtype=complex)
    amps[index] = 1.0
    return PureState(amps, dims)


def maximally_mixed(d: int, dims: Sequence[int] | None = None) -> DensityOperator:
    return DensityOperator(np.eye(d, dtype=complex) / d, dims)


def tensor(a, b):
    """Kronecker product with ``a``'s factors first.

    Works on pairs of :class:`PureState`, pairs of :class:`DensityOperator`,
    or raw arrays (vectors or matrices).
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    if isinstance(a, (PureState, DensityOperator)) or isinstance(b, (PureState, DensityOperator)):
        raise TypeError("tensor() needs two objects of the same kind")
    return np.kron(np.asarray(a), np.asarray(b))


def tensor_all(items: Iterable):
    items = list(items)
    if not items:
        raise ValueError("tensor_all() of an empty sequence")
    out = items[0]
    for item in items[1:]:
        out = tensor(out, item)
    return out


def eig_hermitian(m, tol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(w, V)`` with ``m = V @ diag(w) @ V^+``. Raises
    :class:`NotHermitian` if ``m`` deviates from Hermiticity by more than
    ``tol`` in any entry.
    """
    m = as_matrix(m)
    if m.shape[0] != m.shape[1]:
        raise NotHermitian(f"matrix of shape {m.shape} is not square")
    if m.size and np.max(np.abs(m - m.conj().T)) > tol:
        raise NotHermitian("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    return w[::-1].copy(), v[:, ::-1].copy()


def _clamped_spectrum(m) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.size and w[0] < -PSD_TOL:
        raise InvalidState(f"operator has eigenvalue {w[0]:.3e} below -{PSD_TOL}")
    return np.clip(w, 0.0, None), v


def sqrtm_psd(m) -> np.ndarray:
    w, v = _clamped_spectrum(as_matrix(m))
    return (v * np.sqrt(w)) @ v.conj().T


def partial_trace(rho, keep: Iterable[int], dims: Sequence[int] | None = None):
    """Trace out every factor not listed in ``keep``.

    ``dims`` is taken from ``rho`` when it is a :class:`DensityOperator`. The
    kept factors appear in ascending index order. Returns the same kind of
    object that was passed in.
    """
    is_state = isinstance(rho, DensityOperator)
    if is_state:
        dims = rho.dims if dims is None else tuple(dims)
    m = as_matrix(rho)
    if dims is None:
        raise ValueError("dims required for a raw matrix")
    dims = _check_dims(dims, m.shape[0])
    n = len(dims)
    keep = sorted(set(int(k) for k in keep))
    for k in keep:
        if not 0 <= k < n:
            raise BadIndex(f"factor index {k} out of range for {n} factors")
    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = keep + [n + i for i in keep]
    red = np.einsum(t, row + col, out)
    kd = tuple(dims[i] for i in keep)
    side = int(np.prod(kd)) if kd else 1
    red = red.reshape(side, side)
    if is_state:
        return DensityOperator(red, kd if kd else (1,))
    return red


def dephase(rho) -> np.ndarray:
    """Completely dephase in the computational basis."""
    m = as_matrix(rho)
    return np.diag(np.diag(m))


def purity(rho) -> float:
    m = as_matrix(rho)
    return float(np.sum(np.abs(m) ** 2))


def von_neumann_entropy(rho) -> float:
    w, _ = _clamped_spectrum(as_matrix(rho))
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def relative_entropy(rho, sigma) -> float:
    """Quantum relative entropy S(rho||sigma) in bits.

    Returns ``inf`` when the support of ``rho`` is not contained in that of
    ``sigma`` (weight of ``rho`` on the kernel of ``sigma`` above 1e-9).
    """
    r = as_matrix(rho)
    s = as_matrix(sigma)
    wr, _ = _clamped_spectrum(r)
    ws, vs = _clamped_spectrum(s)
    pos = wr > 0
    first = float(np.sum(wr[pos] * np.log2(wr[pos])))
    # weights of rho along the eigenvectors of sigma
    weights = np.real(np.einsum("ij,ik,kj->j", vs.conj(), r, vs))
    kernel = ws <= SUPPORT_TOL
    if np.any(weights[kernel] > SUPPORT_TOL):
        return float("inf")
    sup = ~kernel
    second = float(np.sum(weights[sup] * np.log2(ws[sup])))
    return max(first - second, 0.0)


def trace_distance(rho, sigma) -> float:
    diff = as_matrix(rho) - as_matrix(sigma)
    w = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(min(0.5 * np.sum(np.abs(w)), 1.0))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    sr = sqrtm_psd(rho)
    inner = sr @ as_matrix(sigma) @ sr
    w, _ = _clamped_spectrum(inner)
    return float(min(np.sum(np.sqrt(w)) ** 2, 1.0))


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = as_matrix(u)
    return u.shape[0] == u.shape[1] and np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol
