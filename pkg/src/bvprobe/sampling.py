"""Random states and unitaries for property suites and sweeps."""
from __future__ import annotations

import numpy as np


def as_rng(seed=None) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    rng = as_rng(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_state(d: int, rng=None) -> np.ndarray:
    rng = as_rng(rng)
    z = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return z / np.linalg.norm(z)


def random_density_matrix(d: int, rng=None, rank: int | None = None) -> np.ndarray:
    """Induced-measure random state; ``rank=None`` gives Hilbert-Schmidt."""
    rng = as_rng(rng)
    k = d if rank is None else rank
    g = rng.standard_normal((d, k)) + 1j * rng.standard_normal((d, k))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def mix_to_purity(rho: np.ndarray, gamma: float) -> np.ndarray:
    """Mix ``rho`` with the maximally mixed state until its purity is ``gamma``.

    Mixing only lowers purity, so ``rho`` must already have purity >= gamma.
    """
    d = rho.shape[0]
    p0 = float(np.sum(np.abs(rho) ** 2))
    if gamma > p0 + 1e-12:
        raise ValueError(f"cannot raise purity {p0:.6f} to {gamma:.6f} by mixing")
    # purity(q rho + (1-q) I/d) = q^2 (p0 - 1/d) + 1/d
    q = np.sqrt(max(gamma - 1.0 / d, 0.0) / (p0 - 1.0 / d)) if p0 > 1.0 / d else 0.0
    return q * rho + (1 - q) * np.eye(d) / d
