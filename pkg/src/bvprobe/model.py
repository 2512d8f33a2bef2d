"""Bernstein-Vazirani oracles for qubits and qudits, plus the classical game.

Basis convention: the oracle register is tensor factor 0 and the system
digits follow, most significant first, so the basis index of ``|j>|x>`` is
``j * D**N + index(x)`` with ``index(x) = sum_m x_m D**(N-m)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .exceptions import DimensionTooLarge
from .linalg import PureState
from .sampling import as_rng

MAX_ORACLE_DIM = 4096


@dataclass(frozen=True)
class DitString:
    """A string of ``len(digits)`` digits over ``{0, ..., base-1}``."""

    base: int
    digits: tuple[int, ...]

    def __post_init__(self):
        digits = tuple(int(x) for x in self.digits)
        if self.base < 2:
            raise ValueError("base must be at least 2")
        if len(digits) < 1:
            raise ValueError("a DitString needs at least one digit")
        if any(not 0 <= x < self.base for x in digits):
            raise ValueError(f"digits {digits} not all in [0, {self.base})")
        object.__setattr__(self, "digits", digits)

    @classmethod
    def from_index(cls, index: int, base: int, length: int) -> "DitString":
        if not 0 <= index < base**length:
            raise ValueError(f"index {index} out of range")
        digits = []
        for _ in range(length):
            index, r = divmod(index, base)
            digits.append(r)
        return cls(base, tuple(reversed(digits)))

    @classmethod
    def zeros(cls, base: int, length: int) -> "DitString":
        return cls(base, (0,) * length)

    def __len__(self):
        return len(self.digits)

    def __str__(self):
        return "".join(str(x) for x in self.digits) if self.base <= 10 else ",".join(map(str, self.digits))

    @property
    def index(self) -> int:
        out = 0
        for x in self.digits:
            out = out * self.base + x
        return out

    def dot(self, other: "DitString") -> int:
        """``self . other mod base``."""
        if other.base != self.base or len(other) != len(self):
            raise ValueError("dot product needs strings of equal base and length")
        return sum(a * b for a, b in zip(self.digits, other.digits)) % self.base

    def is_zero(self) -> bool:
        return not any(self.digits)


def all_strings(base: int, length: int) -> Iterator[DitString]:
    for digits in itertools.product(range(base), repeat=length):
        yield DitString(base, digits)


@dataclass(frozen=True)
class OracleSpec:
    base: int
    n_system: int
    secret: DitString

    def __post_init__(self):
        if self.secret.base != self.base or len(self.secret) != self.n_system:
            raise ValueError("secret string does not match base / n_system")

    @classmethod
    def qubits(cls, bits: Sequence[int]) -> "OracleSpec":
        return cls(2, len(bits), DitString(2, tuple(bits)))

    def f(self, x: DitString) -> int:
        return self.secret.dot(x)

    @property
    def system_dim(self) -> int:
        return self.base**self.n_system


def _dot_table(base: int, n: int, secret: DitString) -> np.ndarray:
    """``f(x)`` for every system basis index ``x``."""
    digits = np.array(list(itertools.product(range(base), repeat=n)), dtype=np.int64)
    return (digits @ np.array(secret.digits, dtype=np.int64)) % base


def oracle_unitary(spec: OracleSpec) -> np.ndarray:
    """Permutation matrix ``|j>|x> -> |j + f(x) mod D>|x>``."""
    D, N = spec.base, spec.n_system
    dim = D ** (N + 1)
    if dim > MAX_ORACLE_DIM:
        raise DimensionTooLarge(f"oracle dimension {dim} exceeds {MAX_ORACLE_DIM}")
    dx = D**N
    fx = _dot_table(D, N, spec.secret)
    j = np.repeat(np.arange(D), dx)
    x = np.tile(np.arange(dx), D)
    src = j * dx + x
    dst = ((j + fx[x]) % D) * dx + x
    u = np.zeros((dim, dim), dtype=complex)
    u[dst, src] = 1.0
    return u


def phase_unitary(spec: OracleSpec) -> np.ndarray:
    """Diagonal ``V_k`` on the system alone: ``V|x> = w**(k.x) |x>``, ``w = e^{2 pi i / D}``."""
    fx = _dot_table(spec.base, spec.n_system, spec.secret)
    return np.diag(np.exp(2j * np.pi * fx / spec.base))


def minus_state(D: int = 2) -> PureState:
    """``|-_D> = D^{-1/2} sum_k e^{-2 pi i k / D} |k>``; ``(|0> - |1>)/sqrt 2`` at D=2."""
    k = np.arange(D)
    return PureState(np.exp(-2j * np.pi * k / D) / np.sqrt(D), (D,))


def plus_state(D: int = 2) -> PureState:
    return PureState(np.ones(D) / np.sqrt(D), (D,))


def max_coherent_state(D: int, N: int) -> PureState:
    d = D**N
    return PureState(np.ones(d) / np.sqrt(d), (D,) * N)


def oracle_eigen_action_check(spec: OracleSpec, register: PureState | None = None) -> float:
    """Max over basis strings x of ``|U(|r>|x>) - w**f(x) |r>|x>|``.

    With the default register ``|-_D>`` this is zero up to roundoff: the
    oracle only imprints a phase. Passing another register state (e.g.
    ``|+>``) gives a negative control.
    """
    D, N = spec.base, spec.n_system
    r = minus_state(D).amplitudes if register is None else np.asarray(register, dtype=complex)
    u = oracle_unitary(spec)
    fx = _dot_table(D, N, spec.secret)
    dx = D**N
    worst = 0.0
    for xi in range(dx):
        ex = np.zeros(dx, dtype=complex)
        ex[xi] = 1.0
        v = np.kron(r, ex)
        expected = np.exp(2j * np.pi * fx[xi] / D) * v
        worst = max(worst, float(np.linalg.norm(u @ v - expected)))
    return worst


def classical_bv_step(spec: OracleSpec, i: int, x: DitString) -> tuple[int, DitString]:
    """Classical oracle: ``(i, x) -> (i + f(x) mod D, x)``."""
    if x.base != spec.base:
        raise ValueError("input string base does not match the oracle")
    if not 0 <= i < spec.base:
        raise ValueError(f"register value {i} out of range")
    return (i + spec.f(x)) % spec.base, x


def classical_guess_probability(N: int, x: DitString) -> float:
    """Optimal success probability of guessing a uniformly random bit string
    from one classical oracle call on input ``x``."""
    if x.base != 2 or len(x) != N:
        raise ValueError("classical baseline is defined for N-bit strings")
    return float(Fraction(1, 2**N) if x.is_zero() else Fraction(1, 2 ** (N - 1)))


def classical_monte_carlo(N: int, x: DitString, trials: int, seed=None, i: int = 0) -> float:
    """Empirical success rate of the maximum-likelihood classical guesser.

    The hidden string is uniform; after one call the guesser picks uniformly
    among all strings consistent with the observed output bit.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if x.base != 2 or len(x) != N:
        raise ValueError("classical baseline is defined for N-bit strings")
    rng = as_rng(seed)
    parities = _dot_table(2, N, x)  # a.x mod 2 for every candidate a
    by_parity = [np.flatnonzero(parities == r) for r in (0, 1)]
    secret = rng.integers(0, 2**N, size=trials)
    observed = (i + parities[secret]) % 2
    r = (observed - i) % 2
    guess = np.empty(trials, dtype=np.int64)
    for val in (0, 1):
        sel = r == val
        pool = by_parity[val]
        guess[sel] = pool[rng.integers(0, pool.size, size=int(sel.sum()))]
    return float(np.mean(guess == secret))
