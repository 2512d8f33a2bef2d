from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Sequence

import numpy as np

from .exceptions import InvalidState

POVM_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Povm:
    """Labelled measurement: ``outcomes`` is a tuple of ``(label, element)``."""

    outcomes: tuple[tuple[Hashable, np.ndarray], ...]

    def __post_init__(self):
        outs = []
        for label, el in self.outcomes:
            el = np.array(el, dtype=complex)
            el.setflags(write=False)
            outs.append((label, el))
        object.__setattr__(self, "outcomes", tuple(outs))

    @classmethod
    def from_elements(cls, elements: Sequence[np.ndarray], labels: Sequence[Hashable] | None = None) -> "Povm":
        labels = range(len(elements)) if labels is None else labels
        return cls(tuple(zip(labels, elements)))

    @property
    def labels(self) -> list:
        return [lab for lab, _ in self.outcomes]

    @property
    def elements(self) -> np.ndarray:
        return np.stack([el for _, el in self.outcomes])

    def __len__(self):
        return len(self.outcomes)

    def completeness_residual(self) -> float:
        els = self.elements
        return float(np.linalg.norm(els.sum(axis=0) - np.eye(els.shape[1])))

    def min_eigenvalue(self) -> float:
        els = self.elements
        return float(np.linalg.eigvalsh(0.5 * (els + els.conj().transpose(0, 2, 1))).min())

    def validate(self, tol: float = POVM_TOL) -> "Povm":
        lmin = self.min_eigenvalue()
        if lmin < -tol:
            raise InvalidState(f"POVM element has eigenvalue {lmin:.3e}")
        res = self.completeness_residual()
        if res > tol:
            raise InvalidState(f"POVM elements sum to identity only within {res:.3e}")
        return self

    def success_probability(self, states: Sequence[np.ndarray], priors: Sequence[float]) -> float:
        """``sum_a p_a tr(rho_a M_a)`` with states matched to outcomes by position."""
        els = self.elements
        states = np.asarray(states, dtype=complex)
        if states.shape[0] != els.shape[0]:
            raise ValueError("need one state per POVM outcome")
        vals = np.real(np.einsum("aij,aji->a", states, els))
        return float(np.dot(np.asarray(priors, dtype=float), vals))
