"""Guessing performance of the probabilistic Bernstein-Vazirani game.

``P(rho)`` is the best average probability of naming the hidden string
``a`` (uniform over all ``D**N`` strings) after one oracle call on ``rho``.
Closed forms live next to an independent route that enumerates the oracle
ensemble and solves the discrimination SDP with no structural assumptions.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .coherence import l1_pure, robustness
from .entanglement import geometric_entanglement
from .linalg import DensityOperator, PureState, as_matrix
from .model import DitString, OracleSpec, all_strings, oracle_unitary, phase_unitary
from .povm import Povm
from .sdp import DiscriminationProblem, RobustnessProblem, extract_povm, solve_discrimination, solve_robustness

MAX_ENSEMBLE = 64
MAX_ORACLE_SDP_DIM = 256
B_CUTOFF = 1e-12

__all__ = [
    "Povm",
    "PerformanceReport",
    "InputDecomposition",
    "decompose_input",
    "performance_theorem1",
    "performance_closed_minus",
    "bv_ensemble",
    "performance_oracle_sdp",
    "povm_from_robustness",
    "phase_ensemble",
    "helstrom_qubit",
    "product_povm",
    "product_performance",
    "no_entanglement_certificate",
]


@dataclass(frozen=True, eq=False)
class PerformanceReport:
    closed_form: float | None
    sdp_value: float
    achieved_by_povm: float
    method_tags: tuple[str, ...] = ()
    povm: Povm | None = None
    dual_value: float | None = None


@dataclass(frozen=True, eq=False)
class InputDecomposition:
    """``|mu> = a |+>|phi'> + b |->|phi>`` with ``|phi>``, ``|phi'>`` normalized."""

    a: complex
    b: complex
    phi: np.ndarray
    phi_prime: np.ndarray


def _normalize_phase(v: np.ndarray) -> tuple[np.ndarray, complex]:
    """Rotate ``v`` so its largest-magnitude entry is real positive."""
    k = int(np.argmax(np.abs(v)))
    ph = v[k] / abs(v[k])
    return v / ph, ph


def decompose_input(mu) -> InputDecomposition:
    """Split a register-plus-qubits state along ``|+>`` and ``|->`` of the register."""
    vec = np.asarray(mu.amplitudes if isinstance(mu, PureState) else mu, dtype=complex).reshape(-1)
    if vec.size < 4 or vec.size & (vec.size - 1):
        raise ValueError("expected a state of 1 + N qubits")
    rows = vec.reshape(2, -1)
    plus_part = (rows[0] + rows[1]) / np.sqrt(2)
    minus_part = (rows[0] - rows[1]) / np.sqrt(2)
    na, nb = np.linalg.norm(plus_part), np.linalg.norm(minus_part)
    dx = rows.shape[1]
    phi = np.zeros(dx, dtype=complex)
    phi_p = np.zeros(dx, dtype=complex)
    a = b = 0j
    if nb > B_CUTOFF:
        phi, ph = _normalize_phase(minus_part / nb)
        b = nb * ph
    if na > B_CUTOFF:
        phi_p, ph = _normalize_phase(plus_part / na)
        a = na * ph
    return InputDecomposition(a, b, phi, phi_p)


def performance_theorem1(mu) -> float:
    """Closed-form optimal performance of a pure qubit input."""
    vec = np.asarray(mu.amplitudes if isinstance(mu, PureState) else mu, dtype=complex).reshape(-1)
    n = int(np.log2(vec.size)) - 1
    dec = decompose_input(vec)
    b = abs(dec.b)
    if b < B_CUTOFF:
        return 1.0 / 2**n
    c = np.abs(dec.phi)
    c0 = c[0]
    s = c[1:].sum()
    root = np.sqrt(max(1 - b**2 * (1 - c0**2), 0.0))
    return float((1 + b**2 * l1_pure(dec.phi) + 2 * b * s * (root - b * c0)) / 2**n)


def _system_shape(dim: int, D: int) -> int:
    n = int(round(np.log(dim) / np.log(D)))
    if D**n != dim:
        raise ValueError(f"dimension {dim} is not a power of {D}")
    return n


def performance_closed_minus(rho_system, D: int = 2, tol: float = 1e-9) -> float:
    """``(1 + R(sigma)) / D**N`` for the input ``|-_D><-_D| x sigma``."""
    m = as_matrix(rho_system)
    _system_shape(m.shape[0], D)
    return float((1 + robustness(m, tol=tol)) / m.shape[0])


def bv_ensemble(initial, D: int = 2) -> tuple[list[DitString], list[np.ndarray]]:
    """States ``U_a rho U_a^+`` for every hidden string ``a``."""
    m = initial.matrix if isinstance(initial, DensityOperator) else np.asarray(initial, dtype=complex)
    if m.ndim == 1 or isinstance(initial, PureState):
        v = np.asarray(initial, dtype=complex).reshape(-1)
        m = np.outer(v, v.conj())
    n = _system_shape(m.shape[0], D) - 1
    if n < 1:
        raise ValueError("need at least one system digit")
    if D**n > MAX_ENSEMBLE:
        raise ValueError(f"ensemble of {D**n} strings exceeds {MAX_ENSEMBLE}")
    labels, states = [], []
    for a in all_strings(D, n):
        u = oracle_unitary(OracleSpec(D, n, a))
        labels.append(a)
        states.append(u @ m @ u.conj().T)
    return labels, states


def performance_oracle_sdp(initial, D: int = 2, tol: float = 1e-9) -> PerformanceReport:
    """Optimal performance from the discrimination SDP over the oracle ensemble."""
    labels, states = bv_ensemble(initial, D)
    if states[0].shape[0] > MAX_ORACLE_SDP_DIM:
        raise ValueError(f"oracle dimension above {MAX_ORACLE_SDP_DIM}")
    problem = DiscriminationProblem.uniform(states)
    sol = solve_discrimination(problem, tol)
    povm = extract_povm(sol, problem, labels)
    achieved = povm.success_probability(problem.states, problem.priors)
    return PerformanceReport(
        closed_form=None,
        sdp_value=sol.optimal_value,
        achieved_by_povm=achieved,
        method_tags=("oracle-ensemble", "discrimination-sdp"),
        povm=povm,
        dual_value=sol.dual_value,
    )


def povm_from_robustness(rho_system, D: int = 2, tol: float = 1e-9) -> tuple[Povm, float]:
    """Measurement ``M_a = V_a X V_a^+ / d`` built from the robustness witness ``X``.

    Acts on the system alone, for the ensemble ``{V_a sigma V_a^+}``.
    Returns the POVM and the robustness value it certifies.
    """
    m = as_matrix(rho_system)
    n = _system_shape(m.shape[0], D)
    d = D**n
    sol = solve_robustness(RobustnessProblem(m), tol)
    x = sol.primal_variable
    labels, elements = [], []
    for a in all_strings(D, n):
        v = phase_unitary(OracleSpec(D, n, a))
        labels.append(a)
        elements.append(v @ x @ v.conj().T / d)
    return Povm.from_elements(elements, labels), sol.optimal_value


def phase_ensemble(sigma, D: int = 2) -> tuple[list[DitString], list[np.ndarray]]:
    """``V_a sigma V_a^+`` for every ``a``: what the system sees after a ``|->`` query."""
    m = as_matrix(sigma)
    n = _system_shape(m.shape[0], D)
    labels, states = [], []
    for a in all_strings(D, n):
        v = phase_unitary(OracleSpec(D, n, a))
        labels.append(a)
        states.append(v @ m @ v.conj().T)
    return labels, states


def helstrom_qubit(phi) -> tuple[np.ndarray, np.ndarray]:
    """Best binary measurement for ``|phi>`` against ``sigma_z |phi>``, equal priors."""
    v = np.asarray(phi, dtype=complex).reshape(-1)
    if v.size != 2:
        raise ValueError("expected a qubit state")
    v = v / np.linalg.norm(v)
    w = np.array([v[0], -v[1]])
    delta = np.outer(v, v.conj()) - np.outer(w, w.conj())
    evals, evecs = np.linalg.eigh(delta)
    pos = evecs[:, evals > 1e-14]
    if not pos.size:
        # no information: always guess 0
        return np.eye(2, dtype=complex), np.zeros((2, 2), dtype=complex)
    m0 = pos @ pos.conj().T
    return m0, np.eye(2) - m0


def product_povm(phis: Sequence) -> Povm:
    """Tensor product of per-qubit Helstrom measurements.

    Outcome bit ``a_i = 0`` means the ``i``-th factor was left alone, ``1``
    that it picked up ``sigma_z``. No entangling operation is needed.
    """
    per = [helstrom_qubit(p) for p in phis]
    n = len(per)
    labels, elements = [], []
    for a in all_strings(2, n):
        el = np.ones((1, 1), dtype=complex)
        for bit, (m0, m1) in zip(a.digits, per):
            el = np.kron(el, m1 if bit else m0)
        labels.append(a)
        elements.append(el)
    return Povm.from_elements(elements, labels)


def product_performance(phis: Sequence) -> float:
    """``prod (1 + R(phi_i)) / 2``."""
    return float(np.prod([(1 + l1_pure(p)) / 2 for p in phis]))


@dataclass(frozen=True)
class NoEntanglementReport:
    form_holds: bool
    form_fidelity: float
    max_final_entanglement: float
    initial_entanglement: float
    performance: float
    per_string_entanglement: tuple[float, ...] = field(default=())


def no_entanglement_certificate(mu, restarts: int = 20, seed=0) -> NoEntanglementReport:
    """Check whether ``mu`` has the entanglement-free form ``|->|product>``.

    ``form_fidelity`` is the largest squared overlap of ``mu`` with states
    ``|-> x (product)``. The entanglement proxy of each final state
    ``U_a|mu>`` is its geometric entanglement over all qubits.
    """
    vec = np.asarray(mu.amplitudes if isinstance(mu, PureState) else mu, dtype=complex).reshape(-1)
    vec = vec / np.linalg.norm(vec)
    n = int(np.log2(vec.size)) - 1
    dec = decompose_input(vec)
    b2 = abs(dec.b) ** 2
    if b2 > B_CUTOFF:
        ge_phi = geometric_entanglement(dec.phi, (2,) * n, restarts, seed=seed).value if n > 1 else 0.0
    else:
        ge_phi = 1.0
    fid = b2 * (1 - ge_phi)
    per = []
    for a in all_strings(2, n):
        out = oracle_unitary(OracleSpec(2, n, a)) @ vec
        per.append(geometric_entanglement(out, (2,) * (n + 1), restarts, seed=seed).value)
    init = geometric_entanglement(vec, (2,) * (n + 1), restarts, seed=seed).value
    return NoEntanglementReport(
        form_holds=bool(fid >= 1 - 1e-9),
        form_fidelity=float(fid),
        max_final_entanglement=float(max(per)),
        initial_entanglement=float(init),
        performance=performance_theorem1(vec),
        per_string_entanglement=tuple(float(x) for x in per),
    )
