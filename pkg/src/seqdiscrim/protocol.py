"""Two-observer sequential unambiguous discrimination of two qubit states.

Bob couples the qubit to a qutrit ancilla prepared in |0>, applies a joint
unitary and reads the ancilla: outcome 1 or 2 names the state, outcome 0 is
inconclusive. Charlie repeats the procedure on the qubit Bob passes on.
Both observers' ancilla kets live in dims ``[2, 3]`` with the qubit first.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .qmath import (
    DensityOperator,
    StateVector,
    UnitaryOperator,
    complete_isometry,
    tensor_product,
)

PARAM_TOL = 1e-10
# the ancilla |0> input subspace sits at these flat indices of the 2x3 space
_INPUT_SLOTS = (0, 3)


@dataclass(frozen=True)
class ProtocolParams:
    """Overlaps and inconclusive-outcome weights for one protocol run.

    ``s`` is the prepared overlap <psi1|psi2>, ``t`` the overlap <phi1|phi2>
    of the states Bob passes on. ``q1b, q2b`` are Bob's failure weights and
    ``q1c, q2c`` Charlie's.
    """

    s: float
    t: float
    q1b: float
    q2b: float
    q1c: float
    q2c: float

    def __post_init__(self):
        for name in ("s", "t", "q1b", "q2b", "q1c", "q2c"):
            v = getattr(self, name)
            if not (-PARAM_TOL <= v <= 1 + PARAM_TOL) or math.isnan(v):
                raise ValueError(f"{name}={v} outside [0, 1]")
            object.__setattr__(self, name, float(min(max(v, 0.0), 1.0)))
        if self.s > self.t + PARAM_TOL:
            raise ValueError(f"need s <= t, got s={self.s}, t={self.t}")
        if abs(math.sqrt(self.q1b * self.q2b) * self.t - self.s) > PARAM_TOL:
            raise ValueError("Bob's weights violate sqrt(q1b*q2b)*t == s")
        if math.sqrt(self.q1c * self.q2c) < self.t - PARAM_TOL:
            raise ValueError("Charlie's weights violate sqrt(q1c*q2c) >= t")

    @classmethod
    def equal_weights(cls, s: float, t: float) -> ProtocolParams:
        """Both observers at their symmetric optimum: q^b = s/t, q^c = t."""
        r = s / t if t > 0 else 0.0
        return cls(s=s, t=t, q1b=r, q2b=r, q1c=t, q2c=t)

    @classmethod
    def from_overlaps(cls, r: float, t: float) -> ProtocolParams:
        """Equal-weight parameters from the ancilla overlap r = <eta1|eta2> and t."""
        return cls(s=r * t, t=t, q1b=r, q2b=r, q1c=t, q2c=t)

    @property
    def r(self) -> float:
        """Overlap <eta1|eta2> of Bob's ancilla states."""
        return math.sqrt(self.q1b * self.q2b)

    def swapped(self) -> ProtocolParams:
        """Same protocol with the labels of the two states exchanged."""
        return ProtocolParams(self.s, self.t, self.q2b, self.q1b, self.q2c, self.q1c)


@dataclass(frozen=True, eq=False)
class PovmSet:
    """Effective qubit measurement Pi_0 (inconclusive), Pi_1, Pi_2."""

    elements: tuple[np.ndarray, np.ndarray, np.ndarray]

    def __post_init__(self):
        for e in self.elements:
            if np.max(np.abs(e - e.conj().T)) > PARAM_TOL or np.linalg.eigvalsh(e)[0] < -PARAM_TOL:
                raise ValueError("POVM element is not Hermitian PSD")
        if self.completeness_defect() > PARAM_TOL:
            raise ValueError("POVM elements do not sum to the identity")

    def __getitem__(self, k: int) -> np.ndarray:
        return self.elements[k]

    def completeness_defect(self) -> float:
        return float(np.max(np.abs(sum(self.elements) - np.eye(2))))

    def probability(self, k: int, state: StateVector) -> float:
        a = state.amplitudes
        return float(np.vdot(a, self.elements[k] @ a).real)


def prepare_pair(overlap: float) -> tuple[StateVector, StateVector]:
    """Real qubit states (cos a, +-sin a) with <psi1|psi2> = overlap."""
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap {overlap} outside [0, 1]")
    half = 0.5 * math.acos(overlap)
    c, s = math.cos(half), math.sin(half)
    return StateVector([c, s]), StateVector([c, -s])


def _orthogonal_qubit(state: StateVector) -> StateVector:
    a, b = state.amplitudes
    return StateVector([-np.conj(b), np.conj(a)])


def ancilla_state(q: float, index: int) -> StateVector:
    """sqrt(q)|0> + sqrt(1-q)|index> on the qutrit."""
    amps = np.zeros(3)
    amps[0] = math.sqrt(q)
    amps[index] += math.sqrt(1 - q)
    return StateVector(amps)


def _dilation(
    inputs: tuple[StateVector, StateVector],
    outputs: tuple[StateVector, StateVector],
    seed_order: Sequence[int] | None,
) -> UnitaryOperator:
    """Unitary on 2x3 taking |in_i>|0> to out_i, completed by Gram-Schmidt."""
    psi = np.column_stack([s.amplitudes for s in inputs])
    out = np.column_stack([o.amplitudes for o in outputs])
    overlap = abs(inputs[0].inner(inputs[1]))
    if 1 - overlap**2 > 1e-12:
        cols = out @ np.linalg.inv(psi)
    else:
        # parallel inputs: the orthogonal input direction is free
        extra = complete_isometry([out[:, 0]], 6).matrix[:, 1]
        basis_in = np.column_stack([inputs[0].amplitudes, _orthogonal_qubit(inputs[0]).amplitudes])
        cols = np.column_stack([out[:, 0], extra]) @ basis_in.conj().T
    return complete_isometry(
        [cols[:, 0], cols[:, 1]], 6, positions=_INPUT_SLOTS, seed_order=seed_order, dims=(2, 3)
    )


def bob_output_states(params: ProtocolParams) -> tuple[StateVector, StateVector]:
    """|phi_i>|eta_i>_b, the image of |psi_i>|0>_b."""
    phi = prepare_pair(params.t)
    return (
        tensor_product(phi[0], ancilla_state(params.q1b, 1)),
        tensor_product(phi[1], ancilla_state(params.q2b, 2)),
    )


def build_bob_unitary(params: ProtocolParams, seed_order: Sequence[int] | None = None) -> UnitaryOperator:
    """Joint qubit-ancilla unitary realizing Bob's measurement.

    Bob's successful and failed outcomes leave the qubit in the same state
    |phi_i>, so Charlie receives |phi_i> regardless of Bob's result.
    `seed_order` selects the Gram-Schmidt seed order for the unused block.
    """
    return _dilation(prepare_pair(params.s), bob_output_states(params), seed_order)


def charlie_output_states(
    params: ProtocolParams, failure_rotation: float = 0.0
) -> tuple[StateVector, StateVector]:
    q1, q2 = params.q1c, params.q2c
    weight = math.sqrt(q1 * q2)
    fail_overlap = min(params.t / weight, 1.0) if weight > 0 else 0.0
    chi = prepare_pair(fail_overlap)
    if failure_rotation:
        c, s = math.cos(failure_rotation), math.sin(failure_rotation)
        rot = np.array([[c, -s], [s, c]])
        chi = tuple(StateVector(rot @ x.amplitudes) for x in chi)
    phi = prepare_pair(params.t)
    outs = []
    for i, (q, x, p) in enumerate(zip((q1, q2), chi, phi), start=1):
        amps = np.zeros(6, dtype=complex)
        # flat index = qubit * 3 + ancilla
        amps[[0, 3]] += math.sqrt(q) * x.amplitudes
        amps[[i, 3 + i]] += math.sqrt(1 - q) * p.amplitudes
        outs.append(StateVector(amps, (2, 3)))
    return tuple(outs)


def build_charlie_unitary(
    params: ProtocolParams,
    seed_order: Sequence[int] | None = None,
    failure_rotation: float = 0.0,
) -> UnitaryOperator:
    """Joint unitary for Charlie acting on the qubit Bob forwards.

    Inconclusive outcomes leave the qubit in a pair of failure states with
    overlap t / sqrt(q1c*q2c); at the equality point they coincide with
    (|phi1> + |phi2>)/norm. `failure_rotation` rotates that pair, which
    changes no outcome probability.
    """
    if math.sqrt(params.q1c * params.q2c) < params.t - PARAM_TOL:
        raise ValueError("Charlie's weights violate sqrt(q1c*q2c) >= t")
    return _dilation(
        prepare_pair(params.t), charlie_output_states(params, failure_rotation), seed_order
    )


def detection_operators(u: UnitaryOperator) -> list[np.ndarray]:
    """A_k = <k|U|0> for k = 0, 1, 2 as 2x2 qubit operators."""
    if tuple(u.dims) != (2, 3):
        raise ValueError(f"expected a unitary on dims (2, 3), got {u.dims}")
    blocks = u.matrix.reshape(2, 3, 2, 3)
    return [blocks[:, k, :, 0] for k in range(3)]


def povm_elements(u: UnitaryOperator) -> PovmSet:
    ops = detection_operators(u)
    elems = []
    for a in ops:
        e = a.conj().T @ a
        elems.append(0.5 * (e + e.conj().T))
    return PovmSet(tuple(elems))


def success_prob_bob(params: ProtocolParams) -> float:
    """Average probability that Bob names the state; 1 - s/t at equal weights."""
    return 1.0 - 0.5 * (params.q1b + params.q2b)


def success_prob_charlie(params: ProtocolParams) -> float:
    """Average probability that Charlie names the state; 1 - t at equal weights."""
    return 1.0 - 0.5 * (params.q1c + params.q2c)


def joint_success_prob(params: ProtocolParams) -> float:
    """Probability that both observers identify the prepared state."""
    p = params
    return 0.5 * ((1 - p.q1b) * (1 - p.q1c) + (1 - p.q2b) * (1 - p.q2c))


def joint_state_rho_ab(params: ProtocolParams) -> DensityOperator:
    """Qubit-ancilla state after Bob's unitary, averaged over the two preparations."""
    phi = prepare_pair(params.t)
    eta = (ancilla_state(params.q1b, 1), ancilla_state(params.q2b, 2))
    mat = sum(0.5 * tensor_product(f, e).projector().matrix for f, e in zip(phi, eta))
    return DensityOperator(mat, (2, 3))


def input_mixture(params: ProtocolParams) -> DensityOperator:
    """1/2 sum_i |psi_i><psi_i| (x) |0><0| before Bob acts."""
    anc = StateVector.basis(0, 3)
    mat = sum(0.5 * tensor_product(p, anc).projector().matrix for p in prepare_pair(params.s))
    return DensityOperator(mat, (2, 3))
