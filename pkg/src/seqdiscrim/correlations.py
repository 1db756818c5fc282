"""Quantum correlations of Bob's qubit-ancilla state.

Closed forms go through the tangles of the three-party purification; the
definition-based routines (measurement search, Wootters concurrence) are
independent checks on them. "Right" discord measures the ancilla B, "left"
discord measures the qubit A. All entropies are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from ._search import coordinate_refine
from .protocol import ProtocolParams, ancilla_state, joint_state_rho_ab, prepare_pair
from .qmath import (
    DensityOperator,
    StateVector,
    partial_trace,
    tangle_entropy,
    von_neumann_entropy,
)

UNDEFINED_TOL = 1e-12


def _check_overlaps(r, t):
    r = np.asarray(r, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any((r < 0) | (r > 1) | np.isnan(r)) or np.any((t < 0) | (t > 1) | np.isnan(t)):
        raise ValueError("overlaps r and t must lie in [0, 1]")
    return r, t


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class TangleSet:
    tau_abd: float
    tau_a: float
    tau_b: float
    tau_d: float


def tangles(r: float, t: float) -> TangleSet:
    """Three-tangle and one-versus-rest tangles of the purification."""
    r, t = _check_overlaps(r, t)
    return TangleSet(
        tau_abd=_scalar((1 - t**2) * (1 - r**2)),
        tau_a=_scalar(1 - t**2),
        tau_b=_scalar(1 - r**2),
        tau_d=_scalar(1 - t**2 * r**2),
    )


def right_discord_closed(r, t):
    """Discord with the ancilla measured; vectorized over r and t."""
    r, t = _check_overlaps(r, t)
    value = (
        tangle_entropy(1 - r**2)
        - tangle_entropy(1 - t**2 * r**2)
        + tangle_entropy(np.clip((1 - t**2) * r**2, 0.0, 1.0))
    )
    return _scalar(np.maximum(value, 0.0))


def left_discord_closed(r, t):
    """Discord with the qubit measured: the right discord with r and t swapped."""
    return right_discord_closed(t, r)


def relative_difference(r: float, t: float) -> Optional[float]:
    """(left - right) / (left + right), or None where both discords vanish."""
    left = left_discord_closed(r, t)
    right = right_discord_closed(r, t)
    total = left + right
    if total <= UNDEFINED_TOL:
        return None
    return (left - right) / total


def symmetrized_discord(r, t):
    return _scalar(np.sqrt(left_discord_closed(r, t) * right_discord_closed(r, t)))


@dataclass(frozen=True)
class DiscordReport:
    r: float
    t: float
    d_right: float
    d_left: float
    d_delta: Optional[float]
    d_symm: float
    method: str


def discord_report(r: float, t: float, method: str = "closed-form") -> DiscordReport:
    """Left/right discord summary at one (r, t) point.

    ``method="oracle"`` computes both discords by explicit measurement search
    instead of the closed forms.
    """
    if method == "closed-form":
        d_right = float(right_discord_closed(r, t))
        d_left = float(left_discord_closed(r, t))
    elif method == "oracle":
        rho = rho_ab(r, t)
        d_right = discord_by_definition(rho, "B").value
        d_left = discord_by_definition(rho, "A").value
    else:
        raise ValueError(f"unknown method {method!r}")
    total = d_left + d_right
    d_delta = (d_left - d_right) / total if total > UNDEFINED_TOL else None
    return DiscordReport(
        r=float(r),
        t=float(t),
        d_right=d_right,
        d_left=d_left,
        d_delta=d_delta,
        d_symm=math.sqrt(max(d_left, 0.0) * max(d_right, 0.0)),
        method=method,
    )


def rho_ab(r: float, t: float) -> DensityOperator:
    """Bob's qubit-ancilla state at equal weights, parametrized by the two overlaps."""
    r, t = _check_overlaps(r, t)
    return joint_state_rho_ab(ProtocolParams.from_overlaps(float(r), float(t)))


def purification_tripartite(r: float, t: float) -> StateVector:
    """(|phi1>|eta1>|0>_d + |phi2>|eta2>|1>_d) / sqrt(2) on dims (2, 3, 2)."""
    r, t = _check_overlaps(r, t)
    phi = prepare_pair(float(t))
    eta = (ancilla_state(float(r), 1), ancilla_state(float(r), 2))
    amps = sum(
        np.kron(np.kron(f.amplitudes, e.amplitudes), np.eye(2)[d])
        for d, (f, e) in enumerate(zip(phi, eta))
    ) / math.sqrt(2)
    return StateVector(amps, (2, 3, 2))


def mutual_information(rho: DensityOperator) -> float:
    if len(rho.dims) != 2:
        raise ValueError("mutual information needs a bipartite state")
    value = (
        von_neumann_entropy(partial_trace(rho, 0))
        + von_neumann_entropy(partial_trace(rho, 1))
        - von_neumann_entropy(rho)
    )
    return max(value, 0.0) if value > -1e-10 else value


_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)


def concurrence_ef(rho: DensityOperator) -> tuple[float, float]:
    """Wootters concurrence and entanglement of formation (bits) of a two-qubit state."""
    m = rho.matrix
    if m.shape != (4, 4):
        raise ValueError("concurrence is defined here for two-qubit states only")
    flipped = _YY @ m.conj() @ _YY
    w, v = np.linalg.eigh(m)
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T
    eig = np.linalg.eigvalsh(root @ flipped @ root)
    # rounding noise of order 1e-16 would otherwise turn into 1e-8 after the square root
    eig = np.where(eig > 1e-13, eig, 0.0)
    lam = np.sort(np.sqrt(eig))[::-1]
    c = max(0.0, lam[0] - lam[1] - lam[2] - lam[3])
    c = min(c, 1.0)
    return c, float(tangle_entropy(c**2))


# --- definition-based discord -------------------------------------------------


class OracleResult(NamedTuple):
    value: float
    converged: bool
    angles: tuple[float, float]


def _qubit_basis(theta, phi, e1, e2):
    """Orthonormal pair (m, m_perp) in span{e1, e2} at Bloch angles; batched."""
    c = np.cos(theta / 2)[..., None]
    s = np.sin(theta / 2)[..., None]
    ph = np.exp(1j * phi)[..., None]
    m = c * e1 + ph * s * e2
    m_perp = s * e1 - ph * c * e2
    return m, m_perp


def _conditional_entropy(rho4: np.ndarray, vecs: np.ndarray, side: str) -> np.ndarray:
    """sum_k p_k S(rho_{other|k}) for rank-1 measurements given as rows of `vecs`.

    `vecs` has shape (..., K, d_measured). Returns shape (...).
    """
    if side == "A":
        cond = np.einsum("...ka,abcd,...kc->...kbd", vecs.conj(), rho4, vecs)
    else:
        cond = np.einsum("...kb,abcd,...kd->...kac", vecs.conj(), rho4, vecs)
    cond = 0.5 * (cond + np.swapaxes(cond.conj(), -1, -2))
    lam = np.clip(np.linalg.eigvalsh(cond), 0.0, None)
    p = lam.sum(axis=-1)
    with np.errstate(divide="ignore", invalid="ignore"):
        joint = np.where(lam > 1e-12, -lam * np.log2(lam), 0.0).sum(axis=-1)
        marg = np.where(p > 1e-12, p * np.log2(p), 0.0)
    return (joint + marg).sum(axis=-1)


def discord_by_definition(
    rho: DensityOperator,
    measured_side: str = "B",
    grid: int = 64,
    refine_passes: int = 100,
    tol: float = 1e-6,
) -> OracleResult:
    """Discord as mutual information minus the best one-sided classical correlation.

    Rank-1 projective measurements on the measured side are scanned on a
    `grid` x `grid` mesh of Bloch angles and the best cell is refined by
    coordinate-wise golden-section search. On the qutrit side the
    projectors live in the two-dimensional support of the reduced state and
    the kernel direction is the third (null-probability) outcome.
    """
    if tuple(rho.dims) != (2, 3):
        raise ValueError("expected a qubit-qutrit state on dims (2, 3)")
    if measured_side not in ("A", "B"):
        raise ValueError("measured_side must be 'A' or 'B'")
    rho4 = rho.matrix.reshape(2, 3, 2, 3)
    unmeasured = 1 if measured_side == "A" else 0

    if measured_side == "A":
        e1, e2 = np.eye(2, dtype=complex)
        extra = None
    else:
        _, vecs = np.linalg.eigh(partial_trace(rho, 1).matrix)
        # eigh sorts ascending: the top two span the support
        e1, e2, extra = vecs[:, 2], vecs[:, 1], vecs[:, 0]

    def measurement(theta, phi):
        m, mp = _qubit_basis(np.asarray(theta), np.asarray(phi), e1, e2)
        rows = [m, mp]
        if extra is not None:
            rows.append(np.broadcast_to(extra, m.shape))
        return np.stack(rows, axis=-2)

    thetas = np.linspace(0.0, np.pi, grid)
    phis = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
    th, ph = np.meshgrid(thetas, phis, indexing="ij")
    cond = _conditional_entropy(rho4, measurement(th, ph), measured_side)
    i, j = np.unravel_index(np.argmin(cond), cond.shape)

    def objective(x):
        return float(_conditional_entropy(rho4, measurement(x[0], x[1]), measured_side))

    step = (thetas[1] - thetas[0], phis[1] - phis[0])
    x, best, converged = coordinate_refine(
        objective,
        (thetas[i], phis[j]),
        lower=(0.0, -2 * np.pi),
        upper=(np.pi, 4 * np.pi),
        step=step,
        passes=refine_passes,
        tol=tol,
    )
    best = min(best, float(cond[i, j]))
    s_unmeasured = von_neumann_entropy(partial_trace(rho, unmeasured))
    classical = s_unmeasured - best
    value = mutual_information(rho) - classical
    return OracleResult(float(value), converged, (float(x[0]), float(x[1])))
