"""Maximum joint success probability of the two observers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._search import coordinate_refine
from .protocol import ProtocolParams, joint_success_prob

SYMMETRIC = "symmetric"
SYMMETRY_BROKEN = "symmetry-broken"


def regime_boundary() -> float:
    """Overlap 3 - 2*sqrt(2) separating the symmetric and symmetry-broken optima."""
    return 3 - 2 * math.sqrt(2)


@dataclass(frozen=True)
class OptimumReport:
    s: float
    pbc_max: float
    argmax: ProtocolParams
    regime: str
    method: str
    # other grid-level maximizers (numeric search only), canonical ordering
    ties: tuple[ProtocolParams, ...] = field(default=(), compare=False)


def symmetric_branch(s: float) -> float:
    return (1 - math.sqrt(s)) ** 2


def broken_branch(s: float) -> float:
    return 0.5 * (1 - s) ** 2


def pbc_closed_max(s: float) -> OptimumReport:
    """Closed-form optimum; both branches use t = sqrt(s)."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"overlap {s} outside [0, 1]")
    t = math.sqrt(s)
    if s < regime_boundary():
        params = ProtocolParams(s=s, t=t, q1b=t, q2b=t, q1c=t, q2c=t)
        return OptimumReport(s, symmetric_branch(s), params, SYMMETRIC, "closed-form")
    params = ProtocolParams(s=s, t=t, q1b=s, q2b=1.0, q1c=s, q2c=1.0)
    return OptimumReport(s, broken_branch(s), params, SYMMETRY_BROKEN, "closed-form")


def _decode(u, s):
    """Map the unit cube onto (t, q1b, q2b, q1c, q2c) with both constraints tight.

    Bob's equality fixes q2b = s^2 / (t^2 q1b). Charlie's success falls with
    each weight, so the inequality sqrt(q1c q2c) >= t is taken tight:
    q2c = t^2 / q1c with q1c in [t^2, 1].
    """
    u = np.asarray(u, dtype=float)
    t = s + u[..., 0] * (1 - s)
    with np.errstate(divide="ignore", invalid="ignore"):
        lo_b = np.where(t > 0, (s / t) ** 2, 0.0)
        q1b = lo_b + u[..., 1] * (1 - lo_b)
        q2b = np.where(q1b > 0, np.where(t > 0, (s / t) ** 2, 0.0) / q1b, 0.0)
        lo_c = t**2
        q1c = lo_c + u[..., 2] * (1 - lo_c)
        q2c = np.where(q1c > 0, t**2 / q1c, 0.0)
    return t, q1b, np.clip(q2b, 0, 1), q1c, np.clip(q2c, 0, 1)


def _objective(u, s):
    t, q1b, q2b, q1c, q2c = _decode(u, s)
    return 0.5 * ((1 - q1b) * (1 - q1c) + (1 - q2b) * (1 - q2c))


def _params(u, s) -> ProtocolParams:
    t, q1b, q2b, q1c, q2c = (float(v) for v in _decode(u, s))
    p = ProtocolParams(s=s, t=t, q1b=q1b, q2b=q2b, q1c=q1c, q2c=q2c)
    return p.swapped() if p.q1b > p.q2b else p


def pbc_numeric_max(s: float, grid_density: int = 64, refine_iters: int = 200, tol: float = 1e-9) -> OptimumReport:
    """Brute-force optimum by a 3-D grid over (t, q1b, q1c) plus golden-section refinement.

    Independent of the closed form: nothing about t = sqrt(s) is assumed.
    """
    if not 0.0 <= s < 1.0:
        raise ValueError(f"overlap {s} outside [0, 1)")
    axis = np.linspace(0.0, 1.0, grid_density)
    cube = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    values = _objective(cube, s)
    best = values.max()
    tied = np.argwhere(values >= best - 1e-12)

    step = axis[1] - axis[0]
    x, neg, _ = coordinate_refine(
        lambda u: -float(_objective(u, s)),
        cube[tuple(tied[0])],
        lower=(0, 0, 0),
        upper=(1, 1, 1),
        step=(step,) * 3,
        passes=refine_iters,
        tol=tol,
    )
    pbc = -neg
    if pbc < best:
        x, pbc = cube[tuple(tied[0])], float(best)
    argmax = _params(x, s)

    ties = []
    for idx in tied[1:]:
        p = _params(cube[tuple(idx)], s)
        if p not in ties:
            ties.append(p)
    regime = SYMMETRIC if abs(argmax.q1b - argmax.q2b) < 1e-3 and abs(argmax.q1c - argmax.q2c) < 1e-3 else SYMMETRY_BROKEN
    return OptimumReport(s, float(joint_success_prob(argmax)), argmax, regime, "numeric", tuple(ties))
