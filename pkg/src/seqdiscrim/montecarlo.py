"""Monte Carlo simulation of the full two-observer protocol.

Every trial prepares |psi_i>|0>_b, applies Bob's unitary, samples his
ancilla readout, collapses the qubit, then does the same for Charlie. The
qubit state after each readout depends only on the branch (i, k_b), so the
branch amplitudes are computed once and the trials are sampled against them.

Trials are split into fixed-size blocks, each with its own stream spawned
from the seed, so results do not depend on the worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .protocol import ProtocolParams, build_bob_unitary, build_charlie_unitary, prepare_pair
from .qmath import UnitaryOperator

BLOCK_SIZE = 1 << 16
PROB_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class TrialStats:
    """Outcome counts indexed as ``counts[prepared - 1, bob_outcome, charlie_outcome]``."""

    counts: np.ndarray
    n_trials: int
    seed: int

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (2, 3, 3):
            raise ValueError("counts must have shape (2, 3, 3)")
        if int(counts.sum()) != self.n_trials:
            raise ValueError("counts do not sum to n_trials")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    def __eq__(self, other):
        return (
            isinstance(other, TrialStats)
            and self.n_trials == other.n_trials
            and self.seed == other.seed
            and np.array_equal(self.counts, other.counts)
        )


def _readout(u: UnitaryOperator, qubit: np.ndarray):
    """Ancilla outcome probabilities and normalized post-measurement qubit states."""
    full = u.matrix @ np.kron(qubit, np.eye(3)[0])
    blocks = full.reshape(2, 3)
    probs = np.sum(np.abs(blocks) ** 2, axis=0)
    probs = np.where(probs < PROB_FLOOR, 0.0, probs)
    probs = probs / probs.sum()
    post = []
    for k in range(3):
        v = blocks[:, k]
        norm = np.linalg.norm(v)
        post.append(v / norm if probs[k] > 0 else None)
    return probs, post


@dataclass(frozen=True, eq=False)
class BranchTable:
    """Exact per-branch quantities shared by every trial."""

    bob_probs: np.ndarray  # (2, 3): prepared, k_b
    charlie_probs: np.ndarray  # (2, 3, 3): prepared, k_b, k_c
    after_bob: dict  # (prepared, k_b) -> qubit state handed to Charlie


def branch_table(params: ProtocolParams, bob: UnitaryOperator | None = None,
                 charlie: UnitaryOperator | None = None) -> BranchTable:
    bob = bob or build_bob_unitary(params)
    charlie = charlie or build_charlie_unitary(params)
    bob_probs = np.zeros((2, 3))
    charlie_probs = np.zeros((2, 3, 3))
    after_bob = {}
    for i, psi in enumerate(prepare_pair(params.s), start=1):
        pb, post = _readout(bob, psi.amplitudes)
        bob_probs[i - 1] = pb
        for kb in range(3):
            if post[kb] is None:
                continue
            after_bob[(i, kb)] = post[kb]
            pc, _ = _readout(charlie, post[kb])
            charlie_probs[i - 1, kb] = pc
    return BranchTable(bob_probs, charlie_probs, after_bob)


def _cdf(p: np.ndarray) -> np.ndarray:
    """Cumulative sums along the last axis that are exactly 0 or 1 where a tail is empty."""
    head = np.cumsum(p, axis=-1)
    tail = np.cumsum(p[..., ::-1], axis=-1)[..., ::-1]
    cdf = 1.0 - np.concatenate([tail[..., 1:], np.zeros_like(tail[..., :1])], axis=-1)
    return np.where(head == 0, 0.0, cdf)


def _inverse_cdf(cdf: np.ndarray, u: np.ndarray) -> np.ndarray:
    # cdf rows are indexed per trial; outcome = number of cdf entries <= u
    return np.minimum((u[:, None] >= cdf[:, :2]).sum(axis=1), 2)


def _run_block(table: BranchTable, seed: int, block: int, n: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(block,))))
    u = rng.random((n, 3))
    prepared = (u[:, 0] >= 0.5).astype(np.int64)
    bob_cdf = _cdf(table.bob_probs)[prepared]
    kb = _inverse_cdf(bob_cdf, u[:, 1])
    charlie_cdf = _cdf(table.charlie_probs)[prepared, kb]
    kc = _inverse_cdf(charlie_cdf, u[:, 2])
    flat = np.bincount(prepared * 9 + kb * 3 + kc, minlength=18)
    return flat.reshape(2, 3, 3)


def run_trials(params: ProtocolParams, n_trials: int, seed: int, workers: int = 1,
               table: BranchTable | None = None) -> TrialStats:
    """Simulate `n_trials` runs; identical output for any `workers` value."""
    if n_trials < 1:
        raise ValueError("n_trials must be at least 1")
    table = table or branch_table(params)
    sizes = [BLOCK_SIZE] * (n_trials // BLOCK_SIZE)
    if n_trials % BLOCK_SIZE:
        sizes.append(n_trials % BLOCK_SIZE)
    jobs = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda job: _run_block(table, seed, *job), jobs))
    else:
        parts = [_run_block(table, seed, *job) for job in jobs]
    return TrialStats(np.sum(parts, axis=0), n_trials, seed)


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float


def _estimate(hits: int, n: int) -> Estimate:
    p = hits / n
    return Estimate(p, math.sqrt(p * (1 - p) / n))


def empirical_probs(stats: TrialStats) -> tuple[Estimate, Estimate, Estimate]:
    """Empirical (p_b, p_c, p_bc) with binomial standard errors."""
    if stats.n_trials <= 0:
        raise ValueError("no trials recorded")
    c = stats.counts
    bob = c[0, 1].sum() + c[1, 2].sum()
    charlie = c[0, :, 1].sum() + c[1, :, 2].sum()
    both = c[0, 1, 1] + c[1, 2, 2]
    n = stats.n_trials
    return _estimate(int(bob), n), _estimate(int(charlie), n), _estimate(int(both), n)


def verify_unambiguity(stats: TrialStats) -> tuple[bool, int]:
    """Return (no misidentification, number of misidentified outcomes)."""
    c = stats.counts
    # state 1 named "2" or state 2 named "1", by either observer
    wrong = c[0, 2, :].sum() + c[1, 1, :].sum() + c[0, :, 2].sum() + c[1, :, 1].sum()
    # a trial where both observers err is counted twice above
    wrong -= c[0, 2, 2] + c[1, 1, 1]
    return bool(wrong == 0), int(wrong)
