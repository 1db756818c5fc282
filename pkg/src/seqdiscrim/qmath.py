"""Dense complex linear algebra and entropy helpers for small Hilbert spaces.

Subsystem index 0 is always the leftmost tensor factor (the principal qubit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-10
EIG_ZERO = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=complex)
    arr.setflags(write=False)
    return arr


def _check_dims(dims: Sequence[int], size: int) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if any(d < 1 for d in dims) or int(np.prod(dims)) != size:
        raise ValueError(f"factor dims {dims} do not match dimension {size}")
    return dims


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state with a declared tensor factorization."""

    amplitudes: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        object.__setattr__(self, "amplitudes", amps)
        dims = self.dims or (amps.size,)
        object.__setattr__(self, "dims", _check_dims(dims, amps.size))
        norm = np.vdot(amps, amps).real
        if abs(norm - 1.0) > NORM_TOL * max(1, amps.size):
            raise ValueError(f"state is not normalized (norm^2 = {norm!r})")

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def inner(self, other: StateVector) -> complex:
        """Return <self|other>."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def projector(self) -> DensityOperator:
        return DensityOperator(np.outer(self.amplitudes, self.amplitudes.conj()), self.dims)

    @classmethod
    def basis(cls, index: int, dim: int) -> StateVector:
        amps = np.zeros(dim, dtype=complex)
        amps[index] = 1.0
        return cls(amps)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix."""

    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density operator must be a square matrix")
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", _check_dims(self.dims or (mat.shape[0],), mat.shape[0]))
        if np.max(np.abs(mat - mat.conj().T)) > HERMITIAN_TOL:
            raise ValueError("density operator is not Hermitian")
        if abs(np.trace(mat).real - 1.0) > NORM_TOL * max(1, mat.shape[0]):
            raise ValueError(f"density operator trace is {np.trace(mat).real!r}, not 1")
        if np.linalg.eigvalsh(mat)[0] < -PSD_TOL:
            raise ValueError("density operator has a negative eigenvalue")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True, eq=False)
class UnitaryOperator:
    matrix: np.ndarray
    dims: tuple[int, ...] = ()

    def __post_init__(self):
        mat = _frozen(self.matrix)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "dims", _check_dims(self.dims or (mat.shape[0],), mat.shape[0]))
        if unitarity_defect(mat) > UNITARY_TOL:
            raise ValueError("matrix is not unitary")

    def apply(self, state: StateVector) -> StateVector:
        return StateVector(self.matrix @ state.amplitudes, self.dims)

    def conjugate(self, rho: DensityOperator) -> DensityOperator:
        out = self.matrix @ rho.matrix @ self.matrix.conj().T
        return DensityOperator(0.5 * (out + out.conj().T), self.dims)


def unitarity_defect(u: np.ndarray | UnitaryOperator) -> float:
    """Largest entrywise deviation of U^dagger U from the identity."""
    m = u.matrix if isinstance(u, UnitaryOperator) else np.asarray(u)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


def tensor_product(a, b):
    """Kronecker product of two states or two density operators."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amplitudes, b.amplitudes), a.dims + b.dims)
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        return DensityOperator(np.kron(a.matrix, b.matrix), a.dims + b.dims)
    raise TypeError("tensor_product needs two StateVectors or two DensityOperators")


def _as_density(rho) -> DensityOperator:
    return rho.projector() if isinstance(rho, StateVector) else rho


def partial_trace(rho, keep: int | Sequence[int]) -> DensityOperator:
    """Reduce `rho` onto the subsystem(s) listed in `keep`.

    Accepts a StateVector as well; kept subsystems retain their original order.
    """
    rho = _as_density(rho)
    n = len(rho.dims)
    keep = sorted({keep} if isinstance(keep, (int, np.integer)) else set(keep))
    if not keep or any(k < 0 or k >= n for k in keep):
        raise IndexError(f"subsystem index out of range for dims {rho.dims}")
    traced = [k for k in range(n) if k not in keep]
    tensor = rho.matrix.reshape(rho.dims + rho.dims)
    # trace the highest axes first so lower axis numbers stay valid
    for offset, k in enumerate(sorted(traced, reverse=True)):
        m = n - offset
        tensor = np.trace(tensor, axis1=k, axis2=k + m)
    kept_dims = tuple(rho.dims[k] for k in keep)
    d = int(np.prod(kept_dims))
    out = tensor.reshape(d, d)
    return DensityOperator(0.5 * (out + out.conj().T), kept_dims)


def shannon_entropy(probs) -> float:
    p = np.asarray(probs, dtype=float)
    p = p[p > EIG_ZERO]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; eigenvalues below 1e-12 count as zero."""
    return shannon_entropy(_as_density(rho).eigenvalues())


def binary_entropy(p) -> np.ndarray | float:
    p = np.clip(np.asarray(p, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = -p * np.log2(p) - (1 - p) * np.log2(1 - p)
    out = np.where((p <= 0) | (p >= 1), 0.0, terms)
    return float(out) if out.ndim == 0 else out


def tangle_entropy(x) -> np.ndarray | float:
    """Binary entropy of (1 + sqrt(1 - x)) / 2 for a tangle value x in [0, 1].

    Values within 1e-12 outside the interval are clamped; anything further
    out raises ValueError. Works elementwise on arrays.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -NORM_TOL) or np.any(x > 1 + NORM_TOL):
        raise ValueError("tangle must lie in [0, 1]")
    x = np.clip(x, 0.0, 1.0)
    return binary_entropy((1 + np.sqrt(1 - x)) / 2)


def partial_transpose(rho: DensityOperator, subsystem: int = 1) -> np.ndarray:
    if len(rho.dims) != 2:
        raise ValueError("partial transpose needs a bipartite operator")
    da, db = rho.dims
    t = rho.matrix.reshape(da, db, da, db)
    if subsystem == 0:
        t = t.transpose(2, 1, 0, 3)
    elif subsystem == 1:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise IndexError("subsystem must be 0 or 1")
    return t.reshape(da * db, da * db)


def partial_transpose_negativity(rho: DensityOperator, subsystem: int = 1) -> float:
    """Sum of |negative eigenvalues| of the partial transpose.

    Restricted to 2x2 and 2x3 splits, where a zero value certifies separability.
    """
    if sorted(rho.dims) not in ([2, 2], [2, 3]):
        raise ValueError(f"negativity test supports 2x2 and 2x3 only, got {rho.dims}")
    eig = np.linalg.eigvalsh(partial_transpose(rho, subsystem))
    return float(-np.sum(eig[eig < 0]))


def complete_isometry(
    columns: Sequence[StateVector | np.ndarray],
    dim: int,
    positions: Sequence[int] | None = None,
    seed_order: Sequence[int] | None = None,
    dims: Sequence[int] = (),
) -> UnitaryOperator:
    """Extend orthonormal columns to a unitary by modified Gram-Schmidt.

    The supplied columns land at `positions` (default: the first columns).
    The remaining columns are built from standard basis vectors tried in
    `seed_order` (default ascending); candidates with residual norm below
    1e-8 are dropped.
    """
    cols = [np.asarray(c.amplitudes if isinstance(c, StateVector) else c, dtype=complex) for c in columns]
    if any(c.shape != (dim,) for c in cols):
        raise ValueError("column length does not match dimension")
    k = len(cols)
    if k:
        gram = np.array([[np.vdot(a, b) for b in cols] for a in cols])
        if np.max(np.abs(gram - np.eye(k))) > 1e-10:
            raise ValueError("supplied columns are not orthonormal")
    positions = list(range(k)) if positions is None else list(positions)
    if len(positions) != k or len(set(positions)) != k:
        raise ValueError("positions must be distinct and match the column count")

    basis = list(cols)
    for idx in (range(dim) if seed_order is None else seed_order):
        if len(basis) == dim:
            break
        v = np.zeros(dim, dtype=complex)
        v[idx] = 1.0
        for b in basis:
            v = v - np.vdot(b, v) * b
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            continue
        v = v / norm
        # second pass keeps orthogonality at machine precision
        for b in basis:
            v = v - np.vdot(b, v) * b
        basis.append(v / np.linalg.norm(v))
    if len(basis) != dim:
        raise ValueError("seed vectors do not span the space")

    free = [p for p in range(dim) if p not in positions]
    mat = np.empty((dim, dim), dtype=complex)
    for p, c in zip(positions, basis[:k]):
        mat[:, p] = c
    for p, c in zip(free, basis[k:]):
        mat[:, p] = c
    return UnitaryOperator(mat, dims)
