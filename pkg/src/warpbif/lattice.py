"""Unimodular lattice bases for unit-volume flat tori and their Laplace spectra.

A flat metric of unit volume on a k-torus is encoded by a basis matrix B with
|det B| = 1 (columns are the lattice generators).  Laplace eigenvalues are
4 pi^2 ||w||^2 over vectors w of the dual lattice, whose basis is the inverse
transpose of B.  Enumeration below a cutoff uses the Fincke-Pohst recursion on
the Cholesky factor of the dual Gram matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffTooLarge, DegeneratePath, SingularBasis

# Relative tolerance below which two enumerated eigenvalues count as one.
MERGE_REL_TOL = 1e-9

# Unimodularity slack accepted at construction.
DET_TOL = 1e-12

# Default ceiling on the number of lattice points one enumeration may visit.
MAX_SPECTRUM_POINTS = 10**6

FOUR_PI_SQ = 4.0 * math.pi**2


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class LatticeBasis:
    """Unimodular k x k basis matrix; column j is the j-th lattice generator."""

    dim: int
    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        if cols.shape != (self.dim, self.dim):
            raise SingularBasis(f"basis must be {self.dim}x{self.dim}, got {cols.shape}")
        det = float(np.linalg.det(cols))
        if abs(det) < 1e-14:
            raise SingularBasis("basis columns are linearly dependent")
        if abs(abs(det) - 1.0) > DET_TOL:
            raise SingularBasis(f"basis is not unimodular: |det| = {abs(det):.17g}")
        object.__setattr__(self, "columns", _freeze(cols))

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.columns, axis=0)


@dataclass(frozen=True)
class DualBasis:
    """Inverse-transpose basis; column j generates the dual lattice."""

    columns: np.ndarray

    def __post_init__(self):
        cols = np.asarray(self.columns, dtype=float)
        det = float(np.linalg.det(cols))
        if abs(abs(det) - 1.0) > DET_TOL:
            raise SingularBasis(f"dual basis is not unimodular: |det| = {abs(det):.17g}")
        object.__setattr__(self, "columns", _freeze(cols))

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    def column_norms(self) -> np.ndarray:
        return np.linalg.norm(self.columns, axis=0)


@dataclass(frozen=True)
class SpectrumSlice:
    """Sorted eigenvalues with multiplicities, complete up to ``cutoff``."""

    cutoff: float
    values: np.ndarray
    mults: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _freeze(self.values))
        m = np.ascontiguousarray(self.mults, dtype=int)
        m.flags.writeable = False
        object.__setattr__(self, "mults", m)

    @property
    def entries(self) -> list[tuple[float, int]]:
        return [(float(v), int(m)) for v, m in zip(self.values, self.mults)]

    @property
    def total_count(self) -> int:
        return int(self.mults.sum())

    def flatten(self) -> np.ndarray:
        """Eigenvalues repeated by multiplicity, ascending."""
        return np.repeat(self.values, self.mults)


def merge_eigenvalues(raw: np.ndarray, rel_tol: float = MERGE_REL_TOL):
    """Group a raw eigenvalue multiset into (values, mults, group index arrays).

    Consecutive sorted values closer than ``rel_tol`` (relative) fall into one
    bin; the bin value is the mean of its members.  Returns the sorted group
    values, group sizes, and for each group the indices into the sorted input.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.size == 0:
        return np.empty(0), np.empty(0, dtype=int), []
    order = np.argsort(raw, kind="stable")
    s = raw[order]
    groups: list[list[int]] = [[0]]
    for i in range(1, s.size):
        gap_tol = rel_tol * max(abs(s[i]), abs(s[i - 1]))
        if s[i] - s[i - 1] > gap_tol:
            groups.append([i])
        else:
            groups[-1].append(i)
    values = np.array([s[g].mean() for g in groups])
    mults = np.array([len(g) for g in groups], dtype=int)
    members = [order[g] for g in groups]
    return values, mults, members


def normalize_unimodular(matrix: np.ndarray) -> LatticeBasis:
    """Rescale a nonsingular matrix to unit determinant (in absolute value)."""
    cols = np.asarray(matrix, dtype=float)
    if cols.ndim != 2 or cols.shape[0] != cols.shape[1]:
        raise SingularBasis(f"expected a square matrix, got shape {cols.shape}")
    k = cols.shape[0]
    det = float(np.linalg.det(cols))
    if abs(det) < 1e-14:
        raise SingularBasis(f"cannot normalize a singular matrix (|det| = {abs(det):.3g})")
    scaled = cols / abs(det) ** (1.0 / k)
    return LatticeBasis(dim=k, columns=scaled)


def dual_basis(basis: LatticeBasis) -> DualBasis:
    """Inverse transpose of the basis matrix."""
    w = np.linalg.inv(basis.columns.T)
    return DualBasis(columns=w)


def _gram_points_within(gram: np.ndarray, radius_sq: float, max_points: int):
    """Yield all integer vectors n with n^T gram n <= radius_sq.

    Fincke-Pohst: with gram = R^T R (R upper triangular from the Cholesky
    factor), the quadratic form is sum_i (R_ii n_i + s_i)^2 where s_i depends
    only on coordinates already fixed, so each level admits an exact interval
    of admissible integers.  Recursion runs from the last coordinate down.
    """
    k = gram.shape[0]
    if radius_sq < 0.0:
        return
    try:
        lower = np.linalg.cholesky(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularBasis("dual Gram matrix is not positive definite") from exc
    r = lower.T  # upper triangular, r[i, i] > 0
    n = np.zeros(k, dtype=int)
    count = 0

    def descend(level: int, remaining: float):
        nonlocal count
        # sum over fixed coordinates j > level of r[level, j] * n[j]
        shift = float(r[level, level + 1 :] @ n[level + 1 :])
        half_width = math.sqrt(max(remaining, 0.0))
        lo = math.ceil((-half_width - shift) / r[level, level] - 1e-12)
        hi = math.floor((half_width - shift) / r[level, level] + 1e-12)
        for ni in range(lo, hi + 1):
            n[level] = ni
            term = (r[level, level] * ni + shift) ** 2
            if term > remaining + 1e-12 * max(1.0, remaining):
                continue
            if level == 0:
                count += 1
                if count > max_points:
                    raise CutoffTooLarge(
                        f"enumeration exceeds {max_points} lattice points; "
                        "lower the cutoff or raise max_points"
                    )
                yield n.copy()
            else:
                yield from descend(level - 1, remaining - term)
        n[level] = 0

    yield from descend(k - 1, radius_sq)


def enumerate_eigenvalues(
    basis: LatticeBasis,
    cutoff: float,
    max_points: int = MAX_SPECTRUM_POINTS,
) -> SpectrumSlice:
    """All torus Laplace eigenvalues 4 pi^2 ||W n||^2 <= cutoff, with multiplicity.

    W is the dual basis; n runs over all integer vectors including zero, so the
    slice always starts with eigenvalue 0 of multiplicity 1.  Coinciding values
    (within ``MERGE_REL_TOL`` relative) are merged and their lattice points
    counted together.
    """
    if cutoff < 0:
        raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
    w = dual_basis(basis).columns
    gram = w.T @ w
    # Slightly inflated search radius so boundary vectors survive Cholesky
    # round-off; membership is then decided by the exact eigenvalue formula.
    radius_sq = (cutoff / FOUR_PI_SQ) * (1.0 + 1e-9) + 1e-30
    raw = []
    for n in _gram_points_within(gram, radius_sq, max_points):
        lam = FOUR_PI_SQ * float(np.sum((w @ n) ** 2))
        if lam <= cutoff:
            raw.append(lam)
    values, mults, _ = merge_eigenvalues(np.asarray(raw))
    return SpectrumSlice(cutoff=float(cutoff), values=values, mults=mults)


def path_basis(basis: LatticeBasis, t: float) -> LatticeBasis:
    """Unimodular deformation: first column scaled by t^(k-1), the rest by 1/t.

    The determinant is unchanged for every t > 0, and the dual picks up the
    reciprocal scalings, so the first dual column shrinks like t^-(k-1).
    """
    if basis.dim == 1:
        raise DegeneratePath("k = 1 admits a single unit-volume flat metric")
    if not t > 0:
        raise ValueError(f"path parameter must be positive, got {t}")
    k = basis.dim
    scales = np.full(k, 1.0 / t)
    scales[0] = t ** (k - 1)
    return LatticeBasis(dim=k, columns=basis.columns * scales)


def shortest_dual_norm(basis: LatticeBasis) -> float:
    """Norm of the shortest nonzero dual lattice vector.

    Found by enumerating the ball whose radius is the smallest dual column
    norm (always attained by a lattice vector, so the ball is guaranteed to
    contain the minimizer); not merely the smallest column.
    """
    w = dual_basis(basis).columns
    gram = w.T @ w
    radius = float(np.min(np.linalg.norm(w, axis=0)))
    best_sq = radius * radius
    for n in _gram_points_within(gram, best_sq * (1.0 + 1e-9), MAX_SPECTRUM_POINTS):
        if not np.any(n):
            continue
        best_sq = min(best_sq, float(np.sum((w @ n) ** 2)))
    return math.sqrt(best_sq)


def basis_to_json(basis: LatticeBasis) -> dict:
    """JSON payload with the basis stored as a list of column vectors."""
    return {"basis": [list(map(float, basis.columns[:, j])) for j in range(basis.dim)]}


def basis_from_json(payload: dict) -> LatticeBasis:
    cols = np.asarray(payload["basis"], dtype=float).T
    return normalize_unimodular(cols)


def spectrum_to_json(slice_: SpectrumSlice) -> list[dict]:
    return [{"lambda": float(v), "mult": int(m)} for v, m in zip(slice_.values, slice_.mults)]
