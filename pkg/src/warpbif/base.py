"""Base manifolds with positive scalar curvature and their quadratic forms.

Two families are supported: analytic bases with closed-form spectra (round
spheres and their products with flat tori) and discretized rotationally
symmetric 2-spheres given by a profile h on a uniform colatitude grid.  The
discretized family carries piecewise-linear finite element assembly of the
weighted stiffness and mass forms used by every downstream eigenproblem.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidEps, ModeTooLarge
from .lattice import (
    LatticeBasis,
    SpectrumSlice,
    enumerate_eigenvalues,
    merge_eigenvalues,
    _freeze,
)

# Azimuthal Fourier modes beyond this are refused outright.
MAX_FOURIER_MODE = 256


@dataclass(frozen=True)
class AnalyticBase:
    """Closed manifold with constant scalar curvature and closed-form spectrum."""

    dim: int
    volume: float
    scalar_curvature: float
    spectrum_fn: Callable[[float], tuple[np.ndarray, np.ndarray]] = field(repr=False)
    label: str = "analytic"

    def spectrum(self, cutoff: float) -> SpectrumSlice:
        """Laplace eigenvalues up to ``cutoff`` with multiplicities."""
        if cutoff < 0:
            raise ValueError(f"cutoff must be nonnegative, got {cutoff}")
        values, mults = self.spectrum_fn(float(cutoff))
        return SpectrumSlice(cutoff=float(cutoff), values=values, mults=mults)


def _sphere_multiplicity(m: int, ell: int) -> int:
    """Dimension of the degree-ell spherical harmonic space on the m-sphere."""
    return math.comb(m + ell, ell) - (math.comb(m + ell - 2, ell - 2) if ell >= 2 else 0)


def unit_sphere_volume(m: int) -> float:
    return 2.0 * math.pi ** ((m + 1) / 2.0) / math.gamma((m + 1) / 2.0)


def round_sphere(m: int, radius: float) -> AnalyticBase:
    """Round m-sphere: eigenvalues l(l+m-1)/radius^2, harmonic multiplicities."""
    if m < 2:
        raise ValueError(f"sphere dimension must be >= 2, got {m}")
    if not radius > 0:
        raise ValueError(f"radius must be positive, got {radius}")
    r2 = radius * radius

    def gen(cutoff: float):
        values, mults = [], []
        ell = 0
        while ell * (ell + m - 1) / r2 <= cutoff:
            values.append(ell * (ell + m - 1) / r2)
            mults.append(_sphere_multiplicity(m, ell))
            ell += 1
        return np.asarray(values, dtype=float), np.asarray(mults, dtype=int)

    return AnalyticBase(
        dim=m,
        volume=unit_sphere_volume(m) * radius**m,
        scalar_curvature=m * (m - 1) / r2,
        spectrum_fn=gen,
        label=f"sphere(m={m}, radius={radius:.17g})",
    )


def sphere_with_volume(m: int, volume: float) -> AnalyticBase:
    """Round m-sphere rescaled to a prescribed volume."""
    if not volume > 0:
        raise ValueError(f"volume must be positive, got {volume}")
    radius = (volume / unit_sphere_volume(m)) ** (1.0 / m)
    return round_sphere(m, radius)


def product_with_flat_torus(
    base: AnalyticBase, torus: LatticeBasis, torus_volume: float
) -> AnalyticBase:
    """Riemannian product of a constant-curvature base with a flat torus.

    The unimodular lattice is rescaled uniformly to the requested volume; the
    product spectrum is every sum of a base eigenvalue and a torus eigenvalue,
    with multiplicities multiplying.  Scalar curvature is unchanged since the
    flat factor contributes none.
    """
    if not torus_volume > 0:
        raise ValueError(f"torus volume must be positive, got {torus_volume}")
    k = torus.dim
    scale_sq = torus_volume ** (2.0 / k)  # lengths scale by volume^(1/k)

    def gen(cutoff: float):
        base_slice = base.spectrum(cutoff)
        torus_slice = enumerate_eigenvalues(torus, cutoff * scale_sq)
        raw, raw_mult = [], []
        for a, ma in zip(base_slice.values, base_slice.mults):
            for b, mb in zip(torus_slice.values, torus_slice.mults):
                s = a + b / scale_sq
                if s <= cutoff:
                    raw.append(s)
                    raw_mult.append(ma * mb)
        values, _, members = merge_eigenvalues(np.asarray(raw))
        raw_mult = np.asarray(raw_mult, dtype=int)
        mults = np.array([int(raw_mult[idx].sum()) for idx in members], dtype=int)
        return values, mults

    return AnalyticBase(
        dim=base.dim + k,
        volume=base.volume * torus_volume,
        scalar_curvature=base.scalar_curvature,
        spectrum_fn=gen,
        label=f"{base.label} x torus(vol={torus_volume:.17g})",
    )


@dataclass(frozen=True)
class SLBase:
    """Rotationally symmetric 2-sphere sampled on a uniform colatitude grid.

    The metric is d(theta)^2 + h(theta)^2 d(phi)^2 with h vanishing at both
    poles.  ``weights`` are trapezoid weights for integrals against h d(theta);
    the pole nodes carry zero weight because h vanishes there.
    """

    theta: np.ndarray
    h: np.ndarray
    curvature: np.ndarray
    weights: np.ndarray
    dim: int = 2

    def __post_init__(self):
        theta = np.asarray(self.theta, dtype=float)
        h = np.asarray(self.h, dtype=float)
        r = np.asarray(self.curvature, dtype=float)
        if not (theta.shape == h.shape == r.shape == np.asarray(self.weights).shape):
            raise ValueError("theta, h, curvature, weights must share one shape")
        if theta[0] != 0.0 or abs(theta[-1] - math.pi) > 1e-12:
            raise ValueError("grid must span [0, pi]")
        if h[0] != 0.0 or h[-1] != 0.0:
            raise ValueError("profile must vanish at both poles")
        if np.any(h[1:-1] <= 0.0):
            raise ValueError("profile must be positive on interior nodes")
        if np.any(r <= 0.0):
            raise InvalidEps("curvature must be positive everywhere on the grid")
        for name in ("theta", "h", "curvature", "weights"):
            object.__setattr__(self, name, _freeze(np.asarray(getattr(self, name), dtype=float)))

    @property
    def n_cells(self) -> int:
        return self.theta.size - 1

    @property
    def volume(self) -> float:
        return 2.0 * math.pi * float(self.weights.sum())

    def integrate(self, nodal: np.ndarray) -> float:
        """Integral of a nodal function over the surface, d(area) = h d(theta) d(phi)."""
        return 2.0 * math.pi * float(self.weights @ np.asarray(nodal, dtype=float))

    def to_json(self) -> dict:
        return {
            "theta": [float(x) for x in self.theta],
            "h": [float(x) for x in self.h],
            "R": [float(x) for x in self.curvature],
        }


def oblate_sphere(eps: float, n_cells: int) -> SLBase:
    """Profile sin(theta) (1 - eps sin^2 theta) with its exact curvature samples.

    Positive curvature requires eps < 1/3 (and eps > -1/6 at the poles); the
    constructed grid is checked rather than trusting the bound.
    """
    if n_cells < 16:
        raise ValueError(f"need at least 16 cells, got {n_cells}")
    if eps >= 1.0:
        raise InvalidEps(f"eps = {eps} makes the profile degenerate")
    theta = np.linspace(0.0, math.pi, n_cells + 1)
    s2 = np.sin(theta) ** 2
    h = np.sin(theta) * (1.0 - eps * s2)
    h[0] = 0.0
    h[-1] = 0.0
    gauss = (1.0 + 6.0 * eps - 9.0 * eps * s2) / (1.0 - eps * s2)
    if np.any(gauss <= 0.0):
        raise InvalidEps(f"eps = {eps} gives non-positive curvature on the grid")
    dtheta = theta[1] - theta[0]
    weights = h * dtheta
    weights[0] = 0.0
    weights[-1] = 0.0
    return SLBase(theta=theta, h=h, curvature=2.0 * gauss, weights=weights)


BaseManifold = AnalyticBase | SLBase


@dataclass(frozen=True)
class WeightedForms:
    """Stiffness/mass pair for one azimuthal mode, tridiagonal and symmetric.

    Mode 0 keeps the pole nodes as unknowns (natural ends); modes >= 1 impose
    zero values at both poles, so the matrices act on interior nodes only.
    """

    stiffness: np.ndarray
    mass: np.ndarray
    mode: int

    def __post_init__(self):
        object.__setattr__(self, "stiffness", _freeze(self.stiffness))
        object.__setattr__(self, "mass", _freeze(self.mass))

    @property
    def size(self) -> int:
        return self.stiffness.shape[0]


def assemble_forms(
    base: SLBase,
    density_a: np.ndarray,
    density_b: np.ndarray,
    mode: int,
    max_mode: int = MAX_FOURIER_MODE,
) -> WeightedForms:
    """P1 finite element forms on the colatitude grid for one Fourier mode.

    Stiffness discretizes 2 pi * integral of a (v'^2 + mode^2 v^2 / h^2) h,
    mass discretizes 2 pi * integral of b v^2 h.  Cell coefficients use the
    midpoint value of h and the densities; the v^2 integrals on each cell are
    exact for piecewise-linear v.
    """
    if mode < 0:
        raise ValueError(f"mode must be nonnegative, got {mode}")
    if mode > max_mode:
        raise ModeTooLarge(f"mode {mode} exceeds the configured limit {max_mode}")
    a = np.asarray(density_a, dtype=float)
    b = np.asarray(density_b, dtype=float)
    if a.shape != base.theta.shape or b.shape != base.theta.shape:
        raise ValueError("densities must be sampled on the full grid")
    if np.any(a[1:-1] <= 0.0) or np.any(b[1:-1] <= 0.0):
        raise ValueError("densities must be positive on interior nodes")

    n_nodes = base.theta.size
    dt = np.diff(base.theta)
    h_mid = 0.5 * (base.h[:-1] + base.h[1:])
    a_mid = 0.5 * (a[:-1] + a[1:])
    b_mid = 0.5 * (b[:-1] + b[1:])

    two_pi = 2.0 * math.pi
    stiff = np.zeros((n_nodes, n_nodes))
    mass = np.zeros((n_nodes, n_nodes))

    grad = two_pi * a_mid * h_mid / dt
    cell_mass = two_pi * b_mid * h_mid * dt / 6.0
    if mode > 0:
        cell_sing = two_pi * mode * mode * a_mid / h_mid * dt / 6.0
    else:
        cell_sing = np.zeros_like(dt)

    idx = np.arange(n_nodes - 1)
    for local, (gi, gj) in enumerate(((0, 0), (0, 1), (1, 0), (1, 1))):
        m_entry = 2.0 if gi == gj else 1.0
        g_entry = 1.0 if gi == gj else -1.0
        np.add.at(stiff, (idx + gi, idx + gj), g_entry * grad + m_entry * cell_sing)
        np.add.at(mass, (idx + gi, idx + gj), m_entry * cell_mass)

    if mode >= 1:
        stiff = stiff[1:-1, 1:-1]
        mass = mass[1:-1, 1:-1]
    return WeightedForms(stiffness=stiff, mass=mass, mode=mode)


def fourier_mode_bound(base: SLBase, cutoff: float, min_density_ratio: float = 1.0) -> int:
    """Largest azimuthal mode that can contribute an eigenvalue below ``cutoff``.

    The mode-n form is bounded below by n^2 min(a/b) / max(h)^2, so modes above
    ceil(max(h) sqrt(cutoff / min(a/b))) + 2 are provably out of range.
    """
    if cutoff <= 0:
        return 0
    h_max = float(base.h.max())
    return int(math.ceil(h_max * math.sqrt(cutoff / min_density_ratio))) + 2
