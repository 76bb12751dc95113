"""Disk and polydisk geometry: Cayley transform, Bergman kernel/metric/distance,
Carathéodory extremal functionals and Shilov-boundary checks.

Metric normalization: on the unit disk the metric is ``|dz| / (1 - |z|^2)``,
so the distance is ``artanh`` of the pseudo-hyperbolic distance.  On the
polydisk the squared metric is the sum of the coordinate squared metrics and
the distance is the root of the sum of squared coordinate distances.
"""
from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import PreconditionError

BOUNDARY_TOL = 1e-12


class _Infinity:
    """The point at infinity of the half-plane model (and of Möbius actions)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


@dataclass(frozen=True)
class DiskPoint:
    coords: tuple
    closure: bool = False

    def __post_init__(self):
        coords = tuple(complex(c) for c in self.coords)
        if not coords:
            raise PreconditionError("DiskPoint needs at least one coordinate")
        object.__setattr__(self, "coords", coords)
        m = max(abs(c) for c in coords)
        if self.closure:
            if m > 1 + BOUNDARY_TOL:
                raise PreconditionError(f"point outside the closed polydisk (max modulus {m})")
        elif m >= 1:
            raise PreconditionError(f"point not interior (max modulus {m})")

    @property
    def n(self) -> int:
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=complex)


@dataclass(frozen=True)
class HalfPlanePoint:
    """Point of the closed upper half-plane power; ``INF`` marks a cusp coordinate."""

    coords: tuple
    boundary: bool = False

    def __post_init__(self):
        coords = tuple(c if c is INF else complex(c) for c in self.coords)
        if not coords:
            raise PreconditionError("HalfPlanePoint needs at least one coordinate")
        object.__setattr__(self, "coords", coords)
        for c in coords:
            if c is INF:
                if not self.boundary:
                    raise PreconditionError("INF coordinate requires boundary=True")
            elif self.boundary:
                if c.imag < -BOUNDARY_TOL:
                    raise PreconditionError(f"coordinate {c} below the real axis")
            elif not c.imag > 0:
                raise PreconditionError(f"coordinate {c} not in the upper half-plane")

    @property
    def n(self) -> int:
        return len(self.coords)


@dataclass(frozen=True)
class TangentVector:
    base: DiskPoint
    components: tuple

    def __post_init__(self):
        comps = tuple(complex(a) for a in self.components)
        if len(comps) != self.base.n:
            raise PreconditionError("tangent vector dimension does not match its base point")
        object.__setattr__(self, "components", comps)


@dataclass(frozen=True)
class ShilovTarget:
    value: tuple
    model: str = "disk"

    def __post_init__(self):
        if self.model not in ("disk", "halfplane"):
            raise PreconditionError(f"unknown model {self.model!r}")
        if self.model == "disk":
            vals = tuple(complex(v) for v in self.value)
            if any(abs(abs(v) - 1) > BOUNDARY_TOL for v in vals):
                raise PreconditionError("disk-model Shilov target must lie on the torus")
        else:
            vals = tuple(v if v is INF else float(v) for v in self.value)
        object.__setattr__(self, "value", vals)


def as_disk_point(z, closure=False) -> DiskPoint:
    if isinstance(z, DiskPoint):
        return z
    if isinstance(z, (int, float, complex, np.number)):
        z = (z,)
    return DiskPoint(tuple(z), closure=closure)


# --- Cayley transform -------------------------------------------------------

def cayley(p) -> DiskPoint:
    """Coordinatewise ``z -> (z - i)/(z + i)``; ``INF`` goes to 1."""
    if not isinstance(p, HalfPlanePoint):
        p = HalfPlanePoint((p,) if not isinstance(p, (tuple, list)) else tuple(p))
    out = []
    for z in p.coords:
        out.append(1 + 0j if z is INF else (z - 1j) / (z + 1j))
    return DiskPoint(tuple(out), closure=p.boundary)


def cayley_inverse(d, tol: float = BOUNDARY_TOL) -> HalfPlanePoint:
    """Coordinatewise ``zeta -> i(1 + zeta)/(1 - zeta)``; 1 goes to ``INF``."""
    d = as_disk_point(d, closure=True)
    out = []
    for zeta in d.coords:
        if abs(zeta - 1) <= tol:
            out.append(INF)
        else:
            out.append(1j * (1 + zeta) / (1 - zeta))
    boundary = any(c is INF or abs(abs(z) - 1) <= tol for c, z in zip(out, d.coords))
    if boundary:
        out = [c if c is INF else complex(c.real, max(c.imag, 0.0)) for c in out]
    return HalfPlanePoint(tuple(out), boundary=boundary)


# --- Bergman geometry ---------------------------------------------------------

def bergman_kernel(z, w) -> complex:
    """Closed form ``prod_i 1 / (pi (1 - z_i conj(w_i))^2)``."""
    z, w = as_disk_point(z), as_disk_point(w)
    if z.n != w.n:
        raise PreconditionError("dimension mismatch")
    k = 1 + 0j
    for a, b in zip(z.coords, w.coords):
        k /= math.pi * (1 - a * b.conjugate()) ** 2
    return k


def bergman_metric(v: TangentVector) -> float:
    total = 0.0
    for z, a in zip(v.base.coords, v.components):
        total += (abs(a) / (1 - abs(z) ** 2)) ** 2
    return math.sqrt(total)


def pseudo_hyperbolic(z: complex, w: complex) -> float:
    return abs((z - w) / (1 - w.conjugate() * z))


def disk_distance(z: complex, w: complex) -> float:
    rho = pseudo_hyperbolic(complex(z), complex(w))
    return math.atanh(min(rho, 1.0))


def bergman_distance(z, w) -> float:
    z, w = as_disk_point(z), as_disk_point(w)
    if z.n != w.n:
        raise PreconditionError("dimension mismatch")
    return math.sqrt(sum(disk_distance(a, b) ** 2 for a, b in zip(z.coords, w.coords)))


def disk_automorphism(a: complex, theta: float = 0.0) -> Callable[[complex], complex]:
    """``z -> e^{i theta} (z - a) / (1 - conj(a) z)``."""
    if abs(a) >= 1:
        raise PreconditionError("automorphism parameter must lie in the open disk")
    rot = cmath.exp(1j * theta)
    ac = complex(a).conjugate()
    return lambda z: rot * (z - a) / (1 - ac * z)


def disk_geodesic(z: complex, w: complex) -> Callable[[float], complex]:
    """Geodesic from z to w on ``t in [0, 1]`` (not arclength-parametrized)."""
    to0 = disk_automorphism(z)
    u = to0(w)
    zc = complex(z)
    # inverse of to0 is u -> (u + z)/(1 + conj(z) u)
    return lambda t: (t * u + zc) / (1 + zc.conjugate() * t * u)


# --- Carathéodory extremal functional ----------------------------------------

@dataclass(frozen=True)
class CaratheodoryFunctional:
    """Linear map ``x -> <x, direction> / radius`` from a domain of radius R into the disk."""

    direction: tuple
    radius: float

    @property
    def scale(self) -> float:
        return 1.0 / self.radius

    def __call__(self, x) -> complex:
        x = x.coords if isinstance(x, DiskPoint) else tuple(x)
        return sum(complex(u).conjugate() * complex(xi) for u, xi in zip(self.direction, x)) / self.radius


def caratheodory_extremal(z, w, radius: float | None = None) -> CaratheodoryFunctional:
    z, w = as_disk_point(z), as_disk_point(w)
    if z.n != w.n:
        raise PreconditionError("dimension mismatch")
    diff = w.array() - z.array()
    norm = float(np.linalg.norm(diff))
    if norm == 0:
        raise PreconditionError("z = w: no extremal direction")
    if radius is None:
        radius = math.sqrt(z.n)
    return CaratheodoryFunctional(tuple(complex(c) for c in diff / norm), float(radius))


# --- Shilov boundary ----------------------------------------------------------

def shilov_membership(p, tol: float = BOUNDARY_TOL) -> bool:
    if isinstance(p, HalfPlanePoint):
        return all(c is INF or abs(c.imag) <= tol for c in p.coords)
    if isinstance(p, ShilovTarget):
        return True
    p = as_disk_point(p, closure=True)
    return all(abs(abs(c) - 1) <= tol for c in p.coords)


def ball_euclidean_extent(center, r: float) -> float:
    """Upper bound for ``sup{|w - c| : b(w, c) <= r}``, exact for n = 1.

    Per coordinate the hyperbolic disk of radius r about c is the Euclidean
    disk with centre ``c (1 - s^2) / (1 - s^2 |c|^2)`` and radius
    ``s (1 - |c|^2) / (1 - s^2 |c|^2)`` (s = tanh r); the farthest point from c
    sits at ``s (1 - |c|^2) / (1 - s |c|)``.
    """
    center = as_disk_point(center)
    if r < 0:
        raise PreconditionError("radius must be nonnegative")
    s = math.tanh(r)
    parts = []
    for c in center.coords:
        m = abs(c)
        parts.append(s * (1 - m * m) / (1 - s * m))
    return math.sqrt(sum(x * x for x in parts))


# --- polynomials on the polydisk ----------------------------------------------

def eval_polynomial(coeffs: Mapping[tuple, complex], points: np.ndarray) -> np.ndarray:
    """Evaluate ``sum c_e z^e`` at an ``(m, n)`` array of points."""
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    out = np.zeros(points.shape[0], dtype=complex)
    for exps, c in coeffs.items():
        term = np.full(points.shape[0], complex(c))
        for i, e in enumerate(exps):
            if e:
                term = term * points[:, i] ** e
        out += term
    return out


def _n_vars(coeffs: Mapping[tuple, complex]) -> int:
    return len(next(iter(coeffs)))


def max_modulus_spotcheck(coeffs: Mapping[tuple, complex], samples: int = 2000, seed: int = 0):
    """Sampled max of |f| over the closed polydisk and over the torus (S^1)^n.

    Returns ``(closure_max, shilov_max)``; by the maximum-modulus property the
    first never exceeds the second (up to sampling of the torus).
    """
    n = _n_vars(coeffs)
    rng = np.random.default_rng(seed)
    radii = np.sqrt(rng.random((samples, n)))
    angles = rng.random((samples, n)) * 2 * np.pi
    closure_pts = radii * np.exp(1j * angles)
    # torus: a regular grid plus random points, so symmetric maxima are hit exactly
    m = max(2, int(round(samples ** (1.0 / n))))
    torus = np.vstack([shilov_grid(n, m), np.exp(2j * np.pi * rng.random((samples, n)))])
    closure_max = float(np.max(np.abs(eval_polynomial(coeffs, closure_pts))))
    shilov_max = float(np.max(np.abs(eval_polynomial(coeffs, torus))))
    return closure_max, shilov_max


def shilov_grid(n: int, m: int) -> np.ndarray:
    """The ``m^n`` points of (S^1)^n with angles on the uniform grid."""
    roots = np.exp(2j * np.pi * np.arange(m) / m)
    return np.array(list(itertools.product(roots, repeat=n)), dtype=complex)


def monomials(n: int, degree: int) -> list:
    return [e for e in itertools.product(range(degree + 1), repeat=n) if sum(e) <= degree]


def fit_polynomial_on_shilov(values: np.ndarray, grid: np.ndarray, degree: int) -> dict:
    """Least-squares recovery of the coefficients of a degree-``degree`` polynomial
    from its values on a torus grid."""
    n = grid.shape[1]
    exps = monomials(n, degree)
    vander = np.column_stack([np.prod(grid ** np.array(e), axis=1) for e in exps])
    sol, *_ = np.linalg.lstsq(vander, np.asarray(values, dtype=complex), rcond=None)
    return dict(zip(exps, sol))


def bergman_ball_contains(center, w, r: float) -> bool:
    return bergman_distance(center, w) <= r

