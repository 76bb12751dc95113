"""SL2(Z) arithmetic: Möbius actions, reduction to the standard fundamental
domain, continued-fraction orbits accumulating at boundary points, and the
lattice search approximating pairs in SL2(R)^2 by ``(gamma1 h, gamma2 g h g^-1)``.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np

from .errors import PreconditionError, ReductionError
from .geometry import INF

MAX_REDUCTION_STEPS = 10**5


@dataclass(frozen=True)
class UnimodularMatrix:
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for name in "abcd":
            v = getattr(self, name)
            if isinstance(v, (np.integer,)):
                object.__setattr__(self, name, int(v))
            elif not isinstance(v, int):
                raise PreconditionError(f"entry {name}={v!r} is not an integer")
        if self.a * self.d - self.b * self.c != 1:
            raise PreconditionError(f"determinant of {self.entries} is not 1")

    @classmethod
    def identity(cls):
        return cls(1, 0, 0, 1)

    @classmethod
    def T(cls, k: int = 1):
        return cls(1, k, 0, 1)

    @classmethod
    def S(cls):
        return cls(0, -1, 1, 0)

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    @property
    def height(self) -> int:
        return max(abs(x) for x in self.entries)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other):
        if isinstance(other, UnimodularMatrix):
            return UnimodularMatrix(
                self.a * other.a + self.b * other.c,
                self.a * other.b + self.b * other.d,
                self.c * other.a + self.d * other.c,
                self.c * other.b + self.d * other.d,
            )
        if isinstance(other, RealMatrix):
            return RealMatrix.from_array(self.array() @ other.array())
        return NotImplemented

    def __neg__(self):
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def __call__(self, z):
        return act(self, z)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def derivative(self, z):
        """d/dz of the Möbius map at z, i.e. ``(cz + d)^-2``."""
        return 1 / (self.c * z + self.d) ** 2


@dataclass(frozen=True)
class RealMatrix:
    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        for name in "abcd":
            object.__setattr__(self, name, float(getattr(self, name)))
        det = self.a * self.d - self.b * self.c
        scale = max(1.0, max(abs(x) for x in self.entries) ** 2)
        if abs(det - 1) > 1e-12 * scale:
            raise PreconditionError(f"determinant {det!r} is not 1")

    @classmethod
    def from_array(cls, m) -> "RealMatrix":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)

    def array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def inverse(self) -> "RealMatrix":
        return RealMatrix(self.d, -self.b, -self.c, self.a)

    def __matmul__(self, other):
        if isinstance(other, (RealMatrix, UnimodularMatrix)):
            return RealMatrix.from_array(self.array() @ other.array())
        return NotImplemented

    def __rmatmul__(self, other):
        if isinstance(other, UnimodularMatrix):
            return RealMatrix.from_array(other.array() @ self.array())
        return NotImplemented

    def __call__(self, z):
        return act(self, z)

    def derivative(self, z):
        return 1 / (self.c * z + self.d) ** 2


Matrix = Union[UnimodularMatrix, RealMatrix]


def act(m: Matrix, z):
    """Möbius action ``(az + b)/(cz + d)``; ``INF`` in and out where appropriate.

    Integer matrices acting on ``Fraction``/``int`` points stay exact.
    """
    a, b, c, d = m.entries
    if z is INF:
        if c == 0:
            return INF
        return Fraction(a, c) if isinstance(m, UnimodularMatrix) else a / c
    den = c * z + d
    if den == 0:
        return INF
    if isinstance(z, (int, Fraction)) and isinstance(m, UnimodularMatrix):
        return Fraction(a * z + b) / den
    return (a * z + b) / den


# --- fundamental domain -------------------------------------------------------

def _unit_circle_slack(z):
    # points exactly on |z| = 1 must not bounce between the two corners
    if isinstance(z, complex):
        return 1e-14
    import mpmath

    return mpmath.mpf(2) ** (-(mpmath.mp.prec - 8))


def reduce_to_fundamental_domain(z, max_steps: int = MAX_REDUCTION_STEPS):
    """Return ``(z', gamma)`` with ``z' = gamma z`` in ``|Re z| <= 1/2, |z| >= 1``.

    Works for Python complex and mpmath ``mpc`` inputs; translations are chosen
    from a float estimate and applied in the input's own precision.
    """
    if not z.imag > 0:
        raise PreconditionError(f"{z} is not in the upper half-plane")
    slack = _unit_circle_slack(z)
    a, b, c, d = 1, 0, 0, 1
    for _ in range(max_steps):
        n = round(float(z.real))
        if n:
            z = z - n
            a, b = a - n * c, b - n * d
        if z.real * z.real + z.imag * z.imag < 1 - slack:
            z = -1 / z
            a, b, c, d = -c, -d, a, b
        else:
            return z, UnimodularMatrix(a, b, c, d)
    raise ReductionError(f"reduction did not terminate in {max_steps} steps (input at noise floor?)")


def reduce_array(z: np.ndarray, max_steps: int = 10_000):
    """Vectorized reduction; returns reduced points and the (c, d) rows of gamma."""
    z = np.array(z, dtype=complex)
    c = np.zeros(z.shape, dtype=float)
    d = np.ones(z.shape, dtype=float)
    a = np.ones(z.shape, dtype=float)
    b = np.zeros(z.shape, dtype=float)
    if np.any(~(z.imag > 0)):
        raise PreconditionError("points must lie in the upper half-plane")
    for _ in range(max_steps):
        n = np.round(z.real)
        z = z - n
        a, b = a - n * c, b - n * d
        inside = np.abs(z) ** 2 < 1 - 1e-14
        if not inside.any():
            return z, c, d
        zi = z[inside]
        z[inside] = -1 / zi
        a_in, b_in = a[inside], b[inside]
        a[inside], b[inside] = -c[inside], -d[inside]
        c[inside], d[inside] = a_in, b_in
    raise ReductionError("vectorized reduction did not terminate")


def in_fundamental_domain(z, tol: float = 1e-12) -> bool:
    return abs(z.real) <= 0.5 + tol and abs(z) >= 1 - tol


# --- continued fractions and orbits -------------------------------------------

def _exact(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    try:
        import mpmath

        if isinstance(x, mpmath.mpf):
            man, exp = x.man_exp
            return Fraction(int(man)) * (Fraction(2) ** int(exp))
    except ImportError:  # pragma: no cover
        pass
    return Fraction(float(x))


def continued_fraction(x, max_terms: int = 10_000) -> list:
    """Partial quotients of the exact rational value of ``x``."""
    f = _exact(x)
    terms = []
    while len(terms) < max_terms:
        a = math.floor(f)
        terms.append(a)
        f = f - a
        if f == 0:
            break
        f = 1 / f
    return terms


def convergents(terms) -> list:
    """Convergents ``(p_k, q_k)`` for ``k = 0, 1, ...``."""
    out = []
    p_prev, q_prev, p, q = 1, 0, terms[0], 1
    out.append((p, q))
    for a in terms[1:]:
        p_prev, q_prev, p, q = p, q, a * p + p_prev, a * q + q_prev
        out.append((p, q))
    return out


def _precision_ulp(x) -> float:
    try:
        import mpmath

        if isinstance(x, mpmath.mpf):
            return float(mpmath.mpf(2) ** (-x.context.prec)) * max(1.0, abs(float(x)))
    except ImportError:  # pragma: no cover
        pass
    if isinstance(x, (int, Fraction)):
        return 0.0
    return math.ulp(float(x))


def boundary_matrix(x0) -> UnimodularMatrix:
    """A matrix ``sigma`` with ``sigma(INF) = x0`` for rational ``x0``."""
    f = Fraction(x0)
    p, q = f.numerator, f.denominator
    # p d - b q = 1
    g, s, t = _ext_gcd(p, q)
    assert g == 1
    return UnimodularMatrix(p, -t, q, s)


def _ext_gcd(a: int, b: int):
    """Return ``(g, s, t)`` with ``a s + b t = g = gcd(a, b) >= 0``."""
    s0, s1, t0, t1 = 1, 0, 0, 1
    while b:
        k, r = divmod(a, b)
        a, b = b, r
        s0, s1 = s1, s0 - k * s1
        t0, t1 = t1, t0 - k * t1
    if a < 0:
        a, s0, t0 = -a, -s0, -t0
    return a, s0, t0


@dataclass
class OrbitSequence:
    target: object
    base: complex
    matrices: list
    kind: str
    truncated: bool = False
    warning: str | None = None
    points: list = field(default_factory=list)

    def __post_init__(self):
        if not self.points:
            self.points = [act(g, self.base) for g in self.matrices]

    def errors(self) -> list:
        if self.target is INF:
            return [1 / abs(p) if p is not INF else 0.0 for p in self.points]
        x = float(self.target)
        return [abs(p - x) for p in self.points]


def orbit_toward(target, base, k: int) -> OrbitSequence:
    """Matrices ``gamma_1..gamma_k`` with ``gamma_i(base) -> target``.

    Irrational targets (floats, mpmath reals) use continued-fraction convergents;
    ``Fraction``/``int`` targets (or floats with a short exact expansion) use
    ``sigma T^i sigma^-1``; ``INF`` uses ``T^i S``.
    """
    if k < 1:
        raise PreconditionError("k must be >= 1")
    if isinstance(base, (int, float)):
        base = complex(base)
    if target is INF:
        mats = [UnimodularMatrix.T(i) @ UnimodularMatrix.S() for i in range(1, k + 1)]
        return OrbitSequence(INF, base, mats, "cusp")
    if isinstance(target, (int, Fraction)):
        return _rational_orbit(Fraction(target), base, k)

    ulp = _precision_ulp(target)
    exact = _exact(target)
    # a float that is a small-denominator rational up to rounding is a rational target
    simple = exact.limit_denominator(max(1, int(ulp ** (-1 / 3))))
    if abs(exact - simple) <= 4 * ulp:
        return _rational_orbit(simple, base, k)
    convs = convergents(continued_fraction(exact, max_terms=k + 2))
    mats, truncated, warning = [], False, None
    for i in range(1, min(k, len(convs) - 1) + 1):
        (p1, q1), (p0, q0) = convs[i], convs[i - 1]
        # convergent error is about 1/(q_i q_{i+1}); beyond the input precision it is noise
        if i + 1 < len(convs):
            approx_err = 1.0 / (q1 * convs[i + 1][1])
        else:
            approx_err = 0.0
        if approx_err < 16 * ulp:
            truncated = True
            break
        det = p1 * q0 - p0 * q1
        if det == 1:
            mats.append(UnimodularMatrix(p1, p0, q1, q0))
        else:
            mats.append(UnimodularMatrix(p1, -p0, q1, -q0))
    if len(mats) < k:
        truncated = True
        warning = (f"continued-fraction precision exhausted after {len(mats)} of {k} terms")
        warnings.warn(warning, RuntimeWarning, stacklevel=2)
    return OrbitSequence(target, base, mats, "continued-fraction", truncated, warning)


def _rational_orbit(x0: Fraction, base, k: int) -> OrbitSequence:
    sigma = boundary_matrix(x0)
    inv = sigma.inverse()
    mats = [sigma @ UnimodularMatrix.T(i) @ inv for i in range(1, k + 1)]
    return OrbitSequence(x0, base, mats, "parabolic")


def orbit_matrix(target, k: int) -> UnimodularMatrix:
    """The k-th matrix of :func:`orbit_toward` (base-independent)."""
    seq = orbit_toward(target, 1j, k)
    if len(seq.matrices) < k:
        raise PreconditionError(seq.warning or "orbit truncated")
    return seq.matrices[k - 1]


# --- lattice enumeration and the Ratner search ----------------------------------

@lru_cache(maxsize=8)
def unimodular_matrices(height: int) -> np.ndarray:
    """All matrices of PSL2(Z) with entries bounded by ``height`` (one sign each).

    Rows are ``(a, b, c, d)``; the sign is fixed by ``c > 0`` or ``c = 0, d = 1``.
    Order: ``(c, d, t)`` where ``(a, b) = (a0 + t c, b0 + t d)``.
    """
    if height < 1:
        raise PreconditionError("height must be >= 1")
    H = int(height)
    rows = [(1, b, 0, 1) for b in range(-H, H + 1)]
    for c in range(1, H + 1):
        for d in range(-H, H + 1):
            if math.gcd(c, d) != 1:
                continue
            # a d - b c = 1
            g, s, t = _ext_gcd(d, c)
            a0, b0 = s, -t
            lo = math.ceil((-H - a0) / c)
            hi = math.floor((H - a0) / c)
            for k in range(lo, hi + 1):
                a, b = a0 + k * c, b0 + k * d
                if abs(b) <= H:
                    rows.append((a, b, c, d))
    out = np.array(rows, dtype=np.int64)
    out.setflags(write=False)
    return out


@dataclass
class RatnerResult:
    gamma1: UnimodularMatrix | None
    gamma2: UnimodularMatrix | None
    h: RealMatrix | None
    error: float
    height: int
    candidates: int

    @property
    def found(self) -> bool:
        return math.isfinite(self.error)


def _mat_inv(m: np.ndarray) -> np.ndarray:
    out = np.empty_like(m)
    out[..., 0, 0] = m[..., 1, 1]
    out[..., 1, 1] = m[..., 0, 0]
    out[..., 0, 1] = -m[..., 0, 1]
    out[..., 1, 0] = -m[..., 1, 0]
    return out


def ratner_approximate(g: RealMatrix, targets, height: int) -> RatnerResult:
    """Search ``gamma1`` (entries <= height) and a rounded ``gamma2`` so that
    ``(gamma1 h, gamma2 g h g^-1)`` approximates ``(g1, g2)``.

    For each ``gamma1``: ``h = gamma1^-1 g1``, ``m = g h g^-1`` and ``gamma2`` is
    the entrywise rounding of ``g2 m^-1``, accepted when unimodular.  The error
    is ``max |gamma2 m - g2|``; ties go to the lexicographically smallest
    ``(gamma1, gamma2)`` entries.
    """
    g1, g2 = targets
    mats = unimodular_matrices(height)
    gam1 = mats.reshape(-1, 2, 2).astype(float)
    G = g.array()
    Ginv = np.linalg.inv(G)
    h = _mat_inv(gam1) @ g1.array()
    m = G @ h @ Ginv
    cand = g2.array() @ _mat_inv(m)
    gam2 = np.rint(cand)
    gi = gam2.astype(np.int64)
    det_ok = (gi[:, 0, 0] * gi[:, 1, 1] - gi[:, 0, 1] * gi[:, 1, 0]) == 1
    err = np.max(np.abs(gam2 @ m - g2.array()).reshape(-1, 4), axis=1)
    err = np.where(det_ok, err, np.inf)
    if not det_ok.any():
        return RatnerResult(None, None, None, math.inf, height, len(mats))
    keys = [gi.reshape(-1, 4)[:, i] for i in range(3, -1, -1)] + [mats[:, i] for i in range(3, -1, -1)] + [err]
    best = int(np.lexsort(keys)[0])
    return RatnerResult(
        UnimodularMatrix(*(int(v) for v in mats[best])),
        UnimodularMatrix(*(int(v) for v in gi[best].ravel())),
        RealMatrix.from_array(h[best]),
        float(err[best]),
        height,
        len(mats),
    )
