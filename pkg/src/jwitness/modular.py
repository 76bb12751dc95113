"""Evaluation of E4, E6, Delta, j and dj/dz by truncated q-expansions after
reduction to the fundamental domain, and numerical inversion of j.

All series coefficients are exact integers.  Evaluation runs in hardware
double precision by default; passing ``dps`` to :class:`ModularEvaluator`
switches to mpmath at that many decimal digits (used for class polynomials).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InversionError, NumericalFailure, PreconditionError
from .modgroup import reduce_array, reduce_to_fundamental_domain

RHO = cmath.exp(2j * math.pi / 3)
MIN_IMAG = math.sqrt(3) / 2
Q_MAX = math.exp(-math.pi * math.sqrt(3))  # |q| bound on the reduced domain


# --- exact coefficients ---------------------------------------------------------

def _divisor_sums(M: int, power: int) -> list:
    s = [0] * (M + 1)
    for d in range(1, M + 1):
        dp = d**power
        for n in range(d, M + 1, d):
            s[n] += dp
    return s


@lru_cache(maxsize=None)
def eisenstein_coefficients(weight: int, M: int) -> tuple:
    if weight == 4:
        s = _divisor_sums(M, 3)
        return (1,) + tuple(240 * s[n] for n in range(1, M + 1))
    if weight == 6:
        s = _divisor_sums(M, 5)
        return (1,) + tuple(-504 * s[n] for n in range(1, M + 1))
    raise PreconditionError(f"no Eisenstein series of weight {weight} here")


def _mul(a, b, M):
    out = [0] * (M + 1)
    for i, x in enumerate(a[: M + 1]):
        if x:
            for k, y in enumerate(b[: M + 1 - i]):
                out[i + k] += x * y
    return out


@lru_cache(maxsize=None)
def eta_product_coefficients(M: int) -> tuple:
    """Coefficients of ``prod_{n>=1} (1 - q^n)^24`` up to ``q^M`` (so Delta = q times this)."""
    # Euler's pentagonal series for prod (1 - q^n)
    p = [0] * (M + 1)
    k = 0
    while k * (3 * k - 1) // 2 <= M:
        for kk in (k, -k) if k else (0,):
            e = kk * (3 * kk - 1) // 2
            if e <= M:
                p[e] = (-1) ** k
        k += 1
    # 24th power by the J.C.P. Miller recurrence (p[0] = 1)
    f = [0] * (M + 1)
    f[0] = 1
    alpha = 24
    for n in range(1, M + 1):
        acc = 0
        for i in range(1, n + 1):
            if p[i]:
                acc += ((alpha + 1) * i - n) * p[i] * f[n - i]
        f[n], r = divmod(acc, n)
        assert r == 0
    return tuple(f)


@lru_cache(maxsize=None)
def j_coefficients(M: int) -> tuple:
    """Integer coefficients c_0..c_M with ``j = sum c_n q^(n-1)``."""
    e4 = eisenstein_coefficients(4, M)
    num = _mul(_mul(e4, e4, M), e4, M)
    den = eta_product_coefficients(M)
    out = [0] * (M + 1)
    for n in range(M + 1):
        acc = num[n] - sum(den[k] * out[n - k] for k in range(1, n + 1))
        out[n] = acc  # den[0] == 1
    return tuple(out)


@dataclass(frozen=True)
class QSeries:
    """Truncated expansion ``q^offset * sum_{n=0}^{M} c_n q^n`` of weight ``weight``."""

    coefficients: tuple
    weight: int
    offset: int = 0

    def __post_init__(self):
        if len(self.coefficients) < 2:
            raise PreconditionError("truncation must be at least 1")

    @property
    def truncation(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, q):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * q + c
        return acc * q**self.offset if self.offset else acc

    def q_derivative(self, q):
        """``q d/dq`` of the series, i.e. ``(1/2 pi i) d/dtau``."""
        acc = 0
        n0 = self.offset
        for n in range(self.truncation, -1, -1):
            acc = acc * q + (n + n0) * self.coefficients[n]
        return acc * q**n0 if n0 else acc

    def evaluate_array(self, q: np.ndarray) -> np.ndarray:
        c = np.array([float(x) for x in self.coefficients])
        out = np.polyval(c[::-1], q)
        return out * q**self.offset if self.offset else out


# --- evaluator ------------------------------------------------------------------------

class ModularEvaluator:
    """Immutable evaluator for E4, E6, Delta, j and j' at truncation ``M``."""

    def __init__(self, M: int = 60, dps: int | None = None):
        if M < 1:
            raise PreconditionError("truncation M must be >= 1")
        self.M = M
        self.dps = dps
        self.e4 = QSeries(eisenstein_coefficients(4, M), 4)
        self.e6 = QSeries(eisenstein_coefficients(6, M), 6)
        self.delta = QSeries(eta_product_coefficients(M), 12, offset=1)
        self.jseries = QSeries(j_coefficients(M), 0, offset=-1)
        self.min_imag = MIN_IMAG

    def __repr__(self):
        return f"ModularEvaluator(M={self.M}, dps={self.dps})"

    # precision plumbing
    def _ctx(self):
        if self.dps is None:
            return None
        import mpmath

        ctx = mpmath.workdps(self.dps)
        return ctx

    def _prep(self, z):
        if self.dps is None:
            z = complex(z)
        else:
            import mpmath

            z = mpmath.mpc(z)
        if not z.imag > 0:
            raise PreconditionError(f"{z} is not in the upper half-plane")
        return z

    def _q(self, z):
        if self.dps is None:
            return cmath.exp(2j * math.pi * z)
        import mpmath

        return mpmath.exp(2j * mpmath.pi * z)

    def truncation_bound(self) -> float:
        """Geometric bound on the dropped tail of each series on the reduced domain,
        relative to a leading coefficient of 1."""
        x, M = Q_MAX, self.M

        def tail(const, power):
            n = M + 1
            first = const * n**power * x**n
            ratio = ((n + 1) / n) ** power * x
            return first / (1 - ratio)

        # sigma_3(n) <= zeta(3) n^3, sigma_5(n) <= zeta(5) n^5, |tau(n+1)| <= 2 (n+1)^6
        return max(tail(240 * 1.2021, 3), tail(504 * 1.0370, 5), tail(2 * 2**6, 6))

    # evaluations
    def _run(self, fn, z):
        ctx = self._ctx()
        if ctx is None:
            return fn(self._prep(z))
        with ctx:
            return fn(self._prep(z))

    def j(self, z):
        def f(z):
            zr, _ = reduce_to_fundamental_domain(z)
            q = self._q(zr)
            d = self.delta(q)
            if abs(d) < 1e-300:
                raise NumericalFailure("Delta underflow: point too close to the cusp")
            e4 = self.e4(q)
            return e4 * e4 * e4 / d

        return self._run(f, z)

    def j_derivative(self, z):
        """dj/dz via the differentiated j-series at the reduced point and the chain
        rule ``dj/dz(z) = dj/dz(gamma z) / (cz + d)^2``."""

        def f(z):
            zr, gamma = reduce_to_fundamental_domain(z)
            q = self._q(zr)
            two_pi_i = 2j * (math.pi if self.dps is None else _mp_pi())
            return two_pi_i * self.jseries.q_derivative(q) / (gamma.c * z + gamma.d) ** 2

        return self._run(f, z)

    def j_and_derivative(self, z):
        def f(z):
            zr, gamma = reduce_to_fundamental_domain(z)
            q = self._q(zr)
            d = self.delta(q)
            if abs(d) < 1e-300:
                raise NumericalFailure("Delta underflow: point too close to the cusp")
            e4 = self.e4(q)
            two_pi_i = 2j * (math.pi if self.dps is None else _mp_pi())
            dj = two_pi_i * self.jseries.q_derivative(q) / (gamma.c * z + gamma.d) ** 2
            return e4 * e4 * e4 / d, dj

        return self._run(f, z)

    def j_from_series(self, z):
        """j summed directly from its own q-series (cross-check of E4^3/Delta)."""

        def f(z):
            zr, _ = reduce_to_fundamental_domain(z)
            return self.jseries(self._q(zr))

        return self._run(f, z)

    def modular_form(self, name: str, z):
        """E4, E6 or Delta at an arbitrary point, transported by the weight-k
        automorphy factor ``f(z) = (cz + d)^-k f(gamma z)``."""
        series = {"E4": self.e4, "E6": self.e6, "Delta": self.delta}[name]

        def f(z):
            zr, gamma = reduce_to_fundamental_domain(z)
            return series(self._q(zr)) / (gamma.c * z + gamma.d) ** series.weight

        return self._run(f, z)

    def j_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized double-precision j; points too close to the cusp give ``inf``."""
        if self.dps is not None:
            raise PreconditionError("j_array is double precision only")
        zr, _, _ = reduce_array(np.asarray(z, dtype=complex))
        q = np.exp(2j * np.pi * zr)
        d = self.delta.evaluate_array(q)
        e4 = self.e4.evaluate_array(q)
        with np.errstate(all="ignore"):
            out = e4**3 / d
        out[~np.isfinite(out)] = np.inf
        return out

    # inversion
    def invert(self, c, tol: float = 1e-9, max_iter: int = 200):
        """Point ``z`` of the closed fundamental domain with ``|j(z) - c| < tol max(1, |c|)``."""
        if self.dps is not None:
            return ModularEvaluator(self.M).invert(c, tol, max_iter)
        c = complex(c)
        scale = max(1.0, abs(c))
        if abs(c - 1728) <= 1e-12 * 1728:
            return 1j
        if abs(c) <= 1e-12:
            return RHO
        if abs(c) > 1e4:
            q0 = 1 / (c - 744)
            starts = [reduce_to_fundamental_domain(cmath.log(q0) / (2j * math.pi))[0]]
        else:
            starts = self._grid_starts(c)
        best, best_res = None, math.inf
        for z0 in starts:
            z, res = self._newton_invert(c, z0, max_iter)
            if res < best_res:
                best, best_res = z, res
            if res < tol * scale:
                return canonical_representative(z)
        raise InversionError(
            f"j-inversion stagnated for c={c}: best residual {best_res:.3e}", best, best_res
        )

    def _grid_starts(self, c, n: int = 20):
        xs = np.linspace(-0.5, 0.5, n)
        pts = []
        for x in xs:
            lo = math.sqrt(1 - x * x)
            for y in np.linspace(lo, 2.2, n):
                pts.append(complex(x, y + 1e-9))
        pts = np.array(pts)
        res = np.abs(self.j_array(pts) - c)
        return [complex(p) for p in pts[np.argsort(res, kind="stable")]]

    def _newton_invert(self, c, z, max_iter):
        jz, dj = self.j_and_derivative(z)
        res = abs(jz - c)
        for _ in range(max_iter):
            if res == 0 or dj == 0:
                break
            step = (jz - c) / dj
            improved = False
            for _ in range(40):
                zn = z - step
                if zn.imag > 0:
                    zn, _ = reduce_to_fundamental_domain(zn)
                    try:
                        jn, djn = self.j_and_derivative(zn)
                    except NumericalFailure:
                        step /= 2
                        continue
                    rn = abs(jn - c)
                    if rn < res:
                        improved = True
                        break
                step /= 2
            if not improved:
                break
            z, jz, dj, res = zn, jn, djn, rn
        return z, res


def _mp_pi():
    import mpmath

    return mpmath.pi


def canonical_representative(z: complex) -> complex:
    """Pick one point on identified boundary edges: Re z <= 0 on the unit arc, -1/2 on the sides."""
    z, _ = reduce_to_fundamental_domain(z)
    if abs(z.real - 0.5) <= 1e-12:
        z = z - 1
    elif abs(abs(z) - 1) <= 1e-12 and z.real > 0:
        z = -1 / z
    return z


DEFAULT_EVALUATOR = ModularEvaluator()


def eval_j(z):
    return DEFAULT_EVALUATOR.j(z)


def eval_j_derivative(z):
    return DEFAULT_EVALUATOR.j_derivative(z)


def invert_j(c, tol: float = 1e-9):
    return DEFAULT_EVALUATOR.invert(c, tol)
