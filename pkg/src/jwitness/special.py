"""Quadratic (CM) points of H: detection, reduced binary quadratic forms,
Hilbert class polynomials and a scanner over solver output."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NumericalFailure, PreconditionError
from .modular import ModularEvaluator


@dataclass(frozen=True, order=True)
class QuadraticForm:
    """``a x^2 + b xy + c y^2`` with negative discriminant."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        for name in "abc":
            v = getattr(self, name)
            if int(v) != v:
                raise PreconditionError("form coefficients must be integers")
            object.__setattr__(self, name, int(v))
        if self.discriminant >= 0:
            raise PreconditionError(f"discriminant {self.discriminant} is not negative")

    @property
    def discriminant(self) -> int:
        return self.b * self.b - 4 * self.a * self.c

    @property
    def height(self) -> int:
        return max(abs(self.a), abs(self.b), abs(self.c))

    def is_primitive(self) -> bool:
        return math.gcd(math.gcd(self.a, self.b), self.c) == 1

    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        if not abs(b) <= a <= c:
            return False
        if (abs(b) == a or a == c) and b < 0:
            return False
        return True

    def root(self) -> complex:
        """The root ``(-b + sqrt(D)) / 2a`` in the upper half-plane (``a > 0`` assumed)."""
        sgn = 1 if self.a > 0 else -1
        return complex(-self.b, sgn * math.sqrt(-self.discriminant)) / (2 * self.a)

    def root_mp(self):
        import mpmath

        sgn = 1 if self.a > 0 else -1
        return mpmath.mpc(-self.b, sgn * mpmath.sqrt(-self.discriminant)) / (2 * self.a)

    def __call__(self, tau):
        return self.a * tau * tau + self.b * tau + self.c


@dataclass(frozen=True)
class SpecialFlag:
    point: complex
    form: QuadraticForm | None
    certified: bool
    residual: float | None = None

    @property
    def special(self) -> bool:
        return self.form is not None


def is_quadratic(tau: complex, coef_bound: int = 100, tol: float = 1e-6) -> SpecialFlag:
    """Smallest-height integer ``(a, b, c)`` with ``|a tau^2 + b tau + c| < tol``.

    For each ``(a, b)`` the only candidate c is the integer nearest
    ``-Re(a tau^2 + b tau)``; ties in height go to the lexicographically
    smallest triple.  ``certified`` means the form's exact root lies within
    ``tol`` of ``tau``.
    """
    tau = complex(tau)
    if not tau.imag > 0:
        raise PreconditionError("tau must lie in the upper half-plane")
    B = int(coef_bound)
    a = np.arange(1, B + 1)[:, None].astype(float)
    b = np.arange(-B, B + 1)[None, :].astype(float)
    partial = a * tau * tau + b * tau
    c = np.rint(-partial.real)
    res = np.abs(partial + c)
    ok = (np.abs(c) <= B) & (b * b - 4 * a * c < 0) & (res < tol)
    if not ok.any():
        return SpecialFlag(tau, None, False)
    A, Bv, C = (np.broadcast_to(x, ok.shape)[ok].astype(np.int64) for x in (a, b, c))
    height = np.maximum(np.maximum(np.abs(A), np.abs(Bv)), np.abs(C))
    best = int(np.lexsort([C, Bv, A, height])[0])
    form = QuadraticForm(int(A[best]), int(Bv[best]), int(C[best]))
    r = float(res[ok][best])
    return SpecialFlag(tau, form, abs(form.root() - tau) < tol, r)


def reduced_forms(D: int) -> list:
    """All primitive reduced forms of discriminant ``D < 0``; their number is h(D)."""
    D = int(D)
    if D >= 0 or D % 4 not in (0, 1):
        raise PreconditionError(f"{D} is not a negative discriminant (D = 0 or 1 mod 4)")
    out = []
    a = 1
    while 3 * a * a <= -D:
        for b in range(-a + 1, a + 1):
            if (b - D) % 2:
                continue
            num = b * b - D
            if num % (4 * a):
                continue
            c = num // (4 * a)
            f = QuadraticForm(a, b, c)
            if c >= a and f.is_reduced() and f.is_primitive():
                out.append(f)
        a += 1
    return sorted(out)


@dataclass(frozen=True)
class ClassPolynomial:
    D: int
    coefficients: tuple  # ascending powers, integers
    rounding_gap: float
    forms: tuple
    dps: int
    M: int

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __call__(self, x):
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc

    def derivative(self, x):
        acc = 0
        for k in range(self.degree, 0, -1):
            acc = acc * x + k * self.coefficients[k]
        return acc

    def __str__(self):
        terms = []
        for k in range(self.degree, -1, -1):
            c = self.coefficients[k]
            if c == 0:
                continue
            mono = "" if k == 0 else ("X" if k == 1 else f"X^{k}")
            coef = str(c) if (k == 0 or abs(c) != 1) else ("-" if c < 0 else "")
            terms.append(f"{coef}{'*' if mono and coef not in ('', '-') else ''}{mono}")
        return " + ".join(terms).replace("+ -", "- ") or "0"


def class_polynomial_precision(D: int) -> tuple:
    """Working decimal digits and q-truncation for ``class_polynomial(D)``.

    The largest coefficient is about ``prod |j(tau_Q)| ~ exp(pi sqrt|D| sum 1/a)``.
    """
    forms = reduced_forms(D)
    digits = sum(math.pi * math.sqrt(-D) / f.a for f in forms) / math.log(10)
    dps = 30 + int(math.ceil(digits))
    M = dps // 2 + 10
    return dps, M


def class_polynomial(D: int, M: int | None = None, dps: int | None = None, max_abs_D: int = 200) -> ClassPolynomial:
    """``H_D(X) = prod_Q (X - j(tau_Q))`` rounded to integers, with the rounding gap."""
    import mpmath

    forms = reduced_forms(D)
    if -D > max_abs_D:
        raise PreconditionError(f"|D| = {-D} exceeds the configured limit {max_abs_D}")
    auto_dps, auto_M = class_polynomial_precision(D)
    dps = dps or auto_dps
    M = M or auto_M
    ev = ModularEvaluator(M, dps=dps)
    with mpmath.workdps(dps):
        roots = [ev.j(f.root_mp()) for f in forms]
        poly = [mpmath.mpc(1)]  # ascending
        for r in roots:
            nxt = [mpmath.mpc(0)] * (len(poly) + 1)
            for k, c in enumerate(poly):
                nxt[k + 1] += c
                nxt[k] -= r * c
            poly = nxt
        rounded = [int(mpmath.nint(c.real)) for c in poly]
        gap = max(float(abs(c - r)) for c, r in zip(poly, rounded))
    if gap > 0.1:
        raise NumericalFailure(f"class polynomial of D={D} not near-integral (gap {gap:.3g}); raise precision")
    return ClassPolynomial(D, tuple(rounded), gap, tuple(forms), dps, M)


@dataclass
class ScanReport:
    flags: list = field(default_factory=list)
    coef_bound: int = 100
    tol: float = 1e-6

    @property
    def total(self) -> int:
        return len(self.flags)

    @property
    def flagged(self) -> int:
        return sum(f.special for f in self.flags)

    def forms(self) -> list:
        return [f.form for f in self.flags if f.special]


def special_scan(witnesses, coef_bound: int = 100, tol: float = 1e-6) -> ScanReport:
    """Flag the witnesses whose z-coordinate is a quadratic point.

    An experiment harness: an empty result says nothing beyond the search box.
    """
    return ScanReport([is_quadratic(w.z, coef_bound, tol) for w in witnesses], coef_bound, tol)
