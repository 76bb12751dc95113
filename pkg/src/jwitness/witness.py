"""Certified solutions of ``j(z) = p(z)`` and ``P(z, j(z)) = 0`` near boundary points.

The localization follows the ball-translation argument: pick ``Z1`` with
``j(Z1) = p(x0)``, a small ball ``B`` about it on which ``j - j(Z1)`` has only
the zero ``Z1``, and ``delta = min_{dB} |j - j(Z1)|``.  Translating ``B`` by
``gamma_k`` with ``gamma_k Z1 -> x0``, once ``|p - p(x0)| < delta/2`` on the
translated boundary Rouché's theorem puts a zero of ``j - p`` inside
``gamma_k B``; the argument principle counts it and Newton's method refines it.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .errors import ContourProximityError, NewtonError, NumericalFailure, PreconditionError
from .geometry import INF
from .modgroup import UnimodularMatrix, act, orbit_toward, unimodular_matrices
from .modular import DEFAULT_EVALUATOR, RHO, ModularEvaluator

CONTOUR_SAMPLES = 256
SAFETY = 2.0  # factor on delta/2 for the sampled sup
RESIDUAL_TOL = 1e-8


# --- argument principle -----------------------------------------------------------

def zero_count(F: Callable, center: complex, radius: float, dF: Optional[Callable] = None,
               min_nodes: int = 64, max_nodes: int = 2**14, eval_error: Optional[float] = None) -> int:
    """Number of zeros of ``F`` inside ``|z - center| < radius`` (with multiplicity).

    Trapezoidal rule for ``(1/2 pi i) oint F'/F dz``, doubling the node count
    from ``min_nodes`` until two successive values round to the same integer
    and both lie within 0.25 of it.
    """
    if radius <= 0:
        raise PreconditionError("radius must be positive")
    h = radius * 1e-6
    prev = None
    n = min_nodes
    while n <= max_nodes:
        e = np.exp(2j * np.pi * np.arange(n) / n)
        pts = center + radius * e
        Fz = np.array([F(z) for z in pts], dtype=complex)
        absF = np.abs(Fz)
        err = eval_error if eval_error is not None else 1e-12 * float(np.max(absF))
        if float(np.min(absF)) <= 10 * err:
            raise ContourProximityError(
                f"|F| = {np.min(absF):.3e} on the contour (zero near the circle)", float(np.min(absF))
            )
        if dF is not None:
            dFz = np.array([dF(z) for z in pts], dtype=complex)
        else:
            dFz = np.array([(F(z + h) - F(z - h)) / (2 * h) for z in pts], dtype=complex)
        val = complex(np.mean(dFz / Fz * radius * e))
        k = round(val.real)
        ok = abs(val - k) < 0.25
        if ok and prev is not None and prev == k:
            return int(k)
        prev = k if ok else None
        n *= 2
    raise NumericalFailure(f"argument-principle quadrature did not stabilize (last value {val})")


def newton_refine(G: Callable, dG: Callable, z0: complex, tol: float = 1e-12, max_iter: int = 100,
                  contour: Optional[tuple] = None, multiplicity: int = 1) -> complex:
    """Newton iteration (step ``m G/G'`` for a zero of multiplicity m) until ``|G| < tol``.

    Raises :class:`NewtonError` if an iterate leaves ``contour = (center, radius)``
    or the iteration budget runs out.
    """
    z = complex(z0)
    g = G(z)
    best, best_res = z, abs(g)
    for _ in range(max_iter):
        if abs(g) < tol:
            return z
        d = dG(z)
        if d == 0:
            break
        z = z - multiplicity * g / d
        if contour is not None and abs(z - contour[0]) >= contour[1]:
            raise NewtonError("Newton iterate left the certifying contour", best, best_res)
        g = G(z)
        if abs(g) < best_res:
            best, best_res = z, abs(g)
    if best_res < tol:
        return best
    raise NewtonError(f"Newton did not reach residual {tol:g} (best {best_res:.3e})", best, best_res)


# --- targets ------------------------------------------------------------------------

@dataclass(frozen=True)
class BivariatePolynomial:
    """``P(z, w) = sum c_ij z^i w^j`` with ``terms = {(i, j): c_ij}``."""

    terms: dict

    def __post_init__(self):
        clean = {(int(i), int(j)): complex(c) for (i, j), c in self.terms.items() if c != 0}
        object.__setattr__(self, "terms", clean)

    def __hash__(self):
        return hash(tuple(sorted((k, (v.real, v.imag)) for k, v in self.terms.items())))

    @property
    def degree_w(self) -> int:
        return max((j for _, j in self.terms), default=0)

    def depends_on_w(self) -> bool:
        return self.degree_w > 0

    def __call__(self, z, w):
        return sum(c * z**i * w**j for (i, j), c in self.terms.items())

    def dz(self, z, w):
        return sum(i * c * z ** (i - 1) * w**j for (i, j), c in self.terms.items() if i)

    def dw(self, z, w):
        return sum(j * c * z**i * w ** (j - 1) for (i, j), c in self.terms.items() if j)

    def w_coefficients(self, z) -> list:
        """Coefficients of ``P(z, .)`` from the highest power of w down."""
        out = [0j] * (self.degree_w + 1)
        for (i, j), c in self.terms.items():
            out[self.degree_w - j] += c * z**i
        return out

    def roots_in_w(self, z) -> np.ndarray:
        coeffs = np.array(self.w_coefficients(z))
        nz = np.flatnonzero(np.abs(coeffs) > 0)
        if len(nz) == 0:
            raise PreconditionError("P(z, .) vanishes identically")
        return np.roots(coeffs[nz[0]:])

    def __str__(self):
        parts = []
        for (i, j), c in sorted(self.terms.items()):
            parts.append(f"({c:g})*z^{i}*w^{j}")
        return " + ".join(parts) or "0"


@dataclass(frozen=True)
class TargetFunction:
    """Right-hand side: an algebraic branch of ``P(z, w) = 0`` or a named holomorphic map."""

    kind: str
    name: str
    poly: Optional[BivariatePolynomial] = None
    func: Optional[Callable] = None
    dfunc: Optional[Callable] = None
    branch: Optional[int] = None

    def __post_init__(self):
        if self.kind == "algebraic":
            if self.poly is None or not self.poly.depends_on_w():
                raise PreconditionError("P must depend on w (dominant projection)")
        elif self.kind == "transcendental":
            if self.func is None or self.dfunc is None:
                raise PreconditionError("transcendental target needs a function and its derivative")
        else:
            raise PreconditionError(f"unknown target kind {self.kind!r}")

    @classmethod
    def algebraic(cls, poly: BivariatePolynomial, branch: Optional[int] = None, name: Optional[str] = None):
        return cls("algebraic", name or str(poly), poly=poly, branch=branch)

    @classmethod
    def transcendental(cls, name: str, func: Callable, dfunc: Callable):
        return cls("transcendental", name, func=func, dfunc=dfunc)

    def boundary_value(self, x0: float) -> complex:
        """``p(x0)``; for algebraic targets the selected simple root of ``P(x0, .)``."""
        if self.kind == "transcendental":
            return complex(self.func(x0))
        roots = self.poly.roots_in_w(x0)
        order = sorted(range(len(roots)), key=lambda k: (round(abs(roots[k]), 12), cmath.phase(roots[k])))
        idx = order[self.branch or 0]
        w0 = complex(roots[idx])
        scale = max(1.0, max(abs(c) for c in self.poly.w_coefficients(x0)))
        if abs(self.poly.dw(x0, w0)) < 1e-9 * scale:
            raise PreconditionError(f"branch of P(x0, w) at x0={x0} is not simple; choose another x0")
        return w0

    def value_near(self, z, w_ref: complex) -> complex:
        """``p(z)``: the branch value continued from ``w_ref``."""
        if self.kind == "transcendental":
            return complex(self.func(z))
        roots = self.poly.roots_in_w(z)
        return complex(roots[np.argmin(np.abs(roots - w_ref))])

    def G(self, z, jz):
        if self.kind == "transcendental":
            return jz - self.func(z)
        return self.poly(z, jz)

    def dG(self, z, jz, djz):
        if self.kind == "transcendental":
            return djz - self.dfunc(z)
        return self.poly.dz(z, jz) + self.poly.dw(z, jz) * djz

    def dG_dz_explicit(self, z, jz):
        """Partial derivative in the explicit z-dependence (j held fixed)."""
        if self.kind == "transcendental":
            return -self.dfunc(z)
        return self.poly.dz(z, jz)


EXP = TargetFunction.transcendental("exp", cmath.exp, cmath.exp)


def constant_target(c: complex) -> TargetFunction:
    c = complex(c)
    return TargetFunction.transcendental(f"const({c:g})", lambda z: c, lambda z: 0j)


def linear_target_poly(a: complex, b: complex) -> BivariatePolynomial:
    """``w - (a z + b)``."""
    return BivariatePolynomial({(0, 1): 1, (1, 0): -a, (0, 0): -b})


# --- problems and witnesses -------------------------------------------------------------

@dataclass
class WitnessProblem:
    target: TargetFunction
    boundary_point: object
    count: int = 3
    ball_radius: float = 0.05
    orbit_depth: int = 12

    def __post_init__(self):
        if self.count < 1:
            raise PreconditionError("count must be >= 1")
        if not self.ball_radius > 0:
            raise PreconditionError("ball_radius must be positive")
        if self.boundary_point is INF:
            raise PreconditionError("the cusp is not an admissible boundary target")


@dataclass(frozen=True)
class Certificate:
    center: complex      # image circle gamma(dB) in the z-plane
    radius: float
    zero_count: int
    base_center: complex  # Z1 and the radius of B
    base_radius: float
    matrix: tuple


@dataclass(frozen=True)
class Witness:
    z: complex
    jz: complex
    residual: float
    certificate: Certificate
    orbit_index: int
    target: object
    multiplicity: int = 1


class WitnessList(list):
    """List of witnesses carrying the localization diagnostics."""

    def __init__(self, items=(), diagnostics=None, info=None):
        super().__init__(items)
        self.diagnostics = list(diagnostics or [])
        self.info = dict(info or {})


def local_multiplicity(z1: complex, tol: float = 1e-9) -> int:
    """Ramification of j at a reduced point: 2 at i, 3 at rho and rho + 1, else 1."""
    if abs(z1 - 1j) < tol:
        return 2
    if abs(z1 - RHO) < tol or abs(z1 - (RHO + 1)) < tol:
        return 3
    return 1


def translate_separation(z1: complex, height: int = 3) -> float:
    """Distance from a reduced ``z1`` to the nearest other point of its orbit.

    Only small matrices matter: for reduced z1, ``Im(gamma z1) <= 1/(c^2 Im z1)``
    pushes translates with larger ``|c|`` far below.
    """
    mats = unimodular_matrices(height)
    best = math.inf
    for a, b, c, d in mats:
        w = (a * z1 + b) / (c * z1 + d)
        dist = abs(w - z1)
        if dist > 1e-9:
            best = min(best, dist)
    return best


def _circle_image(m: UnimodularMatrix, center: complex, radius: float):
    pts = [act(m, center + radius * cmath.exp(2j * math.pi * t / 3)) for t in range(3)]
    a, b, c = pts
    # circumcircle
    d = 2 * (a.real * (b.imag - c.imag) + b.real * (c.imag - a.imag) + c.real * (a.imag - b.imag))
    ux = ((abs(a) ** 2) * (b.imag - c.imag) + (abs(b) ** 2) * (c.imag - a.imag) + (abs(c) ** 2) * (a.imag - b.imag)) / d
    uy = ((abs(a) ** 2) * (c.real - b.real) + (abs(b) ** 2) * (a.real - c.real) + (abs(c) ** 2) * (b.real - a.real)) / d
    u = complex(ux, uy)
    return u, abs(a - u)


def _discs_overlap(c1: Certificate, c2: Certificate) -> bool:
    return abs(c1.center - c2.center) < c1.radius + c2.radius


def rouche_localize(problem: WitnessProblem, evaluator: ModularEvaluator = DEFAULT_EVALUATOR,
                    residual_tol: float = RESIDUAL_TOL) -> WitnessList:
    target = problem.target
    x0 = problem.boundary_point
    x0f = float(x0)
    diagnostics = []

    # (1) boundary value and (2) a preimage under j
    w0 = target.boundary_value(x0f)
    z1 = evaluator.invert(w0)
    m = local_multiplicity(z1)
    if m == 1 and abs(evaluator.j_derivative(z1)) < 1e-8 * max(1.0, abs(w0)):
        raise NumericalFailure(f"j'(Z1) ~ 0 at non-elliptic Z1={z1}")

    jf = lambda u: evaluator.j(u) - w0  # noqa: E731
    djf = evaluator.j_derivative

    # (3) ball about Z1: disjoint from its translates, j - w0 has only Z1 inside
    r = min(problem.ball_radius, 0.45 * translate_separation(z1), 0.5 * z1.imag)
    while True:
        if r < 1e-6:
            raise NumericalFailure(f"could not isolate Z1={z1}: ball shrank below 1e-6")
        try:
            if zero_count(jf, z1, r, djf) == m:
                break
        except ContourProximityError:
            pass
        r /= 2

    # (4) delta on the sampled boundary
    ring = z1 + r * np.exp(2j * np.pi * np.arange(CONTOUR_SAMPLES) / CONTOUR_SAMPLES)
    delta = float(np.min(np.abs(evaluator.j_array(ring) - w0)))

    info = {"w0": w0, "Z1": z1, "radius": r, "delta": delta, "multiplicity": m}
    # (5) translates toward x0
    seq = orbit_toward(x0, z1, problem.orbit_depth)
    if seq.truncated:
        diagnostics.append(seq.warning)
    witnesses = []
    for k, gamma in enumerate(seq.matrices, start=1):
        if len(witnesses) >= problem.count:
            break
        images = [act(gamma, u) for u in ring]
        if any(z.imag <= 0 for z in images):
            diagnostics.append(f"k={k}: translated contour left the half-plane")
            continue
        sup = max(abs(target.value_near(z, w0) - w0) for z in images)
        if sup >= delta / (2 * SAFETY):
            diagnostics.append(f"k={k}: margin not met (sup {sup:.3e} >= delta/{2 * SAFETY:g} = {delta / (2 * SAFETY):.3e})")
            continue

        # G on gamma B pulled back to B; j(gamma u) = j(u)
        def H(u, gamma=gamma):
            return target.G(act(gamma, u), evaluator.j(u))

        def dH(u, gamma=gamma):
            z = act(gamma, u)
            jz, dj = evaluator.j_and_derivative(u)
            # d/du G(gamma u, j(u)) = G_z(gamma u) gamma'(u) + G_w j'(u)
            if target.kind == "transcendental":
                return dj - target.dfunc(z) * gamma.derivative(u)
            return target.poly.dz(z, jz) * gamma.derivative(u) + target.poly.dw(z, jz) * dj

        try:
            count = zero_count(H, z1, r, dH)
        except NumericalFailure as exc:
            diagnostics.append(f"k={k}: zero count failed ({exc})")
            continue
        if count != m:
            diagnostics.append(f"k={k}: zero count {count} != local multiplicity {m}")
            continue
        try:
            u = newton_refine(H, dH, z1, tol=1e-14 * max(1.0, abs(w0)), contour=(z1, r), multiplicity=m)
        except NewtonError as exc:
            if exc.best is None or exc.residual > residual_tol:
                diagnostics.append(f"k={k}: {exc}")
                continue
            u = exc.best
        z = act(gamma, u)
        z, res, jz = _polish(target, evaluator, z, m)
        if res >= residual_tol:
            diagnostics.append(f"k={k}: residual {res:.3e} above {residual_tol:g}")
            continue
        center, radius = _circle_image(gamma, z1, r)
        cert = Certificate(center, radius, count, z1, r, gamma.entries)
        if any(_discs_overlap(cert, w.certificate) for w in witnesses):
            diagnostics.append(f"k={k}: certifying disc overlaps an earlier one")
            continue
        witnesses.append(Witness(z, jz, res, cert, k, x0, m))
    if len(witnesses) < problem.count:
        diagnostics.append(f"only {len(witnesses)} of {problem.count} witnesses within orbit depth {problem.orbit_depth}")
    return WitnessList(witnesses, diagnostics, info)


def _polish(target: TargetFunction, evaluator: ModularEvaluator, z: complex, m: int):
    """A few Newton steps directly in the z-plane; keeps the best residual."""
    jz, dj = evaluator.j_and_derivative(z)
    best = (z, abs(target.G(z, jz)), jz)
    for _ in range(3):
        if best[1] == 0:
            break
        d = target.dG(z, jz, dj)
        if d == 0:
            break
        z = z - m * target.G(z, jz) / d
        if not z.imag > 0:
            break
        jz, dj = evaluator.j_and_derivative(z)
        res = abs(target.G(z, jz))
        if res < best[1]:
            best = (z, res, jz)
        else:
            break
    return best


def witness_residual(target: TargetFunction, z: complex, evaluator: ModularEvaluator = DEFAULT_EVALUATOR) -> float:
    return abs(target.G(z, evaluator.j(z)))


def find_witnesses(P: BivariatePolynomial, targets, per_target: int = 3, ball_radius: float = 0.05,
                   orbit_depth: int = 12, branch: Optional[int] = None,
                   evaluator: ModularEvaluator = DEFAULT_EVALUATOR) -> WitnessList:
    """Witnesses of ``P(z, j(z)) = 0`` accumulating at each boundary target.

    A failing target is recorded in the diagnostics without failing the batch.
    Output is sorted by ``(target, orbit_index)``.
    """
    if not P.depends_on_w():
        raise PreconditionError("P must depend on w (dominant projection)")
    keys = [Fraction(t) if isinstance(t, (int, Fraction)) else t for t in targets]
    if len(set(keys)) != len(keys):
        raise PreconditionError("targets must be distinct")
    tf = TargetFunction.algebraic(P, branch=branch)
    out, diags, info = [], [], {}
    for x0 in keys:
        try:
            ws = rouche_localize(WitnessProblem(tf, x0, per_target, ball_radius, orbit_depth), evaluator)
        except (PreconditionError, NumericalFailure) as exc:
            diags.append(f"target {x0}: failed ({exc})")
            continue
        diags.extend(f"target {x0}: {d}" for d in ws.diagnostics)
        info[str(x0)] = ws.info
        out.extend(ws)
    out.sort(key=lambda w: (float(w.target), w.orbit_index))
    return WitnessList(out, diags, info)
