"""Möbius subvarieties of H^n, Hodge-genericity and broadness tests, and the
density search for ``(j(tau), j(g tau))`` hitting a target in C^2.

Coordinates are indexed from 0.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import PreconditionError
from .modgroup import RealMatrix, UnimodularMatrix, unimodular_matrices
from .modular import DEFAULT_EVALUATOR, ModularEvaluator

CONSISTENCY_TOL = 1e-9


def _proj_close(A: np.ndarray, B: np.ndarray, tol: float) -> bool:
    """Equality in PSL2(R): A = +-B."""
    scale = max(1.0, float(np.max(np.abs(A))), float(np.max(np.abs(B))))
    return bool(min(np.max(np.abs(A - B)), np.max(np.abs(A + B))) <= tol * scale)


def _act_np(M: np.ndarray, z: complex) -> complex:
    return (M[0, 0] * z + M[0, 1]) / (M[1, 0] * z + M[1, 1])


@dataclass
class MoebiusVariety:
    """``{x in H^n : x_i = g x_j for each relation, x_k = c for each constant}``."""

    n: int
    relations: list = field(default_factory=list)
    constants: list = field(default_factory=list)

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError("n must be >= 1")
        for i, j, g in self.relations:
            self._check_index(i)
            self._check_index(j)
            if i == j:
                raise PreconditionError("a relation must link two distinct coordinates")
            if not isinstance(g, (RealMatrix, UnimodularMatrix)):
                raise PreconditionError("relation matrices must be RealMatrix or UnimodularMatrix")
        for i, c in self.constants:
            self._check_index(i)
            if not complex(c).imag > 0:
                raise PreconditionError("constant coordinates must lie in the upper half-plane")
        self._build()

    def _check_index(self, i):
        if not 0 <= i < self.n:
            raise PreconditionError(f"coordinate index {i} out of range for n={self.n}")

    def _build(self):
        adj = {i: [] for i in range(self.n)}
        for i, j, g in self.relations:
            G = g.array().astype(float)
            adj[j].append((i, G))                 # x_i = G x_j
            adj[i].append((j, np.linalg.inv(G)))  # x_j = G^-1 x_i
        root = [-1] * self.n
        frame = [None] * self.n  # x_i = frame[i] x_root
        for s in range(self.n):
            if root[s] >= 0:
                continue
            root[s], frame[s] = s, np.eye(2)
            stack = [s]
            while stack:
                u = stack.pop()
                for v, G in adj[u]:
                    M = G @ frame[u]
                    if root[v] < 0:
                        root[v], frame[v] = s, M
                        stack.append(v)
                    elif not _proj_close(frame[v], M, CONSISTENCY_TOL):
                        raise PreconditionError(f"relation cycle through coordinates {u}, {v} is inconsistent")
        self._root, self._frame = root, frame
        fixed = {}
        for i, c in self.constants:
            r = root[i]
            # value of the root coordinate implied by x_i = c
            x_root = _act_np(np.linalg.inv(frame[i]), complex(c))
            if r in fixed and abs(fixed[r] - x_root) > CONSISTENCY_TOL * max(1.0, abs(x_root)):
                raise PreconditionError(f"constant coordinates in the component of {r} disagree")
            fixed[r] = x_root
        self._fixed = fixed

    def components(self) -> list:
        """Coordinate sets of the connected components of the relation graph."""
        out = {}
        for i, r in enumerate(self._root):
            out.setdefault(r, []).append(i)
        return [tuple(v) for _, v in sorted(out.items())]

    def free_components(self) -> list:
        return [c for c in self.components() if self._root[c[0]] not in self._fixed]

    @property
    def dimension(self) -> int:
        return len(self.free_components())

    def projection_dimension(self, subset) -> int:
        """Dimension of the image of the variety under the projection to ``subset``."""
        s = set(subset)
        return sum(1 for c in self.free_components() if s.intersection(c))

    def composite(self, i: int, k: int):
        """``M`` with ``x_i = M x_k`` if i and k are related, else None."""
        if self._root[i] != self._root[k]:
            return None
        return self._frame[i] @ np.linalg.inv(self._frame[k])

    def point(self, params) -> np.ndarray:
        """A point of the variety from one parameter per free component."""
        params = list(params)
        out = np.empty(self.n, dtype=complex)
        free = {c[0]: p for c, p in zip(self.free_components(), params)}
        for i in range(self.n):
            r = self._root[i]
            x_root = self._fixed[r] if r in self._fixed else free[r]
            out[i] = _act_np(self._frame[i], x_root)
        return out


# --- split profiles and broadness ----------------------------------------------------

def nonempty_subsets(n: int) -> list:
    return [frozenset(c) for k in range(1, n + 1) for c in itertools.combinations(range(n), k)]


@dataclass
class SplitProfile:
    """Dimensions of the coordinate projections of a subvariety W of C^n."""

    n: int
    dims_W: dict

    def __post_init__(self):
        self.dims_W = {frozenset(k): int(v) for k, v in self.dims_W.items()}
        subsets = nonempty_subsets(self.n)
        missing = [tuple(sorted(s)) for s in subsets if s not in self.dims_W]
        if missing:
            raise PreconditionError(f"profile misses subsets {missing[:4]}")
        for s in subsets:
            d = self.dims_W[s]
            if not 0 <= d <= len(s):
                raise PreconditionError(f"dims_W{tuple(sorted(s))} = {d} outside [0, {len(s)}]")
        for s in subsets:
            for t in subsets:
                if s < t and self.dims_W[s] > self.dims_W[t]:
                    raise PreconditionError(
                        f"dims_W not monotone: {tuple(sorted(s))} -> {self.dims_W[s]} > {tuple(sorted(t))} -> {self.dims_W[t]}"
                    )

    @classmethod
    def point(cls, n):
        return cls(n, {s: 0 for s in nonempty_subsets(n)})

    @classmethod
    def full(cls, n):
        return cls(n, {s: len(s) for s in nonempty_subsets(n)})

    @classmethod
    def coordinate_hyperplane(cls, n, i):
        """``W = {w_i = c}``."""
        return cls(n, {s: len(s) - (i in s) for s in nonempty_subsets(n)})

    @classmethod
    def generic_hyperplane(cls, n):
        """A hyperplane involving every coordinate: onto every proper projection."""
        return cls(n, {s: len(s) - (len(s) == n) for s in nonempty_subsets(n)})


@dataclass(frozen=True)
class BroadReport:
    broad: bool
    failing_subset: tuple | None

    def __bool__(self):
        return self.broad


def is_broad(L: MoebiusVariety, profile: SplitProfile) -> BroadReport:
    """Broad iff ``dim p_I(L) + dims_W(I) >= |I|`` for every nonempty subset I."""
    if profile.n != L.n:
        raise PreconditionError("profile and variety have different ambient dimension")
    for s in nonempty_subsets(L.n):
        if L.projection_dimension(s) + profile.dims_W[s] < len(s):
            return BroadReport(False, tuple(sorted(s)))
    return BroadReport(True, None)


# --- Hodge genericity ----------------------------------------------------------------

@dataclass(frozen=True)
class HodgeReport:
    generic: bool
    diagnostics: tuple
    heuristic: bool = True  # non-rationality is only certified up to the denominator bound

    def __bool__(self):
        return self.generic


def rational_approximation(x: float, denom_bound: int) -> Fraction:
    return Fraction(x).limit_denominator(denom_bound)


def is_rational_matrix(M: np.ndarray, denom_bound: int, tol: float):
    """Whether ``M`` is a scalar multiple of a rational matrix.

    Entries are divided by the smallest-magnitude nonzero entry and each
    quotient is matched against its best rational approximation with
    denominator ``<= denom_bound``.  Returns ``(flag, worst_gap)``.
    """
    flat = np.asarray(M, dtype=float).ravel()
    nz = flat[np.abs(flat) > tol * max(1.0, float(np.max(np.abs(flat))))]
    pivot = nz[np.argmin(np.abs(nz))]
    worst = 0.0
    for x in flat / pivot:
        if abs(x) <= tol:
            continue
        gap = abs(x - float(rational_approximation(x, denom_bound)))
        worst = max(worst, gap / max(1.0, abs(x)))
    return worst <= tol, worst


def is_hodge_generic(L: MoebiusVariety, denom_bound: int = 10**6, tol: float = 1e-12) -> HodgeReport:
    diags = []
    for i, _ in L.constants:
        diags.append(f"coordinate {i} is constant (variety not free)")
    for i, j, g in L.relations:
        if abs(np.linalg.det(g.array()) - 1) > 1e-9:
            diags.append(f"relation x{i} = g x{j}: det g != 1")
    for comp in L.components():
        for i, k in itertools.combinations(comp, 2):
            rational, gap = is_rational_matrix(L.composite(i, k), denom_bound, tol)
            if rational:
                diags.append(f"relation x{i} = M x{k} is rational up to scale (gap {gap:.2e}, denominators <= {denom_bound})")
    generic = not diags
    if generic:
        diags.append(f"no rational relation found with denominators <= {denom_bound} at tol {tol:g} (numeric certificate)")
    return HodgeReport(generic, tuple(diags))


# --- density search ---------------------------------------------------------------------

@dataclass(frozen=True)
class DensityResult:
    tau: complex
    err1: float
    err2: float
    gamma: UnimodularMatrix
    tau0: complex
    height: int
    candidates: int
    hodge: HodgeReport


def _orbit_points(tau0: complex, mats: np.ndarray) -> np.ndarray:
    a, b, c, d = (mats[:, k].astype(float) for k in range(4))
    return (a * tau0 + b) / (c * tau0 + d)


def second_coordinate_j(g: RealMatrix, taus, evaluator: ModularEvaluator = DEFAULT_EVALUATOR) -> np.ndarray:
    """``j(g tau)`` for an array of tau, on the same vectorized path the search uses."""
    taus = np.atleast_1d(np.asarray(taus, dtype=complex))
    G = g.array()
    w = (G[0, 0] * taus + G[0, 1]) / (G[1, 0] * taus + G[1, 1])
    return evaluator.j_array(w)


def planted_target(g: RealMatrix, gamma: UnimodularMatrix, c1: complex,
                   evaluator: ModularEvaluator = DEFAULT_EVALUATOR) -> complex:
    """``c2 = j(g gamma tau0)`` with ``tau0 = invert_j(c1)``."""
    tau0 = evaluator.invert(c1)
    tau = _orbit_points(tau0, np.array([gamma.entries], dtype=np.int64))
    return complex(second_coordinate_j(g, tau, evaluator)[0])


def density_search(g: RealMatrix, c1: complex, c2: complex, height: int,
                   evaluator: ModularEvaluator = DEFAULT_EVALUATOR,
                   denom_bound: int = 10**6, tol: float = 1e-12) -> DensityResult:
    """Best ``tau = gamma tau0`` (entries <= height) for ``j(g tau) ~ c2`` with ``j(tau0) = c1``.

    Ties in ``err2`` go to the lexicographically smallest ``(a, b, c, d)``.
    """
    if height < 1:
        raise PreconditionError("height must be >= 1")
    hodge = is_hodge_generic(MoebiusVariety(2, [(1, 0, g)]), denom_bound, tol)
    if not hodge:
        raise PreconditionError("g is rational: " + "; ".join(hodge.diagnostics))
    c1, c2 = complex(c1), complex(c2)
    tau0 = evaluator.invert(c1)
    err1 = abs(evaluator.j(tau0) - c1)
    mats = unimodular_matrices(height)
    taus = _orbit_points(tau0, mats)
    err2 = np.abs(second_coordinate_j(g, taus, evaluator) - c2)
    order = np.lexsort([mats[:, k] for k in range(3, -1, -1)] + [err2])
    best = int(order[0])
    return DensityResult(
        complex(taus[best]), float(err1), float(err2[best]),
        UnimodularMatrix(*(int(v) for v in mats[best])), tau0, height, len(mats), hodge,
    )
