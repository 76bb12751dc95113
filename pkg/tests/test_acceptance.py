"""Acceptance suite: one test per criterion, each recording a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py`` (lines appear in the terminal
summary) or ``python3 tests/test_acceptance.py``.
"""
import cmath
import json
import math
import sys
import time
import warnings
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import quad

sys.path.insert(0, str(Path(__file__).parent))

from conftest import record_criterion  # noqa: E402
from naive_broad import naive_is_broad  # noqa: E402
from test_product import POOL, all_varieties  # noqa: E402

from jwitness.cli import main as cli_main  # noqa: E402
from jwitness.geometry import (  # noqa: E402
    ball_euclidean_extent, bergman_distance, caratheodory_extremal, disk_automorphism, disk_distance, disk_geodesic,
)
from jwitness.modgroup import RealMatrix, UnimodularMatrix, act, orbit_toward  # noqa: E402
from jwitness.modular import DEFAULT_EVALUATOR as EV, RHO, canonical_representative  # noqa: E402
from jwitness.product import SplitProfile, density_search, is_broad, planted_target  # noqa: E402
from jwitness.special import class_polynomial, special_scan  # noqa: E402
from jwitness.witness import (  # noqa: E402
    EXP, BivariatePolynomial, WitnessProblem, find_witnesses, linear_target_poly, rouche_localize,
)

SEED = 12345
SQRT2 = RealMatrix(1, math.sqrt(2), 0, 1)
LINEAR_TARGETS = [Fraction(1, 3), Fraction(1, 2), Fraction(2, 3)]


def check(number, conditions, detail):
    ok = all(conditions.values())
    failed = [k for k, v in conditions.items() if not v]
    record_criterion(number, ok, detail + (f"  [failed: {', '.join(failed)}]" if failed else ""))
    assert ok, f"criterion {number}: failed {failed}; {detail}"


def random_gamma(rng, bound):
    while True:
        c, d = (int(v) for v in rng.integers(-bound, bound + 1, 2))
        if (c, d) == (0, 0) or math.gcd(c, d) != 1:
            continue
        # a d - b c = 1 by brute force over a small window
        for a in range(-bound, bound + 1):
            if c == 0:
                if a * d == 1:
                    return UnimodularMatrix(a, int(rng.integers(-bound, bound + 1)), 0, d)
                continue
            if (a * d - 1) % c == 0:
                b = (a * d - 1) // c
                if abs(b) <= bound:
                    return UnimodularMatrix(a, b, c, d)


@pytest.fixture(scope="module")
def linear_witnesses():
    t = time.perf_counter()
    ws = find_witnesses(linear_target_poly(1, 0), LINEAR_TARGETS, 3)
    return ws, time.perf_counter() - t


def test_criterion_01_j_function():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)
    e_i = abs(EV.j(1j) - 1728)
    e_rho = abs(EV.j(RHO))
    e_2i = abs(EV.j(2j) - 287496) / 287496
    auto = 0.0
    for _ in range(200):
        g = random_gamma(rng, 20)
        z = complex(rng.uniform(-1, 1), rng.uniform(0.1, 3))
        jz = EV.j(z)
        auto = max(auto, abs(EV.j(act(g, z)) - jz) / (1 + abs(jz)))
    fd = 0.0
    for _ in range(50):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 2.5))
        if min(abs(z - 1j), abs(z - RHO), abs(z - RHO - 1)) < 0.1:
            continue
        h = 1e-5
        d = (EV.j(z + h) - EV.j(z - h)) / (2 * h)
        fd = max(fd, abs(EV.j_derivative(z) - d) / abs(d))
    dt = time.perf_counter() - t0
    check(1, {"j(i)": e_i < 1e-9, "j(rho)": e_rho < 1e-9, "j(2i)": e_2i < 1e-6, "automorphy": auto < 1e-9,
              "derivative": fd < 1e-6, "runtime": dt < 5},
          f"|j(i)-1728|={e_i:.1e} |j(rho)|={e_rho:.1e} rel j(2i)={e_2i:.1e} automorphy={auto:.1e} "
          f"j' vs FD={fd:.1e} t={dt:.2f}s")


def test_criterion_02_metric():
    t0 = time.perf_counter()
    rng = np.random.default_rng(SEED)

    def disk(n, r=0.95):
        return r * np.sqrt(rng.random(n)) * np.exp(2j * np.pi * rng.random(n))

    inv = 0.0
    for a, z, w, th in zip(disk(1000, 0.9), disk(1000), disk(1000), rng.uniform(0, 2 * np.pi, 1000)):
        m = disk_automorphism(a, th)
        inv = max(inv, abs(bergman_distance(m(z), m(w)) - bergman_distance(z, w)))
    quad_err = 0.0
    for z, w in zip(disk(100, 0.9), disk(100, 0.9)):
        u = (w - z) / (1 - z.conjugate() * w)
        g = disk_geodesic(z, w)
        speed = lambda t: abs(u * (1 - abs(z) ** 2) / (1 + z.conjugate() * t * u) ** 2) / (1 - abs(g(t)) ** 2)  # noqa: E731
        length, _ = quad(speed, 0, 1, epsabs=1e-12, epsrel=1e-12, limit=200)
        quad_err = max(quad_err, abs(length - disk_distance(z, w)))
    contraction = True
    for _ in range(500):
        z, w = tuple(disk(2)), tuple(disk(2))
        f = caratheodory_extremal(z, w)
        contraction &= disk_distance(f(z), f(w)) <= bergman_distance(z, w) + 1e-12
    dt = time.perf_counter() - t0
    check(2, {"invariance": inv < 1e-10, "quadrature": quad_err < 1e-8, "contraction": contraction,
              "runtime": dt < 10},
          f"invariance={inv:.1e} quadrature={quad_err:.1e} contraction={contraction} t={dt:.2f}s")


def test_criterion_03_shrinkage():
    t0 = time.perf_counter()
    ts = [10.0**-k for k in range(1, 6)]
    ext = [ball_euclidean_extent((1 - t, 1 - t), 1.0) for t in ts]
    s = math.tanh(1.0)
    t = 1e-3
    radius_formula = math.sqrt(2) * s * 2 * t / (1 - s * s * (1 - t) ** 2)
    dt = time.perf_counter() - t0
    check(3, {"decreasing": all(a > b for a, b in zip(ext, ext[1:])), "t=1e-3 below 0.02": ext[2] < 0.02,
              "bounds hyperbolic-disk radius": ext[2] >= radius_formula * (1 - 1e-9), "runtime": dt < 1},
          f"extent(t=1e-3)={ext[2]:.4g} (disk-radius formula {radius_formula:.4g}) "
          f"sequence={[float(f'{e:.3g}') for e in ext]}")


def test_criterion_04_orbits():
    t0 = time.perf_counter()
    x0 = math.sqrt(2) - 1
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        seq = orbit_toward(x0, 2j, 30)
    errs = seq.errors()
    k_hit = next((k for k, e in enumerate(errs, start=1) if e < 1e-8), None)
    rat = orbit_toward(Fraction(1, 2), 1j, 40)
    rat_err = rat.errors()[-1]
    dt = time.perf_counter() - t0
    check(4, {"sqrt2-1 within 1e-8 by k<=30": k_hit is not None and k_hit <= 30,
              "1/2 within 1e-6 by k=40": rat_err < 1e-6, "runtime": dt < 1},
          f"sqrt2-1: first k with err<1e-8 = {k_hit}; 1/2: err at k=40 = {rat_err:.2e} "
          f"(parabolic orbits approach like 1/(4k))")


def test_criterion_05_linear_witnesses(linear_witnesses):
    ws, dt = linear_witnesses
    zc = all(w.certificate.zero_count == 1 for w in ws)
    res = max(w.residual for w in ws)
    near = True
    for x0 in LINEAR_TARGETS:
        own = [w for w in ws if w.target == x0]
        if own:
            deepest = max(own, key=lambda w: w.orbit_index)
            near &= abs(deepest.z - float(x0)) < 0.1
        else:
            near = False
    check(5, {"count>=5": len(ws) >= 5, "zero_count=1": zc, "residual<1e-8": res < 1e-8, "near targets": near,
              "runtime": dt < 60},
          f"{len(ws)} witnesses over {len(LINEAR_TARGETS)} targets, max residual {res:.1e}, t={dt:.2f}s")


def test_criterion_06_exp_witnesses():
    t0 = time.perf_counter()
    ws = rouche_localize(WitnessProblem(EXP, Fraction(1, 2), 3))
    res = max((abs(EV.j(w.z) - cmath.exp(w.z)) for w in ws), default=math.inf)
    dt = time.perf_counter() - t0
    check(6, {"count>=3": len(ws) >= 3, "residual<1e-8": res < 1e-8,
              "certified": all(w.certificate.zero_count == 1 for w in ws), "runtime": dt < 60},
          f"{len(ws)} witnesses of j(z)=exp(z) at x0=1/2, max |j(z)-e^z| {res:.1e}, t={dt:.2f}s")


def elliptic_witness_sets():
    w1728 = find_witnesses(BivariatePolynomial({(0, 1): 1, (0, 0): -1728}), [0, Fraction(1, 2)], 2)
    w0 = find_witnesses(BivariatePolynomial({(0, 1): 1}), [Fraction(1, 3), Fraction(1, 2)], 2)
    return w1728, w0


def test_criterion_07_identification():
    w1728, w0 = elliptic_witness_sets()
    d_i = max(abs(canonical_representative(w.z) - 1j) for w in w1728)
    d_rho = max(abs(canonical_representative(w.z) - RHO) for w in w0)
    check(7, {"nonempty": len(w1728) > 0 and len(w0) > 0, "w-1728 -> i": d_i < 1e-8, "w -> rho": d_rho < 1e-8},
          f"{len(w1728)} witnesses of w-1728 (max dist to i {d_i:.1e}), "
          f"{len(w0)} of w (max dist to rho {d_rho:.1e})")


def test_criterion_08_density():
    t0 = time.perf_counter()
    gamma_star = UnimodularMatrix(5, -3, 7, -4)
    c1 = 2 + 1j
    c2 = planted_target(SQRT2, gamma_star, c1)
    planted = density_search(SQRT2, c1, c2, 10)
    e5 = density_search(SQRT2, 0, 1728, 5).err2
    e100 = density_search(SQRT2, 0, 1728, 100).err2
    dt = time.perf_counter() - t0
    check(8, {"planted err2<1e-9": planted.err2 < 1e-9, "height 100 beats 5": e100 < e5, "runtime": dt < 120},
          f"planted err2={planted.err2:.1e} (gamma {planted.gamma.entries}); (0,1728): err2 h5={e5:.4g} "
          f"h100={e100:.4g}; t={dt:.2f}s")


def test_criterion_09_broadness():
    mismatches, checked = 0, 0
    assert len(POOL) == 5
    for n in (1, 2, 3):
        profs = [SplitProfile.point(n), SplitProfile.full(n)] + [SplitProfile.coordinate_hyperplane(n, i)
                                                                  for i in range(n)]
        for L, rels, consts in all_varieties(n):
            for prof in profs:
                checked += 1
                mismatches += bool(is_broad(L, prof)) != naive_is_broad(n, rels, consts, prof.dims_W)
    check(9, {"exact agreement": mismatches == 0}, f"{checked} (variety, profile) cases, {mismatches} mismatches")


def test_criterion_10_class_polynomials():
    t0 = time.perf_counter()
    polys = {D: class_polynomial(D) for D in (-4, -3, -163, -23)}
    gap = max(H.rounding_gap for H in polys.values())
    dt = time.perf_counter() - t0
    check(10, {"H-4": polys[-4].coefficients == (-1728, 1), "H-3": polys[-3].coefficients == (0, 1),
               "H-163": polys[-163].coefficients == (640320**3, 1), "deg H-23": polys[-23].degree == 3,
               "gap<1e-3": gap < 1e-3, "runtime": dt < 5},
          f"H_-23 = {polys[-23]}; max rounding gap {gap:.1e}; t={dt:.2f}s")


def test_criterion_11_special_scan(linear_witnesses):
    ws, _ = linear_witnesses
    rep = special_scan(ws, 100, 1e-6)
    well_formed = rep.total == len(ws) and 0 <= rep.flagged <= rep.total and all(
        f.form.discriminant < 0 and abs(f.form(f.point)) < 1e-6 for f in rep.flags if f.special)
    w1728, _ = elliptic_witness_sets()
    rep1728 = special_scan(w1728, 100, 1e-6)
    check(11, {"well-formed": well_formed, "w-1728 fully flagged": rep1728.flagged == rep1728.total > 0},
          f"w-z set: {rep.flagged}/{rep.total} flagged; w-1728 set: {rep1728.flagged}/{rep1728.total} flagged "
          f"(forms {[(f.a, f.b, f.c) for f in rep1728.forms()]})")


def test_criterion_12_determinism(tmp_path):
    commands = {
        "5": ["witness", "--poly", "w - z", "--targets", "1/3", "1/2", "2/3", "--count", "3"],
        "6": ["witness", "--rhs", "exp", "--targets", "1/2", "--count", "3"],
        "8": ["product-density", "--g", "1", "sqrt(2)", "0", "1", "--c1", "0", "--c2", "1728", "--height", "100"],
    }
    same = {}
    for name, argv in commands.items():
        texts = []
        for rep in range(2):
            path = tmp_path / f"c{name}_{rep}.json"
            assert cli_main(argv + ["--seed", "7", "-o", str(path)]) == 0
            rec = json.loads(path.read_text())
            rec.pop("timings_ms")
            texts.append(json.dumps(rec, sort_keys=True))
        same[f"criterion {name}"] = texts[0] == texts[1]
    check(12, same, "repeated CLI runs identical modulo timings: " + ", ".join(f"{k}={v}" for k, v in same.items()))


if __name__ == "__main__":
    code = pytest.main([__file__, "-q"])
    sys.exit(code)
