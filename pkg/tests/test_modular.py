import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from jwitness.errors import PreconditionError
from jwitness.modgroup import UnimodularMatrix, act, in_fundamental_domain
from jwitness.modular import (
    RHO, ModularEvaluator, QSeries, eisenstein_coefficients, eta_product_coefficients, eval_j,
    eval_j_derivative, invert_j, j_coefficients,
)

EV = ModularEvaluator()


def kleinj(z):
    return complex(1728 * mpmath.kleinj(z))


def test_series_coefficients():
    assert eisenstein_coefficients(4, 3) == (1, 240, 2160, 6720)
    assert eisenstein_coefficients(6, 3) == (1, -504, -16632, -122976)
    # Ramanujan tau: 1, -24, 252, -1472, 4830
    assert eta_product_coefficients(4) == (1, -24, 252, -1472, 4830)
    assert j_coefficients(3) == (1, 744, 196884, 21493760)


def test_qseries_validation():
    with pytest.raises(PreconditionError):
        QSeries((1,), 4)
    with pytest.raises(PreconditionError):
        ModularEvaluator(0)


def test_special_values():
    assert abs(eval_j(1j) - 1728) < 1e-9
    assert abs(eval_j(RHO)) < 1e-9
    v = eval_j(2j)
    assert abs(v - 287496) / 287496 < 1e-6
    assert abs(ModularEvaluator(100).j(2j) - 287496) < 1e-6


def test_matches_mpmath_kleinj(rng):
    for _ in range(50):
        z = complex(rng.uniform(-1, 1), rng.uniform(0.3, 3))
        ref = kleinj(z)
        assert abs(eval_j(z) - ref) <= 1e-10 * max(1.0, abs(ref))


def test_series_and_quotient_agree(rng):
    for _ in range(20):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(0.9, 2))
        a, b = EV.j(z), EV.j_from_series(z)
        assert abs(a - b) <= 1e-10 * abs(a)


def test_derivative_vanishes_at_elliptic_points():
    assert abs(eval_j_derivative(1j)) < 1e-8
    assert abs(eval_j_derivative(RHO)) < 1e-8


def test_derivative_finite_differences():
    z, h = 1.5j, 1e-5
    fd = (eval_j(z + h) - eval_j(z - h)) / (2 * h)
    assert abs(eval_j_derivative(z) - fd) <= 1e-6 * abs(fd)


def test_derivative_eisenstein_identity(rng):
    # dj/dz = -2 pi i E6/E4 j, an identity independent of the differentiated j-series
    for _ in range(30):
        z = complex(rng.uniform(-1, 1), rng.uniform(0.2, 2))
        if abs(EV.modular_form("E4", z)) < 1e-6:
            continue
        ref = -2j * math.pi * EV.modular_form("E6", z) / EV.modular_form("E4", z) * EV.j(z)
        assert abs(EV.j_derivative(z) - ref) <= 1e-8 * max(1.0, abs(ref))


def test_modular_forms_transform_with_weight(rng):
    for _ in range(20):
        z = complex(rng.uniform(-0.5, 0.5), rng.uniform(1, 2))
        g = UnimodularMatrix(2, 1, 5, 3)
        gz = act(g, z)
        for name, k in (("E4", 4), ("E6", 6), ("Delta", 12)):
            lhs = EV.modular_form(name, gz)
            rhs = (g.c * z + g.d) ** k * EV.modular_form(name, z)
            assert abs(lhs - rhs) <= 1e-9 * abs(rhs)


def _random_gamma(rng, bound):
    while True:
        c, d = rng.integers(-bound, bound + 1, 2)
        if math.gcd(int(c), int(d)) != 1:
            continue
        from jwitness.modgroup import _ext_gcd

        _, s, t = _ext_gcd(int(d), int(c))
        a, b = s, -t
        k = int(rng.integers(-3, 4))
        m = UnimodularMatrix(a + k * int(c), b + k * int(d), int(c), int(d))
        if m.height <= bound:
            return m


def test_automorphy(rng):
    worst = 0.0
    for _ in range(200):
        g = _random_gamma(rng, 20)
        z = complex(rng.uniform(-1, 1), rng.uniform(0.1, 3))
        jz = eval_j(z)
        worst = max(worst, abs(eval_j(act(g, z)) - jz) / (1 + abs(jz)))
    assert worst < 1e-9


@settings(max_examples=50)
@given(st.floats(1, 3))
def test_real_on_imaginary_axis(t):
    assert abs(eval_j(1j * t).imag) < 1e-10 * max(1.0, abs(eval_j(1j * t)))


@settings(max_examples=50)
@given(st.floats(math.pi / 2, 2 * math.pi / 3))
def test_real_on_unit_arc(theta):
    z = cmath.exp(1j * theta)
    assert abs(eval_j(z).imag) < 1e-9


def test_truncation_convergence():
    with mpmath.workdps(300):
        z = mpmath.mpc(0.31, 0.87)
        diffs = []
        for M in (30, 60, 120):
            a = ModularEvaluator(M, dps=300).j(z)
            b = ModularEvaluator(2 * M, dps=300).j(z)
            diffs.append(float(abs(a - b)))
    assert diffs[1] < 0.1 * diffs[0] and diffs[2] < 0.1 * diffs[1]


def test_truncation_bound_is_tiny():
    assert EV.truncation_bound() < 1e-100
    assert ModularEvaluator(10).truncation_bound() > EV.truncation_bound()


def test_mp_mode_heegner():
    ev = ModularEvaluator(40, dps=50)
    with mpmath.workdps(50):
        v = ev.j((1 + mpmath.sqrt(-163)) / 2)
        assert abs(v + 640320**3) < 1e-15


def test_inversion_examples():
    assert invert_j(1728) == 1j
    assert invert_j(0) == RHO
    assert abs(invert_j(287496) - 2j) < 1e-9


def test_inversion_right_inverse(rng):
    for _ in range(100):
        r = 10 ** rng.uniform(-3, 6)
        c = r * cmath.exp(2j * math.pi * rng.random())
        z = invert_j(c)
        assert in_fundamental_domain(z, 1e-9)
        assert abs(eval_j(z) - c) < 1e-8 * max(1.0, abs(c))


def test_vectorized_matches_scalar(rng):
    z = rng.uniform(-2, 2, 100) + 1j * rng.uniform(0.05, 2, 100)
    a = EV.j_array(z)
    for zi, ai in zip(z, a):
        assert abs(ai - EV.j(complex(zi))) <= 1e-10 * max(1.0, abs(ai))
    with pytest.raises(PreconditionError):
        ModularEvaluator(20, dps=30).j_array(z)


def test_rejects_lower_half_plane():
    with pytest.raises(PreconditionError):
        eval_j(1 - 1j)
