from decimal import Decimal, localcontext
from fractions import Fraction
import math

from hypothesis import given, settings, strategies as st
import pytest

from almostred.arithmetic import beta_upper, cf_expand, frequency_from_config, select_scale
from almostred.errors import InsufficientDepth, InvalidInput, NonFinite


def test_golden_fibonacci():
    f = cf_expand("golden", 6)
    assert f.partial_quotients[1:] == (1,) * 5
    assert f.q == [1, 1, 2, 3, 5, 8]


def test_sqrt2m1_pell():
    f = cf_expand("sqrt2m1", 5)
    assert f.partial_quotients[1:] == (2,) * 4
    assert f.q == [1, 2, 5, 12, 29]


def test_rational_flagged():
    f = cf_expand(0.5, 10)
    assert f.rational
    assert f.partial_quotients == (0, 2)
    assert f.q == [1, 2]


def test_decimal_string_is_exact():
    f = cf_expand("0.25", 10)
    assert f.rational and f.q == [1, 4]


def test_bad_inputs():
    with pytest.raises(NonFinite):
        cf_expand(float("nan"), 5)
    with pytest.raises(InvalidInput):
        cf_expand(1.5, 5)
    with pytest.raises(InvalidInput):
        cf_expand("golden", 0)


def test_large_denominators_exact():
    f = cf_expand("golden", 100)
    a, b = 1, 1
    for q in f.q[2:]:
        a, b = b, a + b
        assert q == b
    assert f.q[-1] > 10 ** 18


def test_named_reconstruction_depth_40():
    # depth-40 convergent of the golden mean is only ~q_39^-2 ~ 1e-16 away
    f = cf_expand("golden", 40)
    p, q = f.convergents[-1]
    err = abs(f.value - Fraction(p, q))
    assert err < Fraction(1, q * q)
    deep = cf_expand("golden", 160)
    with localcontext() as ctx:
        ctx.prec = 80
        exact = (Decimal(5).sqrt() - 1) / 2
        rec = Decimal(deep.convergents[-1][0]) / Decimal(deep.convergents[-1][1])
        assert abs(rec - exact) < Decimal("1e-30")


@settings(max_examples=200, deadline=None)
@given(st.fractions(min_value=Fraction(1, 10 ** 6), max_value=Fraction(999999, 10 ** 6)),
       st.integers(min_value=1, max_value=30))
def test_recurrence_and_approximation(x, depth):
    f = cf_expand(x, depth)
    a = f.partial_quotients
    for n in range(2, f.depth):
        p, q = f.convergents[n]
        assert p == a[n] * f.convergents[n - 1][0] + f.convergents[n - 2][0]
        assert q == a[n] * f.convergents[n - 1][1] + f.convergents[n - 2][1]
    for p, q in f.convergents:
        assert abs(f.value - Fraction(p, q)) <= Fraction(1, q * q)
    if f.rational:
        assert f.reconstruct() == f.value


@pytest.mark.parametrize("name", ["golden", "sqrt2m1"])
def test_beta_upper_monotone(name):
    f = cf_expand(name, 40)
    vals = [beta_upper(f, (lo, 30)) for lo in range(5, 25)]
    assert all(b <= a for a, b in zip(vals, vals[1:]))


def test_beta_upper_values():
    f = cf_expand("golden", 40)
    assert beta_upper(f, (3, 10)) == pytest.approx(math.log(5) / 3)
    assert beta_upper(f, (15, 25)) < 0.01


def test_beta_upper_rational_depth():
    with pytest.raises(InsufficientDepth, match="rational"):
        beta_upper(cf_expand(0.5, 10), (0, 3))


def test_select_scale():
    assert select_scale(cf_expand("golden", 20), 35)[0] == 34
    assert select_scale(cf_expand("golden", 20), 1)[0] == 1
    assert select_scale(cf_expand("sqrt2m1", 20), 12)[0] == 12


def test_config_builder():
    assert frequency_from_config({"kind": "golden"}).name == "golden"
    f = frequency_from_config({"kind": "decimal", "value": "0.3819660112501051", "depth": 12})
    assert f.depth == 12
    with pytest.raises(InvalidInput):
        frequency_from_config({"kind": "pi"})
