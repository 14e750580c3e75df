import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linv.padic import (
    EscalatePrecision,
    NotInvertible,
    NotLiftableHere,
    PadicNumber,
    PrecisionExhausted,
    SlopeUndetermined,
    TruncatedSeries,
    ValuationBound,
    hensel_root,
    newton_polygon,
    poly_divide_linear,
    rev_eval,
    series_inv,
    val,
)


def test_val_examples():
    assert val(PadicNumber.from_int(5, 75)) == 2
    assert val(PadicNumber.from_int(7, 3)) == 0
    z = PadicNumber.zero(7, 10)
    assert val(z) == ValuationBound(10)


def test_mul_negative_valuation():
    x = PadicNumber(5, 2, 1, 20)
    y = PadicNumber(5, 3, -2, 20)
    z = x * y
    assert z.val == -1 and z.unit % 5 ** 5 == 6


def test_add_absorbs_below_precision():
    x = PadicNumber(5, 1, 0, 10)
    y = PadicNumber(5, 1, 10, 12)  # 5^10, known mod 5^12
    z = x + y
    assert z.absprec == 10
    assert z.val == 0 and z.unit == 1


def test_div_by_precision_zero():
    one = PadicNumber.one(5)
    z = PadicNumber.zero(5, 8)
    with pytest.raises(PrecisionExhausted) as e:
        one / z
    assert e.value.val_lower_bound == 8


def test_precision_rules_add_mul_div():
    x = PadicNumber(7, 3, 2, 9)    # rel 7
    y = PadicNumber(7, 5, -1, 4)   # rel 5
    assert (x + y).absprec == 4
    z = x * y
    assert z.val == 1 and z.relprec == 5 and z.absprec == 6
    w = x / y
    assert w.val == 3 and w.relprec == 5


@settings(max_examples=300, deadline=None)
@given(
    st.integers(min_value=-(10 ** 9), max_value=10 ** 9),
    st.integers(min_value=-(10 ** 9), max_value=10 ** 9),
)
def test_ultrametric_laws(a, b):
    p = 5
    x = PadicNumber.from_int(p, a, 25)
    y = PadicNumber.from_int(p, b, 25)
    z = x * y
    if a and b:
        assert z.val == x.val + y.val
    s = x + y
    if a and b and x.val != y.val:
        assert s.val == min(x.val, y.val)
    if a and b:
        sv = s.val if s.unit else s.absprec
        assert sv >= min(x.val, y.val)


def test_exact_arithmetic_roundtrip():
    p = 11
    x = PadicNumber.from_rational(p, -7, 30)
    y = PadicNumber.from_rational(p, 3, 30)
    z = x * y + y
    expect = PadicNumber.from_rational(p, -21 + 3, 30)
    assert z.congruent_to(expect)


def test_serialization_roundtrip():
    x = PadicNumber(13, 22, -3, 17)
    x2 = PadicNumber.from_json(13, x.to_json())
    assert x == x2
    z = PadicNumber.zero(13, 9)
    assert PadicNumber.from_json(13, z.to_json()) == z


# -- series ---------------------------------------------------------------


def geometric_check(p, a_int, prec, deg):
    a = PadicNumber.from_int(p, a_int, prec)
    f = TruncatedSeries(
        "t", p, [PadicNumber.one(p, prec), -a] + [PadicNumber.zero(p, prec)] * (deg - 1), prec
    )
    g = series_inv(f)
    acc = PadicNumber.one(p, prec)
    for i in range(deg + 1):
        assert g[i].congruent_to(acc, prec)
        acc = acc * a
    return g


def test_series_inv_geometric():
    geometric_check(5, 3, 10, 8)


def test_series_inv_unit_mod_p():
    p = 7
    prec = 6
    f = TruncatedSeries.from_ints("q", p, [1, 7, 14, 21], prec)
    g = series_inv(f)
    for i, c in enumerate(g.coeffs):
        if i == 0:
            assert c.congruent_to(PadicNumber.one(p), 1)
        else:
            assert c.unit == 0 or c.val >= 1


def test_series_inv_nonunit_constant():
    f = TruncatedSeries.from_ints("q", 5, [5, 1, 1], 8)
    with pytest.raises(NotInvertible):
        series_inv(f)


def test_series_inv_two_sided_random():
    rng = random.Random(20240811)
    p, prec, deg = 5, 10, 6
    mod = p ** prec
    one = PadicNumber.one(p, prec)
    zero = PadicNumber.zero(p, prec)
    for _ in range(200):
        c0 = rng.randrange(1, mod)
        while c0 % p == 0:
            c0 = rng.randrange(1, mod)
        ints = [c0] + [rng.randrange(mod) for _ in range(deg)]
        f = TruncatedSeries.from_ints("q", p, ints, prec)
        g = series_inv(f)
        h = f * g
        assert h[0].congruent_to(one, prec)
        for i in range(1, deg + 1):
            assert h[i].congruent_to(zero, prec)


def test_rev_eval_root_and_direct_sum():
    p = 5
    prec = 12
    a = PadicNumber.from_int(p, 3, prec)
    B = TruncatedSeries("t", p, [PadicNumber.one(p, prec), -a], prec)
    assert rev_eval(B, a).unit == 0
    B2 = TruncatedSeries.from_ints("t", p, [1, 0, 1], prec)
    v = rev_eval(B2, PadicNumber.from_int(p, p, prec))
    assert v.congruent_to(PadicNumber.from_int(p, 1 + p * p), prec)


def test_rev_eval_matches_bruteforce():
    rng = random.Random(7)
    p, prec, deg = 5, 10, 6
    mod = p ** prec
    for _ in range(100):
        ints = [rng.randrange(mod) for _ in range(deg + 1)]
        a_int = rng.randrange(mod)
        B = TruncatedSeries.from_ints("t", p, ints, prec)
        got = rev_eval(B, PadicNumber.from_int(p, a_int, prec))
        want = sum(c * pow(a_int, deg - i, mod) for i, c in enumerate(ints)) % mod
        assert got.congruent_to(PadicNumber.from_int(p, want, prec), prec)


def test_rev_eval_rejects_negative_valuation_point():
    p = 5
    B = TruncatedSeries.from_ints("t", p, [1, 1], 8)
    with pytest.raises(ValueError):
        rev_eval(B, PadicNumber(5, 1, -1, 8))


# -- Newton polygons -------------------------------------------------------


def _coeffs(p, vals, prec=30):
    out = []
    for v in vals:
        if v is None:
            out.append(PadicNumber.zero(p, prec))
        else:
            out.append(PadicNumber(p, 1, v, prec))
    return out


def test_newton_polygon_linear():
    np_ = newton_polygon(_coeffs(5, [0, 1]))
    assert np_.slopes == (1,)


def test_newton_polygon_weight2_level77_shape():
    # coefficient valuations (0,1,2,3) give the slope sequence (1,1,1)
    np_ = newton_polygon(_coeffs(7, [0, 1, 2, 3]))
    assert np_.slopes == (1, 1, 1)


def test_newton_polygon_interior_bound_ok():
    p = 5
    cs = _coeffs(p, [0, 1, None, 3])
    cs[2] = PadicNumber.zero(p, 5)  # >= 5, hull at index 2 is 2
    np_ = newton_polygon(cs)
    assert np_.slopes == (1, 1, 1)


def test_newton_polygon_ambiguous_bound():
    p = 5
    cs = _coeffs(p, [0, 4, None, 6])
    cs[2] = PadicNumber.zero(p, 3)  # could dip below the hull
    with pytest.raises(SlopeUndetermined) as e:
        newton_polygon(cs)
    assert e.value.index == 2


def test_newton_polygon_unit_scaling_invariance():
    rng = random.Random(99)
    p, prec = 7, 20
    for _ in range(50):
        vals = [0] + [rng.randrange(0, 8) for _ in range(4)]
        cs = [PadicNumber(p, rng.randrange(1, p), v, prec) for v in vals]
        u = PadicNumber(p, 1 + p * rng.randrange(1, p), 0, prec)
        scaled = [c * u for c in cs]
        assert newton_polygon(cs).slopes == newton_polygon(scaled).slopes


# -- Hensel lifting --------------------------------------------------------


def test_hensel_linear():
    p = 7
    c = PadicNumber(p, 3, 2, 15)
    roots = hensel_root([PadicNumber.one(p, 15), -c], 2)
    assert len(roots) == 1
    assert roots[0].congruent_to(c, 14)


def test_hensel_split_quadratic():
    # (x - 2*7)(x - 4*7) = x^2 - 42x + 392: slope-1 segment, two simple roots
    p = 7
    prec = 12
    cs = [
        PadicNumber.one(p, prec),
        PadicNumber.from_int(p, -42, prec),
        PadicNumber.from_int(p, 392, prec),
    ]
    roots = hensel_root(cs, 1)
    got = sorted(r.unit % p for r in roots)
    assert got == [2, 4]
    for r in roots:
        value = r * r + cs[1] * r + cs[2]
        assert value.unit == 0 or value.val >= r.absprec


def test_hensel_irreducible_quadratic_refused():
    # x^2 - 7*u with u a non-residue: slope 1/2, fractional
    p = 7
    prec = 12
    cs = [
        PadicNumber.one(p, prec),
        PadicNumber.zero(p, prec),
        PadicNumber.from_int(p, -7 * 3, prec),
    ]
    from fractions import Fraction

    with pytest.raises(NotLiftableHere):
        hensel_root(cs, Fraction(1, 2))


def test_hensel_repeated_residual_refused():
    # x^2 - 2*7x + 7^2(1+7): residual (y-1)^2 mod 7 has no simple root
    p = 7
    prec = 12
    cs = [
        PadicNumber.one(p, prec),
        PadicNumber.from_int(p, -2 * 7, prec),
        PadicNumber.from_int(p, 49 * 8, prec),
    ]
    with pytest.raises(NotLiftableHere):
        hensel_root(cs, 1)


def test_poly_divide_linear():
    # (x - 3)(x^2 + x + 2) expanded, divide back by the root 3
    p = 11
    prec = 14
    full = [1, -2, -1, -6]  # x^3 - 2x^2 - x - 6
    cs = [PadicNumber.from_int(p, c, prec) for c in full]
    r = hensel_root(cs, 0)
    root3 = [r_ for r_ in r if r_.unit % 11 == 3]
    assert root3, "root 3 should lift"
    q = poly_divide_linear(cs, root3[0])
    want = [1, 1, 2]
    for c, w in zip(q, want):
        assert c.congruent_to(PadicNumber.from_int(p, w), 12)
