import itertools

import pytest
from hypothesis import given, settings, strategies as st

import oracles
from eisdensity import _backend
from eisdensity.errors import DivisionByZero, DomainError, InfiniteValuation
from eisdensity.gf import FieldCtx
from eisdensity.polyring import (
    Poly,
    count_irreducibles,
    divisors,
    gcd,
    is_irreducible,
    mobius,
    monic_irreducibles,
    parse_poly,
    poly_arith,
    valuation,
)

F2, F3, F4, F5 = (FieldCtx.of_order(q) for q in (2, 3, 4, 5))


def P(ctx, text):
    return parse_poly(ctx, text)


def test_arith_examples():
    assert poly_arith(P(F2, "x^2+x"), P(F2, "x"), "gcd") == P(F2, "x")
    assert poly_arith(P(F2, "x^3+1"), P(F2, "x+1"), "divmod") == (P(F2, "x^2+x+1"), Poly(F2))
    assert poly_arith(P(F3, "x+1"), P(F3, "x+2"), "mul") == P(F3, "x^2+2")


def test_irreducible_examples():
    assert is_irreducible(P(F2, "x^2+x+1"))
    assert not is_irreducible(P(F2, "x^2+1"))
    assert is_irreducible(P(F3, "x^2+1"))
    with pytest.raises(DomainError):
        is_irreducible(P(F2, "1"))


def test_monic_irreducibles_examples():
    assert [str(f) for f in monic_irreducibles(F2, 1)] == ["x", "x+1"]
    assert [str(f) for f in monic_irreducibles(F2, 2)] == ["x^2+x+1"]
    assert len(monic_irreducibles(F2, 4)) == 3


def test_count_examples():
    assert [count_irreducibles(2, n) for n in (1, 2, 3, 4)] == [2, 1, 2, 3]
    assert [count_irreducibles(3, n) for n in (1, 2)] == [3, 3]
    assert sum(d * count_irreducibles(2, d) for d in divisors(4)) == 16


def test_valuation_examples():
    x = P(F2, "x")
    assert valuation(P(F2, "x^2+x"), x) == 1
    assert valuation(P(F2, "x^2"), x) == 2
    assert valuation(P(F2, "x+1"), x) == 0
    with pytest.raises(InfiniteValuation):
        valuation(Poly(F2), x)


def test_mobius():
    assert [mobius(n) for n in range(1, 13)] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1, -1, 0]


@pytest.mark.parametrize("p", [2, 3])
def test_is_irreducible_matches_trial_division(p):
    ctx = FieldCtx.of_order(p)
    for n in range(1, 7):
        for f in oracles.monic_polys(p, n):
            assert is_irreducible(Poly(ctx, f)) == oracles.is_irreducible(f, p), f


@pytest.mark.parametrize("p", [2, 3, 5])
def test_monic_irreducibles_match_oracle(p):
    ctx = FieldCtx.of_order(p)
    for n in range(1, 5 if p < 5 else 4):
        got = [list(f.coeffs) for f in monic_irreducibles(ctx, n)]
        assert got == oracles.monic_irreducibles(p, n)


@pytest.mark.parametrize("q", [2, 3, 4, 5])
def test_count_matches_enumeration(q):
    ctx = FieldCtx.of_order(q)
    top = {2: 8, 3: 8, 4: 7, 5: 6}[q]
    for n in range(1, top + 1):
        assert len(monic_irreducibles(ctx, n)) == count_irreducibles(q, n)


@pytest.mark.parametrize("q", [2, 3, 5])
def test_clock_identity(q):
    for n in range(1, 13):
        assert sum(d * count_irreducibles(q, d) for d in divisors(n)) == q**n


def test_enumeration_order_is_canonical():
    for ctx in (F3, F4):
        for n in (1, 2, 3):
            got = monic_irreducibles(ctx, n)
            assert [f.sort_key() for f in got] == sorted(f.sort_key() for f in got)
            assert all(f.is_monic() and f.degree == n for f in got)


def test_sieve_backends_agree():
    for backend in _backend.available():
        with _backend.use(backend):
            for ctx, n in ((F2, 7), (F3, 5), (F4, 4), (F5, 3)):
                mask = _backend.irreducible_sieve(ctx, n)
                assert int(mask.sum()) == count_irreducibles(ctx.q, n)


def test_irreducibles_over_gf4_are_irreducible():
    for f in monic_irreducibles(F4, 3):
        assert is_irreducible(f)
    # x^2+x+y is irreducible over GF(4) iff its roots lie outside GF(4)
    reducible = [f for f in (Poly(F4, (a, b, 1)) for a in range(4) for b in range(4))
                 if any(f(r) == 0 for r in range(4))]
    assert len(reducible) + count_irreducibles(4, 2) == 16


def poly_strategy(ctx, max_deg=6):
    return st.lists(st.integers(0, ctx.q - 1), max_size=max_deg + 1).map(lambda c: Poly(ctx, c))


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([F2, F3, F4, F5]), st.data())
def test_divmod_identity(ctx, data):
    a = data.draw(poly_strategy(ctx))
    b = data.draw(poly_strategy(ctx))
    if not b:
        with pytest.raises(DivisionByZero):
            divmod(a, b)
        return
    quo, rem = divmod(a, b)
    assert quo * b + rem == a
    assert rem.degree < b.degree


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([F2, F3, F4]), st.data())
def test_gcd_divides_both(ctx, data):
    a = data.draw(poly_strategy(ctx))
    b = data.draw(poly_strategy(ctx))
    g = gcd(a, b)
    if not a and not b:
        assert not g
        return
    assert g.is_monic()
    assert not (a % g) and not (b % g)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from([F2, F3]), st.data())
def test_valuation_additive(ctx, data):
    f = data.draw(poly_strategy(ctx, 5).filter(bool))
    g = data.draw(poly_strategy(ctx, 5).filter(bool))
    p = data.draw(st.sampled_from(monic_irreducibles(ctx, 1) + monic_irreducibles(ctx, 2)))
    assert valuation(f * g, p) == valuation(f, p) + valuation(g, p)


def test_parse_forms_agree():
    assert P(F2, "x^2+x+1") == P(F2, "1,1,1")
    assert P(F3, "2*x^2+1") == P(F3, "1,0,2") == P(F3, "2x^2+1")
    assert P(F2, "(t^3+t)") == P(F2, "0,1,0,1")
    assert P(F3, "x-1") == P(F3, "2,1")
    with pytest.raises(DomainError):
        P(F2, "x^2+2")
    with pytest.raises(DomainError):
        P(F2, "y^2")


@pytest.mark.parametrize("ctx", [F2, F3, F4, F5])
def test_format_round_trip(ctx):
    for n in range(4):
        for tail in itertools.product(range(ctx.q), repeat=n):
            f = Poly(ctx, list(tail) + [1])
            assert P(ctx, str(f)) == f
