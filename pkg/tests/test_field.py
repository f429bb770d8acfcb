import itertools

import pytest
from hypothesis import given, strategies as st

from gapforge.field import (
    QQ,
    Felem,
    FieldSpec,
    enumerate_elements,
    ff_add,
    ff_inv,
    ff_mul,
    is_irreducible,
    make_field,
)

SMALL = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4)]


def test_prime_field_has_no_modulus():
    F = make_field(2, 1)
    assert F.q == 2 and F.modulus is None


def test_gf4_modulus_is_x2_x_1():
    assert make_field(2, 2).modulus == (1, 1, 1)


def test_modulus_smallest_irreducible_by_brute_force():
    # reference: scan monic polynomials in index order, reject those with a root or factor
    for p, m in [(2, 2), (2, 3), (3, 2), (2, 4), (5, 2)]:
        F = make_field(p, m)
        for idx in range(p ** m):
            low = [(idx // p ** i) % p for i in range(m)]
            if is_irreducible(low + [1], p):
                assert F.modulus == tuple(low + [1])
                break


@pytest.mark.parametrize("p,m", [(4, 1), (1, 1), (2, 0), (2, 17)])
def test_make_field_errors(p, m):
    with pytest.raises(ValueError):
        make_field(p, m)


def test_worked_arithmetic():
    F2, F4, F5 = make_field(2), make_field(2, 2), make_field(5)
    assert ff_add(Felem.of(F2, 1), Felem.of(F2, 1)) == Felem.of(F2, 0)
    x = Felem(F4, (0, 1))
    assert ff_mul(x, x) == Felem(F4, (1, 1))
    assert ff_inv(Felem.of(F5, 2)) == Felem.of(F5, 3)
    with pytest.raises(ZeroDivisionError):
        ff_inv(Felem.of(F5, 0))


def test_enumeration_order():
    assert [e.coeffs for e in enumerate_elements(make_field(2))] == [(0,), (1,)]
    assert [e.coeffs for e in enumerate_elements(make_field(2, 2))] == [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert [e.index for e in enumerate_elements(make_field(3))] == [0, 1, 2]


@pytest.mark.parametrize("p,m", SMALL)
def test_field_axioms_exhaustive(p, m):
    F = make_field(p, m)
    els = list(F.elements())
    for a, b in itertools.product(els, repeat=2):
        assert F.add(a, b) == F.add(b, a)
        assert F.mul(a, b) == F.mul(b, a)
    for a, b, c in itertools.product(els, repeat=3):
        assert F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
        assert F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
        assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    for a in els[1:]:
        assert F.mul(a, F.inv(a)) == 1


@pytest.mark.parametrize("p,m", [(2, 1), (2, 2), (2, 3), (3, 2), (2, 6), (7, 2), (5, 1)])
def test_frobenius(p, m):
    F = make_field(p, m)
    assert all(F.pow(a, F.q) == a for a in F.elements())


@given(st.sampled_from([(7, 3), (3, 5), (2, 8), (13, 2)]), st.data())
def test_axioms_sampled_large(pm, data):
    F = make_field(*pm)
    a, b, c = (data.draw(st.integers(0, F.q - 1)) for _ in range(3))
    assert F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
    if a:
        assert F.mul(a, F.inv(a)) == 1
    assert F.sub(F.add(a, b), b) == a


def test_enumeration_is_bijection():
    F = make_field(3, 2)
    els = enumerate_elements(F)
    assert len({e.coeffs for e in els}) == F.q == 9 and els[0].index == 0


def test_render_parse_round_trip():
    F = make_field(2, 2)
    assert F.render(1) == "[1,0]"
    assert all(F.parse(F.render(a)) == a for a in F.elements())
    with pytest.raises(ValueError):
        F.parse("[2,0]")
    assert FieldSpec.from_dict(F.to_dict()) == F


def test_rationals():
    assert QQ.render(QQ.from_int(3) / 6) == "1/2"
    assert QQ.parse("-3/4") * 4 == -3
