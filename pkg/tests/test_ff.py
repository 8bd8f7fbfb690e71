from fractions import Fraction
from itertools import product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vgtate.errors import BadDenominator, DivisionByZero, FieldMismatch, NotASquare
from vgtate.ff import (
    FieldSpec,
    chi_table,
    field_arith,
    find_nonresidue,
    legendre,
    quad_char,
    sqrt_field,
    sqrt_mod_p,
)

SMALL_PRIMES = [3, 5, 7, 11, 13]
# every F_q with q <= 169
SMALL_FIELDS = [FieldSpec(p) for p in (3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67,
                                       71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131, 137, 139,
                                       149, 151, 157, 163, 167)] + [FieldSpec(p, 2) for p in (3, 5, 7, 11, 13)]


def field_id(spec):
    return f"q{spec.q}"


def test_mul_in_prime_field():
    f5 = FieldSpec(5)
    assert f5(3) * f5(4) == f5(2)
    assert field_arith(f5(3), f5(4), "mul") == 2


def test_omega_squared_is_d():
    f25 = FieldSpec(5, 2)
    assert f25.d == 2
    assert f25.omega * f25.omega == f25(2)


@pytest.mark.parametrize("spec", [FieldSpec(7), FieldSpec(5, 2), FieldSpec(3, 2)], ids=field_id)
def test_inverse_axiom(spec):
    for x in spec.elements():
        if x:
            assert x * x.inverse() == spec.one
            assert field_arith(x, x, "div") == 1


def test_errors():
    f5, f7 = FieldSpec(5), FieldSpec(7)
    with pytest.raises(DivisionByZero):
        f5(1) / f5(0)
    with pytest.raises(FieldMismatch):
        f5(1) + f7(1)
    with pytest.raises(FieldMismatch):
        field_arith(f5(1), f7(1), "add")
    with pytest.raises(ValueError):
        field_arith(f5(2), -1, "pow")
    with pytest.raises(ValueError):
        FieldSpec(9)
    with pytest.raises(ValueError):
        FieldSpec(2)
    with pytest.raises(ValueError):
        FieldSpec(5, 2, d=4)


def test_pow_matches_repeated_multiplication():
    f49 = FieldSpec(7, 2)
    x = f49(3, 5)
    acc = f49.one
    for k in range(60):
        assert x**k == acc
        acc = acc * x
    assert field_arith(x, 48, "pow") == 1


def test_rational_embedding():
    f7 = FieldSpec(7)
    assert f7(Fraction(1, 3)) == 5
    with pytest.raises(BadDenominator):
        f7(Fraction(1, 7))


@pytest.mark.parametrize(
    "n,p,expected", [(2, 5, -1), (1, 5, 1), (1, 7, 1), (1, 13, 1), (6, 5, 1), (0, 7, 0), (14, 7, 0), (-1, 7, -1)]
)
def test_legendre_values(n, p, expected):
    assert legendre(n, p) == expected


def test_legendre_rational_convention():
    # (u/v / p) = (u v / p)
    assert legendre(Fraction(2, 3), 5) == legendre(6, 5)
    assert legendre(Fraction(16, 9), 7) == 1
    with pytest.raises(BadDenominator):
        legendre(Fraction(1, 5), 5)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 101, 257, 65537, 1000003])
def test_euler_criterion(p):
    rng = np.random.default_rng(p)
    for n in list(range(-10, 30)) + [int(v) for v in rng.integers(0, p, 50)]:
        e = pow(n % p, (p - 1) // 2, p)
        assert legendre(n, p) == (-1 if e == p - 1 else e)


@pytest.mark.parametrize("p,d", [(5, 2), (7, 3), (3, 2), (17, 3), (41, 3), (73, 5)])
def test_find_nonresidue(p, d):
    assert find_nonresidue(p) == d
    assert all(legendre(k, p) == 1 for k in range(1, d))


@pytest.mark.parametrize("spec", SMALL_FIELDS, ids=field_id)
def test_quad_char_matches_exponentiation(spec):
    e = (spec.q - 1) // 2
    one, mone = spec.one, -spec.one
    for x in spec.elements():
        y = x**e
        expected = 0 if not x else (1 if y == one else -1)
        assert y in (spec.zero, one, mone)
        assert quad_char(x) == expected


@pytest.mark.parametrize("spec", SMALL_FIELDS, ids=field_id)
def test_square_counts(spec):
    chars = [quad_char(x) for x in spec.elements() if x]
    assert chars.count(1) == (spec.q - 1) // 2
    assert chars.count(-1) == (spec.q - 1) // 2


@pytest.mark.parametrize("spec", [s for s in SMALL_FIELDS if s.q <= 49], ids=field_id)
def test_multiplicativity_exhaustive(spec):
    elems = [x for x in spec.elements() if x]
    chars = {x: quad_char(x) for x in elems}
    for x, y in product(elems, repeat=2):
        assert chars[x * y] == chars[x] * chars[y]


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_norm_compatibility(p):
    spec = FieldSpec(p, 2)
    for x in spec.elements():
        assert x.norm() == (x ** (p + 1)).c0
        assert (x ** (p + 1)).c1 == 0
        assert quad_char(x) == legendre(x.norm(), p)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13])
def test_prime_subfield_is_square_in_quadratic_extension(p):
    spec = FieldSpec(p, 2)
    for c in range(1, p):
        assert quad_char(spec(c)) == 1
    assert quad_char(spec.zero) == 0


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_generator_is_nonsquare(p):
    spec = FieldSpec(p, 2)
    order = spec.q - 1
    factors = [f for f in range(2, order + 1) if order % f == 0 and all(f % k for k in range(2, f))]
    gens = [x for x in spec.elements() if x and all(x ** (order // f) != 1 for f in factors)]
    assert gens
    assert all(quad_char(g) == -1 for g in gens)


def test_sqrt_examples():
    f7, f5 = FieldSpec(7), FieldSpec(5)
    assert sqrt_field(f7(4)) == 2
    assert sqrt_field(f7(2)) == 3
    with pytest.raises(NotASquare):
        sqrt_field(f5(3))


@pytest.mark.parametrize("spec", SMALL_FIELDS[:8] + [FieldSpec(p, 2) for p in (3, 5, 7, 11, 13)], ids=field_id)
def test_sqrt_roundtrip_and_tiebreak(spec):
    for x in spec.elements():
        if quad_char(x) == -1:
            with pytest.raises(NotASquare):
                sqrt_field(x)
            continue
        y = sqrt_field(x)
        assert y * y == x
        z = -y
        assert (y.c1, y.c0) <= (z.c1, z.c0)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 13, 17, 97, 257, 7681, 65537]), st.integers(min_value=1))
def test_tonelli_shanks(p, n):
    n %= p
    if legendre(n, p) == 1:
        r = sqrt_mod_p(n, p)
        assert r * r % p == n


@pytest.mark.parametrize("spec", [FieldSpec(11), FieldSpec(7, 2)], ids=field_id)
def test_chi_table_agrees_with_scalar(spec):
    table = chi_table(spec)
    assert [int(v) for v in table] == [quad_char(x) for x in spec.elements()]


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 48), st.integers(0, 48), st.integers(0, 48))
def test_field_axioms_f49(i, j, k):
    spec = FieldSpec(7, 2)
    x, y, z = spec.from_index(i), spec.from_index(j), spec.from_index(k)
    assert x * (y + z) == x * y + x * z
    assert (x * y) * z == x * (y * z)
    assert x - x == spec.zero
    assert x + y == y + x
