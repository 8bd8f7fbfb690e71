"""Geometry of the family: parameters, the covering maps h and j, and fibers.

The surface E_a is the elliptic fibration

    Y^2 = X (X^2 + 2((a+1)/t^2 + a) X + 1)

over the t-line.  X_a and S_a are its pullbacks along

    h: u -> t = (u^2 - 4) / (4u)      j: z -> u = (z^2 - 1) / z

so every rational fiber of X_a or S_a is a copy of some fiber E_{a,t}.
The multiplicity profile m'(t) counts rational z-points minus rational
u-points above t; it does not depend on a.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
from sympy import primefactors

from .errors import BadParameter, BadPrime, UndefinedAtZeroOrInfinity
from .ff import ExtFieldElem, FieldSpec, quad_char, sqrt_field, vdiv_index, vec_elements, vmul, vsq


class Infinity:
    """The point at infinity of P^1 (singleton)."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (Infinity, ())


INF = Infinity()
ProjPoint = Union[ExtFieldElem, Infinity]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``n`` or ``n/d`` into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise BadParameter(f"not a rational number: {text!r}") from exc


def is_rational_square(x: Fraction) -> bool:
    """True if x = y^2 for some rational y."""
    if x < 0:
        return False
    n, d = x.numerator, x.denominator
    return math.isqrt(n) ** 2 == n and math.isqrt(d) ** 2 == d


def format_rational(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class SurfaceParam:
    """A rational parameter a != +-1 together with its bad primes.

    ``ramified_support`` holds the primes dividing 2(1+a)(1-a), where a
    prime divides a rational if it divides its numerator or denominator.
    """

    a: Fraction
    ramified_support: frozenset = field(init=False, compare=False)
    square_classes: dict = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        a = parse_rational(self.a)
        if a in (1, -1):
            raise BadParameter(f"a must not be +-1, got {a}")
        object.__setattr__(self, "a", a)
        n, d = a.numerator, a.denominator
        support = {2} | set(primefactors(abs((d + n) * (d - n) * d)))
        object.__setattr__(self, "ramified_support", frozenset(support))
        classes = {
            "2(1+a)": 2 * (1 + a),
            "2(1-a)": 2 * (1 - a),
            "1-a^2": 1 - a * a,
        }
        object.__setattr__(
            self,
            "square_classes",
            {k: (v, is_rational_square(v)) for k, v in classes.items()},
        )

    @classmethod
    def parse(cls, text) -> SurfaceParam:
        return cls(parse_rational(text))

    @property
    def num(self) -> int:
        return self.a.numerator

    @property
    def den(self) -> int:
        return self.a.denominator

    def is_good(self, p: int) -> bool:
        return p not in self.ramified_support

    def __str__(self):
        return format_rational(self.a)


def reduce_param(a: SurfaceParam, spec: FieldSpec) -> ExtFieldElem:
    """Image of a in F_p inside F_q; BadPrime at places of bad reduction."""
    p = spec.p
    if p in a.ramified_support:
        n, d = a.num, a.den
        if d % p == 0:
            why = f"{p} | den(a) = {d}"
        elif (d + n) % p == 0 or (d - n) % p == 0:
            why = f"{p} | 1-a^2 = {format_rational(1 - a.a * a.a)}"
        else:
            why = f"{p} | 2"
        raise BadPrime(f"bad prime: {why}")
    return spec.elem(a.a)


def check_good(a: ExtFieldElem) -> None:
    if not (1 - a * a):
        raise BadPrime(f"a = {a} is +-1 in {a.spec}")


def _proj(num: ExtFieldElem, den: ExtFieldElem) -> ProjPoint:
    return INF if not den else num / den


def map_h(u: ProjPoint) -> ProjPoint:
    """u -> (u^2 - 4) / (4u) on P^1, with 0 and infinity going to infinity."""
    if u is INF:
        return INF
    return _proj(u * u - 4, 4 * u)


def map_j(z: ProjPoint) -> ProjPoint:
    """z -> (z^2 - 1) / z on P^1, with 0 and infinity going to infinity."""
    if z is INF:
        return INF
    return _proj(z * z - 1, z)


def point_index(t: ProjPoint, spec: FieldSpec) -> int:
    """Canonical index of a point of P^1(F_q): element index, infinity -> q."""
    return spec.q if t is INF else t.index


def point_at(i: int, spec: FieldSpec) -> ProjPoint:
    return INF if i == spec.q else spec.from_index(i)


@dataclass(frozen=True)
class MultiplicityProfile:
    """m'(t) for every t in P^1(F_q), indexed by point_index."""

    spec: FieldSpec
    values: np.ndarray

    def __getitem__(self, t: ProjPoint) -> int:
        return int(self.values[point_index(t, self.spec)])

    def nonzero_indices(self) -> np.ndarray:
        return np.flatnonzero(self.values)

    def items(self):
        for i in range(self.spec.q + 1):
            yield point_at(i, self.spec), int(self.values[i])


def _h_indices(spec: FieldSpec, un0, un1, ud0, ud1) -> np.ndarray:
    """Index of h([un : ud]) for projective u given by coordinate arrays."""
    p = spec.p
    n2 = vsq(spec, un0, un1)
    d2 = vsq(spec, ud0, ud1)
    tn0, tn1 = (n2[0] - 4 * d2[0]) % p, (n2[1] - 4 * d2[1]) % p
    td0, td1 = vmul(spec, un0, un1, ud0, ud1)
    return vdiv_index(spec, tn0, tn1, 4 * td0 % p, 4 * td1 % p)


@lru_cache(maxsize=16)
def multiplicity_profile(spec: FieldSpec) -> MultiplicityProfile:
    """Enumerate z in P^1(F_q) (+1 at h(j(z))) and u in P^1(F_q) (-1 at h(u))."""
    q, p = spec.q, spec.p
    x0, x1 = vec_elements(spec)
    zeros = np.zeros_like(x0)
    ones = np.ones_like(x0)

    # u-pass: finite u is [u : 1]; u = infinity maps to infinity
    t_of_u = _h_indices(spec, x0, x1, ones, zeros)
    # z-pass: j(z) = [z^2 - 1 : z]; z = infinity maps to infinity
    z2 = vsq(spec, x0, x1)
    t_of_z = _h_indices(spec, (z2[0] - 1) % p, z2[1], x0, x1)

    counts = np.bincount(t_of_z, minlength=q + 1) - np.bincount(t_of_u, minlength=q + 1)
    # z = inf and u = inf both land on t = inf and cancel
    values = counts.astype(np.int64)
    values.setflags(write=False)
    return MultiplicityProfile(spec, values)


def discriminant(a: ExtFieldElem, t: ProjPoint) -> ExtFieldElem:
    """64(a+1)(t^2+1)((a-1)t^2+(a+1)) / t^4."""
    if t is INF or not t:
        raise UndefinedAtZeroOrInfinity(f"discriminant undefined at t = {t}")
    t2 = t * t
    return 64 * (a + 1) * (t2 + 1) * ((a - 1) * t2 + (a + 1)) / (t2 * t2)


class FiberClass(enum.Enum):
    GENERAL = "general"
    SPECIAL_ZERO = "special_zero"
    SPECIAL_I = "special_i"
    SPECIAL_NODE = "special_node"
    SPECIAL_INFINITY = "special_infinity"

    @property
    def special(self) -> bool:
        return self is not FiberClass.GENERAL


def classify_fiber(a: ExtFieldElem, t: ProjPoint) -> FiberClass:
    check_good(a)
    if t is INF:
        return FiberClass.SPECIAL_INFINITY
    t2 = t * t
    hits = [
        cls
        for cls, cond in (
            (FiberClass.SPECIAL_ZERO, not t),
            (FiberClass.SPECIAL_I, t2 == -1),
            (FiberClass.SPECIAL_NODE, (1 - a) * t2 == 1 + a),
        )
        if cond
    ]
    assert len(hits) <= 1, f"special classes coincide at t = {t}, a = {a}"
    return hits[0] if hits else FiberClass.GENERAL


def special_points(a: ExtFieldElem) -> dict[int, FiberClass]:
    """Index -> class for every rational special point (infinity included)."""
    check_good(a)
    spec = a.spec
    out = {0: FiberClass.SPECIAL_ZERO, spec.q: FiberClass.SPECIAL_INFINITY}
    for target, cls in ((spec.elem(-1), FiberClass.SPECIAL_I), ((1 + a) / (1 - a), FiberClass.SPECIAL_NODE)):
        if quad_char(target) == 1:
            r = sqrt_field(target)
            out[r.index] = cls
            out[(-r).index] = cls
    return out
