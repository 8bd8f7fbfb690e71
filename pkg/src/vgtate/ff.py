"""Exact arithmetic in F_p and F_{p^2}, plus quadratic-residue machinery.

F_{p^2} is modelled as F_p[w]/(w^2 - d) with d the smallest quadratic
non-residue mod p.  Elements are stored as coefficient pairs (c0, c1)
meaning c0 + c1*w.  Every element also has an integer *index*
``c0 + p*c1`` in ``range(q)``; sorting by index is sorting by (c1, c0),
which is the canonical order used everywhere in the package.

The vectorised helpers at the bottom operate on pairs of int64 numpy
arrays and back the O(q^2) trace loops.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import numpy as np
from sympy import isprime

from .errors import BadDenominator, DivisionByZero, FieldMismatch, NotASquare

Rational = Union[int, Fraction]


def check_odd_prime(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or p < 3 or not isprime(int(p)):
        raise ValueError(f"expected an odd prime, got {p!r}")
    return int(p)


def legendre(n: Rational, p: int) -> int:
    """Legendre symbol (n/p) for an integer or rational n.

    A rational u/v in lowest terms is evaluated as (u*v / p); a prime
    dividing v raises BadDenominator.
    """
    if isinstance(n, Fraction):
        if n.denominator % p == 0:
            raise BadDenominator(f"{p} divides the denominator of {n}")
        n = n.numerator * n.denominator
    n %= p
    if n == 0:
        return 0
    # binary Jacobi algorithm; p is prime so this is the Legendre symbol
    m, acc = p, 1
    while True:
        n %= m
        if n == 0:
            return 0
        while not n & 1:
            n >>= 1
            if m & 7 in (3, 5):
                acc = -acc
        if n == 1:
            return acc
        if n & 3 == 3 and m & 3 == 3:
            acc = -acc
        n, m = m, n


@lru_cache(maxsize=None)
def find_nonresidue(p: int) -> int:
    """Smallest positive d with (d/p) = -1."""
    d = 2
    while legendre(d, p) != -1:
        d += 1
    return d


def sqrt_mod_p(n: int, p: int) -> int:
    """A square root of n mod p (Tonelli-Shanks); raises NotASquare."""
    n %= p
    if n == 0:
        return 0
    if legendre(n, p) != 1:
        raise NotASquare(f"{n} is not a square mod {p}")
    if p % 4 == 3:
        return pow(n, (p + 1) // 4, p)
    s, e = p - 1, 0
    while s % 2 == 0:
        s //= 2
        e += 1
    z = find_nonresidue(p)
    x = pow(n, (s + 1) // 2, p)
    b = pow(n, s, p)
    g = pow(z, s, p)
    while b != 1:
        m, t = 0, b
        while t != 1:
            t = t * t % p
            m += 1
        gs = pow(g, 1 << (e - m - 1), p)
        g = gs * gs % p
        x = x * gs % p
        b = b * g % p
        e = m
    return x


@dataclass(frozen=True)
class FieldSpec:
    """The finite field F_q, q = p**r with r in {1, 2}."""

    p: int
    r: int = 1
    d: int | None = None

    def __post_init__(self):
        check_odd_prime(self.p)
        if self.r not in (1, 2):
            raise ValueError(f"extension degree must be 1 or 2, got {self.r}")
        if self.r == 2:
            if self.d is None:
                object.__setattr__(self, "d", find_nonresidue(self.p))
            elif legendre(self.d, self.p) != -1:
                raise ValueError(f"{self.d} is a square mod {self.p}")
        elif self.d is not None:
            raise ValueError("a non-residue is only used for r = 2")

    @property
    def q(self) -> int:
        return self.p**self.r

    @property
    def nonresidue(self) -> int:
        # multiplier for c1*c1' terms; irrelevant (and unused) when r = 1
        return self.d if self.d is not None else 0

    def __call__(self, c0: Rational, c1: int = 0) -> ExtFieldElem:
        return self.elem(c0, c1)

    def elem(self, c0: Rational, c1: int = 0) -> ExtFieldElem:
        if isinstance(c0, Fraction):
            if c0.denominator % self.p == 0:
                raise BadDenominator(f"{self.p} divides the denominator of {c0}")
            c0 = c0.numerator * pow(c0.denominator, -1, self.p)
        if self.r == 1 and c1 % self.p:
            raise ValueError("F_p elements have no w-component")
        return ExtFieldElem(self, c0 % self.p, c1 % self.p)

    def from_index(self, i: int) -> ExtFieldElem:
        return ExtFieldElem(self, i % self.p, i // self.p)

    @property
    def zero(self) -> ExtFieldElem:
        return ExtFieldElem(self, 0, 0)

    @property
    def one(self) -> ExtFieldElem:
        return ExtFieldElem(self, 1, 0)

    @property
    def omega(self) -> ExtFieldElem:
        if self.r != 2:
            raise ValueError("w only exists in F_{p^2}")
        return ExtFieldElem(self, 0, 1)

    def elements(self) -> Iterator[ExtFieldElem]:
        """All of F_q in canonical (index) order."""
        for i in range(self.q):
            yield self.from_index(i)

    def __str__(self):
        return f"F_{self.p}" if self.r == 1 else f"F_{self.p}^2"


@dataclass(frozen=True, slots=True)
class ExtFieldElem:
    spec: FieldSpec
    c0: int
    c1: int = 0

    @property
    def index(self) -> int:
        return self.c0 + self.spec.p * self.c1

    def _coerce(self, other) -> ExtFieldElem:
        if isinstance(other, ExtFieldElem):
            if other.spec != self.spec:
                raise FieldMismatch(f"{self.spec} vs {other.spec}")
            return other
        if isinstance(other, (int, Fraction, np.integer)):
            return self.spec.elem(other if isinstance(other, Fraction) else int(other))
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p = self.spec.p
        return ExtFieldElem(self.spec, (self.c0 + o.c0) % p, (self.c1 + o.c1) % p)

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return ExtFieldElem(self.spec, -self.c0 % p, -self.c1 % p)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return -self + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        p, d = self.spec.p, self.spec.nonresidue
        return ExtFieldElem(
            self.spec,
            (self.c0 * o.c0 + d * self.c1 * o.c1) % p,
            (self.c0 * o.c1 + self.c1 * o.c0) % p,
        )

    __rmul__ = __mul__

    def norm(self) -> int:
        """N(x) = x * conj(x) in F_p (x^(p+1) for r = 2, x^2 for r = 1)."""
        p = self.spec.p
        if self.spec.r == 1:
            return self.c0 * self.c0 % p
        return (self.c0 * self.c0 - self.spec.d * self.c1 * self.c1) % p

    def inverse(self) -> ExtFieldElem:
        if not self:
            raise DivisionByZero("inverse of zero")
        p = self.spec.p
        if self.spec.r == 1:
            return ExtFieldElem(self.spec, pow(self.c0, -1, p), 0)
        ninv = pow(self.norm(), -1, p)
        return ExtFieldElem(self.spec, self.c0 * ninv % p, -self.c1 * ninv % p)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result, base = self.spec.one, self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __bool__(self):
        return bool(self.c0 or self.c1)

    def __eq__(self, other):
        if isinstance(other, ExtFieldElem):
            return self.spec == other.spec and self.c0 == other.c0 and self.c1 == other.c1
        if isinstance(other, (int, Fraction, np.integer)):
            try:
                return self == self._coerce(other)
            except BadDenominator:
                return False
        return NotImplemented

    def __hash__(self):
        return hash((self.spec, self.c0, self.c1))

    def __str__(self):
        if self.c1 == 0:
            return str(self.c0)
        return f"{self.c0}+{self.c1}w"

    def __repr__(self):
        return f"ExtFieldElem({self}, {self.spec})"


def field_arith(x: ExtFieldElem, y, op: str) -> ExtFieldElem:
    """Dispatch ``op`` in {add, sub, mul, div, pow}; ``y`` is an int for pow."""
    if op == "pow":
        if not isinstance(y, (int, np.integer)) or y < 0:
            raise ValueError("exponent must be a non-negative integer")
        return x ** int(y)
    if isinstance(y, ExtFieldElem) and y.spec != x.spec:
        raise FieldMismatch(f"{x.spec} vs {y.spec}")
    ops = {"add": x.__add__, "sub": x.__sub__, "mul": x.__mul__, "div": x.__truediv__}
    if op not in ops:
        raise ValueError(f"unknown operation {op!r}")
    return ops[op](y)


def quad_char(x: ExtFieldElem) -> int:
    """x^((q-1)/2) as an element of {-1, 0, 1}.

    For q = p^2 this is evaluated as the Legendre symbol of the norm.
    """
    if x.spec.r == 1:
        return legendre(x.c0, x.spec.p)
    return legendre(x.norm(), x.spec.p)


def _lex_min(y: ExtFieldElem) -> ExtFieldElem:
    z = -y
    return y if (y.c1, y.c0) <= (z.c1, z.c0) else z


def sqrt_field(x: ExtFieldElem) -> ExtFieldElem:
    """Square root of x; of the two roots, the one with smaller (c1, c0)."""
    spec, p = x.spec, x.spec.p
    if not x:
        return spec.zero
    if quad_char(x) != 1:
        raise NotASquare(f"{x} is not a square in {spec}")
    if x.c1 == 0:
        if legendre(x.c0, p) == 1:
            return _lex_min(spec.elem(sqrt_mod_p(x.c0, p)))
        # c0 non-residue: sqrt(c0) = s*w with s^2 = c0/d
        s = sqrt_mod_p(x.c0 * pow(spec.d, -1, p), p)
        return _lex_min(ExtFieldElem(spec, 0, s))
    n = sqrt_mod_p(x.norm(), p)
    inv2 = pow(2, -1, p)
    for cand in ((x.c0 + n) * inv2 % p, (x.c0 - n) * inv2 % p):
        if cand and legendre(cand, p) == 1:
            a0 = sqrt_mod_p(cand, p)
            a1 = x.c1 * pow(2 * a0, -1, p) % p
            y = ExtFieldElem(spec, a0, a1)
            if y * y == x:
                return _lex_min(y)
    raise AssertionError(f"square root extraction failed for {x}")  # pragma: no cover


# ---------------------------------------------------------------------------
# vectorised arithmetic on (c0, c1) pairs of int64 arrays

def vec_elements(spec: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(spec.q, dtype=np.int64)
    return idx % spec.p, idx // spec.p


def vmul(spec: FieldSpec, x0, x1, y0, y1):
    p, d = spec.p, spec.nonresidue
    return (x0 * y0 + d * (x1 * y1 % p)) % p, (x0 * y1 + x1 * y0) % p


def vsq(spec: FieldSpec, x0, x1):
    p, d = spec.p, spec.nonresidue
    return (x0 * x0 + d * (x1 * x1 % p)) % p, (2 * x0 * x1) % p


def vindex(spec: FieldSpec, x0, x1) -> np.ndarray:
    return x0 + spec.p * x1


@lru_cache(maxsize=8)
def legendre_table(p: int) -> np.ndarray:
    """Legendre symbol of every residue mod p, as int8."""
    table = -np.ones(p, dtype=np.int8)
    table[0] = 0
    table[(np.arange(1, p, dtype=np.int64) ** 2) % p] = 1
    return table


@lru_cache(maxsize=8)
def chi_table(spec: FieldSpec) -> np.ndarray:
    """quad_char of every element of F_q, indexed by element index."""
    x0, x1 = vec_elements(spec)
    if spec.r == 1:
        return legendre_table(spec.p)[x0]
    norm = (x0 * x0 - spec.d * (x1 * x1 % spec.p)) % spec.p
    return legendre_table(spec.p)[norm]


@lru_cache(maxsize=8)
def fp_inverse_table(p: int) -> np.ndarray:
    inv = np.zeros(p, dtype=np.int64)
    for x in range(1, p):
        inv[x] = pow(x, -1, p)
    return inv


def vdiv_index(spec: FieldSpec, n0, n1, d0, d1) -> np.ndarray:
    """Index of n/d elementwise; entries with d == 0 get index q (infinity)."""
    p = spec.p
    inv = fp_inverse_table(p)
    if spec.r == 1:
        norm = d0 * d0 % p
    else:
        norm = (d0 * d0 - spec.d * (d1 * d1 % p)) % p
    zero = norm == 0
    if spec.r == 1:
        res = n0 * inv[d0 % p] % p
    else:
        # 1/d = conj(d) / N(d)
        ninv = inv[norm]
        e0, e1 = d0 * ninv % p, (-d1 * ninv) % p
        r0, r1 = vmul(spec, n0, n1, e0, e1)
        res = vindex(spec, r0, r1)
    return np.where(zero, spec.q, res)
