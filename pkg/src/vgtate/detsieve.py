"""Determinant-character sieve and replayable elimination certificates.

If the weight-0 representation rho splits as psi + r with r of dimension 2,
det r is a quadratic character p -> (D/p).  A candidate D is eliminated by
a prime p with (D/p) = -1 at which the traces force det r(Frob_p) = 1:

  rule B   T(a, p)   != +-p
  rule A   T(a, p^2) != 3 p^2 (mod 8)

(T is the integer trace, so tr rho(Frob_p) = T(a, p)/p.)  Candidates
are the squarefree D != 1 supported on the bad primes of a and the sign.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import factorint, primerange

from .errors import BadParameter
from .fibration import SurfaceParam, format_rational, is_rational_square, parse_rational
from .ff import legendre
from .trace import trace_value

DEFAULT_PRIME_BOUND = 200

SUPPORT_ASSUMPTION = (
    "candidate discriminants are restricted to squarefree D supported on the "
    "primes dividing 2(1+a)(1-a) together with the sign; certificates hold for "
    "every coefficient prime l coprime to the witness prime"
)


def squarefree_part(x: int | Fraction) -> int:
    """The squarefree integer D with x = D * (rational square)."""
    x = Fraction(x)
    if x == 0:
        raise BadParameter("zero has no square class")
    n = x.numerator * x.denominator
    d = -1 if n < 0 else 1
    for prime, e in factorint(abs(n)).items():
        if e % 2:
            d *= prime
    return d


def candidate_classes(a: SurfaceParam) -> list[int]:
    primes = sorted(a.ramified_support)
    out = []
    for k in range(len(primes) + 1):
        for combo in itertools.combinations(primes, k):
            m = math.prod(combo)
            out.extend([m, -m])
    out = [d for d in out if d != 1]
    return sorted(out, key=lambda d: (abs(d), d < 0))


class Rule:
    A = "A"
    B = "B"


def lemma48_rule(T_p: int | None, T_p2: int | None, q: int) -> str:
    """'ForcedOne' if the traces force det r(g) = 1, else 'Unconstrained'.

    ``q`` is the norm of g; ``T_p2`` is the trace of g^2 (norm q^2).
    """
    if T_p is not None and T_p not in (q, -q):
        return "ForcedOne"
    if T_p2 is not None and (T_p2 - 3 * q * q) % 8:
        return "ForcedOne"
    return "Unconstrained"


@dataclass(frozen=True)
class EliminationCertificate:
    a: SurfaceParam
    D: int
    p: int
    rule: str
    symbols: tuple[int, int]
    trace_p: int
    trace_p2: int | None = None
    legendre_D: int = -1

    @property
    def q(self) -> int:
        return self.p if self.rule == Rule.B else self.p * self.p

    def to_dict(self) -> dict:
        return {
            "param_a": format_rational(self.a.a),
            "discriminant_D": self.D,
            "witness_p": self.p,
            "rule": self.rule,
            "legendre_D_p": self.legendre_D,
            "symbols": {"two_1plus_a": self.symbols[0], "two_1minus_a": self.symbols[1]},
            "trace_p": self.trace_p,
            "trace_p2": self.trace_p2,
            "q": self.q,
            "checked": True,
        }

    @classmethod
    def from_dict(cls, data: dict) -> EliminationCertificate:
        syms = data["symbols"]
        return cls(
            a=SurfaceParam(parse_rational(data["param_a"])),
            D=int(data["discriminant_D"]),
            p=int(data["witness_p"]),
            rule=data["rule"],
            symbols=(int(syms["two_1plus_a"]), int(syms["two_1minus_a"])),
            trace_p=int(data["trace_p"]),
            trace_p2=None if data.get("trace_p2") is None else int(data["trace_p2"]),
            legendre_D=int(data["legendre_D_p"]),
        )


def _witness_primes(a: SurfaceParam, D: int, prime_bound: int):
    for p in primerange(3, prime_bound + 1):
        if a.is_good(p) and D % p and legendre(D, p) == -1:
            yield p


def _symbols(a: SurfaceParam, p: int) -> tuple[int, int]:
    return legendre(2 * (1 + a.a), p), legendre(2 * (1 - a.a), p)


def eliminate(
    a: SurfaceParam,
    D: int,
    prime_bound: int = DEFAULT_PRIME_BOUND,
    rules: tuple[str, ...] = (Rule.B, Rule.A),
    primes=None,
) -> EliminationCertificate | None:
    """First certificate ruling out det r = (D/.), or None.

    Each rule in ``rules`` is tried over all witness primes in increasing
    order before moving to the next rule.  ``primes`` restricts the scan
    to an explicit list.
    """
    if D == 1:
        raise BadParameter("D = 1 is the trivial class, not a candidate")
    if D == 0 or squarefree_part(D) != D:
        raise BadParameter(f"D = {D} is not a squarefree integer")
    if prime_bound < 3:
        raise BadParameter("prime_bound must be at least 3")
    witnesses = list(_witness_primes(a, D, prime_bound))
    if primes is not None:
        witnesses = [p for p in witnesses if p in set(primes)]
    for rule in rules:
        for p in witnesses:
            T_p = trace_value(a, p, 1)
            if rule == Rule.B:
                if lemma48_rule(T_p, None, p) == "ForcedOne":
                    return EliminationCertificate(a, D, p, Rule.B, _symbols(a, p), T_p)
            else:
                T_p2 = trace_value(a, p, 2)
                if lemma48_rule(None, T_p2, p) == "ForcedOne":
                    return EliminationCertificate(a, D, p, Rule.A, _symbols(a, p), T_p, T_p2)
    return None


def replay_certificate(cert: EliminationCertificate | dict) -> bool:
    """Recompute every field of a certificate from (a, D, p) and check it."""
    if isinstance(cert, dict):
        try:
            cert = EliminationCertificate.from_dict(cert)
        except (KeyError, TypeError, ValueError):
            return False
    a, D, p = cert.a, cert.D, cert.p
    if D == 1 or p < 3 or not a.is_good(p) or D % p == 0:
        return False
    if legendre(D, p) != -1 or cert.legendre_D != -1:
        return False
    if cert.symbols != _symbols(a, p):
        return False
    if cert.trace_p != trace_value(a, p, 1):
        return False
    if cert.rule == Rule.B:
        return cert.trace_p2 is None and lemma48_rule(cert.trace_p, None, p) == "ForcedOne"
    if cert.rule == Rule.A:
        return cert.trace_p2 == trace_value(a, p, 2) and lemma48_rule(None, cert.trace_p2, p) == "ForcedOne"
    return False


@dataclass
class SieveReport:
    a: SurfaceParam
    prime_bound: int
    candidates: list[int]
    eliminated: list[EliminationCertificate] = field(default_factory=list)
    survivors: list[int] = field(default_factory=list)

    @property
    def star_star_verified(self) -> bool:
        return not self.survivors

    def to_dict(self) -> dict:
        return {
            "param_a": format_rational(self.a.a),
            "prime_bound": self.prime_bound,
            "assumption": SUPPORT_ASSUMPTION,
            "candidates": self.candidates,
            "survivors": self.survivors,
            "star_star_verified": self.star_star_verified,
            "certificates": [c.to_dict() for c in self.eliminated],
        }


def verify_condition_star_star(a: SurfaceParam, prime_bound: int = DEFAULT_PRIME_BOUND) -> SieveReport:
    report = SieveReport(a, prime_bound, candidate_classes(a))
    for D in report.candidates:
        cert = eliminate(a, D, prime_bound)
        if cert is None:
            report.survivors.append(D)
        else:
            report.eliminated.append(cert)
    return report


@dataclass(frozen=True)
class HypothesisReport:
    a: SurfaceParam
    mod5: bool
    two_1plus_a_nonsquare: bool
    two_1minus_a_nonsquare: bool
    mod7: bool

    @property
    def main_hypotheses(self) -> bool:
        """a = 2, 3 mod 5 and neither 2(1+a) nor 2(1-a) is a rational square."""
        return self.mod5 and self.two_1plus_a_nonsquare and self.two_1minus_a_nonsquare

    @property
    def mod7_hypotheses(self) -> bool:
        return self.mod7 and self.two_1plus_a_nonsquare and self.two_1minus_a_nonsquare

    def warnings(self) -> list[str]:
        out = []
        for key, ok in (("2(1+a)", self.two_1plus_a_nonsquare), ("2(1-a)", self.two_1minus_a_nonsquare)):
            if not ok:
                out.append(f"{key} = {format_rational(self.a.square_classes[key][0])} is a square in Q")
        if not (self.mod5 or self.mod7):
            out.append("a is neither 2, 3 mod 5 nor 3, 4 mod 7")
        return out

    def to_dict(self) -> dict:
        return {
            "param_a": format_rational(self.a.a),
            "a_mod_5_in_2_3": self.mod5,
            "two_1plus_a_nonsquare": self.two_1plus_a_nonsquare,
            "two_1minus_a_nonsquare": self.two_1minus_a_nonsquare,
            "a_mod_7_in_3_4": self.mod7,
            "main_hypotheses": self.main_hypotheses,
            "mod7_alternative": self.mod7_hypotheses,
        }


def _residue_in(a: Fraction, m: int, allowed: set[int]) -> bool:
    if a.denominator % m == 0:
        return False
    return a.numerator * pow(a.denominator, -1, m) % m in allowed


def check_hypotheses(a: SurfaceParam | str | int | Fraction) -> HypothesisReport:
    if not isinstance(a, SurfaceParam):
        a = SurfaceParam(parse_rational(a))
    n, d = a.num, a.den
    return HypothesisReport(
        a,
        mod5=_residue_in(a.a, 5, {2, 3}),
        two_1plus_a_nonsquare=not is_rational_square(Fraction(2 * (d + n) * d)),
        two_1minus_a_nonsquare=not is_rational_square(Fraction(2 * (d - n) * d)),
        mod7=_residue_in(a.a, 7, {3, 4}),
    )
