import json
from dataclasses import replace
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import primerange

from vgtate.counting import fiber_count_naive
from vgtate.detsieve import (
    SUPPORT_ASSUMPTION,
    EliminationCertificate,
    Rule,
    candidate_classes,
    check_hypotheses,
    eliminate,
    lemma48_rule,
    replay_certificate,
    squarefree_part,
    verify_condition_star_star,
)
from vgtate.errors import BadParameter
from vgtate.ff import FieldSpec, legendre
from vgtate.fibration import SurfaceParam, multiplicity_profile
from vgtate.trace import Prop45Status, trace_value, verify_prop45


def test_squarefree_part():
    assert squarefree_part(-8) == -2
    assert squarefree_part(Fraction(-15, 4)) == -15
    assert squarefree_part(Fraction(2, 3)) == 6
    assert squarefree_part(49) == 1
    with pytest.raises(BadParameter):
        squarefree_part(0)


def test_candidate_examples():
    assert candidate_classes(SurfaceParam(2)) == [-1, 2, -2, 3, -3, 6, -6]
    assert candidate_classes(SurfaceParam(3)) == [-1, 2, -2]
    assert candidate_classes(SurfaceParam(Fraction(1, 3))) == candidate_classes(SurfaceParam(2))
    assert len(candidate_classes(SurfaceParam(4))) == 2**4 - 1


def test_lemma48_examples():
    assert lemma48_rule(3, None, 5) == "ForcedOne"
    assert lemma48_rule(5, None, 5) == "Unconstrained"
    assert lemma48_rule(-5, None, 5) == "Unconstrained"
    assert lemma48_rule(None, -33, 7) == "ForcedOne"
    assert lemma48_rule(None, 3 * 49, 7) == "Unconstrained"
    assert lemma48_rule(None, None, 7) == "Unconstrained"


def test_eliminate_examples():
    cert = eliminate(SurfaceParam(2), -3)
    assert (cert.p, cert.rule, cert.trace_p) == (5, Rule.B, 3)
    assert cert.symbols == (1, -1)
    cert = eliminate(SurfaceParam(2), -1)
    assert cert is not None and replay_certificate(cert)
    with pytest.raises(BadParameter):
        eliminate(SurfaceParam(2), 1)
    with pytest.raises(BadParameter):
        eliminate(SurfaceParam(2), 12)


def test_rule_a_only():
    cert = eliminate(SurfaceParam(2), -1, rules=(Rule.A,))
    assert cert.rule == Rule.A and cert.q == cert.p**2
    assert (cert.trace_p2 - 3 * cert.q) % 8
    assert replay_certificate(cert)


def test_witness_has_nonresidue_symbol():
    a = SurfaceParam(5)
    for D in candidate_classes(a):
        cert = eliminate(a, D, prime_bound=100)
        assert cert is not None
        assert legendre(D, cert.p) == -1 and a.is_good(cert.p)


def test_replay_rejects_tampering():
    cert = eliminate(SurfaceParam(2), -3)
    assert replay_certificate(cert.to_dict())
    assert not replay_certificate(replace(cert, trace_p=cert.trace_p + 1))
    assert not replay_certificate(replace(cert, trace_p=cert.trace_p - 1))
    assert not replay_certificate(replace(cert, p=11))  # (-3/11) = 1 is not a witness
    assert not replay_certificate(replace(cert, symbols=(-1, -1)))
    assert not replay_certificate(replace(cert, rule="C"))
    d = cert.to_dict()
    del d["witness_p"]
    assert not replay_certificate(d)


def test_certificate_json_roundtrip():
    cert = eliminate(SurfaceParam(Fraction(1, 3)), 6, rules=(Rule.A,))
    d = json.loads(json.dumps(cert.to_dict()))
    assert EliminationCertificate.from_dict(d) == cert
    assert set(d) == {"param_a", "discriminant_D", "witness_p", "rule", "legendre_D_p", "symbols",
                      "trace_p", "trace_p2", "q", "checked"}


@pytest.mark.parametrize("a", [2, 3, 7])
def test_sieve_monotone_in_prime_bound(a):
    param = SurfaceParam(a)
    prev = None
    for bound in (3, 7, 13, 29, 60):
        survivors = set(verify_condition_star_star(param, bound).survivors)
        if prev is not None:
            assert survivors <= prev
        prev = survivors


def test_check_hypotheses():
    h = check_hypotheses(2)
    assert h.main_hypotheses and not h.mod7
    h = check_hypotheses(7)
    assert not h.two_1plus_a_nonsquare and not h.main_hypotheses
    assert h.warnings() == ["2(1+a) = 16/1 is a square in Q"]
    with pytest.raises(BadParameter):
        check_hypotheses(1)
    assert check_hypotheses("3").mod7_hypotheses
    assert check_hypotheses(Fraction(1, 5)).mod5 is False


@pytest.mark.parametrize("a", [2, 3, 5, -2, Fraction(1, 3)])
def test_rule_a_always_fires_when_both_symbols_negative(a):
    param = SurfaceParam(a)
    for p in primerange(3, 51):
        if not param.is_good(p):
            continue
        if legendre(2 * (1 + param.a), p) == legendre(2 * (1 - param.a), p) == -1:
            assert lemma48_rule(None, trace_value(param, p, 2), p) == "ForcedOne"
            assert verify_prop45(param, p).status is Prop45Status.VERIFIED


def test_mod7_path_cross_checked_by_oracle():
    param = SurfaceParam(3)
    cert = eliminate(param, squarefree_part(1 - 9), primes=[7])
    assert (cert.p, cert.rule) == (7, Rule.B)
    # T(3, 7) from raw fiber counts of the naive oracle
    spec = FieldSpec(7)
    total = sum(m * fiber_count_naive(spec(3), t).N for t, m in multiplicity_profile(spec).items())
    assert total // 2 == cert.trace_p


@pytest.mark.parametrize("a", [Fraction(1, 3), Fraction(-3, 7), Fraction(7, 2), 12, -8])
def test_sieve_on_hypothesis_params(a):
    param = SurfaceParam(a)
    report = verify_condition_star_star(param, 200)
    if check_hypotheses(param).main_hypotheses:
        assert report.star_star_verified
    assert all(replay_certificate(c) for c in report.eliminated)
    d = report.to_dict()
    assert d["assumption"] == SUPPORT_ASSUMPTION
    assert len(d["certificates"]) + len(d["survivors"]) == len(d["candidates"])


@settings(max_examples=25, deadline=None)
@given(st.integers(-40, 40), st.integers(1, 9))
def test_certificates_always_replay(n, d):
    a = Fraction(n, d)
    if a in (1, -1):
        return
    param = SurfaceParam(a)
    for D in candidate_classes(param)[:3]:
        cert = eliminate(param, D, prime_bound=40)
        if cert is not None:
            assert replay_certificate(cert)


def test_sieve_consistency_up_to_50():
    params = []
    for d in range(1, 8):
        for n in range(-50, 51):
            a = Fraction(n, d)
            if a.denominator == d and abs(a) <= 50 and a not in (1, -1) and check_hypotheses(a).main_hypotheses:
                params.append(a)
    assert len(params) > 100
    failures = [a for a in params if not verify_condition_star_star(SurfaceParam(a), 200).star_star_verified]
    assert failures == []


@pytest.mark.parametrize("a", [2, 3, 5, -2, Fraction(1, 3)])
def test_rule_a_witness_for_classes_other_than_1_minus_a2(a):
    param = SurfaceParam(a)
    skip = squarefree_part(1 - param.a**2)
    for D in candidate_classes(param):
        if D != skip:
            cert = eliminate(param, D, rules=(Rule.A,))
            assert cert is not None and cert.rule == Rule.A
