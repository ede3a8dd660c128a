import json
import random

import pytest

from markoff.census import CensusConfig, sieve_candidates
from markoff.orbifold import Mode, OrbifoldPair, PointKind, Weights, classify, integral_adeles_empty, integral_point_search
from markoff.serialize import parse_certificate, serialize
from markoff.witness import (
    UnsupportedCase,
    emptiness_evidence,
    first_thm44_prime,
    generic_shape_solve,
    markoff_residues,
    prop41_hypotheses,
    prop41_witness,
    thm43_witness,
    thm44_witness,
    verify_certificate,
)

from .oracles import markoff_values_mod

W = Weights.parse("2,inf,inf")


def test_m121_shape_first_case():
    cert = prop41_witness(29, W)
    assert cert.m == 174
    assert cert.point == (9, 99, 11, -28)
    assert cert.target_n == 4293 and cert.representation == (11, -28)
    assert cert.adelic_emptiness.prime == 3 and cert.adelic_emptiness.modulus == 9
    assert verify_certificate(cert).ok


def test_m121_shape_second_case():
    assert prop41_witness(107, W).point == (9, 99, 55, -59)


def test_m121_shape_hypotheses():
    assert prop41_hypotheses(29) is None
    assert prop41_hypotheses(30) is not None
    # 6 * 263 - 121 = 1457 = 31 * 47 and 31 = 5 mod 13 is not a square
    assert "31" in prop41_hypotheses(263)
    with pytest.raises(ValueError):
        prop41_witness(263, W)


@pytest.mark.parametrize("omega", [2, 3, 4])
def test_m121_shape_all_weights(omega):
    w = Weights.of(omega, None, None)
    for d in list(sieve_candidates(CensusConfig(3000)))[:10]:
        cert = prop41_witness(d, w)
        assert verify_certificate(cert).ok
        assert cert.point[0] == 3**omega


def test_m46_points_both_modes():
    for omega, point in ((2, (9, 99, 20, 35)), (3, (27, 297, 65, 95))):
        cert = thm43_witness(3, 1, 5, -1, Weights.of(omega, None, None))
        assert cert.m == 46 and cert.point == point
        assert cert.adelic_emptiness is None
        assert verify_certificate(cert).ok
        for mode in (Mode.CAMPANA, Mode.DARMON):
            assert classify(cert.point, OrbifoldPair(46, cert.weights), mode).kind is PointKind.STRICT_SEMI_INTEGRAL
    s = integral_point_search(46, 10**6)
    assert not s.found and s.complete
    assert not integral_adeles_empty(46)


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17])
def test_square_offset_family(p):
    rng = random.Random(p)
    for _ in range(4):
        alpha = rng.randrange(0, 4)
        k = rng.choice([k for k in range(1, 12) if k % p])
        sign = rng.choice([1, -1])
        try:
            cert = thm43_witness(p, alpha, k, sign, W)
        except ValueError:
            continue
        assert verify_certificate(cert).ok


def test_square_offset_unsupported():
    with pytest.raises(UnsupportedCase):
        thm43_witness(19, 1, 1, 1, W)
    with pytest.raises(ValueError):
        thm43_witness(3, 1, 3, 1, W)


def test_negative_family_first_prime():
    assert first_thm44_prime() == 17
    cert = thm44_witness(17, W)
    assert cert.m == -863
    assert verify_certificate(cert).ok


def test_generic_shape_none():
    assert generic_shape_solve(46, W, 3, 11) is None


def test_emptiness_evidence_matches_residue_oracle():
    vals = {q: markoff_values_mod(q) for q in (16, 27)}
    for m in range(-200, 201):
        if m in (0, 4):
            continue
        ev = emptiness_evidence(m)
        if ev is not None:
            assert m % ev.modulus not in markoff_values_mod(ev.modulus)
        else:
            assert m % 16 in vals[16] and m % 27 in vals[27]
    assert markoff_residues(3, 2) == frozenset(markoff_values_mod(9))


def test_verify_detects_tampering():
    cert = prop41_witness(29, W)
    d = json.loads(serialize(cert))
    d["point"][2] += 1
    assert verify_certificate(parse_certificate(json.dumps(d))).failed == "on_surface"
    d = json.loads(serialize(cert))
    d["representation"] = [1, 2]
    assert verify_certificate(parse_certificate(json.dumps(d))).failed == "form_equation"
    # the form is symmetric, so swapping still solves it but no longer matches the point
    d["representation"] = [-28, 11]
    assert verify_certificate(parse_certificate(json.dumps(d))).failed == "form_matches_point"
    d = json.loads(serialize(cert))
    d["weights"] = [3, "inf", "inf"]
    assert verify_certificate(parse_certificate(json.dumps(d))).failed == "strict_campana"


def test_certificate_round_trip():
    for cert in (prop41_witness(29, W), thm43_witness(3, 1, 5, -1, W), thm44_witness(17, W)):
        data = serialize(cert)
        assert parse_certificate(data) == cert
        assert serialize(parse_certificate(data)) == data
