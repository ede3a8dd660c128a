"""One test per acceptance criterion; each prints a single PASS/FAIL line."""

import math
import random
import time
from fractions import Fraction

from markoff.arith import INF, factorize, hilbert, valuation
from markoff.brauer import (
    HALF,
    ZERO,
    Element,
    IndeterminateRepresentative,
    PrecisionError,
    StarVerdict,
    build_obstructed_adele,
    inv_alpha,
    inv_alpha_i,
    invariant,
    real_point_on,
    star_condition,
)
from markoff.census import CensusConfig, run_census, sieve_candidates, star_failure_scan
from markoff.orbifold import (
    LocalPoint,
    Mode,
    OrbifoldPair,
    PointKind,
    Weights,
    check_prop32_structure,
    classify,
    integral_adeles_empty,
    integral_point_search,
    is_local_semiintegral,
)
from markoff.quadform import gl2_class_trivial, narrow_class_group
from markoff.witness import prop41_witness, thm43_witness, verify_certificate

from .conftest import ACCEPTANCE_LINES
from .oracles import (
    global_strict_points,
    hilbert_oracle,
    random_strict_local_point,
    strict_nonintegral_point,
    theta_is_square_by_factoring,
    theta_is_square_by_search,
)

W = Weights.parse("2,inf,inf")
MS = [m for m in range(-50, 51) if m not in (0, 4)]


def report(n, title, ok, detail, started):
    line = f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {title} ({detail}; {time.perf_counter() - started:.1f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_01_hilbert_oracle_and_product_formula():
    t = time.perf_counter()
    mismatches = [
        (a, b, p)
        for p in (2, 3, 5, 7, 11, 13)
        for a in range(-30, 31)
        for b in range(-30, 31)
        if a and b and hilbert(a, b, p) != hilbert_oracle(a, b, p)
    ]
    violations = []
    for a in range(-50, 51):
        for b in range(-50, 51):
            if a and b:
                places = [INF] + list(factorize(abs(2 * a * b)))
                if math.prod(hilbert(a, b, v) for v in places) != 1:
                    violations.append((a, b))
    ok = not mismatches and not violations
    report(1, "Hilbert symbol oracle and product formula", ok, f"{len(mismatches)} mismatches, {len(violations)} product violations", t)


def test_02_class_group_facts():
    t = time.perf_counter()
    h117 = narrow_class_group(117).narrow_class_number
    h28 = narrow_class_group(28).narrow_class_number
    odd = [p for p in range(3, 100) if all(p % q for q in range(2, p))]
    trivial = [p for p in odd if gl2_class_trivial(p * p + 4)]
    ok = h117 == 2 and h28 == 2 and trivial == [3, 5, 7, 11, 13, 17]
    report(2, "class groups of 117, 28 and p^2 + 4", ok, f"h+(117)={h117}, h+(28)={h28}, trivial at {trivial}", t)


def test_03_m46_end_to_end():
    t = time.perf_counter()
    ok = True
    for omega in (2, 3):
        cert = thm43_witness(3, 1, 5, -1, Weights.of(omega, None, None))
        pair = OrbifoldPair(46, cert.weights)
        ok &= cert.m == 46 and verify_certificate(cert).ok
        for mode in (Mode.CAMPANA, Mode.DARMON):
            ok &= classify(cert.point, pair, mode).kind is PointKind.STRICT_SEMI_INTEGRAL
    s = integral_point_search(46, 10**6)
    ok &= (not s.found) and s.complete
    ok &= integral_adeles_empty(46) is False
    report(3, "m = 46 strict points, no integral point, adeles nonempty", ok, f"search complete={s.complete}", t)


def test_04_witness_every_qualifying_d():
    t = time.perf_counter()
    ds = list(sieve_candidates(CensusConfig(5000)))
    failures = []
    for d in ds:
        m = 6 * d
        try:
            cert = prop41_witness(d, W)
            good = verify_certificate(cert).ok and m % 9 == 3 and integral_adeles_empty(m)
        except (ValueError, RuntimeError):
            good = False
        if not good:
            failures.append(d)
    report(4, "witness for every qualifying d <= 5000", not failures and len(ds) > 0, f"{len(ds)} values, {len(failures)} failures", t)


def test_05_census_growth():
    t = time.perf_counter()
    res = run_census(CensusConfig(10**7), [10**5, 10**6, 10**7])
    counts = [s for _, s in res.checkpoints]
    growth = [g for _, g in res.growth]
    ratio = max(growth) / min(growth)
    ok = ratio < 1.15 and all(a < b for a, b in zip(counts, counts[1:]))
    detail = f"S={counts}, growth={[round(g, 5) for g in growth]}, ratio={ratio:.4f}"
    report(5, "census growth S(B) sqrt(ln B)/B stable", ok, detail, t)


def test_06_obstructed_adeles():
    t = time.perf_counter()
    ok = True
    for m in (1, 6, 7, 10):
        adele, total = build_obstructed_adele(m, W)
        ok &= total == HALF
        pair = OrbifoldPair(m, W)
        for p, pt in adele.entries.items():
            for mode in (Mode.CAMPANA, Mode.DARMON):
                ok &= bool(is_local_semiintegral(pt, pair, p, mode))
    adele6, _ = build_obstructed_adele(6, W)
    ok &= adele6.exceptional_place == 2 and valuation(6 - 4, 2) == 1
    report(6, "obstructed adeles for m in {1, 6, 7, 10}", ok, f"exceptional place for m=6: {adele6.exceptional_place}", t)


def _fuzz_points(rng, count):
    """(m, point, place) triples with m in [-50, 50]: p-adic points, exact real
    points and global rational points (at each place where they can be nonzero)."""
    out = []
    primes = [2, 3, 5, 7, 11, 13]
    while len(out) < count:
        m = rng.choice(MS)
        kind = rng.random()
        if kind < 0.7:
            p = rng.choice(primes)
            x, _ = random_strict_local_point(rng, m, p)
            out.append((m, LocalPoint(x, p, 40), p))
        elif kind < 0.8 and m < 4:
            out.append((m, real_point_on(m, rng.randrange(1, 4), rng.random() < 0.5), INF))
        else:
            for x in global_strict_points(m, rng, 2):
                n = 2 * (m - 4) * x[0] * math.prod(x[i] ** 2 - 4 * x[0] ** 2 or 1 for i in (1, 2, 3))
                out.extend((m, x, v) for v in [INF] + list(factorize(n)))
    return out[:count]


def test_07_invariant_additivity_and_vanishing():
    t = time.perf_counter()
    rng = random.Random(2024)
    evaluated = bad = skipped = 0
    for m, P, v in _fuzz_points(rng, 600):
        try:
            parts = sum((inv_alpha_i(i, P, m, v) for i in (1, 2, 3)), ZERO) % 1
            whole = inv_alpha(P, m, v)
        except (IndeterminateRepresentative, PrecisionError):
            skipped += 1
            continue
        evaluated += 1
        bad += whole != parts
        if m > 4 and math.isqrt(m - 4) ** 2 == m - 4:
            bad += whole != ZERO or parts != ZERO
    vanish_bad = 0
    for m in (5, 8, 13, 20, 29, 40):
        for p in (2, 3, 5, 7):
            for _ in range(10):
                x, _ = random_strict_local_point(rng, m, p)
                for el in Element:
                    try:
                        vanish_bad += invariant(el, LocalPoint(x, p, 40), m, p) != ZERO
                    except (IndeterminateRepresentative, PrecisionError):
                        pass
    ok = evaluated >= 500 and bad == 0 and vanish_bad == 0
    report(7, "inv alpha = sum inv alpha_i; vanishing for square m - 4", ok, f"{evaluated} points evaluated, {skipped} singular, {bad + vanish_bad} violations", t)


def test_08_strict_point_structure():
    t = time.perf_counter()
    rng = random.Random(32)
    total = bad = 0
    for p in (2, 5, 7, 13):
        for _ in range(50):
            m = rng.choice(MS)
            i = rng.randrange(1, 4)
            w = rng.choice([2, 3, 5])
            ws = [INF, INF, INF]
            ws[i - 1] = w
            pair = OrbifoldPair(m, Weights(tuple(ws)))
            P = LocalPoint(strict_nonintegral_point(rng, m, p, i, rng.randrange(w, w + 4)), p, 40)
            v = check_prop32_structure(P, pair, p)
            total += 1
            bad += not (P.residual_ok(m) and v.holds and (p != 2 or v.v0 == v.vi - 1))
    report(8, "valuation pattern of strict non-integral local points", bad == 0 and total == 200, f"{total} points, {bad} violations", t)


def test_09_star_condition():
    t = time.perf_counter()
    disagree = []
    for m in range(-200, 201):
        if m in (0, 4):
            continue
        r = star_condition(m)
        square_case = 4 - m > 0 and math.isqrt(4 - m) ** 2 == 4 - m
        oracle_fails = square_case and theta_is_square_by_search(m, 64) is not None
        if (r.verdict is StarVerdict.FAILS) != oracle_fails:
            disagree.append(m)
    r12 = star_condition(-12)
    scan = star_failure_scan(10**4)
    oracle = [4 - c * c for c in range(3, 101) if theta_is_square_by_factoring(4 - c * c)]
    ok = not disagree and r12.verdict is StarVerdict.FAILS and r12.witness_ok() and scan.count == len(oracle)
    report(9, "star condition vs bounded search and factoring", ok, f"{len(disagree)} disagreements, {scan.count} failures up to 10^4 (oracle {len(oracle)})", t)


def test_10_subset_relations():
    t = time.perf_counter()
    rng = random.Random(10)
    checked = bad = 0
    ds = list(sieve_candidates(CensusConfig(20_000)))
    while checked < 500:
        omega1 = rng.choice([2, 3, 4])
        omega3 = rng.choice([2, 3, 4])
        narrow = Weights.of(omega1, None, None)
        wide = Weights.of(omega1, omega3, omega3)
        if rng.random() < 0.7:
            p = rng.choice([2, 3, 5, 7, 13])
            m = rng.choice(MS)
            if rng.random() < 0.5:
                x = strict_nonintegral_point(rng, m, p, 1, rng.randrange(1, 6))
            else:
                x, _ = random_strict_local_point(rng, m, p)
            P = LocalPoint(x, p, 40)
            for w in (narrow, wide):
                pair = OrbifoldPair(m, w)
                bad += bool(is_local_semiintegral(P, pair, p, Mode.DARMON)) and not is_local_semiintegral(P, pair, p, Mode.CAMPANA)
            for mode in (Mode.CAMPANA, Mode.DARMON):
                bad += bool(is_local_semiintegral(P, OrbifoldPair(m, narrow), p, mode)) and not is_local_semiintegral(P, OrbifoldPair(m, wide), p, mode)
        else:
            cert = prop41_witness(rng.choice(ds), narrow) if rng.random() < 0.7 else thm43_witness(3, 1, rng.choice([1, 2, 4, 5, 7]), rng.choice([1, -1]), narrow)
            strict = (PointKind.STRICT_SEMI_INTEGRAL, PointKind.INTEGRAL)
            for w in (narrow, wide):
                pair = OrbifoldPair(cert.m, w)
                dar = classify(cert.point, pair, Mode.DARMON).kind in strict
                cam = classify(cert.point, pair, Mode.CAMPANA).kind in strict
                bad += dar and not cam
            for mode in (Mode.CAMPANA, Mode.DARMON):
                before = classify(cert.point, OrbifoldPair(cert.m, narrow), mode).kind in strict
                after = classify(cert.point, OrbifoldPair(cert.m, wide), mode).kind in strict
                bad += before and not after
        checked += 1
    report(10, "Darmon implies Campana; strictness survives finite extra weights", bad == 0, f"{checked} points, {bad} violations", t)
