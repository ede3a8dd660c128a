import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from markoff.arith import is_prime
from markoff.quadform import (
    IDENTITY,
    QuadForm,
    UnimodularMap,
    UnsupportedDiscriminant,
    automorph,
    find_equivalence,
    fundamental_solution,
    genus_of_value,
    gl2_class_trivial,
    narrow_class_group,
    properly_equivalent,
    reduce,
    reduced_forms,
    represent_all,
    represent_primitive,
)


def test_class_group_117():
    g = narrow_class_group(117)
    assert g.narrow_class_number == 2
    assert g.genus_count == 2
    assert [f.key() for f in g.narrow_classes] == [(-1, 9, 9), (1, 9, -9)]
    assert list(g.genus_characters) == ["(3)", "(13)"]


def test_class_group_small_discriminants():
    assert narrow_class_group(28).narrow_class_number == 2
    assert narrow_class_group(13).narrow_class_number == 1
    g = narrow_class_group(252)
    assert g.narrow_class_number == 4 and g.genus_count == 4
    assert narrow_class_group(173).narrow_class_number == 1
    assert narrow_class_group(365).narrow_class_number == 2


def test_unsupported_discriminant():
    for d in (0, 9, 49):
        with pytest.raises(UnsupportedDiscriminant):
            narrow_class_group(d)
    with pytest.raises(ValueError):
        narrow_class_group(15)


@pytest.mark.parametrize("d,expected", [(13, 1), (28, 2), (117, 2), (173, 1), (252, 4)])
def test_genus_count(d, expected):
    assert narrow_class_group(d).genus_count == expected


def _brute_force_classes(d, box):
    """Primitive forms of discriminant d with coefficients in a box."""
    forms = set()
    for a in range(-box, box + 1):
        for b in range(-box, box + 1):
            if a == 0 or (b * b - d) % (4 * a):
                continue
            c = (b * b - d) // (4 * a)
            if abs(c) <= box and math.gcd(a, b, c) == 1:
                forms.add((a, b, c))
    return forms


def test_forms_partition_into_narrow_classes_117():
    g = narrow_class_group(117)
    reps = list(g.narrow_classes)
    for key in _brute_force_classes(117, 40):
        f = QuadForm(*key)
        hits = [r for r in reps if properly_equivalent(f, r)]
        assert len(hits) == 1, key


def test_find_equivalence_maps_forms():
    f, g = QuadForm(1, -16, 1), QuadForm(1, 0, -63)
    M = find_equivalence(f, g)
    assert M is not None and M.det == 1
    assert f.act(M) == g
    assert find_equivalence(QuadForm(-1, 9, 9), QuadForm(1, 9, -9)) is None


S_MAP = UnimodularMap(0, -1, 1, 0)


@given(st.lists(st.integers(-4, 4), min_size=1, max_size=6))
def test_reduce_is_proper_equivalence(shifts):
    M = IDENTITY
    for k in shifts:
        M = M @ UnimodularMap(1, k, 0, 1) @ S_MAP
    for base in (QuadForm(1, -11, 1), QuadForm(-1, 9, 9), QuadForm(2, 4, -3)):
        f = base.act(M)
        g, T = reduce(f)
        assert T.det == 1 and f.act(T) == g
        assert properly_equivalent(g, base)


def _pell_brute(d):
    """Least u > 0 with d u^2 + 4 a square."""
    u = 1
    while not _is_sq(d * u * u + 4):
        u += 1
    return math.isqrt(d * u * u + 4), u


def _is_sq(n):
    return math.isqrt(n) ** 2 == n


@pytest.mark.parametrize("d", [5, 8, 12, 13, 28, 29, 117, 173, 252, 365])
def test_fundamental_solution_matches_brute_force(d):
    assert fundamental_solution(d) == _pell_brute(d)


def test_fundamental_solution_examples():
    assert fundamental_solution(5) == (3, 1)
    assert fundamental_solution(8) == (6, 2)
    assert fundamental_solution(13) == (11, 3)


def test_automorph_fixes_form():
    for f in (QuadForm(1, -11, 1), QuadForm(-1, 9, 9), QuadForm(2, 4, -3)):
        A = automorph(f)
        assert A.det == 1 and A != IDENTITY
        assert f.act(A) == f


def test_represent_examples():
    r = represent_primitive(QuadForm(1, 0, -7), 1)
    assert (r.x, r.y) == (1, 0)
    assert represent_primitive(QuadForm(1, -11, 1), 53) is None
    r = represent_primitive(QuadForm(1, -11, 1), 4293)
    assert (r.x, r.y) == (11, -28)


def _box_values(f, box=200):
    """Values of f at primitive vectors with |x|, |y| <= box."""
    x = np.arange(-box, box + 1, dtype=np.int64)
    X, Y = np.meshgrid(x, x, indexing="ij")
    prim = np.gcd(X, Y) == 1
    vals = f.a * X * X + f.b * X * Y + f.c * Y * Y
    return set(vals[prim].tolist())


@pytest.mark.parametrize("d", [5, 8, 12, 13, 21, 28, 29, 40, 117, 173, 221, 252, 285])
def test_represent_agrees_with_box_search(d):
    for f in narrow_class_group(d).narrow_classes:
        seen = _box_values(f)
        for n in range(-2000, 2001):
            if n == 0:
                continue
            r = represent_primitive(f, n)
            if r is not None:
                assert f(r.x, r.y) == n and math.gcd(r.x, r.y) == 1
            elif n in seen:
                raise AssertionError((f, n))


def test_represent_all_orbits_are_distinct():
    f = QuadForm(1, -11, 1)
    reps = represent_all(f, 4293)
    assert reps and all(f(r.x, r.y) == 4293 for r in reps)
    assert len({(r.x, r.y) for r in reps}) == len(reps)


def test_genus_of_value():
    assert genus_of_value(5, 117) == (-1, -1)
    assert genus_of_value(1, 117) == (1, 1)


def test_gl2_class_trivial_list():
    odd = [p for p in range(3, 100) if is_prime(p)]
    assert [p for p in odd if gl2_class_trivial(p * p + 4)] == [3, 5, 7, 11, 13, 17]


def test_reduced_forms_are_reduced_and_primitive():
    for f in reduced_forms(117):
        assert f.disc == 117
        assert f.is_primitive
