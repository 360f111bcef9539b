from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from strategies import weights
from orbcalc.errors import InvalidWeight
from orbcalc.oracles import is_listed_spherical_triple, orb_char_by_integers
from orbcalc.orbifold import (
    INF,
    Geometry,
    OrbSurface,
    SurfaceComponent,
    check_weight,
    classify_2orbifold,
    cover_char,
    orb_char,
    puncture_term,
    sphere,
    vertex_char,
    weight_reciprocal,
)

components = st.builds(SurfaceComponent, st.integers(0, 4), st.lists(weights, max_size=6).map(tuple))


@pytest.mark.parametrize("w, expected", [(2, Fraction(1, 2)), (INF, 0), (7, Fraction(1, 7))])
def test_weight_reciprocal(w, expected):
    assert weight_reciprocal(w) == expected


@pytest.mark.parametrize("bad", [0, 1, -3, 2.0, True, "2", None])
def test_check_weight_rejects(bad):
    with pytest.raises(InvalidWeight):
        check_weight(bad)


def test_inf_is_a_singleton_above_integers():
    import pickle

    assert pickle.loads(pickle.dumps(INF)) is INF
    assert INF > 10**9 and not INF < 3
    assert sphere(INF, 2, 5).punctures == (2, 5, INF)


@pytest.mark.parametrize(
    "comp, expected",
    [
        (sphere(2, 2, 2, 2), Fraction(0)),
        (SurfaceComponent(2), Fraction(2)),
        (sphere(2, 3, 7), Fraction(1, 42)),
        (sphere(), Fraction(-2)),
        (sphere(INF, INF), Fraction(0)),
    ],
)
def test_orb_char_examples(comp, expected):
    assert orb_char_by_integers(comp.genus, comp.punctures) == expected
    assert orb_char(comp) == expected


def test_empty_surface_has_zero_characteristic():
    assert orb_char(OrbSurface()) == 0
    assert orb_char([]) == 0


@pytest.mark.parametrize(
    "comp, geometry, turnover",
    [
        (sphere(3), Geometry.BAD, False),
        (sphere(2, INF), Geometry.BAD, False),
        (sphere(2, 3, 5), Geometry.SPHERICAL, True),
        (sphere(3, 3, 3), Geometry.EUCLIDEAN, True),
        (sphere(2, 3, 7), Geometry.HYPERBOLIC, True),
        (sphere(5, 5), Geometry.SPHERICAL, False),
        (SurfaceComponent(1), Geometry.EUCLIDEAN, False),
    ],
)
def test_classify_2orbifold(comp, geometry, turnover):
    cls = classify_2orbifold(comp)
    assert (cls.geometry, cls.turnover) == (geometry, turnover)


def test_once_punctured_inf_sphere_is_flagged_but_not_bad():
    cls = classify_2orbifold(sphere(INF))
    assert cls.inf_once_punctured
    assert cls.geometry is not Geometry.BAD


@pytest.mark.parametrize(
    "triple, x, valid",
    [((2, 2, 9), Fraction(-1, 9), True), ((2, 3, 5), Fraction(-1, 30), True), ((3, 3, 3), Fraction(0), False)],
)
def test_vertex_char(triple, x, valid):
    assert vertex_char(triple) == (x, valid)


@pytest.mark.parametrize(
    "surface, degree, expected",
    [([sphere(2, 2, 2, 2)], 2, 0), ([SurfaceComponent(2)], 3, 6), ([sphere(2, 3, 7)], 42, 1)],
)
def test_cover_char(surface, degree, expected):
    assert cover_char(OrbSurface(surface), degree) == expected


@given(components)
def test_orb_char_matches_integer_oracle(c):
    assert orb_char(c) == orb_char_by_integers(c.genus, c.punctures)


@given(components)
def test_orb_char_lower_bound(c):
    x = orb_char(c)
    assert x >= -2
    assert (x == -2) == (c.genus == 0 and not c.punctures)


@given(weights)
def test_puncture_term_range(w):
    assert Fraction(1, 2) <= puncture_term(w) <= 1


@given(st.lists(components, max_size=4), st.lists(components, max_size=4), st.integers(1, 50))
def test_additive_and_multiplicative(xs, ys, d):
    assert orb_char(OrbSurface(xs + ys)) == orb_char(OrbSurface(xs)) + orb_char(OrbSurface(ys))
    assert cover_char(OrbSurface(xs), d) == d * orb_char(OrbSurface(xs))


@given(st.lists(weights, min_size=1, max_size=2))
def test_bad_precedes_spherical(ps):
    c = SurfaceComponent(0, tuple(ps))
    cls = classify_2orbifold(c)
    bad = (len(ps) == 1 and ps[0] is not INF) or (len(ps) == 2 and ps[0] != ps[1])
    if bad:
        assert cls.geometry is Geometry.BAD
    elif orb_char(c) < 0:
        assert cls.geometry is Geometry.SPHERICAL


@given(weights, weights, weights)
def test_vertex_validity_matches_list(a, b, c):
    assert vertex_char((a, b, c))[1] == is_listed_spherical_triple((a, b, c))
