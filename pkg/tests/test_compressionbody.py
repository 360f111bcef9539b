from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from orbcalc.compressionbody import (
    Ball,
    EdgeKind,
    Exceptional,
    OneHandle,
    Product,
    Triviality,
    assemble,
    classify_exceptional,
    ghost_arc_graph,
    is_reduced,
    is_trivial,
    n_value,
)
from orbcalc.errors import Disconnected, InvalidVertex, MismatchedWeight, OrbcalcError, SiteConflict
from orbcalc.oracles import plus_char_by_cells, reclassify
from orbcalc.orbifold import INF, SurfaceComponent, orb_char, sphere

SMALL_WEIGHTS = [2, 3, 5, INF]


@st.composite
def assemblies(draw, max_zero=3, max_one=4):
    w = st.sampled_from(SMALL_WEIGHTS)
    zero = st.one_of(
        st.lists(w, max_size=3).map(lambda c: Ball(tuple(c))),
        st.builds(Product, st.integers(0, 1), st.lists(w, max_size=3).map(tuple)),
    )
    zs = draw(st.lists(zero, min_size=1, max_size=max_zero))
    os_ = []
    free = {(h, i) for h, z in enumerate(zs) for i in range(len(z.punctures))}
    for _ in range(draw(st.integers(0, max_one))):
        a = draw(st.integers(0, len(zs) - 1))
        b = draw(st.integers(0, len(zs) - 1))
        choices = [
            (i, k)
            for i in range(len(zs[a].punctures))
            for k in range(len(zs[b].punctures))
            if (a, i) in free and (b, k) in free and (a, i) != (b, k) and zs[a].punctures[i] == zs[b].punctures[k]
        ]
        if choices and draw(st.booleans()):
            i, k = draw(st.sampled_from(choices))
            free -= {(a, i), (b, k)}
            os_.append(OneHandle(a, b, zs[a].punctures[i], i, k))
        else:
            os_.append(OneHandle(a, b))
    try:
        return assemble(zs, os_)
    except OrbcalcError:
        assume(False)


def test_trivial_arc_ball():
    for w in (2, 7, INF):
        c = assemble([Ball((w, w))])
        assert c.plus == sphere(w, w)
        assert [e.kind for e in c.edges] == [EdgeKind.BRIDGE]
        assert n_value(c) == -2 + 2 * (1 - (0 if w is INF else Fraction(1, w)))


def test_pillow_from_two_arc_balls():
    c = assemble([Ball((2, 2)), Ball((2, 2))], [OneHandle(0, 1)])
    assert c.plus == sphere(2, 2, 2, 2)
    assert sorted(e.kind for e in c.edges) == [EdgeKind.BRIDGE, EdgeKind.BRIDGE]
    assert n_value(c) == 0
    assert classify_exceptional(c) is Exceptional.EUCLIDEAN_PILLOW


def test_solid_torus_around_core_loop():
    for k in (2, 5, INF):
        c = assemble([Ball((k, k))], [OneHandle(0, 0, k, 0, 1)])
        assert c.plus == SurfaceComponent(1)
        assert [e.kind for e in c.edges] == [EdgeKind.CORE_LOOP]
        assert n_value(c) == 0
        assert classify_exceptional(c) is Exceptional.SOLID_TORUS_CORE


@pytest.mark.parametrize(
    "zs, os_, expected",
    [
        ([Ball()], [], -2),
        ([Ball()], [OneHandle(0, 0)] * 3, 4),
        ([Product(1)], [], 0),
    ],
)
def test_n_value(zs, os_, expected):
    assert n_value(assemble(zs, os_)) == expected


def test_ghost_arc_graph_examples():
    g = ghost_arc_graph(assemble([Ball((3, 3))]))
    assert g.edges == () and not g.violation
    g = ghost_arc_graph(assemble([Product(0, (3, 3))]))
    assert len(g.vertices) == 1 and g.edges == ()
    g = ghost_arc_graph(assemble([Product(0, (4,)), Product(0, (4,))], [OneHandle(0, 1, 4, 0, 0)]))
    assert len(g.edges) == 1 and g.cycle_rank == 0 and not g.violation
    u, v, w = g.edges[0]
    assert u != v and w == 4


@pytest.mark.parametrize(
    "zs, os_, expected",
    [
        ([Ball((INF, INF))], [], Exceptional.EUCLIDEAN_TRIVIAL_BALL),
        ([Ball()], [OneHandle(0, 0)], Exceptional.SOLID_TORUS_EMPTY),
        ([Ball((2, 2, 7)), Ball((2, 2, 7))], [OneHandle(0, 1, 7, 2, 2)], Exceptional.EUCLIDEAN_PILLOW),
        ([Ball((2, 3, 5))], [], Exceptional.TRIVIAL_BALL),
        ([Ball()], [OneHandle(0, 0)] * 2, Exceptional.NONE),
    ],
)
def test_classify_exceptional(zs, os_, expected):
    c = assemble(zs, os_)
    assert classify_exceptional(c) is expected
    assert reclassify(c) is expected


def test_weighted_pillow_boundary():
    c = assemble([Ball((2, 2, 3)), Ball((2, 2, 3))], [OneHandle(0, 1, 3, 2, 2)])
    assert c.plus == sphere(2, 2, 2, 2) and orb_char(c.plus) == 0


@pytest.mark.parametrize(
    "zs, os_, expected",
    [
        ([Ball((2, 3, 5))], [], Triviality.TRIVIAL_BALL),
        ([Product(1)], [], Triviality.TRIVIAL_PRODUCT),
        ([Ball((2, 2)), Ball((2, 2))], [OneHandle(0, 1)], Triviality.NOT_TRIVIAL),
    ],
)
def test_is_trivial(zs, os_, expected):
    assert is_trivial(assemble(zs, os_)) is expected


def test_assembly_errors():
    with pytest.raises(MismatchedWeight):
        assemble([Ball((2, 2)), Ball((3, 3))], [OneHandle(0, 1, 2, 0, 0)])
    with pytest.raises(Disconnected):
        assemble([Ball(), Ball()])
    with pytest.raises(InvalidVertex):
        assemble([Ball((3, 3, 3))])
    with pytest.raises(InvalidVertex):
        assemble([Ball((2, 2, 2, 2))])
    with pytest.raises(SiteConflict):
        assemble([Ball((2, 2)), Ball((2, 2))], [OneHandle(0, 1, 2, 0, 0), OneHandle(0, 1, 2, 0, 1)])


def test_one_cone_point_is_allowed_at_assembly_level():
    c = assemble([Ball((5,))])
    assert [e.kind for e in c.edges] == [EdgeKind.VERTICAL]


@settings(max_examples=300)
@given(assemblies())
def test_positive_boundary_char_matches_cell_count(c):
    assert c.plus.euler_char == plus_char_by_cells(c.zero_handles, c.one_handles)


@settings(max_examples=300)
@given(assemblies())
def test_edge_kinds_partition_punctures(c):
    kinds = [e.kind for e in c.edges]
    assert all(k in EdgeKind for k in kinds)
    segments = [s for e in c.edges for s in e.segments]
    assert len(segments) == len(set(segments))
    assert len(c.plus.punctures) == kinds.count(EdgeKind.VERTICAL) + 2 * kinds.count(EdgeKind.BRIDGE)


@settings(max_examples=300)
@given(assemblies())
def test_low_n_on_reduced_structures(c):
    assume(is_reduced(c))
    n = n_value(c)
    if n < 0:
        assert is_trivial(c) is Triviality.TRIVIAL_BALL
    if n == 0 and not c.minus:
        assert classify_exceptional(c) is not Exceptional.NONE
    assert reclassify(c) is classify_exceptional(c)


@settings(max_examples=300)
@given(assemblies())
def test_sphere_boundary_has_acyclic_ghost_graph(c):
    g = ghost_arc_graph(c)
    if c.plus.genus == 0:
        assert g.cycle_rank == 0
    assert not g.violation
