from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbcalc.compressionbody import Ball, OneHandle, Product
from orbcalc.constructions import handlebody, heegaard_splitting, superadd_decomposition
from orbcalc.decomposition import Decomposition, Piece, Role, Surface, fundamental_identity, net_iota, net_x, validate
from orbcalc.errors import (
    IdentityViolated,
    MissingPunctures,
    NotAGhostArc,
    NotAmalgable,
    NotAProduct,
    OrbcalcError,
    ReplayMismatch,
    UnknownSurface,
    WouldIncreaseNetX,
)
from orbcalc.generators import FuzzConfig, candidate_moves, generate_random_decomposition
from orbcalc.moves import (
    NONINCREASING,
    Disc,
    MoveKind,
    MoveRecord,
    ThinningSequence,
    Untelescoping,
    amalgable_conflicts,
    amalgamate,
    apply_move,
    apply_type1,
    apply_type2,
    consolidate,
    create_removable_arc,
    replay,
    run_script,
    untelescope,
)
from orbcalc.orbifold import INF, SurfaceComponent, orb_char, puncture_term, sphere

from test_decomposition import sphere_sum


def pillow_splitting(w):
    zs, os_ = [Ball((w, w)), Ball((w, w))], [OneHandle(0, 1)]
    return Decomposition(
        [Surface("H", Role.THICK, sphere(w, w, w, w), "A", "B")], [Piece("A", zs, os_, "H"), Piece("B", zs, os_, "H")]
    )


def cut_torus(k):
    """Torus [k,k] whose tail side has a nonseparating weight-k handle."""
    a = Piece("A", [Ball((k, k)), Ball((k, k))], [OneHandle(0, 1, k, 0, 0), OneHandle(0, 1)], "H")
    b = Piece("B", [Ball(), Ball((k, k))], [OneHandle(0, 0), OneHandle(0, 1)], "H")
    return Decomposition([Surface("H", Role.THICK, SurfaceComponent(1, (k, k)), "A", "B")], [a, b])


def separable_genus_two():
    """Genus-2 splitting whose tail handlebody has a separating 1-handle."""
    a = Piece("A", [Ball(), Ball()], [OneHandle(0, 0), OneHandle(1, 1), OneHandle(0, 1)], "H")
    b = Piece("B", *handlebody(2), "H")
    return Decomposition([Surface("H", Role.THICK, SurfaceComponent(2), "A", "B")], [a, b])


def parallel(thick, thin, product, outer, far):
    """``outer`` | thick | trivial product | thin | ``far`` piece carrying thick H2 | handlebody."""
    plus2 = far[2]
    return Decomposition(
        [
            Surface("H", Role.THICK, thick, "A", "P"),
            Surface("F", Role.THIN, thin, "P", "B"),
            Surface("H2", Role.THICK, plus2, "B", "C"),
        ],
        [
            Piece("A", *outer, "H"),
            Piece("P", [product], [], "H", ["F"]),
            Piece("B", far[0], far[1], "H2", ["F"]),
            Piece("C", *far[3], "H2"),
        ],
    )


def parallel_tori():
    return parallel(
        SurfaceComponent(1),
        SurfaceComponent(1),
        Product(1),
        handlebody(1),
        ([Product(1)], [OneHandle(0, 0)], SurfaceComponent(2), handlebody(2)),
    )


def parallel_spheres(w):
    far_other = ([Ball(), Ball((w, w))], [OneHandle(0, 0), OneHandle(0, 1)])
    return parallel(
        sphere(w, w),
        sphere(w, w),
        Product(0, (w, w)),
        ([Ball((w, w))], []),
        ([Product(0, (w, w))], [OneHandle(0, 0)], SurfaceComponent(1, (w, w)), far_other),
    )


def test_type1_compression():
    d, rec = apply_type1(heegaard_splitting(2), "H")
    assert d.thick[0].component == SurfaceComponent(1)
    assert (rec.delta_net_x, rec.delta_net_iota) == (-2, 0)


@pytest.mark.parametrize("k", [2, 3, 7, INF])
def test_type1_cut_disc(k):
    d, rec = apply_type1(cut_torus(k), "H", Disc(k))
    assert rec.delta_net_x == -2 * (0 if k is INF else Fraction(1, k))
    assert d.thick[0].component == sphere(k, k, k, k)
    assert rec.delta_net_iota == 2


def test_type1_separating():
    d, rec = apply_type1(separable_genus_two(), "H", Disc(1, True, SurfaceComponent(1)))
    assert rec.delta_net_x == -2
    assert d.thick[0].component == SurfaceComponent(1)
    with pytest.raises(WouldIncreaseNetX):
        apply_type1(separable_genus_two(), "H", Disc(2, True, sphere()))
    with pytest.raises(UnknownSurface):
        apply_type1(separable_genus_two(), "nope")


@pytest.mark.parametrize("w, delta", [(5, Fraction(-8, 5)), (INF, -2), (2, -1)])
def test_type2(w, delta):
    d, rec = apply_type2(pillow_splitting(w), "H", w)
    assert d.thick[0].component == sphere(w, w)
    assert (rec.delta_net_x, rec.delta_net_iota) == (delta, -2)
    assert delta == -2 * puncture_term(w)


def test_type2_missing():
    with pytest.raises(MissingPunctures):
        apply_type2(pillow_splitting(2), "H", 3)


@pytest.mark.parametrize("make", [parallel_tori, lambda: parallel_spheres(3), lambda: parallel_spheres(INF)])
def test_consolidation(make):
    before = make()
    assert validate(before).ok
    d, rec = consolidate(before, "H", "F")
    assert (rec.delta_net_x, rec.delta_net_iota) == (0, 0)
    assert [s.id for s in d.surfaces] == ["H2"]
    assert net_x(d) == net_x(before)


def test_consolidation_refuses_non_products():
    with pytest.raises(NotAProduct):
        consolidate(parallel_tori(), "H2", "F")


def test_untelescope_genus_two():
    data = Untelescoping(1, 1, SurfaceComponent(1), SurfaceComponent(1), sphere())
    d, rec = untelescope(heegaard_splitting(2), "H", data)
    assert rec.delta_net_x == 0
    assert sorted(str(s.component) for s in d.thick) == ["g1[]", "g1[]"]
    assert [s.component for s in d.thin] == [sphere()]
    assert validate(d).ok


@pytest.mark.parametrize("k", [2, 3, 4, 7, INF])
def test_untelescope_identity_is_checked_first(k):
    j, h = sphere(k, k, k, k), sphere(k, k)
    holds = orb_char(j) == orb_char(h) + orb_char(h) - orb_char(h)
    assert not holds
    with pytest.raises(IdentityViolated):
        untelescope(pillow_splitting(k), "H", Untelescoping(k, k, h, h, h))


def test_untelescope_then_consolidate_is_neutral():
    data = Untelescoping(1, 1, SurfaceComponent(2), SurfaceComponent(2), SurfaceComponent(1))
    d, _ = untelescope(heegaard_splitting(3), "H", data)
    d, _ = apply_type1(d, "H.1")
    d, rec = consolidate(d, "H.1", "H.f")
    assert rec.delta_net_x == 0
    assert fundamental_identity(d).holds


@pytest.mark.parametrize("w, delta", [(2, 1), (3, Fraction(4, 3)), (INF, 2)])
def test_create_removable(w, delta):
    before = superadd_decomposition(1, w)
    d, rec = create_removable_arc(before, "B1", 0)
    assert (rec.delta_net_x, rec.delta_net_iota) == (delta, 2)
    assert d.surface("H1").component == SurfaceComponent(2, (w, w))
    with pytest.raises(NotAGhostArc):
        create_removable_arc(before, "A1", 0)


def test_amalgamate_genus_one_pair():
    d, rec = amalgamate(sphere_sum(), "H1", "H2", "S")
    assert rec.delta_net_x == 0
    assert [s.component for s in d.surfaces] == [SurfaceComponent(2)]
    assert orb_char(d.surfaces[0].component) == 0 + 0 - orb_char(sphere())


def test_amalgamate_refuses_two_sided_ghost_arcs():
    d = superadd_decomposition(1, 3)
    assert amalgable_conflicts(d, "H1", "H2", "S")
    with pytest.raises(NotAmalgable, match="#0"):
        amalgamate(d, "H1", "H2", "S")


@pytest.mark.parametrize("t, w", [(1, 2), (1, 3), (2, 2), (2, INF)])
def test_superadd_script(t, w):
    seq = run_script(
        superadd_decomposition(t, w),
        [("create_removable", {"piece": "B1", "ghost_arc": 0}), ("amalgamate", {"thick1": "H1", "thick2": "H2", "thin": "S"})],
    )
    assert replay(seq) == seq.final
    assert len(seq.final.thick) == 1 and not seq.final.thin
    assert orb_char(seq.final.thick[0].component) == 4 * t + 2
    assert sum(r.delta_net_x for r in seq.records) == net_x(seq.final) - net_x(seq.initial)


def test_replay_empty_and_tampered():
    d = heegaard_splitting(2)
    assert replay(ThinningSequence(d, (), d)) == d
    seq = run_script(d, [("typeI_nonsep", {"thick": "H"})])
    forged = MoveRecord(MoveKind.TYPE1_NONSEP, seq.records[0].params, Fraction(-1), 0)
    with pytest.raises(ReplayMismatch):
        replay(ThinningSequence(d, (forged,), seq.final))
    with pytest.raises(ReplayMismatch):
        replay(ThinningSequence(d, seq.records, d))


def _expected_delta_ok(rec):
    if rec.kind is MoveKind.CREATE_REMOVABLE:
        return rec.delta_net_x == 2 * puncture_term(rec.params["weight"]) and rec.delta_net_iota == 2
    if rec.kind in (MoveKind.CONSOLIDATION, MoveKind.UNTELESCOPE, MoveKind.AMALGAMATE):
        return rec.delta_net_x == 0
    if rec.kind is MoveKind.TYPE2:
        return rec.delta_net_x == -2 * puncture_term(rec.params["weight"]) and rec.delta_net_iota == -2
    if rec.kind is MoveKind.TYPE1_NONSEP and rec.params["weight"] == 1:
        return rec.delta_net_x == -2 and rec.delta_net_iota == 0
    return rec.delta_net_x <= 0


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 2**63 - 1), st.integers(0, 100), st.data())
def test_random_moves_keep_validity_and_monotonicity(seed, index, data):
    d = generate_random_decomposition(FuzzConfig(seed=seed), index)
    steps = []
    for _ in range(3):
        options = candidate_moves(d)
        if not options:
            break
        kind, params = data.draw(st.sampled_from(options))
        try:
            after, rec = apply_move(d, kind, params)
        except OrbcalcError:
            # candidates are only plausible; a refused move must leave nothing behind
            continue
        assert validate(after).ok
        assert _expected_delta_ok(rec), rec
        if rec.kind in NONINCREASING:
            assert rec.delta_net_x <= 0
        assert net_x(after) - net_x(d) == rec.delta_net_x
        assert net_iota(after) - net_iota(d) == rec.delta_net_iota
        steps.append((rec.kind, rec.params))
        d = after
    if steps:
        seq = run_script(generate_random_decomposition(FuzzConfig(seed=seed), index), steps)
        assert replay(seq) == seq.final == d
