"""Hand-built decompositions used as worked examples and fixtures."""
from __future__ import annotations

from .compressionbody import Ball, OneHandle, Product
from .decomposition import Decomposition, Piece, Role, Surface
from .orbifold import INF, SurfaceComponent, check_weight


def handlebody(genus: int):
    """``(zero_handles, one_handles)`` of a genus-``genus`` handlebody with empty graph."""
    return [Ball(())], [OneHandle(0, 0) for _ in range(genus)]


def heegaard_splitting(genus: int) -> Decomposition:
    """Two handlebodies glued along one unpunctured thick surface."""
    zs, os_ = handlebody(genus)
    h = Surface("H", Role.THICK, SurfaceComponent(genus), tail="A", head="B")
    return Decomposition([h], [Piece("A", zs, os_, "H"), Piece("B", zs, os_, "H")])


def one_one_bridge(weight=2) -> Decomposition:
    """A torus meeting a knot in two points, with one bridge arc on each side."""
    zs = [Ball(()), Ball((weight, weight))]
    os_ = [OneHandle(0, 0), OneHandle(0, 1)]
    h = Surface("H", Role.THICK, SurfaceComponent(1, (weight, weight)), tail="A", head="B")
    return Decomposition([h], [Piece("A", zs, os_, "H"), Piece("B", zs, os_, "H")])


def superadd_decomposition(t: int, w) -> Decomposition:
    """Two thick genus ``t+1`` surfaces around a twice-punctured summing sphere.

    Outer pieces are genus ``t+1`` handlebodies missing the knot.  Each inner
    piece is a product on the summing sphere whose two vertical arcs are joined
    by a weight-``w`` 1-handle into a ghost arc, plus ``t`` tubes.
    """
    check_weight(w)
    if t < 1:
        raise ValueError("t must be at least 1")
    outer_z, outer_o = handlebody(t + 1)
    inner_z = [Product(0, (w, w))]
    inner_o = [OneHandle(0, 0, w, 0, 1)] + [OneHandle(0, 0) for _ in range(t)]
    surfaces = [
        Surface("H1", Role.THICK, SurfaceComponent(t + 1), tail="A1", head="B1"),
        Surface("S", Role.THIN, SurfaceComponent(0, (w, w)), tail="B1", head="B2"),
        Surface("H2", Role.THICK, SurfaceComponent(t + 1), tail="B2", head="A2"),
    ]
    pieces = [
        Piece("A1", outer_z, outer_o, "H1"),
        Piece("B1", inner_z, inner_o, "H1", ["S"]),
        Piece("B2", inner_z, inner_o, "H2", ["S"]),
        Piece("A2", outer_z, outer_o, "H2"),
    ]
    return Decomposition(surfaces, pieces)


def sixth_sharp_decomposition(a) -> Decomposition:
    """Two thick spheres ``[2,2,2,3]`` around a thin turnover ``(2,3,a)``.

    Outer pieces join vertex balls ``(2,3,4)`` and ``(2,2,4)`` by a weight-4
    handle.  Inner pieces are products on the turnover whose weight-``a`` arc is
    capped off by a weighted handle into a ``(2,2,a)`` vertex ball.  For
    ``a = INF`` that vertex is not allowed, so it is drilled out and becomes a
    boundary turnover ``(2,2,INF)`` of characteristic zero on each side.
    """
    check_weight(a)
    outer_z = [Ball((2, 3, 4)), Ball((2, 2, 4))]
    outer_o = [OneHandle(0, 1, 4, 2, 2)]
    turnover = (2, 3, a)
    inner_z = [Product(0, turnover)]
    # slot 2 of the turnover product is the weight-a arc
    if a is INF:
        inner_z.append(Product(0, (2, 2, INF)))
        inner_o = [OneHandle(0, 1, INF, 2, 2)]
    else:
        inner_z.append(Ball((2, 2, a)))
        cap = Ball((2, 2, a)).cone.index(a)
        inner_o = [OneHandle(0, 1, a, Product(0, turnover).arcs.index(a), cap)]
    thick = SurfaceComponent(0, (2, 2, 2, 3))
    surfaces = [
        Surface("H1", Role.THICK, thick, tail="A1", head="B1"),
        Surface("S", Role.THIN, SurfaceComponent(0, turnover), tail="B1", head="B2"),
        Surface("H2", Role.THICK, thick, tail="B2", head="A2"),
    ]
    minus1, minus2 = ["S"], ["S"]
    if a is INF:
        surfaces.append(Surface("V1", Role.BOUNDARY, SurfaceComponent(0, (2, 2, INF))))
        surfaces.append(Surface("V2", Role.BOUNDARY, SurfaceComponent(0, (2, 2, INF))))
        minus1.append("V1")
        minus2.append("V2")
    pieces = [
        Piece("A1", outer_z, outer_o, "H1"),
        Piece("B1", inner_z, inner_o, "H1", minus1),
        Piece("B2", inner_z, inner_o, "H2", minus2),
        Piece("A2", outer_z, outer_o, "H2"),
    ]
    return Decomposition(surfaces, pieces)


def disjoint_union(parts, prefix="c") -> Decomposition:
    """Rename identifiers apart and combine several decompositions."""
    surfaces, pieces, assertions = [], [], []
    for k, d in enumerate(parts):
        tag = f"{prefix}{k}."
        for s in d.surfaces:
            surfaces.append(
                Surface(
                    tag + s.id,
                    s.role,
                    s.component,
                    None if s.tail is None else tag + s.tail,
                    None if s.head is None else tag + s.head,
                )
            )
        for p in d.pieces:
            pieces.append(Piece(tag + p.id, p.zero_handles, p.one_handles, tag + p.plus, [tag + m for m in p.minus]))
        assertions.extend(a for a in d.assertions if a not in assertions)
    return Decomposition(surfaces, pieces, assertions)
