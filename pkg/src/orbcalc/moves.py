"""Thinning, unthinning and amalgamation as validated rewrites of decompositions.

Every move takes the decomposition plus a declared witness (disc weight,
discarded component, descriptors of the new surfaces) and optional selectors
naming the handles that realise it.  The engine checks the arithmetic and
rewrites the handle structures so that the result validates; it never claims
the witness exists topologically.  Each application returns the new
decomposition and a :class:`MoveRecord` holding everything needed to replay it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .compressionbody import (
    Ball,
    EdgeKind,
    OneHandle,
    Product,
    _UnionFind,
    drop_handles,
    nonseparating_handles,
    synthesize,
)
from .decomposition import (
    Decomposition,
    Piece,
    Role,
    Surface,
    _require_valid,
    raw_net_x,
)
from .errors import (
    AcyclicityBroken,
    BoundaryMismatch,
    IdentityViolated,
    InvalidDecomposition,
    MissingPunctures,
    NoWitness,
    NotAdjacent,
    NotAGhostArc,
    NotAmalgable,
    NotAProduct,
    OrbcalcError,
    ReplayMismatch,
    UnknownSurface,
    WouldIncreaseNetX,
)
from .orbifold import SurfaceComponent, check_weight, orb_char, puncture_term, weight_reciprocal


class MoveKind(str, enum.Enum):
    TYPE1_NONSEP = "typeI_nonsep"
    TYPE1_SEP = "typeI_sep"
    TYPE2 = "typeII"
    CONSOLIDATION = "consolidation"
    UNTELESCOPE = "untelescope"
    CREATE_REMOVABLE = "create_removable"
    AMALGAMATE = "amalgamate"


NONINCREASING = {
    MoveKind.TYPE1_NONSEP,
    MoveKind.TYPE1_SEP,
    MoveKind.TYPE2,
    MoveKind.CONSOLIDATION,
    MoveKind.UNTELESCOPE,
}


@dataclass(frozen=True)
class MoveRecord:
    kind: MoveKind
    params: dict = field(hash=False)
    delta_net_x: Fraction
    delta_net_iota: int


@dataclass(frozen=True)
class Disc:
    """A compressing (``weight == 1``) or cut disc for a thick surface."""

    weight: object = 1
    separating: bool = False
    discarded: Optional[SurfaceComponent] = None


def _recip(w) -> Fraction:
    return Fraction(1) if w == 1 else weight_reciprocal(w)


def _thick(d: Decomposition, sid: str) -> Surface:
    s = d.surface(sid)
    if s.role is not Role.THICK:
        raise UnknownSurface(f"{sid} is not a thick surface")
    return s


def _sides(d: Decomposition, sid: str):
    """``(tail piece, head piece)`` of a thick surface."""
    s = _thick(d, sid)
    return d.piece(s.tail), d.piece(s.head)


def _iota(d: Decomposition) -> int:
    return sum(len(s.component.punctures) for s in d.thick) - sum(len(s.component.punctures) for s in d.thin)


def _with_piece(p: Piece, zs, os_, plus=None, minus=None, pid=None) -> Piece:
    return Piece(pid or p.id, zs, os_, plus or p.plus, p.minus if minus is None else minus)


def _rebuild(d: Decomposition, surfaces: Sequence[Surface], pieces: Sequence[Piece]) -> Decomposition:
    return Decomposition(surfaces, pieces, d.assertions)


def _swap(d: Decomposition, new_pieces: dict, surface_changes: dict = None, drop=(), add=()) -> Decomposition:
    surface_changes = surface_changes or {}
    surfaces = []
    for s in d.surfaces:
        if s.id in drop:
            continue
        surfaces.append(surface_changes.get(s.id, s))
    surfaces.extend(add)
    pieces = [new_pieces.get(p.id, p) for p in d.pieces]
    return _rebuild(d, surfaces, pieces)


def _finish(before: Decomposition, after: Decomposition, kind: MoveKind, params: dict):
    report = after.report
    if not report.ok:
        if any("directed cycle" in v for v in report.violations):
            raise AcyclicityBroken("; ".join(report.violations))
        raise InvalidDecomposition("move produced an invalid decomposition: " + "; ".join(report.violations))
    dx = raw_net_x(after) - raw_net_x(before)
    di = _iota(after) - _iota(before)
    rec = MoveRecord(kind, params, dx, di)
    _check_record(rec)
    return after, rec


def _check_record(rec: MoveRecord):
    """Postconditions every accepted move satisfies."""
    k = rec.kind
    if k in NONINCREASING and rec.delta_net_x > 0:
        raise AssertionError(f"{k.value} increased netX by {rec.delta_net_x}")
    if k in (MoveKind.CONSOLIDATION, MoveKind.UNTELESCOPE, MoveKind.AMALGAMATE) and rec.delta_net_x != 0:
        raise AssertionError(f"{k.value} changed netX by {rec.delta_net_x}")
    if k is MoveKind.TYPE2 and rec.delta_net_iota != -2:
        raise AssertionError(f"typeII changed netiota by {rec.delta_net_iota}")
    if k is MoveKind.CREATE_REMOVABLE:
        w = rec.params["weight"]
        if rec.delta_net_x != 2 * puncture_term(w) or rec.delta_net_iota != 2:
            raise AssertionError("create_removable deltas do not match the removed arc weight")


# ---------------------------------------------------------------- type I


def apply_type1(d: Decomposition, thick: str, disc: Disc = Disc(), piece: Optional[str] = None, handles=None):
    """Compress a thick surface along a disc of weight ``disc.weight``.

    Nonseparating: the surface loses a handle, so ``x`` drops by ``2/weight``;
    a cut disc also leaves two scar punctures.  Separating: the surface splits
    and the declared ``discarded`` part is thrown away, so ``x`` becomes
    ``x - 2/weight - x(discarded)``; a positive change is refused.
    """
    _require_valid(d)
    s = _thick(d, thick)
    w = disc.weight if disc.weight == 1 else check_weight(disc.weight)
    if disc.separating:
        return _type1_sep(d, s, w, disc.discarded, piece, handles)
    return _type1_nonsep(d, s, w, piece, handles)


def _type1_nonsep(d, s, w, piece, handles):
    tail, head = d.piece(s.tail), d.piece(s.head)
    if w == 1:
        if handles is None:
            ja = nonseparating_handles(tail.body, None)
            jb = nonseparating_handles(head.body, None)
            if not ja or not jb:
                raise NoWitness(f"{s.id}: both sides need a nonseparating unweighted 1-handle")
            handles = [ja[0], jb[0]]
        ja, jb = handles
        new = {}
        for p, j in ((tail, ja), (head, jb)):
            _expect_handle(p, j, None, nonsep=True)
            zs, os_ = drop_handles(p.zero_handles, p.one_handles, drop_one=[j])
            new[p.id] = _with_piece(p, zs, os_)
        comp = SurfaceComponent(s.component.genus - 1, s.component.punctures)
        params = {"thick": s.id, "weight": 1, "separating": False, "discarded": None, "piece": None, "handles": [ja, jb]}
    else:
        if piece is None or handles is None:
            found = None
            for p, q in ((tail, head), (head, tail)):
                jw = nonseparating_handles(p.body, w)
                ju = nonseparating_handles(q.body, None)
                if jw and ju:
                    found = (p, q, jw[0], ju[0])
                    break
            if found is None:
                raise NoWitness(f"{s.id}: no side has a nonseparating weight-{w} 1-handle facing an unweighted one")
            p, q, jw, ju = found
        else:
            p = d.piece(piece)
            if p.id not in (tail.id, head.id):
                raise NotAdjacent(f"piece {piece} is not adjacent to {s.id}")
            q = head if p.id == tail.id else tail
            jw, ju = handles
        _expect_handle(p, jw, w, nonsep=True)
        _expect_handle(q, ju, None, nonsep=True)
        zs, os_ = drop_handles(p.zero_handles, p.one_handles, drop_one=[jw])
        new = {p.id: _with_piece(p, zs, os_)}
        zs, os_ = drop_handles(q.zero_handles, q.one_handles, drop_one=[ju])
        zs.append(Ball((w, w)))
        os_.append(OneHandle(len(zs) - 1, 0))
        new[q.id] = _with_piece(q, zs, os_)
        comp = SurfaceComponent(s.component.genus - 1, s.component.punctures + (w, w))
        params = {"thick": s.id, "weight": w, "separating": False, "discarded": None, "piece": p.id, "handles": [jw, ju]}
    after = _swap(d, new, {s.id: Surface(s.id, s.role, comp, s.tail, s.head)})
    return _finish(d, after, MoveKind.TYPE1_NONSEP, params)


def _expect_handle(p: Piece, j: int, weight, nonsep: bool):
    if not (isinstance(j, int) and 0 <= j < len(p.one_handles)):
        raise NoWitness(f"piece {p.id} has no 1-handle {j!r}")
    e = p.one_handles[j]
    if e.weight != weight:
        raise NoWitness(f"piece {p.id}: 1-handle {j} has weight {e.weight}, expected {weight}")
    if nonsep and p.body.is_bridge_handle(j):
        raise NoWitness(f"piece {p.id}: 1-handle {j} separates the handle structure")


def _split_sides(p: Piece, j: int):
    """0-handle index sets on the two sides of separating 1-handle ``j``."""
    uf = _UnionFind(range(len(p.zero_handles)))
    for k, e in enumerate(p.one_handles):
        if k != j:
            uf.union(e.a, e.b)
    e = p.one_handles[j]
    ra = uf.find(e.a)
    side_a = {h for h in range(len(p.zero_handles)) if uf.find(h) == ra}
    side_b = set(range(len(p.zero_handles))) - side_a
    return side_a, side_b


def _side_surface(p: Piece, side: set, j: int) -> SurfaceComponent:
    """Positive-boundary part of one side of a separating handle, with the scar puncture restored."""
    zs = p.zero_handles
    inner = [e for k, e in enumerate(p.one_handles) if k != j and e.a in side]
    chi = sum(zs[h].euler_char for h in side) - 2 * len(inner)
    used = set()
    for e in inner:
        if e.weighted:
            used.update({(e.a, e.a_slot), (e.b, e.b_slot)})
    punct = [zs[h].punctures[i] for h in sorted(side) for i in range(len(zs[h].punctures)) if (h, i) not in used]
    # the slot consumed by handle j is not in ``used``, so its scar puncture is already counted
    return SurfaceComponent((2 - chi) // 2, punct)


def _type1_sep(d, s, w, discarded, piece, handles):
    if discarded is None:
        raise NoWitness("a separating disc needs a declared discarded component")
    delta = -2 * _recip(w) - orb_char(discarded)
    if delta > 0:
        raise WouldIncreaseNetX(
            f"discarding {discarded} (x = {orb_char(discarded)}) after a weight-{w} separating compression "
            f"would change x by {delta} > 0"
        )
    candidates = []
    for p in (d.piece(s.tail), d.piece(s.head)):
        if piece is not None and p.id != piece:
            continue
        for j, e in enumerate(p.one_handles):
            if e.scar_weight != w or not p.body.is_bridge_handle(j):
                continue
            if handles is not None and handles != [j]:
                continue
            side_a, side_b = _split_sides(p, j)
            for drop, keep in ((side_a, side_b), (side_b, side_a)):
                if _side_surface(p, drop, j) == discarded:
                    candidates.append((p, j, drop, keep))
    for p, j, drop, keep in candidates:
        drop_minus = [sid for h, sid in p.minus_slots() if h in drop]
        if any(d.surface(sid).role is not Role.BOUNDARY for sid in drop_minus):
            continue
        other = d.piece(s.head if p.id == s.tail else s.tail)
        new_comp = _side_surface(p, keep, j)
        zs, os_ = drop_handles(p.zero_handles, p.one_handles, drop_zero=drop, drop_one=[j] + [
            k for k, e in enumerate(p.one_handles) if k != j and e.a in drop
        ])
        keep_minus = [sid for h, sid in p.minus_slots() if h in keep]
        new_p = Piece(p.id, zs, os_, p.plus, keep_minus)
        other_minus = list(other.minus) + drop_minus
        try:
            ozs, oos = synthesize(new_comp, [d.surface(m).component for m in other_minus])
        except NoWitness:
            continue
        new_o = Piece(other.id, ozs, oos, other.plus, other_minus)
        assert orb_char(new_comp) == orb_char(s.component) + delta
        after = _swap(d, {p.id: new_p, other.id: new_o}, {s.id: Surface(s.id, s.role, new_comp, s.tail, s.head)})
        params = {"thick": s.id, "weight": w, "separating": True, "discarded": discarded, "piece": p.id, "handles": [j]}
        return _finish(d, after, MoveKind.TYPE1_SEP, params)
    raise NoWitness(f"{s.id}: no separating weight-{w} 1-handle cuts off {discarded}")


# ---------------------------------------------------------------- type II


def _leaf_arc_balls(p: Piece, w) -> list:
    """0-handles that are arc balls of weight ``w`` removable with their single unweighted handle."""
    out = []
    zs, os_ = p.zero_handles, p.one_handles
    for h, z in enumerate(zs):
        if not (isinstance(z, Ball) and z.cone == (w, w)):
            continue
        ends = [j for j, e in enumerate(os_) if h in (e.a, e.b)]
        if not ends and len(zs) == 1:
            out.append((h, None))
        elif len(ends) == 1 and not os_[ends[0]].weighted and os_[ends[0]].a != os_[ends[0]].b:
            out.append((h, ends[0]))
    return out


def _remove_arc_ball(p: Piece, h: int, j: Optional[int]):
    if j is None:
        return [Ball(())], []
    return drop_handles(p.zero_handles, p.one_handles, drop_zero=[h], drop_one=[j])


def apply_type2(d: Decomposition, thick: str, weight, piece: Optional[str] = None, handles=None):
    """Remove two punctures of the given weight from a thick surface.

    Realised either by a cancelling pair of bridge arcs (a removable arc ball on
    each side) or by a removable arc ball on one side whose partner side turns
    an unweighted tube into a weighted one joining two free punctures.
    """
    _require_valid(d)
    s = _thick(d, thick)
    w = check_weight(weight)
    if list(s.component.punctures).count(w) < 2:
        raise MissingPunctures(f"{thick} has fewer than two punctures of weight {w}")
    tail, head = d.piece(s.tail), d.piece(s.head)
    plans = []
    for p, q in ((tail, head), (head, tail)):
        if piece is not None and p.id != piece:
            continue
        for h, j in _leaf_arc_balls(p, w):
            for hq, jq in _leaf_arc_balls(q, w):
                plans.append(("pair", p, q, [h, j, hq, jq]))
            for ju in nonseparating_handles(q.body, None):
                plans.append(("tube", p, q, [h, j, ju]))
    if handles is not None:
        plans = [pl for pl in plans if pl[3] == list(handles)]
    if not plans:
        raise NoWitness(f"{thick}: no removable arc of weight {w}")
    mode, p, q, sel = plans[0]
    zs, os_ = _remove_arc_ball(p, sel[0], sel[1])
    new = {p.id: _with_piece(p, zs, os_)}
    if mode == "pair":
        zs, os_ = _remove_arc_ball(q, sel[2], sel[3])
    else:
        free = sorted((h, i) for h, i in q.body.free_slots if q.zero_handles[h].punctures[i] == w)
        (ha, sa), (hb, sb) = free[0], free[1]
        zs, os_ = drop_handles(q.zero_handles, q.one_handles, drop_one=[sel[2]])
        os_.append(OneHandle(ha, hb, w, sa, sb))
    new[q.id] = _with_piece(q, zs, os_)
    punct = list(s.component.punctures)
    punct.remove(w)
    punct.remove(w)
    comp = SurfaceComponent(s.component.genus, punct)
    after = _swap(d, new, {s.id: Surface(s.id, s.role, comp, s.tail, s.head)})
    params = {"thick": s.id, "weight": w, "piece": p.id, "handles": sel}
    return _finish(d, after, MoveKind.TYPE2, params)


# ---------------------------------------------------------------- consolidation


def _redirect(zs_host_count: int, host_free: list, handles, dropped: int, offset_map: dict, what: str):
    """Reattach handles that ended on a removed product 0-handle onto a host structure.

    ``host_free`` lists ``(h, slot, weight)`` free punctures of the host, consumed
    in order.  ``offset_map`` renumbers the surviving 0-handles of the donor.
    """
    out = []
    pool = list(host_free)

    def take(w):
        for k, (h, i, ww) in enumerate(pool):
            if ww == w:
                del pool[k]
                return h, i
        raise NotAmalgable(f"no free puncture of weight {w} on {what} to carry a reattached handle")

    for e in handles:
        ends = []
        for end, slot in ((e.a, e.a_slot), (e.b, e.b_slot)):
            if end == dropped:
                if e.weighted:
                    ends.append(take(e.weight))
                else:
                    ends.append((0, None))
            else:
                ends.append((offset_map[end], slot))
        out.append(OneHandle(ends[0][0], ends[1][0], e.weight, ends[0][1], ends[1][1]))
    return out


def _free_list(p: Piece) -> list:
    return [(h, i, p.zero_handles[h].punctures[i]) for h, i in sorted(p.body.free_slots)]


def consolidate(d: Decomposition, thick: str, thin: str):
    """Remove a thick and a thin surface cobounding a trivial product piece; its neighbours merge."""
    _require_valid(d)
    _thick(d, thick)
    f = d.surface(thin)
    if f.role is not Role.THIN:
        raise UnknownSurface(f"{thin} is not a thin surface")
    between = [p for p in d.plus_pieces(thick) if thin in p.minus]
    if not between:
        raise BoundaryMismatch(f"no piece has positive boundary {thick} and {thin} in its negative boundary")
    x = between[0]
    if list(x.minus) != [thin]:
        raise BoundaryMismatch(f"piece {x.id} has negative boundary {list(x.minus)}, not just {thin}")
    if not (len(x.zero_handles) == 1 and not x.one_handles and isinstance(x.zero_handles[0], Product)):
        raise NotAProduct(f"piece {x.id} is not a trivial product")
    y = next(p for p in d.plus_pieces(thick) if p.id != x.id)
    z = next((p for p in d.minus_pieces(thin) if p.id != x.id), None)
    if z is None or z.id == y.id:
        raise BoundaryMismatch(f"{thick} and {thin} do not lead to two distinct neighbouring pieces")

    pr = next(h for h, sid in z.minus_slots() if sid == thin)
    kept = [h for h in range(len(z.zero_handles)) if h != pr]
    offset = {h: len(y.zero_handles) + k for k, h in enumerate(kept)}
    zs = list(y.zero_handles) + [z.zero_handles[h] for h in kept]
    os_ = list(y.one_handles) + _redirect(len(y.zero_handles), _free_list(y), z.one_handles, pr, offset, y.id)
    minus = list(y.minus) + [sid for h, sid in z.minus_slots() if h != pr]
    merged = Piece(z.id, zs, os_, z.plus, minus)

    surfaces = []
    for t in d.surfaces:
        if t.id in (thick, thin):
            continue
        if y.id in (t.tail, t.head):
            t = Surface(t.id, t.role, t.component, z.id if t.tail == y.id else t.tail, z.id if t.head == y.id else t.head)
        surfaces.append(t)
    pieces = [merged if p.id == z.id else p for p in d.pieces if p.id not in (x.id, y.id)]
    after = _rebuild(d, surfaces, pieces)
    return _finish(d, after, MoveKind.CONSOLIDATION, {"thick": thick, "thin": thin})


# ---------------------------------------------------------------- untelescoping


@dataclass(frozen=True)
class Untelescoping:
    """Declared result of a weak reduction: disc weights and the new surfaces."""

    w1: object
    w2: object
    h1: SurfaceComponent
    h2: SurfaceComponent
    f: SurfaceComponent


def untelescope(d: Decomposition, thick: str, data: Untelescoping, handles=None, names=None):
    """Replace a thick surface by two thick surfaces and a thin one between them.

    ``w1`` is the weight of the disc on the tail side, ``w2`` on the head side
    (1 for compressing discs).  The declared descriptors must satisfy
    ``x(J) = x(H1) + x(H2) - x(F)`` and agree with the handle structures.
    """
    _require_valid(d)
    s = _thick(d, thick)
    lhs = orb_char(s.component)
    rhs = orb_char(data.h1) + orb_char(data.h2) - orb_char(data.f)
    if lhs != rhs:
        raise IdentityViolated(f"x({thick}) = {lhs} but x(H1) + x(H2) - x(F) = {rhs}")
    w1 = data.w1 if data.w1 == 1 else check_weight(data.w1)
    w2 = data.w2 if data.w2 == 1 else check_weight(data.w2)
    a, b = d.piece(s.tail), d.piece(s.head)
    if handles is None:
        j1 = nonseparating_handles(a.body, None if w1 == 1 else w1)
        j2 = nonseparating_handles(b.body, None if w2 == 1 else w2)
        if not j1 or not j2:
            raise NoWitness(f"{thick}: need a nonseparating weight-{w1} handle on {a.id} and weight-{w2} on {b.id}")
        handles = [j1[0], j2[0]]
    j1, j2 = handles
    _expect_handle(a, j1, None if w1 == 1 else w1, nonsep=True)
    _expect_handle(b, j2, None if w2 == 1 else w2, nonsep=True)

    def scars(w):
        return () if w == 1 else (w, w)

    g = s.component.genus
    if g < 2:
        raise NoWitness(f"{thick} has genus {g}; two disjoint nonseparating compressions need genus at least 2")
    h1 = SurfaceComponent(g - 1, s.component.punctures + scars(w1))
    h2 = SurfaceComponent(g - 1, s.component.punctures + scars(w2))
    fc = SurfaceComponent(g - 2, s.component.punctures + scars(w1) + scars(w2))
    if (h1, h2, fc) != (data.h1, data.h2, data.f):
        raise IdentityViolated(
            f"declared surfaces {data.h1}, {data.h2}, {data.f} differ from the compressions {h1}, {h2}, {fc}"
        )
    n1, n2, nf = names or (f"{thick}.1", f"{thick}.2", f"{thick}.f")
    x1, x2 = f"{thick}.x1", f"{thick}.x2"
    taken = {t.id for t in d.surfaces} | {p.id for p in d.pieces}
    clash = {n1, n2, nf, x1, x2} & (taken - {thick})
    if clash:
        raise BoundaryMismatch(f"names already in use: {sorted(clash)}")

    zs, os_ = drop_handles(a.zero_handles, a.one_handles, drop_one=[j1])
    new_a = Piece(a.id, zs, os_, n1, a.minus)
    zs, os_ = drop_handles(b.zero_handles, b.one_handles, drop_one=[j2])
    new_b = Piece(b.id, zs, os_, n2, b.minus)

    def over_f(w):
        pr = Product(fc.genus, fc.punctures)
        if w == 1:
            return Piece("", [pr], [OneHandle(0, 0)], "", [nf])
        i = pr.arcs.index(w)
        return Piece("", [pr], [OneHandle(0, 0, w, i, i + 1)], "", [nf])

    px1 = over_f(w2)
    px2 = over_f(w1)
    px1 = Piece(x1, px1.zero_handles, px1.one_handles, n1, [nf])
    px2 = Piece(x2, px2.zero_handles, px2.one_handles, n2, [nf])
    add = [
        Surface(n1, Role.THICK, h1, a.id, x1),
        Surface(nf, Role.THIN, fc, x1, x2),
        Surface(n2, Role.THICK, h2, x2, b.id),
    ]
    surfaces = [t for t in d.surfaces if t.id != thick] + add
    pieces = []
    for p in d.pieces:
        if p.id == a.id:
            pieces.extend([new_a, px1])
        elif p.id == b.id:
            pieces.extend([px2, new_b])
        else:
            pieces.append(p)
    after = _rebuild(d, surfaces, pieces)
    params = {
        "thick": thick,
        "w1": w1,
        "w2": w2,
        "h1": data.h1,
        "h2": data.h2,
        "f": data.f,
        "handles": [j1, j2],
        "names": [n1, n2, nf],
    }
    return _finish(d, after, MoveKind.UNTELESCOPE, params)


# ---------------------------------------------------------------- removable arcs


def create_removable_arc(d: Decomposition, piece: str, ghost_arc: int):
    """Push a ghost arc across the positive boundary of its piece.

    The first weighted 1-handle along the arc becomes an unweighted tube, so the
    arc splits into two arcs reaching the thick surface; the piece on the other
    side gains a bridge arc.  The thick surface gains two punctures.
    """
    _require_valid(d)
    p = d.piece(piece)
    ghosts = p.body.ghost_arcs
    if not (isinstance(ghost_arc, int) and 0 <= ghost_arc < len(ghosts)):
        raise NotAGhostArc(f"piece {piece} has {len(ghosts)} ghost arcs; no index {ghost_arc!r}")
    edge = ghosts[ghost_arc]
    j = next(lab[1] for lab in edge.segments if lab[0] == "o")
    e = p.one_handles[j]
    w = e.weight
    os_ = list(p.one_handles)
    os_[j] = OneHandle(e.a, e.b)
    new_p = _with_piece(p, p.zero_handles, os_)
    s = d.surface(p.plus)
    q = d.piece(s.head if s.tail == p.id else s.tail)
    qz = list(q.zero_handles) + [Ball((w, w))]
    qo = list(q.one_handles) + [OneHandle(len(qz) - 1, 0)]
    new_q = _with_piece(q, qz, qo)
    comp = SurfaceComponent(s.component.genus, s.component.punctures + (w, w))
    after = _swap(d, {p.id: new_p, q.id: new_q}, {s.id: Surface(s.id, s.role, comp, s.tail, s.head)})
    return _finish(d, after, MoveKind.CREATE_REMOVABLE, {"piece": piece, "ghost_arc": ghost_arc, "weight": w})


# ---------------------------------------------------------------- amalgamation


def _edge_kind_of_segment(p: Piece) -> dict:
    out = {}
    for e in p.body.edges:
        for lab in e.segments:
            out[lab] = e.kind
    return out


def amalgable_conflicts(d: Decomposition, thick1: str, thick2: str, thin: str) -> list:
    """Punctures of the thin surface with ghost arcs on both sides (matched in canonical order)."""
    b1, b2 = _amalg_sides(d, thick1, thick2, thin)
    h1 = next(h for h, sid in b1.minus_slots() if sid == thin)
    h2 = next(h for h, sid in b2.minus_slots() if sid == thin)
    k1, k2 = _edge_kind_of_segment(b1), _edge_kind_of_segment(b2)
    out = []
    for i, w in enumerate(b1.zero_handles[h1].arcs):
        if k1[("z", h1, i)] is EdgeKind.GHOST and k2[("z", h2, i)] is EdgeKind.GHOST:
            out.append((i, w))
    return out


def _amalg_sides(d, thick1, thick2, thin):
    for t in (thick1, thick2):
        _thick(d, t)
    if thick1 == thick2:
        raise NotAdjacent("amalgamation needs two distinct thick surfaces")
    f = d.surface(thin)
    if f.role is not Role.THIN:
        raise UnknownSurface(f"{thin} is not a thin surface")
    b1 = next((p for p in d.plus_pieces(thick1) if thin in p.minus), None)
    b2 = next((p for p in d.plus_pieces(thick2) if thin in p.minus), None)
    if b1 is None or b2 is None or b1.id == b2.id:
        raise NotAdjacent(f"{thin} does not separate pieces bounded by {thick1} and {thick2}")
    return b1, b2


def _absorb(host: Piece, donor: Piece, thin: str, pid: str, plus: str, what: str) -> tuple:
    """Host 0-/1-handles plus the donor's, minus the donor's product on ``thin``.

    Returns the piece and a provenance map from new handle labels to old ones.
    """
    pr = next(h for h, sid in donor.minus_slots() if sid == thin)
    kept = [h for h in range(len(donor.zero_handles)) if h != pr]
    nz = len(host.zero_handles)
    offset = {h: nz + k for k, h in enumerate(kept)}
    zs = list(host.zero_handles) + [donor.zero_handles[h] for h in kept]
    os_ = list(host.one_handles) + _redirect(nz, _free_list(host), donor.one_handles, pr, offset, what)
    minus = list(host.minus) + [sid for h, sid in donor.minus_slots() if h != pr]
    prov = {}
    for h in range(nz):
        prov[("z", h)] = (host.id, ("z", h))
    for h in kept:
        prov[("z", offset[h])] = (donor.id, ("z", h))
    for j in range(len(host.one_handles)):
        prov[("o", j)] = (host.id, ("o", j))
    for j in range(len(donor.one_handles)):
        prov[("o", len(host.one_handles) + j)] = (donor.id, ("o", j))
    return Piece(pid, zs, os_, plus, minus), prov


def _ghost_provenance_ok(new: Piece, prov: dict, old: dict) -> bool:
    kinds = {pid: _edge_kind_of_segment(p) for pid, p in old.items()}
    for e in new.body.ghost_arcs:
        hit = False
        for lab in e.segments:
            key = ("z", lab[1]) if lab[0] == "z" else ("o", lab[1])
            pid, okey = prov[key]
            olab = ("z", okey[1], lab[2]) if lab[0] == "z" else ("o", okey[1])
            if kinds[pid].get(olab) is EdgeKind.GHOST:
                hit = True
                break
        if not hit:
            return False
    return True


def amalgamate(d: Decomposition, thick1: str, thick2: str, thin: str, name: Optional[str] = None):
    """Merge two thick surfaces across a thin one into a single thick surface.

    ``x(H) = x(H1) + x(H2) - x(F)``.  Refused when some puncture of ``F`` has
    ghost arcs on both sides.  The handles of each inner piece are carried
    across to the outer piece on the opposite side.
    """
    _require_valid(d)
    b1, b2 = _amalg_sides(d, thick1, thick2, thin)
    conflicts = amalgable_conflicts(d, thick1, thick2, thin)
    if conflicts:
        listed = ", ".join(f"#{i} (weight {w})" for i, w in conflicts)
        raise NotAmalgable(f"punctures {listed} of {thin} have ghost arcs on both sides")
    a1 = next(p for p in d.plus_pieces(thick1) if p.id != b1.id)
    a2 = next(p for p in d.plus_pieces(thick2) if p.id != b2.id)
    new_id = name or f"{thick1}+{thick2}"
    if new_id in {t.id for t in d.surfaces} | {p.id for p in d.pieces}:
        raise BoundaryMismatch(f"name {new_id!r} already in use")

    p_new, prov_p = _absorb(a1, b2, thin, a1.id, new_id, thick1)
    q_new, prov_q = _absorb(a2, b1, thin, a2.id, new_id, thick2)
    try:
        hp, hq = p_new.body.plus, q_new.body.plus
    except OrbcalcError as exc:
        raise NotAmalgable(f"tube reassembly failed: {exc}") from exc
    if hp != hq:
        raise NotAmalgable(f"reassembled sides disagree: {hp} vs {hq}")
    x1, x2, xf = (orb_char(d.surface(t).component) for t in (thick1, thick2, thin))
    if orb_char(hp) != x1 + x2 - xf:
        raise NotAmalgable(f"reassembled surface {hp} has the wrong characteristic")
    old = {p.id: p for p in (a1, a2, b1, b2)}
    if not (_ghost_provenance_ok(p_new, prov_p, old) and _ghost_provenance_ok(q_new, prov_q, old)):
        raise AssertionError("amalgamation created a ghost arc with no ghost arc ancestor")

    f = d.surface(thin)
    tail, head = (a1.id, a2.id) if f.tail == b1.id else (a2.id, a1.id)
    rename = {b2.id: a1.id, b1.id: a2.id}
    surfaces = []
    for t in d.surfaces:
        if t.id in (thick1, thick2, thin):
            continue
        if t.tail in rename or t.head in rename:
            t = Surface(t.id, t.role, t.component, rename.get(t.tail, t.tail), rename.get(t.head, t.head))
        surfaces.append(t)
    surfaces.append(Surface(new_id, Role.THICK, hp, tail, head))
    pieces = []
    for p in d.pieces:
        if p.id == a1.id:
            pieces.append(p_new)
        elif p.id == a2.id:
            pieces.append(q_new)
        elif p.id not in (b1.id, b2.id):
            pieces.append(p)
    after = _rebuild(d, surfaces, pieces)
    params = {"thick1": thick1, "thick2": thick2, "thin": thin, "name": new_id}
    return _finish(d, after, MoveKind.AMALGAMATE, params)


# ---------------------------------------------------------------- replay


@dataclass(frozen=True)
class ThinningSequence:
    initial: Decomposition
    records: tuple
    final: Decomposition


def apply_move(d: Decomposition, kind, params: dict):
    """Dispatch a move by kind with recorded (or hand-written) parameters."""
    kind = MoveKind(kind)
    p = dict(params)
    if kind in (MoveKind.TYPE1_NONSEP, MoveKind.TYPE1_SEP):
        disc = Disc(p.get("weight", 1), kind is MoveKind.TYPE1_SEP, p.get("discarded"))
        return apply_type1(d, p["thick"], disc, piece=p.get("piece"), handles=p.get("handles"))
    if kind is MoveKind.TYPE2:
        return apply_type2(d, p["thick"], p["weight"], piece=p.get("piece"), handles=p.get("handles"))
    if kind is MoveKind.CONSOLIDATION:
        return consolidate(d, p["thick"], p["thin"])
    if kind is MoveKind.UNTELESCOPE:
        data = Untelescoping(p["w1"], p["w2"], p["h1"], p["h2"], p["f"])
        return untelescope(d, p["thick"], data, handles=p.get("handles"), names=p.get("names"))
    if kind is MoveKind.CREATE_REMOVABLE:
        return create_removable_arc(d, p["piece"], p["ghost_arc"])
    return amalgamate(d, p["thick1"], p["thick2"], p["thin"], name=p.get("name"))


def run_script(d: Decomposition, steps) -> ThinningSequence:
    """Apply ``(kind, params)`` steps in order and package the result."""
    records = []
    cur = d
    for kind, params in steps:
        cur, rec = apply_move(cur, kind, params)
        records.append(rec)
    return ThinningSequence(d, tuple(records), cur)


def replay(seq: ThinningSequence) -> Decomposition:
    """Reapply every record from the initial decomposition and check it reproduces the sequence."""
    cur = seq.initial
    total = Fraction(0)
    for k, rec in enumerate(seq.records):
        try:
            cur, again = apply_move(cur, rec.kind, rec.params)
        except OrbcalcError as exc:
            raise ReplayMismatch(f"step {k} ({rec.kind.value}) failed: {exc}") from exc
        if again != rec:
            raise ReplayMismatch(f"step {k} ({rec.kind.value}) produced {again}, recorded {rec}")
        total += rec.delta_net_x
    if cur != seq.final:
        raise ReplayMismatch("replayed decomposition differs from the recorded final one")
    if raw_net_x(seq.final) - raw_net_x(seq.initial) != total:
        raise ReplayMismatch("recorded netX deltas do not add up")
    return cur
