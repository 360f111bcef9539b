"""Handle structures of vp-compressionbodies.

A compressionbody is assembled from 0-handles (:class:`Ball` or :class:`Product`)
and 1-handles (:class:`OneHandle`).  Attachment sites are combinatorial slots:
a weighted 1-handle names a puncture slot on each end, an unweighted one only
names the 0-handle it lands on.  From that data the assembler derives the
positive boundary, the negative boundary and the edges of the graph, each
classified as vertical, bridge, ghost or core loop.
"""
from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Optional, Sequence, Union

from .errors import Disconnected, InvalidVertex, MismatchedWeight, NoWitness, SiteConflict
from .orbifold import (
    INF,
    OrbSurface,
    SurfaceComponent,
    Weight,
    check_weight,
    orb_char,
    sort_weights,
    vertex_char,
    weight_reciprocal,
)


@dataclass(frozen=True)
class Ball:
    """A 3-ball containing the cone on ``len(cone)`` boundary points."""

    cone: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "cone", sort_weights(self.cone))

    @property
    def punctures(self) -> tuple:
        return self.cone

    @property
    def euler_char(self) -> int:
        return 2


@dataclass(frozen=True)
class Product:
    """``F x I`` with vertical arcs; ``F`` has the given genus and one puncture per arc."""

    genus: int
    arcs: tuple = ()

    def __post_init__(self):
        if isinstance(self.genus, bool) or not isinstance(self.genus, int) or self.genus < 0:
            raise ValueError(f"product base genus must be a nonnegative integer, got {self.genus!r}")
        object.__setattr__(self, "arcs", sort_weights(self.arcs))

    @property
    def punctures(self) -> tuple:
        return self.arcs

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus

    @property
    def base(self) -> SurfaceComponent:
        return SurfaceComponent(self.genus, self.arcs)


ZeroHandle = Union[Ball, Product]


@dataclass(frozen=True)
class OneHandle:
    """A 1-handle from 0-handle ``a`` to 0-handle ``b``.

    Weighted handles carry a core arc of that weight and must name the puncture
    slots they consume; unweighted ones leave the slots as ``None``.
    """

    a: int
    b: int
    weight: Optional[Weight] = None
    a_slot: Optional[int] = None
    b_slot: Optional[int] = None

    @property
    def weighted(self) -> bool:
        return self.weight is not None

    @property
    def scar_weight(self):
        """Weight used for characteristic deltas: 1 for an unweighted handle."""
        return 1 if self.weight is None else self.weight


class EdgeKind(str, enum.Enum):
    VERTICAL = "vertical"
    BRIDGE = "bridge"
    GHOST = "ghost"
    CORE_LOOP = "core_loop"


@dataclass(frozen=True)
class Edge:
    kind: EdgeKind
    weight: Weight
    # endpoint nodes, e.g. ("top", h, i), ("bottom", h, i), ("vertex", h), ("end", h)
    ends: tuple
    # segment labels: ("z", h, i) for 0-handle pieces, ("o", j) for weighted 1-handle cores
    segments: tuple


def _inv_reciprocal(w) -> Fraction:
    return Fraction(1) if w == 1 else weight_reciprocal(w)


def _ball_segments(h: int, ball: Ball):
    cone = ball.cone
    if len(cone) == 1:
        return [(("end", h), ("top", h, 0), cone[0], ("z", h, 0))]
    if len(cone) == 2:
        return [(("top", h, 0), ("top", h, 1), cone[0], ("z", h, 0))]
    if len(cone) == 3:
        return [(("vertex", h), ("top", h, i), cone[i], ("z", h, i)) for i in range(3)]
    return []


class _UnionFind:
    def __init__(self, items):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> bool:
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        self.parent[rx] = ry
        return True

    def count(self) -> int:
        return len({self.find(x) for x in self.parent})


def _check_zero_handle(h: int, z: ZeroHandle):
    if isinstance(z, Ball):
        cone = z.cone
        if len(cone) > 3:
            raise InvalidVertex(f"0-handle {h}: cone on {len(cone)} points (at most 3 allowed)")
        if len(cone) == 3 and not vertex_char(cone)[1]:
            raise InvalidVertex(f"0-handle {h}: vertex weights {cone} have nonnegative characteristic")
        if len(cone) == 2 and cone[0] != cone[1]:
            raise MismatchedWeight(f"0-handle {h}: arc ends carry weights {cone[0]} and {cone[1]}")
    elif not isinstance(z, Product):
        raise TypeError(f"0-handle {h}: expected Ball or Product, got {type(z).__name__}")


@dataclass(frozen=True)
class VpCompressionbody:
    """An assembled compressionbody.  Build it with :func:`assemble`."""

    zero_handles: tuple
    one_handles: tuple
    plus: SurfaceComponent = field(init=False, compare=False)
    minus: tuple = field(init=False, compare=False)
    free_slots: frozenset = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        zs = tuple(self.zero_handles)
        os_ = tuple(self.one_handles)
        object.__setattr__(self, "zero_handles", zs)
        object.__setattr__(self, "one_handles", os_)
        if not zs:
            raise Disconnected("a compressionbody needs at least one 0-handle")
        for h, z in enumerate(zs):
            _check_zero_handle(h, z)

        used = set()
        uf = _UnionFind(range(len(zs)))
        for j, e in enumerate(os_):
            for end in (e.a, e.b):
                if not (isinstance(end, int) and 0 <= end < len(zs)):
                    raise SiteConflict(f"1-handle {j}: no 0-handle {end!r}")
            if e.weight is None:
                if e.a_slot is not None or e.b_slot is not None:
                    raise SiteConflict(f"1-handle {j}: unweighted handle names puncture slots")
            else:
                check_weight(e.weight)
                for h, slot in ((e.a, e.a_slot), (e.b, e.b_slot)):
                    ps = zs[h].punctures
                    if not (isinstance(slot, int) and 0 <= slot < len(ps)):
                        raise SiteConflict(f"1-handle {j}: 0-handle {h} has no puncture slot {slot!r}")
                    if ps[slot] != e.weight:
                        raise MismatchedWeight(
                            f"1-handle {j} of weight {e.weight} attached at a puncture of weight {ps[slot]}"
                        )
                    if (h, slot) in used:
                        raise SiteConflict(f"puncture slot {slot} of 0-handle {h} is used twice")
                    used.add((h, slot))
            uf.union(e.a, e.b)
        if uf.count() != 1:
            raise Disconnected(f"handle structure has {uf.count()} connected components")

        chi = sum(z.euler_char for z in zs) - 2 * len(os_)
        free = [(h, i) for h, z in enumerate(zs) for i in range(len(z.punctures)) if (h, i) not in used]
        plus = SurfaceComponent((2 - chi) // 2, [zs[h].punctures[i] for h, i in free])
        minus = tuple(z.base for z in zs if isinstance(z, Product))
        object.__setattr__(self, "plus", plus)
        object.__setattr__(self, "minus", minus)
        object.__setattr__(self, "free_slots", frozenset(free))
        object.__setattr__(self, "_used", frozenset(used))

    @cached_property
    def edges(self) -> tuple:
        """Graph edges traced through the handles, classified by how many ends lie on the positive boundary."""
        used = self._used
        segs = []
        for h, z in enumerate(self.zero_handles):
            if isinstance(z, Product):
                segs.extend((("bottom", h, i), ("top", h, i), w, ("z", h, i)) for i, w in enumerate(z.arcs))
            else:
                segs.extend(_ball_segments(h, z))
        for j, e in enumerate(self.one_handles):
            if e.weighted:
                segs.append((("top", e.a, e.a_slot), ("top", e.b, e.b_slot), e.weight, ("o", j)))

        incident = {}
        for s, (u, v, _, _) in enumerate(segs):
            incident.setdefault(u, []).append(s)
            incident.setdefault(v, []).append(s)

        def passes_through(node):
            return node[0] == "top" and (node[1], node[2]) in used

        seen = set()
        edges = []

        def walk(start, s):
            labels = []
            node = start
            while True:
                seen.add(s)
                u, v, w, label = segs[s]
                labels.append(label)
                nxt = v if u == node else u
                if not passes_through(nxt) or nxt == start:
                    return nxt, w, labels
                a, b = incident[nxt]
                s = b if a == s else a
                node = nxt

        # open edges start and end at nodes that are not interior pass-through points
        for node in sorted(incident, key=repr):
            if passes_through(node):
                continue
            for s in incident[node]:
                if s in seen:
                    continue
                end, w, labels = walk(node, s)
                on_plus = sum(1 for n in (node, end) if n[0] == "top" and not passes_through(n))
                kind = (EdgeKind.GHOST, EdgeKind.VERTICAL, EdgeKind.BRIDGE)[on_plus]
                edges.append(Edge(kind, w, (node, end), tuple(labels)))
        # whatever is left closes up
        for s in range(len(segs)):
            if s in seen:
                continue
            start = segs[s][0]
            _, w, labels = walk(start, s)
            edges.append(Edge(EdgeKind.CORE_LOOP, w, (), tuple(labels)))
        return tuple(edges)

    @property
    def boundary_plus(self) -> OrbSurface:
        return OrbSurface((self.plus,))

    @property
    def boundary_minus(self) -> OrbSurface:
        return OrbSurface(self.minus)

    def edges_of(self, kind: EdgeKind) -> list:
        return [e for e in self.edges if e.kind == kind]

    @property
    def ghost_arcs(self) -> list:
        return self.edges_of(EdgeKind.GHOST)

    def product_indices(self) -> list:
        return [h for h, z in enumerate(self.zero_handles) if isinstance(z, Product)]

    def scars(self, h: int) -> list:
        """Scar weights (1 for unweighted) of every 1-handle end on 0-handle ``h``."""
        out = []
        for e in self.one_handles:
            for end in (e.a, e.b):
                if end == h:
                    out.append(e.scar_weight)
        return out

    def is_bridge_handle(self, j: int) -> bool:
        """True if removing 1-handle ``j`` disconnects the handle graph."""
        uf = _UnionFind(range(len(self.zero_handles)))
        for k, e in enumerate(self.one_handles):
            if k != j:
                uf.union(e.a, e.b)
        return uf.count() > 1


def assemble(zero_handles: Sequence[ZeroHandle], one_handles: Sequence[OneHandle] = ()) -> VpCompressionbody:
    """Assemble and validate a handle structure.

    Raises :class:`MismatchedWeight`, :class:`Disconnected`, :class:`InvalidVertex`
    or :class:`SiteConflict` when the slot data is inconsistent.
    """
    return VpCompressionbody(tuple(zero_handles), tuple(one_handles))


def n_value(c: VpCompressionbody) -> Fraction:
    """``x(plus) - x(minus)``."""
    return orb_char(c.plus) - orb_char(c.minus)


@dataclass(frozen=True)
class GhostArcGraph:
    vertices: tuple
    edges: tuple
    cycle_rank: int
    violation: bool


def ghost_arc_graph(c: VpCompressionbody) -> GhostArcGraph:
    """Graph on negative-boundary components and interior vertices whose edges are ghost arcs.

    ``violation`` is set when the positive boundary is a sphere and the graph has
    a cycle, or a torus and the graph has two independent cycles.
    """
    vertices = []
    for h, z in enumerate(c.zero_handles):
        if isinstance(z, Product):
            vertices.append(("minus", h))
        elif len(z.cone) == 3:
            vertices.append(("vertex", h))
        elif len(z.cone) == 1:
            vertices.append(("end", h))

    def vertex_of(node):
        return ("minus", node[1]) if node[0] == "bottom" else node

    edges = tuple((vertex_of(e.ends[0]), vertex_of(e.ends[1]), e.weight) for e in c.ghost_arcs)
    uf = _UnionFind(vertices)
    for u, v, _ in edges:
        uf.union(u, v)
    rank = len(edges) - len(vertices) + uf.count()
    g = c.plus.genus
    violation = (g == 0 and rank > 0) or (g == 1 and rank >= 2)
    return GhostArcGraph(tuple(vertices), edges, rank, violation)


class Triviality(str, enum.Enum):
    TRIVIAL_BALL = "trivial_ball"
    TRIVIAL_PRODUCT = "trivial_product"
    NOT_TRIVIAL = "not_trivial"


def is_trivial(c: VpCompressionbody) -> Triviality:
    if len(c.zero_handles) == 1 and not c.one_handles:
        if isinstance(c.zero_handles[0], Ball):
            return Triviality.TRIVIAL_BALL
        return Triviality.TRIVIAL_PRODUCT
    return Triviality.NOT_TRIVIAL


class Exceptional(str, enum.Enum):
    TRIVIAL_BALL = "trivial_ball"
    EUCLIDEAN_TRIVIAL_BALL = "euclidean_trivial_ball"
    EUCLIDEAN_PILLOW = "euclidean_pillow"
    SOLID_TORUS_EMPTY = "solid_torus_empty"
    SOLID_TORUS_CORE = "solid_torus_core"
    NONE = "none"


def _pillow_half(z: ZeroHandle, e: OneHandle) -> bool:
    if not isinstance(z, Ball):
        return False
    if len(z.cone) == 2:
        return not e.weighted
    return len(z.cone) == 3 and e.weighted


def is_pillow(c: VpCompressionbody) -> bool:
    """Two arc balls joined by an unweighted 1-handle, or two vertex balls joined by a weighted one."""
    if len(c.zero_handles) != 2 or len(c.one_handles) != 1:
        return False
    e = c.one_handles[0]
    if {e.a, e.b} != {0, 1}:
        return False
    za, zb = c.zero_handles[e.a], c.zero_handles[e.b]
    if not (_pillow_half(za, e) and _pillow_half(zb, e)):
        return False
    return len(za.cone) == len(zb.cone)


def classify_exceptional(c: VpCompressionbody) -> Exceptional:
    """Recognise the low-characteristic shapes: negative ``N`` or ``N = 0`` with empty negative boundary."""
    n = n_value(c)
    if n < 0:
        return Exceptional.TRIVIAL_BALL if is_trivial(c) is Triviality.TRIVIAL_BALL else Exceptional.NONE
    if n > 0 or c.minus:
        return Exceptional.NONE
    zs, os_ = c.zero_handles, c.one_handles
    if len(zs) == 1 and not os_ and zs[0].cone == (INF, INF):
        return Exceptional.EUCLIDEAN_TRIVIAL_BALL
    if len(zs) == 1 and len(os_) == 1:
        e = os_[0]
        if zs[0].cone == () and not e.weighted:
            return Exceptional.SOLID_TORUS_EMPTY
        if len(zs[0].cone) == 2 and e.weighted and {e.a_slot, e.b_slot} == {0, 1}:
            return Exceptional.SOLID_TORUS_CORE
    if is_pillow(c) and c.plus == SurfaceComponent(0, (2, 2, 2, 2)):
        return Exceptional.EUCLIDEAN_PILLOW
    return Exceptional.NONE


def reduction_defects(c: VpCompressionbody) -> list:
    """Reasons the handle structure is not a reduced presentation.

    A reduced presentation is what a minimal complete disc system produces:
    no cone on a single point inside a larger structure, no once-punctured
    sphere in the negative boundary, an empty ball meets at least three
    1-handle ends (or exactly the two ends of one self-attached handle), and an
    arc ball that meets any 1-handle meets an unweighted one unless it is the
    solid torus around its own core loop.
    """
    out = []
    zs, os_ = c.zero_handles, c.one_handles
    single = len(zs) == 1
    for comp in c.minus:
        if comp.genus == 0 and len(comp.punctures) == 1:
            out.append(f"negative boundary contains a once-punctured sphere {comp}")
    for h, z in enumerate(zs):
        if not isinstance(z, Ball):
            continue
        scars = c.scars(h)
        if len(z.cone) == 1 and not (single and not os_):
            out.append(f"0-handle {h}: cone on one point inside a larger structure")
        if len(z.cone) == 0 and scars:
            self_loop = len(os_) == 1 and os_[0].a == os_[0].b == h and not os_[0].weighted
            if len(scars) < 3 and not (len(scars) == 2 and self_loop):
                out.append(f"0-handle {h}: empty ball meets {len(scars)} handle ends")
        if len(z.cone) == 2 and scars and 1 not in scars:
            e = os_[0] if len(os_) == 1 else None
            core = single and e is not None and e.weighted and {e.a_slot, e.b_slot} == {0, 1}
            if not core:
                out.append(f"0-handle {h}: arc ball meets only weighted handle ends")
    return out


def is_reduced(c: VpCompressionbody) -> bool:
    return not reduction_defects(c)


def scar_sum_n(c: VpCompressionbody) -> Fraction:
    """``N`` recomputed as a sum over 0-handles of their characteristic plus scar reciprocals."""
    total = Fraction(0)
    for h, z in enumerate(c.zero_handles):
        if isinstance(z, Product):
            local = Fraction(0)
        else:
            local = -2 + sum((1 - weight_reciprocal(w) for w in z.cone), Fraction(0))
        total += local + sum((_inv_reciprocal(w) for w in c.scars(h)), Fraction(0))
    return total


def nonseparating_handles(c: VpCompressionbody, weight="any") -> list:
    """Indices of 1-handles whose removal keeps the structure connected.

    ``weight`` filters: ``None`` for unweighted, a weight for weighted handles of
    that weight, ``"any"`` for all.
    """
    out = []
    for j, e in enumerate(c.one_handles):
        if weight != "any" and e.weight != weight:
            continue
        if not c.is_bridge_handle(j):
            out.append(j)
    return out


def drop_handles(zero_handles, one_handles, drop_zero=(), drop_one=()):
    """Remove 0- and 1-handles, renumbering the survivors.  1-handles on a dropped 0-handle must be dropped too."""
    drop_zero, drop_one = set(drop_zero), set(drop_one)
    remap = {}
    zs = []
    for h, z in enumerate(zero_handles):
        if h not in drop_zero:
            remap[h] = len(zs)
            zs.append(z)
    os_ = []
    for j, e in enumerate(one_handles):
        if j in drop_one:
            continue
        if e.a in drop_zero or e.b in drop_zero:
            raise ValueError(f"1-handle {j} still attached to a dropped 0-handle")
        os_.append(OneHandle(remap[e.a], remap[e.b], e.weight, e.a_slot, e.b_slot))
    return zs, os_


def synthesize(plus: SurfaceComponent, minus: Sequence[SurfaceComponent] = (), rng: Optional[random.Random] = None):
    """Build some handle structure with the given positive and negative boundary.

    Products carry the negative boundary; vertex balls fix puncture parity; arc
    balls add puncture pairs; weighted handles consume pairs; unweighted handles
    connect and then add genus.  Raises :class:`NoWitness` when impossible with
    these pieces (an odd number of INF punctures to absorb, or too little genus).
    Returns ``(zero_handles, one_handles)``.
    """
    rng = rng or random.Random(0)
    zs: list = [Product(m.genus, m.punctures) for m in minus]
    target = Counter(plus.punctures)
    have = Counter(w for z in zs for w in z.punctures)

    odd = [w for w in set(target) | set(have) if (target[w] - have[w]) % 2]
    if INF in odd:
        raise NoWitness("cannot balance an odd number of INF punctures")
    for w in sorted(w for w in odd if w != 2):
        zs.append(Ball((2, 2, w)))
        have.update((2, 2, w))
    if (target[2] - have[2]) % 2:
        zs.append(Ball((2, 2, 2)))
        have.update((2, 2, 2))

    for w in sort_weights(set(target) | set(have)):
        extra = target[w] - have[w]
        for _ in range(max(extra, 0) // 2):
            zs.append(Ball((w, w)))

    if not zs:
        zs.append(Ball(()))
    os_: list = []
    uf = _UnionFind(range(len(zs)))
    free = {}
    for h, z in enumerate(zs):
        for i, w in enumerate(z.punctures):
            free.setdefault(w, []).append((h, i))
    for w in sort_weights(free):
        slots = free[w]
        rng.shuffle(slots)
        for _ in range((len(slots) - target[w]) // 2):
            ha, sa = slots.pop(0)
            # prefer a partner in another component so the pair does not add genus
            k = next((k for k, (hb, _) in enumerate(slots) if uf.find(hb) != uf.find(ha)), 0)
            hb, sb = slots.pop(k)
            os_.append(OneHandle(ha, hb, w, sa, sb))
            uf.union(ha, hb)

    reps = sorted({uf.find(h) for h in range(len(zs))})
    for a, b in zip(reps, reps[1:]):
        os_.append(OneHandle(a, b))
        uf.union(a, b)

    genus_now = sum(z.genus for z in zs if isinstance(z, Product)) + len(os_) - len(zs) + 1
    need = plus.genus - genus_now
    if need < 0:
        raise NoWitness(f"positive boundary genus {plus.genus} is below the forced genus {genus_now}")
    for _ in range(need):
        h = rng.randrange(len(zs))
        os_.append(OneHandle(h, h))
    body = assemble(zs, os_)
    if body.plus != plus:
        raise AssertionError(f"synthesis produced {body.plus}, wanted {plus}")
    return zs, os_
