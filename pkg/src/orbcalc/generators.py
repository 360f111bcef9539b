"""Seeded random decompositions, candidate moves and exhaustive small handle structures."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Optional

from .compressionbody import (
    Ball,
    OneHandle,
    Product,
    VpCompressionbody,
    _UnionFind,
    assemble,
    is_reduced,
    nonseparating_handles,
    synthesize,
)
from .decomposition import Decomposition, Piece, Role, Surface
from .errors import NoWitness, OrbcalcError
from .moves import MoveKind, _leaf_arc_balls, _side_surface, _split_sides
from .orbifold import INF, Geometry, SurfaceComponent, classify_2orbifold, orb_char, sort_weights, vertex_char


@dataclass(frozen=True)
class FuzzConfig:
    seed: int = 0
    count: int = 1
    max_handles: int = 3
    max_genus: int = 2
    max_weight: int = 12
    inf_prob: float = 0.1
    max_pieces: int = 6

    def __post_init__(self):
        for name in ("count", "max_handles", "max_weight", "max_pieces"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_genus < 0 or not 0 <= self.inf_prob <= 1 or self.max_weight < 2:
            raise ValueError("max_genus >= 0, max_weight >= 2 and 0 <= inf_prob <= 1 are required")


class _Builder:
    def __init__(self, cfg: FuzzConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.surfaces: list = []
        self.pieces: list = []
        self.counter = itertools.count()

    def weight(self):
        if self.rng.random() < self.cfg.inf_prob:
            return INF
        return self.rng.randint(2, self.cfg.max_weight)

    def name(self, prefix: str) -> str:
        return f"{prefix}{next(self.counter)}"

    def vertex(self) -> tuple:
        # no triple with INF is spherical, so draw finite weights only
        while True:
            triple = (2, self.rng.choice([2, 3]), self.rng.randint(2, self.cfg.max_weight))
            if vertex_char(triple)[1]:
                return triple

    def ball(self) -> Ball:
        r = self.rng.random()
        if r < 0.3:
            return Ball(())
        if r < 0.75:
            w = self.weight()
            return Ball((w, w))
        return Ball(self.vertex())

    def base(self, boundary: bool) -> SurfaceComponent:
        """A negative-boundary component; boundary components must be nice."""
        while True:
            g = self.rng.randint(0, min(1, self.cfg.max_genus))
            k = self.rng.choice([0, 2, 3, 4]) if g == 0 else self.rng.randint(0, 2)
            c = SurfaceComponent(g, [self.weight() for _ in range(k)])
            cls = classify_2orbifold(c)
            if cls.geometry is Geometry.BAD or cls.inf_once_punctured:
                continue
            if c.is_sphere and len(c.punctures) < 2:
                continue
            if boundary and (orb_char(c) < 0 or (c.is_sphere and len(c.punctures) < 3)):
                continue
            return c

    def random_structure(self, forced: list) -> tuple:
        """Random connected handle structure containing products on ``forced`` bases."""
        rng = self.rng
        zs = [Product(c.genus, c.punctures) for c in forced]
        for _ in range(rng.randint(0 if zs else 1, 2)):
            zs.append(self.ball())
        free = [(h, i) for h, z in enumerate(zs) for i in range(len(z.punctures))]
        os_ = []
        uf = _UnionFind(range(len(zs)))
        order = list(range(len(zs)))
        rng.shuffle(order)
        for a, b in zip(order, order[1:]):
            pair = self._weighted_pair(zs, free, uf, a, b) if rng.random() < 0.5 else None
            if pair:
                os_.append(pair)
            else:
                os_.append(OneHandle(a, b))
            uf.union(a, b)
        for _ in range(rng.randint(0, self.cfg.max_handles)):
            if rng.random() < 0.5:
                pair = self._weighted_pair(zs, free, None, None, None)
                if pair:
                    os_.append(pair)
                    continue
            h1, h2 = rng.randrange(len(zs)), rng.randrange(len(zs))
            os_.append(OneHandle(h1, h2))
        return zs, os_

    def _weighted_pair(self, zs, free, uf, a, b) -> Optional[OneHandle]:
        by_w = {}
        for h, i in free:
            if a is not None and h not in (a, b):
                continue
            by_w.setdefault(zs[h].punctures[i], []).append((h, i))
        options = []
        for w, slots in by_w.items():
            for s, t in itertools.combinations(slots, 2):
                if a is None or {s[0], t[0]} == {a, b}:
                    options.append((w, s, t))
        if not options:
            return None
        w, (ha, sa), (hb, sb) = self.rng.choice(options)
        free.remove((ha, sa))
        free.remove((hb, sb))
        return OneHandle(ha, hb, w, sa, sb)


def _nice_thick(c: SurfaceComponent) -> bool:
    cls = classify_2orbifold(c)
    return cls.geometry is not Geometry.BAD and not cls.inf_once_punctured


def _try_generate(cfg: FuzzConfig, rng: random.Random) -> Optional[Decomposition]:
    b = _Builder(cfg, rng)
    # pending: (thick id, piece already on one side, its direction)
    pending_thick = []
    pending_thin = []

    def add_piece(forced_minus, direction="up"):
        """A random piece with the given negative boundary; opens its thick surface."""
        minus_ids, comps = [], []
        for c, sid in forced_minus:
            comps.append(c)
            minus_ids.append(sid)
        extra = rng.random() < 0.45 and len(b.pieces) + len(pending_thick) < cfg.max_pieces - 2
        if extra:
            boundary = rng.random() < 0.3
            c = b.base(boundary)
            sid = b.name("F" if not boundary else "M")
            comps.append(c)
            minus_ids.append(sid)
            if boundary:
                b.surfaces.append(Surface(sid, Role.BOUNDARY, c))
            else:
                pending_thin.append((sid, c, direction))
        zs, os_ = b.random_structure(comps)
        body = assemble(zs, os_)
        if not _nice_thick(body.plus):
            raise NoWitness("thick surface is not nice")
        pid, hid = b.name("P"), b.name("H")
        b.pieces.append(Piece(pid, zs, os_, hid, minus_ids))
        pending_thick.append((hid, body.plus, pid, direction))
        return pid

    add_piece([], direction="up")
    while pending_thick or pending_thin:
        if pending_thick:
            hid, comp, pid, direction = pending_thick.pop(0)
            minus_ids, comps = [], []
            if rng.random() < 0.4 and len(b.pieces) < cfg.max_pieces - 1:
                c = b.base(True)
                sid = b.name("M")
                b.surfaces.append(Surface(sid, Role.BOUNDARY, c))
                minus_ids.append(sid)
                comps.append(c)
            try:
                zs, os_ = synthesize(comp, comps, rng)
            except NoWitness:
                zs, os_ = synthesize(comp, [], rng)
                for sid in minus_ids:
                    b.surfaces = [s for s in b.surfaces if s.id != sid]
                minus_ids = []
            qid = b.name("P")
            b.pieces.append(Piece(qid, zs, os_, hid, minus_ids))
            tail, head = (pid, qid) if direction == "up" else (qid, pid)
            b.surfaces.append(Surface(hid, Role.THICK, comp, tail, head))
            continue
        sid, c, direction = pending_thin.pop(0)
        if len(b.pieces) + 2 > cfg.max_pieces:
            return None
        other = "down" if direction == "up" else "up"
        qid = add_piece([(c, sid)], direction=other)
        # an up piece is the head of its thin negative surfaces
        src = next(p.id for p in b.pieces if sid in p.minus and p.id != qid)
        tail, head = (src, qid) if other == "up" else (qid, src)
        b.surfaces.append(Surface(sid, Role.THIN, c, tail, head))
    if len(b.pieces) > cfg.max_pieces:
        return None
    return Decomposition(b.surfaces, b.pieces)


def generate_random_decomposition(cfg: FuzzConfig, index: int = 0) -> Decomposition:
    """Case ``index`` of the seeded sequence; every returned decomposition validates."""
    rng = random.Random(f"orbcalc:{cfg.seed}:{index}")
    for _ in range(1000):
        try:
            d = _try_generate(cfg, rng)
        except (NoWitness, OrbcalcError):
            continue
        if d is None:
            continue
        if not d.report.ok:
            raise AssertionError("generator produced an invalid decomposition: " + "; ".join(d.report.violations))
        return d
    raise AssertionError(f"generator failed to produce case {index} for seed {cfg.seed}")


def generate_cases(cfg: FuzzConfig) -> Iterator[Decomposition]:
    for i in range(cfg.count):
        yield generate_random_decomposition(cfg, i)


# ---------------------------------------------------------------- candidate moves


def candidate_moves(d: Decomposition) -> list:
    """Move descriptors whose witnesses exist structurally; most, not all, will apply."""
    out = []
    for s in d.thick:
        a, b = d.piece(s.tail), d.piece(s.head)
        if nonseparating_handles(a.body, None) and nonseparating_handles(b.body, None):
            out.append((MoveKind.TYPE1_NONSEP, {"thick": s.id}))
        for p, q in ((a, b), (b, a)):
            for j in nonseparating_handles(p.body):
                e = p.one_handles[j]
                if e.weighted and nonseparating_handles(q.body, None):
                    out.append((MoveKind.TYPE1_NONSEP, {"thick": s.id, "weight": e.weight}))
            for j, e in enumerate(p.one_handles):
                if p.body.is_bridge_handle(j):
                    side_a, side_b = _split_sides(p, j)
                    for drop in (side_a, side_b):
                        comp = _side_surface(p, drop, j)
                        params = {"thick": s.id, "weight": e.scar_weight, "discarded": comp, "piece": p.id, "handles": [j]}
                        out.append((MoveKind.TYPE1_SEP, params))
        for w in sorted(set(s.component.punctures), key=lambda w: (w is INF, 0 if w is INF else w)):
            if _leaf_arc_balls(a, w) or _leaf_arc_balls(b, w):
                out.append((MoveKind.TYPE2, {"thick": s.id, "weight": w}))
        g = s.component.genus
        if g >= 2:
            for j1 in nonseparating_handles(a.body):
                for j2 in nonseparating_handles(b.body):
                    w1, w2 = a.one_handles[j1].scar_weight, b.one_handles[j2].scar_weight
                    sc1 = () if w1 == 1 else (w1, w1)
                    sc2 = () if w2 == 1 else (w2, w2)
                    p = s.component.punctures
                    params = {
                        "thick": s.id,
                        "w1": w1,
                        "w2": w2,
                        "h1": SurfaceComponent(g - 1, p + sc1),
                        "h2": SurfaceComponent(g - 1, p + sc2),
                        "f": SurfaceComponent(g - 2, p + sc1 + sc2),
                        "handles": [j1, j2],
                    }
                    out.append((MoveKind.UNTELESCOPE, params))
    for p in d.pieces:
        for k in range(len(p.body.ghost_arcs)):
            out.append((MoveKind.CREATE_REMOVABLE, {"piece": p.id, "ghost_arc": k}))
        if len(p.zero_handles) == 1 and not p.one_handles and isinstance(p.zero_handles[0], Product):
            f = p.minus[0]
            if d.surface(f).role is Role.THIN:
                out.append((MoveKind.CONSOLIDATION, {"thick": p.plus, "thin": f}))
    for f in d.thin:
        p1, p2 = d.minus_pieces(f.id)
        out.append((MoveKind.AMALGAMATE, {"thick1": p1.plus, "thick2": p2.plus, "thin": f.id}))
    return out


# ---------------------------------------------------------------- exhaustive enumeration


def _weight_key(w):
    return (w is INF, 0 if w is INF else w)


def _zero_key(z):
    if isinstance(z, Ball):
        return (0, len(z.cone), tuple(_weight_key(w) for w in z.cone))
    return (1, z.genus, len(z.arcs), tuple(_weight_key(w) for w in z.arcs))


def default_product_bases(weights) -> list:
    """Unpunctured sphere and torus, and spheres ``[w, w]``."""
    ws = sort_weights(set(weights))
    return [SurfaceComponent(0), SurfaceComponent(1)] + [SurfaceComponent(0, (w, w)) for w in ws]


def all_product_bases(weights) -> list:
    """:func:`default_product_bases` plus every turnover over ``weights``."""
    ws = sort_weights(set(weights))
    turnovers = [SurfaceComponent(0, t) for t in itertools.combinations_with_replacement(ws, 3)]
    return default_product_bases(ws) + turnovers


def _zero_handle_types(weights, product_bases) -> list:
    ws = sort_weights(set(weights))
    out = [Ball(())]
    out += [Ball((w, w)) for w in ws]
    out += [Ball(t) for t in itertools.combinations_with_replacement(ws, 3) if vertex_char(t)[1]]
    out += [Product(c.genus, c.punctures) for c in product_bases]
    return sorted(out, key=_zero_key)


def _edge_options(zs, a: int, b: int) -> list:
    """Unweighted, then one weighted option per shared weight, for a 1-handle between ``a`` and ``b``.

    Equal-weight punctures of one 0-handle are interchangeable, so only the
    weight matters; slots are assigned when the structure is built.
    """
    opts = [(a, b, None)]
    pa, pb = zs[a].punctures, zs[b].punctures
    for w in sort_weights(set(pa) & set(pb)):
        if a != b or pa.count(w) >= 2:
            opts.append((a, b, w))
    return opts


def _connected_patterns(k: int, m: int) -> list:
    """Connected attaching patterns with their 0-handle degrees."""
    all_pairs = [(a, b) for a in range(k) for b in range(a, k)]
    out = []
    for pairs in itertools.combinations_with_replacement(all_pairs, m):
        uf = _UnionFind(range(k))
        degree = [0] * k
        for a, b in pairs:
            uf.union(a, b)
            degree[a] += 1
            degree[b] += 1
        if uf.count() == 1:
            out.append((pairs, tuple(degree)))
    return out


def _degree_reject(zs, pairs, degree) -> bool:
    """An empty ball needs three 1-handle ends, or is the lone base of one self-attached handle."""
    for h, z in enumerate(zs):
        if isinstance(z, Ball) and not z.cone and 0 < degree[h] < 3:
            if not (len(pairs) == 1 and pairs[0] == (h, h)):
                return True
    return False


def _vertex_maps(zs) -> list:
    groups = {}
    for h, z in enumerate(zs):
        groups.setdefault(z, []).append(h)
    maps = [{}]
    for members in groups.values():
        maps = [{**m, **dict(zip(members, q))} for m in maps for q in itertools.permutations(members)]
    return maps


def _canonical_edges(edges, vmaps) -> tuple:
    best = None
    for v in vmaps:
        key = tuple(sorted((min(v[a], v[b]), max(v[a], v[b]), (0,) if w is None else (1,) + _weight_key(w)) for a, b, w in edges))
        if best is None or key < best:
            best = key
    return best


def _assign_slots(zs, edges) -> Optional[list]:
    free = [list(z.punctures) for z in zs]
    out = []
    for a, b, w in edges:
        if w is None:
            out.append(OneHandle(a, b))
            continue
        try:
            sa = free[a].index(w)
            free[a][sa] = None
            sb = free[b].index(w)
            free[b][sb] = None
        except ValueError:
            return None
        out.append(OneHandle(a, b, w, sa, sb))
    return out


def _quick_reject(zs, edges) -> bool:
    """Arc balls meeting only weighted handles are not reduced, except the lone core-loop solid torus."""
    if len(zs) == 1 and len(edges) == 1:
        return False
    for h, z in enumerate(zs):
        if isinstance(z, Ball) and len(z.cone) == 2:
            ends = [w for a, b, w in edges for x in (a, b) if x == h]
            if ends and None not in ends:
                return True
    return False


def enumerate_small_compressionbodies(max_handles: int, weights, max_products: int = 1, product_bases=None) -> list:
    """Every reduced handle structure with at most ``max_handles`` 1-handles over ``weights``, up to relabeling.

    0-handles are balls (cones on 0, 2 or 3 points, plus a lone cone on one
    point) and at most ``max_products`` products on the given bases.  The
    attaching pattern is chosen first, then the weight of each 1-handle.
    """
    if not 0 <= max_handles <= 4:
        raise ValueError("max_handles must be between 0 and 4")
    ws = sort_weights(set(weights))
    bases = default_product_bases(ws) if product_bases is None else list(product_bases)
    types = _zero_handle_types(ws, bases)
    out = [assemble([Ball((w,))]) for w in ws]
    for m in range(max_handles + 1):
        for k in range(1, m + 2):
            patterns = _connected_patterns(k, m)
            for zs in itertools.combinations_with_replacement(types, k):
                if sum(isinstance(z, Product) for z in zs) > max_products:
                    continue
                vmaps = None
                seen = set()
                for pairs, degree in patterns:
                    if _degree_reject(zs, pairs, degree):
                        continue
                    options = [_edge_options(zs, a, b) for a, b in pairs]
                    for choice in itertools.product(*(range(len(o)) for o in options)):
                        # equal attaching pairs are interchangeable: keep choices nondecreasing
                        if any(pairs[i] == pairs[i + 1] and choice[i] > choice[i + 1] for i in range(m - 1)):
                            continue
                        edges = tuple(options[i][c] for i, c in enumerate(choice))
                        if _quick_reject(zs, edges):
                            continue
                        if vmaps is None:
                            vmaps = _vertex_maps(zs)
                        key = _canonical_edges(edges, vmaps)
                        if key in seen:
                            continue
                        seen.add(key)
                        body = _build(zs, edges)
                        if body is not None:
                            out.append(body)
    return out


def _build(zs, edges) -> Optional[VpCompressionbody]:
    handles = _assign_slots(zs, edges)
    if handles is None:
        return None
    try:
        body = assemble(zs, handles)
    except OrbcalcError:
        return None
    return body if is_reduced(body) else None
