"""Multiple bridge surfaces: thick and thin surfaces cutting an orbifold into compressionbodies.

Pieces name the thick surface that is their positive boundary and, one per
product 0-handle in order, the thin or boundary surfaces forming their negative
boundary.  Each thick or thin surface carries a transverse orientation stored
as the dual-digraph arc ``tail -> head`` between the two pieces it separates.
"""
from __future__ import annotations

import enum
import warnings
from collections import Counter, defaultdict, deque
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import cached_property
from math import lcm
from typing import Iterable, NamedTuple, Optional

from .compressionbody import Ball, Product, VpCompressionbody, assemble, n_value
from .errors import (
    BadScale,
    InvalidCap,
    InvalidDecomposition,
    NotASphere,
    OrbcalcError,
    TooManyPunctures,
    UnknownSurface,
)
from .orbifold import INF, Geometry, SurfaceComponent, classify_2orbifold, orb_char, vertex_char


class Role(str, enum.Enum):
    THICK = "thick"
    THIN = "thin"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class Surface:
    id: str
    role: Role
    component: SurfaceComponent
    tail: Optional[str] = None
    head: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "role", Role(self.role))


@dataclass(frozen=True)
class Piece:
    id: str
    zero_handles: tuple
    one_handles: tuple
    plus: str
    minus: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "zero_handles", tuple(self.zero_handles))
        object.__setattr__(self, "one_handles", tuple(self.one_handles))
        object.__setattr__(self, "minus", tuple(self.minus))

    @cached_property
    def body(self) -> VpCompressionbody:
        return assemble(self.zero_handles, self.one_handles)

    def minus_slots(self) -> list:
        """``(product 0-handle index, surface id)`` pairs."""
        prods = [h for h, z in enumerate(self.zero_handles) if isinstance(z, Product)]
        return list(zip(prods, self.minus))


# Input assertions a decomposition file may record; never computed.
ASSERTION_NO_NONSEPARATING_SPHERES = "no-nonseparating-negative-spheres"
ASSERTION_THIN_C_ESSENTIAL = "thin-c-essential"


@dataclass(frozen=True)
class Decomposition:
    surfaces: tuple
    pieces: tuple
    assertions: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "assertions", tuple(self.assertions))

    @cached_property
    def _surface_map(self) -> dict:
        return {s.id: s for s in self.surfaces}

    @cached_property
    def _piece_map(self) -> dict:
        return {p.id: p for p in self.pieces}

    def surface(self, sid: str) -> Surface:
        try:
            return self._surface_map[sid]
        except KeyError:
            raise UnknownSurface(f"no surface named {sid!r}") from None

    def piece(self, pid: str) -> Piece:
        try:
            return self._piece_map[pid]
        except KeyError:
            raise UnknownSurface(f"no piece named {pid!r}") from None

    def by_role(self, role: Role) -> list:
        return [s for s in self.surfaces if s.role == role]

    @property
    def thick(self) -> list:
        return self.by_role(Role.THICK)

    @property
    def thin(self) -> list:
        return self.by_role(Role.THIN)

    @property
    def boundary(self) -> list:
        return self.by_role(Role.BOUNDARY)

    def plus_pieces(self, sid: str) -> list:
        return [p for p in self.pieces if p.plus == sid]

    def minus_pieces(self, sid: str) -> list:
        return [p for p in self.pieces for m in p.minus if m == sid]

    @cached_property
    def report(self) -> "ValidationReport":
        return _validate(self)


@dataclass(frozen=True)
class NiceReport:
    boundary_ok: bool
    no_bad_surfaces: bool
    no_single_cone_points: bool
    # condition on nonseparating spheres is an input assertion, never computed
    nonseparating_spheres: str
    flags: tuple = ()

    @property
    def ok(self) -> bool:
        return self.boundary_ok and self.no_bad_surfaces and self.no_single_cone_points


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple
    nice: NiceReport

    def __bool__(self):
        return self.ok


def validate(d: Decomposition) -> ValidationReport:
    """Check boundary matching, incidence counts, orientations, acyclicity and niceness."""
    return d.report


def _nice(d: Decomposition) -> NiceReport:
    flags = []
    boundary_ok = True
    for s in d.boundary:
        c = s.component
        if orb_char(c) < 0:
            boundary_ok = False
            flags.append(f"boundary {s.id} has negative characteristic")
        if c.is_sphere and len(c.punctures) < 3:
            boundary_ok = False
            flags.append(f"boundary sphere {s.id} has fewer than three punctures")
    no_bad = True
    for s in d.surfaces:
        cls = classify_2orbifold(s.component)
        if cls.geometry is Geometry.BAD:
            no_bad = False
            flags.append(f"surface {s.id} is a bad 2-orbifold")
        if cls.inf_once_punctured:
            no_bad = False
            flags.append(f"surface {s.id} is a sphere with one INF puncture")
    single = True
    for p in d.pieces:
        for h, z in enumerate(p.zero_handles):
            if isinstance(z, Ball) and len(z.cone) == 1:
                single = False
                flags.append(f"piece {p.id}: 0-handle {h} is a cone on one point")
    cond3 = "asserted by input" if ASSERTION_NO_NONSEPARATING_SPHERES in d.assertions else "not asserted"
    return NiceReport(boundary_ok, no_bad, single, cond3, tuple(flags))


def _piece_direction(d: Decomposition, p: Piece) -> Optional[str]:
    s = d._surface_map.get(p.plus)
    if s is None:
        return None
    return "up" if s.tail == p.id else "down"


def _validate(d: Decomposition) -> ValidationReport:
    v = []
    ids = [s.id for s in d.surfaces] + [p.id for p in d.pieces]
    for name, k in Counter(ids).items():
        if k > 1:
            v.append(f"identifier {name!r} used {k} times")
    smap = d._surface_map

    bodies = {}
    for p in d.pieces:
        try:
            bodies[p.id] = p.body
        except OrbcalcError as exc:
            v.append(f"piece {p.id}: {type(exc).__name__}: {exc}")
    for p in d.pieces:
        body = bodies.get(p.id)
        s = smap.get(p.plus)
        if s is None or s.role is not Role.THICK:
            v.append(f"piece {p.id}: positive boundary {p.plus!r} is not a thick surface")
        elif body is not None and body.plus != s.component:
            v.append(f"piece {p.id}: derived positive boundary {body.plus} does not match {s.id} = {s.component}")
        if body is None:
            continue
        slots = p.minus_slots()
        if len(p.minus) != len(body.minus):
            v.append(f"piece {p.id}: {len(body.minus)} product 0-handles but {len(p.minus)} negative surfaces")
            continue
        for (h, sid), comp in zip(slots, body.minus):
            s = smap.get(sid)
            if s is None or s.role is Role.THICK:
                v.append(f"piece {p.id}: negative boundary {sid!r} is not a thin or boundary surface")
            elif s.component != comp:
                v.append(f"piece {p.id}: product 0-handle {h} is {comp} but {sid} = {s.component}")

    for s in d.surfaces:
        if s.role is Role.THICK:
            adj = [p.id for p in d.plus_pieces(s.id)]
            want = 2
        else:
            adj = [p.id for p in d.minus_pieces(s.id)]
            want = 1 if s.role is Role.BOUNDARY else 2
        if len(adj) != want:
            v.append(f"{s.role.value} surface {s.id} bounds {len(adj)} pieces, expected {want}")
            continue
        if s.role is Role.BOUNDARY:
            if s.tail is not None or s.head is not None:
                v.append(f"boundary surface {s.id} carries an orientation")
        elif Counter((s.tail, s.head)) != Counter(adj):
            v.append(f"surface {s.id} is oriented {s.tail}->{s.head} but separates {adj}")

    if not v:
        for p in d.pieces:
            up = _piece_direction(d, p) == "up"
            for sid in p.minus:
                s = smap[sid]
                if s.role is Role.THIN and (s.head == p.id) != up:
                    v.append(f"piece {p.id}: orientation of {sid} is incoherent with {p.plus}")
        if not _acyclic(d):
            v.append("dual digraph has a directed cycle")

    nice = _nice(d)
    v.extend(f"not nice: {f}" for f in nice.flags)
    return ValidationReport(not v, tuple(v), nice)


def dual_digraph(d: Decomposition) -> list:
    """Arcs ``(tail, head, surface id)`` for every thick and thin surface."""
    return [(s.tail, s.head, s.id) for s in d.surfaces if s.role is not Role.BOUNDARY]


def _acyclic(d: Decomposition) -> bool:
    succ = defaultdict(list)
    indeg = Counter({p.id: 0 for p in d.pieces})
    for a, b, _ in dual_digraph(d):
        succ[a].append(b)
        indeg[b] += 1
    queue = deque(sorted(n for n, k in indeg.items() if k == 0))
    seen = 0
    while queue:
        n = queue.popleft()
        seen += 1
        for m in succ[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                queue.append(m)
    return seen == len(indeg)


def _require_valid(d: Decomposition):
    r = d.report
    if not r.ok:
        raise InvalidDecomposition("; ".join(r.violations))


def surfaces_char(surfaces: Iterable[Surface]) -> Fraction:
    return sum((orb_char(s.component) for s in surfaces), Fraction(0))


def raw_net_x(d: Decomposition) -> Fraction:
    """Thick minus thin characteristic, without validating."""
    return surfaces_char(d.thick) - surfaces_char(d.thin)


def net_x(d: Decomposition) -> Fraction:
    _require_valid(d)
    return raw_net_x(d)


def net_iota(d: Decomposition) -> int:
    _require_valid(d)
    return sum(len(s.component.punctures) for s in d.thick) - sum(len(s.component.punctures) for s in d.thin)


class IdentityCheck(NamedTuple):
    lhs: Fraction
    rhs: Fraction
    holds: bool


def fundamental_identity(d: Decomposition) -> IdentityCheck:
    """Compare ``2 netX - x(boundary)`` against the sum of ``N`` over pieces."""
    _require_valid(d)
    lhs = 2 * raw_net_x(d) - surfaces_char(d.boundary)
    rhs = sum((n_value(p.body) for p in d.pieces), Fraction(0))
    return IdentityCheck(lhs, rhs, lhs == rhs)


def finite_weights(d: Decomposition) -> set:
    ws = set()
    for s in d.surfaces:
        ws.update(s.component.punctures)
    for p in d.pieces:
        for z in p.zero_handles:
            ws.update(z.punctures)
        ws.update(e.weight for e in p.one_handles if e.weight is not None)
    ws.discard(INF)
    return ws


def weight_lcm(d: Decomposition) -> int:
    return lcm(1, *finite_weights(d))


def integrality_scale(d: Decomposition, scale: int) -> bool:
    """Whether ``2 * scale * netX`` is an integer; every finite weight must divide ``scale``."""
    if isinstance(scale, bool) or not isinstance(scale, int) or scale < 1:
        raise BadScale(f"scale must be a positive integer, got {scale!r}")
    bad = sorted(w for w in finite_weights(d) if scale % w)
    if bad:
        raise BadScale(f"weights {bad} do not divide {scale}")
    return (2 * scale * net_x(d)).denominator == 1


@dataclass(frozen=True)
class SplitResult:
    factors: tuple
    delta: Fraction
    # thin spheres left as boundary turnovers because capping would create an invalid vertex
    drilled: tuple = ()


def _cap_is_vertex_safe(c: SurfaceComponent) -> bool:
    return len(c.punctures) != 3 or vertex_char(c.punctures)[1]


def split_along_thin(d: Decomposition, selected: Iterable[str]) -> SplitResult:
    """Cut along thin spheres with at most three punctures and cap the scars.

    A scar is capped by a ball containing the cone on its punctures.  A
    turnover whose cone vertex would have nonnegative characteristic is not
    capped; each side keeps it as a boundary component instead (drilling the
    vertex), and a warning is issued.  Returns the connected factors and
    ``delta``, the total characteristic of the cut spheres, so that
    ``netX(d) == sum(netX(f)) - delta``.
    """
    _require_valid(d)
    selected = list(dict.fromkeys(selected))
    for sid in selected:
        s = d.surface(sid)
        if s.role is not Role.THIN:
            raise UnknownSurface(f"{sid} is not a thin surface")
        c = s.component
        if not c.is_sphere:
            raise NotASphere(f"thin surface {sid} has genus {c.genus}")
        if len(c.punctures) > 3:
            raise TooManyPunctures(f"thin sphere {sid} has {len(c.punctures)} punctures")
        if len(c.punctures) == 1:
            raise InvalidCap(f"thin sphere {sid} has a single puncture")

    chosen = set(selected)
    drilled = [sid for sid in selected if not _cap_is_vertex_safe(d.surface(sid).component)]
    for sid in drilled:
        warnings.warn(
            f"thin turnover {sid} has nonnegative characteristic; left as boundary on both sides "
            "instead of capping (summing-sphere systems need nonpositive characteristic)",
            stacklevel=2,
        )

    new_surfaces = [s for s in d.surfaces if s.id not in chosen]
    for sid in drilled:
        s = d.surface(sid)
        for k in (1, 2):
            new_surfaces.append(Surface(f"{sid}#{k}", Role.BOUNDARY, s.component))
    new_pieces = []
    for p in d.pieces:
        zs = list(p.zero_handles)
        minus = []
        for h, sid in p.minus_slots():
            if sid in chosen and sid not in drilled:
                zs[h] = Ball(zs[h].arcs)
            elif sid in drilled:
                seen = sum(1 for q in new_pieces for m in q.minus if m.startswith(f"{sid}#"))
                minus.append(f"{sid}#{seen + 1}")
            else:
                minus.append(sid)
        new_pieces.append(Piece(p.id, zs, p.one_handles, p.plus, minus))

    factors = _components(new_surfaces, new_pieces, d.assertions)
    delta = sum((orb_char(d.surface(sid).component) for sid in selected), Fraction(0))
    return SplitResult(tuple(factors), delta, tuple(drilled))


def _components(surfaces, pieces, assertions) -> list:
    parent = {p.id: p.id for p in pieces}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    touching = defaultdict(list)
    for p in pieces:
        touching[p.plus].append(p.id)
        for m in p.minus:
            touching[m].append(p.id)
    for ids in touching.values():
        for a in ids[1:]:
            parent[find(a)] = find(ids[0])
    groups = defaultdict(list)
    for p in pieces:
        groups[find(p.id)].append(p)
    out = []
    for root in sorted(groups, key=lambda r: [p.id for p in pieces].index(r)):
        ps = groups[root]
        names = {p.plus for p in ps} | {m for p in ps for m in p.minus}
        out.append(Decomposition([s for s in surfaces if s.id in names], ps, assertions))
    return out


def with_changes(d: Decomposition, drop_surfaces=(), add_surfaces=(), drop_pieces=(), add_pieces=()) -> Decomposition:
    """A new decomposition with surfaces and pieces removed and appended."""
    drop_surfaces, drop_pieces = set(drop_surfaces), set(drop_pieces)
    surfaces = [s for s in d.surfaces if s.id not in drop_surfaces] + list(add_surfaces)
    pieces = [p for p in d.pieces if p.id not in drop_pieces] + list(add_pieces)
    return Decomposition(surfaces, pieces, d.assertions)


def replace_surface(d: Decomposition, sid: str, **changes) -> Decomposition:
    return Decomposition([replace(s, **changes) if s.id == sid else s for s in d.surfaces], d.pieces, d.assertions)
