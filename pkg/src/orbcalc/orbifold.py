"""Weights, 2-orbifold surfaces and the orbifold characteristic.

A weight is an integer ``>= 2`` or the symbol :data:`INF`.  Only reciprocals of
weights ever enter arithmetic, and the reciprocal of :data:`INF` is zero, so
every characteristic below is an exact :class:`fractions.Fraction`.

>>> orb_char(SurfaceComponent(0, (2, 3, 7)))
Fraction(1, 42)
>>> vertex_char((2, 3, 5))
(Fraction(-1, 30), True)
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Union

from .errors import InvalidWeight


class _Infinity:
    """The infinite weight.  Compares above every integer."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __str__(self):
        return "inf"

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __hash__(self):
        return hash("orbcalc-inf")

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

Weight = Union[int, _Infinity]


def check_weight(w) -> Weight:
    """Return ``w`` if it is a legal weight, else raise :class:`InvalidWeight`."""
    if w is INF:
        return w
    if isinstance(w, bool) or not isinstance(w, int) or w < 2:
        raise InvalidWeight(f"weight must be an integer >= 2 or INF, got {w!r}")
    return w


def is_finite(w: Weight) -> bool:
    return w is not INF


def weight_reciprocal(w: Weight) -> Fraction:
    check_weight(w)
    if w is INF:
        return Fraction(0)
    return Fraction(1, w)


def puncture_term(w: Weight) -> Fraction:
    """Contribution ``1 - 1/w`` of one puncture."""
    return 1 - weight_reciprocal(w)


def sort_weights(ws: Iterable[Weight]) -> tuple:
    """Canonical multiset order: finite ascending, then INF."""
    ws = tuple(check_weight(w) for w in ws)
    return tuple(sorted(ws, key=lambda w: (w is INF, 0 if w is INF else w)))


@dataclass(frozen=True)
class SurfaceComponent:
    """A closed orientable surface of some genus with weighted punctures."""

    genus: int
    punctures: tuple = ()

    def __post_init__(self):
        if isinstance(self.genus, bool) or not isinstance(self.genus, int) or self.genus < 0:
            raise ValueError(f"genus must be a nonnegative integer, got {self.genus!r}")
        object.__setattr__(self, "punctures", sort_weights(self.punctures))

    @property
    def euler_char(self) -> int:
        return 2 - 2 * self.genus

    @property
    def is_sphere(self) -> bool:
        return self.genus == 0

    def __str__(self):
        ps = ",".join(str(p) for p in self.punctures)
        return f"g{self.genus}[{ps}]"


def sphere(*punctures: Weight) -> SurfaceComponent:
    return SurfaceComponent(0, punctures)


@dataclass(frozen=True)
class OrbSurface:
    """A possibly empty, possibly disconnected closed 2-orbifold."""

    components: tuple = field(default_factory=tuple)

    def __post_init__(self):
        comps = tuple(self.components)
        for c in comps:
            if not isinstance(c, SurfaceComponent):
                raise TypeError(f"expected SurfaceComponent, got {type(c).__name__}")
        object.__setattr__(self, "components", tuple(sorted(comps, key=component_key)))

    def __iter__(self):
        return iter(self.components)

    def __len__(self):
        return len(self.components)

    def __add__(self, other: "OrbSurface") -> "OrbSurface":
        return OrbSurface(self.components + tuple(other))

    @property
    def puncture_count(self) -> int:
        return sum(len(c.punctures) for c in self.components)


def component_key(c: SurfaceComponent):
    return (c.genus, len(c.punctures), tuple((p is INF, 0 if p is INF else p) for p in c.punctures))


def orb_char(s: Union[SurfaceComponent, OrbSurface, Iterable[SurfaceComponent]]) -> Fraction:
    """``-chi + sum(1 - 1/w)`` summed over components; zero for the empty surface."""
    if isinstance(s, SurfaceComponent):
        return _component_char(s)
    return sum((_component_char(c) for c in s), Fraction(0))


@lru_cache(maxsize=65536)
def _component_char(c: SurfaceComponent) -> Fraction:
    return -c.euler_char + sum((puncture_term(p) for p in c.punctures), Fraction(0))


def cover_char(s, degree: int) -> Fraction:
    """Characteristic of a degree-``degree`` orbifold cover of ``s``."""
    if isinstance(degree, bool) or not isinstance(degree, int) or degree < 1:
        raise ValueError(f"cover degree must be a positive integer, got {degree!r}")
    return degree * orb_char(s)


class Geometry(str, enum.Enum):
    BAD = "bad"
    SPHERICAL = "spherical"
    EUCLIDEAN = "euclidean"
    HYPERBOLIC = "hyperbolic"


@dataclass(frozen=True)
class ComponentClass:
    geometry: Geometry
    turnover: bool = False
    # a sphere with a single puncture of weight INF: not bad, but not allowed in a nice orbifold
    inf_once_punctured: bool = False


def is_bad(c: SurfaceComponent) -> bool:
    if not c.is_sphere:
        return False
    ps = c.punctures
    if len(ps) == 1:
        return ps[0] is not INF
    if len(ps) == 2:
        return ps[0] != ps[1]
    return False


def classify_2orbifold(c: SurfaceComponent) -> ComponentClass:
    turnover = c.is_sphere and len(c.punctures) == 3
    inf_once = c.is_sphere and c.punctures == (INF,)
    if is_bad(c):
        return ComponentClass(Geometry.BAD, turnover, inf_once)
    x = orb_char(c)
    if x < 0:
        geo = Geometry.SPHERICAL
    elif x == 0:
        geo = Geometry.EUCLIDEAN
    else:
        geo = Geometry.HYPERBOLIC
    return ComponentClass(geo, turnover, inf_once)


def vertex_char(triple) -> tuple[Fraction, bool]:
    """Characteristic ``1 - (1/a + 1/b + 1/c)`` of a trivalent vertex and whether it is negative."""
    return _vertex_char(tuple(triple))


@lru_cache(maxsize=4096)
def _vertex_char(triple: tuple) -> tuple[Fraction, bool]:
    a, b, c = triple
    x = 1 - (weight_reciprocal(a) + weight_reciprocal(b) + weight_reciprocal(c))
    return x, x < 0
