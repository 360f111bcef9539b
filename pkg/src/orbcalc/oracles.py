"""Brute-force second routes for checking the engine.

None of these share code with the computations they check: characteristics
are recomputed with integer arithmetic over a common denominator, vertex
validity by list membership, and exceptional shapes from boundary data and
traced edges rather than from handle shapes.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

from .compressionbody import EdgeKind, Exceptional, VpCompressionbody, scar_sum_n
from .orbifold import INF


def euler_char_by_cells(genus: int) -> int:
    """``V - E + F`` for the standard one-vertex, one-face polygon model of a closed surface."""
    if genus == 0:
        # two hemispheres glued along an equator with one vertex
        return 1 - 1 + 2
    return 1 - 2 * genus + 1


def orb_char_by_integers(genus: int, punctures) -> Fraction:
    """Characteristic summed as integers over the lcm of the finite weights."""
    finite = [w for w in punctures if w is not INF]
    den = lcm(1, *finite)
    num = -euler_char_by_cells(genus) * den
    for w in punctures:
        num += den if w is INF else den - den // w
    return Fraction(num, den)


SPHERICAL_TRIPLES = {(2, 3, 3), (2, 3, 4), (2, 3, 5)}


def is_listed_spherical_triple(triple) -> bool:
    """Membership in the classical list of spherical triangle groups: ``(2,2,k)``, ``(2,3,3)``, ``(2,3,4)``, ``(2,3,5)``."""
    if INF in triple:
        return False
    t = tuple(sorted(triple))
    return t[:2] == (2, 2) or t in SPHERICAL_TRIPLES


def reclassify(c: VpCompressionbody) -> Exceptional:
    """Exceptional type read off from ``N`` (summed over 0-handles), boundary data and edge kinds."""
    n = scar_sum_n(c)
    plus = c.plus
    if n < 0:
        if not c.minus and plus.genus == 0 and len(plus.punctures) <= 3:
            return Exceptional.TRIVIAL_BALL
        return Exceptional.NONE
    if n > 0 or c.minus:
        return Exceptional.NONE
    if plus.genus == 0 and plus.punctures == (INF, INF):
        return Exceptional.EUCLIDEAN_TRIVIAL_BALL
    if plus.genus == 0 and plus.punctures == (2, 2, 2, 2):
        return Exceptional.EUCLIDEAN_PILLOW
    if plus.genus == 1 and not plus.punctures:
        loops = sum(1 for e in c.edges if e.kind is EdgeKind.CORE_LOOP)
        others = sum(1 for e in c.edges if e.kind is not EdgeKind.CORE_LOOP)
        if others == 0 and loops == 0:
            return Exceptional.SOLID_TORUS_EMPTY
        if others == 0 and loops == 1:
            return Exceptional.SOLID_TORUS_CORE
    return Exceptional.NONE


def two_scale_net_x_is_integral(net_x: Fraction, weights) -> bool:
    """Whether ``2 L netX`` is an integer for ``L`` the lcm of the finite weights."""
    scale = lcm(1, *(w for w in weights if w is not INF))
    return (2 * scale * net_x).denominator == 1


def plus_char_by_cells(zero_handles, one_handles) -> int:
    """``V - E + F`` of an explicit cell structure on the positive boundary.

    Each 0-handle surface starts as one vertex, ``2g`` loops and one polygon
    face.  Every 1-handle end adds a slit edge to a new vertex and a loop
    around it, then the disc inside the loop is removed.  Every 1-handle
    glues in an annulus: one new edge across it and one face.
    """
    verts, edges, faces = set(), set(), set()
    ends = {}
    for j, e in enumerate(one_handles):
        ends.setdefault(e.a, []).append((j, "a"))
        ends.setdefault(e.b, []).append((j, "b"))
    for h, z in enumerate(zero_handles):
        genus = getattr(z, "genus", 0)
        verts.add(("v", h))
        edges.update(("loop", h, i) for i in range(2 * genus))
        faces.add(("polygon", h))
        for end in ends.get(h, []):
            verts.add(("disc", end))
            edges.add(("slit", end))
            edges.add(("rim", end))
    for j in range(len(one_handles)):
        edges.add(("across", j))
        faces.add(("annulus", j))
    return len(verts) - len(edges) + len(faces)
