"""Closed-form bounds, genus/characteristic conversions and knot-arithmetic examples.

Every evaluator is exact.  ``x`` is always an orbifold characteristic, ``g``
a genus, ``n`` a count of factors or spheres.  Tunnel and bridge numbers are
supplied by the caller; nothing here computes them.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Optional

from .compressionbody import Exceptional, classify_exceptional
from .decomposition import Decomposition, net_iota, net_x
from .errors import HypothesisFailed, NoDegeneration
from .orbifold import INF, check_weight, is_finite, orb_char, puncture_term, sphere, weight_reciprocal


@dataclass(frozen=True)
class GroupData:
    order: int
    cyclic_stabilizers: bool = True

    def __post_init__(self):
        if isinstance(self.order, bool) or not isinstance(self.order, int) or self.order < 1:
            raise ValueError(f"group order must be a positive integer, got {self.order!r}")

    @property
    def c(self) -> int:
        return 1 if self.cyclic_stabilizers else 2


@dataclass(frozen=True)
class Claim:
    text: str
    holds: bool


@dataclass
class ExampleReport:
    name: str
    params: dict
    quantities: dict = field(default_factory=dict)
    claims: list = field(default_factory=list)

    def check(self, text: str, holds: bool):
        self.claims.append(Claim(text, bool(holds)))

    @property
    def ok(self) -> bool:
        return all(c.holds for c in self.claims)


def genus_from_char(x, components: int) -> Fraction:
    """Genus of a splitting surface from its characteristic: ``x/2 + components``."""
    g = Fraction(x) / 2 + components
    if g.denominator != 1:
        warnings.warn(f"genus {g} is not an integer", stacklevel=2)
    return g


def lift_by_group(x, group: GroupData) -> Fraction:
    """Characteristics multiply by the group order when lifted to the cover."""
    return group.order * Fraction(x)


def bridge_surface_char(g: int, b: int, k) -> Fraction:
    """Characteristic of a genus-``g`` surface meeting a weight-``k`` knot in ``2b`` points."""
    return 2 * (g + b - 1) - 2 * b * weight_reciprocal(check_weight(k))


def tunnel_bound(t: int, b: int, k) -> Fraction:
    """Lower bound ``2t - 2b/k`` on :func:`bridge_surface_char` given tunnel number ``t``."""
    return 2 * t - 2 * b * weight_reciprocal(check_weight(k))


def comparatively_small_bound(x_factors, x_sum_spheres) -> Fraction:
    """Lower bound on the characteristic of a sum when every factor is comparatively small."""
    return Fraction(x_factors) - Fraction(x_sum_spheres)


def lower_bound_sixth(n: int) -> Fraction:
    return Fraction(n, 6)


def counting_lower_bound(n: int, group: GroupData) -> Fraction:
    # n counts G-orbits of factors that are neither S^3 nor lens spaces (restricted along the summing spheres)
    return 1 + Fraction(n * group.order, 12)


def upper_bound_orb(x_factors, x_spheres, n_spheres: int, c: int) -> Fraction:
    """Upper bound on the characteristic of a sum from its factors and summing spheres.

    ``x_factors - x_spheres * (1 - c) + 2 * c * n_spheres``; with ``c = 1`` the
    sphere characteristics drop out and each sphere costs exactly 2.
    """
    if c not in (1, 2):
        raise ValueError(f"c must be 1 or 2, got {c!r}")
    return Fraction(x_factors) - Fraction(x_spheres) * (1 - c) + 2 * c * n_spheres


def upper_bound_equiv(g_factors, n: int, group: GroupData) -> Fraction:
    """Equivariant genus bound for a sum of ``n`` factors."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return Fraction(g_factors) + (group.c * (group.order + 1) - 2) * (n - 1)


def zeta(t: int, w, big_n: int) -> Fraction:
    """Distance threshold for the super-additivity family."""
    p = puncture_term(w)
    return 2 * (4 * t + big_n + 2 * p + 2) / p + 3


def additive_example(q: int, k) -> ExampleReport:
    """Sum of two (p, q) torus knots labelled ``k``: the thick sphere bound is attained."""
    k = check_weight(k)
    p = puncture_term(k)
    threshold = 2 + 1 / p
    if not abs(q) > threshold:
        raise HypothesisFailed(f"|q| = {abs(q)} must exceed 2 + 1/(1 - 1/k) = {threshold}")
    rep = ExampleReport("torus-knot-additive", {"q": q, "k": k})
    x_factor = bridge_surface_char(1, 1, k)
    candidate = bridge_surface_char(2, 1, k)
    x_sphere = orb_char(sphere(k, k))
    one_bridge = 2 * (abs(q) - 1) * p
    bridge_sphere = 2 * (2 * abs(q) - 1) * p - 2
    q_ = rep.quantities
    q_["x_omega(K_i)"] = x_factor
    q_["x_omega(S)"] = x_sphere
    q_["candidate x_omega(K)"] = candidate
    q_["(1,b) competitor"] = one_bridge
    q_["bridge sphere competitor"] = bridge_sphere
    rep.check("x_omega(K_i) = 2(1 - 1/k)", x_factor == 2 * p)
    rep.check("candidate = 4 - 2/k", candidate == 4 - 2 * weight_reciprocal(k))
    rep.check(
        "candidate = x_omega(K_1) + x_omega(K_2) - x_omega(S)",
        comparatively_small_bound(2 * x_factor, x_sphere) == candidate,
    )
    rep.check("(1,b) competitor exceeds candidate", one_bridge > candidate)
    rep.check("bridge sphere competitor exceeds candidate", bridge_sphere > candidate)
    q_["additive"] = rep.ok
    return rep


class SubadditiveThreshold(NamedTuple):
    k: int
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs > self.rhs


def subadditive_threshold(t1: int, t2: int, t_sum: int, b_sum: int) -> SubadditiveThreshold:
    """Least ``k >= 2`` with ``b_sum / k < t1 + t2 - t_sum``, and the resulting strict inequality.

    ``lhs = 2(t1 + t2) - 2 b_sum / k`` bounds ``x(K_1) + x(K_2) - x(S)`` from
    below; ``rhs = 2 t_sum`` bounds the characteristic of the sum from above.
    """
    gap = t1 + t2 - t_sum
    if gap <= 0:
        raise NoDegeneration(f"t1 + t2 = {t1 + t2} does not exceed t = {t_sum}")
    k = max(2, b_sum // gap + 1)
    lhs = 2 * (t1 + t2 - Fraction(b_sum, k))
    return SubadditiveThreshold(k, lhs, Fraction(2 * t_sum))


def subadditive_example(t1=2, t2=2, t_sum=3, b_sum=7) -> ExampleReport:
    th = subadditive_threshold(t1, t2, t_sum, b_sum)
    rep = ExampleReport("subadditive", {"t1": t1, "t2": t2, "t": t_sum, "b": b_sum})
    rep.quantities.update({"k": th.k, "lower x_omega(K_1)+x_omega(K_2)-x_omega(S)": th.lhs, "upper 2t(K)": th.rhs})
    rep.check("b/k < t1 + t2 - t", Fraction(b_sum, th.k) < t1 + t2 - t_sum)
    rep.check("k is minimal", th.k == 2 or Fraction(b_sum, th.k - 1) >= t1 + t2 - t_sum)
    rep.check("characteristic is strictly subadditive", th.holds)
    return rep


def superadd_example(t: int = 1, w=2, big_n: int = 1, replay_moves: bool = True) -> ExampleReport:
    """Knot sum whose cyclic branched cover has genus strictly above the sum of the factors."""
    w = check_weight(w)
    if not is_finite(w):
        raise ValueError("the weight must be finite")
    if t < 1 or big_n < 1:
        raise ValueError("t and N must be positive")
    grp = GroupData(w)
    rep = ExampleReport("superadd", {"t": t, "w": w, "N": big_n})
    x_factors = 4 * t
    x_s = orb_char(sphere(w, w))
    net = comparatively_small_bound(x_factors, x_s)
    x_knot = upper_bound_orb(x_factors, x_s, 1, 1)
    x_cover = lift_by_group(x_knot, grp)
    x_cover_factors = lift_by_group(x_factors, grp)
    net_cover = lift_by_group(net, grp)
    g_cover = genus_from_char(x_cover, 1)
    g_cover_factors = genus_from_char(x_cover_factors, 2)
    qs = rep.quantities
    qs["zeta"] = zeta(t, w, big_n)
    qs["netX(H)"] = net
    qs["x_omega(S^3,K)"] = x_knot
    qs["x_omega(W;G)"] = x_cover
    qs["netX(W;G)"] = net_cover
    qs["x_omega(W|_S;G)"] = x_cover_factors
    qs["genus(W;G)"] = g_cover
    qs["genus(W|_S;G)"] = g_cover_factors
    qs["genus gap"] = g_cover - g_cover_factors
    rep.check("netX(H) = 4t + 2/w", net == 4 * t + Fraction(2, w))
    rep.check("x_omega(S^3,K) = 4t + 2", x_knot == 4 * t + 2)
    rep.check("lower bound < x_omega(S^3,K)", net < x_knot)
    rep.check("x_omega(W|_S;G) = 4tw", x_cover_factors == 4 * t * w)
    rep.check("genus gap = |G| - 1", g_cover - g_cover_factors == w - 1)
    rep.check(
        "equivariant upper bound is attained",
        upper_bound_equiv(g_cover_factors, 2, grp) == g_cover,
    )
    if replay_moves:
        _superadd_decomposition_checks(rep, t, w)
    return rep


def _superadd_decomposition_checks(rep: ExampleReport, t: int, w):
    from .constructions import superadd_decomposition
    from .moves import replay, run_script

    d = superadd_decomposition(t, w)
    rep.check("built decomposition has netX = 4t + 2/w", net_x(d) == rep.quantities["netX(H)"])
    rep.check("built decomposition has netiota = -2", net_iota(d) == -2)
    seq = run_script(
        d,
        [
            ("create_removable", {"piece": "B1", "ghost_arc": 0}),
            ("amalgamate", {"thick1": "H1", "thick2": "H2", "thin": "S"}),
        ],
    )
    replay(seq)
    final = seq.final
    rep.check("amalgamation leaves one thick surface and no thin one", len(final.thick) == 1 and not final.thin)
    x_final = orb_char(final.thick[0].component)
    rep.quantities["x_omega(amalgamated H)"] = x_final
    rep.check("amalgamated thick surface has x_omega = 4t + 2", x_final == rep.quantities["x_omega(S^3,K)"])


def sixth_sharp_example(a=6, n: int = 1) -> ExampleReport:
    """Two thick 4-punctured spheres around a thin turnover ``(2, 3, a)``, summed ``n`` times."""
    from .constructions import disjoint_union, sixth_sharp_decomposition

    a = check_weight(a)
    if n < 1:
        raise ValueError("n must be positive")
    d = sixth_sharp_decomposition(a)
    rep = ExampleReport("sixth-sharp", {"a": a, "n": n})
    net = net_x(d)
    x_thin = orb_char(sphere(2, 3, a))
    inv_a = weight_reciprocal(a)
    rep.quantities.update(
        {
            "netX": net,
            "x_omega(thin turnover)": x_thin,
            "x_omega(thick sphere)": orb_char(sphere(2, 2, 2, 3)),
            "netX limit as a grows": net_x(sixth_sharp_decomposition(INF)),
        }
    )
    rep.check("netX = 1/6 + 1/a", net == Fraction(1, 6) + inv_a)
    rep.check("netX >= 1/6", net >= lower_bound_sixth(1))
    rep.check("thin turnover x_omega = 1/6 - 1/a", x_thin == Fraction(1, 6) - inv_a)
    rep.check("limit netX = 1/6", rep.quantities["netX limit as a grows"] == Fraction(1, 6))
    if a is INF or a >= 7:
        rep.check("thin turnover is not spherical", x_thin > 0)
    if n > 1:
        total = net_x(disjoint_union([d] * n))
        rep.quantities["netX of n copies"] = total
        rep.quantities["excess over n/6"] = total - lower_bound_sixth(n)
        rep.check("n copies: netX >= n/6", total >= lower_bound_sixth(n))
        rep.check("n copies: excess = n/a", total - lower_bound_sixth(n) == n * inv_a)
    return rep


# ---------------------------------------------------------------- exceptional factors


def exceptional_pattern(factor: Decomposition) -> Optional[str]:
    """Name the low-complexity factor a one-surface decomposition matches, if any.

    Recognised: the trivial splitting of the 3-sphere (``S0``), an unknotted
    circle (``S2``), a theta graph (``S3``), the Euclidean double pillow, lens
    spaces with empty graph, a lens space with a core loop (``lens_core``) and
    the Hopf link.
    """
    if len(factor.thick) != 1 or factor.thin or factor.boundary:
        return None
    comp = factor.thick[0].component
    kinds = sorted(classify_exceptional(p.body).value for p in factor.pieces)
    balls = {Exceptional.TRIVIAL_BALL.value, Exceptional.EUCLIDEAN_TRIVIAL_BALL.value}
    if comp.is_sphere and set(kinds) <= balls:
        return {0: "S0", 2: "S2", 3: "S3"}.get(len(comp.punctures))
    if comp == sphere(2, 2, 2, 2) and kinds == [Exceptional.EUCLIDEAN_PILLOW.value] * 2:
        return "euclidean_double_pillow"
    if comp.genus == 1:
        empty, core = Exceptional.SOLID_TORUS_EMPTY.value, Exceptional.SOLID_TORUS_CORE.value
        if kinds == [empty, empty]:
            return "lens"
        if kinds == sorted([empty, core]):
            return "lens_core"
        if kinds == [core, core]:
            return "hopf"
    return None
