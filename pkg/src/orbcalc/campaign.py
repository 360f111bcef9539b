"""Seeded fuzz campaigns over random decompositions and random legal moves.

Cases are independent, so a campaign can be sharded across worker processes
(``ORBCALC_WORKERS``); results are merged in case order, which keeps reports
identical for any worker count.
"""
from __future__ import annotations

import os
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .compressionbody import Exceptional, Triviality, classify_exceptional, is_trivial, n_value
from .decomposition import finite_weights, fundamental_identity, raw_net_x
from .errors import OrbcalcError
from .generators import FuzzConfig, candidate_moves, enumerate_small_compressionbodies, generate_random_decomposition
from .moves import MoveKind, ThinningSequence, apply_move, replay
from .oracles import reclassify, two_scale_net_x_is_integral
from .orbifold import INF, puncture_term

MOVES_PER_CASE = 4


@dataclass
class CaseResult:
    index: int
    pieces: int
    identity_ok: bool
    integral: bool | None
    moves: list = field(default_factory=list)
    violations: list = field(default_factory=list)


@dataclass
class FuzzReport:
    config: FuzzConfig
    cases: int = 0
    identity_failures: list = field(default_factory=list)
    integrality_checked: int = 0
    integrality_failures: list = field(default_factory=list)
    move_counts: dict = field(default_factory=dict)
    move_violations: list = field(default_factory=list)

    @property
    def moves_applied(self) -> int:
        return sum(self.move_counts.values())

    @property
    def ok(self) -> bool:
        return not (self.identity_failures or self.integrality_failures or self.move_violations)


def _move_violation(kind: MoveKind, rec) -> str | None:
    dx, di = rec.delta_net_x, rec.delta_net_iota
    if kind is MoveKind.CREATE_REMOVABLE:
        if dx != 2 * puncture_term(rec.params["weight"]) or di != 2:
            return f"create_removable changed netX by {dx}, netiota by {di}"
    elif kind in (MoveKind.CONSOLIDATION, MoveKind.UNTELESCOPE, MoveKind.AMALGAMATE):
        if dx != 0:
            return f"{kind.value} changed netX by {dx}"
    elif dx > 0:
        return f"{kind.value} increased netX by {dx}"
    if kind is MoveKind.TYPE2 and di != -2:
        return f"typeII changed netiota by {di}"
    return None


def run_case(cfg: FuzzConfig, index: int, moves: bool = True) -> CaseResult:
    d = generate_random_decomposition(cfg, index)
    ident = fundamental_identity(d).holds
    weights = finite_weights(d)
    integral = None if _has_inf(d) else two_scale_net_x_is_integral(raw_net_x(d), weights)
    res = CaseResult(index, len(d.pieces), ident, integral)
    if not moves:
        return res
    rng = random.Random(f"orbcalc-moves:{cfg.seed}:{index}")
    records = []
    cur = d
    for _ in range(MOVES_PER_CASE):
        options = candidate_moves(cur)
        rng.shuffle(options)
        for kind, params in options:
            try:
                nxt, rec = apply_move(cur, kind, params)
            except OrbcalcError:
                continue
            except AssertionError as exc:
                res.violations.append(f"case {index}: {kind.value}: {exc}")
                continue
            bad = _move_violation(rec.kind, rec)
            if bad:
                res.violations.append(f"case {index}: {bad}")
            if not fundamental_identity(nxt).holds:
                res.violations.append(f"case {index}: identity fails after {rec.kind.value}")
            res.moves.append(rec.kind.value)
            records.append(rec)
            cur = nxt
            break
        else:
            break
    if records:
        try:
            replay(ThinningSequence(d, tuple(records), cur))
        except OrbcalcError as exc:
            res.violations.append(f"case {index}: replay failed: {exc}")
    return res


def _has_inf(d) -> bool:
    if any(INF in s.component.punctures for s in d.surfaces):
        return True
    return any(INF in z.punctures for p in d.pieces for z in p.zero_handles)


def _run_shard(args):
    cfg, indices, moves = args
    return [run_case(cfg, i, moves) for i in indices]


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("ORBCALC_WORKERS", "1")))
    except ValueError:
        return 1


def run_fuzz(cfg: FuzzConfig, moves: bool = True, workers: int | None = None) -> FuzzReport:
    workers = worker_count() if workers is None else workers
    indices = list(range(cfg.count))
    if workers > 1:
        shards = [(cfg, indices[k::workers], moves) for k in range(workers)]
        with ProcessPoolExecutor(workers) as pool:
            results = [r for shard in pool.map(_run_shard, shards) for r in shard]
        results.sort(key=lambda r: r.index)
    else:
        results = _run_shard((cfg, indices, moves))
    rep = FuzzReport(cfg)
    for r in results:
        rep.cases += 1
        if not r.identity_ok:
            rep.identity_failures.append(r.index)
        if r.integral is not None:
            rep.integrality_checked += 1
            if not r.integral:
                rep.integrality_failures.append(r.index)
        for k in r.moves:
            rep.move_counts[k] = rep.move_counts.get(k, 0) + 1
        rep.move_violations.extend(r.violations)
    return rep


def finite_config(cfg: FuzzConfig) -> FuzzConfig:
    """Same campaign with INF weights switched off."""
    return replace(cfg, inf_prob=0.0)


@dataclass
class EnumerationReport:
    max_handles: int
    weights: tuple
    cases: int = 0
    classes: dict = field(default_factory=dict)
    negative_not_trivial: list = field(default_factory=list)
    zero_unclassified: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.negative_not_trivial or self.zero_unclassified or self.mismatches)


def run_enumeration(max_handles: int, weights, **kwargs) -> EnumerationReport:
    """Enumerate small handle structures and check the low-``N`` classification against the oracle."""
    rep = EnumerationReport(max_handles, tuple(weights))
    for k, c in enumerate(enumerate_small_compressionbodies(max_handles, weights, **kwargs)):
        rep.cases += 1
        n = n_value(c)
        cls = classify_exceptional(c)
        rep.classes[cls.value] = rep.classes.get(cls.value, 0) + 1
        if n < 0 and is_trivial(c) is not Triviality.TRIVIAL_BALL:
            rep.negative_not_trivial.append(k)
        if n == 0 and not c.minus and cls is Exceptional.NONE:
            rep.zero_unclassified.append(k)
        if reclassify(c) is not cls:
            rep.mismatches.append(k)
    return rep
