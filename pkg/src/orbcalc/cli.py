"""Command-line entry point: ``orbcalc <subcommand> ...``.

Exit status is 0 on success, 1 when an input fails validation or a check
fails, and 2 on usage errors (bad flags, unreadable files, unknown names).
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import bounds
from .campaign import run_enumeration, run_fuzz, worker_count
from .compressionbody import classify_exceptional, n_value
from .decomposition import fundamental_identity, net_iota, net_x, validate
from .errors import OrbcalcError, SchemaError, UnknownExample
from .examples import EXAMPLES, run_named_example
from .generators import FuzzConfig, all_product_bases
from .moves import replay, run_script
from .orbifold import INF, check_weight, classify_2orbifold, orb_char
from .serialize import (
    _obj,
    _version,
    dump_rational,
    dumps,
    load_weight,
    loads,
    parse_decomposition,
    parse_script,
    report_to_dict,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _weight(text: str):
    try:
        return INF if text.lower() in ("inf", "infinity") else check_weight(int(text))
    except (ValueError, OrbcalcError) as exc:
        raise argparse.ArgumentTypeError(f"invalid weight {text!r}: {exc}") from None


def _weights(text: str) -> list:
    return [_weight(t.strip()) for t in text.split(",") if t.strip()]


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"invalid rational {text!r}") from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _fmt(x) -> str:
    return "inf" if x is INF else str(x)


def _group(a) -> bounds.GroupData:
    return bounds.GroupData(a["order"], not a["noncyclic"])


# formula name -> (evaluator over parsed arguments, argument name -> parser)
FORMULAS = {
    "genus-from-char": (lambda a: bounds.genus_from_char(a["x"], a["components"]), {"x": _rational, "components": int}),
    "bridge-surface-char": (lambda a: bounds.bridge_surface_char(a["g"], a["b"], a["k"]), {"g": int, "b": int, "k": _weight}),
    "tunnel": (lambda a: bounds.tunnel_bound(a["t"], a["b"], a["k"]), {"t": int, "b": int, "k": _weight}),
    "comparatively-small": (
        lambda a: bounds.comparatively_small_bound(a["x_factors"], a["x_spheres"]),
        {"x_factors": _rational, "x_spheres": _rational},
    ),
    "lower-sixth": (lambda a: bounds.lower_bound_sixth(a["n"]), {"n": int}),
    "counting-lower": (
        lambda a: bounds.counting_lower_bound(a["n"], _group(a)),
        {"n": int, "order": int, "noncyclic": bool},
    ),
    "upper-orb": (
        lambda a: bounds.upper_bound_orb(a["x_factors"], a["x_spheres"], a["n_spheres"], a["c"]),
        {"x_factors": _rational, "x_spheres": _rational, "n_spheres": int, "c": int},
    ),
    "upper-equiv": (
        lambda a: bounds.upper_bound_equiv(a["g_factors"], a["n"], _group(a)),
        {"g_factors": _rational, "n": int, "order": int, "noncyclic": bool},
    ),
    "zeta": (lambda a: bounds.zeta(a["t"], a["w"], a["big_n"]), {"t": int, "w": _weight, "big_n": int}),
}


def _bounds_params_file(path: str) -> tuple[str, dict]:
    """Strict parameter file: ``{"format_version": 1, "formula": NAME, "params": {...}}``."""
    v = _obj(loads(_read(path)), "bounds file", {"format_version", "formula", "params"})
    _version(v, "bounds file")
    name = v["formula"]
    if name not in FORMULAS:
        raise SchemaError(f"bounds file: unknown formula {name!r}")
    argspec = FORMULAS[name][1]
    raw = _obj(v["params"], "bounds file params", {k for k, t in argspec.items() if t is not bool}, {k for k, t in argspec.items() if t is bool})
    args = {}
    for k, t in argspec.items():
        x = raw.get(k, False)
        if t is bool:
            if not isinstance(x, bool):
                raise SchemaError(f"bounds file params.{k}: expected a boolean")
            args[k] = x
        elif t is _weight:
            args[k] = load_weight(x, f"bounds file params.{k}")
        elif t is int:
            if isinstance(x, bool) or not isinstance(x, int):
                raise SchemaError(f"bounds file params.{k}: expected an integer")
            args[k] = x
        else:
            if isinstance(x, bool) or not isinstance(x, (int, str)):
                raise SchemaError(f"bounds file params.{k}: expected an integer or 'p/q' string")
            try:
                args[k] = Fraction(x)
            except (ValueError, ZeroDivisionError):
                raise SchemaError(f"bounds file params.{k}: invalid rational {x!r}") from None
    return name, args


def cmd_validate(ns, out) -> int:
    d = parse_decomposition(_read(ns.file))
    rep = validate(d)
    if rep.ok:
        print(f"{ns.file}: valid ({len(d.pieces)} pieces, {len(d.thick)} thick, {len(d.thin)} thin)", file=out)
        print(f"nonseparating spheres: {rep.nice.nonseparating_spheres}", file=out)
        return EXIT_OK
    print(f"{ns.file}: invalid", file=out)
    for v in rep.violations:
        print(f"  {v}", file=out)
    return EXIT_FAIL


def cmd_invariants(ns, out) -> int:
    d = parse_decomposition(_read(ns.file))
    rep = validate(d)
    if not rep.ok:
        for v in rep.violations:
            print(f"invalid: {v}", file=sys.stderr)
        return EXIT_FAIL
    ident = fundamental_identity(d)
    print(f"netX: {net_x(d)}", file=out)
    print(f"netiota: {net_iota(d)}", file=out)
    print(f"identity: 2 netX - x(boundary) = {ident.lhs}, sum N = {ident.rhs}, {'holds' if ident.holds else 'FAILS'}", file=out)
    print("surfaces:", file=out)
    for s in d.surfaces:
        cls = classify_2orbifold(s.component)
        tags = [cls.geometry.value] + (["turnover"] if cls.turnover else [])
        ps = ",".join(_fmt(w) for w in s.component.punctures)
        print(f"  {s.id:<12} {s.role.value:<8} genus {s.component.genus} [{ps}] x={orb_char(s.component)} {' '.join(tags)}", file=out)
    print("pieces:", file=out)
    for p in d.pieces:
        print(f"  {p.id:<12} N={n_value(p.body)} {classify_exceptional(p.body).value}", file=out)
    return EXIT_OK if ident.holds else EXIT_FAIL


def cmd_moves(ns, out) -> int:
    d = parse_decomposition(_read(ns.file))
    steps = parse_script(_read(ns.script))
    try:
        seq = run_script(d, steps)
        replay(seq)
    except OrbcalcError as exc:
        print(f"move failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    print(f"{'step':>4}  {'move':<18} {'dnetX':>10} {'dnetiota':>9}", file=out)
    for k, rec in enumerate(seq.records):
        print(f"{k:>4}  {rec.kind.value:<18} {str(rec.delta_net_x):>10} {rec.delta_net_iota:>9}", file=out)
    final = seq.final
    print(f"netX: {net_x(d)} -> {net_x(final)}", file=out)
    print(f"netiota: {net_iota(d)} -> {net_iota(final)}", file=out)
    for s in final.thick:
        print(f"thick {s.id}: x_omega {orb_char(s.component)}", file=out)
    return EXIT_OK


def cmd_bounds(ns, out) -> int:
    if ns.params_file:
        if ns.formula:
            raise UsageError("give either a formula with flags or --params-file, not both")
        name, args = _bounds_params_file(ns.params_file)
    else:
        if not ns.formula:
            raise UsageError(f"choose a formula: {', '.join(FORMULAS)}")
        name = ns.formula
        argspec = FORMULAS[name][1]
        args = {}
        for k, t in argspec.items():
            x = getattr(ns, k, None)
            if t is bool:
                args[k] = bool(x)
            elif x is None:
                raise UsageError(f"{name} needs --{k.replace('_', '-')}")
            else:
                args[k] = x
        extra = [k for k in ALL_BOUND_FLAGS if k not in argspec and getattr(ns, k, None) not in (None, False)]
        if extra:
            raise UsageError(f"{name} does not take {', '.join('--' + k.replace('_', '-') for k in extra)}")
    try:
        value = FORMULAS[name][0](args)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    shown = {k: (v if isinstance(v, bool) else _fmt(v) if v is INF else dump_rational(v)) for k, v in args.items()}
    print(dumps({"formula": name, "params": shown, "value": dump_rational(value)}), end="", file=out)
    return EXIT_OK


ALL_BOUND_FLAGS = sorted({k for _, argspec in FORMULAS.values() for k in argspec})
EXAMPLE_FLAGS = {
    "q": int, "k": _weight, "t": int, "w": _weight, "big_n": int,
    "a": _weight, "n": int, "t1": int, "t2": int, "t_sum": int, "b_sum": int,
}


def cmd_example(ns, out) -> int:
    params = {k: getattr(ns, k) for k in EXAMPLE_FLAGS if getattr(ns, k) is not None}
    try:
        rep = run_named_example(ns.name, **params)
    except UnknownExample as exc:
        raise UsageError(str(exc)) from None
    except OrbcalcError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    print(dumps(report_to_dict(rep)), end="", file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_fuzz(ns, out) -> int:
    if ns.count < 0 or ns.max_pieces < 2 or ns.max_weight < 2 or not 0 <= ns.inf_prob <= 1:
        raise UsageError("bounds must be positive (max-pieces >= 2, max-weight >= 2, 0 <= inf-prob <= 1)")
    cfg = FuzzConfig(
        seed=ns.seed, count=ns.count, max_handles=ns.max_handles, max_genus=ns.max_genus,
        max_weight=ns.max_weight, inf_prob=ns.inf_prob, max_pieces=ns.max_pieces,
    )
    rep = run_fuzz(cfg, moves=not ns.no_moves, workers=ns.workers or worker_count())
    summary = {
        "seed": cfg.seed,
        "count": rep.cases,
        "identity_failures": rep.identity_failures,
        "integrality_checked": rep.integrality_checked,
        "integrality_failures": rep.integrality_failures,
        "moves_applied": rep.moves_applied,
        "move_counts": dict(sorted(rep.move_counts.items())),
        "move_violations": rep.move_violations,
        "ok": rep.ok,
    }
    print(dumps(summary), end="", file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_enumerate(ns, out) -> int:
    if not 0 <= ns.max_handles <= 4:
        raise UsageError("--max-handles must be between 0 and 4")
    kwargs = {"max_products": ns.max_products}
    if ns.all_products:
        kwargs["product_bases"] = all_product_bases(ns.weights)
    rep = run_enumeration(ns.max_handles, ns.weights, **kwargs)
    summary = {
        "max_handles": rep.max_handles,
        "weights": [_fmt(w) for w in rep.weights],
        "cases": rep.cases,
        "classes": dict(sorted(rep.classes.items())),
        "negative_not_trivial": rep.negative_not_trivial,
        "zero_unclassified": rep.zero_unclassified,
        "oracle_mismatches": rep.mismatches,
        "ok": rep.ok,
    }
    print(dumps(summary), end="", file=out)
    return EXIT_OK if rep.ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbcalc", description="Exact invariants and thinning moves for multiple vp-bridge surfaces.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("validate", help="check a decomposition file")
    p.add_argument("file")
    p.set_defaults(run=cmd_validate)

    p = sub.add_parser("invariants", help="netX, netiota, per-piece N and classifications")
    p.add_argument("file")
    p.set_defaults(run=cmd_invariants)

    p = sub.add_parser("moves", help="replay a move script and print the delta table")
    p.add_argument("file")
    p.add_argument("script")
    p.set_defaults(run=cmd_moves)

    p = sub.add_parser("bounds", help="evaluate a bound formula")
    p.add_argument("formula", nargs="?", choices=list(FORMULAS))
    p.add_argument("--params-file", metavar="FILE")
    for k in ALL_BOUND_FLAGS:
        kinds = {argspec[k] for _, argspec in FORMULAS.values() if k in argspec}
        t = kinds.pop()
        flag = "--" + k.replace("_", "-")
        if t is bool:
            p.add_argument(flag, action="store_true", dest=k, help="group has a non-cyclic point stabilizer (c = 2)")
        else:
            p.add_argument(flag, type=t, dest=k)
    p.set_defaults(run=cmd_bounds)

    p = sub.add_parser("example", help="run a named worked example")
    p.add_argument("name", help=", ".join(EXAMPLES))
    for k, t in EXAMPLE_FLAGS.items():
        p.add_argument("--" + k.replace("_", "-"), type=t, dest=k)
    p.set_defaults(run=cmd_example)

    p = sub.add_parser("fuzz", help="seeded random decompositions and moves")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=100)
    p.add_argument("--max-handles", type=int, default=3)
    p.add_argument("--max-genus", type=int, default=2)
    p.add_argument("--max-weight", type=int, default=12)
    p.add_argument("--inf-prob", type=float, default=0.1)
    p.add_argument("--max-pieces", type=int, default=6)
    p.add_argument("--no-moves", action="store_true")
    p.add_argument("--workers", type=int, default=None, help="defaults to ORBCALC_WORKERS or 1")
    p.set_defaults(run=cmd_fuzz)

    p = sub.add_parser("enumerate", help="exhaustive small compressionbodies against the classifier oracle")
    p.add_argument("--max-handles", type=int, required=True)
    p.add_argument("--weights", type=_weights, default=[2, 3, 5, INF])
    p.add_argument("--max-products", type=int, default=1)
    p.add_argument("--all-products", action="store_true", help="include turnover product bases")
    p.set_defaults(run=cmd_enumerate)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return ns.run(ns, out)
    except UsageError as exc:
        print(f"orbcalc {ns.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OrbcalcError as exc:
        print(f"orbcalc {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
