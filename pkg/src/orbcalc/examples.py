"""Named reproductions of the worked examples, each returning a checked report."""
from __future__ import annotations

from .bounds import ExampleReport, additive_example, sixth_sharp_example, subadditive_example, superadd_example
from .errors import UnknownExample

EXAMPLES = {
    "torus-knot-additive": (additive_example, {"q": 5, "k": 2}),
    "subadditive": (subadditive_example, {"t1": 2, "t2": 2, "t_sum": 3, "b_sum": 7}),
    "superadd": (superadd_example, {"t": 1, "w": 2, "big_n": 1}),
    "sixth-sharp": (sixth_sharp_example, {"a": 6, "n": 1}),
}


def run_named_example(name: str, **params) -> ExampleReport:
    """Run an example with its smallest legal parameters, overridden by ``params``."""
    try:
        fn, defaults = EXAMPLES[name]
    except KeyError:
        raise UnknownExample(f"unknown example {name!r}; choose from {sorted(EXAMPLES)}") from None
    unknown = set(params) - set(defaults)
    if unknown:
        raise UnknownExample(f"example {name!r} takes {sorted(defaults)}, not {sorted(unknown)}")
    return fn(**{**defaults, **params})
