"""Exact orbifold characteristics, vp-compressionbodies and thinning moves for multiple vp-bridge surfaces."""
from .bounds import GroupData, ExampleReport
from .compressionbody import Ball, Exceptional, OneHandle, Product, VpCompressionbody, assemble, classify_exceptional, n_value
from .decomposition import (
    Decomposition,
    Piece,
    Role,
    Surface,
    fundamental_identity,
    net_iota,
    net_x,
    split_along_thin,
    validate,
)
from .errors import OrbcalcError
from .examples import run_named_example
from .moves import MoveKind, MoveRecord, apply_move, replay, run_script
from .orbifold import INF, OrbSurface, SurfaceComponent, classify_2orbifold, orb_char, sphere, vertex_char
from .serialize import parse_decomposition, parse_script, serialize_decomposition, serialize_script

__version__ = "0.1.0"

__all__ = [
    "Ball", "Decomposition", "Exceptional", "ExampleReport", "GroupData", "INF", "MoveKind", "MoveRecord",
    "OneHandle", "OrbSurface", "OrbcalcError", "Piece", "Product", "Role", "Surface", "SurfaceComponent",
    "VpCompressionbody", "apply_move", "assemble", "classify_2orbifold", "classify_exceptional",
    "fundamental_identity", "n_value", "net_iota", "net_x", "orb_char", "parse_decomposition", "parse_script",
    "replay", "run_named_example", "run_script", "serialize_decomposition", "serialize_script", "sphere",
    "split_along_thin", "validate", "vertex_char",
]
