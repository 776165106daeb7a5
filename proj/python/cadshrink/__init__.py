"""Python front end for the cadshrink library.

Programs travel as s-expression text; reports come back as plain dicts.
"""
import json

from ._cadshrink import (  # noqa: F401
    DegenerateScale,
    EvalError,
    ParseError,
    cost,
    evaluate,
    is_core,
    normalize,
    perturb,
    semantic_equiv,
    validate,
)
from . import _cadshrink

__all__ = [
    "DegenerateScale",
    "EvalError",
    "ParseError",
    "cost",
    "evaluate",
    "is_core",
    "normalize",
    "perturb",
    "semantic_equiv",
    "shrink",
    "validate",
]


def shrink(text, *, max_iters=30, max_nodes=100000, max_seconds=10.0, solver_eps=1e-3,
           equiv_eps=1e-6, cad_identities=True, inverse=True):
    """Shrink a Core Caddy program. Returns (program_text, report_dict)."""
    program, report = _cadshrink._shrink(
        text, max_iters, max_nodes, max_seconds, solver_eps, equiv_eps, cad_identities, inverse)
    return program, json.loads(report)
