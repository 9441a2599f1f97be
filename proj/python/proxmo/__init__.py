"""Proximal quasi-Newton solver for composite multiobjective problems.

The compiled core lives in ``proxmo._proxmo``; everything it exports is
re-exported here.
"""

from ._proxmo import (  # noqa: F401
    ProblemInstance,
    certify,
    direction,
    generate_instance,
    instance_from_json,
    read_instance,
    solve,
)

__all__ = [
    "ProblemInstance",
    "certify",
    "direction",
    "generate_instance",
    "instance_from_json",
    "read_instance",
    "solve",
]
