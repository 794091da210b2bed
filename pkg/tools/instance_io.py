"""
Instance and solution files (JSON, UTF-8).

Instance:  {"p", "alpha", "mu", "h", "f", "edges": [[i, j, omega], ...]}
Solution:  {"phi": [...], "lambda": ...}

Vertices are 0-based indices. An optional "vertices" list of names lets edge
endpoints be given by name; names map to indices in list order.
Floats are written with Python's shortest round-trip repr, so a written file
reads back to the same doubles.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np
from pydantic import ValidationError

from schemas.graph import ProblemInstance, WeightedGraph
from schemas.solver import SolveResult
from utils.errors import InstanceParseError, InstanceValidationError
from utils.flow_logger import function_logger

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

INSTANCE_KEYS = ("p", "alpha", "mu", "h", "f", "edges")


def _load_json(path: PathLike) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as e:
        raise InstanceParseError(f"cannot read file: {e.strerror or e}", str(path))
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise InstanceParseError(f"invalid JSON: {e}", str(path))


def _dump_json(data: Dict[str, Any], path: PathLike) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def _from_validation_error(e: ValidationError) -> InstanceValidationError:
    """First pydantic error as field + index."""
    err = e.errors()[0]
    loc = [part for part in err.get("loc", ()) if part != "graph"]
    field = str(loc[0]) if loc else "instance"
    index = next((part for part in loc[1:] if isinstance(part, int)), None)
    return InstanceValidationError(field, err.get("msg", "invalid value"), index)


def _resolve_endpoint(value: Any, names: Optional[Dict[str, int]], k: int) -> Any:
    if names is not None and isinstance(value, str):
        if value not in names:
            raise InstanceValidationError("edges", f"unknown vertex name '{value}'", k)
        return names[value]
    return value


def instance_from_dict(data: Any, path: Optional[PathLike] = None) -> ProblemInstance:
    """Validate a decoded instance document."""
    where = str(path) if path is not None else None
    if not isinstance(data, dict):
        raise InstanceParseError("top-level JSON value must be an object", where)
    missing = [key for key in INSTANCE_KEYS if key not in data]
    if missing:
        raise InstanceParseError(f"missing keys: {', '.join(missing)}", where)
    for key in ("mu", "h", "f", "edges"):
        if not isinstance(data[key], list):
            raise InstanceParseError(f'"{key}" must be an array', where)

    names = None
    if "vertices" in data:
        names = {str(name): k for k, name in enumerate(data["vertices"])}

    edges = []
    for k, edge in enumerate(data["edges"]):
        if not isinstance(edge, (list, tuple)) or len(edge) != 3:
            raise InstanceParseError(f"edges[{k}] must be [i, j, omega]", where)
        i, j, omega = edge
        edges.append((_resolve_endpoint(i, names, k), _resolve_endpoint(j, names, k), omega))

    mu = data["mu"]
    try:
        graph = WeightedGraph(n=len(mu), mu=mu, edges=edges)
        return ProblemInstance(graph=graph, h=data["h"], f=data["f"], p=data["p"], alpha=data["alpha"])
    except ValidationError as e:
        raise _from_validation_error(e)


def instance_to_dict(inst: ProblemInstance) -> Dict[str, Any]:
    """Document in writer key order; edges sorted by (i, j)."""
    return {
        "p": inst.p,
        "alpha": inst.alpha,
        "mu": list(inst.graph.mu),
        "h": list(inst.h),
        "f": list(inst.f),
        "edges": [[i, j, omega] for i, j, omega in inst.graph.edges],
    }


@function_logger("Read instance file")
def read_instance(path: PathLike) -> ProblemInstance:
    """Parse and validate an instance file."""
    inst = instance_from_dict(_load_json(path), path)
    logger.info("Loaded instance", extra={"path": str(path), "n": inst.n, "edges": inst.graph.edge_count})
    return inst


@function_logger("Write instance file")
def write_instance(inst: ProblemInstance, path: PathLike) -> None:
    _dump_json(instance_to_dict(inst), path)


def read_solution(path: PathLike, n: Optional[int] = None) -> Tuple[np.ndarray, float]:
    """(φ, λ) from a solution file; n, when given, must match len(φ)."""
    data = _load_json(path)
    where = str(path)
    if not isinstance(data, dict) or "phi" not in data or "lambda" not in data:
        raise InstanceParseError('solution must be an object with "phi" and "lambda"', where)
    try:
        phi = np.asarray(data["phi"], dtype=float)
        lam = float(data["lambda"])
    except (TypeError, ValueError) as e:
        raise InstanceParseError(f"non-numeric solution values: {e}", where)
    if phi.ndim != 1:
        raise InstanceParseError('"phi" must be a flat array', where)
    if not np.all(np.isfinite(phi)) or not np.isfinite(lam):
        raise InstanceParseError("solution values must be finite", where)
    if n is not None and phi.shape[0] != n:
        raise InstanceParseError(f'"phi" has {phi.shape[0]} entries, instance has {n} vertices', where)
    return phi, lam


def write_solution(result: SolveResult, path: PathLike) -> None:
    """Solution file readable by `verify`."""
    _dump_json({"phi": list(result.phi), "lambda": result.lambda_}, path)
