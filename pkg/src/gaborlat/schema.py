"""JSON input/output: problem files, window files, stable float formatting."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .frames import Tolerances
from .lattice import GaborGeometry, GeometryError, PeriodicSet, check_support_set, reduce_geometry
from .oracle import DEFAULT_SEED
from .zak import SparseSequence, ThetaGrid


class InputError(ValueError):
    """Malformed problem or window file."""


def _fmt_float(x: float) -> str:
    if math.isnan(x) or math.isinf(x):
        return "null"
    s = format(x, ".17g")
    if not any(c in s for c in ".en"):
        s += ".0"
    return s


def dumps(obj, indent: int | None = 2, _level: int = 0) -> str:
    """``json.dumps`` with every float printed to 17 significant digits."""
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    end = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{" + sep.join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # flat numeric rows stay on one line
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, None) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[" + sep.join(items) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


@dataclass
class ProblemSpec:
    geometry: GaborGeometry
    support: PeriodicSet
    grid: ThetaGrid | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    seed: int = DEFAULT_SEED

    @classmethod
    def from_json(cls, obj: dict) -> "ProblemSpec":
        if not isinstance(obj, dict):
            raise InputError("problem must be a JSON object")
        try:
            params = [obj[k] for k in ("L", "M", "N", "R")]
            support_obj = obj["support"]
        except KeyError as exc:
            raise InputError(f"problem is missing {exc}") from exc
        try:
            geo = reduce_geometry(*params)
            if isinstance(support_obj, dict) and not support_obj.get("residues"):
                raise InputError("the support set must be nonempty")
            support = PeriodicSet.from_json(support_obj)
            check_support_set(support, geo)
            grid = ThetaGrid(int(obj["grid_T"])) if obj.get("grid_T") is not None else None
            tol = Tolerances(**obj.get("tolerances", {}))
        except (GeometryError, TypeError, ValueError) as exc:
            raise InputError(str(exc)) from exc
        seed = obj.get("seed", DEFAULT_SEED)
        if not isinstance(seed, int):
            raise InputError("seed must be an integer")
        return cls(geo, support, grid, tol, seed)

    def to_json(self) -> dict:
        g = self.geometry
        obj = {"L": g.L, "M": g.M, "N": g.N, "R": g.R, "support": self.support.to_json(), "seed": self.seed}
        if self.grid is not None:
            obj["grid_T"] = self.grid.T
        return obj


def read_json(path) -> object:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def load_problem(path) -> ProblemSpec:
    return ProblemSpec.from_json(read_json(path))


def windows_to_json(windows) -> dict:
    return {"windows": [w.to_json() for w in windows]}


def windows_from_json(obj) -> list[SparseSequence]:
    items = obj.get("windows") if isinstance(obj, dict) else obj
    if not isinstance(items, list):
        raise InputError("window file must be a list or an object with a 'windows' list")
    try:
        return [SparseSequence.from_json(w) for w in items]
    except (ValueError, TypeError) as exc:
        raise InputError(str(exc)) from exc


def load_windows(path) -> list[SparseSequence]:
    return windows_from_json(read_json(path))
