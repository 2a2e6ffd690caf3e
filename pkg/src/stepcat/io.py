"""JSON schedule files.

Floats are written with Python's shortest round-trip ``repr``, so reading a
file back reproduces every step bit for bit.
"""
from __future__ import annotations

import json
import math
import os
from typing import Optional, Union

import numpy as np

from .analysis import bound_constant
from .errors import StepcatError
from .schedule import LEAF, Kind, Node, Schedule

FORMAT_VERSION = 1
SUM_ATOL = 1e-12


class ScheduleFileError(StepcatError, ValueError):
    pass


def node_to_dict(node: Node) -> dict:
    if node.op == "leaf":
        return {"op": "leaf", "joint_step": None, "children": []}
    if node.op == "given":
        return {"op": "given", "joint_step": None, "children": [], "steps": list(node.steps), "kind": Kind(node.kind).value}
    return {
        "op": node.op,
        "joint_step": float(node.joint_step),
        "children": [node_to_dict(node.left), node_to_dict(node.right)],
    }


def node_from_dict(d: dict) -> Node:
    op = d["op"]
    if op == "leaf":
        return LEAF
    if op == "given":
        return Node("given", steps=tuple(float(v) for v in d["steps"]), kind=Kind(d.get("kind", "unclassified")))
    if op not in ("ConPP", "ConPD", "ConGP"):
        raise ScheduleFileError(f"unknown construction op {op!r}")
    left, right = (node_from_dict(c) for c in d["children"])
    return Node(op, float(d["joint_step"]), left, right)


def schedule_to_dict(h: Schedule, metadata: Optional[dict] = None) -> dict:
    """Serializable record of ``h`` with its bound constants and construction tree."""
    C = bound_constant(h.total)
    obj = C if h.kind in (Kind.PRIMITIVE, Kind.DOMINANT) else None
    grad = C if h.kind is Kind.GBOUNDED else None
    out = {
        "format_version": FORMAT_VERSION,
        "n": len(h),
        "kind": h.kind.value,
        "steps": h.tolist(),
        "sum": h.total,
        "objective_constant": obj,
        "gradient_constant": grad,
        "construction": node_to_dict(h.provenance) if h.provenance is not None else None,
    }
    if metadata:
        out.update(metadata)
    return out


def schedule_from_dict(d: dict) -> Schedule:
    if d.get("format_version") != FORMAT_VERSION:
        raise ScheduleFileError(f"unsupported format_version {d.get('format_version')!r}")
    steps = np.asarray([float(v) for v in d["steps"]], dtype=float)
    if len(steps) != d["n"]:
        raise ScheduleFileError(f"n={d['n']} but {len(steps)} steps stored")
    total = math.fsum(steps)
    if abs(total - float(d["sum"])) > SUM_ATOL * max(1.0, abs(total)):
        raise ScheduleFileError(f"stored sum {d['sum']!r} does not match steps ({total!r})")
    prov = None
    if d.get("construction") is not None:
        prov = node_from_dict(d["construction"])
        if prov.flatten() != steps.tolist():
            raise ScheduleFileError("construction tree does not reproduce the stored steps")
    return Schedule(steps, Kind(d["kind"]), prov)


def dumps(h: Schedule, metadata: Optional[dict] = None) -> str:
    return json.dumps(schedule_to_dict(h, metadata), indent=1, allow_nan=False)


def loads(text: str) -> Schedule:
    return schedule_from_dict(json.loads(text))


def write_schedule(path: Union[str, os.PathLike], h: Schedule, metadata: Optional[dict] = None) -> dict:
    d = schedule_to_dict(h, metadata)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(d, fh, indent=1, allow_nan=False)
        fh.write("\n")
    return d


def read_schedule(path: Union[str, os.PathLike]) -> Schedule:
    with open(path, encoding="utf-8") as fh:
        return schedule_from_dict(json.load(fh))
