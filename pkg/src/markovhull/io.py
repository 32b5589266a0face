"""Canonical JSON for path spaces, path measures and group files.

Serialization is deterministic: object keys are sorted, atoms appear in
lexicographic order of their state sequences, and exact weights are written
as lowest-terms ``"p/q"`` strings.  ``dumps(loads(text)) == text`` for any
text produced by :func:`dumps_measure`.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Union

from .errors import FormatError, MarkovHullError
from .groups import FiniteGroup
from .measures import EXACT, MODES, PathMeasure, coerce_weight
from .paths import PathSpace, StateSpace, TimeGrid
from .rational import as_fraction, format_rational

PathLike = Union[str, os.PathLike]


def _weight_out(w, mode: str):
    return format_rational(w) if mode == EXACT else float(w)


def space_to_json(space: PathSpace) -> dict:
    out: dict = {
        "grid": [format_rational(t) for t in space.grid.points],
        "states": list(space.states.labels),
        "cyclic": space.cyclic,
    }
    if space.states.metric is not None:
        out["metric"] = [[format_rational(d) for d in row] for row in space.states.metric]
    if space.step_bound is not None:
        out["step_bound"] = format_rational(space.step_bound)
    return out


def space_from_json(data: Any) -> PathSpace:
    if not isinstance(data, dict):
        raise FormatError("path space must be a JSON object")
    try:
        grid = TimeGrid(tuple(as_fraction(t) for t in data["grid"]))
        metric = data.get("metric")
        states = StateSpace(tuple(data["states"]), None if metric is None else tuple(tuple(r) for r in metric))
        bound = data.get("step_bound")
        return PathSpace(grid, states, None if bound is None else as_fraction(bound), bool(data.get("cyclic", False)))
    except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"invalid path space: {exc}") from exc


def measure_to_json(m: PathMeasure) -> dict:
    labels = m.space.states.labels
    return {
        "space": space_to_json(m.space),
        "mode": m.mode,
        "atoms": [{"path": [labels[s] for s in p], "weight": _weight_out(w, m.mode)} for p, w in m.items()],
    }


def measure_from_json(data: Any) -> PathMeasure:
    if not isinstance(data, dict):
        raise FormatError("measure must be a JSON object")
    space = space_from_json(data.get("space"))
    mode = data.get("mode", EXACT)
    if mode not in MODES:
        raise FormatError(f"unknown arithmetic mode {mode!r}")
    atoms = []
    try:
        for entry in data["atoms"]:
            path = tuple(space.states.index(lbl) for lbl in entry["path"])
            w = entry["weight"]
            if mode == EXACT and isinstance(w, float):
                raise FormatError("exact-mode weights must be integers or 'p/q' strings")
            w = coerce_weight(w, mode)
            if w < 0:
                raise FormatError(f"negative weight {entry['weight']!r} on path {entry['path']}")
            atoms.append((path, w))
        return PathMeasure(space, atoms, mode)
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError, ZeroDivisionError, MarkovHullError) as exc:
        raise FormatError(f"invalid measure: {exc}") from exc


def dumps(data: dict) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def dumps_measure(m: PathMeasure) -> str:
    return dumps(measure_to_json(m))


def loads_measure(text: str) -> PathMeasure:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from exc
    return measure_from_json(data)


def write_atomic(path: PathLike, text: str) -> None:
    """Write to a temporary file in the target directory, then rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def save_measure(m: PathMeasure, path: PathLike) -> None:
    write_atomic(path, dumps_measure(m))


def load_measure(path: PathLike) -> PathMeasure:
    return loads_measure(Path(path).read_text(encoding="utf-8"))


def load_group(path: PathLike) -> FiniteGroup:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"group file is not valid JSON: {exc}") from exc
    return FiniteGroup.from_json(data)


def save_group(group: FiniteGroup, path: PathLike) -> None:
    write_atomic(path, dumps(group.to_json()))


def parse_space_spec(text: str) -> PathSpace:
    """``"<states>x<times>"`` with an optional ``":cyclic"`` suffix, or a JSON file path."""
    spec = text.strip()
    head, _, flag = spec.partition(":")
    if "x" in head and all(part.isdigit() for part in head.split("x", 1)):
        if flag not in ("", "cyclic"):
            raise FormatError(f"unknown space flag {flag!r}")
        s, t = (int(v) for v in head.split("x", 1))
        try:
            return PathSpace.simple(s, t, cyclic=flag == "cyclic")
        except ValueError as exc:
            raise FormatError(str(exc)) from exc
    p = Path(spec)
    if not p.is_file():
        raise FormatError(f"space spec {text!r} is neither '<states>x<times>[:cyclic]' nor a file")
    try:
        return space_from_json(json.loads(p.read_text(encoding="utf-8")))
    except json.JSONDecodeError as exc:
        raise FormatError(f"space file is not valid JSON: {exc}") from exc
