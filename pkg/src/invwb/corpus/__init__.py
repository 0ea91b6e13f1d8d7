"""The bundled corpus of annotated algorithms.

Each entry is one ``.inv`` file plus metadata in ``index.json``: a
title, the input policy for every routine, and which routine inference
targets.  Set ``INVWB_CORPUS_DIR`` to load a different directory with
the same layout.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, Optional

from ..errors import ConfigError, UnknownEntry
from ..parser import parse_routines
from ..program import Routine

DATA = Path(__file__).resolve().parent / "data"


@dataclass
class Entry:
    id: str
    title: str
    path: Path
    text: str
    routines: Dict[str, Routine]
    inputs: Dict[str, dict]
    infer: str
    designated: bool = False
    note: Optional[str] = None

    @property
    def routine(self) -> Routine:
        """The routine inference works on (the first one otherwise)."""
        return self.routines[self.infer]

    def get_routine(self, name: Optional[str] = None) -> Routine:
        if name is None:
            return self.routine
        if name not in self.routines:
            raise UnknownEntry(f"entry {self.id} has no routine {name!r} "
                               f"(has {', '.join(self.routines)})")
        return self.routines[name]

    def policy(self, name: Optional[str] = None) -> dict:
        return self.inputs[self.get_routine(name).name]


def corpus_dir() -> Path:
    env = os.environ.get("INVWB_CORPUS_DIR")
    return Path(env) if env else DATA


@lru_cache(maxsize=8)
def _index(directory: str) -> dict:
    path = Path(directory) / "index.json"
    try:
        return json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"no corpus index at {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"corpus index {path} is not valid JSON: {exc}") from None


@lru_cache(maxsize=64)
def _load(directory: str, entry_id: str) -> Entry:
    index = _index(directory)
    for meta in index["entries"]:
        if meta["id"] == entry_id:
            break
    else:
        deferred = index.get("deferred", {})
        if entry_id in deferred:
            raise UnknownEntry(f"unknown entry {entry_id!r}: {deferred[entry_id]}")
        raise UnknownEntry(f"unknown entry {entry_id!r}; try 'invwb corpus list'")
    path = Path(directory) / meta["file"]
    text = path.read_text()
    routines = {r.name: r for r in parse_routines(text)}
    return Entry(meta["id"], meta.get("title", meta["id"]), path, text, routines,
                 meta.get("inputs", {}), meta.get("infer", next(iter(routines))),
                 bool(meta.get("designated", False)), meta.get("note"))


def ids() -> List[str]:
    return [m["id"] for m in _index(str(corpus_dir()))["entries"]]


def get(entry_id: str) -> Entry:
    return _load(str(corpus_dir()), entry_id)


def load_corpus() -> List[Entry]:
    return [get(i) for i in ids()]


def designated() -> List[Entry]:
    return [e for e in load_corpus() if e.designated]
