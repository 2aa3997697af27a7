"""Report serialization: canonical JSON, CSV tables, JSON-lines streams, timing sidecars."""
from __future__ import annotations

import csv
import hashlib
import json
import time
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Optional, Sequence

from . import __version__

SCHEMA_VERSION = 1


def _default(o):
    if isinstance(o, Fraction):
        return str(o)
    if hasattr(o, "to_json"):
        return o.to_json()
    if isinstance(o, (set, frozenset)):
        return sorted(o)
    try:
        import numpy as np
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
    except ImportError:  # pragma: no cover
        pass
    if isinstance(o, float):
        return repr(o)
    raise TypeError(f"cannot serialize {type(o).__name__}")


def canonical_json(obj, indent: Optional[int] = 2) -> str:
    return json.dumps(obj, sort_keys=True, indent=indent, default=_default, ensure_ascii=True,
                      separators=(",", ": ") if indent else (",", ":")) + "\n"


def spec_hash(spec: dict) -> str:
    return hashlib.sha256(canonical_json(spec, None).encode()).hexdigest()


def envelope(command: str, spec: dict, result: dict, ok: bool) -> dict:
    return {
        "schema": SCHEMA_VERSION,
        "tool": {"name": "collinear", "version": __version__},
        "command": command,
        "spec": spec,
        "spec_hash": spec_hash(spec),
        "ok": bool(ok),
        "result": result,
    }


def write_report(report: dict, path: Optional[str], started: Optional[float] = None) -> str:
    text = canonical_json(report)
    if path:
        Path(path).write_text(text)
        meta = {"report": Path(path).name, "spec_hash": report.get("spec_hash"),
                "written_at": time.strftime("%Y-%m-%dT%H:%M:%S%z")}
        if started is not None:
            meta["elapsed_seconds"] = f"{time.time() - started:.3f}"
        Path(str(path) + ".meta.json").write_text(canonical_json(meta))
    return text


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([str(x) for x in row])


def write_jsonl(path: str, records: Iterable) -> int:
    n = 0
    with open(path, "w") as fh:
        for rec in records:
            fh.write(canonical_json(rec, None))
            n += 1
    return n
