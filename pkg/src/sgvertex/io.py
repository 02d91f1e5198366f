"""Deterministic file output: atomic writes, config hashes, CSV/JSON schemas.

Every artifact embeds the run's config hash and the package version so a
report can be traced back to its exact inputs; identical config and seed
reproduce byte-identical files (sorted keys, shortest-roundtrip floats,
no timestamps).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
from pathlib import Path

from . import __version__
from .basis import SectorOperator


def config_hash(config: dict) -> str:
    """sha256 over the canonical key=value rendering of a flat config."""
    canon = "\n".join(f"{k}={config[k]!r}" for k in sorted(config))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def atomic_write_text(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def _jsonable(obj):
    """Recursively convert numpy scalars/arrays to plain Python types."""
    import numpy as np

    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    return obj


def dump_json(path: Path, payload: dict) -> None:
    atomic_write_text(
        Path(path), json.dumps(_jsonable(payload), sort_keys=True, indent=1) + "\n"
    )


def dump_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(x) if isinstance(x, float) else x for x in row])
    atomic_write_text(Path(path), buf.getvalue())


def operator_to_files(
    op: SectorOperator,
    stem: Path,
    params_dict: dict,
    convention: dict | None = None,
    tol: float = 0.0,
) -> list[str]:
    """Write <stem>.csv (row,col,re,im triplets) and <stem>.json descriptor."""
    stem = Path(stem)
    dump_csv(stem.with_suffix(".csv"), ["row", "col", "re", "im"], op.to_triplets(tol))
    descriptor = {
        "L": op.basis.L,
        "M": op.basis.M,
        "eta": params_dict.get("eta"),
        "theta": params_dict.get("theta"),
        "dim": op.dim,
        "convention": convention or {},
        "version": __version__,
    }
    dump_json(stem.with_suffix(".json"), descriptor)
    return [str(stem.with_suffix(".csv")), str(stem.with_suffix(".json"))]
