"""On-disk formats: dataset and state documents (JSON), trace and result CSVs.

Documents are written by a small canonical serializer rather than ``json.dump``
so that key order and float text are fixed: every float is printed as its
shortest round-tripping repr, which recovers the exact double.  Reading a
file and writing it back therefore reproduces it byte for byte.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .data import MultiViewDataset
from .errors import ValidationError

DATASET_FORMAT = "animc-dataset/1"
STATE_FORMAT = "animc-state/1"


def fmt_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValidationError(f"cannot serialize non-finite value {x!r}")
    return repr(x)


def _scalar(x: Any) -> str:
    if x is None:
        return "null"
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return fmt_float(x)
    if isinstance(x, str):
        return json.dumps(x, ensure_ascii=False)
    raise TypeError(f"unsupported value of type {type(x).__name__}")


def _flat(seq) -> bool:
    return all(not isinstance(v, (list, tuple, dict, np.ndarray)) for v in seq)


def dumps(obj: Any, indent: int = 0) -> str:
    """Serialize nested dicts/lists/arrays; flat lists stay on one line."""
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if _flat(obj):
            return "[" + ", ".join(_scalar(v) for v in obj) + "]"
        return "[\n" + ",\n".join(inner + dumps(v, indent + 1) for v in obj) + "\n" + pad + "]"
    return _scalar(obj)


def write_document(path, obj: dict) -> None:
    Path(path).write_text(dumps(obj) + "\n", encoding="utf-8")


def read_document(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path}: top level must be an object")
    return doc


# ---------------------------------------------------------------- dataset


def dataset_to_doc(ds: MultiViewDataset) -> dict:
    doc = {"format": DATASET_FORMAT, "name": ds.name, "n": ds.n, "c": ds.c}
    if ds.labels is not None:
        doc["labels"] = [int(v) for v in ds.labels]
    doc["views"] = [
        {"name": x.name, "d": x.d, "present": [int(v) for v in mk.g], "data": x.data}
        for x, mk in ds.views
    ]
    return doc


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ValidationError(f"{where}: missing field {key!r}")
    return doc[key]


def dataset_from_doc(doc: dict) -> MultiViewDataset:
    if doc.get("format", DATASET_FORMAT) != DATASET_FORMAT:
        raise ValidationError(f"unsupported dataset format {doc.get('format')!r}")
    n = int(_require(doc, "n", "dataset"))
    c = int(_require(doc, "c", "dataset"))
    Xs, gs, names = [], [], []
    for v, view in enumerate(_require(doc, "views", "dataset")):
        where = f"view {v}"
        d = int(_require(view, "d", where))
        X = np.asarray(_require(view, "data", where), dtype=float)
        g = np.asarray(_require(view, "present", where), dtype=float)
        if X.shape != (d, n):
            raise ValidationError(f"{where}: data has shape {X.shape}, expected {(d, n)}")
        if g.shape != (n,) or not np.all((g == 0) | (g == 1)):
            raise ValidationError(f"{where}: present must be n values in {{0, 1}}")
        if np.any(X[:, g == 0] != 0):
            raise ValidationError(f"{where}: absent instances must have zero columns")
        Xs.append(X)
        gs.append(g)
        names.append(str(view.get("name", f"view{v}")))
    labels = doc.get("labels")
    return MultiViewDataset.from_arrays(Xs, c, gs=gs, labels=labels, names=names,
                                        name=str(doc.get("name", "dataset")))


def write_dataset(path, ds: MultiViewDataset) -> None:
    write_document(path, dataset_to_doc(ds))


def read_dataset(path) -> MultiViewDataset:
    return dataset_from_doc(read_document(path))


# ------------------------------------------------------------------ state


def write_state(path, algo: str, V, U: Sequence, A: Optional[Sequence] = None,
                w=None, label_mode: str = "kmeans", seed: int = 0) -> None:
    doc = {
        "format": STATE_FORMAT,
        "algo": algo,
        "n": int(np.shape(V)[0]),
        "c": int(np.shape(V)[1]),
        "label_mode": label_mode,
        "seed": int(seed),
        "V": np.asarray(V),
        "U": [np.asarray(u) for u in U],
        "A": None if A is None else [np.asarray(a) for a in A],
        "w": None if w is None else [float(x) for x in w],
    }
    write_document(path, doc)


def read_state(path) -> dict:
    doc = read_document(path)
    if doc.get("format") != STATE_FORMAT:
        raise ValidationError(f"{path}: not a state file")
    doc["V"] = np.asarray(doc["V"], dtype=float).reshape(doc["n"], doc["c"])
    doc["U"] = [np.asarray(u, dtype=float) for u in doc["U"]]
    if doc.get("A") is not None:
        doc["A"] = [np.asarray(a, dtype=float) for a in doc["A"]]
    return doc


# -------------------------------------------------------------------- csv


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return fmt_float(x) if math.isfinite(x) else ""
    return str(x)


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([_cell(x) for x in row])


def read_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def trace_rows(iterations, objective, r_objective, weights, m: int) -> tuple[list, list]:
    """Header and rows of a trace CSV; missing weight or r-objective cells stay blank."""
    header = ["iter", "objective", "r_objective"] + [f"w_{v + 1}" for v in range(m)]
    rows = []
    for i, it in enumerate(iterations):
        ro = r_objective[i] if r_objective is not None else None
        w = list(weights[i]) if weights is not None else [None] * m
        rows.append([it, float(objective[i]), ro] + w)
    return header, rows
