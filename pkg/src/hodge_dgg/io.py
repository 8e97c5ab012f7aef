"""Complex files (JSON) and CSV / JSON / MatrixMarket exports."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .complex import EMPTY, ComplexError, WeightedComplex, as_face, build_complex, face_label
from .heat import HeatState, SpectralData
from .metrics import MetricTable
from .operators import SparseOperator

FILE_KEYS = {"name", "reduced", "weight_policy", "faces"}
FACE_KEYS = {"vertices", "weight"}


class ComplexFileError(ValueError):
    pass


def fmt(x) -> str:
    """17 significant digits; ``inf``/``-inf``/``nan`` spelled out."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return "%.17g" % x


@dataclass
class ComplexFile:
    faces: list[tuple[list[int], float | None]]
    name: str = ""
    reduced: bool = True
    weight_policy: str = "unit"

    @classmethod
    def from_json(cls, text: str) -> "ComplexFile":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ComplexFileError(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(doc, dict):
            raise ComplexFileError("complex file must be a JSON object")
        unknown = set(doc) - FILE_KEYS
        if unknown:
            raise ComplexFileError(f"unknown keys {sorted(unknown)}")
        if "faces" not in doc or not isinstance(doc["faces"], list):
            raise ComplexFileError("field 'faces' must be a list")
        name = doc.get("name", "")
        if not isinstance(name, str):
            raise ComplexFileError("field 'name' must be a string")
        reduced = doc.get("reduced", True)
        if not isinstance(reduced, bool):
            raise ComplexFileError("field 'reduced' must be a boolean")
        policy = doc.get("weight_policy", "unit")
        if policy not in ("unit", "explicit", "normalized"):
            raise ComplexFileError(f"field 'weight_policy' must be unit, explicit or normalized, got {policy!r}")
        faces = []
        for k, entry in enumerate(doc["faces"]):
            where = f"faces[{k}]"
            if not isinstance(entry, dict):
                raise ComplexFileError(f"{where} must be an object with 'vertices'")
            unknown = set(entry) - FACE_KEYS
            if unknown:
                raise ComplexFileError(f"{where}: unknown keys {sorted(unknown)}")
            verts = entry.get("vertices")
            if not isinstance(verts, list) or any(isinstance(v, bool) or not isinstance(v, int) for v in verts):
                raise ComplexFileError(f"{where}: 'vertices' must be an array of integers")
            weight = entry.get("weight")
            if weight is not None:
                if isinstance(weight, bool) or not isinstance(weight, (int, float)):
                    raise ComplexFileError(f"{where} {verts}: weight must be a number")
                if not (weight > 0 and math.isfinite(weight)):
                    raise ComplexFileError(f"{where} {verts}: weight must be positive, got {weight}")
            faces.append((verts, weight))
        return cls(faces, name, reduced, policy)

    def to_json(self) -> str:
        faces = []
        for verts, weight in self.faces:
            item = {"vertices": list(verts)}
            if weight is not None:
                item["weight"] = weight
            faces.append(item)
        doc = {"name": self.name, "reduced": self.reduced, "weight_policy": self.weight_policy, "faces": faces}
        return json.dumps(doc, indent=2) + "\n"

    def build(self) -> WeightedComplex:
        try:
            return build_complex(self.faces, policy=self.weight_policy, reduced=self.reduced, name=self.name)
        except ComplexError as exc:
            raise ComplexFileError(str(exc)) from None

    @classmethod
    def from_complex(cls, K: WeightedComplex) -> "ComplexFile":
        """Explicit-weight file listing every face of ``K``."""
        faces = [(list(F), K.weight(F)) for F in K]
        return cls(faces, K.name, K.reduced, "explicit")


def parse_complex(source) -> WeightedComplex:
    """Build a complex from a path or from JSON text."""
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith(("{", "["))):
        path = Path(source)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ComplexFileError(f"cannot read {path}: {exc.strerror}") from None
    else:
        text = source
    return ComplexFile.from_json(text).build()


def parse_face_set(spec: str) -> list:
    """Brace-delimited faces, e.g. ``"{0,1};{1,2}"``; ``{}`` is the empty face."""
    out = []
    depth_start = None
    for k, ch in enumerate(spec):
        if ch == "{":
            if depth_start is not None:
                raise ValueError(f"nested braces in face set {spec!r}")
            depth_start = k
        elif ch == "}":
            if depth_start is None:
                raise ValueError(f"unbalanced braces in face set {spec!r}")
            body = spec[depth_start + 1:k].strip()
            try:
                verts = [int(x) for x in body.split(",")] if body else []
            except ValueError:
                raise ValueError(f"bad face {{{body}}} in {spec!r}") from None
            out.append(as_face(verts) if verts else EMPTY)
            depth_start = None
    if depth_start is not None:
        raise ValueError(f"unbalanced braces in face set {spec!r}")
    if not out:
        raise ValueError(f"no faces in {spec!r}")
    return out


def operator_to_matrix_market(op: SparseOperator) -> str:
    lines = ["%%MatrixMarket matrix coordinate real general"]
    lines.append("% rows: " + " ".join(face_label(F) for F in op.row_faces))
    lines.append("% cols: " + " ".join(face_label(F) for F in op.col_faces))
    lines.append(f"{op.shape[0]} {op.shape[1]} {op.nnz}")
    for r, c, v in zip(op.rows, op.cols, op.values):
        lines.append(f"{r + 1} {c + 1} {fmt(v)}")
    return "\n".join(lines) + "\n"


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def metric_table_to_csv(table: MetricTable) -> str:
    labels = [face_label(F) for F in table.faces]
    rows = [["face"] + labels]
    for F, row in zip(labels, table.dist):
        rows.append([F] + [fmt(x) for x in row])
    return _csv(rows)


def heat_state_to_csv(K: WeightedComplex, state: HeatState) -> str:
    rows = [["face", "value"]]
    rows += [[face_label(F), fmt(v)] for F, v in zip(K.faces(state.dim), state.values)]
    return _csv(rows)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return _Num(fmt(obj))
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    return obj


class _Num(str):
    pass


def to_json(obj) -> str:
    """JSON with every float written to 17 significant digits (non-finite as strings)."""
    tokens: list[str] = []

    def swap(o):
        if isinstance(o, _Num):
            if o in ("inf", "-inf", "nan"):
                return str(o)
            tokens.append(str(o))
            return f"\x00{len(tokens) - 1}\x00"
        if isinstance(o, dict):
            return {k: swap(v) for k, v in o.items()}
        if isinstance(o, list):
            return [swap(v) for v in o]
        return o

    text = json.dumps(swap(_jsonable(obj)), indent=2)
    for k, tok in enumerate(tokens):
        text = text.replace(f'"\\u0000{k}\\u0000"', tok)
    return text + "\n"


def spectral_to_json(data: SpectralData) -> str:
    return to_json(data.to_dict())


def reports_to_csv(reports) -> str:
    dicts = [r.to_dict() for r in reports]
    if not dicts:
        return ""
    keys = list(dicts[0])
    rows = [keys]
    for d in dicts:
        row = []
        for k in keys:
            v = d.get(k)
            if isinstance(v, bool):
                row.append(str(v).lower())
            elif isinstance(v, float):
                row.append(fmt(v))
            elif isinstance(v, list):
                row.append(";".join(v))
            else:
                row.append(v)
        rows.append(row)
    return _csv(rows)
