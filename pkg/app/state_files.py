"""
JSON files for states, pure states and factorizations.

Complex entries are stored as [re, im] pairs. Floats go through json's
shortest round-trip repr, so write-then-read reproduces every entry exactly.
"""
import json
import os
from dataclasses import dataclass
from enum import Enum

import numpy as np

from app.factorization import Factorization, TpsReport
from app.linalg import ComplexMatrix
from app.states import DensityMatrix, PureState


@dataclass(frozen=True)
class StateFile:
    dims: tuple[int, int]
    matrix: ComplexMatrix
    label: str | None = None

    def to_density(self) -> DensityMatrix:
        return DensityMatrix(self.matrix, self.dims)


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def encode_vector(v) -> list[list[float]]:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list[list[list[float]]]:
    return [encode_vector(row) for row in np.asarray(m)]


def _decode_entry(entry, where: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise ValueError(f"Malformed complex entry at {where}: expected [re, im], got {entry!r}")
    return complex(float(entry[0]), float(entry[1]))


def decode_vector(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ValueError("Malformed vector: expected a non-empty list of [re, im] pairs")
    return np.array([_decode_entry(e, f"[{i}]") for i, e in enumerate(rows)], dtype=complex)


def decode_matrix(rows) -> ComplexMatrix:
    if not isinstance(rows, list) or not rows:
        raise ValueError("Malformed matrix: expected a non-empty list of rows")
    n = len(rows)
    out = np.zeros((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise ValueError(f"Malformed matrix: row {i} does not have {n} entries")
        for j, entry in enumerate(row):
            out[i, j] = _decode_entry(entry, f"[{i}][{j}]")
    return out


def _decode_dims(raw) -> tuple[int, int]:
    if (
        not isinstance(raw, list)
        or len(raw) != 2
        or not all(isinstance(x, int) and not isinstance(x, bool) and x > 0 for x in raw)
    ):
        raise ValueError(f"Malformed dims: expected two positive integers, got {raw!r}")
    return raw[0], raw[1]


def _load(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as f:
        doc = json.load(f)
    if not isinstance(doc, dict):
        raise ValueError(f"{path}: expected a JSON object at the top level")
    return doc


def _save(path: str, doc: dict):
    folder = os.path.dirname(path)
    if folder:
        os.makedirs(folder, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(doc))


def parse_state_doc(doc: dict) -> StateFile:
    if "dims" not in doc or "matrix" not in doc:
        raise ValueError("State file needs 'dims' and 'matrix'")
    label = doc.get("label")
    if label is not None and not isinstance(label, str):
        raise ValueError("State file 'label' must be a string")
    return StateFile(dims=_decode_dims(doc["dims"]), matrix=decode_matrix(doc["matrix"]), label=label)


def read_state_file(path: str) -> StateFile:
    return parse_state_doc(_load(path))


def state_doc(rho: DensityMatrix | StateFile, label: str | None = None) -> dict:
    doc = {"dims": list(rho.dims), "matrix": encode_matrix(rho.matrix)}
    label = label if label is not None else getattr(rho, "label", None)
    if label is not None:
        doc["label"] = label
    return doc


def write_state_file(path: str, rho: DensityMatrix | StateFile, label: str | None = None):
    _save(path, state_doc(rho, label))


def read_pure_file(path: str) -> PureState:
    doc = _load(path)
    if "dims" not in doc or "amplitudes" not in doc:
        raise ValueError("Pure-state file needs 'dims' and 'amplitudes'")
    return PureState(decode_vector(doc["amplitudes"]), _decode_dims(doc["dims"]))


def write_pure_file(path: str, psi: PureState, label: str | None = None):
    doc = {"dims": list(psi.dims), "amplitudes": encode_vector(psi.amplitudes)}
    if label is not None:
        doc["label"] = label
    _save(path, doc)


def factorization_doc(
    factorization: Factorization,
    generators_a,
    generators_b,
    report: TpsReport | None = None,
    schmidt: np.ndarray | None = None,
) -> dict:
    doc = {
        "dims": list(factorization.dims),
        "unitary": encode_matrix(factorization.u),
        "generators_a": {n: encode_matrix(g) for n, g in zip("xyz", generators_a)},
        "generators_b": {n: encode_matrix(g) for n, g in zip("xyz", generators_b)},
    }
    if schmidt is not None:
        doc["schmidt_coefficients"] = [float(x) for x in schmidt]
    if report is not None:
        doc["checks"] = {
            "max_commutator": report.max_commutator,
            "span_dim": report.span_dim,
            "expected_span": report.dim * report.dim,
            "independent": report.independent,
            "complete": report.complete,
        }
    return doc


def to_jsonable(obj):
    """Convert numpy values and enums inside a report to plain JSON types."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        if np.iscomplexobj(obj):
            return to_jsonable(obj.tolist())
        return obj.tolist()
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def dumps(doc) -> str:
    return json.dumps(to_jsonable(doc), ensure_ascii=False, indent=2) + "\n"
