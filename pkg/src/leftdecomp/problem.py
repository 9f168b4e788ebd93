"""JSON problem files and report encoding.

Complex numbers are ``[re, im]`` pairs.  Matrices are row-major lists of
rows with ``entry (i, j) = t(e_i, e_j)``.  Example::

    {
      "schema": 1,
      "dimension": 2,
      "form_t": [[[-1, 0], [0, 0]], [[0, 0], [1, 0]]],
      "form_w": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]],
      "pair": {"preset": "identity"}
    }

Optional keys: ``form_s`` (for ``psd-decompose``), ``vector`` (for
``witness``), ``tolerance`` (``rank_rel`` / ``cert_abs``) and ``measure``
(``atoms``, ``mu``, ``nu``).
"""

from __future__ import annotations

import json
import numbers
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .errors import InvalidInputError

SCHEMA_VERSION = 1
CONVENTION = "entry (i, j) = t(e_i, e_j); complex numbers encoded as [re, im]"
PAIR_PRESETS = ("identity", "polar")


class ProblemError(InvalidInputError):
    """Structural problem in an input file; ``where`` locates it."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class PairSpec:
    preset: Optional[str] = "identity"
    s1: Optional[np.ndarray] = None
    s2: Optional[np.ndarray] = None

    @property
    def explicit(self) -> bool:
        return self.preset is None


@dataclass
class MeasureProblem:
    atoms: list
    mu: np.ndarray
    nu: np.ndarray


@dataclass
class ProblemFile:
    dimension: Optional[int] = None
    form_t: Optional[np.ndarray] = None
    form_w: Optional[np.ndarray] = None
    form_s: Optional[np.ndarray] = None
    pair: Optional[PairSpec] = None
    vector: Optional[np.ndarray] = None
    tolerance: dict = field(default_factory=dict)
    measure: Optional[MeasureProblem] = None


# -- decoding ----------------------------------------------------------------

def _number(x, where) -> float:
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise ProblemError(f"expected a number, got {type(x).__name__}", where)
    value = float(x)
    if not np.isfinite(value):
        raise ProblemError("number must be finite", where)
    return value


def decode_complex(x, where: str = "") -> complex:
    if not isinstance(x, list) or len(x) != 2:
        raise ProblemError("complex entry must be a [re, im] pair", where)
    return complex(_number(x[0], f"{where}[0]"), _number(x[1], f"{where}[1]"))


def decode_vector(x, where: str, length: Optional[int] = None) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ProblemError("expected a non-empty list of [re, im] pairs", where)
    if length is not None and len(x) != length:
        raise ProblemError(f"expected {length} entries, got {len(x)}", where)
    return np.array([decode_complex(z, f"{where}[{i}]") for i, z in enumerate(x)], dtype=complex)


def decode_matrix(x, where: str, dimension: int) -> np.ndarray:
    if not isinstance(x, list):
        raise ProblemError("expected a list of rows", where)
    if len(x) != dimension:
        raise ProblemError(f"expected {dimension} rows, got {len(x)}", where)
    rows = []
    for i, row in enumerate(x):
        if not isinstance(row, list):
            raise ProblemError("row must be a list", f"{where}[{i}]")
        rows.append(decode_vector(row, f"{where}[{i}]", dimension))
    return np.array(rows, dtype=complex)


def _load_json(data) -> Any:
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ProblemError(f"input is not valid UTF-8 ({exc.reason} at byte {exc.start})") from None
    try:
        return json.loads(data)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"malformed JSON: {exc.msg}", f"line {exc.lineno}, column {exc.colno}") from None


def parse_problem(data) -> ProblemFile:
    """Parse and structurally validate a problem file (bytes or str).

    Raises
    ------
    ProblemError
        With a line/column location for JSON syntax errors, or a field path
        such as ``form_t[1][0]`` for structural errors.
    """
    doc = _load_json(data)
    if not isinstance(doc, dict):
        raise ProblemError("top level must be a JSON object")
    schema = doc.get("schema", SCHEMA_VERSION)
    if schema != SCHEMA_VERSION:
        raise ProblemError(f"unsupported schema {schema!r} (expected {SCHEMA_VERSION})", "schema")

    problem = ProblemFile()
    has_matrices = any(k in doc for k in ("form_t", "form_w", "form_s", "vector")) or (
        isinstance(doc.get("pair"), dict) and ("s1" in doc["pair"] or "s2" in doc["pair"])
    )
    if "dimension" in doc or has_matrices:
        dim = doc.get("dimension")
        if isinstance(dim, bool) or not isinstance(dim, int) or dim < 1:
            raise ProblemError("must be a positive integer", "dimension")
        problem.dimension = dim
        for key in ("form_t", "form_w", "form_s"):
            if key in doc:
                setattr(problem, key, decode_matrix(doc[key], key, dim))
        if "vector" in doc:
            problem.vector = decode_vector(doc["vector"], "vector", dim)

    if "pair" in doc:
        problem.pair = _parse_pair(doc["pair"], problem.dimension)

    if "tolerance" in doc:
        tol = doc["tolerance"]
        if not isinstance(tol, dict):
            raise ProblemError("must be an object", "tolerance")
        for key, value in tol.items():
            if key not in ("rank_rel", "cert_abs"):
                raise ProblemError(f"unknown tolerance key {key!r}", "tolerance")
            v = _number(value, f"tolerance.{key}")
            if v <= 0:
                raise ProblemError("must be positive", f"tolerance.{key}")
            problem.tolerance[key] = v

    if "measure" in doc:
        problem.measure = _parse_measure(doc["measure"])
    return problem


def _parse_pair(pair, dimension) -> PairSpec:
    if not isinstance(pair, dict):
        raise ProblemError("must be an object", "pair")
    if "preset" in pair:
        if pair["preset"] not in PAIR_PRESETS:
            raise ProblemError(f"preset must be one of {PAIR_PRESETS}", "pair.preset")
        if "s1" in pair or "s2" in pair:
            raise ProblemError("give either a preset or explicit s1/s2, not both", "pair")
        return PairSpec(preset=pair["preset"])
    if "s1" not in pair or "s2" not in pair:
        raise ProblemError("explicit pair needs both s1 and s2", "pair")
    return PairSpec(
        preset=None,
        s1=decode_matrix(pair["s1"], "pair.s1", dimension),
        s2=decode_matrix(pair["s2"], "pair.s2", dimension),
    )


def _parse_measure(m) -> MeasureProblem:
    if not isinstance(m, dict):
        raise ProblemError("must be an object", "measure")
    for key in ("atoms", "mu", "nu"):
        if key not in m:
            raise ProblemError(f"missing {key!r}", "measure")
    atoms = m["atoms"]
    if not isinstance(atoms, list) or not atoms or not all(isinstance(a, str) for a in atoms):
        raise ProblemError("must be a non-empty list of strings", "measure.atoms")
    if len(set(atoms)) != len(atoms):
        raise ProblemError("atom labels must be unique", "measure.atoms")
    mu = decode_vector(m["mu"], "measure.mu", len(atoms))
    nu = decode_vector(m["nu"], "measure.nu", len(atoms))
    return MeasureProblem(atoms=list(atoms), mu=mu, nu=nu)


# -- encoding ----------------------------------------------------------------

def encode_complex(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def encode_vector(v) -> list:
    return [encode_complex(z) for z in np.asarray(v).reshape(-1)]


def encode_matrix(m) -> list:
    return [encode_vector(row) for row in np.asarray(m)]


def dump_problem(problem: ProblemFile) -> dict:
    """Inverse of :func:`parse_problem` (as a JSON-ready dict)."""
    doc: dict = {"schema": SCHEMA_VERSION}
    if problem.dimension is not None:
        doc["dimension"] = problem.dimension
    for key in ("form_t", "form_w", "form_s"):
        value = getattr(problem, key)
        if value is not None:
            doc[key] = encode_matrix(value)
    if problem.vector is not None:
        doc["vector"] = encode_vector(problem.vector)
    if problem.pair is not None:
        if problem.pair.explicit:
            doc["pair"] = {"s1": encode_matrix(problem.pair.s1), "s2": encode_matrix(problem.pair.s2)}
        else:
            doc["pair"] = {"preset": problem.pair.preset}
    if problem.tolerance:
        doc["tolerance"] = dict(problem.tolerance)
    if problem.measure is not None:
        doc["measure"] = {
            "atoms": list(problem.measure.atoms),
            "mu": encode_vector(problem.measure.mu),
            "nu": encode_vector(problem.measure.nu),
        }
    return doc
