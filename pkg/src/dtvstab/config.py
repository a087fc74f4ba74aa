"""JSON configuration for the command line, and JSON-safe serialization helpers.

Example::

    {
      "schema_version": 1,
      "dimension": 1,
      "prefix": [],
      "tail": {"type": "constant", "matrix": [[[0.5, 0.0]]]},
      "space": {"type": "c0"},
      "truncation": {"schedule": [16, 32, 64, 128]},
      "tolerance": 1e-6,
      "seed": 42
    }

Complex entries are ``[re, im]`` pairs; bare numbers are read as real.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, StabilityError
from .family import ConstantTail, GeneratorSpec, PeriodicTail
from .sequences import SpaceSpec

SCHEMA_VERSION = 1


@dataclass
class Config:
    spec: GeneratorSpec
    space: SpaceSpec = field(default_factory=lambda: SpaceSpec("c0"))
    schedule: object = "auto"
    tolerance: float = 1e-6
    seed: int = 42
    state_norm: float = 2.0


def _line_of(text: str | None, key: str) -> int | None:
    if not text:
        return None
    needle = f'"{key}"'
    for i, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return i
    return None


class _FieldError(Exception):
    def __init__(self, message, field):
        super().__init__(message)
        self.message = message
        self.field = field


def _entry(x, where):
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return complex(x)
    if isinstance(x, (list, tuple)) and len(x) == 2 and all(isinstance(v, (int, float)) for v in x):
        return complex(x[0], x[1])
    raise _FieldError(f"complex entry must be [re, im] or a number, got {x!r}", where)


def parse_matrix(obj, d: int, where: str) -> np.ndarray:
    if not isinstance(obj, list) or len(obj) != d:
        raise _FieldError(f"expected {d} rows", where)
    rows = []
    for i, row in enumerate(obj):
        if not isinstance(row, list) or len(row) != d:
            raise _FieldError(f"expected {d} entries per row", f"{where}[{i}]")
        rows.append([_entry(x, f"{where}[{i}][{j}]") for j, x in enumerate(row)])
    M = np.array(rows, dtype=complex)
    if not np.all(np.isfinite(M)):
        raise _FieldError("non-finite matrix entry", where)
    return M


def encode_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(x.real), float(x.imag)] for x in row] for row in M]


def parse_space(obj) -> SpaceSpec:
    if obj is None:
        return SpaceSpec("c0")
    if isinstance(obj, str):
        return SpaceSpec.parse(obj)
    kind = obj.get("type")
    if kind == "lp":
        return SpaceSpec("lp", obj.get("p"))
    return SpaceSpec(kind)


def parse_config(data: dict, text: str | None = None) -> Config:
    """Validate a decoded config document. ``text`` only serves line diagnostics."""

    def fail(msg, key):
        raise ConfigError(msg, field=key, line=_line_of(text, key.split(".")[0].split("[")[0]))

    if not isinstance(data, dict):
        raise ConfigError("top level must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        fail(f"unsupported schema_version {data.get('schema_version')!r}", "schema_version")
    d = data.get("dimension")
    if not isinstance(d, int) or isinstance(d, bool) or d < 1:
        fail("dimension must be a positive integer", "dimension")
    try:
        prefix = [parse_matrix(M, d, f"prefix[{i}]") for i, M in enumerate(data.get("prefix", []))]
        tail = data.get("tail")
        if not isinstance(tail, dict):
            fail("tail must be an object", "tail")
        if tail.get("type") == "constant":
            tail_rule = ConstantTail(parse_matrix(tail.get("matrix"), d, "tail.matrix"))
        elif tail.get("type") == "periodic":
            mats = tail.get("matrices")
            if not isinstance(mats, list) or not mats:
                fail("periodic tail needs a nonempty 'matrices' list", "tail.matrices")
            tail_rule = PeriodicTail(tuple(parse_matrix(M, d, f"tail.matrices[{i}]") for i, M in enumerate(mats)))
        else:
            fail(f"tail type must be 'constant' or 'periodic', got {tail.get('type')!r}", "tail.type")
    except _FieldError as exc:
        fail(exc.message, exc.field)
    spec = GeneratorSpec(tuple(prefix), tail_rule)
    try:
        space = parse_space(data.get("space"))
    except (StabilityError, AttributeError, ValueError) as exc:
        fail(f"invalid space: {exc}", "space")
    trunc = data.get("truncation", "auto")
    if trunc == "auto":
        schedule = "auto"
    elif isinstance(trunc, dict) and isinstance(trunc.get("schedule"), list) and trunc["schedule"]:
        schedule = trunc["schedule"]
        if not all(isinstance(n, int) and not isinstance(n, bool) and n >= 1 for n in schedule):
            fail("schedule entries must be positive integers", "truncation")
        if sorted(schedule) != schedule:
            fail("schedule must be increasing", "truncation")
    else:
        fail("truncation must be 'auto' or {'schedule': [...]}", "truncation")
    tol = data.get("tolerance", 1e-6)
    if not isinstance(tol, (int, float)) or not tol > 0:
        fail("tolerance must be a positive number", "tolerance")
    seed = data.get("seed", 42)
    if not isinstance(seed, int) or isinstance(seed, bool):
        fail("seed must be an integer", "seed")
    state_norm = data.get("state_norm", 2)
    if state_norm in ("inf", "infinity"):
        state_norm = math.inf
    if state_norm not in (1, 2, math.inf):
        fail("state_norm must be 1, 2 or 'inf'", "state_norm")
    return Config(spec=spec, space=space, schedule=schedule, tolerance=float(tol), seed=seed,
                  state_norm=float(state_norm))


def load_config(path) -> Config:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    return parse_config(data, text)


def spec_to_json(spec: GeneratorSpec) -> dict:
    tail = spec.tail
    if isinstance(tail, ConstantTail):
        t = {"type": "constant", "matrix": encode_matrix(tail.matrix)}
    else:
        t = {"type": "periodic", "matrices": [encode_matrix(M) for M in tail.matrices]}
    return {"dimension": spec.dim, "prefix": [encode_matrix(M) for M in spec.prefix], "tail": t}


def config_document(spec: GeneratorSpec, space: SpaceSpec, schedule="auto", tolerance=1e-6, seed=42) -> dict:
    doc = {"schema_version": SCHEMA_VERSION, **spec_to_json(spec)}
    doc["space"] = {"type": "lp", "p": space.p} if space.kind == "lp" else {"type": space.kind}
    doc["truncation"] = schedule if schedule == "auto" else {"schedule": list(schedule)}
    doc["tolerance"] = tolerance
    doc["seed"] = seed
    return doc


def family_digest(spec: GeneratorSpec) -> str:
    blob = json.dumps(spec_to_json(spec), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def jsonable(obj):
    """Recursively convert to JSON-safe values; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(obj, (complex, np.complexfloating)):
        return [jsonable(obj.real), jsonable(obj.imag)]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    return obj
