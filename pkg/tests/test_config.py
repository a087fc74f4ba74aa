import json
import math

import numpy as np
import pytest

from dtvstab.config import config_document, family_digest, jsonable, load_config, parse_config
from dtvstab.errors import ConfigError
from dtvstab.family import GeneratorSpec
from dtvstab.sequences import SpaceSpec

VALID = {
    "schema_version": 1,
    "dimension": 1,
    "prefix": [],
    "tail": {"type": "constant", "matrix": [[[0.5, 0.0]]]},
    "space": {"type": "c0"},
    "truncation": {"schedule": [16, 32, 64, 128]},
    "tolerance": 1e-6,
    "seed": 42,
}


def test_parse_valid():
    cfg = parse_config(VALID)
    assert cfg.spec.dim == 1 and cfg.schedule == [16, 32, 64, 128]
    assert cfg.space == SpaceSpec("c0") and cfg.seed == 42


def test_roundtrip_document():
    spec = GeneratorSpec.periodic([[[0.5j, 1], [0, 0.2]], np.eye(2) * 0.3], prefix=[np.ones((2, 2))])
    doc = json.loads(json.dumps(config_document(spec, SpaceSpec.lp(3), schedule=[8, 16])))
    cfg = parse_config(doc)
    assert family_digest(cfg.spec) == family_digest(spec)
    assert cfg.space == SpaceSpec.lp(3)


@pytest.mark.parametrize(
    "patch, field",
    [
        ({"schema_version": 2}, "schema_version"),
        ({"dimension": 0}, "dimension"),
        ({"tail": {"type": "constant", "matrix": [[1, 2]]}}, "tail.matrix[0]"),
        ({"tail": {"type": "constant", "matrix": [[1], [2]]}}, "tail.matrix"),
        ({"tail": {"type": "spiral"}}, "tail.type"),
        ({"tail": {"type": "periodic", "matrices": []}}, "tail.matrices"),
        ({"prefix": [[["a"]]]}, "prefix[0][0][0]"),
        ({"space": {"type": "lp", "p": 0.5}}, "space"),
        ({"truncation": {"schedule": [32, 16]}}, "truncation"),
        ({"tolerance": -1}, "tolerance"),
        ({"seed": 1.5}, "seed"),
    ],
)
def test_field_diagnostics(patch, field):
    with pytest.raises(ConfigError) as exc:
        parse_config({**VALID, **patch})
    assert exc.value.field == field


def test_line_diagnostics(tmp_path):
    path = tmp_path / "c.json"
    text = json.dumps({**VALID, "seed": "x"}, indent=2)
    path.write_text(text)
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.line == next(i for i, l in enumerate(text.splitlines(), 1) if '"seed"' in l)
    path.write_text('{\n  "schema_version": 1,\n  oops\n}')
    with pytest.raises(ConfigError) as exc:
        load_config(path)
    assert exc.value.line == 3


def test_jsonable():
    out = jsonable({"a": -math.inf, "b": np.float64(1.5), "c": 1 + 2j, "d": np.array([1, 2]), "e": np.bool_(True)})
    assert out == {"a": "-inf", "b": 1.5, "c": [1.0, 2.0], "d": [1, 2], "e": True}
    json.dumps(out, allow_nan=False)


def test_digest_sensitivity():
    assert family_digest(GeneratorSpec.scalar(0.5)) != family_digest(GeneratorSpec.scalar(0.5 + 1e-15))
    assert family_digest(GeneratorSpec.scalar(0.5)) == family_digest(GeneratorSpec.constant([[0.5 + 0j]]))
