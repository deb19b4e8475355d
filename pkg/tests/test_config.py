import pytest

from szego_lab.config import ConfigError, load_config, parse_config
from szego_lab.measure import validate

FULL = """\
grid: 1024
precision: 192
degree: 20
seed: 3
weight:
  kind: poly-modulus
  factors: [[0.5, 0.0, 1.0]]
interior: [[0.3, 0.0, 0.5]]
exterior: [[2.0, 0.0, 1.0]]
points: [[3, 0], [0, 2]]
options:
  ell: 1
"""


def _errors(text, overrides=None):
    with pytest.raises(ConfigError) as info:
        parse_config(text, overrides)
    return info.value.errors


def test_minimal_config_gets_defaults():
    cfg = parse_config("weight: {kind: constant, value: 1}\n")
    assert cfg.grid == 4096 and cfg.precision == 256 and cfg.degree == 64
    assert cfg.ell is None and cfg.amplitude is None
    assert cfg.measure().total_mass() == pytest.approx(1.0)


def test_full_config_round_trip():
    cfg = parse_config(FULL)
    mu = cfg.measure()
    assert cfg.grid == 1024 and cfg.ell == 1
    assert mu.exterior.locations[0] == 2.0 and mu.interior.masses[0] == 0.5
    assert cfg.eval_points() == [3 + 0j, 2j]
    echo = cfg.echo()
    assert echo["exterior"] == [[2.0, 0.0, 1.0]]


def test_negative_constant_names_field():
    errs = _errors("weight:\n  kind: constant\n  value: -1\n")
    assert errs[0].field == "weight.value"
    assert "range" in errs[0].message
    assert errs[0].line == 3


def test_unknown_key_is_cited():
    errs = _errors("weight: {kind: constant, value: 1}\nfoo: 2\n")
    assert errs[0].field == "foo" and "'foo'" in errs[0].message and errs[0].line == 2
    errs = _errors("weight: {kind: constant, value: 1}\noptions:\n  bar: 1\n")
    assert errs[0].field == "options.bar" and errs[0].line == 3


def test_errors_are_collected():
    text = "grid: 1000\ndegree: -1\nweight: {kind: constant, value: 0}\nexterior: [[2, 0, -1]]\n"
    fields = {e.field for e in _errors(text)}
    assert {"grid", "degree", "weight.value", "exterior[0]"} <= fields


def test_syntax_error_has_line():
    errs = _errors("weight: {kind: constant\n  value: [1\n")
    assert errs[0].field == "<document>" and errs[0].line is not None


@pytest.mark.parametrize("text, field", [
    ("weight: {kind: spline}\n", "weight.kind"),
    ("weight: {kind: table, samples: [1, 2]}\n", "weight.samples"),
    ("weight: {kind: poly-modulus, factors: [[1, 0, 1]]}\n", "weight.factors[0]"),
    ("weight: {kind: constant, value: 1}\npoints: [[1.001, 0]]\n", "points[0]"),
    ("weight: {kind: constant, value: 1}\noptions: {ell: 2}\n", "options.ell"),
    ("weight: {kind: constant, value: 1}\noptions: {v_source: other}\n", "options.v_source"),
    ("weight: {kind: constant, value: 1}\noptions: {amplitude: -3}\n", "options.amplitude"),
    ("grid: 256\n", "weight"),
])
def test_rejections(text, field):
    assert field in {e.field for e in _errors(text)}


def test_overrides_take_precedence(tmp_path):
    p = tmp_path / "c.yaml"
    p.write_text(FULL)
    cfg = load_config(p, {"grid": 2048, "seed": None, "degree": 8})
    assert cfg.grid == 2048 and cfg.degree == 8 and cfg.seed == 3
    errs = _errors(FULL, {"grid": 100})
    assert errs[0].field == "grid"


def test_geometry_left_to_validation():
    # the parser accepts an exterior point inside the disk; validate reports it
    cfg = parse_config("weight: {kind: constant, value: 1}\nexterior: [[0.5, 0, 1]]\n")
    assert not validate(cfg.measure()).ok
