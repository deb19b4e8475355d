import json
import math

import numpy as np

from szego_lab.report import RunReport, to_csv, to_json


def test_json_floats_and_specials():
    text = to_json({"a": 0.1, "b": np.float64(1 / 3), "c": math.nan, "d": 1 + 2j,
                    "e": [True, None], "f": np.int64(4)})
    data = json.loads(text)
    assert data["a"] == 0.1 and data["b"] == 1 / 3
    assert data["c"] is None and data["d"] == [1.0, 2.0]
    assert data["e"] == [True, None] and data["f"] == 4
    assert "0.33333333333333331" in text


def test_json_is_deterministic():
    obj = {"x": [1.0, 2.5, {"y": np.arange(3) / 7}]}
    assert to_json(obj) == to_json(obj)
    assert json.loads(to_json(obj))["x"][2]["y"][1] == 1 / 7


def test_csv_splits_complex():
    text = to_csv([{"n": 0, "z": 1 + 2j, "ok": True}, {"n": 1, "z": 0.5 + 0j, "ok": False}])
    lines = text.splitlines()
    assert lines[0] == "n,z_re,z_im,ok"
    assert lines[2].startswith("1,0.5,0,")
    assert to_csv([]) == ""


def test_exit_codes_and_files(tmp_path):
    rep = RunReport("tau", {"grid": 64})
    rep.check("a", True)
    assert rep.exit_code == 0
    rep.check("b", False, 2.0, 1.0)
    assert rep.exit_code == 1
    assert RunReport("tau", None, config_error=True).exit_code == 2
    rep.tables["tau"] = [{"n": 0, "tau": 1.0}]
    rep.timing = {"seconds": 0.25}
    names = sorted(p.name for p in rep.write(tmp_path))
    assert names == ["report.json", "tau.csv", "timing.json"]
    data = json.loads((tmp_path / "report.json").read_text())
    assert "timing" not in data and data["passed"] is False
