import json

import numpy as np
import pytest

from diracpolar.errors import InvalidScenario, OutOfDomain, ParseError
from diracpolar.scenario import BUILTIN, DEFAULT_TOLERANCES, load_scenario, scenario_from_dict

SCENARIO_DIR = __import__("pathlib").Path(__file__).resolve().parents[1] / "scenarios"


@pytest.mark.parametrize("name", sorted(BUILTIN))
def test_builtins_load_and_sample(name):
    sc = load_scenario(name)
    pts = sc.points(3)
    assert pts.shape[1] == 4
    sc.field.at(sc.chart, pts[0])


def test_samples_and_random_points_combine():
    sc = BUILTIN["flat-rotation-cond"]()
    assert len(sc.points()) == 12
    assert len(sc.points(5)) == 17
    assert np.array_equal(sc.points(5, seed=1), sc.points(5, seed=1))


def test_json_files():
    sc = load_scenario(str(SCENARIO_DIR / "schwarzschild_field.json"))
    assert sc.chart.name == "schwarzschild" and sc.mass == 1.0 and "xi2" in sc.killing
    sph = load_scenario(str(SCENARIO_DIR / "stationary_ansatz.json"))
    assert sph.spherical is not None and len(sph.points()) == 2


def test_bad_inputs(tmp_path):
    with pytest.raises(InvalidScenario):
        load_scenario("no-such-scenario")
    p = tmp_path / "broken.json"
    p.write_text("{ not json")
    with pytest.raises(InvalidScenario):
        load_scenario(str(p))
    with pytest.raises(ParseError):
        load_scenario(str(SCENARIO_DIR / "bad_expression.json"))
    for bad in ([], {"field": {}}, {"chart": "flat-cartesian", "colour": 1},
                {"chart": "flat-cartesian", "tolerances": {"speed": 1}},
                {"chart": "flat-cartesian", "samples": [[1, 2]]},
                {"chart": "flat-cartesian", "mass": -1},
                {"spherical": {"A": "0", "kappa": 1}}):
        with pytest.raises(InvalidScenario):
            scenario_from_dict(bad)


def test_samples_outside_domain_are_rejected():
    sc = scenario_from_dict({"chart": "schwarzschild", "samples": [[0, 1.0, 1.0, 0]]})
    with pytest.raises(OutOfDomain):
        sc.points()


def test_tolerance_override():
    sc = scenario_from_dict({"chart": "flat-cartesian", "tolerances": {"transport": 1e-3}})
    assert sc.tolerances["transport"] == 1e-3
    assert sc.tolerances["fierz"] == DEFAULT_TOLERANCES["fierz"]


def test_custom_killing_components():
    sc = scenario_from_dict({"chart": "flat-cartesian", "killing": {"screw": ["0", "-y", "x", "1"]}})
    v, _ = sc.killing_field("screw").evaluate([0, 1, 2, 3])
    assert np.allclose(v, [0, -2, 1, 1])
