import math

import numpy as np
import pytest

import athena_falsify as af


def test_robustness_and_normalize():
    x = np.array([0.0, 1.0, 2.0, 3.0])
    assert af.robustness("G[0,3](x < 5)", {"x": x}, 1.0) == 2.0
    assert af.robustness("F[0,3](x > 2.5)", {"x": x}, 1.0) == 0.5
    assert af.satisfied("G[0,3](x < 5)", {"x": x}, 1.0)
    assert af.formula_horizon("G[0,10](F[0,5](x > 1))") == 15.0
    assert af.normalize(af.normalize("G[0,1](x<1)")) == af.normalize("G[0,1](x<1)")


def test_errors_map_to_python():
    with pytest.raises(af.ParseError):
        af.normalize("G[0,1](x <")
    with pytest.raises(af.MissingChannel):
        af.robustness("G[0,1](y < 1)", {"x": np.zeros(3)}, 1.0)
    with pytest.raises(af.NotFound):
        af.catalog("nope")
    assert issubclass(af.ParseError, af.AthenaError)


def test_interpolate_hits_control_values():
    s = af.interpolate([0.0, 5.0, 10.0], [1.0, 3.0, 2.0], "pchip", 10.0, 0.5)
    assert s.shape == (21,)
    assert s[0] == 1.0 and s[10] == 3.0 and s[20] == 2.0
    assert s.max() <= 3.0 and s.min() >= 1.0


def test_simulate_chasing_cars():
    n = 1001
    out = af.simulate("chasing_cars", {"throttle": np.ones(n), "brake": np.zeros(n)}, 0.1)
    assert out["time"][-1] == pytest.approx(100.0)
    assert {"y1", "y5", "throttle", "brake"} <= set(out)
    assert np.all(np.isfinite(out["y5"]))


def test_catalog():
    ids = af.catalog_ids()
    assert "CC1" in ids and "AT1" in ids
    e = af.catalog("CC1")
    assert e["plant"] == "chasing_cars"
    assert e["horizon"] >= af.formula_horizon(e["formula"])


def test_falsify_catalog_and_replay():
    r = af.falsify("AT1", seed=3, max_iterations=100)
    assert r["failure_found"]
    tc = r["test_case"]
    assert tc["robustness"] < 0
    e = af.catalog("AT1")
    out = af.simulate(e["plant"], tc["inputs"], 0.01)
    trace = {k: v for k, v in out.items() if k != "time"}
    assert af.robustness(e["formula"], trace, 0.01) == tc["robustness"]
    again = af.falsify("AT1", seed=3, max_iterations=100)
    assert again["combined_history"] == r["combined_history"]


def test_falsify_inline_unfalsifiable():
    r = af.falsify(plant="passthrough", formula="G[0,10](x < 2)", assumption="x:pchip:0:1:3",
                   max_iterations=20, mode="automatic")
    assert not r["failure_found"]
    assert r["test_case"] is None
    assert r["iterations_used"] == 20
    assert r["best_robustness"] >= 1.0


def test_rank_sum():
    r = af.rank_sum([1, 2, 3], [4, 5, 6])
    assert r["u_a"] == 0.0
    assert r["exact"]
    assert math.isclose(r["p_value"], 0.1, rel_tol=1e-12)
