import json
import math

import pytest

import hypererg as h


def test_group_words():
    assert h.reduce(2, "abBA") == "e"
    assert h.multiply(2, "ab", "Ba") == "aa"
    assert h.inverse(2, "ab") == "BA"


def test_growth_and_perron():
    word = h.Metric.word(2)
    assert abs(h.growth_exponent(word, 12)["delta"] - math.log(3)) <= 0.02
    weighted = h.Metric.weighted(2, [1.0, 1.5])
    x = lambda d: [math.exp(-d * w) for w in (1.0, 1.0, 1.5, 1.5)]
    d = h.perron_exponent(weighted)
    assert abs(sum(v / (1 + v) for v in x(d)) - 1) < 1e-12


def test_ps_measure_round_trip():
    ps = h.ps_measure(h.Metric.word(2), 3)
    assert ps.mass("a") == pytest.approx(0.25)
    assert ps.mass("ab") == pytest.approx(1 / 12)
    back = h.PSMeasure.from_json(ps.to_json())
    assert back.to_json() == ps.to_json()
    assert set(json.loads(ps.to_json())) >= {"delta", "resolution", "masses"}


def test_bms_and_normalization():
    m = h.Metric.word(2)
    ps = h.ps_measure(m, 3)
    assert h.bms_invariance_defect(m, ps) <= 1e-12
    with pytest.raises(h.BoundednessViolation):
        h.cobound_phi(m, ps, 1.0)
    raw, scale = h.fundamental_domain_mass(m, ps)
    assert raw == pytest.approx(0.75)
    assert scale == pytest.approx(4 / 3)


def test_ergodic_slices_and_sat():
    m = h.Metric.word(2)
    ps = h.ps_measure(m, 3)
    values, _ = h.ergodic_average(m, ps, 1, "(b)", "(a)")
    assert values == [pytest.approx(3.0)]
    assert sum(h.slice_masses(m, ps, "(a)", 3)) == pytest.approx(1.0)
    g, mass = h.sat_search(ps, ["a"], 0.05)
    assert g == "AAA" and mass == pytest.approx(35 / 36)


def test_errors_surface_as_python_exceptions():
    with pytest.raises(h.InputError):
        h.Metric.alt_generators(2, ["aa", "AA", "bb", "BB"])
    assert issubclass(h.DomainError, h.HyperergError)


def test_run_writes_manifest(tmp_path):
    conf = tmp_path / "run.conf"
    conf.write_text("[metric]\nkind = word\n")
    code, message, _ = h.run("growth", str(conf), None, str(tmp_path / "out"))
    assert code == 2 and "seed" in message
    assert json.loads((tmp_path / "out" / "manifest.json").read_text())["exit_code"] == 2
    code, _, outputs = h.run("growth", str(conf), 4, str(tmp_path / "ok"))
    assert code == 0 and outputs[-1] == "manifest.json"
