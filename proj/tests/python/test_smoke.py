import json
import math

import pytest

import lossq

CONFIG = """[model]
lambda = 1
service = exponential 1
N = 4
nu = 1:0.5 2:0.5
p = 0.05
"""


def test_lst_and_moments():
    s = lossq.Service.exponential(2.0)
    assert lossq.lst(s, 0.5) == pytest.approx(1.0 / (1.0 + 2.0 * 0.5), rel=1e-15)
    assert lossq.traffic_moments(s, 0.5, 2) == pytest.approx([1.0, 2.0])
    assert str(lossq.Service("erlang 3 1.5")) == "erlang 3 1.5"


def test_pi_probs_sum_to_one():
    probs, tail = lossq.pi_probs("deterministic 1", 0.7)
    assert math.fsum(probs) + tail == pytest.approx(1.0, abs=1e-12)
    assert probs[0] == pytest.approx(math.exp(-0.7), rel=1e-14)


def test_mm1_fixed_capacity_closed_form():
    # M/M/1 at rho = 1 holds K messages: E P = K + 1.
    c = lossq.fixed_characteristics(5, 1.0, "exponential 1")
    assert c.e_p == pytest.approx(6.0, rel=1e-13)
    assert c.e_r == pytest.approx(1.0, rel=1e-13)
    assert c.pi == pytest.approx(lossq.loss_probability(c))


def test_mixture_is_zeta_weighted():
    nu = lossq.PacketLaw([(1, 0.5), (2, 0.5)])
    zeta = lossq.zeta_pmf(nu, 4)
    mix = lossq.mixture_characteristics(zeta, 0.9, "exponential 1", 0.05)
    expected = sum(
        zeta.prob(k) * lossq.fixed_characteristics(k, 0.9, "exponential 1", 0.05).e_p
        for k in range(zeta.lower, zeta.upper + 1)
    )
    assert mix.e_p == pytest.approx(expected, rel=1e-13)
    assert mix.e_m == pytest.approx(0.05 * mix.e_p, rel=1e-15)


def test_simulation_matches_fixed_per_run_mixture():
    nu = lossq.PacketLaw([(1, 0.5), (2, 0.5)])
    sim = lossq.simulate(0.8, "exponential 1", nu, 4, p=0.05, zeta_mode="fixed_per_run",
                         cycles=50000, replications=2, seed=11, threads=1)
    exact = lossq.analyze(0.8, "exponential 1", nu, 4, 0.05)
    assert len(sim["replications"]) == 2
    assert abs(sim["pi"] - exact.pi) < 4 * sim["se_pi"]
    assert sim["conservation_violations"] == 0


def test_simulation_is_reproducible():
    args = dict(cycles=2000, replications=3, seed=5)
    a = lossq.simulate(1.0, "exponential 1", 1, 3, threads=1, **args)
    b = lossq.simulate(1.0, "exponential 1", 1, 3, threads=3, **args)
    assert a["e_t"] == b["e_t"] and a["pi"] == b["pi"]


def test_regime_and_redundancy():
    rep = lossq.classify(1.5, "exponential 1", 2, 10)
    assert rep["regime"] == "supercritical"
    assert 0.0 < rep["phi"] < 1.0
    assert lossq.message_corruption_prob(0.1, 3, 0) == pytest.approx(1 - 0.9**3)
    rows = lossq.sweep(0.01, 10, 0.05, "exponential 1", 10, 200, [0, 1, 2])
    assert [r["k"] for r in rows] == [0, 1, 2]


def test_errors_map_to_exceptions():
    with pytest.raises(lossq.ValidationError):
        lossq.Service.exponential(-1.0)
    with pytest.raises(lossq.ValidationError) as info:
        lossq.parse_config("[model]\nlambda = 1\nservice = exponential 1\n")
    assert "model.N" in str(info.value)
    assert issubclass(lossq.ValidationError, lossq.LossqError)


def test_config_round_trip_and_execute():
    cfg = lossq.parse_config(CONFIG)
    again = lossq.parse_config(cfg.emit())
    assert again.emit() == cfg.emit()
    cfg.format = "json"
    out = lossq.execute(cfg)
    assert out["exit_code"] == 0
    row = json.loads(out["document"])
    assert isinstance(row, list) and "pi" in row[0]
