import json

import numpy as np
import pytest

import nmq


def test_example_shapes_and_realizability():
    q = nmq.example()
    assert q.A.shape == (10, 10)
    assert q.B.shape == (10, 10)
    assert q.C.shape == (4, 10)
    report = nmq.check(q)
    assert report["pass"]
    assert set(report["conditions"]) >= {"principal_dissipation", "cross_io"}


def test_transcribed_reduction_needs_loose_tolerance():
    red = nmq.reduced_example()
    assert nmq.check(red, 1.5e-2)["pass"]
    assert not nmq.check(red, 1e-6)["pass"]


def test_h2_distance_traces_agree():
    h = nmq.h2_distance(nmq.example(), nmq.reduced_example())
    assert h["relative_gap"] < 1e-8
    assert h["h2"] == pytest.approx(np.sqrt(h["ctrl_trace"]))
    assert nmq.h2_distance(nmq.example(), nmq.example())["h2"] < 1e-5


def test_reduce_is_realizable_and_deterministic():
    q = nmq.example()
    a = nmq.reduce(q, 1)
    b = nmq.reduce(q, 1)
    assert a["realizable"]
    assert a["model"].n == 1
    assert np.array_equal(a["model"].A, b["model"].A)
    assert nmq.check(a["model"], 1e-10)["pass"]
    with pytest.raises(nmq.DimensionError):
        nmq.reduce(q, 3)


def test_json_round_trip_and_build():
    q = nmq.example()
    back = nmq.Model.from_json(q.to_json())
    assert np.array_equal(back.A, q.A)
    params = {"m": 1, "n": 1, "omega_p": [2.0], "omega_a": [3.0],
              "gamma_p": [0.5], "gamma_a": [0.7], "kappa": [0.4]}
    built = nmq.build(json.dumps(params))
    assert built.states == 4
    with pytest.raises(nmq.ParseError):
        nmq.build(json.dumps({**params, "colour": 1}))
