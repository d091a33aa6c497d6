import json

import numpy as np
import pytest

from stabletanaka.report import REPORT_FIELDS, MartingaleProbe, VerificationReport, dumps17, mean_and_se


def test_pass_recomputed_from_fields():
    r = VerificationReport.build("x", 1.5, mc_estimate=0.1, analytic_target=0.0, std_error=0.03)
    assert r.passed
    r = VerificationReport.build("x", 1.5, mc_estimate=0.2, analytic_target=0.0, std_error=0.03)
    assert not r.passed
    r = VerificationReport.build("x", 1.5, mc_estimate=1.05, analytic_target=1.0, std_error=1e-9,
                                 diagnostics={"relative_tolerance": 0.1})
    assert r.passed
    r = VerificationReport.build("x", 1.5, mc_estimate=0.0, analytic_target=0.0, std_error=1.0,
                                 diagnostics={"subgates": {"a": True, "b": False}})
    assert not r.passed


def test_skipped_passes():
    r = VerificationReport.skipped("bracket", 2.0, "boundary-skip", "needs alpha < 2")
    assert r.passed and "BOUNDARY-SKIP" in r.table_row()
    g = VerificationReport.skipped("bracket", 1.5, "gated", "self-test failed")
    assert not g.passed


def test_round_trip_and_fields():
    r = VerificationReport.build("x", 1.5, gamma=0.5, mc_estimate=0.1, analytic_target=0.0, std_error=0.1,
                                 diagnostics={"v": np.float64(1 / 3)})
    d = json.loads(dumps17(r.to_dict()))
    assert tuple(d) == REPORT_FIELDS
    assert VerificationReport.from_dict(d).recompute_pass() == r.passed


def test_dumps17_digits():
    assert dumps17(0.1) == "0.10000000000000001"
    assert dumps17(float("nan")) == "null"
    assert json.loads(dumps17({"a": [1, 2.5, None, True]}, indent=2)) == {"a": [1, 2.5, None, True]}


def test_mean_and_se():
    m, se = mean_and_se([1.0, 3.0])
    assert m == 2.0 and se == pytest.approx(1.0)
    with pytest.raises(ValueError):
        mean_and_se([])


def test_probe_validation():
    with pytest.raises(ValueError):
        MartingaleProbe(0.5, 1.0, ["a"], [0.0, 1.0], [1.0])
    with pytest.raises(ValueError):
        MartingaleProbe(0.5, 1.0, ["a"], [0.0], [float("inf")])
