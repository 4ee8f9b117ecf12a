import json
import math

import pytest

from l2plus import StateSpace, certify, report_to_json
from l2plus.harmonic import GridOptions
from l2plus.report import CertifyOptions

FAST = CertifyOptions(
    alphas=(-1.0,),
    max_degree=1,
    max_harmonics=8,
    grid=GridOptions(points_per_decade=40),
)


@pytest.fixture(scope="module")
def first_order_report():
    sys = StateSpace([[-1.0]], [[1.0]], [[1.0]], [[0.0]], name="lowpass1")
    return certify(sys, FAST)


class TestCertify:
    def test_invariants(self, first_order_report):
        rep = first_order_report
        assert rep.best_lower <= rep.best_upper + 1e-6
        assert rep.relative_gap >= -1e-6
        assert rep.best_lower >= rep.uniform_floor - 1e-6

    def test_first_order_tight(self, first_order_report):
        rep = first_order_report
        assert rep.best_upper == pytest.approx(1.0, abs=1e-3)
        assert rep.best_lower == pytest.approx(1.0, abs=1e-2)

    def test_static_sign_indefinite(self):
        rep = certify(StateSpace([], [], [], [[1.0, -1.0]], name="static"), FAST)
        assert rep.best_upper == pytest.approx(1.0, abs=1e-3)
        assert rep.best_lower == pytest.approx(1.0, abs=1e-3)
        assert rep.l2_norm == pytest.approx(math.sqrt(2.0), abs=1e-9)

    def test_table_shapes(self, first_order_report):
        rep = first_order_report
        assert len(rep.upper_bounds) == 2  # degrees 0 and 1 for one alpha
        assert [row[0] for row in rep.lower_bounds] == [1, 2, 4, 8]


class TestJson:
    def test_seventeen_digit_floats(self):
        text = report_to_json({"x": 1.0 / 3.0})
        assert "0.33333333333333331" in text

    def test_nonfinite_encoding(self):
        text = report_to_json({"a": math.nan, "b": math.inf, "c": -math.inf})
        data = json.loads(text)
        assert data == {"a": "nan", "b": "inf", "c": "-inf"}

    def test_report_parses_back(self, first_order_report):
        data = json.loads(report_to_json(first_order_report))
        assert data["schema"] == 1
        assert data["system_name"] == "lowpass1"
        assert len(data["upper_bounds"]) == 2
        assert data["exceeds_uniform_floor"] is True

    def test_deterministic_repeat(self):
        sys = StateSpace([[-2.0, 0.3], [0.1, -1.0]], [[1.0], [0.5]], [[1.0, -1.0]], [[0.2]])
        a = report_to_json(certify(sys, FAST))
        b = report_to_json(certify(sys, FAST))
        assert a == b
