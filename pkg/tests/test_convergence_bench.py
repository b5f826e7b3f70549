import csv
import io
import json
import math

import pytest

from arctanpi.bignum import PrecisionContext
from arctanpi.convergence_bench import (
    CSV_COLUMNS,
    ConvergenceReport,
    Sample,
    emit_report,
    fit_rate,
    registered_series,
    run_bench,
)
from arctanpi.pi_formulas import PI_BASE4, PISQRT3_2764, PISQRT3_BASE8

CTX = PrecisionContext(128)
N_LIST = list(range(10, 101, 10))


@pytest.mark.parametrize("spec", [PI_BASE4, PISQRT3_BASE8, PISQRT3_2764], ids=lambda s: s.name)
def test_spec_rates(spec):
    rep = run_bench(spec.name, N_LIST, CTX)
    assert rep.theoretical_rate == pytest.approx(math.log10(spec.ratio_den / spec.ratio_num))
    assert abs(rep.fitted_rate - rep.theoretical_rate) <= 0.05
    assert [s.N for s in rep.samples] == N_LIST


def test_euler_rate_at_one():
    rep = run_bench("euler_arctan", N_LIST, CTX)
    assert rep.theoretical_rate == pytest.approx(math.log10(2))
    assert abs(rep.fitted_rate - math.log10(2)) <= 0.05


def test_sine_and_maclaurin_have_no_theoretical_rate():
    for name in ("sine_arctan", "maclaurin_arctan"):
        rep = run_bench(name, [5, 10, 15, 20], CTX)
        assert rep.theoretical_rate is None
        assert rep.fitted_rate > 0


def test_arctan_at_other_x():
    from fractions import Fraction
    rep = run_bench("euler_arctan", [10, 20, 30, 40], CTX, x=Fraction(1, 3))
    assert rep.theoretical_rate == pytest.approx(1.0)
    assert abs(rep.fitted_rate - 1.0) <= 0.05


@pytest.mark.parametrize("spec", [PI_BASE4, PISQRT3_BASE8, PISQRT3_2764], ids=lambda s: s.name)
def test_errors_non_increasing(spec):
    rep = run_bench(spec.name, list(range(2, 60)), CTX)
    errs = [s.neg_log10_error for s in rep.samples]
    assert all(b >= a for a, b in zip(errs, errs[1:]))


def test_unknown_series():
    with pytest.raises(KeyError, match="registered"):
        run_bench("NOPE", [1, 2], CTX)


def test_registry():
    assert registered_series() == [
        "PI_BASE4", "PISQRT3_BASE8", "PISQRT3_2764", "BBP16",
        "euler_arctan", "sine_arctan", "maclaurin_arctan",
    ]


def test_fit_rate_uses_upper_half():
    samples = [Sample(n, "x", 100.0 if n < 5 else 2.0 * n) for n in range(1, 11)]
    assert fit_rate(samples) == pytest.approx(2.0)
    assert fit_rate([Sample(1, "x", 1.0)]) is None


class TestEmit:
    def test_empty_csv_is_header_only(self):
        text = emit_report(ConvergenceReport("PI_BASE4"), "csv")
        assert text == ",".join(CSV_COLUMNS) + "\n"

    def test_one_sample_one_row(self):
        rep = ConvergenceReport("PI_BASE4", [Sample(10, "2.1E-8", 7.67)])
        rows = list(csv.reader(io.StringIO(emit_report(rep, "csv"))))
        assert rows == [list(CSV_COLUMNS), ["PI_BASE4", "10", "2.1E-8", "7.67"]]

    def test_json_round_trip(self):
        rep = run_bench("PI_BASE4", N_LIST, CTX)
        doc = json.loads(emit_report(rep, "json"))
        assert list(doc) == ["series_name", "samples", "fitted_rate", "theoretical_rate"]
        assert ConvergenceReport.from_dict(doc) == rep

    def test_multiple_reports(self):
        reps = [run_bench(n, [10, 20], CTX) for n in ("PI_BASE4", "BBP16")]
        rows = list(csv.reader(io.StringIO(emit_report(reps, "csv"))))
        assert len(rows) == 5
        assert isinstance(json.loads(emit_report(reps, "json")), list)

    def test_bad_format(self):
        with pytest.raises(ValueError):
            emit_report(ConvergenceReport("x"), "xml")
