"""Document emission: fixed headers, formatting, determinism, round-trips."""

from __future__ import annotations

import json

import pytest

from covadj import StudyConfig, estimate_power_curve, estimate_size, get_case
from covadj.errors import DomainError
from covadj.report import (AGREEMENT_HEADER, COMPARE_HEADER, KAPPA_HEADER,
                           POWER_HEADER, SIZE_HEADER, StudyReport,
                           emit_agreement_table, emit_kappa_table,
                           emit_power_curves, emit_size_comparisons,
                           emit_size_table, parse_agreement_table,
                           parse_kappa_table, parse_power_curves,
                           parse_size_table, reemit_power_csv,
                           reemit_size_csv)


@pytest.fixture(scope="module")
def small_report() -> StudyReport:
    case = get_case("1a")
    cfg = StudyConfig(n_mc=400, seed=12, threads=1)
    rep = StudyReport(cfg.n_mc, cfg.alpha, cfg.seed)
    rep.sizes.append(estimate_size(case, cfg))
    rep.powers.append(estimate_power_curve(case, cfg, 5))
    return rep


class TestHeadersAndShape:
    def test_fixed_headers(self, small_report):
        assert emit_size_table(small_report).split(b"\n")[0].decode() == SIZE_HEADER
        assert emit_agreement_table(small_report).split(b"\n")[0].decode() == AGREEMENT_HEADER
        assert emit_size_comparisons(small_report).split(b"\n")[0].decode() == COMPARE_HEADER
        assert emit_power_curves(small_report).split(b"\n")[0].decode() == POWER_HEADER
        assert emit_kappa_table(small_report).split(b"\n")[0].decode() == KAPPA_HEADER

    def test_power_row_count_is_methods_times_grid(self, small_report):
        rows = parse_power_curves(emit_power_curves(small_report))
        # q = 0 (from the size section) plus q = 1..5, for four methods
        assert len(rows) == 4 * (5 + 1)

    def test_power_q0_row_equals_size_alpha_hat(self, small_report):
        size_rows = parse_size_table(emit_size_table(small_report))
        power_rows = parse_power_curves(emit_power_curves(small_report))
        for m in range(1, 5):
            a = next(r["alpha_hat"] for r in size_rows if r["method"] == m)
            p0 = next(r["power"] for r in power_rows
                      if r["method"] == m and r["q"] == 0)
            assert p0 == a

    def test_unknown_format_rejected(self, small_report):
        with pytest.raises(DomainError):
            emit_size_table(small_report, "yaml")


class TestFormatting:
    def test_proportions_have_four_decimals(self, small_report):
        for line in emit_size_table(small_report).decode().splitlines()[1:]:
            fields = line.split(",")
            for v in fields[2:5]:
                assert len(v.split(".")[1]) == 4

    def test_intercept_difference_two_decimals(self, small_report):
        for line in emit_power_curves(small_report).decode().splitlines()[1:]:
            q = int(line.split(",")[2])
            diff = line.split(",")[3]
            assert diff == f"{0.02 * q:.2f}"

    def test_emission_deterministic(self, small_report):
        assert emit_size_table(small_report) == emit_size_table(small_report)
        assert emit_power_curves(small_report) == emit_power_curves(small_report)

    def test_json_mirrors_field_names(self, small_report):
        rows = json.loads(emit_size_table(small_report, "json").decode())
        assert set(rows[0]) == {"case", "method", "alpha_hat", "ci_lo",
                                "ci_hi", "verdict"}
        rows = json.loads(emit_kappa_table(small_report, "json").decode())
        assert set(rows[0]) == {"case", "method", "kappa"}


class TestRoundTrips:
    def test_size_csv_roundtrip_byte_exact(self, small_report):
        doc = emit_size_table(small_report)
        assert reemit_size_csv(parse_size_table(doc)) == doc

    def test_power_csv_roundtrip_byte_exact(self, small_report):
        doc = emit_power_curves(small_report)
        assert reemit_power_csv(parse_power_curves(doc)) == doc

    def test_agreement_parse(self, small_report):
        rows = parse_agreement_table(emit_agreement_table(small_report))
        assert len(rows) == 6
        assert all(r["flag"] in ("n", "s") for r in rows)
        assert all(0.0 <= r["agreement"] <= 1.0 for r in rows)

    def test_kappa_parse_handles_not_reached(self, small_report):
        rows = parse_kappa_table(emit_kappa_table(small_report))
        # q_max = 5 at these settings never reaches full power
        assert all(r["kappa"] is None for r in rows)

    def test_json_roundtrip(self, small_report):
        doc = emit_size_table(small_report, "json")
        rows = parse_size_table(doc, "json")
        assert json.dumps(rows, indent=2).encode() + b"\n" == doc


class TestVerdicts:
    def test_ci_containing_alpha_is_nominal(self, small_report):
        rows = parse_size_table(emit_size_table(small_report))
        for r in rows:
            if r["ci_lo"] <= 0.05 <= r["ci_hi"]:
                assert r["verdict"] == "nominal"
            elif r["ci_hi"] < 0.05:
                assert r["verdict"] == "conservative"
            else:
                assert r["verdict"] == "liberal"

    def test_agreement_never_exceeds_marginals(self, small_report):
        size = small_report.sizes[0]
        for (i, j) in ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)):
            assert size.agreement(i, j) <= min(size.alpha_hat(i),
                                               size.alpha_hat(j))
