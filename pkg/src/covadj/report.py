"""Serialization of study results and single-dataset analyses.

CSV documents use fixed headers, UTF-8, '\\n' newlines and locale-independent
formatting: proportions to 4 decimals, separation values to 2, statistics at
full precision.  JSON mirrors the same field names with full-precision
numbers.  Emission is deterministic: equal inputs give equal bytes.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .errors import DomainError
from .methods import StrategyRecommendation
from .simulate import PAIRS, PowerEstimate, SizeEstimate

__all__ = ["StudyReport", "emit_size_table", "emit_agreement_table",
           "emit_size_comparisons", "emit_power_curves", "emit_kappa_table",
           "parse_size_table", "parse_agreement_table", "parse_power_curves",
           "parse_kappa_table", "analyze_report", "SIZE_HEADER",
           "AGREEMENT_HEADER", "COMPARE_HEADER", "POWER_HEADER", "KAPPA_HEADER"]

SIZE_HEADER = "case,method,alpha_hat,ci_lo,ci_hi,verdict"
AGREEMENT_HEADER = "case,pair,agreement,flag"
COMPARE_HEADER = "case,pair,relation"
POWER_HEADER = "case,method,q,intercept_difference,power"
KAPPA_HEADER = "case,method,kappa"

NOT_REACHED = "not_reached"


def _check_format(fmt: str) -> None:
    if fmt not in ("csv", "json"):
        raise DomainError(f"unknown output format {fmt!r} (use csv or json)")


@dataclass
class StudyReport:
    """Size and power sections for the cases of one study run."""

    n_mc: int
    alpha: float
    seed: int
    sizes: list[SizeEstimate] = field(default_factory=list)
    powers: list[PowerEstimate] = field(default_factory=list)

    def size_for(self, case_id: str) -> SizeEstimate | None:
        for s in self.sizes:
            if s.case_id == case_id:
                return s
        return None


# ---------------------------------------------------------------------------
# Row builders (shared by emitters and round-trip parsers)
# ---------------------------------------------------------------------------

def _size_rows(report: StudyReport) -> list[dict]:
    rows = []
    for s in report.sizes:
        for m in range(1, 5):
            lo, hi = s.ci(m)
            rows.append({"case": s.case_id, "method": m,
                         "alpha_hat": round(s.alpha_hat(m), 4),
                         "ci_lo": round(lo, 4), "ci_hi": round(hi, 4),
                         "verdict": s.verdict(m)})
    return rows


def _agreement_rows(report: StudyReport) -> list[dict]:
    rows = []
    for s in report.sizes:
        flags = s.agreement_flags()
        for (i, j) in PAIRS:
            rows.append({"case": s.case_id, "pair": f"{i}-{j}",
                         "agreement": round(s.agreement(i, j), 4),
                         "flag": flags[(i, j)]})
    return rows


def _compare_rows(report: StudyReport) -> list[dict]:
    rows = []
    for s in report.sizes:
        rel = s.relations()
        for (i, j) in PAIRS:
            rows.append({"case": s.case_id, "pair": f"{i}-{j}",
                         "relation": rel[(i, j)]})
    return rows


def _power_rows(report: StudyReport) -> list[dict]:
    """Long-format power rows; q = 0 comes from the size section when present."""
    rows = []
    for p in report.powers:
        size = report.size_for(p.case_id)
        for m in range(1, 5):
            if size is not None:
                rows.append({"case": p.case_id, "method": m, "q": 0,
                             "intercept_difference": 0.0,
                             "power": round(size.alpha_hat(m), 4)})
            for q in p.qs:
                rows.append({"case": p.case_id, "method": m, "q": q,
                             "intercept_difference": round(p.intercept_step * q, 10),
                             "power": round(p.power(m, q), 4)})
    return rows


def _kappa_rows(report: StudyReport) -> list[dict]:
    rows = []
    for p in report.powers:
        for m in range(1, 5):
            rows.append({"case": p.case_id, "method": m, "kappa": p.kappa(m)})
    return rows


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _csv_doc(header: str, lines: list[str]) -> bytes:
    return ("\n".join([header] + lines) + "\n").encode("utf-8")


def _json_doc(rows: list[dict]) -> bytes:
    return (json.dumps(rows, indent=2) + "\n").encode("utf-8")


def _render_size_csv(rows: list[dict]) -> bytes:
    lines = [f"{r['case']},{r['method']},{r['alpha_hat']:.4f},"
             f"{r['ci_lo']:.4f},{r['ci_hi']:.4f},{r['verdict']}"
             for r in rows]
    return _csv_doc(SIZE_HEADER, lines)


def emit_size_table(report: StudyReport, fmt: str = "csv") -> bytes:
    """Empirical sizes with CIs and liberal/conservative/nominal verdicts."""
    _check_format(fmt)
    rows = _size_rows(report)
    if fmt == "json":
        return _json_doc(rows)
    return _render_size_csv(rows)


def emit_agreement_table(report: StudyReport, fmt: str = "csv") -> bytes:
    """Joint-rejection proportions with n/s significance flags."""
    _check_format(fmt)
    rows = _agreement_rows(report)
    if fmt == "json":
        return _json_doc(rows)
    lines = [f"{r['case']},{r['pair']},{r['agreement']:.4f},{r['flag']}"
             for r in rows]
    return _csv_doc(AGREEMENT_HEADER, lines)


def emit_size_comparisons(report: StudyReport, fmt: str = "csv") -> bytes:
    """Pairwise size relations: '~' comparable, '<'/'>' significant."""
    _check_format(fmt)
    rows = _compare_rows(report)
    if fmt == "json":
        return _json_doc(rows)
    lines = [f"{r['case']},{r['pair']},{r['relation']}" for r in rows]
    return _csv_doc(COMPARE_HEADER, lines)


def _render_power_csv(rows: list[dict]) -> bytes:
    lines = [f"{r['case']},{r['method']},{r['q']},"
             f"{r['intercept_difference']:.2f},{r['power']:.4f}"
             for r in rows]
    return _csv_doc(POWER_HEADER, lines)


def emit_power_curves(report: StudyReport, fmt: str = "csv") -> bytes:
    """Plot-ready power rows sorted by (case, method, q)."""
    _check_format(fmt)
    rows = _power_rows(report)
    if fmt == "json":
        return _json_doc(rows)
    return _render_power_csv(rows)


def emit_kappa_table(report: StudyReport, fmt: str = "csv") -> bytes:
    """First intercept difference with observed power 1, per method."""
    _check_format(fmt)
    rows = _kappa_rows(report)
    if fmt == "json":
        return _json_doc(rows)
    lines = []
    for r in rows:
        kappa = NOT_REACHED if r["kappa"] is None else f"{r['kappa']:.2f}"
        lines.append(f"{r['case']},{r['method']},{kappa}")
    return _csv_doc(KAPPA_HEADER, lines)


# ---------------------------------------------------------------------------
# Parsers (inverse of the emitters at the emitted precision)
# ---------------------------------------------------------------------------

def _parse_csv(data: bytes, header: str) -> list[list[str]]:
    text = data.decode("utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != header:
        raise DomainError(f"expected header {header!r}")
    return [line.split(",") for line in lines[1:] if line]


def parse_size_table(data: bytes, fmt: str = "csv") -> list[dict]:
    _check_format(fmt)
    if fmt == "json":
        return json.loads(data.decode("utf-8"))
    rows = []
    for f in _parse_csv(data, SIZE_HEADER):
        rows.append({"case": f[0], "method": int(f[1]),
                     "alpha_hat": float(f[2]), "ci_lo": float(f[3]),
                     "ci_hi": float(f[4]), "verdict": f[5]})
    return rows


def parse_agreement_table(data: bytes, fmt: str = "csv") -> list[dict]:
    _check_format(fmt)
    if fmt == "json":
        return json.loads(data.decode("utf-8"))
    return [{"case": f[0], "pair": f[1], "agreement": float(f[2]), "flag": f[3]}
            for f in _parse_csv(data, AGREEMENT_HEADER)]


def parse_power_curves(data: bytes, fmt: str = "csv") -> list[dict]:
    _check_format(fmt)
    if fmt == "json":
        return json.loads(data.decode("utf-8"))
    return [{"case": f[0], "method": int(f[1]), "q": int(f[2]),
             "intercept_difference": float(f[3]), "power": float(f[4])}
            for f in _parse_csv(data, POWER_HEADER)]


def parse_kappa_table(data: bytes, fmt: str = "csv") -> list[dict]:
    _check_format(fmt)
    if fmt == "json":
        return json.loads(data.decode("utf-8"))
    return [{"case": f[0], "method": int(f[1]),
             "kappa": None if f[2] == NOT_REACHED else float(f[2])}
            for f in _parse_csv(data, KAPPA_HEADER)]


def reemit_size_csv(rows: list[dict]) -> bytes:
    """Re-render parsed size rows; byte-equal to the original document."""
    return _render_size_csv(rows)


def reemit_power_csv(rows: list[dict]) -> bytes:
    return _render_power_csv(rows)


# ---------------------------------------------------------------------------
# Single-dataset analysis report
# ---------------------------------------------------------------------------

def _fit_dict(fit) -> dict:
    return {"intercept": fit.intercept, "slope": fit.slope,
            "se_intercept": fit.se_intercept, "se_slope": fit.se_slope,
            "residual_variance": fit.residual_variance,
            "error_df": fit.error_df}


def analyze_report(rec: StrategyRecommendation, overall, fits,
                   treatments: list[int], fmt: str = "json") -> bytes:
    """Render a staged-analysis result (fits, gates, branch, outcomes)."""
    _check_format(fmt)
    doc = {
        "alpha": rec.alpha,
        "branch": rec.branch,
        "overall_fit": _fit_dict(overall),
        "treatment_fits": {str(t): _fit_dict(f)
                           for t, f in zip(treatments, fits)},
        "gates": {
            "slopes_zero": rec.slopes_zero.as_dict(),
            "slopes_equal": (rec.slopes_equal.as_dict()
                             if rec.slopes_equal else None),
        },
        "covariate_overlap": rec.overlap_fraction,
        "outcomes": {tag: o.as_dict() for tag, o in rec.outcomes.items()},
        "warnings": rec.warnings,
        "advice": rec.advice,
    }
    if fmt == "json":
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "scope", "intercept", "slope", "se_intercept",
                "se_slope", "residual_variance", "error_df"])
    w.writerow(["fit", "overall"] + [repr(v) for v in (
        overall.intercept, overall.slope, overall.se_intercept,
        overall.se_slope, overall.residual_variance)] + [overall.error_df])
    for t, f in zip(treatments, fits):
        w.writerow(["fit", f"treatment:{t}"] + [repr(v) for v in (
            f.intercept, f.slope, f.se_intercept, f.se_slope,
            f.residual_variance)] + [f.error_df])
    w.writerow([])
    w.writerow(["section", "test", "statistic", "df_num", "df_den",
                "p_value", "reject"])
    tests = [rec.slopes_zero] + ([rec.slopes_equal] if rec.slopes_equal else [])
    tests += [rec.outcomes[k] for k in sorted(rec.outcomes)]
    for o in tests:
        w.writerow(["test", o.method, repr(o.statistic), repr(o.df_num),
                    "" if o.df_den is None else repr(o.df_den),
                    repr(o.p_value), str(o.reject).lower()])
    w.writerow([])
    w.writerow(["section", "key", "value"])
    w.writerow(["decision", "branch", rec.branch])
    w.writerow(["decision", "covariate_overlap",
                "" if rec.overlap_fraction is None else repr(rec.overlap_fraction)])
    for msg in rec.warnings:
        w.writerow(["decision", "warning", msg])
    if rec.advice:
        w.writerow(["decision", "advice", rec.advice])
    return buf.getvalue().encode("utf-8")
