"""Simple OLS fits, covariate-adjusted residuals, and the slope gate tests.

The two preliminary hypotheses (all slopes zero; all slopes equal) are
tested with extra-sum-of-squares F statistics against the per-treatment
lines model.  Centered (mean-subtracted) sums are used throughout to limit
cancellation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .backend import core
from .data import Dataset, FittedLine, ResidualSet, TestOutcome
from .errors import DegenerateDesign, InsufficientData, UnsupportedDesign

__all__ = ["fit_line", "fit_grouped", "covariate_adjusted_residuals",
           "treatment_specific_residuals", "test_slopes_zero",
           "test_slopes_equal", "slope_decomposition", "SlopeDecomposition"]


def _translate(exc: ValueError, context: str = "") -> Exception:
    tag = str(exc)
    where = f" ({context})" if context else ""
    if tag == "too_few_points":
        return InsufficientData(f"need at least 3 points for a line fit{where}")
    if tag == "degenerate_x":
        return DegenerateDesign(f"all covariate values coincide{where}")
    return exc


def fit_line(points: list[tuple[float, float]]) -> FittedLine:
    """Least-squares line through (x, y) points; df = n - 2."""
    xs = [p[0] for p in points]
    ys = [p[1] for p in points]
    try:
        (intercept, slope, se_int, se_slope, rvar, df,
         _xb, _yb, _sxx, _sse) = core.linefit(xs, ys)
    except ValueError as exc:
        raise _translate(exc) from None
    return FittedLine(intercept, slope, se_int, se_slope, rvar, df)


def fit_grouped(data: Dataset) -> tuple[FittedLine, list[FittedLine]]:
    """Overall fit (treatment labels ignored) plus one fit per treatment.

    Per-treatment fits come back in ascending treatment-id order; fit errors
    name the offending treatment.
    """
    data.require_treatments()
    overall = fit_line([(x, y) for _t, x, y in data.rows])
    fits = []
    groups = data.grouped()
    for tid in data.treatments():
        gx, gy = groups[tid]
        try:
            (intercept, slope, se_int, se_slope, rvar, df,
             _xb, _yb, _sxx, _sse) = core.linefit(gx, gy)
        except ValueError as exc:
            raise _translate(exc, f"treatment {tid}") from None
        fits.append(FittedLine(intercept, slope, se_int, se_slope, rvar, df))
    return overall, fits


def covariate_adjusted_residuals(data: Dataset, line: FittedLine) -> ResidualSet:
    """Residuals of every observation from one line fit on this dataset.

    With the overall fit the grand residual sum is zero (normal equations);
    treatment and covariate are carried along unchanged.
    """
    rows = [(tid, x, y - (line.intercept + line.slope * x))
            for tid, x, y in data.rows]
    return ResidualSet(rows, source="overall")


def treatment_specific_residuals(data: Dataset,
                                 fits: list[FittedLine]) -> ResidualSet:
    """Residuals from the per-treatment fits (zero mean within each group)."""
    by_tid = dict(zip(data.treatments(), fits))
    rows = [(tid, x, y - by_tid[tid].predict(x)) for tid, x, y in data.rows]
    return ResidualSet(rows, source="treatment-specific")


def _per_treatment_sse(data: Dataset) -> tuple[float, int, int]:
    """(pooled SSE of the per-treatment lines model, n, t)."""
    groups = data.grouped()
    sse = 0.0
    for tid in data.treatments():
        gx, gy = groups[tid]
        try:
            out = core.linefit(gx, gy)
        except ValueError as exc:
            raise _translate(exc, f"treatment {tid}") from None
        sse += out[9]
    return sse, data.n, len(groups)


def _within_sums(data: Dataset) -> tuple[float, float, float]:
    """Pooled within-treatment centered sums (Exx, Exy, Eyy)."""
    groups = data.grouped()
    exx = exy = eyy = 0.0
    for tid in data.treatments():
        gx, gy = groups[tid]
        m = len(gx)
        mx = sum(gx) / m
        my = sum(gy) / m
        for x, y in zip(gx, gy):
            dx = x - mx
            dy = y - my
            exx += dx * dx
            exy += dx * dy
            eyy += dy * dy
    return exx, exy, eyy


def _reduction_f(sse_red: float, sse_full: float, df_extra: int,
                 df_err: int) -> tuple[float, float, float]:
    """F for dropping df_extra parameters, with df_err error df."""
    sstrt = sse_red - sse_full
    if sstrt < 0.0:
        sstrt = 0.0
    if sse_full <= 0.0:
        f = 0.0 if sstrt <= 0.0 else math.inf
    else:
        f = (sstrt / df_extra) / (sse_full / df_err)
    return f, float(df_extra), float(df_err)


def test_slopes_zero(data: Dataset, alpha: float) -> TestOutcome:
    """F test of 'every treatment slope is zero'.

    Per-treatment lines model against per-treatment intercepts only;
    df (t, n - 2t).
    """
    data.require_treatments()
    sse_full, n, t = _per_treatment_sse(data)
    if n - 2 * t < 1:
        raise InsufficientData(f"need n > 2t, have n={n}, t={t}")
    sse_red = 0.0
    groups = data.grouped()
    for tid in data.treatments():
        _gx, gy = groups[tid]
        my = sum(gy) / len(gy)
        for y in gy:
            d = y - my
            sse_red += d * d
    f, df1, df2 = _reduction_f(sse_red, sse_full, t, n - 2 * t)
    p = core.f_sf(f, df1, df2)
    return TestOutcome("slopes_zero", f, df1, df2, p, p <= alpha, alpha)


def test_slopes_equal(data: Dataset, alpha: float) -> TestOutcome:
    """F test of slope parallelism; df (t - 1, n - 2t).

    Per-treatment lines model against the common-slope model (one slope,
    per-treatment intercepts).
    """
    data.require_treatments()
    sse_full, n, t = _per_treatment_sse(data)
    if n - 2 * t < 1:
        raise InsufficientData(f"need n > 2t, have n={n}, t={t}")
    exx, exy, eyy = _within_sums(data)
    if exx <= 0.0:
        raise DegenerateDesign("no within-treatment covariate variation")
    sse_red = eyy - exy * exy / exx
    f, df1, df2 = _reduction_f(sse_red, sse_full, t - 1, n - 2 * t)
    p = core.f_sf(f, df1, df2)
    return TestOutcome("slopes_equal", f, df1, df2, p, p <= alpha, alpha)


@dataclass(frozen=True)
class SlopeDecomposition:
    """Split of the overall slope from each treatment's viewpoint.

    For each treatment i:
        beta_star = beta_i + intercept_term + residual_term_i
    holds exactly.  intercept_term (shared) collects the per-treatment
    intercepts weighted by their covariate-mean offsets; residual_term_i
    collects the x-weighted residuals about the lines with slope anchored
    at beta_i, and vanishes when the per-treatment slopes coincide.
    """

    beta_star: float
    per_treatment: list[tuple[float, float, float]]  # (beta_i, int_term, res_term)


def slope_decomposition(data: Dataset) -> SlopeDecomposition:
    """Exact decomposition of the overall slope (two treatments only)."""
    data.require_treatments()
    tids = data.treatments()
    if len(tids) != 2:
        raise UnsupportedDesign(
            "slope decomposition is defined for exactly two treatments")
    overall, fits = fit_grouped(data)
    xs = [x for _t, x, _y in data.rows]
    n = len(xs)
    xbar = sum(xs) / n
    exx_star = 0.0
    for x in xs:
        d = x - xbar
        exx_star += d * d
    if exx_star <= 0.0:
        raise DegenerateDesign("all covariate values coincide")
    groups = data.grouped()
    int_term = 0.0
    for tid, fit in zip(tids, fits):
        gx = groups[tid][0]
        s = len(gx)
        gxbar = sum(gx) / s
        int_term += fit.intercept * s * (gxbar - xbar)
    int_term /= exx_star
    by_tid = {tid: fit for tid, fit in zip(tids, fits)}
    per = []
    for tid, fit in zip(tids, fits):
        res_term = 0.0
        for otid, x, y in data.rows:
            # residual about the other treatment's intercept but THIS slope
            r = y - by_tid[otid].intercept - fit.slope * x
            res_term += (x - xbar) * r
        res_term /= exx_star
        per.append((fit.slope, int_term, res_term))
    return SlopeDecomposition(overall.slope, per)
