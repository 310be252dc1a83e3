"""The four treatment-comparison methods and the strategy selector.

Methods 2-4 share a pipeline: fit the overall line ignoring treatments,
take its residuals, then run the group test on them.  ANCOVA (method 1)
compares intercepts in the common-slope model directly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .backend import core
from .data import (Dataset, TestOutcome, METHOD_ANCOVA, METHOD_ANOVA_HOV,
                   METHOD_ANOVA_NOHOV, METHOD_KRUSKAL)
from .errors import (DegenerateDesign, InsufficientData, ZeroVarianceGroup)
from .regression import test_slopes_equal, test_slopes_zero

__all__ = ["ancova_f", "anova_hov_residuals", "anova_nohov_residuals",
           "kruskal_wallis_residuals", "run_all_methods", "recommend",
           "StrategyRecommendation", "DF_PAPER", "DF_RESTRICTED"]

# Residual-ANOVA error-df conventions: the literature-matching default
# charges t parameters (df n-t); the restricted variant also charges the
# zero-sum constraint of overall-fit residuals (df n-t-1).
DF_PAPER = "paper"
DF_RESTRICTED = "restricted"


def _overall_residuals(data: Dataset) -> tuple[list[float], list[int]]:
    """Residuals from the overall fit, grouped contiguously by treatment."""
    xs, ys, starts = data.flat_by_treatment()
    try:
        out = core.linefit(xs, ys)
    except ValueError as exc:
        if str(exc) == "too_few_points":
            raise InsufficientData("need at least 3 observations") from None
        raise DegenerateDesign("all covariate values coincide") from None
    a, b = out[0], out[1]
    resid = [ys[i] - (a + b * xs[i]) for i in range(len(xs))]
    return resid, starts


def ancova_f(data: Dataset, alpha: float) -> TestOutcome:
    """Equal-intercepts F test in the common-slope model; df (t-1, n-t-1)."""
    data.require_treatments()
    xs, ys, starts = data.flat_by_treatment()
    t = len(starts) - 1
    if data.n <= t + 1:
        raise InsufficientData(f"need n > t + 1, have n={data.n}, t={t}")
    try:
        f, df1, df2 = core.ancova_f(xs, ys, starts)
    except ValueError as exc:
        if str(exc) == "too_few_points":
            raise InsufficientData(f"need n > t + 1, have n={data.n}, t={t}") from None
        raise DegenerateDesign("no usable covariate variation") from None
    p = core.f_sf(f, df1, df2)
    return TestOutcome(METHOD_ANCOVA, f, df1, df2, p, p <= alpha, alpha)


def anova_hov_residuals(data: Dataset, alpha: float,
                        df_convention: str = DF_PAPER) -> TestOutcome:
    """One-way ANOVA on overall-fit residuals.

    All residuals identical yields statistic 0, p = 1 (no evidence of a
    difference rather than a 0/0 failure).
    """
    data.require_treatments()
    resid, starts = _overall_residuals(data)
    extra = 1 if df_convention == DF_RESTRICTED else 0
    try:
        f, df1, df2 = core.oneway_f(resid, starts, extra)
    except ValueError:
        raise InsufficientData("too few residuals for the ANOVA") from None
    p = core.f_sf(f, df1, df2)
    return TestOutcome(METHOD_ANOVA_HOV, f, df1, df2, p, p <= alpha, alpha)


def anova_nohov_residuals(data: Dataset, alpha: float) -> TestOutcome:
    """Heteroscedastic one-way ANOVA on overall-fit residuals.

    Groups are weighted by size/variance; the denominator df is the
    real-valued Satterthwaite value (equals the two-sample Welch df at t=2).
    """
    data.require_treatments()
    resid, starts = _overall_residuals(data)
    try:
        f, df1, df2 = core.welch_f(resid, starts)
    except ValueError as exc:
        tag, _, g = str(exc).partition(":")
        tid = data.treatments()[int(g)] if g else "?"
        if tag == "zero_variance":
            raise ZeroVarianceGroup(
                f"treatment {tid} has zero residual variance") from None
        raise InsufficientData(
            f"treatment {tid} has fewer than 2 residuals") from None
    p = core.f_sf(f, df1, df2)
    return TestOutcome(METHOD_ANOVA_NOHOV, f, df1, df2, p, p <= alpha, alpha)


def kruskal_wallis_residuals(data: Dataset, alpha: float) -> TestOutcome:
    """Rank test of equal residual distributions (midranks, tie-corrected)."""
    data.require_treatments()
    t = len(data.treatments())
    if data.n < t + 1:
        raise InsufficientData(f"need n > t, have n={data.n}, t={t}")
    resid, starts = _overall_residuals(data)
    h, df = core.kruskal_h(resid, starts)
    p = core.chisq_sf(h, df)
    return TestOutcome(METHOD_KRUSKAL, h, df, None, p, p <= alpha, alpha)


def run_all_methods(data: Dataset, alpha: float,
                    df_convention: str = DF_PAPER) -> dict[str, TestOutcome]:
    return {
        METHOD_ANCOVA: ancova_f(data, alpha),
        METHOD_ANOVA_HOV: anova_hov_residuals(data, alpha, df_convention),
        METHOD_ANOVA_NOHOV: anova_nohov_residuals(data, alpha),
        METHOD_KRUSKAL: kruskal_wallis_residuals(data, alpha),
    }


def _anova_raw(data: Dataset, alpha: float) -> TestOutcome:
    """Plain one-way ANOVA on the raw responses; df (t-1, n-t)."""
    _xs, ys, starts = data.flat_by_treatment()
    f, df1, df2 = core.oneway_f(ys, starts, 0)
    p = core.f_sf(f, df1, df2)
    return TestOutcome("anova_raw", f, df1, df2, p, p <= alpha, alpha)


def _kruskal_raw(data: Dataset, alpha: float) -> TestOutcome:
    _xs, ys, starts = data.flat_by_treatment()
    h, df = core.kruskal_h(ys, starts)
    p = core.chisq_sf(h, df)
    return TestOutcome("kruskal_wallis_raw", h, df, None, p, p <= alpha, alpha)


def covariate_overlap(data: Dataset) -> float:
    """Smallest pairwise intersection/union ratio of covariate ranges."""
    tids = data.treatments()
    worst = 1.0
    for i in range(len(tids)):
        for j in range(i + 1, len(tids)):
            lo1, hi1 = data.covariate_range(tids[i])
            lo2, hi2 = data.covariate_range(tids[j])
            inter = min(hi1, hi2) - max(lo1, lo2)
            union = max(hi1, hi2) - min(lo1, lo2)
            frac = 0.0 if union <= 0.0 else max(inter, 0.0) / union
            worst = min(worst, frac)
    return worst


@dataclass
class StrategyRecommendation:
    """Decision record of the staged analysis strategy.

    Branches: "i" covariate not needed (flat slopes) -> one-way tests on the
    raw responses; "ii" slopes differ -> keep the covariate, no treatment
    test; "iii" parallel slopes with overlapping covariate ranges -> all four
    methods; "iv" parallel slopes but near-disjoint covariate ranges ->
    residual methods only, with warnings.
    """

    branch: str
    alpha: float
    slopes_zero: TestOutcome
    slopes_equal: TestOutcome | None
    overlap_fraction: float | None
    outcomes: dict[str, TestOutcome] = field(default_factory=dict)
    warnings: list[str] = field(default_factory=list)
    advice: str | None = None


def recommend(data: Dataset, alpha: float, overlap_threshold: float = 0.25,
              df_convention: str = DF_PAPER) -> StrategyRecommendation:
    """Run the staged strategy and whichever tests its branch calls for."""
    data.require_treatments()
    gate_zero = test_slopes_zero(data, alpha)
    if not gate_zero.reject:
        rec = StrategyRecommendation("i", alpha, gate_zero, None, None)
        rec.outcomes["anova_raw"] = _anova_raw(data, alpha)
        rec.outcomes["kruskal_wallis_raw"] = _kruskal_raw(data, alpha)
        rec.advice = ("No covariate effect detected; compare treatments with "
                      "the one-way ANOVA or rank test reported on the raw "
                      "responses.")
        return rec
    gate_equal = test_slopes_equal(data, alpha)
    if gate_equal.reject:
        rec = StrategyRecommendation("ii", alpha, gate_zero, gate_equal, None)
        rec.advice = ("Treatment-specific slopes differ; keep the covariate "
                      "as an explanatory variable and compare treatments at "
                      "chosen covariate values with the regression fits.")
        return rec
    overlap = covariate_overlap(data)
    if overlap >= overlap_threshold:
        rec = StrategyRecommendation("iii", alpha, gate_zero, gate_equal, overlap)
        rec.outcomes = run_all_methods(data, alpha, df_convention)
        rec.advice = ("Parallel slopes with overlapping covariate ranges; "
                      "both ANCOVA and the residual-based tests apply. Check "
                      "normality/variance assumptions to pick among them.")
        return rec
    rec = StrategyRecommendation("iv", alpha, gate_zero, gate_equal, overlap)
    rec.outcomes = {
        METHOD_ANOVA_HOV: anova_hov_residuals(data, alpha, df_convention),
        METHOD_ANOVA_NOHOV: anova_nohov_residuals(data, alpha),
        METHOD_KRUSKAL: kruskal_wallis_residuals(data, alpha),
    }
    rec.warnings.append(
        f"covariate ranges barely overlap (fraction {overlap:.4f} < "
        f"{overlap_threshold:g}): treatment and covariate look dependent, so "
        "the ANCOVA independence assumption is doubtful")
    rec.warnings.append(
        "residual-based tests are extremely conservative when covariate "
        "ranges cluster by treatment")
    rec.advice = ("Consider a multivariate comparison of the joint "
                  "(response, covariate) distribution across treatments "
                  "instead of covariate adjustment.")
    return rec
