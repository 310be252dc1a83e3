"""Core data containers: datasets, fitted lines, residuals, test outcomes."""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InputFormatError, InsufficientData

__all__ = ["Dataset", "FittedLine", "ResidualSet", "TestOutcome",
           "METHOD_ANCOVA", "METHOD_ANOVA_HOV", "METHOD_ANOVA_NOHOV",
           "METHOD_KRUSKAL", "METHOD_ORDER", "METHOD_INDEX",
           "load_dataset_csv"]

# Canonical method tags; report tables number them 1..4 in this order.
METHOD_ANCOVA = "ancova"
METHOD_ANOVA_HOV = "anova_hov_resid"
METHOD_ANOVA_NOHOV = "anova_nohov_resid"
METHOD_KRUSKAL = "kruskal_wallis_resid"
METHOD_ORDER = (METHOD_ANCOVA, METHOD_ANOVA_HOV, METHOD_ANOVA_NOHOV,
                METHOD_KRUSKAL)
METHOD_INDEX = {m: i + 1 for i, m in enumerate(METHOD_ORDER)}


@dataclass
class Dataset:
    """Observations (treatment id, covariate x, response y).

    Replicated covariate values are plain repeated rows; grouping by exact
    x equality within a treatment recovers the replicate structure when it
    is needed.
    """

    rows: list[tuple[int, float, float]]
    _groups: dict[int, tuple[list[float], list[float]]] = field(
        default=None, repr=False, compare=False)  # type: ignore[assignment]

    def __post_init__(self):
        self._groups = None

    @property
    def n(self) -> int:
        return len(self.rows)

    def treatments(self) -> list[int]:
        return sorted(self.grouped().keys())

    def grouped(self) -> dict[int, tuple[list[float], list[float]]]:
        """Per-treatment (xs, ys) in row order, keyed by treatment id."""
        if self._groups is None:
            groups: dict[int, tuple[list[float], list[float]]] = {}
            for tid, x, y in self.rows:
                if tid not in groups:
                    groups[tid] = ([], [])
                gx, gy = groups[tid]
                gx.append(x)
                gy.append(y)
            self._groups = groups
        return self._groups

    def group_sizes(self) -> dict[int, int]:
        return {tid: len(xs) for tid, (xs, _ys) in self.grouped().items()}

    def replicate_counts(self, tid: int) -> dict[float, int]:
        """r_ij: multiplicity of each distinct covariate value in a treatment."""
        counts: dict[float, int] = {}
        for x in self.grouped()[tid][0]:
            counts[x] = counts.get(x, 0) + 1
        return counts

    def flat_by_treatment(self) -> tuple[list[float], list[float], list[int]]:
        """(xs, ys, starts) with rows grouped contiguously in treatment order."""
        xs: list[float] = []
        ys: list[float] = []
        starts = [0]
        groups = self.grouped()
        for tid in self.treatments():
            gx, gy = groups[tid]
            xs.extend(gx)
            ys.extend(gy)
            starts.append(len(xs))
        return xs, ys, starts

    def require_treatments(self, minimum: int = 2) -> None:
        if len(self.grouped()) < minimum:
            raise InsufficientData(
                f"need at least {minimum} treatments, found {len(self.grouped())}")

    def covariate_range(self, tid: int) -> tuple[float, float]:
        xs = self.grouped()[tid][0]
        return min(xs), max(xs)


@dataclass(frozen=True)
class FittedLine:
    """Simple OLS fit of y on x."""

    intercept: float
    slope: float
    se_intercept: float
    se_slope: float
    residual_variance: float
    error_df: int

    def predict(self, x: float) -> float:
        return self.intercept + self.slope * x


@dataclass(frozen=True)
class ResidualSet:
    """Residuals keyed by (treatment, x); source records which fit made them."""

    rows: list[tuple[int, float, float]]
    source: str  # "overall" | "treatment-specific"

    def values(self) -> list[float]:
        return [r for _t, _x, r in self.rows]

    def by_treatment(self) -> dict[int, list[float]]:
        out: dict[int, list[float]] = {}
        for tid, _x, r in self.rows:
            out.setdefault(tid, []).append(r)
        return out


@dataclass(frozen=True)
class TestOutcome:
    """Result of one hypothesis test at level alpha (reject iff p <= alpha)."""

    method: str
    statistic: float
    df_num: float
    df_den: float | None
    p_value: float
    reject: bool
    alpha: float

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "statistic": self.statistic,
            "df_num": self.df_num,
            "df_den": self.df_den,
            "p_value": self.p_value,
            "reject": self.reject,
            "alpha": self.alpha,
        }


def load_dataset_csv(text: str) -> Dataset:
    """Parse ``treatment,x,y`` CSV text into a Dataset.

    The header must match exactly (no type inference); errors carry 1-based
    line numbers for diagnostics.
    """
    lines = text.splitlines()
    if not lines:
        raise InputFormatError("empty input", line=1)
    header = lines[0].strip()
    if header != "treatment,x,y":
        raise InputFormatError(
            f"expected header 'treatment,x,y', got {header!r}", line=1)
    rows: list[tuple[int, float, float]] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        stripped = raw.strip()
        if not stripped:
            continue
        parts = stripped.split(",")
        if len(parts) != 3:
            raise InputFormatError(
                f"expected 3 comma-separated fields, got {len(parts)}", line=lineno)
        try:
            tid = int(parts[0].strip())
        except ValueError:
            raise InputFormatError(
                f"treatment id {parts[0].strip()!r} is not an integer",
                line=lineno) from None
        try:
            x = float(parts[1])
            y = float(parts[2])
        except ValueError:
            raise InputFormatError(
                f"non-numeric value in {stripped!r}", line=lineno) from None
        rows.append((tid, x, y))
    if not rows:
        raise InputFormatError("no data rows", line=len(lines))
    return Dataset(rows)
