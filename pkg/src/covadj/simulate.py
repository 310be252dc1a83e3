"""Monte-Carlo harness: case catalog, sample generation, size and power.

Replicate k of a (case, q) cell always consumes the stream
``replicate_stream(case_hash, q, k)``, and batches are reduced in index
order, so a study is bit-reproducible for any thread count.

The built-in catalog holds 16 two-treatment scenarios (each in an "a"
variant with one replicate per covariate value and a "b" variant with two)
spanning normal/non-normal errors, homogeneous/heterogeneous and
covariate-dependent variances, unequal sample sizes, and clustered
covariate ranges.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backend import core
from .data import Dataset
from .distributions import ErrorDistSpec, ErrorKind
from .errors import DomainError, SimulationError, UnknownCaseError
from .rng import RngStream, case_hash, fixed_covariate_stream, pilot_stream
from .special import normal_quantile

__all__ = ["CovariateScheme", "TreatmentSpec", "CaseSpec", "StudyConfig",
           "SizeEstimate", "PowerEstimate", "catalog", "get_case",
           "generate_sample", "pilot_m_u", "estimate_size",
           "estimate_power_curve", "agreement_significance", "size_relations",
           "PAIRS"]

PAIRS = ((1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4))

_Z975 = normal_quantile(0.975)
_Z95 = normal_quantile(0.95)
_BATCH = 512


@dataclass(frozen=True)
class CovariateScheme:
    """Uniform interval, or a fair mix of two disjoint intervals."""

    kind: str  # "uniform" | "two_interval"
    lo1: float
    hi1: float
    lo2: float = 0.0
    hi2: float = 0.0

    def __post_init__(self):
        if self.kind not in ("uniform", "two_interval"):
            raise DomainError(f"unknown covariate scheme {self.kind!r}")
        if not self.lo1 < self.hi1:
            raise DomainError("interval bounds must satisfy lo < hi")
        if self.kind == "two_interval":
            if not self.lo2 < self.hi2:
                raise DomainError("interval bounds must satisfy lo < hi")
            if not self.hi1 <= self.lo2:
                raise DomainError("intervals must be listed in ascending order")

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "CovariateScheme":
        return cls("uniform", lo, hi)

    @classmethod
    def two_interval(cls, lo1: float, hi1: float, lo2: float,
                     hi2: float) -> "CovariateScheme":
        return cls("two_interval", lo1, hi1, lo2, hi2)

    def describe(self) -> str:
        if self.kind == "uniform":
            return f"({self.lo1:g},{self.hi1:g})"
        return f"({self.lo1:g},{self.hi1:g})U({self.lo2:g},{self.hi2:g})"

    def _code(self) -> int:
        return core.S_UNIFORM if self.kind == "uniform" else core.S_TWO_INTERVAL


@dataclass(frozen=True)
class TreatmentSpec:
    error: ErrorDistSpec
    covariates: CovariateScheme
    n: int  # number of distinct covariate values

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("treatment sample size must be positive")


@dataclass(frozen=True)
class CaseSpec:
    """One simulation scenario: two treatments on parallel lines.

    Treatment 1 has intercept ``base_intercept``; treatment 2's intercept is
    shifted by ``intercept_step * q`` where q indexes the separation grid
    (q = 0 is the null configuration).
    """

    case_id: str
    treatment1: TreatmentSpec
    treatment2: TreatmentSpec
    replicates: int = 1
    slope: float = 2.0
    base_intercept: float = 1.0
    intercept_step: float = 0.02

    def __post_init__(self):
        if self.replicates < 1:
            raise DomainError("replicates must be >= 1")

    @property
    def rows_per_sample(self) -> int:
        return (self.treatment1.n + self.treatment2.n) * self.replicates

    def packed(self) -> tuple:
        """Flat tuple consumed by the compute kernels."""
        t1, t2 = self.treatment1, self.treatment2
        s1, s2 = t1.covariates, t2.covariates
        return (t1.n, t2.n, self.replicates,
                t1.error.kind.value, t1.error.variance,
                t2.error.kind.value, t2.error.variance,
                s1._code(), s1.lo1, s1.hi1, s1.lo2, s1.hi2,
                s2._code(), s2.lo1, s2.hi1, s2.lo2, s2.hi2,
                self.slope, self.base_intercept, self.intercept_step,
                case_hash(self.case_id))


@dataclass(frozen=True)
class StudyConfig:
    """Knobs of a size/power run; defaults match the reference study scale."""

    n_mc: int = 10000
    alpha: float = 0.05
    seed: int = 0
    q_grid: tuple[int, ...] | None = None  # None = auto (pilot-sized 1..m_u)
    regenerate_covariates: bool = True
    threads: int = 1
    df_convention: str = "paper"  # residual-ANOVA error df n-t ("restricted": n-t-1)

    def __post_init__(self):
        if self.n_mc < 100:
            raise DomainError("n_mc must be at least 100")
        if not 0.0 < self.alpha < 1.0:
            raise DomainError("alpha must lie in (0, 1)")
        if self.q_grid is not None and any(q < 0 for q in self.q_grid):
            raise DomainError("q grid values must be nonnegative")
        if self.df_convention not in ("paper", "restricted"):
            raise DomainError("df_convention must be 'paper' or 'restricted'")


# ---------------------------------------------------------------------------
# Catalog
# ---------------------------------------------------------------------------

def _norm(v: float) -> ErrorDistSpec:
    return ErrorDistSpec(ErrorKind.NORMAL_VAR, v)


def _unif(halfwidth: float) -> ErrorDistSpec:
    return ErrorDistSpec(ErrorKind.UNIFORM_SYM, halfwidth)


def _base_cases() -> list[tuple[str, ErrorDistSpec, ErrorDistSpec, int, int,
                                CovariateScheme, CovariateScheme]]:
    u010 = CovariateScheme.uniform(0.0, 10.0)
    rt3 = math.sqrt(3.0)
    dw = ErrorDistSpec(ErrorKind.DOUBLE_WEIBULL)
    beta = ErrorDistSpec(ErrorKind.SCALED_BETA62)
    chisq = ErrorDistSpec(ErrorKind.CHISQ2_CENTERED)
    logn = ErrorDistSpec(ErrorKind.LOGNORMAL_CENTERED)
    nsx = ErrorDistSpec(ErrorKind.NORMAL_VAR_SQRTX)
    usx = ErrorDistSpec(ErrorKind.UNIFORM_SQRTX)
    return [
        ("1", _norm(1), _norm(1), 20, 20, u010, u010),
        ("2", _norm(1), _norm(6), 20, 20, u010, u010),
        ("3", _norm(1), nsx, 20, 20, u010, u010),
        ("4", nsx, nsx, 20, 20, u010, u010),
        ("5", _norm(1), _norm(1), 28, 12, u010, u010),
        ("6", _norm(1), _norm(1), 20, 20,
         CovariateScheme.uniform(0.0, 6.0), CovariateScheme.uniform(4.0, 10.0)),
        ("7", _norm(1), _norm(1), 20, 20,
         CovariateScheme.two_interval(0.0, 3.0, 7.0, 10.0),
         CovariateScheme.uniform(4.0, 10.0)),
        ("8", _norm(1), _norm(1), 20, 20,
         CovariateScheme.two_interval(0.0, 4.0, 6.0, 10.0),
         CovariateScheme.uniform(3.0, 7.0)),
        ("9", _unif(rt3), _unif(rt3), 20, 20, u010, u010),
        ("10", _unif(rt3), _unif(2 * rt3), 20, 20, u010, u010),
        ("11", _unif(rt3), usx, 20, 20, u010, u010),
        ("12", dw, dw, 20, 20, u010, u010),
        ("13", beta, beta, 20, 20, u010, u010),
        ("14", chisq, chisq, 20, 20, u010, u010),
        ("15", logn, logn, 20, 20, u010, u010),
        ("16", _norm(2), chisq, 20, 20, u010, u010),
    ]


def catalog() -> dict[str, CaseSpec]:
    """All 32 built-in cases ("Na" one replicate, "Nb" two), in id order."""
    cases: dict[str, CaseSpec] = {}
    for num, e1, e2, n1, n2, s1, s2 in _base_cases():
        for suffix, reps in (("a", 1), ("b", 2)):
            cid = f"{num}{suffix}"
            cases[cid] = CaseSpec(cid,
                                  TreatmentSpec(e1, s1, n1),
                                  TreatmentSpec(e2, s2, n2),
                                  replicates=reps)
    return cases


def get_case(case_id: str,
             extra: dict[str, CaseSpec] | None = None) -> CaseSpec:
    cases = catalog()
    if extra:
        cases.update(extra)
    try:
        return cases[case_id]
    except KeyError:
        raise UnknownCaseError(
            f"unknown case {case_id!r}; valid ids: {', '.join(cases)}") from None


# ---------------------------------------------------------------------------
# Sample generation
# ---------------------------------------------------------------------------

def generate_sample(case: CaseSpec, q: int, rng: RngStream,
                    fixed: tuple[list[float], list[float]] | None = None) -> Dataset:
    """One dataset for ``case`` at separation-grid position q.

    Covariates are drawn fresh from the case's schemes (or taken from
    ``fixed``), each repeated ``case.replicates`` times with independent
    error draws.
    """
    if q < 0:
        raise DomainError("q must be nonnegative")
    f1, f2 = (fixed if fixed is not None else (None, None))
    x1, y1, x2, y2 = core.generate_case(case.packed(), q, rng.seed, rng.stream,
                                        f1, f2)
    rows = [(1, x, y) for x, y in zip(x1, y1)]
    rows += [(2, x, y) for x, y in zip(x2, y2)]
    return Dataset(rows)


def draw_fixed_covariates(case: CaseSpec, seed: int,
                          salt: int = 0) -> tuple[list[float], list[float]]:
    """The one-off covariate draw used when the design is held fixed."""
    rng = RngStream(seed, fixed_covariate_stream(case_hash(case.case_id), salt))
    out = []
    for spec in (case.treatment1, case.treatment2):
        s = spec.covariates
        if s.kind == "uniform":
            out.append([rng.uniform(s.lo1, s.hi1) for _ in range(spec.n)])
        else:
            xs = []
            for _ in range(spec.n):
                if rng.uniform01() < 0.5:
                    xs.append(rng.uniform(s.lo1, s.hi1))
                else:
                    xs.append(rng.uniform(s.lo2, s.hi2))
            out.append(xs)
    return out[0], out[1]


# ---------------------------------------------------------------------------
# Replicate batches
# ---------------------------------------------------------------------------

def _mc_counts(case: CaseSpec, q: int, cfg: StudyConfig) -> list[int]:
    """Histogram of rejection patterns over cfg.n_mc replicates at q."""
    packed = case.packed()
    extra = 1 if cfg.df_convention == "restricted" else 0
    fixed1 = fixed2 = None
    if not cfg.regenerate_covariates:
        fixed1, fixed2 = draw_fixed_covariates(case, cfg.seed)
    spans = [(k0, min(_BATCH, cfg.n_mc - k0))
             for k0 in range(0, cfg.n_mc, _BATCH)]

    def run(span):
        k0, cnt = span
        return core.simulate_batch(packed, q, cfg.alpha, cfg.seed, k0, cnt,
                                   extra, fixed1, fixed2)

    if cfg.threads > 1 and len(spans) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(run, spans))
    else:
        results = [run(s) for s in spans]
    counts = [0] * 16
    for (batch, err_k, err_code) in results:  # fixed batch order: deterministic
        if err_k >= 0:
            raise SimulationError(
                f"case {case.case_id} q={q} replicate {err_k}: {err_code}")
        for i in range(16):
            counts[i] += batch[i]
    return counts


def _method_counts(counts16: list[int]) -> tuple[int, int, int, int]:
    out = [0, 0, 0, 0]
    for pattern, c in enumerate(counts16):
        for m in range(4):
            if pattern & (1 << m):
                out[m] += c
    return tuple(out)


def _joint_counts(counts16: list[int]) -> dict[tuple[int, int], int]:
    joint = {pair: 0 for pair in PAIRS}
    for pattern, c in enumerate(counts16):
        for (i, j) in PAIRS:
            if (pattern & (1 << (i - 1))) and (pattern & (1 << (j - 1))):
                joint[(i, j)] += c
    return joint


# ---------------------------------------------------------------------------
# Significance helpers (proportions from the same replicate set)
# ---------------------------------------------------------------------------

def proportion_ci(count: int, n: int) -> tuple[float, float]:
    """95% normal-approximation CI for a binomial proportion."""
    p = count / n
    half = _Z975 * math.sqrt(p * (1.0 - p) / n)
    return p - half, p + half


def size_verdict(count: int, n: int, alpha: float) -> str:
    lo, hi = proportion_ci(count, n)
    if lo > alpha:
        return "liberal"
    if hi < alpha:
        return "conservative"
    return "nominal"


def agreement_significance(counts: tuple[int, int, int, int],
                           joint: dict[tuple[int, int], int],
                           n_mc: int) -> dict[tuple[int, int], str]:
    """Flag each pair 's' when the agreement proportion sits significantly
    below the smaller of the two empirical sizes ('n' otherwise).

    Wald difference CI with independent-variance terms and a one-sided 5%
    threshold; the paired variance is far tighter and would flag tiny,
    practically meaningless gaps.
    """
    flags = {}
    for (i, j) in PAIRS:
        if joint[(i, j)] > min(counts[i - 1], counts[j - 1]):
            raise DomainError("joint count exceeds a marginal count")
        p_min = min(counts[i - 1], counts[j - 1]) / n_mc
        p_joint = joint[(i, j)] / n_mc
        d = p_min - p_joint
        se = math.sqrt((p_min * (1.0 - p_min) + p_joint * (1.0 - p_joint)) / n_mc)
        flags[(i, j)] = "s" if d > _Z95 * se else "n"
    return flags


def size_relations(counts: tuple[int, int, int, int],
                   joint: dict[tuple[int, int], int],
                   n_mc: int) -> dict[tuple[int, int], str]:
    """Pairwise empirical-size comparison on shared replicates.

    Paired z on the discordant counts (b = i-only rejections, c = j-only);
    |z| >= 1.645 marks a significant difference, '<' or '>' by sign,
    otherwise '~'.
    """
    rel = {}
    for (i, j) in PAIRS:
        b = counts[i - 1] - joint[(i, j)]
        c = counts[j - 1] - joint[(i, j)]
        diff = (b - c) / n_mc
        var = (b + c) / n_mc - diff * diff
        se = math.sqrt(var / n_mc) if var > 0.0 else 0.0
        if se == 0.0:
            rel[(i, j)] = "~" if b == c else ("<" if b < c else ">")
            continue
        z = diff / se
        if z <= -_Z95:
            rel[(i, j)] = "<"
        elif z >= _Z95:
            rel[(i, j)] = ">"
        else:
            rel[(i, j)] = "~"
    return rel


# ---------------------------------------------------------------------------
# Size and power estimates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SizeEstimate:
    """Null-configuration rejection counts and the derived comparisons."""

    case_id: str
    n_mc: int
    alpha: float
    counts: tuple[int, int, int, int]
    joint: dict[tuple[int, int], int]

    def alpha_hat(self, method: int) -> float:
        return self.counts[method - 1] / self.n_mc

    def ci(self, method: int) -> tuple[float, float]:
        return proportion_ci(self.counts[method - 1], self.n_mc)

    def verdict(self, method: int) -> str:
        return size_verdict(self.counts[method - 1], self.n_mc, self.alpha)

    def agreement(self, i: int, j: int) -> float:
        return self.joint[(i, j)] / self.n_mc

    def agreement_flags(self) -> dict[tuple[int, int], str]:
        return agreement_significance(self.counts, self.joint, self.n_mc)

    def relations(self) -> dict[tuple[int, int], str]:
        return size_relations(self.counts, self.joint, self.n_mc)


@dataclass(frozen=True)
class PowerEstimate:
    """Rejection counts along the separation grid q = qs[0..]."""

    case_id: str
    n_mc: int
    alpha: float
    intercept_step: float
    qs: tuple[int, ...]
    counts: tuple[tuple[int, int, int, int], ...]  # one 4-tuple per q

    def power(self, method: int, q: int) -> float:
        return self.counts[self.qs.index(q)][method - 1] / self.n_mc

    def kappa_q(self, method: int) -> int | None:
        """First grid position where every replicate rejected, if any."""
        for q, row in zip(self.qs, self.counts):
            if row[method - 1] == self.n_mc:
                return q
        return None

    def kappa(self, method: int) -> float | None:
        q = self.kappa_q(method)
        return None if q is None else self.intercept_step * q


def estimate_size(case: CaseSpec, cfg: StudyConfig) -> SizeEstimate:
    """Empirical size of all four methods at the null (q = 0)."""
    counts16 = _mc_counts(case, 0, cfg)
    return SizeEstimate(case.case_id, cfg.n_mc, cfg.alpha,
                        _method_counts(counts16), _joint_counts(counts16))


def estimate_power_curve(case: CaseSpec, cfg: StudyConfig,
                         q_max: int) -> PowerEstimate:
    """Rejection rates over q = 1..q_max (or cfg.q_grid when given)."""
    if cfg.q_grid is not None:
        qs = tuple(sorted(set(cfg.q_grid) - {0}))
    else:
        qs = tuple(range(1, q_max + 1))
    if not qs:
        raise DomainError("power grid is empty")
    rows = []
    for q in qs:
        rows.append(_method_counts(_mc_counts(case, q, cfg)))
    return PowerEstimate(case.case_id, cfg.n_mc, cfg.alpha,
                         case.intercept_step, qs, tuple(rows))


# ---------------------------------------------------------------------------
# Pilot sizing of the separation grid
# ---------------------------------------------------------------------------

def _m_u_from_max_se(max_se: float, intercept_step: float) -> int:
    """ceil(2.5 * max_se / step), tolerant of float noise at exact integers."""
    return max(1, math.ceil(2.5 * max_se / intercept_step - 1e-9))


def pilot_m_u(case: CaseSpec, rng: RngStream,
              samples_per_q: int = 1000) -> int:
    """Pilot-sized top of the separation grid.

    Runs q = 0..5 with ``samples_per_q`` samples each, fits the
    per-treatment lines, and records the largest intercept standard error
    seen across all fits and both treatments; the grid stops where the
    intercepts sit ~2.5 of those standard errors apart.
    """
    chash = case_hash(case.case_id)
    packed = case.packed()
    max_se = 0.0
    for q in range(6):
        for k in range(samples_per_q):
            stream = pilot_stream(chash, q, k, rng.stream)
            x1, y1, x2, y2 = core.generate_case(packed, q, rng.seed, stream,
                                                None, None)
            for xs, ys in ((x1, y1), (x2, y2)):
                out = core.linefit(xs, ys)
                if out[2] > max_se:
                    max_se = out[2]
    return _m_u_from_max_se(max_se, case.intercept_step)
