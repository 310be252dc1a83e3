"""Pure-Python compute core.

Twin of the compiled core in ``covadj._ccore``: same generator, same
special-function algorithms, same operation order everywhere, so the two
backends produce bit-identical numbers on the same platform/libm.  The
backend is picked once at import by ``covadj.backend``.

Only the stdlib ``math`` module is used; summations are plain sequential
left-to-right loops on purpose (matching the C twin's order exactly).
"""

from __future__ import annotations

import math

BACKEND_NAME = "python"

_MASK = 0xFFFFFFFFFFFFFFFF

# SplitMix64 increment and stream-decorrelation multipliers.
_GOLDEN = 0x9E3779B97F4A7C15
_STREAM_MULT = 0xD1B54A32D192ED03
_REPL_MULT = 0x2545F4914F6CDD1D

_SQRT48 = math.sqrt(48.0)
_LN_MEAN = math.exp(0.5)  # mean of the standard log-normal
_INV2_53 = 1.0 / 9007199254740992.0

# Error-distribution kind codes (shared with the C core and covadj.distributions).
K_NORMAL_VAR = 0
K_UNIFORM_SYM = 1
K_DOUBLE_WEIBULL = 2
K_SCALED_BETA62 = 3
K_CHISQ2_CENTERED = 4
K_LOGNORMAL_CENTERED = 5
K_NORMAL_VAR_SQRTX = 6
K_UNIFORM_SQRTX = 7

# Covariate scheme codes.
S_UNIFORM = 0
S_TWO_INTERVAL = 1


# ---------------------------------------------------------------------------
# Stream derivation
# ---------------------------------------------------------------------------

def mix64(z: int) -> int:
    """SplitMix64 finalizer; bijective on 64-bit words."""
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def replicate_stream(case_hash: int, q: int, k: int) -> int:
    """Stream index for replicate k of a (case, q) cell.

    Pure function of its arguments, so any scheduling of replicates over
    threads replays identical draws.
    """
    h = mix64(case_hash ^ (((q + 1) * _STREAM_MULT) & _MASK))
    return mix64(h ^ (((k + 1) * _REPL_MULT) & _MASK))


class RngState:
    """xoshiro256++ state plus the spare deviate of the polar method."""

    __slots__ = ("s0", "s1", "s2", "s3", "has_g", "g")

    def __init__(self, s0, s1, s2, s3):
        self.s0 = s0
        self.s1 = s1
        self.s2 = s2
        self.s3 = s3
        self.has_g = False
        self.g = 0.0


def rng_new(seed: int, stream: int) -> RngState:
    """Independent generator for a (seed, stream) pair.

    The xoshiro256++ state is filled from SplitMix64 started at a key that
    mixes seed and stream twice, so neighbouring stream indices share no
    state words.
    """
    z = mix64(mix64(seed & _MASK) ^ ((stream * _STREAM_MULT) & _MASK))
    words = []
    for _ in range(4):
        z = (z + _GOLDEN) & _MASK
        words.append(mix64(z))
    if not (words[0] | words[1] | words[2] | words[3]):
        words[0] = _GOLDEN  # all-zero state is the one forbidden point
    return RngState(*words)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & _MASK


def rng_u64(st: RngState) -> int:
    s0, s1, s2, s3 = st.s0, st.s1, st.s2, st.s3
    result = (_rotl((s0 + s3) & _MASK, 23) + s0) & _MASK
    t = (s1 << 17) & _MASK
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    st.s0, st.s1, st.s2, st.s3 = s0, s1, s2, s3
    return result


def rng_u01(st: RngState) -> float:
    """Uniform double in [0, 1) with 53 random bits."""
    return (rng_u64(st) >> 11) * _INV2_53


def rng_uniform(st: RngState, lo: float, hi: float) -> float:
    return lo + (hi - lo) * rng_u01(st)


def rng_normal(st: RngState) -> float:
    """Standard normal via the Marsaglia polar method (spare cached)."""
    if st.has_g:
        st.has_g = False
        return st.g
    while True:
        u = 2.0 * rng_u01(st) - 1.0
        v = 2.0 * rng_u01(st) - 1.0
        s = u * u + v * v
        if 0.0 < s < 1.0:
            break
    f = math.sqrt(-2.0 * math.log(s) / s)
    st.g = v * f
    st.has_g = True
    return u * f


def rng_exponential(st: RngState) -> float:
    """Exp(1) by inversion; u < 1 always, so the log argument is positive."""
    return -math.log(1.0 - rng_u01(st))


def sample_error(st: RngState, kind: int, param: float, x: float) -> float:
    """One draw from a centered error distribution.

    ``param`` is the variance for K_NORMAL_VAR and the half-width for
    K_UNIFORM_SYM; ``x`` feeds the covariate-dependent kinds (caller
    validates x > 0 for those).
    """
    if kind == K_NORMAL_VAR:
        return rng_normal(st) * math.sqrt(param)
    if kind == K_UNIFORM_SYM:
        return rng_uniform(st, -param, param)
    if kind == K_DOUBLE_WEIBULL:
        # |X|^3 ~ Exp(1); a raw bit picks the sign.
        sign = -1.0 if (rng_u64(st) & 1) else 1.0
        return sign * math.pow(rng_exponential(st), 1.0 / 3.0)
    if kind == K_SCALED_BETA62:
        g1 = (rng_exponential(st) + rng_exponential(st) + rng_exponential(st)
              + rng_exponential(st) + rng_exponential(st) + rng_exponential(st))
        g2 = rng_exponential(st) + rng_exponential(st)
        return _SQRT48 * (g1 / (g1 + g2) - 0.75)
    if kind == K_CHISQ2_CENTERED:
        return 2.0 * rng_exponential(st) - 2.0
    if kind == K_LOGNORMAL_CENTERED:
        return math.exp(rng_normal(st)) - _LN_MEAN
    if kind == K_NORMAL_VAR_SQRTX:
        # variance = sqrt(x), hence sd = x**(1/4)
        return rng_normal(st) * math.sqrt(math.sqrt(x))
    if kind == K_UNIFORM_SQRTX:
        r = math.sqrt(x)
        return rng_uniform(st, -r, r)
    raise ValueError(f"unknown error kind {kind}")


def sample_error_block(st: RngState, kind: int, param: float, x: float,
                       n: int) -> tuple[float, float, float, float]:
    """(sum, sum of squares, min, max) over n draws; moments-test helper."""
    total = 0.0
    total2 = 0.0
    lo = math.inf
    hi = -math.inf
    for _ in range(n):
        v = sample_error(st, kind, param, x)
        total += v
        total2 += v * v
        if v < lo:
            lo = v
        if v > hi:
            hi = v
    return total, total2, lo, hi


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

_LANCZOS = (
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5,
)

_EPS = 1e-15
_FPMIN = 1e-300
_ITMAX = 500


def lgamma_(x: float) -> float:
    """log Gamma(x), x > 0, Lanczos g=4.7421875 (14 coefficients, ~1e-14 rel)."""
    y = x
    tmp = x + 5.24218750000000000
    tmp = (x + 0.5) * math.log(tmp) - tmp
    ser = 0.999999999999997092
    for c in _LANCZOS:
        y += 1.0
        ser += c / y
    return tmp + math.log(2.5066282746310005 * ser / x)


def _betacf(a: float, b: float, x: float) -> float:
    """Lentz continued fraction for the incomplete beta."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _ITMAX + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return h


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b), 0 <= x <= 1."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lbt = (lgamma_(a + b) - lgamma_(a) - lgamma_(b)
           + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def _gamma_p(a: float, x: float) -> float:
    """Regularized lower incomplete gamma P(a, x); series / CF split at a+1."""
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        ap = a
        summ = 1.0 / a
        delta = summ
        for _ in range(_ITMAX):
            ap += 1.0
            delta *= x / ap
            summ += delta
            if abs(delta) < abs(summ) * _EPS:
                break
        return summ * math.exp(-x + a * math.log(x) - lgamma_(a))
    return 1.0 - _gamma_q_cf(a, x)


def _gamma_q_cf(a: float, x: float) -> float:
    """Upper tail Q(a, x) by Lentz continued fraction; valid for x >= a+1."""
    b = x + 1.0 - a
    c = 1.0 / _FPMIN
    d = 1.0 / b
    h = d
    for i in range(1, _ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    return math.exp(-x + a * math.log(x) - lgamma_(a)) * h


def _gamma_q(a: float, x: float) -> float:
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - _gamma_p(a, x)
    return _gamma_q_cf(a, x)


def f_cdf(x: float, d1: float, d2: float) -> float:
    if x <= 0.0:
        return 0.0
    return reg_inc_beta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))


def f_sf(x: float, d1: float, d2: float) -> float:
    """Upper tail of the F distribution, computed without 1-CDF cancellation."""
    if x <= 0.0:
        return 1.0
    if math.isinf(x):
        return 0.0
    return reg_inc_beta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x))


def chisq_cdf(x: float, k: float) -> float:
    if x <= 0.0:
        return 0.0
    return _gamma_p(0.5 * k, 0.5 * x)


def chisq_sf(x: float, k: float) -> float:
    if x <= 0.0:
        return 1.0
    return _gamma_q(0.5 * k, 0.5 * x)


# AS241 (PPND16) rational approximations for the normal quantile.
_Q_A = (3.3871328727963666080, 133.14166789178437745, 1971.5909503065514427,
        13731.693765509461125, 45921.953931549871457, 67265.770927008700853,
        33430.575583588128105, 2509.0809287301226727)
_Q_B = (1.0, 42.313330701600911252, 687.18700749205790830, 5394.1960214247511077,
        21213.794301586595867, 39307.895800092710610, 28729.085735721942674,
        5226.4952788528545610)
_Q_C = (1.42343711074968357734, 4.63033784615654529590, 5.76949722146069140550,
        3.64784832476320460504, 1.27045825245236838258, 0.241780725177450611770,
        0.0227238449892691845833, 7.7454501427834140764e-4)
_Q_D = (1.0, 2.05319162663775882187, 1.67638483018380384940, 0.689767334985100004550,
        0.148103976427480074590, 0.0151986665636164571966, 5.47593808499534494600e-4,
        1.05075007164441684324e-9)
_Q_E = (6.65790464350110377720, 5.46378491116411436990, 1.78482653991729133580,
        0.296560571828504891230, 0.0265321895265761230930, 0.00124266094738807843860,
        2.71155556874348757815e-5, 2.01033439929228813265e-7)
_Q_F = (1.0, 0.599832206555887937690, 0.136929880922735805310, 0.0148753612908506148525,
        7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
        2.04426310338993978564e-15)


def _poly(coefs, r: float) -> float:
    v = coefs[7]
    for i in range(6, -1, -1):
        v = v * r + coefs[i]
    return v


def normal_quantile(p: float) -> float:
    """Standard normal inverse CDF (Wichura's PPND16), |err| < 1e-15."""
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_Q_A, r) / _poly(_Q_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_Q_C, r) / _poly(_Q_D, r)
    else:
        r -= 5.0
        val = _poly(_Q_E, r) / _poly(_Q_F, r)
    return -val if q < 0.0 else val


# ---------------------------------------------------------------------------
# Regression and test statistics on flat arrays
# ---------------------------------------------------------------------------
# Group layout: values are stored group-contiguously; ``starts`` holds the
# t+1 boundaries (starts[0]=0 .. starts[t]=n).

def linefit(xs, ys):
    """Simple OLS fit.

    Returns (intercept, slope, se_intercept, se_slope, residual_variance,
    error_df, xbar, ybar, sxx, sse).  Raises ValueError("too_few_points") for
    n < 3 and ValueError("degenerate_x") when all x coincide.
    """
    n = len(xs)
    if n < 3:
        raise ValueError("too_few_points")
    sx = 0.0
    sy = 0.0
    for i in range(n):
        sx += xs[i]
        sy += ys[i]
    xbar = sx / n
    ybar = sy / n
    sxx = 0.0
    sxy = 0.0
    syy = 0.0
    for i in range(n):
        dx = xs[i] - xbar
        dy = ys[i] - ybar
        sxx += dx * dx
        sxy += dx * dy
        syy += dy * dy
    if sxx <= 0.0:
        raise ValueError("degenerate_x")
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    sse = syy - sxy * sxy / sxx
    if sse < 0.0:
        sse = 0.0
    df = n - 2
    rvar = sse / df
    se_slope = math.sqrt(rvar / sxx)
    se_int = math.sqrt(rvar * (1.0 / n + xbar * xbar / sxx))
    return (intercept, slope, se_int, se_slope, rvar, df, xbar, ybar, sxx, sse)


def _group_stats(vals, starts):
    """Per-group (size, mean) plus grand mean, all in fixed order."""
    t = len(starts) - 1
    n = starts[t]
    means = []
    total = 0.0
    for g in range(t):
        s = 0.0
        for i in range(starts[g], starts[g + 1]):
            s += vals[i]
        size = starts[g + 1] - starts[g]
        means.append(s / size)
        total += s
    return means, total / n


def ancova_f(xs, ys, starts):
    """Common-slope ANCOVA F for equal intercepts.

    Extra sum of squares of the single-line model over the parallel-lines
    model; df (t-1, n-t-1).  Returns (F, df_num, df_den).
    """
    t = len(starts) - 1
    n = starts[t]
    if n - t - 1 < 1:
        raise ValueError("too_few_points")
    exx = 0.0
    exy = 0.0
    eyy = 0.0
    for g in range(t):
        lo = starts[g]
        hi = starts[g + 1]
        m = hi - lo
        sx = 0.0
        sy = 0.0
        for i in range(lo, hi):
            sx += xs[i]
            sy += ys[i]
        mx = sx / m
        my = sy / m
        for i in range(lo, hi):
            dx = xs[i] - mx
            dy = ys[i] - my
            exx += dx * dx
            exy += dx * dy
            eyy += dy * dy
    if exx <= 0.0:
        raise ValueError("degenerate_x")
    sx = 0.0
    sy = 0.0
    for i in range(n):
        sx += xs[i]
        sy += ys[i]
    mx = sx / n
    my = sy / n
    txx = 0.0
    txy = 0.0
    tyy = 0.0
    for i in range(n):
        dx = xs[i] - mx
        dy = ys[i] - my
        txx += dx * dx
        txy += dx * dy
        tyy += dy * dy
    if txx <= 0.0:
        raise ValueError("degenerate_x")
    sse_full = eyy - exy * exy / exx
    sse_red = tyy - txy * txy / txx
    sstrt = sse_red - sse_full
    if sstrt < 0.0:
        sstrt = 0.0
    df1 = float(t - 1)
    df2 = float(n - t - 1)
    if sse_full <= 0.0:
        f = 0.0 if sstrt <= 0.0 else math.inf
    else:
        f = (sstrt / df1) / (sse_full / df2)
    return f, df1, df2


def oneway_f(vals, starts, extra: int):
    """One-way fixed-effects ANOVA F; MSE df = n - t - extra.

    ``extra`` is 0 for the conventional df and 1 when one further linear
    restriction on the responses is charged to the error df.
    """
    t = len(starts) - 1
    n = starts[t]
    df2 = n - t - extra
    if df2 < 1:
        raise ValueError("too_few_points")
    means, grand = _group_stats(vals, starts)
    sstrt = 0.0
    for g in range(t):
        size = starts[g + 1] - starts[g]
        d = means[g] - grand
        sstrt += size * d * d
    sse = 0.0
    for g in range(t):
        for i in range(starts[g], starts[g + 1]):
            d = vals[i] - means[g]
            sse += d * d
    df1 = float(t - 1)
    if sse <= 0.0:
        f = 0.0 if sstrt <= 0.0 else math.inf
    else:
        f = (sstrt / df1) / (sse / df2)
    return f, df1, float(df2)


def welch_f(vals, starts):
    """Heteroscedastic one-way ANOVA F with Satterthwaite denominator df.

    Raises ValueError("too_few:<g>") for a group below 2 values and
    ValueError("zero_variance:<g>") for a zero within-group variance.
    """
    t = len(starts) - 1
    wsum = 0.0
    wm = 0.0
    ws = []
    ms = []
    for g in range(t):
        lo = starts[g]
        hi = starts[g + 1]
        size = hi - lo
        if size < 2:
            raise ValueError(f"too_few:{g}")
        s = 0.0
        for i in range(lo, hi):
            s += vals[i]
        mean = s / size
        v = 0.0
        for i in range(lo, hi):
            d = vals[i] - mean
            v += d * d
        v /= size - 1
        if v <= 0.0:
            raise ValueError(f"zero_variance:{g}")
        w = size / v
        ws.append(w)
        ms.append(mean)
        wsum += w
        wm += w * mean
    wm /= wsum
    a = 0.0
    lam = 0.0
    for g in range(t):
        d = ms[g] - wm
        a += ws[g] * d * d
        r = 1.0 - ws[g] / wsum
        size = starts[g + 1] - starts[g]
        lam += r * r / (size - 1)
    df1 = float(t - 1)
    a /= df1
    b = 1.0 + (2.0 * (t - 2) / (t * t - 1.0)) * lam
    f = a / b
    df2 = (t * t - 1.0) / (3.0 * lam)
    return f, df1, df2


def kruskal_h(vals, starts):
    """Kruskal-Wallis H with midranks and the tie-correction divisor.

    Returns (H, df).  All-tied input yields H = 0 (divisor would vanish).
    """
    t = len(starts) - 1
    n = starts[t]
    group = [0] * n
    for g in range(t):
        for i in range(starts[g], starts[g + 1]):
            group[i] = g
    order = sorted(range(n), key=lambda i: vals[i])
    rsum = [0.0] * t
    tiesum = 0.0
    i = 0
    while i < n:
        j = i + 1
        vi = vals[order[i]]
        while j < n and vals[order[j]] == vi:
            j += 1
        midrank = 0.5 * (i + 1 + j)  # average of 1-based positions i+1 .. j
        for k in range(i, j):
            rsum[group[order[k]]] += midrank
        c = j - i
        if c > 1:
            tiesum += float(c) * c * c - c
        i = j
    h = 0.0
    for g in range(t):
        size = starts[g + 1] - starts[g]
        h += rsum[g] * rsum[g] / size
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0)
    denom = 1.0 - tiesum / (float(n) * n * n - n)
    if denom <= 0.0:
        return 0.0, float(t - 1)
    h /= denom
    if h < 0.0:
        h = 0.0
    return h, float(t - 1)


# ---------------------------------------------------------------------------
# Sample generation and the Monte-Carlo replicate kernel
# ---------------------------------------------------------------------------
# Packed case layout (plain tuple, shared with the C core):
#   (n1, n2, reps,
#    ekind1, eparam1, ekind2, eparam2,
#    skind1, s1a, s1b, s1c, s1d,
#    skind2, s2a, s2b, s2c, s2d,
#    slope, mu_base, mu_step, case_hash)

def _draw_covariate(st, skind, a, b, c, d):
    if skind == S_UNIFORM:
        return rng_uniform(st, a, b)
    # fair coin picks the interval, then uniform within it
    if rng_u01(st) < 0.5:
        return rng_uniform(st, a, b)
    return rng_uniform(st, c, d)


def generate_case(packed, q, seed, stream, fixed1, fixed2):
    """One sample for a case at intercept-grid position q.

    Returns flat per-treatment arrays (x1, y1, x2, y2) with covariates
    repeated ``reps`` times.  Draw order: treatment 1 covariates, treatment 1
    errors, then treatment 2 likewise.  ``fixed1``/``fixed2`` replace the
    covariate draws when given (fixed-design mode).
    """
    (n1, n2, reps, ek1, ep1, ek2, ep2,
     sk1, s1a, s1b, s1c, s1d, sk2, s2a, s2b, s2c, s2d,
     slope, mu_base, mu_step, _case_hash) = packed
    st = rng_new(seed, stream)
    out = []
    for (ni, ek, ep, sk, sa, sb, sc, sd, mu, fixed) in (
            (n1, ek1, ep1, sk1, s1a, s1b, s1c, s1d, mu_base, fixed1),
            (n2, ek2, ep2, sk2, s2a, s2b, s2c, s2d, mu_base + mu_step * q, fixed2)):
        if fixed is None:
            xs = [_draw_covariate(st, sk, sa, sb, sc, sd) for _ in range(ni)]
        else:
            xs = list(fixed)
        xf = []
        yf = []
        for j in range(ni):
            xj = xs[j]
            base = mu + slope * xj
            for _ in range(reps):
                xf.append(xj)
                yf.append(base + sample_error(st, ek, ep, xj))
        out.append(xf)
        out.append(yf)
    return out[0], out[1], out[2], out[3]


def simulate_batch(packed, q, alpha, seed, k0, count, extra_df, fixed1, fixed2):
    """Run replicates k0 .. k0+count-1 of a (case, q) cell.

    Returns (counts, err_k, err_code): ``counts`` is a 16-slot histogram of
    the per-replicate rejection bit patterns (bit 0 ANCOVA, bit 1 residual
    ANOVA, bit 2 heteroscedastic residual ANOVA, bit 3 Kruskal-Wallis).  On a
    replicate-level failure err_k/err_code identify it and counts is partial.
    """
    (n1, n2, reps, ek1, ep1, ek2, ep2,
     sk1, s1a, s1b, s1c, s1d, sk2, s2a, s2b, s2c, s2d,
     slope, mu_base, mu_step, case_hash) = packed
    m1 = n1 * reps
    m2 = n2 * reps
    starts = [0, m1, m1 + m2]
    counts = [0] * 16
    for k in range(k0, k0 + count):
        stream = replicate_stream(case_hash, q, k)
        x1, y1, x2, y2 = generate_case(packed, q, seed, stream, fixed1, fixed2)
        xs = x1 + x2
        ys = y1 + y2
        try:
            f1, d1n, d1d = ancova_f(xs, ys, starts)
            p1 = f_sf(f1, d1n, d1d)
            # residuals from the overall line, ignoring treatment labels
            (a0, b0, _si, _ss, _rv, _df,
             _xb, _yb, _sxx, _sse) = linefit(xs, ys)
            r = [ys[i] - (a0 + b0 * xs[i]) for i in range(len(xs))]
            f2, d2n, d2d = oneway_f(r, starts, extra_df)
            p2 = f_sf(f2, d2n, d2d)
            f3, d3n, d3d = welch_f(r, starts)
            p3 = f_sf(f3, d3n, d3d)
            h, hdf = kruskal_h(r, starts)
            p4 = chisq_sf(h, hdf)
        except ValueError as exc:
            return counts, k, str(exc)
        pattern = 0
        if p1 <= alpha:
            pattern |= 1
        if p2 <= alpha:
            pattern |= 2
        if p3 <= alpha:
            pattern |= 4
        if p4 <= alpha:
            pattern |= 8
        counts[pattern] += 1
    return counts, -1, ""
