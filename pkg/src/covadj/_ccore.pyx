# cython: language_level=3
"""Compiled compute core.

Bit-identical twin of ``covadj._pycore``: the same xoshiro256++/SplitMix64
generator, the same special-function algorithms with the same constants,
and the same summation order in every statistic.  Keep the two files in
lockstep; tests/test_backends.py enforces the agreement.

The batch kernel releases the GIL, so the harness's thread pool scales on
this backend.
"""

from libc.math cimport (INFINITY, exp, fabs, isinf, log, log1p, pow, sqrt)
from libc.stdint cimport int64_t, uint64_t
from libc.stdlib cimport free, malloc

BACKEND_NAME = "c"

K_NORMAL_VAR = 0
K_UNIFORM_SYM = 1
K_DOUBLE_WEIBULL = 2
K_SCALED_BETA62 = 3
K_CHISQ2_CENTERED = 4
K_LOGNORMAL_CENTERED = 5
K_NORMAL_VAR_SQRTX = 6
K_UNIFORM_SQRTX = 7

S_UNIFORM = 0
S_TWO_INTERVAL = 1

_PY_MASK = 0xFFFFFFFFFFFFFFFF

cdef uint64_t _GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t _STREAM_MULT = 0xD1B54A32D192ED03ULL
cdef uint64_t _REPL_MULT = 0x2545F4914F6CDD1DULL

cdef double _SQRT48 = sqrt(48.0)
cdef double _LN_MEAN = exp(0.5)
cdef double _INV2_53 = 1.0 / 9007199254740992.0

cdef double _EPS = 1e-15
cdef double _FPMIN = 1e-300
cdef int _ITMAX = 500


# ---------------------------------------------------------------------------
# Stream derivation and the generator
# ---------------------------------------------------------------------------

cdef inline uint64_t c_mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline uint64_t c_replicate_stream(uint64_t case_hash, int64_t q,
                                        int64_t k) nogil:
    cdef uint64_t h = c_mix64(case_hash ^ ((<uint64_t>(q + 1)) * _STREAM_MULT))
    return c_mix64(h ^ ((<uint64_t>(k + 1)) * _REPL_MULT))


def mix64(z):
    """SplitMix64 finalizer; bijective on 64-bit words."""
    return c_mix64(<uint64_t>(z & _PY_MASK))


def replicate_stream(case_hash, q, k):
    """Stream index for replicate k of a (case, q) cell."""
    return c_replicate_stream(<uint64_t>(case_hash & _PY_MASK), q, k)


cdef struct Rng:
    uint64_t s0, s1, s2, s3
    int has_g
    double g


cdef void c_rng_seed(Rng* r, uint64_t seed, uint64_t stream) nogil:
    cdef uint64_t z = c_mix64(c_mix64(seed) ^ (stream * _STREAM_MULT))
    cdef uint64_t w[4]
    cdef int i
    for i in range(4):
        z = z + _GOLDEN
        w[i] = c_mix64(z)
    if (w[0] | w[1] | w[2] | w[3]) == 0:
        w[0] = _GOLDEN
    r.s0 = w[0]
    r.s1 = w[1]
    r.s2 = w[2]
    r.s3 = w[3]
    r.has_g = 0
    r.g = 0.0


cdef inline uint64_t _rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t c_rng_u64(Rng* r) nogil:
    cdef uint64_t s0 = r.s0, s1 = r.s1, s2 = r.s2, s3 = r.s3
    cdef uint64_t result = _rotl(s0 + s3, 23) + s0
    cdef uint64_t t = s1 << 17
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = _rotl(s3, 45)
    r.s0 = s0
    r.s1 = s1
    r.s2 = s2
    r.s3 = s3
    return result


cdef inline double c_u01(Rng* r) nogil:
    return <double>(c_rng_u64(r) >> 11) * _INV2_53


cdef inline double c_uniform(Rng* r, double lo, double hi) nogil:
    return lo + (hi - lo) * c_u01(r)


cdef double c_normal(Rng* r) nogil:
    cdef double u, v, s, f
    if r.has_g:
        r.has_g = 0
        return r.g
    while True:
        u = 2.0 * c_u01(r) - 1.0
        v = 2.0 * c_u01(r) - 1.0
        s = u * u + v * v
        if 0.0 < s < 1.0:
            break
    f = sqrt(-2.0 * log(s) / s)
    r.g = v * f
    r.has_g = 1
    return u * f


cdef inline double c_expo(Rng* r) nogil:
    return -log(1.0 - c_u01(r))


cdef double c_sample_error(Rng* r, int kind, double param, double x) nogil:
    cdef double sign, g1, g2, rad
    if kind == 0:  # normal with given variance
        return c_normal(r) * sqrt(param)
    if kind == 1:  # symmetric uniform, half-width param
        return c_uniform(r, -param, param)
    if kind == 2:  # double-Weibull(0,1,3): |X|^3 ~ Exp(1)
        sign = -1.0 if (c_rng_u64(r) & 1) else 1.0
        return sign * pow(c_expo(r), 1.0 / 3.0)
    if kind == 3:  # sqrt(48) * (Beta(6,2) - 3/4)
        g1 = (c_expo(r) + c_expo(r) + c_expo(r)
              + c_expo(r) + c_expo(r) + c_expo(r))
        g2 = c_expo(r) + c_expo(r)
        return _SQRT48 * (g1 / (g1 + g2) - 0.75)
    if kind == 4:  # chi-square(2) - 2
        return 2.0 * c_expo(r) - 2.0
    if kind == 5:  # log-normal(0,1) - e^(1/2)
        return exp(c_normal(r)) - _LN_MEAN
    if kind == 6:  # normal with variance sqrt(x)
        return c_normal(r) * sqrt(sqrt(x))
    # kind == 7: uniform on [-sqrt(x), sqrt(x)]
    rad = sqrt(x)
    return c_uniform(r, -rad, rad)


cdef class RngHandle:
    """Opaque generator state for the Python-visible draw functions."""

    cdef Rng rng


def rng_new(seed, stream):
    cdef RngHandle h = RngHandle.__new__(RngHandle)
    c_rng_seed(&h.rng, <uint64_t>(seed & _PY_MASK),
               <uint64_t>(stream & _PY_MASK))
    return h


def rng_u64(RngHandle h):
    return c_rng_u64(&h.rng)


def rng_u01(RngHandle h):
    return c_u01(&h.rng)


def rng_uniform(RngHandle h, double lo, double hi):
    return c_uniform(&h.rng, lo, hi)


def rng_normal(RngHandle h):
    return c_normal(&h.rng)


def rng_exponential(RngHandle h):
    return c_expo(&h.rng)


def sample_error(RngHandle h, int kind, double param, double x):
    if kind < 0 or kind > 7:
        raise ValueError(f"unknown error kind {kind}")
    return c_sample_error(&h.rng, kind, param, x)


def sample_error_block(RngHandle h, int kind, double param, double x, long n):
    """(sum, sum of squares, min, max) over n draws."""
    if kind < 0 or kind > 7:
        raise ValueError(f"unknown error kind {kind}")
    cdef double total = 0.0, total2 = 0.0
    cdef double lo = INFINITY, hi = -INFINITY
    cdef double v
    cdef long i
    cdef Rng* r = &h.rng
    with nogil:
        for i in range(n):
            v = c_sample_error(r, kind, param, x)
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

cdef double* _LANCZOS = [
    57.1562356658629235, -59.5979603554754912, 14.1360979747417471,
    -0.491913816097620199, 0.339946499848118887e-4, 0.465236289270485756e-4,
    -0.983744753048795646e-4, 0.158088703224912494e-3, -0.210264441724104883e-3,
    0.217439618115212643e-3, -0.164318106536763890e-3, 0.844182239838527433e-4,
    -0.261908384015814087e-4, 0.368991826595316234e-5]


cdef double c_lgamma(double x) nogil:
    cdef double y = x
    cdef double tmp = x + 5.24218750000000000
    cdef double ser = 0.999999999999997092
    cdef int j
    tmp = (x + 0.5) * log(tmp) - tmp
    for j in range(14):
        y += 1.0
        ser += _LANCZOS[j] / y
    return tmp + log(2.5066282746310005 * ser / x)


cdef double c_betacf(double a, double b, double x) nogil:
    cdef double qab = a + b
    cdef double qap = a + 1.0
    cdef double qam = a - 1.0
    cdef double c = 1.0
    cdef double d = 1.0 - qab * x / qap
    cdef double h, aa, delta
    cdef int m, m2
    if fabs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _ITMAX + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            break
    return h


cdef double c_incbeta(double a, double b, double x) nogil:
    cdef double lbt, bt
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    lbt = (c_lgamma(a + b) - c_lgamma(a) - c_lgamma(b)
           + a * log(x) + b * log1p(-x))
    bt = exp(lbt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * c_betacf(a, b, x) / a
    return 1.0 - bt * c_betacf(b, a, 1.0 - x) / b


cdef double c_gamma_q_cf(double a, double x) nogil:
    cdef double b = x + 1.0 - a
    cdef double c = 1.0 / _FPMIN
    cdef double d = 1.0 / b
    cdef double h = d
    cdef double an, delta
    cdef int i
    for i in range(1, _ITMAX + 1):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if fabs(d) < _FPMIN:
            d = _FPMIN
        c = b + an / c
        if fabs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if fabs(delta - 1.0) < _EPS:
            break
    return exp(-x + a * log(x) - c_lgamma(a)) * h


cdef double c_gamma_p(double a, double x) nogil:
    cdef double ap, summ, delta
    cdef int i
    if x <= 0.0:
        return 0.0
    if x < a + 1.0:
        ap = a
        summ = 1.0 / a
        delta = summ
        for i in range(_ITMAX):
            ap += 1.0
            delta *= x / ap
            summ += delta
            if fabs(delta) < fabs(summ) * _EPS:
                break
        return summ * exp(-x + a * log(x) - c_lgamma(a))
    return 1.0 - c_gamma_q_cf(a, x)


cdef double c_gamma_q(double a, double x) nogil:
    if x <= 0.0:
        return 1.0
    if x < a + 1.0:
        return 1.0 - c_gamma_p(a, x)
    return c_gamma_q_cf(a, x)


cdef double c_f_cdf(double x, double d1, double d2) nogil:
    if x <= 0.0:
        return 0.0
    return c_incbeta(0.5 * d1, 0.5 * d2, d1 * x / (d1 * x + d2))


cdef double c_f_sf(double x, double d1, double d2) nogil:
    if x <= 0.0:
        return 1.0
    if isinf(x):
        return 0.0
    return c_incbeta(0.5 * d2, 0.5 * d1, d2 / (d2 + d1 * x))


cdef double c_chisq_cdf(double x, double k) nogil:
    if x <= 0.0:
        return 0.0
    return c_gamma_p(0.5 * k, 0.5 * x)


cdef double c_chisq_sf(double x, double k) nogil:
    if x <= 0.0:
        return 1.0
    return c_gamma_q(0.5 * k, 0.5 * x)


cdef double* _Q_A = [3.3871328727963666080, 133.14166789178437745,
                     1971.5909503065514427, 13731.693765509461125,
                     45921.953931549871457, 67265.770927008700853,
                     33430.575583588128105, 2509.0809287301226727]
cdef double* _Q_B = [1.0, 42.313330701600911252, 687.18700749205790830,
                     5394.1960214247511077, 21213.794301586595867,
                     39307.895800092710610, 28729.085735721942674,
                     5226.4952788528545610]
cdef double* _Q_C = [1.42343711074968357734, 4.63033784615654529590,
                     5.76949722146069140550, 3.64784832476320460504,
                     1.27045825245236838258, 0.241780725177450611770,
                     0.0227238449892691845833, 7.7454501427834140764e-4]
cdef double* _Q_D = [1.0, 2.05319162663775882187, 1.67638483018380384940,
                     0.689767334985100004550, 0.148103976427480074590,
                     0.0151986665636164571966, 5.47593808499534494600e-4,
                     1.05075007164441684324e-9]
cdef double* _Q_E = [6.65790464350110377720, 5.46378491116411436990,
                     1.78482653991729133580, 0.296560571828504891230,
                     0.0265321895265761230930, 0.00124266094738807843860,
                     2.71155556874348757815e-5, 2.01033439929228813265e-7]
cdef double* _Q_F = [1.0, 0.599832206555887937690, 0.136929880922735805310,
                     0.0148753612908506148525, 7.86869131145613259100e-4,
                     1.84631831751005468180e-5, 1.42151175831644588870e-7,
                     2.04426310338993978564e-15]


cdef inline double _poly(double* coefs, double r) nogil:
    cdef double v = coefs[7]
    cdef int i
    for i in range(6, -1, -1):
        v = v * r + coefs[i]
    return v


cdef double c_normal_quantile(double p) nogil:
    cdef double q = p - 0.5
    cdef double r, val
    if fabs(q) <= 0.425:
        r = 0.180625 - q * q
        return q * _poly(_Q_A, r) / _poly(_Q_B, r)
    r = p if q < 0.0 else 1.0 - p
    r = sqrt(-log(r))
    if r <= 5.0:
        r -= 1.6
        val = _poly(_Q_C, r) / _poly(_Q_D, r)
    else:
        r -= 5.0
        val = _poly(_Q_E, r) / _poly(_Q_F, r)
    return -val if q < 0.0 else val


def lgamma_(double x):
    return c_lgamma(x)


def reg_inc_beta(double a, double b, double x):
    return c_incbeta(a, b, x)


def f_cdf(double x, double d1, double d2):
    return c_f_cdf(x, d1, d2)


def f_sf(double x, double d1, double d2):
    return c_f_sf(x, d1, d2)


def chisq_cdf(double x, double k):
    return c_chisq_cdf(x, k)


def chisq_sf(double x, double k):
    return c_chisq_sf(x, k)


def normal_quantile(double p):
    return c_normal_quantile(p)


# ---------------------------------------------------------------------------
# Regression and test statistics
# ---------------------------------------------------------------------------
# Error codes: 1 too_few_points, 2 degenerate_x, 3 zero_variance, 4 too_few
# group values.  The failing group index travels in err_group.

cdef int c_linefit(double* xs, double* ys, int n, double* out) nogil:
    cdef double sx = 0.0, sy = 0.0
    cdef double xbar, ybar, sxx, sxy, syy, dx, dy
    cdef double slope, intercept, sse, rvar
    cdef int i
    if n < 3:
        return 1
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
        return 2
    slope = sxy / sxx
    intercept = ybar - slope * xbar
    sse = syy - sxy * sxy / sxx
    if sse < 0.0:
        sse = 0.0
    rvar = sse / (n - 2)
    out[0] = intercept
    out[1] = slope
    out[2] = sqrt(rvar * (1.0 / n + xbar * xbar / sxx))
    out[3] = sqrt(rvar / sxx)
    out[4] = rvar
    out[5] = n - 2
    out[6] = xbar
    out[7] = ybar
    out[8] = sxx
    out[9] = sse
    return 0


cdef int c_ancova(double* xs, double* ys, int* starts, int t,
                  double* f, double* df1, double* df2) nogil:
    cdef int n = starts[t]
    cdef double exx = 0.0, exy = 0.0, eyy = 0.0
    cdef double sx, sy, mx, my, dx, dy
    cdef double txx, txy, tyy, sse_full, sse_red, sstrt
    cdef int g, i, lo, hi, m
    if n - t - 1 < 1:
        return 1
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
        return 2
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
        return 2
    sse_full = eyy - exy * exy / exx
    sse_red = tyy - txy * txy / txx
    sstrt = sse_red - sse_full
    if sstrt < 0.0:
        sstrt = 0.0
    df1[0] = <double>(t - 1)
    df2[0] = <double>(n - t - 1)
    if sse_full <= 0.0:
        f[0] = 0.0 if sstrt <= 0.0 else INFINITY
    else:
        f[0] = (sstrt / df1[0]) / (sse_full / df2[0])
    return 0


cdef int c_oneway(double* vals, int* starts, int t, int extra,
                  double* means, double* f, double* df1, double* df2) nogil:
    """``means`` is caller-provided scratch of t doubles."""
    cdef int n = starts[t]
    cdef int dfe = n - t - extra
    cdef double total = 0.0, grand, s, d, sstrt = 0.0, sse = 0.0
    cdef int g, i, size
    if dfe < 1:
        return 1
    for g in range(t):
        s = 0.0
        for i in range(starts[g], starts[g + 1]):
            s += vals[i]
        size = starts[g + 1] - starts[g]
        means[g] = s / size
        total += s
    grand = total / n
    for g in range(t):
        size = starts[g + 1] - starts[g]
        d = means[g] - grand
        sstrt += size * d * d
    for g in range(t):
        for i in range(starts[g], starts[g + 1]):
            d = vals[i] - means[g]
            sse += d * d
    df1[0] = <double>(t - 1)
    df2[0] = <double>dfe
    if sse <= 0.0:
        f[0] = 0.0 if sstrt <= 0.0 else INFINITY
    else:
        f[0] = (sstrt / df1[0]) / (sse / df2[0])
    return 0


cdef int c_welch(double* vals, int* starts, int t, double* ws, double* ms,
                 double* f, double* df1, double* df2, int* err_group) nogil:
    """``ws``/``ms`` are caller-provided scratch of t doubles each."""
    cdef double wsum = 0.0, wm = 0.0
    cdef double s, mean, v, d, w, a, lam, r, b
    cdef int g, i, lo, hi, size
    for g in range(t):
        lo = starts[g]
        hi = starts[g + 1]
        size = hi - lo
        if size < 2:
            err_group[0] = g
            return 4
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
            err_group[0] = g
            return 3
        w = size / v
        ws[g] = w
        ms[g] = mean
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
    df1[0] = <double>(t - 1)
    a /= df1[0]
    b = 1.0 + (2.0 * (t - 2) / (t * t - 1.0)) * lam
    f[0] = a / b
    df2[0] = (t * t - 1.0) / (3.0 * lam)
    return 0


cdef void c_kruskal(double* vals, int* starts, int t, double* sv, int* sg,
                    double* rsum, double* h_out, double* df_out) nogil:
    """sv/sg are n-sized scratch (sorted values + group labels); rsum holds t."""
    cdef int n = starts[t]
    cdef int g, i, j, k, pos
    cdef double key, midrank, h, denom, tiesum = 0.0
    cdef int gkey, c
    for g in range(t):
        for i in range(starts[g], starts[g + 1]):
            sv[i] = vals[i]
            sg[i] = g
    # insertion sort by value (stable; n is small)
    for i in range(1, n):
        key = sv[i]
        gkey = sg[i]
        pos = i - 1
        while pos >= 0 and sv[pos] > key:
            sv[pos + 1] = sv[pos]
            sg[pos + 1] = sg[pos]
            pos -= 1
        sv[pos + 1] = key
        sg[pos + 1] = gkey
    for g in range(t):
        rsum[g] = 0.0
    i = 0
    while i < n:
        j = i + 1
        while j < n and sv[j] == sv[i]:
            j += 1
        midrank = 0.5 * (i + 1 + j)
        for k in range(i, j):
            rsum[sg[k]] += midrank
        c = j - i
        if c > 1:
            tiesum += (<double>c) * c * c - c
        i = j
    h = 0.0
    for g in range(t):
        c = starts[g + 1] - starts[g]
        h += rsum[g] * rsum[g] / c
    h = 12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0)
    denom = 1.0 - tiesum / ((<double>n) * n * n - n)
    if denom <= 0.0:
        h_out[0] = 0.0
        df_out[0] = <double>(t - 1)
        return
    h /= denom
    if h < 0.0:
        h = 0.0
    h_out[0] = h
    df_out[0] = <double>(t - 1)


cdef dict _ERR_TAGS = {1: "too_few_points", 2: "degenerate_x"}


cdef double* _copy_doubles(object seq, int n) except NULL:
    cdef double* buf = <double*>malloc(n * sizeof(double))
    cdef int i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = seq[i]
    return buf


cdef int* _copy_ints(object seq, int n) except NULL:
    cdef int* buf = <int*>malloc(n * sizeof(int))
    cdef int i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        buf[i] = seq[i]
    return buf


def linefit(xs, ys):
    """(intercept, slope, se_int, se_slope, resid_var, df, xbar, ybar, sxx, sse)."""
    cdef int n = len(xs)
    cdef double out[10]
    cdef double* cx
    cdef double* cy
    cdef int code
    if n < 3:
        raise ValueError("too_few_points")
    cx = _copy_doubles(xs, n)
    try:
        cy = _copy_doubles(ys, n)
    except BaseException:
        free(cx)
        raise
    code = c_linefit(cx, cy, n, out)
    free(cx)
    free(cy)
    if code:
        raise ValueError(_ERR_TAGS[code])
    return (out[0], out[1], out[2], out[3], out[4], <int>out[5],
            out[6], out[7], out[8], out[9])


def ancova_f(xs, ys, starts):
    cdef int t = len(starts) - 1
    cdef int n = len(xs)
    cdef double f, df1, df2
    cdef double* cx = _copy_doubles(xs, n)
    cdef double* cy
    cdef int* cs
    cdef int code
    try:
        cy = _copy_doubles(ys, n)
    except BaseException:
        free(cx)
        raise
    try:
        cs = _copy_ints(starts, t + 1)
    except BaseException:
        free(cx)
        free(cy)
        raise
    code = c_ancova(cx, cy, cs, t, &f, &df1, &df2)
    free(cx)
    free(cy)
    free(cs)
    if code:
        raise ValueError(_ERR_TAGS[code])
    return f, df1, df2


def oneway_f(vals, starts, int extra):
    cdef int t = len(starts) - 1
    cdef int n = len(vals)
    cdef double f, df1, df2
    cdef double* cv = _copy_doubles(vals, n)
    cdef int* cs = NULL
    cdef double* means = NULL
    cdef int code
    try:
        cs = _copy_ints(starts, t + 1)
        means = <double*>malloc(t * sizeof(double))
        if means == NULL:
            raise MemoryError()
        code = c_oneway(cv, cs, t, extra, means, &f, &df1, &df2)
    finally:
        free(cv)
        if cs != NULL:
            free(cs)
        if means != NULL:
            free(means)
    if code == 1:
        raise ValueError("too_few_points")
    return f, df1, df2


def welch_f(vals, starts):
    cdef int t = len(starts) - 1
    cdef int n = len(vals)
    cdef double f, df1, df2
    cdef int err_group = -1
    cdef double* cv = _copy_doubles(vals, n)
    cdef int* cs = NULL
    cdef double* ws = NULL
    cdef double* ms = NULL
    cdef int code
    try:
        cs = _copy_ints(starts, t + 1)
        ws = <double*>malloc(t * sizeof(double))
        ms = <double*>malloc(t * sizeof(double))
        if ws == NULL or ms == NULL:
            raise MemoryError()
        code = c_welch(cv, cs, t, ws, ms, &f, &df1, &df2, &err_group)
    finally:
        free(cv)
        if cs != NULL:
            free(cs)
        if ws != NULL:
            free(ws)
        if ms != NULL:
            free(ms)
    if code == 3:
        raise ValueError(f"zero_variance:{err_group}")
    if code == 4:
        raise ValueError(f"too_few:{err_group}")
    return f, df1, df2


def kruskal_h(vals, starts):
    cdef int t = len(starts) - 1
    cdef int n = len(vals)
    cdef double h, df
    cdef double* cv = _copy_doubles(vals, n)
    cdef int* cs = NULL
    cdef double* sv = NULL
    cdef int* sg = NULL
    cdef double* rsum = NULL
    try:
        cs = _copy_ints(starts, t + 1)
        sv = <double*>malloc(n * sizeof(double))
        sg = <int*>malloc(n * sizeof(int))
        rsum = <double*>malloc(t * sizeof(double))
        if sv == NULL or sg == NULL or rsum == NULL:
            raise MemoryError()
        c_kruskal(cv, cs, t, sv, sg, rsum, &h, &df)
    finally:
        free(cv)
        if cs != NULL:
            free(cs)
        if sv != NULL:
            free(sv)
        if sg != NULL:
            free(sg)
        if rsum != NULL:
            free(rsum)
    return h, df


# ---------------------------------------------------------------------------
# Sample generation and the replicate kernel
# ---------------------------------------------------------------------------

cdef struct CaseDesc:
    int n1, n2, reps
    int ek1, ek2, sk1, sk2
    double ep1, ep2
    double s1a, s1b, s1c, s1d
    double s2a, s2b, s2c, s2d
    double slope, mu_base, mu_step
    uint64_t case_hash


cdef void _unpack_case(object packed, CaseDesc* cd):
    cd.n1 = packed[0]
    cd.n2 = packed[1]
    cd.reps = packed[2]
    cd.ek1 = packed[3]
    cd.ep1 = packed[4]
    cd.ek2 = packed[5]
    cd.ep2 = packed[6]
    cd.sk1 = packed[7]
    cd.s1a = packed[8]
    cd.s1b = packed[9]
    cd.s1c = packed[10]
    cd.s1d = packed[11]
    cd.sk2 = packed[12]
    cd.s2a = packed[13]
    cd.s2b = packed[14]
    cd.s2c = packed[15]
    cd.s2d = packed[16]
    cd.slope = packed[17]
    cd.mu_base = packed[18]
    cd.mu_step = packed[19]
    cd.case_hash = <uint64_t>(packed[20] & _PY_MASK)


cdef inline double _draw_cov(Rng* r, int skind, double a, double b,
                             double c, double d) nogil:
    if skind == 0:
        return c_uniform(r, a, b)
    if c_u01(r) < 0.5:
        return c_uniform(r, a, b)
    return c_uniform(r, c, d)


cdef void c_generate(CaseDesc* cd, int64_t q, uint64_t seed, uint64_t stream,
                     double* xbuf, double* ybuf,
                     double* fixed1, double* fixed2) nogil:
    """Fill xbuf/ybuf (treatment 1 rows then treatment 2 rows)."""
    cdef Rng rng
    cdef int side, ni, ek, sk, j, rep, pos
    cdef double ep, sa, sb, sc, sd, mu, xj, base
    cdef double* fixed
    c_rng_seed(&rng, seed, stream)
    pos = 0
    for side in range(2):
        if side == 0:
            ni = cd.n1
            ek = cd.ek1
            ep = cd.ep1
            sk = cd.sk1
            sa = cd.s1a
            sb = cd.s1b
            sc = cd.s1c
            sd = cd.s1d
            mu = cd.mu_base
            fixed = fixed1
        else:
            ni = cd.n2
            ek = cd.ek2
            ep = cd.ep2
            sk = cd.sk2
            sa = cd.s2a
            sb = cd.s2b
            sc = cd.s2c
            sd = cd.s2d
            mu = cd.mu_base + cd.mu_step * q
            fixed = fixed2
        # draw the ni distinct covariates first, parked at the row positions
        for j in range(ni):
            if fixed == NULL:
                xbuf[pos + j * cd.reps] = _draw_cov(&rng, sk, sa, sb, sc, sd)
            else:
                xbuf[pos + j * cd.reps] = fixed[j]
        for j in range(ni - 1, -1, -1):  # spread right-to-left, no overwrite
            xj = xbuf[pos + j * cd.reps]
            for rep in range(cd.reps):
                xbuf[pos + j * cd.reps + rep] = xj
        for j in range(ni):
            xj = xbuf[pos + j * cd.reps]
            base = mu + cd.slope * xj
            for rep in range(cd.reps):
                ybuf[pos + j * cd.reps + rep] = base + c_sample_error(&rng, ek, ep, xj)
        pos += ni * cd.reps


def generate_case(packed, q, seed, stream, fixed1, fixed2):
    """Flat (x1, y1, x2, y2) lists for one sample."""
    cdef CaseDesc cd
    _unpack_case(packed, &cd)
    cdef int m1 = cd.n1 * cd.reps
    cdef int m2 = cd.n2 * cd.reps
    cdef int m = m1 + m2
    cdef double* xbuf = <double*>malloc(m * sizeof(double))
    cdef double* ybuf = <double*>malloc(m * sizeof(double))
    cdef double* f1 = NULL
    cdef double* f2 = NULL
    cdef int i
    if xbuf == NULL or ybuf == NULL:
        if xbuf != NULL:
            free(xbuf)
        if ybuf != NULL:
            free(ybuf)
        raise MemoryError()
    try:
        if fixed1 is not None:
            f1 = _copy_doubles(fixed1, cd.n1)
        if fixed2 is not None:
            f2 = _copy_doubles(fixed2, cd.n2)
        c_generate(&cd, q, <uint64_t>(seed & _PY_MASK),
                   <uint64_t>(stream & _PY_MASK), xbuf, ybuf, f1, f2)
        x1 = [xbuf[i] for i in range(m1)]
        y1 = [ybuf[i] for i in range(m1)]
        x2 = [xbuf[m1 + i] for i in range(m2)]
        y2 = [ybuf[m1 + i] for i in range(m2)]
        return x1, y1, x2, y2
    finally:
        free(xbuf)
        free(ybuf)
        if f1 != NULL:
            free(f1)
        if f2 != NULL:
            free(f2)


cdef int c_replicate(CaseDesc* cd, int64_t q, double alpha, uint64_t seed,
                     int64_t k, int extra, double* fixed1, double* fixed2,
                     double* xbuf, double* ybuf, double* rbuf,
                     double* sv, int* sg, double* gscr, int* starts) nogil:
    """One replicate; returns the 4-bit rejection pattern or -errcode.

    ``gscr`` is 3 * t doubles of group scratch shared by the group tests.
    """
    cdef uint64_t stream = c_replicate_stream(cd.case_hash, q, k)
    cdef int m = starts[2]
    cdef int code, i
    cdef double f1, f2v, f3, h
    cdef double d1n, d1d, d2n, d2d, d3n, d3d, hdf
    cdef double p1, p2, p3, p4
    cdef double out[10]
    cdef int err_group = 0
    cdef int pattern = 0
    c_generate(cd, q, seed, stream, xbuf, ybuf, fixed1, fixed2)
    code = c_ancova(xbuf, ybuf, starts, 2, &f1, &d1n, &d1d)
    if code:
        return -code
    p1 = c_f_sf(f1, d1n, d1d)
    code = c_linefit(xbuf, ybuf, m, out)
    if code:
        return -code
    for i in range(m):
        rbuf[i] = ybuf[i] - (out[0] + out[1] * xbuf[i])
    code = c_oneway(rbuf, starts, 2, extra, gscr, &f2v, &d2n, &d2d)
    if code:
        return -code
    p2 = c_f_sf(f2v, d2n, d2d)
    code = c_welch(rbuf, starts, 2, gscr, gscr + 2, &f3, &d3n, &d3d, &err_group)
    if code:
        return -code
    p3 = c_f_sf(f3, d3n, d3d)
    c_kruskal(rbuf, starts, 2, sv, sg, gscr, &h, &hdf)
    p4 = c_chisq_sf(h, hdf)
    if p1 <= alpha:
        pattern |= 1
    if p2 <= alpha:
        pattern |= 2
    if p3 <= alpha:
        pattern |= 4
    if p4 <= alpha:
        pattern |= 8
    return pattern


def simulate_batch(packed, q, double alpha, seed, k0, count, int extra,
                   fixed1, fixed2):
    """Replicates k0..k0+count-1 of a (case, q) cell.

    Returns (pattern counts[16], err_k, err_code); err_k is -1 on success.
    Releases the GIL for the whole batch.
    """
    cdef CaseDesc cd
    _unpack_case(packed, &cd)
    cdef int m1 = cd.n1 * cd.reps
    cdef int m2 = cd.n2 * cd.reps
    cdef int m = m1 + m2
    cdef int starts[3]
    cdef long counts[16]
    cdef int64_t cq = q, ck0 = k0, ccount = count, k
    cdef uint64_t cseed = <uint64_t>(seed & _PY_MASK)
    cdef double* xbuf = NULL
    cdef double* ybuf = NULL
    cdef double* rbuf = NULL
    cdef double* sv = NULL
    cdef int* sg = NULL
    cdef double* gscr = NULL
    cdef double* f1 = NULL
    cdef double* f2 = NULL
    cdef int i, pattern
    cdef int64_t err_k = -1
    cdef int err_code = 0
    starts[0] = 0
    starts[1] = m1
    starts[2] = m
    for i in range(16):
        counts[i] = 0
    try:
        xbuf = <double*>malloc(m * sizeof(double))
        ybuf = <double*>malloc(m * sizeof(double))
        rbuf = <double*>malloc(m * sizeof(double))
        sv = <double*>malloc(m * sizeof(double))
        sg = <int*>malloc(m * sizeof(int))
        gscr = <double*>malloc(6 * sizeof(double))
        if (xbuf == NULL or ybuf == NULL or rbuf == NULL or sv == NULL
                or sg == NULL or gscr == NULL):
            raise MemoryError()
        if fixed1 is not None:
            f1 = _copy_doubles(fixed1, cd.n1)
        if fixed2 is not None:
            f2 = _copy_doubles(fixed2, cd.n2)
        with nogil:
            for k in range(ck0, ck0 + ccount):
                pattern = c_replicate(&cd, cq, alpha, cseed, k, extra, f1, f2,
                                      xbuf, ybuf, rbuf, sv, sg, gscr, starts)
                if pattern < 0:
                    err_k = k
                    err_code = -pattern
                    break
                counts[pattern] += 1
        if err_k >= 0:
            tag = _ERR_TAGS.get(err_code, f"error_{err_code}")
            return [counts[i] for i in range(16)], err_k, tag
        return [counts[i] for i in range(16)], -1, ""
    finally:
        if xbuf != NULL:
            free(xbuf)
        if ybuf != NULL:
            free(ybuf)
        if rbuf != NULL:
            free(rbuf)
        if sv != NULL:
            free(sv)
        if sg != NULL:
            free(sg)
        if gscr != NULL:
            free(gscr)
        if f1 != NULL:
            free(f1)
        if f2 != NULL:
            free(f2)
