# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled sampling kernels.

Same contracts as ``_pure`` (see that module for the algorithm notes:
Wood 1994 for von Mises-Fisher, Kent/Ganeiber/Mardia 2018 for the
angular-central-Gaussian Bingham envelope, Robert 1995 for the one-sided
truncated normal tail). Everything here is scalar-loop code whose Python
overhead dominates in the pure backend.

Randomness comes from the C entry points of the caller's
``numpy.random.Generator`` bit stream, so results are reproducible per
seed exactly like the pure backend (though the two backends consume the
stream in different orders and therefore give different, statistically
equivalent output for the same seed).
"""
import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport exp, fabs, log, log1p, sqrt
from numpy.random cimport bitgen_t
from numpy.random.c_distributions cimport (
    random_beta,
    random_standard_exponential,
    random_standard_normal,
    random_standard_uniform,
)

from scipy.special cimport cython_special as cs

cnp.import_array()

BACKEND_NAME = "compiled"

cdef double TAIL_SPLIT = 5.0
cdef const char *CAPSULE_NAME = "BitGenerator"


cdef inline bitgen_t *_bitgen(object rng) except NULL:
    capsule = rng.bit_generator.capsule
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline double _ndtr(double x) noexcept:
    return cs.ndtr(x)


cdef inline double _ndtri(double p) noexcept:
    return cs.ndtri(p)


cdef double _truncnorm_left(double a, bitgen_t *bg) noexcept:
    """x ~ N(0,1) | x > a, strict."""
    cdef double tail, x, alpha, diff
    if a <= TAIL_SPLIT:
        tail = _ndtr(-a)
        while True:
            x = -_ndtri(random_standard_uniform(bg) * tail)
            if x > a:
                return x
    alpha = 0.5 * (a + sqrt(a * a + 4.0))
    while True:
        x = a + random_standard_exponential(bg) / alpha
        diff = x - alpha
        if random_standard_uniform(bg) <= exp(-0.5 * diff * diff) and x > a:
            return x


def truncnorm_left(double a, rng):
    return _truncnorm_left(a, _bitgen(rng))


def zfill_probit(cnp.ndarray[cnp.float64_t, ndim=2] mean,
                 cnp.ndarray[cnp.int8_t, ndim=2] codes,
                 rng):
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t n = mean.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=2] z = np.empty((n, n))
    cdef Py_ssize_t i, j
    cdef double mu, x, a, sign, val
    cdef signed char c
    cdef double sqrt2 = sqrt(2.0)
    for i in range(n):
        z[i, i] = mean[i, i] + sqrt2 * random_standard_normal(bg)
        for j in range(i + 1, n):
            mu = mean[i, j]
            c = codes[i, j]
            if c < 0:
                val = mu + random_standard_normal(bg)
            else:
                sign = 1.0 if c == 1 else -1.0
                a = -sign * mu
                x = _truncnorm_left(a, bg)
                val = mu + sign * x
                while (val > 0.0) != (c == 1) or val == 0.0:
                    x = _truncnorm_left(a, bg)
                    val = mu + sign * x
            z[i, j] = val
            z[j, i] = val
    return z


cdef int _sphere(double *out, Py_ssize_t m, bitgen_t *bg) noexcept:
    cdef Py_ssize_t i
    cdef double nrm2, inv
    while True:
        nrm2 = 0.0
        for i in range(m):
            out[i] = random_standard_normal(bg)
            nrm2 += out[i] * out[i]
        if nrm2 > 1e-24:
            inv = 1.0 / sqrt(nrm2)
            for i in range(m):
                out[i] *= inv
            return 0


def sample_sphere(Py_ssize_t m, rng):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m)
    _sphere(&out[0], m, _bitgen(rng))
    return out


def mf_vector(cnp.ndarray[cnp.float64_t, ndim=1] c, rng):
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t m = c.shape[0]
    cdef Py_ssize_t i
    cdef double kappa = 0.0, p_plus
    cdef cnp.ndarray[cnp.float64_t, ndim=1] u = np.empty(m)
    for i in range(m):
        kappa += c[i] * c[i]
    kappa = sqrt(kappa)
    if m == 1:
        p_plus = 1.0 / (1.0 + exp(-2.0 * c[0]))
        u[0] = 1.0 if random_standard_uniform(bg) < p_plus else -1.0
        return u
    if kappa == 0.0:
        _sphere(&u[0], m, bg)
        return u

    cdef double b, x0, logc, half, zb, t, dot, nrm2, inv, tt
    b = (-2.0 * kappa + sqrt(4.0 * kappa * kappa + (m - 1.0) * (m - 1.0))) / (m - 1.0)
    x0 = (1.0 - b) / (1.0 + b)
    logc = kappa * x0 + (m - 1.0) * log1p(-x0 * x0)
    half = 0.5 * (m - 1.0)
    while True:
        zb = random_beta(bg, half, half)
        t = (1.0 - (1.0 + b) * zb) / (1.0 - (1.0 - b) * zb)
        if kappa * t + (m - 1.0) * log1p(-x0 * t) - logc >= log(random_standard_uniform(bg)):
            break

    while True:
        dot = 0.0
        for i in range(m):
            u[i] = random_standard_normal(bg)
            dot += u[i] * c[i]
        dot /= kappa
        nrm2 = 0.0
        for i in range(m):
            u[i] -= dot * c[i] / kappa
            nrm2 += u[i] * u[i]
        if nrm2 > 1e-24:
            break
    tt = 1.0 - t * t
    if tt < 0.0:
        tt = 0.0
    inv = sqrt(tt) / sqrt(nrm2)
    nrm2 = 0.0
    for i in range(m):
        u[i] = t * c[i] / kappa + inv * u[i]
        nrm2 += u[i] * u[i]
    inv = 1.0 / sqrt(nrm2)
    for i in range(m):
        u[i] *= inv
    return u


def bingham_spectral(cnp.ndarray[cnp.float64_t, ndim=1] lam, rng):
    cdef bitgen_t *bg = _bitgen(rng)
    cdef Py_ssize_t q = lam.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] y = np.empty(q)
    cdef Py_ssize_t i
    if q == 1:
        y[0] = 1.0 if random_standard_uniform(bg) < 0.5 else -1.0
        return y

    cdef double lmax = lam[0]
    for i in range(1, q):
        if lam[i] > lmax:
            lmax = lam[i]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] lam_hat = np.empty(q)
    cdef double hat_total = 0.0
    for i in range(q):
        lam_hat[i] = lmax - lam[i]
        hat_total += lam_hat[i]
    if hat_total == 0.0:
        _sphere(&y[0], q, bg)
        return y

    # bisection for the envelope tuning constant b on (0, q]
    cdef double lo = 0.0, hi = <double> q, mid, s
    cdef int it
    for it in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        s = 0.0
        for i in range(q):
            s += 1.0 / (mid + 2.0 * lam_hat[i])
        if s > 1.0:
            lo = mid
        else:
            hi = mid
    cdef double b = 0.5 * (lo + hi)

    cdef cnp.ndarray[cnp.float64_t, ndim=1] omega = np.empty(q)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] scale = np.empty(q)
    for i in range(q):
        omega[i] = 1.0 + 2.0 * lam_hat[i] / b
        scale[i] = 1.0 / sqrt(omega[i])
    cdef double log_m = 0.5 * (b - q) + 0.5 * q * log(q / b)
    cdef double nrm2, quad_hat, quad_omega, yy, log_ratio
    while True:
        nrm2 = 0.0
        for i in range(q):
            y[i] = random_standard_normal(bg) * scale[i]
            nrm2 += y[i] * y[i]
        if nrm2 <= 1e-24:
            continue
        nrm2 = sqrt(nrm2)
        quad_hat = 0.0
        quad_omega = 0.0
        for i in range(q):
            y[i] /= nrm2
            yy = y[i] * y[i]
            quad_hat += yy * lam_hat[i]
            quad_omega += yy * omega[i]
        log_ratio = -quad_hat + 0.5 * q * log(quad_omega) - log_m
        if log(random_standard_uniform(bg)) < log_ratio:
            return y
