# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of ``_pykernels``; same algorithms, same constants."""
from libc.math cimport exp, expm1, cos, sin, sqrt, fabs, hypot, isfinite, NAN, M_PI

NAME = "cython"

ERFI_SERIES_RADIUS = 1.5
FRESNEL_SERIES_LIMIT = 1.5
K_SMALL_X = 1e-6
LOG_DBL_MAX = 709.782712893384

cdef double _R_SERIES = 1.5
cdef double _F_SERIES = 1.5
cdef double _K_SMALL = 1e-6
cdef double _LOG_MAX = 709.782712893384
cdef double _TWO_OVER_SQRTPI = 1.12837916709551257388
cdef double _SQRTPI = 1.7724538509055160273
cdef double _SQRT_HALF_PI = 1.2533141373155002512
cdef double _INV_SQRT2 = 0.70710678118654752440


cdef inline double complex _cexp(double complex z) nogil:
    cdef double m = exp(z.real)
    return m * cos(z.imag) + 1j * (m * sin(z.imag))


cdef inline double _cabs(double complex z) nogil:
    return hypot(z.real, z.imag)


cdef double complex _faddeeva(double complex z) nogil:
    cdef double xi = z.real, yi = z.imag
    cdef double xabs = fabs(xi), yabs = fabs(yi)
    cdef double x = xabs / 6.3, y = yabs / 4.4
    cdef double qrho = x * x + y * y
    cdef double xquad = xabs * xabs - yabs * yabs
    cdef double yquad = 2.0 * xabs * yabs
    cdef double u = 0.0, v = 0.0, u1, v1, u2 = 0.0, v2 = 0.0, daux, xsum, ysum, xaux
    cdef double h, h2, qlambda, rx, ry, sx, sy, tx, ty, c, w1
    cdef int n, j, i, kapn, nu, np1
    cdef bint small = qrho < 0.085264
    cdef bint use_h

    if small:
        qrho = (1.0 - 0.85 * y) * sqrt(qrho)
        n = <int>(6.0 + 72.0 * qrho + 0.5)
        j = 2 * n + 1
        xsum = 1.0 / j
        ysum = 0.0
        i = n
        while i > 0:
            j -= 2
            xaux = (xsum * xquad - ysum * yquad) / i
            ysum = (xsum * yquad + ysum * xquad) / i
            xsum = xaux + 1.0 / j
            i -= 1
        u1 = 1.0 - _TWO_OVER_SQRTPI * (xsum * yabs + ysum * xabs)
        v1 = _TWO_OVER_SQRTPI * (xsum * xabs - ysum * yabs)
        daux = exp(-xquad)
        u2 = daux * cos(yquad)
        v2 = -daux * sin(yquad)
        u = u1 * u2 - v1 * v2
        v = u1 * v2 + v1 * u2
    else:
        if qrho > 1.0:
            h = 0.0
            kapn = 0
            qrho = sqrt(qrho)
            nu = <int>(3.0 + 1442.0 / (26.0 * qrho + 77.0))
        else:
            qrho = (1.0 - y) * sqrt(1.0 - qrho)
            h = 1.88 * qrho
            kapn = <int>(7.0 + 34.0 * qrho + 0.5)
            nu = <int>(16.0 + 26.0 * qrho + 0.5)
        h2 = 2.0 * h
        use_h = h > 0.0
        qlambda = h2 ** kapn if use_h else 0.0
        rx = 0.0
        ry = 0.0
        sx = 0.0
        sy = 0.0
        n = nu
        while n >= 0:
            np1 = n + 1
            tx = yabs + h + np1 * rx
            ty = xabs - np1 * ry
            c = 0.5 / (tx * tx + ty * ty)
            rx = c * tx
            ry = c * ty
            if use_h and n <= kapn:
                tx = qlambda + sx
                sx = rx * tx - ry * sy
                sy = ry * tx + rx * sy
                qlambda /= h2
            n -= 1
        if use_h:
            u = _TWO_OVER_SQRTPI * sx
            v = _TWO_OVER_SQRTPI * sy
        else:
            u = _TWO_OVER_SQRTPI * rx
            v = _TWO_OVER_SQRTPI * ry
        if yabs == 0.0:
            u = exp(-xabs * xabs)

    if yi < 0.0:
        if small:
            u2 *= 2.0
            v2 *= 2.0
        else:
            w1 = 2.0 * exp(-xquad)
            u2 = w1 * cos(yquad)
            v2 = -w1 * sin(yquad)
        u = u2 - u
        v = v2 - v
        if xi > 0.0:
            v = -v
    elif xi < 0.0:
        v = -v
    return u + 1j * v


cdef double complex _erfi_series(double complex z) nogil:
    cdef double complex zz = z * z
    cdef double complex term = z, total = z, contrib
    cdef int k = 0
    while True:
        k += 1
        term = term * zz / k
        contrib = term / (2 * k + 1)
        total = total + contrib
        if _cabs(contrib) <= 1e-17 * _cabs(total) or k > 200:
            break
    return _TWO_OVER_SQRTPI * total


cdef double _kernel_k(double x, double w) nogil:
    cdef double complex a, b, z1, z2, diff
    cdef double decay, val, phase
    if x < _K_SMALL:
        if w == 0.0:
            return 1.0
        return -expm1(-2.0 * w) / (2.0 * w)
    a = x * 0.5 * _INV_SQRT2 + 1j * (x * 0.5 * _INV_SQRT2)
    b = w / x * _INV_SQRT2 - 1j * (w / x * _INV_SQRT2)
    z1 = a + b
    z2 = b - a
    if _cabs(z1) < _R_SERIES and _cabs(z2) < _R_SERIES:
        diff = _erfi_series(z1) - _erfi_series(z2)
        return _SQRTPI * exp(-w) / (2.0 * x) * _cabs(diff)
    decay = exp(-2.0 * w)
    if x * x <= 2.0 * w:
        val = _cabs(_faddeeva(-z1) - decay * _faddeeva(-z2))
    else:
        phase = 0.25 * x * x - w * w / (x * x)
        val = _cabs(2.0 * exp(-w) * (cos(phase) - 1j * sin(phase))
                    - _faddeeva(z1) - decay * _faddeeva(-z2))
    return _SQRTPI / (2.0 * x) * val


cdef double _x_delta(double delta, double w, double lo, double hi,
                     double tol, double step, double hi_cap) nogil:
    cdef double k0 = _kernel_k(0.0, w)
    cdef double target = delta * k0 * k0
    cdef double flo, fhi, nxt, fnxt, mid, km
    km = _kernel_k(lo, w)
    flo = km * km - target
    if flo <= 0.0:
        return lo
    km = _kernel_k(hi, w)
    fhi = km * km - target
    while fhi > 0.0:
        nxt = hi + step
        if nxt > hi_cap:
            return NAN
        km = _kernel_k(nxt, w)
        fnxt = km * km - target
        if fnxt >= fhi:
            return NAN
        lo = hi
        hi = nxt
        fhi = fnxt
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        km = _kernel_k(mid, w)
        if km * km - target > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def faddeeva(z):
    return complex(_faddeeva(complex(z)))


def erfi(z):
    cdef double complex zc = complex(z)
    cdef double complex zz
    if not (isfinite(zc.real) and isfinite(zc.imag)):
        raise ValueError("erfi argument must be finite")
    if _cabs(zc) < _R_SERIES:
        return complex(_erfi_series(zc))
    zz = zc * zc
    if zz.real > _LOG_MAX:
        raise OverflowError("erfi(%r) overflows: Re(z^2) = %g" % (complex(zc), zz.real))
    if zc.imag > 0.0:
        return complex(1j * (1.0 - _cexp(zz) * _faddeeva(zc)))
    return complex(-1j * (1.0 - _cexp(zz) * _faddeeva(-zc)))


def fresnel(double x):
    cdef double ax = fabs(x), t, t2, cterm, sterm, c, s, dc, ds, y, phase
    cdef int n
    cdef double complex z, e, f
    if not isfinite(x):
        raise ValueError("fresnel argument must be finite")
    if ax < _F_SERIES:
        t = 0.5 * M_PI * ax * ax
        t2 = t * t
        cterm = ax
        sterm = ax * t
        c = ax
        s = sterm / 3.0
        n = 0
        while True:
            n += 1
            cterm *= -t2 / ((2 * n - 1) * (2 * n))
            sterm *= -t2 / ((2 * n) * (2 * n + 1))
            dc = cterm / (4 * n + 1)
            ds = sterm / (4 * n + 3)
            c += dc
            s += ds
            if (fabs(dc) <= 1e-17 * fabs(c) and fabs(ds) <= 1e-17 * fabs(s)) or n > 100:
                break
    else:
        y = _SQRT_HALF_PI * ax
        z = y * _INV_SQRT2 + 1j * (y * _INV_SQRT2)
        phase = 0.5 * M_PI * ax * ax
        e = 1j * (1.0 - (cos(phase) + 1j * sin(phase)) * _faddeeva(z))
        f = e * (0.5 - 0.5j)
        c = f.real
        s = f.imag
    if x < 0.0:
        return -c, -s
    return c, s


def kernel_k(double x, double w):
    return _kernel_k(x, w)


def x_delta(double delta, double w, double lo, double hi,
            double tol, double step, double hi_cap):
    return _x_delta(delta, w, lo, hi, tol, step, hi_cap)


def x_delta_grid(double[:] deltas, double[:] ws, double lo, double hi,
                 double tol, double step, double hi_cap, double[:, :] out):
    """Fill ``out[i, j] = x_delta(deltas[i], ws[j])`` without the GIL."""
    cdef Py_ssize_t i, j
    with nogil:
        for i in range(deltas.shape[0]):
            for j in range(ws.shape[0]):
                out[i, j] = _x_delta(deltas[i], ws[j], lo, hi, tol, step, hi_cap)
