"""Pure-Python numerical kernels.

Reference implementation of the hot scalar routines; ``_ckernels.pyx``
mirrors it line for line.  The public modules never import this file
directly, they go through :mod:`dma_nearfield._backend`.
"""
import cmath
import math

NAME = "python"

#: |z| below which erfi is summed from its Maclaurin series.  At this radius
#: the alternating series loses at most ~2 digits to cancellation.
ERFI_SERIES_RADIUS = 1.5
#: |x| below which the Fresnel integrals are summed from their series.
FRESNEL_SERIES_LIMIT = 1.5
#: x below which K(x, w) returns its continuum limit.
K_SMALL_X = 1e-6
#: log(DBL_MAX); exp() of anything larger overflows.
LOG_DBL_MAX = 709.782712893384

_TWO_OVER_SQRTPI = 1.12837916709551257388
_SQRTPI = math.sqrt(math.pi)
_SQRT_HALF_PI = math.sqrt(0.5 * math.pi)
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def faddeeva(z):
    """Faddeeva function w(z) = exp(-z**2) erfc(-iz).

    Algorithm of Poppe & Wijers (ACM TOMS 680): a Taylor-type series inside
    a small ellipse around the origin and Laplace continued fractions
    (with Gautschi's truncated-series acceleration in the intermediate
    zone) elsewhere.  About 14 significant digits in the upper half-plane.
    """
    z = complex(z)
    xi, yi = z.real, z.imag
    xabs, yabs = abs(xi), abs(yi)
    x = xabs / 6.3
    y = yabs / 4.4
    qrho = x * x + y * y
    xquad = xabs * xabs - yabs * yabs
    yquad = 2.0 * xabs * yabs

    small = qrho < 0.085264
    if small:
        qrho = (1.0 - 0.85 * y) * math.sqrt(qrho)
        n = int(6.0 + 72.0 * qrho + 0.5)
        j = 2 * n + 1
        xsum = 1.0 / j
        ysum = 0.0
        for i in range(n, 0, -1):
            j -= 2
            xaux = (xsum * xquad - ysum * yquad) / i
            ysum = (xsum * yquad + ysum * xquad) / i
            xsum = xaux + 1.0 / j
        u1 = 1.0 - _TWO_OVER_SQRTPI * (xsum * yabs + ysum * xabs)
        v1 = _TWO_OVER_SQRTPI * (xsum * xabs - ysum * yabs)
        daux = math.exp(-xquad)
        u2 = daux * math.cos(yquad)
        v2 = -daux * math.sin(yquad)
        u = u1 * u2 - v1 * v2
        v = u1 * v2 + v1 * u2
    else:
        if qrho > 1.0:
            h = 0.0
            kapn = 0
            qrho = math.sqrt(qrho)
            nu = int(3.0 + 1442.0 / (26.0 * qrho + 77.0))
        else:
            qrho = (1.0 - y) * math.sqrt(1.0 - qrho)
            h = 1.88 * qrho
            kapn = int(7.0 + 34.0 * qrho + 0.5)
            nu = int(16.0 + 26.0 * qrho + 0.5)
        h2 = 2.0 * h
        use_h = h > 0.0
        qlambda = h2 ** kapn if use_h else 0.0
        rx = ry = sx = sy = 0.0
        for n in range(nu, -1, -1):
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
        if use_h:
            u = _TWO_OVER_SQRTPI * sx
            v = _TWO_OVER_SQRTPI * sy
        else:
            u = _TWO_OVER_SQRTPI * rx
            v = _TWO_OVER_SQRTPI * ry
        if yabs == 0.0:
            u = math.exp(-xabs * xabs)

    if yi < 0.0:
        # w(z) = 2 exp(-z^2) - w(-z)
        if small:
            u2 *= 2.0
            v2 *= 2.0
        else:
            w1 = 2.0 * math.exp(-xquad)
            u2 = w1 * math.cos(yquad)
            v2 = -w1 * math.sin(yquad)
        u = u2 - u
        v = v2 - v
        if xi > 0.0:
            v = -v
    elif xi < 0.0:
        v = -v
    return complex(u, v)


def _erfi_series(z):
    zz = z * z
    term = z
    total = z
    k = 0
    while True:
        k += 1
        term = term * zz / k
        contrib = term / (2 * k + 1)
        total += contrib
        if abs(contrib) <= 1e-17 * abs(total) or k > 200:
            break
    return _TWO_OVER_SQRTPI * total


def erfi(z):
    """Imaginary error function erfi(z) = -i erf(iz) for complex z."""
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError("erfi argument must be finite")
    if abs(z) < ERFI_SERIES_RADIUS:
        return _erfi_series(z)
    zz = z * z
    if zz.real > LOG_DBL_MAX:
        raise OverflowError("erfi(%r) overflows: Re(z^2) = %g" % (z, zz.real))
    # erfc(iz) = exp(z^2) w(-z) needs -z in the upper half-plane
    if z.imag > 0.0:
        return 1j * (1.0 - cmath.exp(zz) * faddeeva(z))
    return -1j * (1.0 - cmath.exp(zz) * faddeeva(-z))


def fresnel(x):
    """Fresnel integrals (C, S) with the pi*t**2/2 phase convention."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("fresnel argument must be finite")
    ax = abs(x)
    if ax < FRESNEL_SERIES_LIMIT:
        t = 0.5 * math.pi * ax * ax
        t2 = t * t
        # C = sum (-1)^n t^{2n} x / ((2n)! (4n+1)), S likewise with odd powers
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
            if (abs(dc) <= 1e-17 * abs(c) and abs(ds) <= 1e-17 * abs(s)) or n > 100:
                break
    else:
        y = _SQRT_HALF_PI * ax
        z = complex(y * _INV_SQRT2, y * _INV_SQRT2)
        phase = 0.5 * math.pi * ax * ax
        e = 1j * (1.0 - cmath.exp(1j * phase) * faddeeva(z))
        f = e * complex(0.5, -0.5)  # e^{-i pi/4} / sqrt(2)
        c, s = f.real, f.imag
    if x < 0.0:
        return -c, -s
    return c, s


def kernel_k(x, w):
    """Range-mismatch gain kernel K(x, w) for x >= 0, w >= 0."""
    if x < K_SMALL_X:
        if w == 0.0:
            return 1.0
        return -math.expm1(-2.0 * w) / (2.0 * w)
    a = complex(x * 0.5 * _INV_SQRT2, x * 0.5 * _INV_SQRT2)
    b = complex(w / x * _INV_SQRT2, -w / x * _INV_SQRT2)
    z1 = a + b
    z2 = b - a
    if abs(z1) < ERFI_SERIES_RADIUS and abs(z2) < ERFI_SERIES_RADIUS:
        diff = _erfi_series(z1) - _erfi_series(z2)
        return _SQRTPI * math.exp(-w) / (2.0 * x) * abs(diff)
    # Factor the unit-modulus exp(a^2 + b^2) out of both erfi terms so the
    # large imaginary phase w^2/x^2 never enters the arithmetic.
    decay = math.exp(-2.0 * w)
    if x * x <= 2.0 * w:
        val = abs(faddeeva(-z1) - decay * faddeeva(-z2))
    else:
        phase = 0.25 * x * x - w * w / (x * x)
        val = abs(2.0 * math.exp(-w) * cmath.exp(-1j * phase)
                  - faddeeva(z1) - decay * faddeeva(-z2))
    return _SQRTPI / (2.0 * x) * val


def x_delta(delta, w, lo, hi, tol, step, hi_cap):
    """First root of K(x, w)^2 = delta K(0, w)^2 by bracketed bisection.

    The upper end starts at ``hi`` and is pushed out by ``step`` while K^2
    keeps decreasing.  Returns NaN when no monotone bracket exists.
    """
    k0 = kernel_k(0.0, w)
    target = delta * k0 * k0

    flo = kernel_k(lo, w) ** 2 - target
    if flo <= 0.0:
        return lo
    fhi = kernel_k(hi, w) ** 2 - target
    while fhi > 0.0:
        nxt = hi + step
        if nxt > hi_cap:
            return math.nan
        fnxt = kernel_k(nxt, w) ** 2 - target
        if fnxt >= fhi:
            return math.nan
        lo, hi, fhi = hi, nxt, fnxt
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if kernel_k(mid, w) ** 2 - target > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def x_delta_grid(deltas, ws, lo, hi, tol, step, hi_cap, out):
    """Fill ``out[i, j] = x_delta(deltas[i], ws[j])``."""
    for i, d in enumerate(deltas):
        for j, w in enumerate(ws):
            out[i, j] = x_delta(d, w, lo, hi, tol, step, hi_cap)
