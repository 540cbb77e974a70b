"""Special functions for the range-mismatch gain kernels.

``erfi`` and the Fresnel integrals come from the active kernel backend
(compiled when available).  ``quadrature_oracle`` is an independent
adaptive-quadrature path used to validate them; it is slow and is not
used by any production computation.

Fresnel convention
------------------
The default is ``C(x) = int_0^x cos(pi t^2 / 2) dt`` (``"half_pi"``).  With
it ``D(0.46)^2 ~= 0.99``, which is the pairing used to state the validity
region of the closed-form depth analysis.  ``"unit"`` selects
``int_0^x cos(t^2) dt``.
"""
import math
import warnings

import numpy as np
from scipy import integrate

from ._backend import kernels

__all__ = [
    "FRESNEL_CONVENTIONS",
    "QuadratureError",
    "erfi",
    "fresnel",
    "fresnel_c",
    "fresnel_s",
    "quadrature_oracle",
    "INTEGRANDS",
]

ERFI_SERIES_RADIUS = kernels.ERFI_SERIES_RADIUS
FRESNEL_CONVENTIONS = ("half_pi", "unit")
_UNIT_SCALE = math.sqrt(2.0 / math.pi)
_UNIT_NORM = math.sqrt(math.pi / 2.0)


class QuadratureError(ArithmeticError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message, estimate):
        super().__init__(f"{message} (achieved error estimate {estimate:.3e})")
        self.estimate = estimate


def erfi(z):
    """Imaginary error function ``erfi(z) = -i erf(iz)``.

    Accepts a scalar or an array-like of complex values.

    Raises
    ------
    OverflowError
        If ``Re(z**2)`` exceeds ``log(DBL_MAX)``; the result is not
        representable as a double.
    ValueError
        For non-finite input.
    """
    if np.ndim(z) == 0:
        return kernels.erfi(complex(z))
    arr = np.asarray(z, dtype=complex)
    out = np.empty(arr.shape, dtype=complex)
    for idx, val in np.ndenumerate(arr):
        out[idx] = kernels.erfi(complex(val))
    return out


def _check_convention(convention):
    if convention not in FRESNEL_CONVENTIONS:
        raise ValueError(f"unknown Fresnel convention {convention!r}, expected one of {FRESNEL_CONVENTIONS}")


def fresnel(x, convention="half_pi"):
    """Return ``(C(x), S(x))`` for scalar ``x``."""
    _check_convention(convention)
    x = float(x)
    if convention == "half_pi":
        return kernels.fresnel(x)
    c, s = kernels.fresnel(x * _UNIT_SCALE)
    return _UNIT_NORM * c, _UNIT_NORM * s


def _fresnel_part(x, convention, part):
    if np.ndim(x) == 0:
        return fresnel(x, convention)[part]
    arr = np.asarray(x, dtype=float)
    return np.array([fresnel(v, convention)[part] for v in arr.ravel()]).reshape(arr.shape)


def fresnel_c(x, convention="half_pi"):
    """Fresnel cosine integral."""
    return _fresnel_part(x, convention, 0)


def fresnel_s(x, convention="half_pi"):
    """Fresnel sine integral."""
    return _fresnel_part(x, convention, 1)


# -- quadrature oracle -------------------------------------------------------
#
# Named integrands: each maps parameters to (callable, quadratic phase rate).
# The phase rate k means the integrand oscillates like exp(i k t^2); it is
# used to place breakpoints at every half period.

def _zero(**_):
    return (lambda t: 0.0), 0.0


def _exp_sq(c=1.0):
    c = complex(c)
    return (lambda t: np.exp(c * t * t)), abs(c.imag)


def _fresnel_cos(k=math.pi / 2):
    return (lambda t: math.cos(k * t * t)), k


def _fresnel_sin(k=math.pi / 2):
    return (lambda t: math.sin(k * t * t)), k


def _quadratic_phase(s=1.0):
    return (lambda t: np.exp(1j * s * t * t)), abs(s)


def _lossy_phase(s=1.0, w=0.0):
    return (lambda t: np.exp(1j * s * t * t - 2.0 * w * t)), abs(s)


INTEGRANDS = {
    "zero": _zero,
    "exp_sq": _exp_sq,
    "fresnel_cos": _fresnel_cos,
    "fresnel_sin": _fresnel_sin,
    "quadratic_phase": _quadratic_phase,
    "lossy_phase": _lossy_phase,
}


def _phase_breakpoints(a, b, k):
    if k == 0.0:
        return [a, b]
    pts = {a, b}
    lo, hi = min(abs(a), abs(b)), max(abs(a), abs(b))
    if a < 0.0 < b:
        lo = 0.0
        pts.add(0.0)
    m_lo = math.ceil(k * lo * lo / math.pi)
    m_hi = math.floor(k * hi * hi / math.pi)
    for m in range(max(m_lo, 1), m_hi + 1):
        t = math.sqrt(m * math.pi / k)
        for cand in (t, -t):
            if a < cand < b:
                pts.add(cand)
    return sorted(pts)


def quadrature_oracle(integrand, a, b, tol=1e-14, rtol=1e-13, breakpoints=None, **params):
    """Integrate ``integrand`` over ``[a, b]`` with adaptive Gauss-Kronrod.

    Parameters
    ----------
    integrand : str or callable
        A key of :data:`INTEGRANDS` (parameters passed as keyword
        arguments) or a callable ``f(t) -> complex``.
    a, b : float
        Finite integration limits.
    tol, rtol : float
        Requested absolute and relative tolerance.
    breakpoints : sequence of float, optional
        Extra subdivision points (added to the automatic ones for named
        oscillatory integrands).

    Returns
    -------
    complex

    Raises
    ------
    QuadratureError
        When the accumulated error estimate exceeds the requested
        tolerance.
    """
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ValueError("quadrature limits must be finite")
    if a == b:
        return 0j
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    if callable(integrand):
        func, rate = integrand, 0.0
    else:
        try:
            func, rate = INTEGRANDS[integrand](**params)
        except KeyError:
            raise ValueError(f"unknown integrand {integrand!r}") from None
    pts = set(_phase_breakpoints(a, b, rate))
    if breakpoints is not None:
        pts.update(p for p in breakpoints if a < p < b)
    pts = sorted(pts)

    total = 0j
    err = 0.0
    failed = False
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(pts[:-1], pts[1:]):
            for part, unit in ((np.real, 1.0), (np.imag, 1j)):
                try:
                    val, est = integrate.quad(lambda t: float(part(func(t))), lo, hi,
                                              epsabs=tol / len(pts), epsrel=rtol, limit=200)
                except integrate.IntegrationWarning:
                    failed = True
                    with warnings.catch_warnings():
                        warnings.simplefilter("ignore")
                        val, est = integrate.quad(lambda t: float(part(func(t))), lo, hi,
                                                  epsabs=tol / len(pts), epsrel=rtol, limit=200)
                total += unit * val
                err += est
    # QUADPACK estimates are pessimistic once roundoff dominates; only treat
    # a warning as failure when the summed estimate is clearly out of budget.
    if failed and err > max(tol, 10.0 * rtol * abs(total)):
        raise QuadratureError("adaptive quadrature did not converge", err)
    return sign * total
