"""Depth of focus of a lossy DMA.

``x_delta(w)`` is the normalised mismatch at which ``K(x, w)^2`` falls to
``delta K(0, w)^2``.  Setting ``t_z(+-dr) = x_delta(w)`` and solving for
``dr`` gives the beam-depth limits

    Delta^+-(r, w) = r^2 / (R_c -+ r),   R_c = d_e^2 N_e^2 pi sin^2(theta) / (lambda x_delta(w)^2)

where ``R_c`` is the critical range: for ``r >= R_c`` no far-side limit
exists.  A piecewise-linear model of ``x_delta(w)`` (linear in ``w`` on each
side of ``w0``, coefficients linear in ``delta``) makes the limits closed
form.
"""
import enum
import math
import warnings
from dataclasses import dataclass, fields

import numpy as np

from ._backend import kernels
from .array_model import DistanceMode
from .gain import relative_gain_lemma2, relative_gain_oracle

__all__ = [
    "NoRootInBracket",
    "UndefinedBeamDepth",
    "XSource",
    "DepthFitModel",
    "PUBLISHED_MODEL",
    "FitResult",
    "DepthLimits",
    "DepthCheck",
    "solve_x_delta",
    "x_delta_grid",
    "model_x_delta",
    "fit_depth_model",
    "model_sse",
    "per_delta_mse",
    "critical_range",
    "depth_limits",
    "verify_depth_limits",
    "default_w_grid",
    "default_delta_grid",
]

#: K(x, w)^2 is strictly decreasing in x on [0, 4.7] for w = 0.
MONOTONE_UPPER = 4.7
BRACKET_LOWER = 1e-6
BRACKET_STEP = 0.1
BRACKET_CAP = 50.0
DEFAULT_TOL = 1e-8
W0 = 2.3
#: smallest delta inside the fitted model's domain
FIT_DELTA_MIN = 0.2


class NoRootInBracket(ArithmeticError):
    """K^2 turns upward before reaching ``delta K(0, w)^2``."""


class UndefinedBeamDepth(ValueError):
    """Beam depth is undefined when ``sin(theta) = 0``."""


class XSource(enum.Enum):
    NUMERIC = "numeric"
    MODEL = "model"


def default_w_grid():
    return np.round(np.arange(151) * 0.1, 10)


def default_delta_grid():
    return np.round(0.2 + np.arange(8) * 0.1, 10)


def _check_delta(delta):
    if not (0.0 < delta < 1.0):
        raise ValueError(f"delta must lie in (0, 1), got {delta!r}")


def solve_x_delta(delta, w, tol=DEFAULT_TOL):
    """Solve ``K(x, w)^2 = delta K(0, w)^2`` for the first crossing ``x``.

    Bisection starts on ``[1e-6, 4.7]``.  When ``K^2`` is still above the
    target at 4.7 (large ``w`` flattens the kernel) the upper end moves out
    in steps of 0.1 for as long as ``K^2`` keeps falling.

    Raises
    ------
    NoRootInBracket
        If ``K^2`` stops decreasing before reaching the target.
    """
    _check_delta(delta)
    if w < 0:
        raise ValueError("w must be non-negative")
    if delta < FIT_DELTA_MIN:
        warnings.warn(f"delta={delta} is below {FIT_DELTA_MIN}; x_delta(w) is strongly nonlinear there",
                      stacklevel=2)
    x = kernels.x_delta(float(delta), float(w), BRACKET_LOWER, MONOTONE_UPPER, tol,
                        BRACKET_STEP, BRACKET_CAP)
    if math.isnan(x):
        raise NoRootInBracket(f"no monotone bracket for K^2 = {delta} K(0)^2 at w = {w}")
    return x


def x_delta_grid(delta_grid, w_grid, tol=DEFAULT_TOL):
    """``x_delta(w)`` on the outer product of the grids, shape ``(len(delta), len(w))``."""
    deltas = np.ascontiguousarray(delta_grid, dtype=float)
    ws = np.ascontiguousarray(w_grid, dtype=float)
    for d in deltas:
        _check_delta(d)
    out = np.empty((deltas.size, ws.size))
    kernels.x_delta_grid(deltas, ws, BRACKET_LOWER, MONOTONE_UPPER, tol, BRACKET_STEP,
                         BRACKET_CAP, out)
    if np.isnan(out).any():
        i, j = np.argwhere(np.isnan(out))[0]
        raise NoRootInBracket(f"no monotone bracket at delta = {deltas[i]}, w = {ws[j]}")
    return out


@dataclass(frozen=True)
class DepthFitModel:
    """Piecewise-linear model of ``x_delta(w) - x_delta(0)``.

    Each coefficient is affine in delta, e.g. ``a0(delta) = a0_c + a0_d delta``.
    The ``a`` branch applies for ``w < w0`` and the ``b`` branch above.
    """

    a0_c: float
    a0_d: float
    a1_c: float
    a1_d: float
    b0_c: float
    b0_d: float
    b1_c: float
    b1_d: float
    w0: float = W0

    def __post_init__(self):
        if not self.w0 > 0:
            raise ValueError("w0 must be positive")
        if not all(math.isfinite(getattr(self, f.name)) for f in fields(self)):
            raise ValueError("model coefficients must be finite")

    def coefficients(self, delta):
        return (self.a0_c + self.a0_d * delta, self.a1_c + self.a1_d * delta,
                self.b0_c + self.b0_d * delta, self.b1_c + self.b1_d * delta)

    def as_vector(self):
        return np.array([self.a0_c, self.a0_d, self.a1_c, self.a1_d,
                         self.b0_c, self.b0_d, self.b1_c, self.b1_d])

    def offset(self, delta, w):
        """``x_hat - x_delta(0)``; array-valued in ``w``."""
        a0, a1, b0, b1 = self.coefficients(delta)
        w = np.asarray(w, dtype=float)
        out = np.where(w < self.w0, a0 + a1 * w, b0 + b1 * w)
        return float(out) if out.ndim == 0 else out

    def continuity_residual(self, delta):
        a0, a1, b0, b1 = self.coefficients(delta)
        return a0 + a1 * self.w0 - b0 - b1 * self.w0

    def crossing_w(self, delta):
        """``w`` where the upper branch returns to ``x_delta(0)``."""
        _, _, b0, b1 = self.coefficients(delta)
        return -b0 / b1


PUBLISHED_MODEL = DepthFitModel(
    a0_c=0.02, a0_d=-0.007,
    a1_c=-0.154, a1_d=0.121,
    b0_c=-1.186, b0_d=0.963,
    b1_c=0.370, b1_d=-0.301,
    w0=2.3,
)


def model_x_delta(model, delta, w, x0=None):
    """Evaluate the piecewise-linear ``x_hat_delta(w)``.

    ``x0`` is ``x_delta(0)``; solved numerically when not given.
    """
    if x0 is None:
        x0 = solve_x_delta(delta, 0.0)
    return x0 + model.offset(delta, w)


@dataclass
class FitResult:
    model: DepthFitModel
    mse: dict
    sse: float
    x_numeric: np.ndarray
    w_grid: np.ndarray
    delta_grid: np.ndarray


def _design(w_grid, delta_grid, w0):
    rows = []
    for d in delta_grid:
        for w in w_grid:
            if w < w0:
                rows.append([1.0, d, w, w * d, 0.0, 0.0, 0.0, 0.0])
            else:
                rows.append([0.0, 0.0, 0.0, 0.0, 1.0, d, w, w * d])
    for d in delta_grid:
        rows.append([1.0, d, w0, w0 * d, -1.0, -d, -w0, -w0 * d])
    return np.array(rows)


def _targets(x_numeric, x0):
    n_delta = x_numeric.shape[0]
    y = (x_numeric - x0[:, None]).ravel()
    return np.concatenate([y, np.zeros(n_delta)])


def model_sse(model, x_numeric, w_grid, delta_grid):
    """Least-squares objective (data misfit plus continuity penalty) of ``model``."""
    x0 = _x0_column(x_numeric, w_grid, delta_grid)
    A = _design(w_grid, delta_grid, model.w0)
    r = A @ model.as_vector() - _targets(x_numeric, x0)
    return float(r @ r)


def _x0_column(x_numeric, w_grid, delta_grid):
    w_grid = np.asarray(w_grid, dtype=float)
    zero = np.flatnonzero(w_grid == 0.0)
    if zero.size:
        return x_numeric[:, zero[0]]
    return np.array([solve_x_delta(d, 0.0) for d in delta_grid])


def per_delta_mse(model, x_numeric, w_grid, delta_grid):
    """Mean squared error of ``model`` against ``x_numeric`` for each delta."""
    x0 = _x0_column(x_numeric, w_grid, delta_grid)
    out = {}
    for k, d in enumerate(delta_grid):
        err = x0[k] + model.offset(d, w_grid) - x_numeric[k]
        out[float(d)] = float(np.mean(err ** 2))
    return out


def fit_depth_model(w_grid=None, delta_grid=None, w0=W0, x_numeric=None):
    """Least-squares fit of the piecewise-linear model with a continuity penalty.

    Minimises ``sum (x_hat - x)^2`` over the grid plus, for each delta,
    ``(a0 + a1 w0 - b0 - b1 w0)^2``; the 8 coefficients enter linearly.

    Raises
    ------
    numpy.linalg.LinAlgError
        When the grid leaves the normal equations singular (for example
        all samples on one side of ``w0`` or a single delta).
    """
    w_grid = default_w_grid() if w_grid is None else np.asarray(w_grid, dtype=float)
    delta_grid = default_delta_grid() if delta_grid is None else np.asarray(delta_grid, dtype=float)
    if w_grid.size == 0 or delta_grid.size == 0:
        raise ValueError("grids must be non-empty")
    if x_numeric is None:
        x_numeric = x_delta_grid(delta_grid, w_grid)
    x0 = _x0_column(x_numeric, w_grid, delta_grid)
    A = _design(w_grid, delta_grid, w0)
    if np.linalg.matrix_rank(A) < A.shape[1]:
        raise np.linalg.LinAlgError("degenerate grid: normal equations are singular")
    coef, *_ = np.linalg.lstsq(A, _targets(x_numeric, x0), rcond=None)
    model = DepthFitModel(*map(float, coef), w0=w0)
    return FitResult(
        model=model,
        mse=per_delta_mse(model, x_numeric, w_grid, delta_grid),
        sse=model_sse(model, x_numeric, w_grid, delta_grid),
        x_numeric=x_numeric,
        w_grid=w_grid,
        delta_grid=delta_grid,
    )


@dataclass(frozen=True)
class DepthLimits:
    """Beam-depth interval ``[r - delta_minus, r + delta_plus]``.

    ``delta_plus`` is ``None`` when the far-side limit does not exist
    (``r >= critical_range``).
    """

    delta_minus: float
    delta_plus: float | None
    critical_range: float
    x_delta: float

    @property
    def unbounded(self):
        return self.delta_plus is None


def critical_range(cfg, pos, x):
    return (cfg.d_e * cfg.N_e) ** 2 * math.pi * math.sin(pos.theta) ** 2 / (cfg.lambda_ * x * x)


def depth_limits(cfg, pos, delta, x_source=XSource.NUMERIC, model=PUBLISHED_MODEL, w=None):
    """Beam-depth limits around ``pos`` for gain fraction ``delta``.

    The loss is taken from ``cfg.alpha`` unless ``w`` overrides it.

    Raises
    ------
    UndefinedBeamDepth
        If ``sin(theta) == 0``.
    NoRootInBracket
        Propagated from the numerical ``x_delta`` solve.
    """
    s = math.sin(pos.theta)
    if abs(s) < 1e-15:
        raise UndefinedBeamDepth("beam depth is undefined for sin(theta) = 0")
    _check_delta(delta)
    w = cfg.w if w is None else float(w)
    x_source = XSource(x_source)
    if x_source is XSource.NUMERIC:
        x = solve_x_delta(delta, w)
    else:
        x = model_x_delta(model, delta, w)
    rc = critical_range(cfg, pos, x)
    r = pos.r
    plus = r * r / (rc - r) if r < rc else None
    return DepthLimits(r * r / (rc + r), plus, rc, x)


@dataclass(frozen=True)
class DepthCheck:
    """Relative gains at the beam-depth limits (``None`` when unbounded)."""

    gain_at_minus: float
    gain_at_plus: float | None
    lemma2_at_minus: float
    lemma2_at_plus: float | None
    limits: DepthLimits


def verify_depth_limits(cfg, pos, delta, x_source=XSource.MODEL, model=PUBLISHED_MODEL,
                        mode=DistanceMode.EXACT, w=None):
    """Evaluate the gain at both beam-depth limits.

    ``gain_at_*`` come from the element-wise oracle and ``lemma2_at_*``
    from the closed-form kernel.
    """
    if w is not None:
        cfg = cfg.with_w(w)
    lim = depth_limits(cfg, pos, delta, x_source, model)
    dm = -lim.delta_minus
    g_minus = relative_gain_oracle(cfg, pos, pos.shifted(dm), mode)
    l_minus = relative_gain_lemma2(cfg, pos, dm).value
    g_plus = l_plus = None
    if not lim.unbounded:
        g_plus = relative_gain_oracle(cfg, pos, pos.shifted(lim.delta_plus), mode)
        l_plus = relative_gain_lemma2(cfg, pos, lim.delta_plus).value
    return DepthCheck(g_minus, g_plus, l_minus, l_plus, lim)
