"""Near-field beamforming gain and beam depth of lossy dynamic metasurface antennas."""
__version__ = "0.1.0"

from ._backend import BACKEND, available_backends
from .array_model import (
    ArrayConfig,
    DistanceMode,
    HybridBeamformer,
    SphericalPosition,
    build_hybrid_beamformer,
    focusing_vector,
    fresnel_distance,
)
from .beamdepth import (
    PUBLISHED_MODEL,
    DepthFitModel,
    DepthLimits,
    NoRootInBracket,
    UndefinedBeamDepth,
    XSource,
    depth_limits,
    fit_depth_model,
    model_x_delta,
    solve_x_delta,
    verify_depth_limits,
    x_delta_grid,
)
from .gain import (
    GainSource,
    eta,
    g_opt,
    gain_curve,
    kernel_D,
    kernel_K,
    relative_gain_lemma1,
    relative_gain_lemma2,
    relative_gain_oracle,
)
from .specfun import QuadratureError, erfi, fresnel, quadrature_oracle

__all__ = [
    "__version__", "BACKEND", "available_backends",
    "ArrayConfig", "DistanceMode", "HybridBeamformer", "SphericalPosition",
    "build_hybrid_beamformer", "focusing_vector", "fresnel_distance",
    "PUBLISHED_MODEL", "DepthFitModel", "DepthLimits", "NoRootInBracket", "UndefinedBeamDepth",
    "XSource", "depth_limits", "fit_depth_model", "model_x_delta", "solve_x_delta",
    "verify_depth_limits", "x_delta_grid",
    "GainSource", "eta", "g_opt", "gain_curve", "kernel_D", "kernel_K",
    "relative_gain_lemma1", "relative_gain_lemma2", "relative_gain_oracle",
    "QuadratureError", "erfi", "fresnel", "quadrature_oracle",
]
