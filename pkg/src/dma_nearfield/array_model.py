"""DMA geometry, line-of-sight focusing vectors and the hybrid beamformer.

Element ``(i, n)`` (microstrip ``i``, element ``n`` along it) is stored at
flat index ``i * N_e + n``.  The array lies in the zy-plane centred at the
origin: elements step by ``d_e`` along z within a microstrip and
microstrips step by ``d_m`` along y.  Each microstrip is fed at ``n = 0``.
"""
import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np

__all__ = [
    "ArrayConfig",
    "SphericalPosition",
    "DistanceMode",
    "HybridBeamformer",
    "element_offsets",
    "element_distance",
    "element_distances",
    "focusing_vector",
    "decaying_focusing_vector",
    "los_channel",
    "lorentzian_weight",
    "build_hybrid_beamformer",
    "hybrid_closed_form",
    "fresnel_distance",
    "feed_distances",
]


@dataclass(frozen=True)
class ArrayConfig:
    """Hardware description of a DMA.

    ``beta`` defaults to the free-space wavenumber ``2 pi / lambda_``.
    """

    N_m: int
    N_e: int
    d_e: float
    d_m: float
    lambda_: float
    alpha: float = 0.0
    beta: float = None
    P_b: float = 1.0

    def __post_init__(self):
        if int(self.N_m) != self.N_m or self.N_m < 1:
            raise ValueError(f"N_m must be a positive integer, got {self.N_m!r}")
        if int(self.N_e) != self.N_e or self.N_e < 1:
            raise ValueError(f"N_e must be a positive integer, got {self.N_e!r}")
        object.__setattr__(self, "N_m", int(self.N_m))
        object.__setattr__(self, "N_e", int(self.N_e))
        for name in ("d_e", "d_m", "lambda_", "P_b"):
            val = getattr(self, name)
            if not (math.isfinite(val) and val > 0):
                raise ValueError(f"{name} must be positive and finite, got {val!r}")
        if not (math.isfinite(self.alpha) and self.alpha >= 0):
            raise ValueError(f"alpha must be non-negative, got {self.alpha!r}")
        if self.beta is None:
            object.__setattr__(self, "beta", 2.0 * math.pi / self.lambda_)
        elif not math.isfinite(self.beta):
            raise ValueError(f"beta must be finite, got {self.beta!r}")

    @property
    def N(self):
        return self.N_m * self.N_e

    @property
    def w(self):
        """Half-aperture attenuation exponent ``0.5 N_e d_e alpha``."""
        return 0.5 * self.N_e * self.d_e * self.alpha

    def with_alpha(self, alpha):
        return replace(self, alpha=float(alpha))

    def with_w(self, w):
        """Copy with ``alpha`` chosen so that :attr:`w` equals ``w``."""
        return replace(self, alpha=2.0 * float(w) / (self.N_e * self.d_e))

    @classmethod
    def reference_default(cls, **overrides):
        """200 x 10 elements at half-wavelength spacing, lambda = 1 cm."""
        lam = overrides.pop("lambda_", 0.01)
        params = dict(N_m=10, N_e=200, d_e=lam / 2, d_m=lam / 2, lambda_=lam)
        params.update(overrides)
        return cls(**params)


@dataclass(frozen=True)
class SphericalPosition:
    """Point ``(r, phi, theta)`` relative to the array centre."""

    r: float
    phi: float
    theta: float

    def __post_init__(self):
        if not (math.isfinite(self.r) and self.r > 0):
            raise ValueError(f"range must be positive, got {self.r!r}")
        if not (math.isfinite(self.phi) and math.isfinite(self.theta)):
            raise ValueError("angles must be finite")

    def shifted(self, delta_r):
        return replace(self, r=self.r + delta_r)


class DistanceMode(enum.Enum):
    EXACT = "exact"
    FRESNEL = "fresnel"
    FRESNEL_NO_BILINEAR = "fresnel-no-bilinear"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        for mode in cls:
            if mode.value == key or mode.name.lower().replace("_", "-") == key:
                return mode
        raise ValueError(f"unknown distance mode {value!r}")


def _check_index(cfg, i, n):
    if not (0 <= i < cfg.N_m):
        raise IndexError(f"microstrip index {i} outside [0, {cfg.N_m})")
    if not (0 <= n < cfg.N_e):
        raise IndexError(f"element index {n} outside [0, {cfg.N_e})")


def element_offsets(cfg, i, n):
    """Centred indices and feed distance ``(n_z, i_y, rho)`` of element ``(i, n)``."""
    _check_index(cfg, i, n)
    return n - 0.5 * (cfg.N_e - 1), i - 0.5 * (cfg.N_m - 1), n * cfg.d_e


def _grid(cfg):
    """Flattened ``n_z``, ``i_y`` and ``rho`` for all N elements."""
    n = np.tile(np.arange(cfg.N_e, dtype=float), cfg.N_m)
    i = np.repeat(np.arange(cfg.N_m, dtype=float), cfg.N_e)
    return n - 0.5 * (cfg.N_e - 1), i - 0.5 * (cfg.N_m - 1), n * cfg.d_e


def _distance(cfg, pos, n_z, i_y, mode):
    r, st, ct = pos.r, math.sin(pos.theta), math.cos(pos.theta)
    sp, cp = math.sin(pos.phi), math.cos(pos.phi)
    z = n_z * cfg.d_e
    y = i_y * cfg.d_m
    if mode is DistanceMode.EXACT:
        return np.sqrt((r * st * cp) ** 2 + (r * ct - z) ** 2 + (r * st * sp - y) ** 2)
    out = (r - z * ct - y * st * sp
           + z * z * (1.0 - ct * ct) / (2.0 * r)
           + y * y * (1.0 - st * st * sp * sp) / (2.0 * r))
    if mode is DistanceMode.FRESNEL:
        out = out - z * y * ct * st * sp / r
    return out


def element_distance(cfg, pos, i, n, mode=DistanceMode.EXACT):
    """Distance from element ``(i, n)`` to ``pos`` in metres."""
    n_z, i_y, _ = element_offsets(cfg, i, n)
    return float(_distance(cfg, pos, np.float64(n_z), np.float64(i_y), DistanceMode.parse(mode)))


def element_distances(cfg, pos, mode=DistanceMode.EXACT):
    """Distances from every element to ``pos``, flattened ``(N,)``."""
    n_z, i_y, _ = _grid(cfg)
    return _distance(cfg, pos, n_z, i_y, DistanceMode.parse(mode))


def feed_distances(cfg):
    """Distance ``rho`` of every element from its microstrip port."""
    return _grid(cfg)[2]


def focusing_vector(cfg, pos, mode=DistanceMode.EXACT):
    """Unit-modulus near-field focusing vector ``exp(-j 2 pi r_in / lambda)``."""
    return np.exp(-2j * np.pi / cfg.lambda_ * element_distances(cfg, pos, mode))


def decaying_focusing_vector(cfg, pos, mode=DistanceMode.EXACT):
    """Focusing vector tapered by the microstrip loss ``exp(-alpha rho)``."""
    return focusing_vector(cfg, pos, mode) * np.exp(-cfg.alpha * feed_distances(cfg))


def los_channel(cfg, pos, mode=DistanceMode.EXACT):
    """LoS channel with the path loss frozen at the range of ``pos``."""
    return cfg.lambda_ / (4.0 * np.pi * pos.r) * focusing_vector(cfg, pos, mode)


def lorentzian_weight(phi_ln):
    """Lorentzian-constrained element response ``0.5 (j + exp(j phi))``."""
    return 0.5 * (1j + np.exp(1j * np.asarray(phi_ln, dtype=float)))


def fresnel_distance(cfg):
    """Inner boundary of the radiating near field, ``0.62 sqrt(D^3 / lambda)``.

    ``D`` is the microstrip length ``N_e d_e``.
    """
    D = cfg.N_e * cfg.d_e
    return 0.62 * math.sqrt(D ** 3 / cfg.lambda_)


@dataclass(frozen=True)
class HybridBeamformer:
    """Factors of the transmitted beam ``P_m Q v``.

    ``propagation`` holds the diagonal of ``P_m``, ``analog`` is the
    ``N x N_m`` block-diagonal ``Q`` and ``digital`` the length-``N_m``
    ``v``.
    """

    propagation: np.ndarray
    analog: np.ndarray
    digital: np.ndarray
    phases: np.ndarray = field(repr=False)

    @property
    def vector(self):
        return self.propagation * (self.analog @ self.digital)


def build_hybrid_beamformer(cfg, focus, mode=DistanceMode.EXACT):
    """Focus the DMA on ``focus`` with matched analog phases and uniform digital weights."""
    _, _, rho = _grid(cfg)
    a = focusing_vector(cfg, focus, mode)
    propagation = np.exp(-(cfg.alpha + 1j * cfg.beta) * rho) / math.sqrt(cfg.N_e)
    # undo the waveguide phase so the radiated phase matches a
    phases = np.angle(a) + cfg.beta * rho
    q = lorentzian_weight(phases)
    analog = np.zeros((cfg.N, cfg.N_m), dtype=complex)
    rows = np.arange(cfg.N)
    analog[rows, rows // cfg.N_e] = q
    digital = np.full(cfg.N_m, math.sqrt(cfg.P_b / cfg.N_m), dtype=complex)
    return HybridBeamformer(propagation, analog, digital, phases)


def hybrid_closed_form(cfg, focus, mode=DistanceMode.EXACT):
    """``0.5 sqrt(P_b/N) (a * exp(-alpha rho) + j exp(-(alpha + j beta) rho))``."""
    rho = feed_distances(cfg)
    a = focusing_vector(cfg, focus, mode)
    return 0.5 * math.sqrt(cfg.P_b / cfg.N) * (
        a * np.exp(-cfg.alpha * rho) + 1j * np.exp(-(cfg.alpha + 1j * cfg.beta) * rho))
