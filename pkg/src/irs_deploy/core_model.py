"""Link geometry, unit conversion, path gains and LoS steering vectors.

Everything here works in watts, meters and linear power gains. The
dBm/dB helpers exist for configuration parsing only.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Union

import numpy as np


class DomainError(ValueError):
    """Raised when inputs fall outside the model's domain."""


class Scheme(str, Enum):
    BHU = "bhu"    # BS -> hybrid IRS -> user
    BAPU = "bapu"  # BS -> active IRS -> passive IRS -> user
    BPAU = "bpau"  # BS -> passive IRS -> active IRS -> user

    @classmethod
    def parse(cls, value: Union[str, "Scheme"]) -> "Scheme":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise DomainError(f"unknown scheme {value!r}") from None


def dbm_to_watts(v: float) -> float:
    return 10.0 ** (v / 10.0) * 1e-3


def watts_to_dbm(p: float) -> float:
    return 10.0 * math.log10(p / 1e-3)


def db_to_linear(v: float) -> float:
    return 10.0 ** (v / 10.0)


@dataclass(frozen=True)
class Exponents:
    """Path-loss exponent per link."""

    bi: float = 2.0  # BS -> hybrid IRS
    iu: float = 2.0  # hybrid IRS -> user
    b: float = 2.0   # BS -> IRS 1
    i: float = 2.0   # IRS 1 -> IRS 2
    u: float = 2.0   # IRS 2 -> user

    def __post_init__(self):
        for name in ("bi", "iu", "b", "i", "u"):
            if not getattr(self, name) >= 1:
                raise DomainError(f"exponent {name} must be >= 1")


@dataclass(frozen=True)
class PowerConfig:
    """Transmit/amplification powers and noise levels, all in watts.

    ``p_i`` may be zero (passive-only limit); every other power must be
    strictly positive.
    """

    p_b: float
    p_i: float
    sigma0_sq: float
    sigma_r_sq: float
    beta_ref: float
    exponents: Exponents = field(default_factory=Exponents)
    alpha_max: Optional[float] = None

    def __post_init__(self):
        for name in ("p_b", "sigma0_sq", "sigma_r_sq"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be a positive finite power, got {v!r}")
        if not (self.p_i >= 0 and math.isfinite(self.p_i)):
            raise DomainError(f"p_i must be >= 0, got {self.p_i!r}")
        if not (0 < self.beta_ref <= 1):
            raise DomainError(f"beta_ref must lie in (0, 1], got {self.beta_ref!r}")
        if self.alpha_max is not None and not self.alpha_max > 0:
            raise DomainError("alpha_max must be positive when given")

    def replace(self, **changes) -> "PowerConfig":
        from dataclasses import replace

        return replace(self, **changes)

    @classmethod
    def from_dbm(cls, p_b_dbm=20.0, p_i_dbm=8.0, noise0_dbm=-80.0,
                 noise_r_dbm=-80.0, beta_ref_db=-43.0, **kwargs) -> "PowerConfig":
        return cls(
            p_b=dbm_to_watts(p_b_dbm),
            p_i=dbm_to_watts(p_i_dbm),
            sigma0_sq=dbm_to_watts(noise0_dbm),
            sigma_r_sq=dbm_to_watts(noise_r_dbm),
            beta_ref=db_to_linear(beta_ref_db),
            **kwargs,
        )


@dataclass(frozen=True)
class HybridGains:
    """Squared path gains of the single-IRS (BHU) link."""

    bi: float
    iu: float

    def __post_init__(self):
        _check_gains(bi=self.bi, iu=self.iu)


@dataclass(frozen=True)
class DoubleGains:
    """Squared path gains of the double-IRS (BAPU/BPAU) link.

    ``b`` is BS -> IRS 1, ``i`` is IRS 1 -> IRS 2, ``u`` is IRS 2 -> user.
    The active surface is IRS 1 for BAPU and IRS 2 for BPAU.
    """

    b: float
    i: float
    u: float

    def __post_init__(self):
        _check_gains(b=self.b, i=self.i, u=self.u)


PathGains = Union[HybridGains, DoubleGains]


def _check_gains(**gains):
    for name, g in gains.items():
        if not (0 < g <= 1):
            raise DomainError(f"path gain {name} must lie in (0, 1], got {g!r}")


def path_gain(d, exponent: float, beta_ref: float):
    """Squared LoS gain ``beta_ref / d**exponent``; works on arrays too."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise DomainError("link distance must be positive")
    g = beta_ref / d_arr ** exponent
    return float(g) if np.ndim(g) == 0 else g


@dataclass(frozen=True)
class SingleIrsGeometry:
    """Hybrid IRS at horizontal offset ``x_bi`` from the BS, height ``h_s``.

    ``override_d_bi`` / ``override_d_iu`` replace the coordinate-derived
    distances when both are given.
    """

    L: float
    x_bi: float = 0.0
    h_s: float = 0.0
    override_d_bi: Optional[float] = None
    override_d_iu: Optional[float] = None

    def __post_init__(self):
        has_override = (self.override_d_bi is not None, self.override_d_iu is not None)
        if any(has_override) and not all(has_override):
            raise DomainError("give both distance overrides or neither")
        if not all(has_override) and not (0 <= self.x_bi <= self.L):
            raise DomainError(f"x_bi must lie in [0, L], got {self.x_bi!r}")

    @classmethod
    def from_distances(cls, d_bi: float, d_iu: float) -> "SingleIrsGeometry":
        return cls(L=0.0, override_d_bi=d_bi, override_d_iu=d_iu)

    @property
    def x_iu(self) -> float:
        return self.L - self.x_bi

    @property
    def d_bi(self) -> float:
        if self.override_d_bi is not None:
            return self.override_d_bi
        return math.hypot(self.x_bi, self.h_s)

    @property
    def d_iu(self) -> float:
        if self.override_d_iu is not None:
            return self.override_d_iu
        return math.hypot(self.L - self.x_bi, self.h_s)


@dataclass(frozen=True)
class DoubleIrsGeometry:
    """IRS 1 at ``x_b`` from the BS, IRS 2 at ``x_u`` from the user, both at ``h_d``."""

    L: float
    x_b: float
    x_u: float
    h_d: float

    def __post_init__(self):
        if self.x_b < 0 or self.x_u < 0 or self.x_b + self.x_u > self.L:
            raise DomainError("need x_b >= 0, x_u >= 0 and x_b + x_u <= L")

    @property
    def d_b(self) -> float:
        return math.hypot(self.x_b, self.h_d)

    @property
    def d_i(self) -> float:
        return self.L - self.x_b - self.x_u

    @property
    def d_u(self) -> float:
        return math.hypot(self.x_u, self.h_d)


def gains_from_geometry(geom, cfg: PowerConfig) -> PathGains:
    ex = cfg.exponents
    if isinstance(geom, SingleIrsGeometry):
        return HybridGains(
            bi=path_gain(geom.d_bi, ex.bi, cfg.beta_ref),
            iu=path_gain(geom.d_iu, ex.iu, cfg.beta_ref),
        )
    if isinstance(geom, DoubleIrsGeometry):
        if geom.d_i <= 0:
            raise DomainError("IRS 1 and IRS 2 are co-located (d_I = 0)")
        return DoubleGains(
            b=path_gain(geom.d_b, ex.b, cfg.beta_ref),
            i=path_gain(geom.d_i, ex.i, cfg.beta_ref),
            u=path_gain(geom.d_u, ex.u, cfg.beta_ref),
        )
    raise TypeError(f"unsupported geometry {type(geom).__name__}")


@dataclass(frozen=True)
class ArrayLayout:
    n_x: int
    n_y: int = 1
    wavelength: float = 0.1
    spacing: Optional[float] = None  # defaults to half a wavelength

    def __post_init__(self):
        if self.n_x < 1 or self.n_y < 1:
            raise DomainError("array dimensions must be positive")

    @property
    def size(self) -> int:
        return self.n_x * self.n_y

    @property
    def element_spacing(self) -> float:
        return self.wavelength / 2 if self.spacing is None else self.spacing

    @classmethod
    def linear(cls, n: int) -> "ArrayLayout":
        return cls(n_x=n, n_y=1)


def _uniform_phase_ramp(freq: float, n: int) -> np.ndarray:
    return np.exp(-1j * np.pi * freq * np.arange(n))


def steering_vector(theta: float, vartheta: float, layout: ArrayLayout) -> np.ndarray:
    """UPA response for azimuth ``theta`` and elevation ``vartheta`` (radians).

    Horizontal index runs slowest (Kronecker order x then y).
    """
    scale = 2 * layout.element_spacing / layout.wavelength
    wx = _uniform_phase_ramp(scale * math.sin(theta) * math.sin(vartheta), layout.n_x)
    wy = _uniform_phase_ramp(scale * math.cos(vartheta), layout.n_y)
    return np.kron(wx, wy)


@dataclass(frozen=True)
class ElementSplit:
    """Integer split of the element budget into passive and active parts."""

    n_p: int
    n_a: int

    def __post_init__(self):
        if int(self.n_p) != self.n_p or int(self.n_a) != self.n_a:
            raise DomainError("element counts must be integers")
        if self.n_p < 1 or self.n_a < 1:
            raise DomainError(f"need n_p >= 1 and n_a >= 1, got ({self.n_p}, {self.n_a})")

    @property
    def n_total(self) -> int:
        return self.n_p + self.n_a


@dataclass(frozen=True)
class RelaxedSplit:
    """Real-valued split used before integer rounding."""

    n_p: float
    n_a: float

    def __post_init__(self):
        if self.n_p < 0 or self.n_a < 0:
            raise DomainError("relaxed element counts must be non-negative")

    @property
    def n_total(self) -> float:
        return self.n_p + self.n_a
