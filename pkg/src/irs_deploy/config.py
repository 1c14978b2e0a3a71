"""Scenario files: ``key = value`` lines with ``#`` comments.

Powers are written in dBm (``-inf`` gives zero watts), the reference gain
in dB and lengths in meters. Unknown keys are rejected.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

from .core_model import (
    DomainError,
    DoubleIrsGeometry,
    ElementSplit,
    Exponents,
    PowerConfig,
    Scheme,
    SingleIrsGeometry,
    db_to_linear,
    dbm_to_watts,
)


class ConfigError(ValueError):
    """Malformed or invalid scenario text."""


@dataclass(frozen=True)
class ScenarioConfig:
    p_b_dbm: float = 20.0
    p_i_dbm: float = 8.0
    noise0_dbm: float = -80.0
    noise_r_dbm: float = -80.0
    beta_ref_db: float = -43.0
    exp_bi: float = 2.0
    exp_iu: float = 2.0
    exp_b: float = 2.0
    exp_i: float = 2.0
    exp_u: float = 2.0
    alpha_max: Optional[float] = None
    L: float = 90.0
    h_s: float = 10.0
    h_d: float = 5.0
    x_bi: Optional[float] = None
    d_bi: Optional[float] = None
    d_iu: Optional[float] = None
    x_b: float = 5.0
    x_u: float = 5.0
    n_total: int = 100
    n_p: Optional[int] = None
    scheme: Scheme = Scheme.BHU
    grid_res: float = 0.1
    seed: int = 0

    # Hybrid link used when neither x_bi nor explicit distances are given.
    DEFAULT_D_BI = 80.0
    DEFAULT_D_IU = 50.0

    def power_config(self) -> PowerConfig:
        return PowerConfig(
            p_b=dbm_to_watts(self.p_b_dbm),
            p_i=dbm_to_watts(self.p_i_dbm),
            sigma0_sq=dbm_to_watts(self.noise0_dbm),
            sigma_r_sq=dbm_to_watts(self.noise_r_dbm),
            beta_ref=db_to_linear(self.beta_ref_db),
            exponents=Exponents(self.exp_bi, self.exp_iu, self.exp_b, self.exp_i, self.exp_u),
            alpha_max=self.alpha_max,
        )

    def single_geometry(self) -> SingleIrsGeometry:
        if self.x_bi is not None:
            return SingleIrsGeometry(L=self.L, x_bi=self.x_bi, h_s=self.h_s)
        d_bi = self.DEFAULT_D_BI if self.d_bi is None else self.d_bi
        d_iu = self.DEFAULT_D_IU if self.d_iu is None else self.d_iu
        return SingleIrsGeometry(L=self.L, h_s=self.h_s, override_d_bi=d_bi, override_d_iu=d_iu)

    def double_geometry(self) -> DoubleIrsGeometry:
        return DoubleIrsGeometry(L=self.L, x_b=self.x_b, x_u=self.x_u, h_d=self.h_d)

    def geometry_for(self, scheme: Scheme):
        return self.single_geometry() if scheme is Scheme.BHU else self.double_geometry()

    def height_for(self, scheme: Scheme) -> float:
        return self.h_s if scheme is Scheme.BHU else self.h_d

    def fixed_split(self) -> Optional[ElementSplit]:
        if self.n_p is None:
            return None
        return ElementSplit(n_p=self.n_p, n_a=self.n_total - self.n_p)

    def with_values(self, **changes) -> "ScenarioConfig":
        cfg = dataclasses.replace(self, **changes)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        def bad(name, why):
            raise ConfigError(f"invalid {name}: {why}")

        if self.n_total < 2:
            bad("n_total", "must be an integer >= 2")
        if self.n_p is not None and not 1 <= self.n_p <= self.n_total - 1:
            bad("n_p", "must lie in [1, n_total - 1]")
        for name in ("L", "h_s", "h_d", "grid_res"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                bad(name, "must be a finite non-negative length")
        if not self.grid_res > 0:
            bad("grid_res", "must be positive")
        if (self.d_bi is None) != (self.d_iu is None):
            bad("d_bi/d_iu", "give both distances or neither")
        for name in ("p_b_dbm", "noise0_dbm", "noise_r_dbm", "beta_ref_db"):
            if not math.isfinite(getattr(self, name)):
                bad(name, "must be finite")
        try:
            self.power_config()
            self.double_geometry()
            self.single_geometry()
        except DomainError as exc:
            raise ConfigError(f"invalid scenario: {exc}") from None


def _as_int(text: str) -> int:
    v = float(text)
    if not v.is_integer():
        raise ValueError(f"{text!r} is not an integer")
    return int(v)


def _as_float(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise ValueError("NaN is not allowed")
    return v


def _optional(conv):
    def parse(text):
        return None if text.lower() in ("", "none") else conv(text)

    return parse


_CONVERTERS = {
    "alpha_max": _optional(_as_float),
    "x_bi": _optional(_as_float),
    "d_bi": _optional(_as_float),
    "d_iu": _optional(_as_float),
    "n_total": _as_int,
    "n_p": _optional(_as_int),
    "seed": _as_int,
    "scheme": Scheme.parse,
}
KEYS = tuple(f.name for f in dataclasses.fields(ScenarioConfig))


def convert_value(key: str, text: str):
    if key not in KEYS:
        raise ConfigError(f"unknown key {key!r}")
    return _CONVERTERS.get(key, _as_float)(text.strip())


def parse_config(text: str, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Parse scenario text; ``overrides`` (key -> string) win over the file."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw.strip()!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = convert_value(key, value)
        except ConfigError as exc:
            raise ConfigError(f"line {lineno}: {exc}") from None
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"line {lineno}: bad value for {key!r}: {exc}") from None
    for key, value in (overrides or {}).items():
        try:
            values[key] = convert_value(key, value)
        except ConfigError:
            raise
        except (ValueError, DomainError) as exc:
            raise ConfigError(f"bad value for {key!r}: {exc}") from None
    cfg = ScenarioConfig(**values)
    cfg.validate()
    return cfg
