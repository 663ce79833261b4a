"""Air-to-ground channel: LoS probability, path gain, link rate and the
displacement-indexed gain table shared by every solver."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np
import yaml


def dbm_to_watt(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class ChannelParams:
    """Radio and system constants. Defaults reproduce the urban setting used
    throughout the experiments (20 dBm transmit power, -125 dBm noise)."""

    a: float = 9.6117
    b: float = 0.2782
    f: float = 2e9
    c: float = 299792458.0
    gamma: float = 3.0
    mu_los: float = 1.0
    mu_nlos: float = 20.0
    h: float = 20.0
    p_t: float = dbm_to_watt(20.0)
    noise_power: float = dbm_to_watt(-125.0)
    bandwidth_b: float = 1e5
    min_rate_c: float = 3e5
    phi: int = 50
    j_uavs: int = 2

    def __post_init__(self):
        positive = ("a", "b", "f", "c", "h", "p_t", "noise_power", "bandwidth_b", "min_rate_c")
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if self.gamma < 2:
            raise ValueError(f"gamma must be >= 2, got {self.gamma}")
        if self.mu_los > self.mu_nlos:
            raise ValueError("mu_los must not exceed mu_nlos")
        if self.phi < 1 or self.j_uavs < 1:
            raise ValueError("phi and j_uavs must be >= 1")

    def replace(self, **changes) -> ChannelParams:
        return ChannelParams(**{**asdict(self), **changes})

    def fingerprint(self) -> str:
        return _fingerprint(self)


@lru_cache(maxsize=64)
def _fingerprint(params: ChannelParams) -> str:
    blob = json.dumps(asdict(params), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


# config-file key -> (field, converter)
_CONFIG_KEYS = {
    "a": ("a", float),
    "b": ("b", float),
    "f": ("f", float),
    "c": ("c", float),
    "gamma": ("gamma", float),
    "mu_LoS": ("mu_los", float),
    "mu_NLoS": ("mu_nlos", float),
    "h": ("h", float),
    "p_T_dBm": ("p_t", dbm_to_watt),
    "p_T": ("p_t", float),
    "sigma_n2_dBm": ("noise_power", dbm_to_watt),
    "sigma_n2": ("noise_power", float),
    "B": ("bandwidth_b", float),
    "C": ("min_rate_c", float),
    "Phi": ("phi", int),
    "J": ("j_uavs", int),
}


def params_from_mapping(mapping: dict) -> ChannelParams:
    """Build ChannelParams from a key-value mapping using the symbol names of
    the parameter table (``B``, ``C``, ``p_T_dBm``, ``mu_LoS`` ...).

    Keys ending in ``_dBm`` are converted to watts here; everything past this
    point is linear.
    """
    kwargs = {}
    for key, value in mapping.items():
        if key not in _CONFIG_KEYS:
            raise KeyError(f"unknown channel key {key!r}; known: {sorted(_CONFIG_KEYS)}")
        name, conv = _CONFIG_KEYS[key]
        kwargs[name] = conv(value)
    return ChannelParams(**kwargs)


def load_channel_params(path: str | Path) -> ChannelParams:
    with open(path) as fh:
        doc = yaml.safe_load(fh) or {}
    return params_from_mapping(doc.get("channel", doc))


def los_probability(params: ChannelParams, r):
    r = np.asarray(r, dtype=float)
    if np.any(r < params.h):
        raise ValueError("3D distance cannot be smaller than the UAV altitude")
    elevation = np.degrees(np.arcsin(np.minimum(params.h / r, 1.0)))
    p = 1.0 / (1.0 + params.a * np.exp(-params.b * (elevation - params.a)))
    return p if p.ndim else float(p)


def path_gain(params: ChannelParams, r, los: bool):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise ValueError("distance must be positive")
    mu = params.mu_los if los else params.mu_nlos
    g = (4 * math.pi * params.f / params.c) ** -2 * r ** (-params.gamma) * 10 ** (-0.1 * mu)
    return g if g.ndim else float(g)


def expected_gain(params: ChannelParams, r):
    p = los_probability(params, r)
    return p * path_gain(params, r, True) + (1 - p) * path_gain(params, r, False)


def link_rate(params: ChannelParams, gain):
    gain = np.asarray(gain, dtype=float)
    if np.any(gain <= 0):
        raise ValueError("gain must be positive")
    rate = params.bandwidth_b * np.log2(1 + params.p_t * gain / params.noise_power)
    return rate if rate.ndim else float(rate)


@dataclass(frozen=True)
class GainTable:
    """Gains for every signed grid displacement (dy, dx).

    ``gain[dy + n_y - 1, dx + n_x - 1]`` holds the linear power gain between
    a UAV and a user whose grids differ by (dy, dx); ``rate`` is the matching
    achievable link rate in bps.
    """

    n_y: int
    n_x: int
    gain: np.ndarray
    rate: np.ndarray
    mode: str = "expected"
    seed: int | None = None
    params: ChannelParams = field(default_factory=ChannelParams)

    def __getitem__(self, disp) -> float:
        dy, dx = disp
        if abs(dy) >= self.n_y or abs(dx) >= self.n_x:
            raise IndexError(f"displacement {disp} outside {self.n_y}x{self.n_x} region")
        return float(self.gain[dy + self.n_y - 1, dx + self.n_x - 1])

    def rate_at(self, dy, dx):
        return self.rate[np.asarray(dy) + self.n_y - 1, np.asarray(dx) + self.n_x - 1]


def build_gain_table(params: ChannelParams, region, mode: str = "expected", seed: int | None = None) -> GainTable:
    """Tabulate gains over all displacements of ``region`` (grid centres).

    In ``sampled`` mode each displacement draws its LoS state once from
    Bernoulli(P_LoS), in row-major order, from ``default_rng(seed)``.
    """
    dy = np.arange(-(region.n_y - 1), region.n_y)
    dx = np.arange(-(region.n_x - 1), region.n_x)
    DY, DX = np.meshgrid(dy, dx, indexing="ij")
    r = np.sqrt(params.h**2 + (region.delta_d * DY) ** 2 + (region.delta_d * DX) ** 2)
    if mode == "expected":
        gain = expected_gain(params, r)
    elif mode == "sampled":
        rng = np.random.default_rng(seed)
        los = rng.random(r.shape) < los_probability(params, r)
        gain = np.where(los, path_gain(params, r, True), path_gain(params, r, False))
    else:
        raise ValueError(f"unknown gain table mode {mode!r}")
    gain = np.atleast_2d(gain)
    gain.setflags(write=False)
    rate = np.atleast_2d(link_rate(params, gain))
    rate.setflags(write=False)
    return GainTable(region.n_y, region.n_x, gain, rate, mode, seed if mode == "sampled" else None, params)


@dataclass(frozen=True)
class SystemBounds:
    eps_min: float
    eps_max: float


def system_bounds(params: ChannelParams) -> SystemBounds:
    eps_max = link_rate(params, expected_gain(params, params.h))
    if eps_max < params.min_rate_c:
        raise ValueError(
            f"no user can ever be served: best link rate {eps_max:.4g} bps < C = {params.min_rate_c:.4g} bps"
        )
    return SystemBounds(eps_min=params.min_rate_c, eps_max=eps_max)
