"""Ground-user scenarios over a rasterised region."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelParams


@dataclass(frozen=True)
class GridRegion:
    n_y: int = 9
    n_x: int = 9
    delta_d: float = 10.0

    def __post_init__(self):
        if self.n_y < 1 or self.n_x < 1:
            raise ValueError("region needs at least one grid")
        if not self.delta_d > 0:
            raise ValueError("delta_d must be positive")

    @property
    def n_grids(self) -> int:
        return self.n_y * self.n_x

    def to_dict(self) -> dict:
        return {"n_y": self.n_y, "n_x": self.n_x, "delta_d": self.delta_d}


@dataclass(frozen=True)
class ScenarioGenConfig:
    mu: float
    sigma: float
    seed: int = 0
    max_resamples: int = 1000

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")
        if self.max_resamples < 1:
            raise ValueError("max_resamples must be >= 1")


class ScenarioGenerationError(RuntimeError):
    pass


@dataclass
class UserSet:
    """Users as an ``(I, 2)`` integer array of 1-based ``(X, Y)`` grid ordinals
    (X is the column, Y the row)."""

    users: np.ndarray
    region: GridRegion
    id: str = ""
    gen_params: dict | None = field(default=None)

    def __post_init__(self):
        self.users = np.ascontiguousarray(np.asarray(self.users, dtype=np.int64).reshape(-1, 2))
        X, Y = self.users[:, 0], self.users[:, 1]
        if np.any((X < 1) | (X > self.region.n_x) | (Y < 1) | (Y > self.region.n_y)):
            raise ValueError(f"user outside the {self.region.n_y}x{self.region.n_x} region")

    def __len__(self) -> int:
        return len(self.users)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "region": self.region.to_dict(),
            "gen_params": self.gen_params,
            "users": self.users.tolist(),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> UserSet:
        region = GridRegion(**doc["region"])
        return cls(np.asarray(doc["users"], dtype=np.int64).reshape(-1, 2), region, doc.get("id", ""), doc.get("gen_params"))


def draw_counts(rng: np.random.Generator, region: GridRegion, mu: float, sigma: float) -> np.ndarray:
    """One log-normal draw per grid, rounded to the nearest integer."""
    return np.rint(rng.lognormal(mu, sigma, size=(region.n_y, region.n_x))).astype(np.int64)


def users_from_counts(counts: np.ndarray) -> np.ndarray:
    """Expand a count matrix into (X, Y) rows in row-major grid order."""
    ky, kx = np.nonzero(counts)
    reps = counts[ky, kx]
    return np.column_stack([np.repeat(kx + 1, reps), np.repeat(ky + 1, reps)]).astype(np.int64)


def sample_user_set(region: GridRegion, cfg: ScenarioGenConfig, params: ChannelParams, id: str = "") -> UserSet:
    """Draw a user set whose size lies in ``[1, J*Phi]``.

    Draws that violate the size bound are discarded and the whole matrix is
    redrawn, up to ``cfg.max_resamples`` times.
    """
    rng = np.random.default_rng(cfg.seed)
    cap = params.j_uavs * params.phi
    total = 0
    for _ in range(cfg.max_resamples):
        counts = draw_counts(rng, region, cfg.mu, cfg.sigma)
        total = int(counts.sum())
        if 1 <= total <= cap:
            gen = {"mu": cfg.mu, "sigma": cfg.sigma, "seed": cfg.seed}
            return UserSet(users_from_counts(counts), region, id or f"mu{cfg.mu}-sigma{cfg.sigma}-seed{cfg.seed}", gen)
    raise ScenarioGenerationError(
        f"no draw with 1 <= I <= {cap} after {cfg.max_resamples} attempts (last I = {total})"
    )


def distribution_matrix(user_set: UserSet, region: GridRegion | None = None) -> np.ndarray:
    """Integer ``n_y x n_x`` matrix counting users per grid."""
    region = region or user_set.region
    users = user_set.users
    X, Y = users[:, 0], users[:, 1]
    if np.any((X < 1) | (X > region.n_x) | (Y < 1) | (Y > region.n_y)):
        raise ValueError("user outside region")
    flat = np.bincount((Y - 1) * region.n_x + (X - 1), minlength=region.n_grids)
    return flat.astype(np.int64, copy=False).reshape(region.n_y, region.n_x)


def save_user_sets(sets, path: str | Path) -> None:
    sets = [sets] if isinstance(sets, UserSet) else list(sets)
    doc = sets[0].to_dict() if len(sets) == 1 else [s.to_dict() for s in sets]
    Path(path).write_text(json.dumps(doc, indent=1))


def load_user_sets(path: str | Path) -> list[UserSet]:
    doc = json.loads(Path(path).read_text())
    if isinstance(doc, dict):
        doc = [doc]
    return [UserSet.from_dict(d) for d in doc]
