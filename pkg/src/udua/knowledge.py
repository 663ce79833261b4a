"""Knowledge database of solved deployments and the KNN online solver.

Similarity between two user distributions is the difference degree
``gamma = m + 2n``: ``m`` users added or removed, ``n`` users relocated,
both read off the difference of the two count matrices.
"""

from __future__ import annotations

import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np
from numba import njit

from ._km import node_split_km
from .association import Association, Infeasible, default_penalty
from .deployment import Deployment, Solution, exhaustive_search
from .scenario import GridRegion, distribution_matrix

log = logging.getLogger(__name__)

FORMAT_TAG = "udua-kb/1"


class DifferenceDegree(NamedTuple):
    m: int
    n: int
    gamma: int


def difference_degree(d1, d2) -> DifferenceDegree:
    d1, d2 = np.asarray(d1), np.asarray(d2)
    if d1.shape != d2.shape:
        raise ValueError(f"distribution shapes differ: {d1.shape} vs {d2.shape}")
    diff = d1.astype(np.int64) - d2.astype(np.int64)
    m = abs(int(diff.sum()))
    n = min(int(diff[diff > 0].sum()), int(-diff[diff < 0].sum()))
    return DifferenceDegree(m, n, m + 2 * n)


@njit(cache=True)
def _gammas(flat, d):
    out = np.empty(flat.shape[0], dtype=np.int64)
    for w in range(flat.shape[0]):
        pos = 0
        neg = 0
        for c in range(flat.shape[1]):
            x = flat[w, c] - d[c]
            if x > 0:
                pos += x
            else:
                neg -= x
        out[w] = abs(pos - neg) + 2 * min(pos, neg)
    return out


def difference_degrees(stack: np.ndarray, d: np.ndarray) -> np.ndarray:
    """Gamma of ``d`` against every matrix in ``stack`` (W, n_y, n_x)."""
    flat = np.ascontiguousarray(stack, dtype=np.int64).reshape(len(stack), -1)
    return _gammas(flat, np.ascontiguousarray(d, dtype=np.int64).ravel())


@dataclass(frozen=True)
class KnowledgeEntry:
    dist: np.ndarray
    best_deployment: Deployment
    best_f: float
    provenance: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "dist": self.dist.ravel().tolist(),
            "deployment": self.best_deployment.tolist(),
            "best_f": self.best_f,
            "provenance": self.provenance,
        }


def make_fingerprint(region: GridRegion, params) -> dict:
    return {"n_y": region.n_y, "n_x": region.n_x, "delta_d": region.delta_d, "channel": params.fingerprint()}


@dataclass
class KnowledgeDatabase:
    entries: list
    fingerprint: dict

    def __post_init__(self):
        if not self.entries:
            raise ValueError("knowledge database needs at least one entry")

    def __len__(self):
        return len(self.entries)

    @cached_property
    def stack(self) -> np.ndarray:
        return np.ascontiguousarray(np.stack([e.dist for e in self.entries]), dtype=np.int64)

    @cached_property
    def flat(self) -> np.ndarray:
        return self.stack.reshape(len(self), -1)

    @cached_property
    def positions(self) -> np.ndarray:
        """Stored deployments as an int array (W, J, 2) of (x, y)."""
        return np.array([e.best_deployment.positions for e in self.entries], dtype=np.int64)

    def prefix(self, size: int) -> KnowledgeDatabase:
        """The first ``size`` entries as their own database."""
        if not 1 <= size <= len(self):
            raise ValueError(f"prefix size {size} outside [1, {len(self)}]")
        return KnowledgeDatabase(self.entries[:size], self.fingerprint)

    def check_compatible(self, region: GridRegion, params):
        want = make_fingerprint(region, params)
        if want != self.fingerprint:
            raise ValueError(f"database fingerprint {self.fingerprint} does not match {want}")

    def to_dict(self) -> dict:
        return {"format": FORMAT_TAG, "fingerprint": self.fingerprint, "entries": [e.to_dict() for e in self.entries]}


def _solve_entry(args):
    user_set, table, params = args
    return exhaustive_search(user_set, table, params)


def build_database(scenarios, table, params, n_jobs: int = 1) -> KnowledgeDatabase:
    """Solve every scenario exhaustively and store (distribution, optimum).

    Scenarios without any feasible deployment are skipped with a warning.
    """
    scenarios = list(scenarios)
    if not scenarios:
        raise ValueError("no scenarios given")
    region = scenarios[0].region
    if any(s.region != region for s in scenarios):
        raise ValueError("all scenarios must share one region")
    jobs = [(s, table, params) for s in scenarios]
    if n_jobs > 1:
        with ProcessPoolExecutor(n_jobs) as pool:
            solutions = list(pool.map(_solve_entry, jobs, chunksize=8))
    else:
        solutions = [_solve_entry(j) for j in jobs]
    entries = []
    for s, sol in zip(scenarios, solutions):
        if not sol.feasible:
            log.warning("scenario %s has no feasible deployment; skipped", s.id)
            continue
        prov = {"id": s.id, "seed": (s.gen_params or {}).get("seed")}
        entries.append(KnowledgeEntry(distribution_matrix(s), sol.deployment, sol.f, prov))
    return KnowledgeDatabase(entries, make_fingerprint(region, params))


def knn_query(db: KnowledgeDatabase, d_t, k: int) -> list:
    """The ``k`` entries closest to ``d_t``; equal gamma keeps insertion order."""
    if not 1 <= k <= len(db):
        raise ValueError(f"k={k} outside [1, {len(db)}]")
    gammas = difference_degrees(db.stack, np.asarray(d_t, dtype=np.int64))
    order = np.argsort(gammas, kind="stable")[:k]
    return [db.entries[i] for i in order]


@njit(cache=True)
def _online_core(flat, positions, users, rate, n_y, n_x, k, phi, qos, w_pen):
    """Nearest ``k`` entries by gamma, then KM on each distinct stored
    deployment. Returns (candidate order, rank of best, f, feasible, assign)."""
    X, Y = users[:, 0], users[:, 1]
    d = np.zeros(flat.shape[1], dtype=np.int64)
    for i in range(X.shape[0]):
        d[(Y[i] - 1) * n_x + X[i] - 1] += 1
    order = np.argsort(_gammas(flat, d), kind="mergesort")[:k]
    n_users, n_uav = X.shape[0], positions.shape[1]
    rates = np.empty((n_users, n_uav))
    best_rank, best_f, best_ok = 0, -np.inf, False
    best_assign = np.full(n_users, -1, dtype=np.int64)
    for r in range(k):
        w = order[r]
        seen = False
        for q in range(r):
            if np.array_equal(positions[order[q]], positions[w]):
                seen = True
                break
        if seen:
            continue  # same deployment scores the same; nearer copy already kept
        for j in range(n_uav):
            for i in range(n_users):
                rates[i, j] = rate[Y[i] - positions[w, j, 1] + n_y - 1, X[i] - positions[w, j, 0] + n_x - 1]
        f, a, ok = node_split_km(rates, phi, qos, w_pen)
        if ok and f > best_f:
            best_rank, best_f, best_ok = r, f, True
            best_assign = a
    return order, best_rank, best_f, best_ok, best_assign


def solve_online(db: KnowledgeDatabase, user_set, k: int, table, params) -> Solution:
    """Score the deployments of the ``k`` nearest stored scenarios with KM and
    keep the best feasible one (the nearest on ties).

    If every candidate is infeasible the returned solution carries the
    nearest candidate's deployment and an :class:`Infeasible` association.
    """
    db.check_compatible(user_set.region, params)
    if not 1 <= k <= len(db):
        raise ValueError(f"k={k} outside [1, {len(db)}]")
    if len(user_set) > params.j_uavs * params.phi:
        raise ValueError("more users than total UAV capacity")
    region = user_set.region
    w_pen = default_penalty(params.min_rate_c)
    order, rank, f, ok, assign = _online_core(
        db.flat, db.positions, user_set.users, table.rate, region.n_y, region.n_x, k, params.phi, params.min_rate_c, w_pen
    )
    if not ok:
        nearest = db.entries[order[0]].best_deployment
        return Solution(nearest, Infeasible(len(user_set), w_pen), -len(user_set) * w_pen)
    assoc = Association(assign, float(f))
    return Solution(db.entries[order[rank]].best_deployment, assoc, assoc.f)


def save_database(db: KnowledgeDatabase, path) -> None:
    Path(path).write_text(json.dumps(db.to_dict(), sort_keys=True, separators=(",", ":")))


def load_database(path) -> KnowledgeDatabase:
    doc = json.loads(Path(path).read_text())
    if doc.get("format") != FORMAT_TAG:
        raise ValueError(f"unsupported knowledge database format {doc.get('format')!r}")
    fp = doc["fingerprint"]
    shape = (fp["n_y"], fp["n_x"])
    entries = [
        KnowledgeEntry(
            np.asarray(e["dist"], dtype=np.int64).reshape(shape),
            Deployment(e["deployment"]),
            float(e["best_f"]),
            e.get("provenance", {}),
        )
        for e in doc["entries"]
    ]
    return KnowledgeDatabase(entries, fp)
