"""Experiment data (expanding annulus video, toroidal boid flock) and crocker summaries."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .engine import FiltrationFamily
from .filtration import Filtration, build_lower_star
from .reduce import PersistencePair

# -- annulus ----------------------------------------------------------------


@dataclass(frozen=True)
class AnnulusConfig:
    size: int = 9             # pixels per side
    r_start: float = 0.0      # ring radius at the first frame, in grid-width units
    r_end: float = 0.75       # ring radius at the last frame
    clamp: float = 1.0        # pixel values are clipped to [0, clamp]
    half_width: float = 0.1   # sublevel threshold that makes the ring visible


def annulus_frame(r: float, cfg: AnnulusConfig = AnnulusConfig()) -> np.ndarray:
    """Pixel value = distance from the ring of radius r about the grid centre.

    Pixel centres live in the unit square, so the clamp at 1 never binds for
    the default radius path.
    """
    c = (np.arange(cfg.size) + 0.5) / cfg.size
    X, Y = np.meshgrid(c, c, indexing="ij")
    d = np.hypot(X - 0.5, Y - 0.5)
    return np.clip(np.abs(d - r), 0.0, cfg.clamp)


def annulus_radii(frames: int, cfg: AnnulusConfig = AnnulusConfig()) -> np.ndarray:
    if frames < 1:
        raise ValueError("need at least one frame")
    return np.linspace(cfg.r_start, cfg.r_end, frames) if frames > 1 else np.array([cfg.r_start])


def gen_annulus(frames: int = 10, cfg: AnnulusConfig = AnnulusConfig()) -> FiltrationFamily:
    return FiltrationFamily([build_lower_star(annulus_frame(r, cfg)) for r in annulus_radii(frames, cfg)])


def annulus_snapshot_frames(frames: int, cfg: AnnulusConfig = AnnulusConfig()) -> list[int]:
    """Five evenly spaced frames covering blob, ring and broken ring."""
    radii = annulus_radii(frames, cfg)
    wanted = cfg.r_start + (cfg.r_end - cfg.r_start) * np.arange(5) * 2 / 9
    return [int(np.argmin(np.abs(radii - w))) for w in wanted]


def betti_at(dgm: Sequence[PersistencePair], threshold: float, max_dim: int = 2) -> tuple[int, ...]:
    """Betti numbers of the sublevel complex at a grade threshold."""
    out = [0] * (max_dim + 1)
    for p in dgm:
        if p.dim <= max_dim and p.birth_grade <= threshold and (p.death is None or p.death_grade > threshold):
            out[p.dim] += 1
    return tuple(out)


# -- boids ------------------------------------------------------------------


@dataclass(frozen=True)
class BoidConfig:
    """Rule constants; bump ``version`` whenever a default changes.

    The defaults give adjacent samples a mean normalized Kendall distance of
    about 5% between their Rips orders at seed 0.
    """

    version: int = 2
    agents: int = 20
    dt: float = 0.01
    perception: float = 0.1
    separation_radius: float = 0.05
    cohesion: float = 0.6
    alignment: float = 0.6
    separation: float = 2.5
    min_speed: float = 0.3
    max_speed: float = 0.6
    wraps: int = 5            # stop once some agent has travelled this many widths along an axis
    samples: int = 60
    max_steps: int = 200_000


def torus_delta(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Shortest displacement b - a on the unit torus, per coordinate."""
    d = b - a
    return d - np.round(d)


def torus_distances(X: np.ndarray) -> np.ndarray:
    """Pairwise geodesic distances on the flat unit torus."""
    d = torus_delta(X[:, None, :], X[None, :, :])
    return np.sqrt((d ** 2).sum(-1))


def gen_boids(cfg: BoidConfig = BoidConfig(), seed: int = 0,
              positions: Optional[np.ndarray] = None, velocities: Optional[np.ndarray] = None) -> list[np.ndarray]:
    """Flock positions at ``cfg.samples`` evenly spaced times.

    The run lasts until one agent's unwrapped travel along x or y reaches
    ``cfg.wraps`` unit widths.
    """
    if cfg.agents < 1 or cfg.samples < 1:
        raise ValueError("agents and samples must be positive")
    rng = np.random.default_rng(seed)
    n = cfg.agents
    X = rng.random((n, 2)) if positions is None else np.array(positions, dtype=float) % 1.0
    if velocities is None:
        ang = rng.uniform(0, 2 * np.pi, n)
        V = np.c_[np.cos(ang), np.sin(ang)] * rng.uniform(cfg.min_speed, cfg.max_speed, n)[:, None]
    else:
        V = np.array(velocities, dtype=float)
    travelled = np.zeros((n, 2))
    trace = [X.copy()]
    for _ in range(cfg.max_steps):
        V = _boid_velocity(X, V, cfg)
        step = V * cfg.dt
        X = (X + step) % 1.0
        travelled += step
        trace.append(X.copy())
        if np.abs(travelled).max() >= cfg.wraps:
            break
    idx = np.linspace(0, len(trace) - 1, cfg.samples).round().astype(int)
    return [trace[k] for k in idx]


def _boid_velocity(X: np.ndarray, V: np.ndarray, cfg: BoidConfig) -> np.ndarray:
    n = len(X)
    if n == 1:
        return V
    off = torus_delta(X[:, None, :], X[None, :, :])        # off[a, b] points from a to b
    dist = np.sqrt((off ** 2).sum(-1))
    np.fill_diagonal(dist, np.inf)
    near = dist < cfg.perception
    cnt = near.sum(1, keepdims=True)
    has = cnt[:, 0] > 0
    acc = np.zeros_like(V)
    if has.any():
        centre = (off * near[..., None]).sum(1) / np.maximum(cnt, 1)
        heading = (V[None, :, :] * near[..., None]).sum(1) / np.maximum(cnt, 1)
        acc[has] += cfg.cohesion * centre[has] + cfg.alignment * (heading[has] - V[has])
    close = dist < cfg.separation_radius
    if close.any():
        push = -(off * (close / np.maximum(dist, 1e-9) ** 2)[..., None]).sum(1)
        acc += cfg.separation * push * 1e-3
    V = V + acc * cfg.dt * 10
    speed = np.linalg.norm(V, axis=1, keepdims=True)
    return V / np.maximum(speed, 1e-12) * np.clip(speed, cfg.min_speed, cfg.max_speed)


def boid_family(clouds: Sequence[np.ndarray], eps_max: float = 0.30, dim_max: int = 2) -> FiltrationFamily:
    """Toroidal Rips filtrations on a common simplex set.

    The simplex set is every simplex whose diameter reaches ``eps_max`` or
    less at some sample. Each member grades a simplex by its diameter capped
    at ``eps_max``, so simplices absent at that time all enter at the cap.
    """
    dists = [torus_distances(np.asarray(X)) for X in clouds]
    n = dists[0].shape[0]
    simplices = [(v,) for v in range(n)]
    for k in range(1, dim_max + 1):
        for c in itertools.combinations(range(n), k + 1):
            pairs = list(itertools.combinations(c, 2))
            if any(max(D[a, b] for a, b in pairs) <= eps_max for D in dists):
                simplices.append(c)
    members = []
    for D in dists:
        items = []
        for s in simplices:
            diam = 0.0 if len(s) == 1 else max(D[a, b] for a, b in itertools.combinations(s, 2))
            items.append((s, min(diam, eps_max)))
        members.append(Filtration.from_graded(items))
    return FiltrationFamily(members)


# -- crocker summaries ------------------------------------------------------


@dataclass
class CrockerStack:
    """ranks[t, e, a] = rank of the map from scale eps - alpha to eps + alpha at time t."""

    ranks: np.ndarray
    eps: np.ndarray
    alpha: np.ndarray
    times: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def layer(self, a: int) -> np.ndarray:
        return self.ranks[:, :, a]

    def csv(self) -> str:
        rows = ["t,eps,alpha,rank"]
        T, E, A = self.ranks.shape
        for t in range(T):
            for e in range(E):
                for a in range(A):
                    rows.append(f"{int(self.times[t])},{self.eps[e]:.10g},{self.alpha[a]:.10g},{int(self.ranks[t, e, a])}")
        return "\n".join(rows) + "\n"


def _finite_pairs(dgm: Sequence[PersistencePair], p: int) -> tuple[np.ndarray, np.ndarray]:
    b = np.array([x.birth_grade for x in dgm if x.dim == p], dtype=float)
    d = np.array([np.inf if x.death is None else x.death_grade for x in dgm if x.dim == p], dtype=float)
    return b, d


def crocker(dgms: Sequence[Sequence[PersistencePair]], p: int, eps: Sequence[float]) -> np.ndarray:
    """Betti number of dimension p at each (time, scale): births <= eps < deaths."""
    eps = np.asarray(eps, dtype=float)
    out = np.zeros((len(dgms), len(eps)), dtype=np.int64)
    for t, dgm in enumerate(dgms):
        b, d = _finite_pairs(dgm, p)
        if b.size:
            out[t] = ((b[:, None] <= eps[None, :]) & (d[:, None] > eps[None, :])).sum(0)
    return out


def crocker_stack(dgms: Sequence[Sequence[PersistencePair]], p: int, eps: Sequence[float],
                  alpha: Sequence[float]) -> CrockerStack:
    """Classes born by eps - alpha that are still alive after eps + alpha."""
    eps = np.asarray(eps, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if (alpha < 0).any():
        raise ValueError("smoothing values must be non-negative")
    out = np.zeros((len(dgms), len(eps), len(alpha)), dtype=np.int64)
    lo = eps[:, None] - alpha[None, :]
    hi = eps[:, None] + alpha[None, :]
    for t, dgm in enumerate(dgms):
        b, d = _finite_pairs(dgm, p)
        if b.size:
            out[t] = ((b[:, None, None] <= lo[None]) & (d[:, None, None] > hi[None])).sum(0)
    return CrockerStack(out, eps, alpha, np.arange(len(dgms)))
