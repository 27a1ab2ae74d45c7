"""Monte Carlo engine for the distributional score recursion.

The in-degree of a random node is modeled as N = Poisson(T) with T Pareto
of index alpha and scale t_min = d*(alpha-1)/alpha, so E(N) = E(T) = d and
N inherits the power-law tail of T.  The recursion

    R <- c * sum_{j=1..N} R_j / D_j + [1 - c*(1-p0)]

is iterated by population dynamics: a pool of M samples approximates the
law of R at each generation, and every child value R_j is resampled
uniformly (with replacement) from the previous pool.  D is the effective
(size-biased) out-degree with P(D=j) = j*p_j/d.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import parse_hist
from .theory import validate_outdegree_hist

_CHUNK = 1 << 22
_CONVERGENCE_PROBES = 20
_CONVERGENCE_TOL = 1e-3
_MAX_GENERATIONS = 200


class SimulationConvergenceError(RuntimeError):
    """Pool CCDF still moving after the generation cap."""

    def __init__(self, generations: int, diffs: list[float]):
        super().__init__(
            f"pool distribution not converged after {generations} generations; "
            f"last probe diffs: {[float(f'{x:.2e}') for x in diffs[-5:]]}")
        self.generations = generations
        self.diffs = diffs


@dataclass(frozen=True)
class ModelSpec:
    """Parameters of the stochastic model and of the sampling run.

    ``outdeg_hist`` includes the dangling fraction at key 0 and must have
    mean d.  ``pool_size`` is the accuracy knob of the population-dynamics
    estimate; the seed fully determines the run.
    """

    c: float
    alpha: float
    d: float
    outdeg_hist: dict[int, float]
    pool_size: int = 1_000_000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.c < 1.0:
            raise ValueError(f"damping factor must be in [0, 1), got {self.c}")
        if self.alpha <= 1.0:
            raise ValueError("tail index alpha must exceed 1 (finite mean in-degree)")
        if self.d <= 0:
            raise ValueError("mean degree must be positive")
        if self.pool_size < 10_000:
            raise ValueError("pool_size must be at least 10_000")
        validate_outdegree_hist(self.outdeg_hist, self.d)

    @property
    def t_min(self) -> float:
        """Pareto scale chosen so that E(N) = d."""
        return self.d * (self.alpha - 1.0) / self.alpha

    @property
    def p0(self) -> float:
        return self.outdeg_hist.get(0, 0.0)

    @property
    def baseline(self) -> float:
        """Additive constant 1 - c*(1-p0); also the a.s. lower bound of R."""
        return 1.0 - self.c * (1.0 - self.p0)

    def to_json(self) -> str:
        return json.dumps({
            "c": self.c, "alpha": self.alpha, "d": self.d,
            "outdeg_hist": {str(j): p for j, p in sorted(self.outdeg_hist.items())},
            "pool_size": self.pool_size, "seed": self.seed}, indent=2)

    @classmethod
    def from_dict(cls, obj: dict) -> "ModelSpec":
        required = ["c", "alpha", "d", "outdeg_hist"]
        missing = [k for k in required if k not in obj]
        if missing:
            raise ValueError(f"model spec missing fields: {missing}")
        return cls(c=float(obj["c"]), alpha=float(obj["alpha"]), d=float(obj["d"]),
                   outdeg_hist=parse_hist(obj["outdeg_hist"]),
                   pool_size=int(obj.get("pool_size", 1_000_000)),
                   seed=int(obj.get("seed", 0)))


@dataclass(frozen=True)
class SamplePool:
    """One generation of score samples."""

    values: np.ndarray
    generation: int

    def __post_init__(self):
        self.values.setflags(write=False)

    def ccdf_at(self, xs: np.ndarray) -> np.ndarray:
        """Empirical P(value > x) at the probe positions."""
        ordered = np.sort(self.values)
        idx = np.searchsorted(ordered, xs, side="right")
        return (ordered.size - idx) / ordered.size


def sample_pareto(rng: np.random.Generator, alpha: float, t_min: float, size=None):
    """Inverse-CDF Pareto draws: P(T > x) = (x/t_min)^(-alpha) for x >= t_min."""
    u = 1.0 - rng.random(size)  # in (0, 1], keeps T finite
    return t_min * u ** (-1.0 / alpha)


def sample_indegree(spec: ModelSpec, rng: np.random.Generator, size=None):
    """Mixed-Poisson in-degree draws: N = Poisson(T), T Pareto(alpha, t_min)."""
    t = sample_pareto(rng, spec.alpha, spec.t_min, size)
    n = rng.poisson(t)
    return int(n) if size is None else n


class EffectiveOutdegreeSampler:
    """Inverse-CDF table for the size-biased out-degree law q_j = j*p_j/d,
    built once and reused across generations."""

    def __init__(self, outdeg_hist: dict[int, float], d: float | None = None):
        mean = validate_outdegree_hist(outdeg_hist, d)
        items = [(j, p) for j, p in sorted(outdeg_hist.items()) if j >= 1 and p > 0]
        if not items:
            raise ValueError("all out-degree mass at 0; effective out-degree undefined")
        if d is None:
            d = mean
        self.values = np.array([j for j, _ in items], dtype=np.int64)
        q = np.array([j * p / d for j, p in items])
        self.probabilities = q
        cum = np.cumsum(q)
        cum[-1] = 1.0  # absorb rounding so every uniform draw lands in range
        self._cum = cum

    def sample(self, rng: np.random.Generator, size=None):
        u = rng.random(size)
        out = self.values[np.searchsorted(self._cum, u, side="right")]
        return int(out) if size is None else out


def sample_effective_outdegree(outdeg_hist: dict[int, float], d: float,
                               rng: np.random.Generator, size=None):
    """One-shot draws from q_j = j*p_j/d (builds the table each call)."""
    return EffectiveOutdegreeSampler(outdeg_hist, d).sample(rng, size)


def initial_pool(spec: ModelSpec) -> SamplePool:
    return SamplePool(values=np.ones(spec.pool_size), generation=0)


def iterate_pool(pool: SamplePool, spec: ModelSpec, rng: np.random.Generator,
                 sampler: EffectiveOutdegreeSampler | None = None,
                 return_indegrees: bool = False):
    """Advance the pool one generation.

    Each of the M new samples draws its own in-degree N, then N pairs
    (D_j, R_j) with R_j resampled uniformly from the previous pool, and is
    set to c * sum R_j/D_j + baseline.  Children are processed in bounded
    chunks so a single huge N cannot exhaust memory.
    """
    m = spec.pool_size
    if pool.values.size != m:
        raise ValueError("pool size does not match spec.pool_size")
    if sampler is None:
        sampler = EffectiveOutdegreeSampler(spec.outdeg_hist, spec.d)
    n_in = sample_indegree(spec, rng, size=m)
    bounds = np.cumsum(n_in)
    total = int(bounds[-1]) if m else 0
    acc = np.zeros(m)
    prev = pool.values
    for start in range(0, total, _CHUNK):
        stop = min(start + _CHUNK, total)
        d_draw = sampler.sample(rng, stop - start)
        r_draw = prev[rng.integers(0, prev.size, size=stop - start)]
        owners = np.searchsorted(bounds, np.arange(start, stop), side="right")
        acc += np.bincount(owners, weights=r_draw / d_draw, minlength=m)
    new = SamplePool(values=spec.baseline + spec.c * acc,
                     generation=pool.generation + 1)
    return (new, n_in) if return_indegrees else new


def simulate_R(spec: ModelSpec, k, rng: np.random.Generator | None = None) -> SamplePool:
    """Run the recursion k generations from the all-ones pool.

    ``k`` may be a positive integer or the string "converged", which stops
    once the pool CCDF moves by less than 1e-3 at 20 log-spaced probe
    points (spanning the first generation's range up to its 99.9% point).
    Raises SimulationConvergenceError after 200 generations.
    """
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    sampler = EffectiveOutdegreeSampler(spec.outdeg_hist, spec.d)
    pool = initial_pool(spec)
    if k != "converged":
        k = int(k)
        if k < 1:
            raise ValueError("k must be >= 1 or 'converged'")
        for _ in range(k):
            pool = iterate_pool(pool, spec, rng, sampler)
        return pool

    pool = iterate_pool(pool, spec, rng, sampler)
    lo = pool.values.min()
    hi = np.quantile(pool.values, 1.0 - 1e-3)
    probes = np.geomspace(lo, max(hi, lo), _CONVERGENCE_PROBES)
    prev_ccdf = pool.ccdf_at(probes)
    diffs: list[float] = []
    while pool.generation < _MAX_GENERATIONS:
        pool = iterate_pool(pool, spec, rng, sampler)
        cur = pool.ccdf_at(probes)
        diff = float(np.abs(cur - prev_ccdf).max())
        diffs.append(diff)
        if diff < _CONVERGENCE_TOL:
            return pool
        prev_ccdf = cur
    raise SimulationConvergenceError(pool.generation, diffs)


def tail_ratio_table(pool: SamplePool, spec: ModelSpec, c_value: float,
                     ccdf_window: tuple[float, float] = (1e-5, 1e-3),
                     n_probes: int = 5) -> list[dict]:
    """Empirical tail versus the predicted c_value * P(T > x).

    Probes are log-spaced between the pool quantiles at the window's CCDF
    levels; rows outside the window (after measuring) carry in_window=False.
    """
    lo_ccdf, hi_ccdf = ccdf_window
    vals = pool.values
    x_lo = np.quantile(vals, 1.0 - hi_ccdf)
    x_hi = np.quantile(vals, 1.0 - lo_ccdf)
    xs = np.geomspace(x_lo, x_hi, n_probes)
    emp = pool.ccdf_at(xs)
    theory = c_value * (xs / spec.t_min) ** (-spec.alpha)
    rows = []
    for x, e, t in zip(xs, emp, theory):
        rows.append({"x": float(x), "empirical": float(e), "theory": float(t),
                     "ratio": float(e / t) if t > 0 else math.inf,
                     "in_window": bool(lo_ccdf <= e <= hi_ccdf)})
    return rows


@dataclass(frozen=True)
class YLevelResult:
    """Per-level total weights of sampled weighted trees.

    ``values[s, n]`` is the level-n total of sample s (NaN where the node
    budget aborted the sample); ``aborted`` flags those samples.
    """

    values: np.ndarray
    aborted: np.ndarray

    @property
    def abort_rate(self) -> float:
        return float(self.aborted.mean())

    def level(self, n: int) -> np.ndarray:
        """Completed samples of the level-n total."""
        return self.values[~self.aborted, n]


def simulate_Y_levels(spec: ModelSpec, max_level: int, n_samples: int = 10_000,
                      node_budget: int = 10_000_000,
                      rng: np.random.Generator | None = None) -> YLevelResult:
    """Explicit tree expansion of the level totals Y_0..Y_max_level.

    Each sample grows a tree where every node has an independent in-degree-N
    number of children and every edge carries weight 1/D; Y_n sums the
    products of edge weights over all level-n nodes.  Levels beyond 6 are
    refused (tree size explodes); samples whose node count would exceed
    ``node_budget`` are aborted and flagged.
    """
    if not 0 <= max_level <= 6:
        raise ValueError("level must be between 0 and 6")
    if n_samples > 10_000:
        raise ValueError("at most 10_000 tree samples")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    sampler = EffectiveOutdegreeSampler(spec.outdeg_hist, spec.d)
    values = np.full((n_samples, max_level + 1), np.nan)
    aborted = np.zeros(n_samples, dtype=bool)
    for s in range(n_samples):
        weights = np.ones(1)
        values[s, 0] = 1.0
        nodes = 1
        for level in range(1, max_level + 1):
            offspring = sample_indegree(spec, rng, size=weights.size)
            total = int(offspring.sum())
            if nodes + total > node_budget:
                aborted[s] = True
                values[s, :] = np.nan
                break
            nodes += total
            if total == 0:
                values[s, level:] = 0.0  # tree died out
                weights = np.empty(0)
                break
            d_draw = sampler.sample(rng, total)
            weights = np.repeat(weights, offspring) / d_draw
            values[s, level] = weights.sum()
    return YLevelResult(values=values, aborted=aborted)


def simulate_Y_level(spec: ModelSpec, level: int, n_samples: int = 10_000,
                     node_budget: int = 10_000_000,
                     rng: np.random.Generator | None = None) -> YLevelResult:
    """Realizations of the single level total Y_level (columns 0..level kept)."""
    return simulate_Y_levels(spec, level, n_samples, node_budget, rng)
