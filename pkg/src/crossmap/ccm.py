"""Convergent cross mapping, lag sweeps, and causal-network summaries.

Testing the claim "cause => effect" always embeds the EFFECT series and
estimates the CAUSE from its shadow manifold: if the cause drives the
effect, its information is recoverable there. Convergence of the skill
as the library grows is the causality signature; a rising curve that
plateaus supports the claim, a flat one rejects it.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.stats import kendalltau

from .core import DataError, SkillStats, TimeSeries, skill_stats
from .embedding import EmbeddingParams, embed
from .forecast import (cross_estimates, estimates_from_distances,
                       select_embedding_dimension, _pairwise_distances)

__all__ = [
    "CcmConfig",
    "CurveRow",
    "ConvergenceDecision",
    "CcmCurve",
    "EccmRow",
    "EccmProfile",
    "CausalEdge",
    "CausalNetwork",
    "default_library_sizes",
    "shared_embedding_dimension",
    "cross_map_skill",
    "ccm_curve",
    "convergence_test",
    "pai_cross_map",
    "eccm_profile",
    "causal_summary",
]


@dataclass(frozen=True)
class CcmConfig:
    """Cross-mapping parameters.

    ``lib_sizes`` of None means the default grid: 8 sizes geometrically
    spaced from E+2 (the smallest library that leaves E+1 neighbors after
    self-exclusion) up to every admissible point. Library draws are
    uniform random subsets without replacement; ``contiguous_draws``
    switches to random contiguous segments for comparison. The three
    ``min_*`` values are the convergence-test thresholds.
    """

    e_dim: int
    tau: int = 1
    lag: int = 0
    lib_sizes: tuple[int, ...] | None = None
    samples_per_size: int = 100
    seed: int = 0
    contiguous_draws: bool = False
    min_rho_gain: float = 0.10
    min_kendall_tau: float = 0.5
    min_final_rho: float = 0.2

    def __post_init__(self) -> None:
        if self.e_dim < 1:
            raise DataError(f"embedding dimension must be >= 1, got {self.e_dim}")
        if self.tau < 1:
            raise DataError(f"delay tau must be >= 1, got {self.tau}")
        if self.samples_per_size < 1:
            raise DataError(f"samples_per_size must be >= 1, got {self.samples_per_size}")
        if self.seed < 0:
            raise DataError(f"seed must be non-negative, got {self.seed}")
        if self.lib_sizes is not None:
            sizes = tuple(int(s) for s in self.lib_sizes)
            if len(sizes) == 0:
                raise DataError("lib_sizes must not be empty")
            if any(b <= a for a, b in zip(sizes, sizes[1:])):
                raise DataError(f"lib_sizes must be strictly increasing: {sizes}")
            if sizes[0] < self.e_dim + 2:
                raise DataError(
                    f"minimum library size is E+2 = {self.e_dim + 2} "
                    f"(E+1 neighbors plus self-exclusion), got {sizes[0]}")
            object.__setattr__(self, "lib_sizes", sizes)

    @property
    def min_lib_size(self) -> int:
        return self.e_dim + 2


@dataclass(frozen=True)
class CurveRow:
    lib_size: int
    mean_rho: float
    sd_rho: float
    samples_used: int
    degenerate_draws: int = 0


@dataclass(frozen=True)
class ConvergenceDecision:
    """Outcome of the three-part convergence rule (see convergence_test)."""

    convergent: bool
    final_rho: float
    rho_gain: float
    trend: float


@dataclass(frozen=True)
class CcmCurve:
    """Cross-map skill as a function of library size for one causal claim."""

    direction: str
    rows: tuple[CurveRow, ...]
    decision: ConvergenceDecision

    @property
    def convergent(self) -> bool:
        return self.decision.convergent

    @property
    def final_rho(self) -> float:
        return self.decision.final_rho


@dataclass(frozen=True)
class EccmRow:
    lag: int
    rho: float | None
    note: str | None = None


@dataclass(frozen=True)
class EccmProfile:
    """Cross-map skill versus prediction lag at the full library."""

    direction: str
    rows: tuple[EccmRow, ...]
    best_lag: int


@dataclass(frozen=True)
class CausalEdge:
    cause: str
    effect: str
    final_rho: float
    convergent: bool
    best_lag: int | None = None


@dataclass(frozen=True)
class CausalNetwork:
    """Directed-edge table over a set of series; no transitive closure."""

    series_names: tuple[str, ...]
    edges: tuple[CausalEdge, ...]
    warnings: tuple[str, ...] = field(default_factory=tuple)


def default_library_sizes(min_size: int, max_size: int, count: int = 8) -> tuple[int, ...]:
    """Geometrically spaced library sizes from min_size to max_size."""
    if min_size > max_size:
        raise DataError(
            f"not enough admissible points: need at least {min_size}, have {max_size}")
    if min_size == max_size:
        return (min_size,)
    sizes = np.unique(np.rint(np.geomspace(min_size, max_size, count)).astype(int))
    sizes = sizes[(sizes >= min_size) & (sizes <= max_size)]
    out = sorted({min_size, max_size, *sizes.tolist()})
    return tuple(int(s) for s in out)


def shared_embedding_dimension(*series: TimeSeries, e_range=range(1, 11),
                               tau: int = 1, floor: int = 2) -> int:
    """Embedding dimension for cross mapping a group of series.

    The largest per-series best E from the simplex scan, floored at 2: a
    near-autonomous driver predicts itself perfectly at E=1, but a
    one-coordinate state cannot resolve a second interacting variable.
    """
    best = max(select_embedding_dimension(s, e_range=e_range, tau=tau).best_e
               for s in series)
    return max(floor, best)


def _prepare(cause: TimeSeries, effect: TimeSeries, config: CcmConfig):
    """Embed the effect and find library/target times usable under the lag."""
    if len(cause) != len(effect):
        raise DataError(
            f"series lengths differ: {cause.name!r} has {len(cause)}, "
            f"{effect.name!r} has {len(effect)}")
    if cause.origin_index != effect.origin_index:
        raise DataError("series must share a time origin")
    manifold = embed(effect, EmbeddingParams(e_dim=config.e_dim, tau=config.tau))
    t = manifold.times
    usable = t[(t + config.lag >= cause.origin_index)
               & (t + config.lag <= cause.end_index)]
    if usable.size < config.min_lib_size:
        raise DataError(
            f"only {usable.size} usable points after shifting by lag "
            f"{config.lag}; need at least {config.min_lib_size}")
    return manifold, usable


def cross_map_skill(cause: TimeSeries, effect: TimeSeries, config: CcmConfig,
                    library_times: Sequence[int] | np.ndarray | None = None,
                    ) -> SkillStats:
    """Skill of estimating the cause from the effect's shadow manifold.

    Embeds ``effect``, finds each state's E+1 nearest neighbors among the
    library points (the state's own time excluded), and estimates
    cause(t + lag) as the weighted average of cause at the neighbors'
    times + lag. High convergent skill supports the claim cause => effect.
    """
    manifold, _ = _prepare(cause, effect, config)
    lib = np.asarray(library_times, dtype=int) if library_times is not None else None
    obs, est, _ = cross_estimates(manifold.points, manifold.times, cause,
                                  config.lag, config.e_dim + 1, lib_times=lib)
    return skill_stats(obs, est)


def convergence_test(rows: Sequence[CurveRow],
                     min_rho_gain: float = 0.10,
                     min_kendall_tau: float = 0.5,
                     min_final_rho: float = 0.2) -> ConvergenceDecision:
    """Decide convergence of a skill-vs-library-size curve.

    Convergent iff all three hold: the skill gain from the smallest to
    the largest library exceeds ``min_rho_gain``; Kendall's tau of
    (L, mean_rho) exceeds ``min_kendall_tau``; and the final skill
    exceeds ``min_final_rho``.
    """
    if len(rows) < 3:
        raise DataError(f"convergence test needs >= 3 library sizes, got {len(rows)}")
    sizes = [r.lib_size for r in rows]
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise DataError("curve rows must be sorted by increasing library size")
    rhos = [r.mean_rho for r in rows]
    final = rhos[-1]
    gain = final - rhos[0]
    tau = kendalltau(sizes, rhos).statistic
    trend = float(tau) if np.isfinite(tau) else 0.0
    convergent = (gain > min_rho_gain) and (trend > min_kendall_tau) \
        and (final > min_final_rho)
    return ConvergenceDecision(convergent=convergent, final_rho=float(final),
                               rho_gain=float(gain), trend=trend)


def ccm_curve(cause: TimeSeries, effect: TimeSeries, config: CcmConfig) -> CcmCurve:
    """Sweep library sizes and record cross-map skill per size.

    Each size L gets ``samples_per_size`` seeded random draws of L
    library points (without replacement); the largest admissible L is a
    single full-library evaluation. Identical inputs and seed reproduce
    the curve bit for bit.
    """
    manifold, usable = _prepare(cause, effect, config)
    n_usable = int(usable.size)
    sizes = config.lib_sizes or default_library_sizes(config.min_lib_size, n_usable)
    if sizes[-1] > n_usable:
        raise DataError(
            f"largest library size {sizes[-1]} exceeds the {n_usable} "
            f"admissible points")

    k = config.e_dim + 1
    time_to_row = {int(t): i for i, t in enumerate(manifold.times)}
    rows_idx = np.fromiter((time_to_row[int(t)] for t in usable), dtype=int)
    # targets == usable library times: in-sample estimation under the lag
    dist_full = _pairwise_distances(manifold.points[rows_idx],
                                    manifold.points[rows_idx])
    obs = cause.values[usable + config.lag - cause.origin_index]

    def draw_rho(lib_positions: np.ndarray) -> SkillStats:
        sub = dist_full[:, lib_positions]
        est = estimates_from_distances(sub, usable[lib_positions], usable,
                                       cause, config.lag, k)
        return skill_stats(obs, est)

    rows = []
    for size in sizes:
        if size == n_usable:
            stats = draw_rho(np.arange(n_usable))
            rows.append(CurveRow(lib_size=size, mean_rho=stats.rho, sd_rho=0.0,
                                 samples_used=1,
                                 degenerate_draws=int(stats.degenerate)))
            continue
        rhos = np.empty(config.samples_per_size)
        n_degenerate = 0
        for j in range(config.samples_per_size):
            rng = np.random.default_rng([config.seed, size, j])
            if config.contiguous_draws:
                start = int(rng.integers(0, n_usable - size + 1))
                positions = np.arange(start, start + size)
            else:
                positions = np.sort(rng.choice(n_usable, size=size, replace=False))
            stats = draw_rho(positions)
            rhos[j] = stats.rho
            n_degenerate += int(stats.degenerate)
        rows.append(CurveRow(lib_size=size, mean_rho=float(rhos.mean()),
                             sd_rho=float(rhos.std()),
                             samples_used=config.samples_per_size,
                             degenerate_draws=n_degenerate))

    decision = convergence_test(rows, config.min_rho_gain,
                                config.min_kendall_tau, config.min_final_rho) \
        if len(rows) >= 3 else ConvergenceDecision(
            convergent=False, final_rho=rows[-1].mean_rho,
            rho_gain=rows[-1].mean_rho - rows[0].mean_rho, trend=0.0)
    return CcmCurve(direction=f"{cause.name}=>{effect.name}",
                    rows=tuple(rows), decision=decision)


def pai_cross_map(x: TimeSeries, y: TimeSeries, config: CcmConfig,
                  library_times: Sequence[int] | np.ndarray | None = None,
                  ) -> SkillStats:
    """Joint-embedding variant: estimate x from E lags of x plus y itself.

    State points are (x_t, x_{t-tau}, ..., x_{t-(E-1)tau}, y_t). Neighbor
    count and estimation match :func:`cross_map_skill`, so a zero-spread
    y coordinate reproduces the plain embedding of x exactly.
    """
    if len(x) != len(y):
        raise DataError(
            f"series lengths differ: {x.name!r} has {len(x)}, {y.name!r} has {len(y)}")
    if x.origin_index != y.origin_index:
        raise DataError("series must share a time origin")
    manifold = embed(x, EmbeddingParams(e_dim=config.e_dim, tau=config.tau))
    y_at_times = y.values[manifold.times - y.origin_index]
    joint = np.hstack([manifold.points, y_at_times[:, None]])
    lib = np.asarray(library_times, dtype=int) if library_times is not None else None
    obs, est, _ = cross_estimates(joint, manifold.times, x, config.lag,
                                  config.e_dim + 1, lib_times=lib)
    return skill_stats(obs, est)


def eccm_profile(cause: TimeSeries, effect: TimeSeries, config: CcmConfig,
                 lag_range: Sequence[int]) -> EccmProfile:
    """Cross-map skill at the full library for each prediction lag.

    The best lag maximizes skill (ties: smallest magnitude, then the
    negative one). A negative best lag on the claim cause => effect marks
    a true, possibly delayed, causal direction; non-negative best lags in
    both directions flag driver-response synchronization instead.
    """
    lags = sorted(set(int(v) for v in lag_range))
    if not lags:
        raise DataError("empty lag range")
    rows = []
    for ell in lags:
        try:
            stats = cross_map_skill(cause, effect, replace(config, lag=ell))
            rows.append(EccmRow(lag=ell, rho=stats.rho))
        except DataError as err:
            rows.append(EccmRow(lag=ell, rho=None, note=str(err)))
    scored = [r for r in rows if r.rho is not None]
    if not scored:
        raise DataError("every lag in the range left no valid targets")
    best = max(scored, key=lambda r: (r.rho, -abs(r.lag), -r.lag))
    return EccmProfile(direction=f"{cause.name}=>{effect.name}",
                       rows=tuple(rows), best_lag=best.lag)


def causal_summary(series: Sequence[TimeSeries], config: CcmConfig,
                   eccm_lags: Sequence[int] | None = None) -> CausalNetwork:
    """All-pairs CCM curves (and optional lag sweeps) as a directed-edge table.

    Each ordered pair gets one edge with its convergence verdict; no
    transitive closure is inferred. When lag sweeps run and both
    directions of a pair converge with non-negative best lags, a
    synchronization warning is attached.
    """
    names = [s.name for s in series]
    if len(set(names)) != len(names):
        raise DataError(f"series names must be unique, got {names}")
    edges = []
    warnings = []
    by_pair: dict[tuple[str, str], CausalEdge] = {}
    for a in series:
        for b in series:
            if a.name == b.name:
                continue
            curve = ccm_curve(a, b, config)
            best_lag = None
            if eccm_lags is not None:
                best_lag = eccm_profile(a, b, config, eccm_lags).best_lag
            edge = CausalEdge(cause=a.name, effect=b.name,
                              final_rho=curve.final_rho,
                              convergent=curve.convergent, best_lag=best_lag)
            edges.append(edge)
            by_pair[(a.name, b.name)] = edge
    if eccm_lags is not None:
        seen = set()
        for (a, b), fwd in by_pair.items():
            if (b, a) in seen:
                continue
            seen.add((a, b))
            rev = by_pair.get((b, a))
            if rev is None:
                continue
            if (fwd.convergent and rev.convergent
                    and fwd.best_lag is not None and fwd.best_lag >= 0
                    and rev.best_lag is not None and rev.best_lag >= 0):
                warnings.append(
                    f"{a}<->{b}: both directions converge with non-negative "
                    f"best lags; likely synchronization by a strong driver, "
                    f"not mutual causation")
    return CausalNetwork(series_names=tuple(names), edges=tuple(edges),
                         warnings=tuple(warnings))
