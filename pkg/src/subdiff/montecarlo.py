"""Monte Carlo marginals of Brownian-time and inverse-subordinated processes.

Z_t = X(|Y_t|) evaluates an independent Markov process at the absolute
value of a Brownian motion; Z_t = X(E_t) evaluates it at the inverse
stable subordinator.  For beta = 1/2 the two inner clocks share the
half-normal density, so the marginals agree in law; the samplers here
draw both one-dimensional marginals plus the CTRW approximation whose
scaling limit is X(E_t).

All draws are sharded deterministically: shard i uses the substream
seeded by (master seed, i), and shards are concatenated in index order,
so a (seed, N, spec) triple reproduces bit-identical output for a fixed
shard count.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gamma as gamma_fn

from subdiff.semigroup import LevySymbol
from subdiff.stable_laws import StableLaw, sample_inverse_subordinator


@dataclass(frozen=True)
class SampleSet:
    """Tagged Monte Carlo draws with seed provenance."""

    values: np.ndarray = field(repr=False)
    label: str
    seed: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.values.size < 1:
            raise ValueError("a sample set must contain at least one draw")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sample values must be finite")

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def export(self, path):
        """One value per line, header with label/seed/N."""
        with open(path, "w") as fh:
            fh.write(f"# label={self.label} seed={self.seed} N={self.n}\n")
            for v in self.values:
                fh.write(f"{v:.17g}\n")


@dataclass(frozen=True)
class CtrwSpec:
    """Continuous-time random walk: Pareto waits, +-1 or normal jumps.

    Waiting times have P(J > u) = u^-beta on u >= 1 (pure Pareto, slowly
    varying part identically 1).  scale is the jump-rate dilation c: the
    walk runs to clock horizon (c Gamma(1-beta))^(1/beta) t, so roughly
    c E_t jumps occur by physical time t, and positions are shrunk by
    sqrt(2 / (c Var jump)) to converge to X(E_t) with unit diffusivity.
    """

    beta: float
    jump: str = "pm1"
    scale: float = 100.0

    def __post_init__(self):
        if not (0.0 < self.beta < 1.0):
            raise ValueError("waiting-tail exponent must lie in (0, 1)")
        if self.jump not in ("pm1", "normal"):
            raise ValueError("jump law must be 'pm1' or 'normal'")
        if self.scale <= 0:
            raise ValueError("scale must be positive")


def _shard_sizes(n: int, n_shards: int):
    base = n // n_shards
    sizes = [base + (1 if i < n % n_shards else 0) for i in range(n_shards)]
    return [s for s in sizes if s > 0]


def _shard_rng(seed: int, shard: int) -> np.random.Generator:
    return np.random.default_rng([seed, shard])


def sample_symmetric_stable(alpha: float, rng: np.random.Generator, size=None):
    """Standard symmetric alpha-stable draws, E[e^{ikS}] = e^{-|k|^alpha}.

    Chambers-Mallows-Stuck construction from a uniform angle and an
    exponential variate; alpha = 2 reduces to N(0, 2), alpha = 1 to Cauchy.
    """
    if not (0.0 < alpha <= 2.0):
        raise ValueError("stable index must lie in (0, 2]")
    phi = rng.uniform(-np.pi / 2, np.pi / 2, size=size)
    if alpha == 1.0:
        return np.tan(phi)
    w = rng.standard_exponential(size=size)
    return (
        np.sin(alpha * phi)
        / np.cos(phi) ** (1.0 / alpha)
        * (np.cos((1.0 - alpha) * phi) / w) ** ((1.0 - alpha) / alpha)
    )


def _outer_marginal(outer: LevySymbol, inner_times: np.ndarray,
                    rng: np.random.Generator) -> np.ndarray:
    """Draw X(s) conditionally on the inner time s, coordinatewise (d = 1)."""
    if outer.kind == "brownian":
        return np.sqrt(2.0 * outer.diffusivity * inner_times) * rng.standard_normal(
            inner_times.shape
        )
    if outer.kind == "isotropic_stable":
        scale = (outer.diffusivity * inner_times) ** (1.0 / outer.alpha)
        return scale * sample_symmetric_stable(outer.alpha, rng, size=inner_times.shape)
    raise ValueError(
        "outer process must have a directly samplable marginal "
        "(brownian or isotropic_stable)"
    )


def simulate_marginal_pair(outer: LevySymbol, beta: float, t: float, n: int,
                           seed: int, n_shards: int = 1):
    """Paired marginals of X(|Y_t|) and X(E_t) at one time t.

    Only beta = 1/2 is meaningful: the Brownian clock |Y_t| is half-normal
    with scale sqrt(2t), which is the inverse-subordinator law exactly when
    beta = 1/2.  Returns (brownian_time_set, inverse_subordinated_set).
    """
    if beta != 0.5:
        raise ValueError("the Brownian-time marginal comparison requires beta = 1/2")
    if t <= 0:
        raise ValueError("time must be positive")
    law = StableLaw(beta)
    a_parts, b_parts = [], []
    for shard, size in enumerate(_shard_sizes(n, n_shards)):
        rng = _shard_rng(seed, shard)
        clock_a = np.sqrt(2.0 * t) * np.abs(rng.standard_normal(size))
        a_parts.append(_outer_marginal(outer, clock_a, rng))
        clock_b = sample_inverse_subordinator(law, t, rng, size)
        b_parts.append(_outer_marginal(outer, clock_b, rng))
    a = SampleSet(np.concatenate(a_parts), f"X(|Y_t|) t={t:g}", seed)
    b = SampleSet(np.concatenate(b_parts), f"X(E_t) beta=1/2 t={t:g}", seed)
    return a, b


def _pareto_waits(beta: float):
    def draw(rng, shape):
        return rng.random(shape) ** (-1.0 / beta)

    return draw


def _renewal_counts(horizon: float, n: int, rng: np.random.Generator,
                    wait_sampler, block: int = 512) -> np.ndarray:
    """Number of renewals N = max{n : J_1 + ... + J_n <= horizon} per path."""
    counts = np.zeros(n, dtype=np.int64)
    totals = np.zeros(n)
    alive = np.arange(n)
    while alive.size:
        waits = wait_sampler(rng, (alive.size, block))
        partial = np.cumsum(waits, axis=1) + totals[alive][:, None]
        k = (partial <= horizon).sum(axis=1)
        counts[alive] += k
        unfinished = k == block
        totals[alive[unfinished]] = partial[unfinished, -1]
        alive = alive[unfinished]
    return counts


def simulate_ctrw(spec: CtrwSpec, t: float, n: int, seed: int,
                  n_shards: int = 1) -> SampleSet:
    """Rescaled CTRW positions at physical time t.

    The walk clock runs to (c Gamma(1-beta))^(1/beta) t, the horizon at
    which the rescaled renewal count approximates c E_t; positions are
    V(N) sqrt(2/(c Var jump)).  As c grows the output converges in law to
    X(E_t) driven by the unit-diffusivity Brownian symbol.
    """
    if t <= 0:
        raise ValueError("time must be positive")
    c = spec.scale
    horizon = (c * gamma_fn(1.0 - spec.beta)) ** (1.0 / spec.beta) * t
    norm = np.sqrt(2.0 / c)
    draw_waits = _pareto_waits(spec.beta)
    parts = []
    for shard, size in enumerate(_shard_sizes(n, n_shards)):
        rng = _shard_rng(seed, shard)
        counts = _renewal_counts(horizon, size, rng, draw_waits)
        if spec.jump == "pm1":
            positions = 2.0 * rng.binomial(counts, 0.5) - counts
        else:
            positions = np.sqrt(counts) * rng.standard_normal(size)
        parts.append(positions * norm)
    label = f"ctrw beta={spec.beta:g} jump={spec.jump} c={c:g} t={t:g}"
    return SampleSet(np.concatenate(parts), label, seed)


def _values(x) -> np.ndarray:
    v = x.values if isinstance(x, SampleSet) else np.asarray(x, dtype=float)
    if v.size == 0:
        raise ValueError("empty sample set")
    return v


def ks_distance(a, b) -> float:
    """Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|."""
    va = np.sort(_values(a))
    vb = np.sort(_values(b))
    pooled = np.concatenate([va, vb])
    fa = np.searchsorted(va, pooled, side="right") / va.size
    fb = np.searchsorted(vb, pooled, side="right") / vb.size
    return float(np.abs(fa - fb).max())


def ks_threshold(n1: int, n2: int, level: float = 0.01) -> float:
    """Asymptotic two-sample rejection threshold at the given level."""
    c = np.sqrt(-np.log(level / 2.0) / 2.0)
    return float(c * np.sqrt((n1 + n2) / (n1 * n2)))


def tail_moment(a, rho: float, prefixes=None):
    """Empirical rho-th absolute moment, optionally on nested prefixes.

    With prefixes (e.g. (10**3, 10**4, 10**5)) the moment is reported on
    each leading slice, exposing divergence (estimates that keep growing)
    versus stabilization.  rho = 0 returns 1 exactly.
    """
    if rho < 0:
        raise ValueError("moment order must be nonnegative")
    v = np.abs(_values(a))
    if prefixes is None:
        return 1.0 if rho == 0 else float(np.mean(v**rho))
    out = []
    for p in prefixes:
        p = int(min(p, v.size))
        if p < 1:
            raise ValueError("prefix sizes must be >= 1")
        out.append(1.0 if rho == 0 else float(np.mean(v[:p] ** rho)))
    return np.asarray(out)
