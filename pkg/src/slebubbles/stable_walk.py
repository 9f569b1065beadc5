"""Heavy-tailed lattice walks and exact spectrally negative stable increments.

The step law puts mass ``1 - c0`` on ``+1`` and has tail ``P(X <= -m) = c0 m^(-kappa/4)``;
``c0 = 1/(1 + zeta(kappa/4))`` makes the step centred.  Walks are kept on the
integer lattice; :func:`rescale` maps them to the normalization
``E exp(lam L_t) = exp(t lam^(kappa/4))``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numba
import numpy as np

from . import analytic

__all__ = [
    "StepDistribution", "LatticeWalk", "ProcessPair", "ScaledValue",
    "make_step_distribution", "sample_step", "sample_steps", "sample_walk",
    "sample_pair", "rescale", "scale_constant", "lattice_level", "derive_seed",
    "make_rng", "sample_walk_endpoint", "sample_stable_increment", "walk_laplace_exact",
]


@dataclass(frozen=True)
class StepDistribution:
    kappa: float
    alpha: float
    c0: float
    zeta_alpha: float

    @property
    def c1(self) -> float:
        return self.c0

    def tail(self, m: int) -> float:
        """P(X <= -m) for m >= 1."""
        return self.c0 * m ** -self.alpha

    def pmf_jump(self, m: int) -> float:
        """P(X = -m) for m >= 1."""
        return self.c0 * (m ** -self.alpha - (m + 1) ** -self.alpha)


def make_step_distribution(kappa: float) -> StepDistribution:
    if not 4.0 < kappa < 8.0:
        raise analytic.DomainError(f"kappa must lie in (4, 8), got {kappa!r}")
    alpha = kappa / 4.0
    z = analytic.zeta(alpha)
    return StepDistribution(kappa, alpha, 1.0 / (1.0 + z), z)


def sample_step(dist: StepDistribution, u: float) -> int:
    """Invert the step law at a uniform ``u`` in (0, 1]."""
    if u > dist.c0:
        return 1
    return -_jump_size(u, dist.c0, dist.alpha)


@numba.njit(cache=True)
def _jump_size(u, c0, alpha):
    # largest m with u <= c0 m^-alpha, guarded against pow rounding
    m = math.floor((c0 / u) ** (1.0 / alpha))
    if m < 1:
        m = 1
    if c0 * (m + 1.0) ** -alpha >= u:
        m += 1
    elif m > 1 and c0 * float(m) ** -alpha < u:
        m -= 1
    return np.int64(m)


@numba.njit(cache=True)
def _steps_kernel(u, c0, alpha):
    out = np.empty(u.shape[0], dtype=np.int64)
    for i in range(u.shape[0]):
        if u[i] > c0:
            out[i] = 1
        else:
            out[i] = -_jump_size(u[i], c0, alpha)
    return out


def sample_steps(dist: StepDistribution, u: np.ndarray) -> np.ndarray:
    return _steps_kernel(np.ascontiguousarray(u, dtype=np.float64), dist.c0, dist.alpha)


# --------------------------------------------------------------------------
# Seeding
# --------------------------------------------------------------------------


def derive_seed(master: int, *keys: int) -> int:
    """Deterministic child seed: hash of (master, keys) through SeedSequence."""
    ss = np.random.SeedSequence(entropy=int(master), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


def uniforms(rng: np.random.Generator, size: int) -> np.ndarray:
    # (0, 1]: u = 0 would be an infinite jump
    return 1.0 - rng.random(size)


# --------------------------------------------------------------------------
# Walks
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class LatticeWalk:
    kappa: float
    n: int
    values: np.ndarray
    seed: int | None = None

    @property
    def horizon(self) -> int:
        return len(self.values) - 1

    @property
    def increments(self) -> np.ndarray:
        return np.diff(self.values)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LatticeWalk):
            return NotImplemented
        return (self.kappa == other.kappa and self.n == other.n
                and np.array_equal(self.values, other.values))

    def to_json(self) -> str:
        """Metadata only: the path is re-derivable from the seed."""
        return json.dumps({"kappa": self.kappa, "n": self.n, "seed": self.seed,
                           "horizon": self.horizon})

    @classmethod
    def from_json(cls, text: str) -> "LatticeWalk":
        meta = json.loads(text)
        if meta["seed"] is None:
            raise ValueError("walk without a seed cannot be re-derived")
        return sample_walk(meta["kappa"], meta["n"], meta["horizon"], meta["seed"])

    @classmethod
    def from_values(cls, values, kappa: float = 6.0, n: int = 1) -> "LatticeWalk":
        arr = np.asarray(values, dtype=np.int64)
        if arr.size == 0 or arr[0] != 0:
            raise ValueError("walk values must start at 0")
        inc = np.diff(arr)
        if np.any((inc != 1) & (inc > -1)):
            raise ValueError("increments must be +1 or <= -1")
        return cls(kappa, n, arr)


@dataclass(frozen=True)
class ProcessPair:
    L: LatticeWalk
    R: LatticeWalk
    seed_L: int | None = None
    seed_R: int | None = None

    def __post_init__(self):
        if self.L.horizon != self.R.horizon or self.L.n != self.R.n:
            raise ValueError("L and R must share the time grid")

    @property
    def horizon(self) -> int:
        return self.L.horizon

    @classmethod
    def from_values(cls, L, R, kappa: float = 6.0, n: int = 1) -> "ProcessPair":
        return cls(LatticeWalk.from_values(L, kappa, n), LatticeWalk.from_values(R, kappa, n))


def walk_from_rng(dist: StepDistribution, rng: np.random.Generator, steps: int) -> np.ndarray:
    values = np.zeros(steps + 1, dtype=np.int64)
    if steps:
        np.cumsum(sample_steps(dist, uniforms(rng, steps)), out=values[1:])
    return values


def sample_walk(kappa: float, n: int, horizon: int, seed: int) -> LatticeWalk:
    if n < 1 or horizon < 0:
        raise ValueError("need n >= 1 and horizon >= 0")
    dist = make_step_distribution(kappa)
    return LatticeWalk(kappa, n, walk_from_rng(dist, make_rng(seed), horizon), seed)


def sample_pair(kappa: float, n: int, horizon: int, seed: int) -> ProcessPair:
    sL, sR = derive_seed(seed, 0), derive_seed(seed, 1)
    return ProcessPair(sample_walk(kappa, n, horizon, sL), sample_walk(kappa, n, horizon, sR), sL, sR)


# --------------------------------------------------------------------------
# Scaling
# --------------------------------------------------------------------------


def scale_constant(kappa: float) -> float:
    """C = (c0 |Gamma(1 - kappa/4)|)^(-4/kappa).

    Matches the walk's jump tail c0 C^a y^-a to the Levy tail y^-a/|Gamma(1-a)|
    of the process with Laplace exponent lam^a.
    """
    dist = make_step_distribution(kappa)
    return (dist.c0 * abs(analytic.gamma(1.0 - dist.alpha))) ** (-1.0 / dist.alpha)


def space_unit(kappa: float, n: int) -> float:
    """Continuum length of one lattice unit: C n^(-4/kappa)."""
    return scale_constant(kappa) * n ** (-4.0 / kappa)


def rescale(raw, kappa: float, n: int):
    if n < 1:
        raise ValueError("n must be >= 1")
    return space_unit(kappa, n) * raw


def lattice_level(kappa: float, n: int, level: float = 1.0) -> int:
    """Integer level whose rescaled value first reaches ``level``."""
    return int(math.ceil(level / space_unit(kappa, n)))


@dataclass(frozen=True)
class ScaledValue:
    raw: int
    kappa: float
    n: int
    scaled: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "scaled", float(rescale(self.raw, self.kappa, self.n)))


# --------------------------------------------------------------------------
# Exact marginals
# --------------------------------------------------------------------------


def sample_walk_endpoint(kappa: float, n: int, size: int, rng: np.random.Generator,
                         small_cap: int = 2048) -> np.ndarray:
    """Exact draws of S_n (the walk after n steps) without generating paths.

    The number of down steps is binomial; their sizes up to ``small_cap`` are
    multinomial counts and the rarer larger ones are drawn by inversion of the
    conditioned tail.  Same law as summing n steps.
    """
    dist = make_step_distribution(kappa)
    a = dist.alpha
    downs = rng.binomial(n, dist.c0, size=size)
    m = np.arange(1, small_cap + 1, dtype=np.float64)
    p_small = (m ** -a - (m + 1) ** -a)  # P(size = m | down)
    p_big = (small_cap + 1.0) ** -a      # P(size > cap | down)
    n_big = rng.binomial(downs, p_big)
    totals = np.empty(size, dtype=np.int64)
    probs = p_small / p_small.sum()
    for start in range(0, size, 4096):
        sl = slice(start, min(start + 4096, size))
        counts = rng.multinomial(downs[sl] - n_big[sl], probs)
        totals[sl] = counts @ np.arange(1, small_cap + 1, dtype=np.int64)
    k = int(n_big.sum())
    if k:
        # size > cap: u uniform on (0, (cap+1)^-a], m = largest with u <= m^-a
        u = (1.0 - rng.random(k)) * p_big
        big = sample_steps(StepDistribution(kappa, a, 1.0, dist.zeta_alpha), u)
        owner = np.repeat(np.arange(size), n_big)
        np.add.at(totals, owner, -big)
    return (n - downs) - totals


def walk_laplace_exact(kappa: float, n: int, lam: float) -> float:
    """E exp(lam W_1^(n)) for the rescaled walk, computed exactly (mpmath).

    Used to separate finite-n bias from Monte Carlo noise.
    """
    import mpmath as mp

    with mp.workdps(40):
        a = mp.mpf(kappa) / 4
        c0 = 1 / (1 + mp.zeta(a))
        C = (c0 * abs(mp.gamma(1 - a))) ** (-1 / a)
        s = lam * C * mp.mpf(n) ** (-1 / a)
        tail = mp.nsum(lambda m: (m ** -a - (m + 1) ** -a) * (mp.expm1(-s * m) + s * m),
                       [1, mp.inf], method="euler-maclaurin")
        phim1 = (1 - c0) * (mp.expm1(s) - s) + c0 * tail
        return float(mp.exp(n * mp.log1p(phim1)))


def sample_stable_increment(kappa: float, t: float, rng: np.random.Generator, size=None):
    """Exact draw(s) of L_t by the Chambers-Mallows-Stuck representation.

    alpha = kappa/4, skewness -1, scale (-cos(pi alpha/2))^(1/alpha) t^(1/alpha),
    so that E exp(lam L_t) = exp(t lam^alpha).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return 0.0 if size is None else np.zeros(size)
    a = kappa / 4.0
    beta = -1.0
    zeta_ = -beta * math.tan(math.pi * a / 2)
    xi = math.atan(-zeta_) / a
    v = rng.uniform(-math.pi / 2, math.pi / 2, size)
    w = rng.standard_exponential(size)
    x = ((1 + zeta_ ** 2) ** (1 / (2 * a)) * np.sin(a * (v + xi)) / np.cos(v) ** (1 / a)
         * (np.cos(v - a * (v + xi)) / w) ** ((1 - a) / a))
    scale = (-math.cos(math.pi * a / 2)) ** (1 / a) * t ** (1 / a)
    return scale * x
