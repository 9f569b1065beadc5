"""Markovian-path recursion and Monte Carlo estimators for single-bubble functionals.

Two independent routes produce the single-bubble quantities on the lattice:

``exact``
    Samples only what matters.  The record minima of a walk whose up-steps are
    +1 form a renewal process with ladder law P(H = k) = k^-a / zeta(a).  Given
    the last record above the threshold, the height h of R just before it jumps
    across has P(h = j) proportional to (j + d + 1)^-a, and the path between
    that record and the jump, read backwards from the jump, is a fresh walk run
    up to a geometric-indexed visit of h.  sigma becomes the last simultaneous
    running maximum of the two reversed walks, so the whole window is streamed
    in O(1) memory.

``direct``
    Simulates L and R forward from 0 until R crosses the threshold and applies
    the scans in :mod:`path_events`.

Times until the threshold is crossed have tail t^-(1 - 4/kappa), so every
simulation carries a step cap; capped replicas are failures, never truncations.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from concurrent.futures import ProcessPoolExecutor
from itertools import product

import numba
import numpy as np
from scipy import stats

from . import path_events as pe
from .stable_walk import (_jump_size, derive_seed, lattice_level, make_rng,
                          make_step_distribution, sample_steps, space_unit, uniforms)

__all__ = [
    "PathStep", "MarkovPath", "Estimate", "BubbleSample", "GrowingPair",
    "sample_bubble", "sample_bubble_direct", "bubble_samples", "run_markov_path",
    "estimate_log_L_gap", "estimate_log_R_gap", "estimate_log_overshoot",
    "estimate_log_theta", "estimate_sup_criterion", "sample_sup_criterion",
    "domination_check", "reversal_check", "bayes_weight_enumeration",
    "harris_property_check", "theta_samples", "DEFAULT_CAP", "MAX_FAILURE_RATE",
]

DEFAULT_CAP = 1 << 25
MAX_FAILURE_RATE = 0.01
LEFT, RIGHT = "L", "R"


# --------------------------------------------------------------------------
# Records
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PathStep:
    k: int
    tau_k: int
    sigma_k: int
    side_k: str
    X_k: float
    raw_X_k: int = 0


class MarkovPath(list):
    """Sequence of :class:`PathStep`; ``stopped`` names why it ended early."""

    def __init__(self, steps=(), stopped: str | None = None):
        super().__init__(steps)
        self.stopped = stopped


@dataclass
class Estimate:
    quantity: str
    kappa: float
    n: int
    replicas: int
    mean: float
    std_error: float
    seed: int
    failures: int = 0
    degenerates: int = 0
    attempts: int = 0
    status: str = "ok"
    values: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.std_error < 0 or self.replicas < 0:
            raise ValueError("std_error and replicas must be non-negative")

    @property
    def failure_rate(self) -> float:
        return self.failures / self.attempts if self.attempts else 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("values")
        return d

    CSV_FIELDS = ("kappa", "n", "replicas", "quantity", "mean", "se", "seed",
                  "failures", "degenerates", "status")

    def csv_row(self) -> list:
        return [self.kappa, self.n, self.replicas, self.quantity, repr(float(self.mean)),
                repr(float(self.std_error)), self.seed, self.failures, self.degenerates, self.status]


@dataclass(frozen=True)
class BubbleSample:
    """Lattice values of one replica (raw integers, before rescaling)."""

    ok: bool
    d: int = 0            # final record level minus the threshold
    overshoot: int = 0    # R_{tau-1} - R_xi
    window: int = 0       # tau - 1 - (first time of the final minimum)
    r_gap: int = 0        # R_{tau-1} - R_sigma
    l_gap: int = 0        # L_tau - L_sigma


# --------------------------------------------------------------------------
# Kernels
# --------------------------------------------------------------------------

_BIG = 4.0e18


@numba.njit(cache=True)
def _step(g, c0, alpha):
    u = 1.0 - g.random()
    if u > c0:
        return 1
    return -_jump_size(u, c0, alpha)


@numba.njit(cache=True)
def _down(g, c0, alpha):
    return -_jump_size(c0 * (1.0 - g.random()), c0, alpha)


@numba.njit(cache=True)
def _power_index(g, a, alpha):
    """j >= 0 with P(j) proportional to (j + a)^-alpha, a >= 1; -1 if j > 4e18.

    Rejection from the floor of a continuous Pareto; the acceptance ratio is
    bounded by (1 + 1/a)^alpha.
    """
    b = alpha - 1.0
    bound = (1.0 + 1.0 / a) ** alpha
    while True:
        y = a * ((1.0 - g.random()) ** (-1.0 / b) - 1.0)
        if y > _BIG:
            return np.int64(-1)
        j = math.floor(y)
        mass = ((j + a) ** -b - (j + 1.0 + a) ** -b) / b
        if g.random() * bound * mass <= (j + a) ** -alpha:
            return np.int64(j)


@numba.njit(cache=True)
def _final_record(g, level, alpha):
    # ladder renewal: strict record minima drop by H with P(H = k) = k^-a / zeta(a)
    m = 0
    while True:
        j = _power_index(g, 1.0, alpha)
        if j < 0 or m - (j + 1) < -level:
            return m + level
        m -= j + 1


@numba.njit(cache=True)
def _reversed_window(g, h, visits, c0, alpha, cap):
    r = 0
    l = 0
    mr = 0
    ml = 0
    gr = 0
    gl = 0
    seen = 1 if h == 0 else 0
    u = 0
    while seen < visits:
        if u >= cap:
            return False, u, gr, gl
        if r == h:
            r += _down(g, c0, alpha)
        else:
            r += _step(g, c0, alpha)
        l += _step(g, c0, alpha)
        u += 1
        if r > mr:
            mr = r
        if l > ml:
            ml = l
        if r == mr and l == ml:
            gr = r
            gl = l
        if r == h:
            seen += 1
    return True, u, gr, gl


@numba.njit(cache=True)
def _bubble_kernel(g, level, c0, alpha, cap, with_window):
    d = _final_record(g, level, alpha)
    h = _power_index(g, d + 1.0, alpha)
    if h < 0:
        return False, d, h, 0, 0, 0
    if not with_window:
        return True, d, h, 0, 0, 0
    visits = 1
    while g.random() < c0:
        visits += 1
    ok, t, gr, gl = _reversed_window(g, h, visits, c0, alpha, cap)
    if not ok:
        return False, d, h, t, 0, 0
    return True, d, h, t, gr, gl + _step(g, c0, alpha)


@numba.njit(cache=True)
def _theta_kernel(g, level, c0, alpha, cap):
    """Forward pair until R first reaches ``level``; R and L at the last
    simultaneous running maximum strictly before that time."""
    r = 0
    l = 0
    mr = 0
    ml = 0
    gr = 0
    gl = 0
    t = 0
    while r < level:
        if t >= cap:
            return False, t, 0, 0
        if r == mr and l == ml:
            gr = r
            gl = l
        r += _step(g, c0, alpha)
        l += _step(g, c0, alpha)
        if r > mr:
            mr = r
        if l > ml:
            ml = l
        t += 1
    return True, t, gr, gl


@numba.njit(cache=True)
def _hit_kernel(g, level, c0, alpha, cap):
    """Fresh pair until R first reaches ``level``: (ok, time, L there, max L)."""
    r = 0
    l = 0
    ml = 0
    t = 0
    while r < level:
        if t >= cap:
            return False, t, 0, 0
        r += _step(g, c0, alpha)
        l += _step(g, c0, alpha)
        if l > ml:
            ml = l
        t += 1
    return True, t, l, ml


# --------------------------------------------------------------------------
# Pair growth for full-path routes
# --------------------------------------------------------------------------


class GrowingPair:
    """L and R generated forward from 0 on demand from two seeded streams."""

    def __init__(self, kappa: float, n: int, seed: int, cap: int = DEFAULT_CAP, chunk: int = 4096):
        self.kappa, self.n, self.cap = kappa, n, cap
        self.dist = make_step_distribution(kappa)
        self._g = (make_rng(derive_seed(seed, 0)), make_rng(derive_seed(seed, 1)))
        self.L = np.zeros(1, dtype=np.int64)
        self.R = np.zeros(1, dtype=np.int64)
        self._chunk = chunk

    @property
    def length(self) -> int:
        return len(self.L)

    def grow(self) -> None:
        if self.length > self.cap:
            raise pe.HorizonExhausted(f"step cap {self.cap} reached", self.cap)
        k = min(max(self._chunk, self.length), self.cap + 1 - self.length + 1)
        parts = []
        for g, v in zip(self._g, (self.L, self.R)):
            steps = sample_steps(self.dist, uniforms(g, k))
            parts.append(np.concatenate([v, v[-1] + np.cumsum(steps)]))
        self.L, self.R = parts

    def first_below(self, side: str, level: int, start: int = 0) -> int:
        while True:
            v = self.L if side == LEFT else self.R
            hit = np.flatnonzero(v[start:] < level)
            if hit.size:
                return start + int(hit[0])
            start = len(v)
            self.grow()

    def ensure(self, t: int) -> None:
        while self.length <= t:
            self.grow()

    def pair(self, upto: int):
        return self.L[: upto + 1], self.R[: upto + 1]


# --------------------------------------------------------------------------
# Single-bubble samplers
# --------------------------------------------------------------------------


def sample_bubble(kappa: float, n: int, seed: int, cap: int = DEFAULT_CAP,
                  with_window: bool = True, level: int | None = None) -> BubbleSample:
    """One replica by the ladder/reversal construction (see module docstring)."""
    dist = make_step_distribution(kappa)
    level = lattice_level(kappa, n) if level is None else level
    ok, d, h, t, gr, gl = _bubble_kernel(make_rng(seed), level, dist.c0, dist.alpha, cap, with_window)
    return BubbleSample(bool(ok), int(d), int(h), int(t), int(gr), int(gl))


def sample_bubble_direct(kappa: float, n: int, seed: int, cap: int = DEFAULT_CAP,
                         level: int | None = None) -> BubbleSample:
    """One replica by forward simulation of the full pair from time 0."""
    level = lattice_level(kappa, n) if level is None else level
    gp = GrowingPair(kappa, n, seed, cap)
    try:
        tau = gp.first_below(RIGHT, -level)
    except pe.HorizonExhausted:
        return BubbleSample(False)
    L, R = gp.pair(tau)
    ev = pe.event_times((L, R), level)
    first = int(np.argmax(R[:tau] == R[ev.xi]))
    return BubbleSample(True, int(R[ev.xi] + level), int(R[tau - 1] - R[ev.xi]), tau - 1 - first,
                        int(R[tau - 1] - R[ev.sigma]), int(L[tau] - L[ev.sigma]))


def _run_block(args):
    fn, kappa, n, seed, lo, hi, kw = args
    return [fn(kappa, n, derive_seed(seed, i), **kw) for i in range(lo, hi)]


def _replica_stream(fn, kappa, n, seed, workers, block, kw):
    """Yield replicas in index order; blocks may be computed in parallel."""
    start = 0
    if workers <= 1:
        while True:
            yield from _run_block((fn, kappa, n, seed, start, start + block, kw))
            start += block
    with ProcessPoolExecutor(workers) as pool:
        while True:
            jobs = [(fn, kappa, n, seed, start + j * block, start + (j + 1) * block, kw)
                    for j in range(workers)]
            for res in pool.map(_run_block, jobs):
                yield from res
            start += workers * block


def _collect(fn, value, quantity, kappa, n, replicas, seed, *, workers=1, abort=True,
             max_failure_rate=MAX_FAILURE_RATE, transform=math.log, **kw) -> Estimate:
    """Draw replicas in index order until ``replicas`` usable values exist.

    Values <= 0 are degenerate (their log is undefined) and failures are
    replicas that hit the cap; both are replaced by further indices and
    counted.  With ``abort`` the run stops once failures exceed the allowed
    rate for the requested replica count, since the outcome is then decided.
    """
    if replicas < 1:
        raise ValueError("replicas must be >= 1")
    allowed = max_failure_rate * replicas
    unit = space_unit(kappa, n)
    vals, failures, degenerates, attempts = [], 0, 0, 0
    max_attempts = 20 * replicas + 100
    for rep in _replica_stream(fn, kappa, n, seed, workers, 64, kw):
        attempts += 1
        if not rep.ok:
            failures += 1
            if abort and failures > allowed:
                break
        else:
            v = value(rep)
            if v <= 0:
                degenerates += 1
            else:
                vals.append(transform(unit * v))
        if len(vals) >= replicas or attempts >= max_attempts:
            break
    arr = np.asarray(vals, dtype=float)
    status = "ok"
    if failures > allowed:
        status = "failed"
    elif len(vals) < replicas:
        status = "incomplete"
    mean = float(arr.mean()) if arr.size else float("nan")
    se = float(arr.std(ddof=1) / math.sqrt(arr.size)) if arr.size > 1 else 0.0
    return Estimate(quantity, kappa, n, int(arr.size), mean, se, seed, failures,
                    degenerates, attempts, status, arr)


def _sampler(method: str):
    if method == "exact":
        return sample_bubble
    if method == "direct":
        return sample_bubble_direct
    raise ValueError(f"unknown method {method!r}")


def estimate_log_L_gap(kappa, n, replicas, seed, *, method="exact", cap=DEFAULT_CAP, **kw) -> Estimate:
    """E log of the rescaled L_tau - L_sigma."""
    return _collect(_sampler(method), lambda r: r.l_gap, "log_L_gap", kappa, n, replicas, seed,
                    cap=cap, **kw)


def estimate_log_R_gap(kappa, n, replicas, seed, *, method="exact", cap=DEFAULT_CAP, **kw) -> Estimate:
    """E log of the rescaled R_{tau-1} - R_sigma."""
    return _collect(_sampler(method), lambda r: r.r_gap, "log_R_gap", kappa, n, replicas, seed,
                    cap=cap, **kw)


def estimate_log_overshoot(kappa, n, replicas, seed, *, method="exact", cap=DEFAULT_CAP, **kw) -> Estimate:
    """E log of the rescaled R_{tau-1} - R_xi.  The exact route needs no path."""
    extra = {"with_window": False} if method == "exact" else {}
    return _collect(_sampler(method), lambda r: r.overshoot, "log_overshoot", kappa, n, replicas,
                    seed, cap=cap, **extra, **kw)


def bubble_samples(kappa, n, replicas, seed, *, method="exact", cap=DEFAULT_CAP,
                   workers=1, abort_failure_rate=None) -> tuple[list[BubbleSample], int]:
    """``replicas`` completed replicas (index order) and the number of failures.

    With ``abort_failure_rate`` the draw stops early once failures exceed that
    fraction of ``replicas``.
    """
    out, failures = [], 0
    limit = math.inf if abort_failure_rate is None else abort_failure_rate * replicas
    for rep in _replica_stream(_sampler(method), kappa, n, seed, workers, 64, {"cap": cap}):
        if rep.ok:
            out.append(rep)
        else:
            failures += 1
        if len(out) >= replicas or failures > limit:
            return out, failures


# --------------------------------------------------------------------------
# Last simultaneous supremum
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ThetaSample:
    ok: bool
    hit_time: int = 0
    r_theta: int = 0
    l_theta: int = 0


def sample_theta(kappa, n, seed, cap=DEFAULT_CAP, level=None) -> ThetaSample:
    dist = make_step_distribution(kappa)
    level = lattice_level(kappa, n) if level is None else level
    ok, t, gr, gl = _theta_kernel(make_rng(seed), level, dist.c0, dist.alpha, cap)
    return ThetaSample(bool(ok), int(t), int(gr), int(gl))


def theta_samples(kappa, n, replicas, seed, cap=DEFAULT_CAP) -> tuple[np.ndarray, int]:
    """Rescaled R at the last simultaneous supremum before R reaches level 1."""
    unit = space_unit(kappa, n)
    out, failures, i = [], 0, 0
    while len(out) < replicas:
        s = sample_theta(kappa, n, derive_seed(seed, i), cap)
        i += 1
        if s.ok:
            out.append(unit * s.r_theta)
        else:
            failures += 1
    return np.asarray(out), failures


def estimate_log_theta(kappa, n, replicas, seed, *, cap=DEFAULT_CAP, **kw) -> Estimate:
    """E log R at the last simultaneous supremum before R reaches level 1."""
    return _collect(_theta_fn, lambda r: r.r_theta, "log_R_theta", kappa, n, replicas, seed,
                    cap=cap, **kw)


def _theta_fn(kappa, n, seed, cap=DEFAULT_CAP):
    return sample_theta(kappa, n, seed, cap)


# --------------------------------------------------------------------------
# Sup criterion
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SupSample:
    ok: bool
    sup_gap: int = 0          # max over record times t of L_t - L_sigma(t)
    last_gap: int = 0         # the t = tau term
    records: int = 0
    max_lag: int = 0          # max over record times of t - sigma(t)
    tau: int = 0


def sample_sup_criterion(kappa, n, seed, cap=DEFAULT_CAP, level=None) -> SupSample:
    """Record-minimum times of R in (0, tau]; sup of L_t - L_sigma(t) over them.

    On a capped replica ``ok`` is False and ``max_lag`` is the value over the
    records seen so far, a lower bound for the full value.
    """
    level = lattice_level(kappa, n) if level is None else level
    gp = GrowingPair(kappa, n, seed, cap)
    try:
        tau = gp.first_below(RIGHT, -level)
    except pe.HorizonExhausted:
        L, R = gp.L, gp.R
        rec = np.asarray(pe.record_min_set(R).times[1:], dtype=np.int64)
        lag = int((rec - pe.sigma_many((L, R), rec)).max()) if rec.size else 0
        return SupSample(False, max_lag=lag)
    L, R = gp.pair(tau)
    rec = np.asarray(pe.record_min_set(R, tau).times[1:], dtype=np.int64)
    sig = pe.sigma_many((L, R), rec)
    gaps = L[rec] - L[sig]
    return SupSample(True, int(gaps.max()), int(gaps[-1]), int(rec.size),
                     int((rec - sig).max()), tau)


def _sup_fn(kappa, n, seed, cap=DEFAULT_CAP):
    return sample_sup_criterion(kappa, n, seed, cap)


def estimate_sup_criterion(kappa, n, replicas, seed, *, cap=DEFAULT_CAP, **kw) -> Estimate:
    return _collect(_sup_fn, lambda r: r.sup_gap, "log_sup_gap", kappa, n, replicas, seed,
                    cap=cap, **kw)


# --------------------------------------------------------------------------
# Markovian path
# --------------------------------------------------------------------------


def run_markov_path(kappa, n, K, seed, cap=DEFAULT_CAP, pair=None, level=None) -> MarkovPath:
    """Bubble times tau_1 < tau_2 < ... of the recursion.

    tau_1 is the first time R drops below the lattice image of -1 (a right
    bubble).  After a right bubble the next one is the first time L drops
    below L_{sigma_k}, after a left bubble the first time R drops below
    R_{sigma_k}.  X_k is the gap of the other process: L_{tau_k} - L_{sigma_k}
    for a right bubble, R_{tau_k} - R_{sigma_k} for a left one.  A path that
    produces X_k <= 0 (possible only on the lattice) stops there.

    ``pair`` may be a fixed (L, R) pair of arrays instead of a simulation.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    level = lattice_level(kappa, n) if level is None else level
    if pair is None:
        src = GrowingPair(kappa, n, seed, cap)
    else:
        src = _FixedPair(*pair)
    unit = space_unit(kappa, n)
    steps = MarkovPath()
    side = RIGHT
    tau = src.first_below(RIGHT, -level)
    for k in range(1, K + 1):
        src.ensure(tau)
        L, R = src.pair(tau)
        sigma = pe.sigma_of((L, R), tau)
        other = L if side == RIGHT else R
        x = int(other[tau] - other[sigma])
        if x <= 0:
            steps.stopped = "degenerate"
            return steps
        steps.append(PathStep(k, tau, sigma, side, unit * x, x))
        if k == K:
            break
        nxt = LEFT if side == RIGHT else RIGHT
        tau = src.first_below(nxt, int(other[sigma]), tau + 1)
        side = nxt
    return steps


class _FixedPair:
    def __init__(self, L, R):
        self.L, self.R = np.asarray(L, dtype=np.int64), np.asarray(R, dtype=np.int64)

    def first_below(self, side, level, start=0):
        return pe.first_passage_below(self.L if side == LEFT else self.R, level, start)

    def ensure(self, t):
        if t >= len(self.L):
            raise pe.HorizonExhausted("fixed pair too short", len(self.L) - 1)

    def pair(self, upto):
        return self.L[: upto + 1], self.R[: upto + 1]


# --------------------------------------------------------------------------
# Domination and reversal
# --------------------------------------------------------------------------


def one_sided_ks(a, b) -> float:
    """max over the pooled sample of (F_a - F_b), clamped at 0."""
    a, b = np.sort(np.asarray(a, float)), np.sort(np.asarray(b, float))
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(max(0.0, (fa - fb).max()))


def domination_check(kappa, n, replicas, seed, *, cap=DEFAULT_CAP, method="exact", workers=1,
                     abort_failure_rate=None) -> dict:
    """One-sided KS of L_tau - L_sigma against R_{tau-1} - R_sigma.

    D- > 0 measures where the L-gap CDF lies above the R-gap CDF, i.e. where
    the L-gap fails to dominate.
    """
    samples, failures = bubble_samples(kappa, n, replicas, seed, method=method, cap=cap,
                                       workers=workers, abort_failure_rate=abort_failure_rate)
    unit = space_unit(kappa, n)
    lg = unit * np.array([s.l_gap for s in samples], float)
    rg = unit * np.array([s.r_gap for s in samples], float)
    out = {"kappa": kappa, "n": n, "replicas": len(samples), "failures": failures,
           "failure_rate": failures / (failures + len(samples)), "D_minus": one_sided_ks(lg, rg)}
    for name, v in (("L_gap", lg), ("R_gap", rg)):
        pos = np.log(v[v > 0])
        out[f"mean_log_{name}"] = float(pos.mean())
        out[f"se_log_{name}"] = float(pos.std(ddof=1) / math.sqrt(pos.size))
        out[f"degenerate_{name}"] = int((v <= 0).sum())
    return out


def reversal_check(kappa, n, replicas, seed, *, targets=(1.0, 1.5, 2.0), width=0.2,
                   min_bin=100, cap=DEFAULT_CAP) -> dict:
    """Reversed window [xi, tau-1] against a fresh pair run up to the same level.

    Forward route: full simulation of the pair until R crosses the threshold,
    then the window read backwards from tau-1.  Comparison route: for every
    in-bin replica, an independent pair run until R first reaches that
    replica's overshoot.  Functionals: terminal L displacement and maximum of
    the reversed L.
    """
    dist = make_step_distribution(kappa)
    level = lattice_level(kappa, n)
    unit = space_unit(kappa, n)
    forward, failures = [], 0
    for i in range(replicas):
        gp = GrowingPair(kappa, n, derive_seed(seed, i), cap)
        try:
            tau = gp.first_below(RIGHT, -level)
        except pe.HorizonExhausted:
            failures += 1
            continue
        L, R = gp.pair(tau)
        xi = pe.last_running_min_before(R, tau)
        lw = L[xi:tau]
        forward.append((int(R[tau - 1] - R[xi]), int(lw[-1] - lw[0]), int(lw[-1] - lw.min())))
    bins = []
    fresh_seed = derive_seed(seed, 1 << 30)
    j = 0
    for c in targets:
        lo, hi = c - width / 2, c + width / 2
        chosen = [f for f in forward if lo <= unit * f[0] <= hi]
        entry = {"target": c, "low": lo, "high": hi, "samples": len(chosen)}
        if len(chosen) < min_bin:
            entry["skipped"] = True
            bins.append(entry)
            continue
        fresh, fresh_fail = [], 0
        for h, _, _ in chosen:
            while True:
                ok, _, l, ml = _hit_kernel(make_rng(derive_seed(fresh_seed, j)), h, dist.c0, dist.alpha, cap)
                j += 1
                if ok:
                    break
                fresh_fail += 1
            fresh.append((l, ml))
        fw = np.array([(a, b) for _, a, b in chosen], float) * unit
        fr = np.array(fresh, float) * unit
        ks_t = stats.ks_2samp(fw[:, 0], fr[:, 0])
        ks_m = stats.ks_2samp(fw[:, 1], fr[:, 1])
        entry.update(skipped=False, fresh_failures=fresh_fail,
                     ks_terminal=float(ks_t.statistic), p_terminal=float(ks_t.pvalue),
                     ks_max=float(ks_m.statistic), p_max=float(ks_m.pvalue),
                     fresh_level=float(np.mean([unit * h for h, _, _ in chosen])))
        bins.append(entry)
    return {"kappa": kappa, "n": n, "replicas": replicas, "failures": failures, "bins": bins}


# --------------------------------------------------------------------------
# Exact enumeration: Bayes weighting of the pre-jump path
# --------------------------------------------------------------------------


class EnumerationBudgetExceeded(RuntimeError):
    pass


def _tail_by_summation(k: int, c0: float, alpha: float, terms: int = 10**6) -> float:
    """P(X <= -k) as an explicit pmf sum over m < k + terms plus the telescoped remainder."""
    m = np.arange(k, k + terms, dtype=np.float64)
    pmf = c0 * (m ** -alpha - (m + 1) ** -alpha)
    return math.fsum(pmf[::-1]) + c0 * (k + terms) ** -alpha


def bayes_weight_enumeration(kappa, t, M_cap, r, budget=10**6) -> float:
    """Total variation between two laws of the positive pre-jump path.

    Paths: t-1 steps from 0 in {+1, -1, ..., -M_cap}, strictly positive after
    time 0, with the exact step probabilities (steps below -M_cap excluded and
    both laws renormalized).

    A: path law weighted by the closed-form tail P(X <= -(r + h + 1)), h the
       terminal value.
    B: conditional law of the path given that the t-th step lands strictly
       below -r, built from joint path-and-jump probabilities with the jump
       probability summed term by term.
    """
    if t < 1 or M_cap < 1 or r < 1:
        raise ValueError("need t >= 1, M_cap >= 1, r >= 1")
    dist = make_step_distribution(kappa)
    a, c0 = dist.alpha, dist.c0
    steps = [1] + [-m for m in range(1, M_cap + 1)]
    probs = {1: 1 - c0, **{-m: dist.pmf_jump(m) for m in range(1, M_cap + 1)}}
    if len(steps) ** (t - 1) > budget:
        raise EnumerationBudgetExceeded(f"{len(steps) ** (t - 1)} paths exceed budget {budget}")
    paths, base = [], []
    for seq in product(steps, repeat=t - 1):
        v, ok, p = 0, True, 1.0
        for s in seq:
            v += s
            p *= probs[s]
            if v <= 0:
                ok = False
                break
        if ok:
            paths.append(v)
            base.append(p)
    if not paths:
        return 0.0
    base = np.array(base)
    h = np.array(paths)
    wa = base * c0 * (r + h + 1.0) ** -a
    tails = {k: _tail_by_summation(k, c0, a) for k in set(int(x) + r + 1 for x in h)}
    wb = base * np.array([tails[int(x) + r + 1] for x in h])
    return float(0.5 * np.abs(wa / wa.sum() - wb / wb.sum()).sum())


# --------------------------------------------------------------------------
# Harris inequality
# --------------------------------------------------------------------------


def harris_trial(rng: np.random.Generator, f_const=False, g_const=False) -> float:
    """E[f g] - E[g] for a random law, non-increasing f with E f = 1, non-decreasing g."""
    k = int(rng.integers(1, 12))
    p = rng.dirichlet(np.ones(k))
    f = np.ones(k) if f_const else np.sort(rng.exponential(size=k))[::-1]
    f = f / (p @ f)
    g = np.full(k, rng.normal()) if g_const else np.sort(rng.normal(size=k))
    return float(p @ (f * g) - p @ g)


def harris_property_check(sample_size: int, seed: int, slack: float = 1e-12) -> bool:
    if sample_size < 1000:
        raise ValueError("sample_size must be >= 1000")
    rng = make_rng(seed)
    return all(harris_trial(rng) <= slack for _ in range(sample_size))
