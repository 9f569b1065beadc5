"""Acceptance checks, one function per criterion.

Each check returns a :class:`CriterionResult` with the measured numbers.  With
``fast=True`` Monte Carlo sizes shrink by ``FAST_FACTOR`` and fixed absolute
tolerances widen by ``FAST_TOL``; standard-error based tolerances need no
adjustment.  Checks whose outcome depends on a step cap report the failure
rate and apply the 1% rule.
"""
from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numba
import numpy as np
from scipy import stats

from . import analytic as an
from . import bubbles as bb
from . import markov_path as mkp
from . import path_events as pe
from . import reference as ref
from .stable_walk import (derive_seed, make_rng, rescale, sample_pair, sample_stable_increment,
                          sample_walk_endpoint)

FAST_FACTOR = 10
FAST_TOL = 2.0
SEED = 20240229


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    measured: dict = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.number:2d} {self.name} ({self.seconds:.1f}s) {_short(self.measured)}"

    def to_dict(self) -> dict:
        return asdict(self)


def _short(d: dict) -> str:
    parts = []
    for k, v in d.items():
        if isinstance(v, float):
            parts.append(f"{k}={v:.6g}")
        elif isinstance(v, (int, str, bool)):
            parts.append(f"{k}={v}")
    return " ".join(parts)


def _scale(n: int, fast: bool, floor: int = 50) -> int:
    return max(floor, n // FAST_FACTOR) if fast else n


# --------------------------------------------------------------------------


def c01_kappa0(fast=False):
    t = time.perf_counter()
    k0 = an.find_kappa0(1e-12)
    dt = time.perf_counter() - t
    return 1, "kappa0 reproduction", 5.6153 <= k0 <= 5.6163 and dt < 1.0, {"kappa0": k0, "runtime": dt}


def c02_closure(fast=False):
    t = time.perf_counter()
    gaps = {k: an.criterion_closure_gap(k) for k in (4.5, 5, 5.5, 6, 6.5, 7, 7.5)}
    dt = time.perf_counter() - t
    worst = max(abs(g) for g in gaps.values())
    return 2, "criterion closure", worst <= 1e-6 and dt < 10, {"max_gap": worst, "runtime": dt}


def c03_special_value(fast=False):
    err = abs(an.criterion_F(6.0).total + 2 * math.log(2))
    return 3, "F(6) = -2 ln 2", err <= 1e-9, {"abs_error": err}


def _oracle_mismatches(L, R, H):
    Ll, Rl = L.tolist(), R.tolist()
    bad = 0
    ts = np.arange(1, H + 1)
    sig = pe.sigma_many((L, R), ts)
    for t in range(1, H + 1):
        s = ref.sigma_of(Ll, Rl, t)
        bad += (pe.sigma_of((L, R), t) != s) + (int(sig[t - 1]) != s)
        bad += pe.last_running_min_before(R, t) != ref.last_running_min_before(Rl, t)
    for lev in range(0, 6):
        got = ref.first_passage_below(Rl, -lev)
        try:
            bad += pe.first_passage_below(R, -lev) != got
        except pe.HorizonExhausted:
            bad += got is not None
    for r in range(1, 4):
        if max(Rl) >= r:
            bad += pe.theta_before_hit((L, R), r) != ref.theta_before_hit(Ll, Rl, r)
    bad += list(pe.record_min_set(L, H)) != ref.record_min_set(Ll, H)
    bad += list(pe.record_min_set(R, H)) != ref.record_min_set(Rl, H)
    cuts = [(c.t, c.left_bubble_time, c.right_bubble_time) for c in pe.cut_times((L, R), H)]
    bad += cuts != ref.cut_times(Ll, Rl, H)
    bad += pe.global_cut_times((L, R), H) != ref.global_cut_times(Ll, Rl, H)
    for b in bb.extract_bubbles((L, R), 1, H):
        w, wl = (L, Ll) if b.side == "L" else (R, Rl)
        bad += list(bb.boundary_times(w, b).times) != ref.boundary_times(wl, b.jump_time)
    return int(bad)


def c04_oracles(fast=False):
    t0 = time.perf_counter()
    count = _scale(1000, fast)
    rng = make_rng(SEED)
    bad = 0
    for i in range(count):
        kappa = (4.5, 6.0, 7.5)[i % 3]
        H = int(rng.integers(2, 201))
        p = sample_pair(kappa, 1, H, derive_seed(SEED, 4, i))
        bad += _oracle_mismatches(p.L.values, p.R.values, H)
    dt = time.perf_counter() - t0
    return 4, "oracle equivalence", bad == 0 and dt < 30, {"pairs": count, "mismatches": bad, "runtime": dt}


def c05_bayes(fast=False):
    t0 = time.perf_counter()
    tv = {c: mkp.bayes_weight_enumeration(c[3], c[0], c[1], c[2])
          for c in ((3, 3, 1, 6.0), (4, 4, 1, 5.0), (4, 3, 2, 6.5), (5, 3, 1, 7.0))}
    dt = time.perf_counter() - t0
    worst = max(tv.values())
    return 5, "Bayes weight identity", worst <= 1e-12 and dt < 60, {"max_tv": worst, "runtime": dt}


def c06_laplace(fast=False):
    n, reps = 2 ** 16, _scale(100_000, fast)
    out, ok = {}, True
    for kappa in (5.0, 6.0, 7.0):
        w = rescale(sample_walk_endpoint(kappa, n, reps, make_rng(derive_seed(SEED, 6, int(kappa * 10)))), kappa, n)
        for lam in (0.5, 1.0):
            e = np.exp(lam * w)
            z = (e.mean() - math.exp(lam ** (kappa / 4))) / (e.std(ddof=1) / math.sqrt(reps))
            out[f"z_k{kappa:g}_l{lam:g}"] = float(z)
            ok &= abs(z) <= 3
    return 6, "Laplace calibration", bool(ok), out


def c07_overshoot(fast=False):
    est = mkp.estimate_log_overshoot(6.0, 2 ** 16, _scale(10_000, fast), derive_seed(SEED, 7))
    tol = max(3 * est.std_error, 0.05 * (FAST_TOL if fast else 1))
    ok = abs(est.mean) <= tol and est.status == "ok"
    return 7, "overshoot log mean", ok, {"mean": est.mean, "se": est.std_error, "tol": tol,
                                        "failures": est.failures, "status": est.status}


def c08_arcsine(fast=False):
    n = 2 ** 16
    x, failures = mkp.theta_samples(6.0, n, _scale(10_000, fast), derive_seed(SEED, 8))
    cdf = np.vectorize(lambda v: an.arcsine_cdf(min(max(v, 1e-300), 1 - 1e-16), 6.0))
    ks = stats.kstest(x, cdf).statistic
    tol = (0.03 + 0.02) * (FAST_TOL if fast else 1)
    return 8, "arcsine law", ks <= tol, {"ks": float(ks), "tol": tol, "n": n, "failures": failures}


def c09_two_term(fast=False):
    out, ok = {}, True
    for kappa in (5.5, 6.0, 6.5):
        est = mkp.estimate_log_R_gap(kappa, 2 ** 16, _scale(10_000, fast), derive_seed(SEED, 9, int(kappa * 10)))
        target = an.criterion_F(kappa).total
        tol = max(3 * est.std_error, 0.1 * (FAST_TOL if fast else 1))
        good = abs(est.mean - target) <= tol and est.status == "ok"
        ok &= good
        out[f"k{kappa:g}_mean"] = est.mean
        out[f"k{kappa:g}_F"] = target
        out[f"k{kappa:g}_failure_rate"] = est.failure_rate
        out[f"k{kappa:g}_status"] = est.status
    return 9, "two-term identity", bool(ok), out


def c10_domination(fast=False):
    out, ok = {}, True
    for kappa in (5.0, 6.0):
        rep = mkp.domination_check(kappa, 2 ** 10, _scale(10_000, fast), derive_seed(SEED, 10, int(kappa * 10)),
                                   abort_failure_rate=mkp.MAX_FAILURE_RATE)
        se = math.hypot(rep["se_log_L_gap"], rep["se_log_R_gap"])
        ok &= rep["mean_log_L_gap"] >= rep["mean_log_R_gap"] - 3 * se
        ok &= rep["failure_rate"] <= mkp.MAX_FAILURE_RATE
        if kappa == 5.0:
            ok &= rep["D_minus"] <= 0.03 * (FAST_TOL if fast else 1)
            out["D_minus_k5"] = rep["D_minus"]
        out[f"k{kappa:g}_mean_L"] = rep["mean_log_L_gap"]
        out[f"k{kappa:g}_mean_R"] = rep["mean_log_R_gap"]
        out[f"k{kappa:g}_failure_rate"] = rep["failure_rate"]
    return 10, "stochastic domination", bool(ok), out


def c11_bipartite(fast=False):
    same, edges = 0, 0
    for kappa in (4.5, 6.0, 7.5):
        for i in range(_scale(100, fast, floor=10)):
            g = bb.build_graph(sample_pair(kappa, 1024, 4096, derive_seed(SEED, 11, int(kappa * 10), i)))
            same += sum(g.nodes[e.a].side == g.nodes[e.b].side for e in g.edges)
            edges += len(g.edges)
    return 11, "bipartiteness", same == 0, {"edges": edges, "same_side_edges": same}


def c12_brownian(fast=False):
    n, reps = 2 ** 16, _scale(100_000, fast)
    w = rescale(sample_walk_endpoint(7.9, n, reps, make_rng(derive_seed(SEED, 12))), 7.9, n)
    ks = float(stats.kstest(w, stats.norm(scale=math.sqrt(2)).cdf).statistic)
    # cone diagnostic: capped replicas give lower bounds for the lag, so count
    # them as +inf at 7.9 and keep the bound at 4.5 (both conservative)
    lag_n, lag_reps, cap = 2 ** 8, _scale(400, fast), 1 << 22
    med = {}
    for kappa in (4.5, 7.9):
        lags = []
        for i in range(lag_reps):
            s = mkp.sample_sup_criterion(kappa, lag_n, derive_seed(SEED, 12, int(kappa * 10), i), cap)
            lags.append(s.max_lag if (s.ok or kappa == 4.5) else math.inf)
        med[kappa] = float(np.median(lags)) / lag_n
    tol = 0.05 * (FAST_TOL if fast else 1)
    ok = ks <= tol and med[7.9] < med[4.5]
    return 12, "Brownian limit", ok, {"ks": ks, "tol": tol, "median_lag_k7.9": med[7.9],
                                       "median_lag_k4.5": med[4.5]}


def c13_moment(fast=False):
    reps = _scale(100_000, fast)
    x = np.abs(sample_stable_increment(6.0, 1.0, make_rng(derive_seed(SEED, 13)), reps)) ** 0.5
    formula = an.abs_moment_L1(0.5, 6.0)
    se = x.std(ddof=1) / math.sqrt(reps)
    z = (x.mean() - formula) / se
    return 13, "absolute moment formula", abs(z) <= 3, {
        "mc": float(x.mean()), "se": float(se), "formula": formula, "z": float(z),
        "closed_form_check": an.abs_moment_L1_closed(0.5, 6.0)}


@numba.njit(cache=True)
def _fpt_grid_kernel(g, incs_scale, a, dt, tmax):
    # first grid time with L < -1, exact stable increments; tmax + 1 if none
    steps = int(tmax / dt)
    zeta_ = math.tan(math.pi * a / 2)
    xi = math.atan(-zeta_) / a
    c1 = (1 + zeta_ * zeta_) ** (1 / (2 * a))
    x = 0.0
    for i in range(1, steps + 1):
        v = (g.random() - 0.5) * math.pi
        w = g.standard_exponential()
        y = c1 * math.sin(a * (v + xi)) / math.cos(v) ** (1 / a) * (math.cos(v - a * (v + xi)) / w) ** ((1 - a) / a)
        x += incs_scale * y
        if x < -1.0:
            return i * dt
    return tmax + 1.0


def fpt_histogram(kappa, draws, seed, dt=1e-3, tmax=10.0, edges=None):
    a = kappa / 4
    scale = (-math.cos(math.pi * a / 2)) ** (1 / a) * dt ** (1 / a)
    g = make_rng(seed)
    tau = np.array([_fpt_grid_kernel(g, scale, a, dt, tmax) for _ in range(draws)])
    edges = np.arange(1.0, tmax + 1e-9, 0.5) if edges is None else edges
    counts, _ = np.histogram(tau, edges)
    return tau, edges, counts / (draws * np.diff(edges))


def c14_fpt(fast=False):
    draws = _scale(100_000, fast)
    tau, edges, dens = fpt_histogram(6.0, draws, derive_seed(SEED, 14), dt=2e-3)
    series = np.array([an.fpt_series_mass(lo, hi, 6.0) / (hi - lo) for lo, hi in zip(edges[:-1], edges[1:])])
    disc = float(np.abs(dens - series).max())
    tol = 0.02 * (FAST_TOL if fast else 1)
    return 14, "first-passage density series", disc <= tol, {
        "sup_discrepancy": disc, "tol": tol, "mc_mass_1_10": float(((tau >= 1) & (tau <= 10)).mean()),
        "series_mass_1_10": float(an.fpt_series_mass(1.0, 10.0, 6.0))}


def c15_signs(fast=False):
    reps = _scale(2_000, fast)
    lg = mkp.estimate_log_L_gap(4.5, 2 ** 10, reps, derive_seed(SEED, 15, 45))
    sup = mkp.estimate_sup_criterion(7.9, 2 ** 12, reps, derive_seed(SEED, 15, 79))
    ok_l = lg.status == "ok" and lg.mean >= 2 * lg.std_error
    ok_s = sup.status == "ok" and sup.mean <= -2 * sup.std_error
    return 15, "sign predictions", ok_l and ok_s, {
        "L_gap_k4.5_mean": lg.mean, "L_gap_k4.5_se": lg.std_error, "L_gap_k4.5_status": lg.status,
        "L_gap_k4.5_failures": lg.failures, "sup_k7.9_mean": sup.mean, "sup_k7.9_se": sup.std_error,
        "sup_k7.9_status": sup.status, "sup_k7.9_failures": sup.failures}


CRITERIA = [c01_kappa0, c02_closure, c03_special_value, c04_oracles, c05_bayes, c06_laplace,
            c07_overshoot, c08_arcsine, c09_two_term, c10_domination, c11_bipartite,
            c12_brownian, c13_moment, c14_fpt, c15_signs]


def run_criterion(fn, fast=False) -> CriterionResult:
    t0 = time.perf_counter()
    number, name, passed, measured = fn(fast=fast)
    return CriterionResult(number, name, bool(passed), measured, time.perf_counter() - t0)


def run_all(fast=False, only=None, echo=print) -> list[CriterionResult]:
    out = []
    for fn in CRITERIA:
        if only and fn.__name__[1:3].lstrip("0") not in {str(x) for x in only}:
            continue
        res = run_criterion(fn, fast)
        if echo:
            echo(res.line())
        out.append(res)
    return out
