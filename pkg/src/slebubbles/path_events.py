"""Exact path functionals on integer walks: passages, running minima, sigma,
records, cut times and last simultaneous suprema.

Everything works on raw lattice values so comparisons have no ties to round.
Functions accept a :class:`LatticeWalk`/:class:`ProcessPair` or plain arrays.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numba
import numpy as np

__all__ = [
    "HorizonExhausted", "EventTimes", "RecordSet", "CutTime", "CutTimeList",
    "first_passage_below", "last_running_min_before", "sigma_of", "sigma_many",
    "record_min_set", "cut_times", "theta_before_hit", "global_cut_times",
    "event_times", "next_strict_smaller",
]


class HorizonExhausted(RuntimeError):
    """The searched event did not happen within the available steps."""

    def __init__(self, message: str, horizon: int):
        super().__init__(message)
        self.horizon = horizon


def _vals(walk) -> np.ndarray:
    v = getattr(walk, "values", walk)
    return np.asarray(v, dtype=np.int64)


def _pair(pair) -> tuple[np.ndarray, np.ndarray]:
    if hasattr(pair, "L"):
        return _vals(pair.L), _vals(pair.R)
    L, R = pair
    return _vals(L), _vals(R)


@dataclass(frozen=True)
class EventTimes:
    tau: int
    xi: int
    sigma: int
    level: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RecordSet:
    times: tuple[int, ...]

    def __contains__(self, t) -> bool:
        return t in self.times

    def __len__(self) -> int:
        return len(self.times)

    def __iter__(self):
        return iter(self.times)


@dataclass(frozen=True)
class CutTime:
    t: int
    left_bubble_time: int
    right_bubble_time: int


class CutTimeList(list):
    """List of :class:`CutTime` that also remembers how many were dropped."""

    def __init__(self, items=(), dropped: int = 0):
        super().__init__(items)
        self.dropped = dropped


# --------------------------------------------------------------------------
# Kernels
# --------------------------------------------------------------------------


@numba.njit(cache=True)
def _first_below(v, level, start):
    for i in range(start, v.shape[0]):
        if v[i] < level:
            return i
    return -1


@numba.njit(cache=True)
def next_strict_smaller(v):
    """out[i] = first j > i with v[j] < v[i], or -1."""
    n = v.shape[0]
    out = np.full(n, -1, dtype=np.int64)
    stack = np.empty(n, dtype=np.int64)
    top = 0
    for i in range(n):
        while top > 0 and v[i] < v[stack[top - 1]]:
            out[stack[top - 1]] = i
            top -= 1
        stack[top] = i
        top += 1
    return out


def _reach(L: np.ndarray, R: np.ndarray) -> np.ndarray:
    """Prefix max over s of min(next drop of L, next drop of R) after s.

    s is admissible for sigma(t) iff neither walk drops below its time-s value
    before t, i.e. f(s) >= t.  The first admissible s is where the prefix max
    first reaches t.
    """
    big = np.iinfo(np.int64).max
    nl, nr = next_strict_smaller(L), next_strict_smaller(R)
    f = np.minimum(np.where(nl < 0, big, nl), np.where(nr < 0, big, nr))
    return np.maximum.accumulate(f)


# --------------------------------------------------------------------------
# Operations
# --------------------------------------------------------------------------


def first_passage_below(walk, level: int, start: int = 0) -> int:
    v = _vals(walk)
    i = int(_first_below(v, int(level), int(start)))
    if i < 0:
        raise HorizonExhausted(f"no value below {level} within {len(v) - 1} steps", len(v) - 1)
    return i


def last_running_min_before(walk, t: int) -> int:
    """Last index s < t where the minimum over [0, t) is attained."""
    if t < 1:
        raise ValueError("t must be >= 1")
    v = _vals(walk)[:t]
    return int(t - 1 - np.argmin(v[::-1]))


def sigma_of(pair, t: int) -> int:
    """Smallest s < t with L_r >= L_s and R_r >= R_s for all r in [s, t)."""
    if t < 1:
        raise ValueError("t must be >= 1")
    L, R = _pair(pair)
    l, r = L[:t], R[:t]
    ok = (l == np.minimum.accumulate(l[::-1])[::-1]) & (r == np.minimum.accumulate(r[::-1])[::-1])
    return int(np.argmax(ok))  # ok[t-1] is always True


def sigma_many(pair, ts) -> np.ndarray:
    """sigma(t) for many t at once, O(horizon + len(ts) log horizon)."""
    L, R = _pair(pair)
    ts = np.asarray(ts, dtype=np.int64)
    if ts.size and ts.min() < 1:
        raise ValueError("t must be >= 1")
    return np.searchsorted(_reach(L, R), ts, side="left").astype(np.int64)


def record_min_set(walk, upto: int | None = None) -> RecordSet:
    """Times t <= upto with a strict record minimum; t = 0 included."""
    v = _vals(walk)
    if upto is not None:
        v = v[: upto + 1]
    prior = np.minimum.accumulate(v)
    rec = np.empty(len(v), dtype=bool)
    rec[0] = True
    rec[1:] = v[1:] < prior[:-1]
    return RecordSet(tuple(int(i) for i in np.flatnonzero(rec)))


def _cut_candidates(L: np.ndarray, R: np.ndarray, horizon: int):
    L, R = L[: horizon + 1], R[: horizon + 1]
    nl, nr = next_strict_smaller(L), next_strict_smaller(R)
    t = np.flatnonzero((np.diff(L) > 0) & (np.diff(R) > 0))
    keep = (nl[t] >= 0) & (nr[t] >= 0)
    return t[keep], nl[t[keep]], nr[t[keep]], int((~keep).sum())


def cut_times(pair, horizon: int | None = None) -> CutTimeList:
    """Lattice cut times with the times their two bubbles are formed.

    t is a cut time when both walks step up at t+1.  A cut time whose L- or
    R-passage below its time-t value is not seen within the horizon is dropped
    and counted in ``.dropped``.
    """
    L, R = _pair(pair)
    horizon = len(L) - 1 if horizon is None else int(horizon)
    t, bl, br, dropped = _cut_candidates(L, R, horizon)
    return CutTimeList((CutTime(int(a), int(b), int(c)) for a, b, c in zip(t, bl, br)), dropped)


def global_cut_times(pair, horizon: int | None = None) -> list[int]:
    """Cut times whose two bubble passages land on strict record minima."""
    L, R = _pair(pair)
    horizon = len(L) - 1 if horizon is None else int(horizon)
    t, bl, br, _ = _cut_candidates(L, R, horizon)
    recL = np.zeros(horizon + 1, dtype=bool)
    recR = np.zeros(horizon + 1, dtype=bool)
    recL[list(record_min_set(L, horizon))] = True
    recR[list(record_min_set(R, horizon))] = True
    return [int(x) for x in t[recL[bl] & recR[br]]]


def theta_before_hit(pair, r: int) -> int:
    """Last t before R first reaches r at which both walks sit at their running max."""
    if r < 1:
        raise ValueError("r must be >= 1")
    L, R = _pair(pair)
    hits = np.flatnonzero(R >= r)
    if hits.size == 0:
        raise HorizonExhausted(f"R never reaches {r} within {len(R) - 1} steps", len(R) - 1)
    H = int(hits[0])
    l, rr = L[:H], R[:H]
    both = (l == np.maximum.accumulate(l)) & (rr == np.maximum.accumulate(rr))
    return int(np.flatnonzero(both)[-1])


def event_times(pair, level: int) -> EventTimes:
    """tau = first R value below ``-level``; xi = last argmin of R before tau; sigma(tau)."""
    L, R = _pair(pair)
    tau = first_passage_below(R, -int(level))
    return EventTimes(tau, last_running_min_before(R, tau), sigma_of((L, R), tau), int(level))
