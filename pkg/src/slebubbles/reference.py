"""Slow, literal versions of the path functionals.

Each one is a direct transcription of its definition with plain loops and is
used only as a test oracle for the fast scans.
"""
from __future__ import annotations


def first_passage_below(v, level):
    for i, x in enumerate(v):
        if x < level:
            return i
    return None


def last_running_min_before(v, t):
    m = min(v[:t])
    return max(s for s in range(t) if v[s] == m)


def sigma_of(L, R, t):
    for s in range(t):
        if all(L[r] >= L[s] and R[r] >= R[s] for r in range(s, t)):
            return s
    return t


def record_min_set(v, upto):
    return [t for t in range(upto + 1) if t == 0 or all(v[t] < v[s] for s in range(t))]


def _first_strictly_below(v, t):
    for s in range(t + 1, len(v)):
        if v[s] < v[t]:
            return s
    return None


def cut_times(L, R, horizon):
    out = []
    for t in range(horizon):
        if L[t + 1] > L[t] and R[t + 1] > R[t]:
            a = _first_strictly_below(L[: horizon + 1], t)
            b = _first_strictly_below(R[: horizon + 1], t)
            if a is not None and b is not None:
                out.append((t, a, b))
    return out


def global_cut_times(L, R, horizon):
    recL = set(record_min_set(L, horizon))
    recR = set(record_min_set(R, horizon))
    return [t for t, a, b in cut_times(L, R, horizon) if a in recL and b in recR]


def theta_before_hit(L, R, r):
    H = next(t for t in range(len(R)) if R[t] >= r)
    best = None
    for t in range(H):
        if L[t] == max(L[: t + 1]) and R[t] == max(R[: t + 1]):
            best = t
    return best


def boundary_times(v, jump_time):
    """t < jump_time whose first later strict drop below v[t] is at jump_time."""
    return [t for t in range(jump_time) if _first_strictly_below(v[: jump_time + 1], t) == jump_time]


def components(n_nodes, edges):
    """Connected components by repeated relabelling (no union-find)."""
    label = list(range(n_nodes))
    changed = True
    while changed:
        changed = False
        for a, b in edges:
            m = min(label[a], label[b])
            if label[a] != m or label[b] != m:
                label[a] = label[b] = m
                changed = True
    groups = {}
    for i, g in enumerate(label):
        groups.setdefault(g, []).append(i)
    return sorted(sorted(g) for g in groups.values())
