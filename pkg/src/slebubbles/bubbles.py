"""Bubble adjacency graph built from the jump structure of a walk pair.

A bubble is a downward step of L (left) or R (right).  A cut time t joins the
left bubble formed when L first drops below L_t to the right bubble formed
when R first drops below R_t; the resulting graph is bipartite by construction.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .path_events import _pair, _vals, cut_times, next_strict_smaller

__all__ = [
    "Bubble", "Edge", "BubbleGraph", "BoundaryTimes", "UnionFind", "extract_bubbles",
    "boundary_times", "build_graph", "connectivity_report", "export_graph", "load_graph",
]

LEFT, RIGHT = "L", "R"


@dataclass(frozen=True, order=True)
class Bubble:
    jump_time: int
    side: str
    jump_size: int
    pre_level: int
    post_level: int = field(init=False)

    def __post_init__(self):
        if self.side not in (LEFT, RIGHT):
            raise ValueError(f"side must be L or R, got {self.side!r}")
        if self.jump_size < 1:
            raise ValueError("jump_size must be >= 1")
        object.__setattr__(self, "post_level", self.pre_level - self.jump_size)


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    cut_time: int
    multiplicity: int = 1


@dataclass(frozen=True)
class BoundaryTimes:
    bubble: Bubble
    times: tuple[int, ...]


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.size = [1] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> list[list[int]]:
        out: dict[int, list[int]] = {}
        for i in range(len(self.parent)):
            out.setdefault(self.find(i), []).append(i)
        return sorted(out.values())


@dataclass(frozen=True)
class BubbleGraph:
    nodes: tuple[Bubble, ...]
    edges: tuple[Edge, ...]
    min_jump: int = 1
    cut_times_dropped: int = 0

    @property
    def components(self) -> list[list[int]]:
        uf = UnionFind(len(self.nodes))
        for e in self.edges:
            uf.union(e.a, e.b)
        return uf.groups()

    def is_bipartite(self) -> bool:
        return all(self.nodes[e.a].side != self.nodes[e.b].side for e in self.edges)

    def to_dict(self) -> dict:
        return {
            "nodes": [{"id": i, "side": b.side, "jump_time": b.jump_time,
                       "jump_size": b.jump_size, "pre_level": b.pre_level}
                      for i, b in enumerate(self.nodes)],
            "edges": [{"a": e.a, "b": e.b, "cut_time": e.cut_time,
                       "multiplicity": e.multiplicity} for e in self.edges],
            "min_jump": self.min_jump,
            "cut_times_dropped": self.cut_times_dropped,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BubbleGraph":
        nodes = sorted(d["nodes"], key=lambda x: x["id"])
        return cls(tuple(Bubble(x["jump_time"], x["side"], x["jump_size"], x.get("pre_level", 0))
                         for x in nodes),
                   tuple(Edge(e["a"], e["b"], e["cut_time"], e.get("multiplicity", 1))
                         for e in d["edges"]),
                   d.get("min_jump", 1), d.get("cut_times_dropped", 0))


def _walk_bubbles(v: np.ndarray, side: str, min_jump: int) -> list[Bubble]:
    inc = np.diff(v)
    idx = np.flatnonzero(inc <= -min_jump)
    return [Bubble(int(i + 1), side, int(-inc[i]), int(v[i])) for i in idx]


def extract_bubbles(pair, min_jump: int = 1, horizon: int | None = None) -> list[Bubble]:
    """All downward steps of size >= min_jump in both walks, sorted by (jump_time, side)."""
    if min_jump < 1:
        raise ValueError("min_jump must be >= 1")
    L, R = _pair(pair)
    h = len(L) - 1 if horizon is None else int(horizon)
    return sorted(_walk_bubbles(L[: h + 1], LEFT, min_jump) + _walk_bubbles(R[: h + 1], RIGHT, min_jump))


def boundary_times(walk, bubble: Bubble) -> BoundaryTimes:
    """t < jump_time whose first later value strictly below v_t is at jump_time.

    Such t satisfy post_level <= v_t - 1 < v_t <= pre_level.
    """
    v = _vals(walk)[: bubble.jump_time + 1]
    nxt = next_strict_smaller(v)
    return BoundaryTimes(bubble, tuple(int(t) for t in np.flatnonzero(nxt == bubble.jump_time)))


def build_graph(pair, min_jump: int = 1, horizon: int | None = None) -> BubbleGraph:
    L, _ = _pair(pair)
    h = len(L) - 1 if horizon is None else int(horizon)
    nodes = extract_bubbles(pair, min_jump, h)
    index = {(b.side, b.jump_time): i for i, b in enumerate(nodes)}
    cuts = cut_times(pair, h)
    found: dict[tuple[int, int], list[int]] = {}
    for c in cuts:
        a = index.get((LEFT, c.left_bubble_time))
        b = index.get((RIGHT, c.right_bubble_time))
        if a is not None and b is not None:
            found.setdefault((a, b), []).append(c.t)
    edges = sorted((Edge(a, b, ts[0], len(ts)) for (a, b), ts in found.items()),
                   key=lambda e: (e.cut_time, e.a, e.b))
    return BubbleGraph(tuple(nodes), tuple(edges), min_jump, cuts.dropped)


def connectivity_report(graph: BubbleGraph) -> dict:
    comps = graph.components
    n = len(graph.nodes)
    largest = max((len(c) for c in comps), default=0)
    return {
        "nodes": n,
        "edges": len(graph.edges),
        "components": len(comps),
        "largest_component": largest,
        "largest_fraction": largest / n if n else 0.0,
        "isolated_fraction": sum(len(c) == 1 for c in comps) / n if n else 0.0,
        "min_jump": graph.min_jump,
    }


def _dot(graph: BubbleGraph) -> str:
    lines = ["graph bubbles {"]
    for i, b in enumerate(graph.nodes):
        lines.append(f'  n{i} [side="{b.side}", jump_time={b.jump_time}, jump_size={b.jump_size}];')
    for e in graph.edges:
        lines.append(f"  n{e.a} -- n{e.b} [cut_time={e.cut_time}, multiplicity={e.multiplicity}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def export_graph(graph: BubbleGraph, fmt: str, path) -> Path:
    path = Path(path)
    if fmt == "dot":
        text = _dot(graph)
    elif fmt == "json":
        text = json.dumps(graph.to_dict(), indent=1) + "\n"
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write graph to {path}: {exc}") from exc
    return path


def load_graph(path) -> BubbleGraph:
    return BubbleGraph.from_dict(json.loads(Path(path).read_text()))
