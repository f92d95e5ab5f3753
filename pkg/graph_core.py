#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Edge-list parsing and degree statistics.

입력 형식: 한 줄에 간선 하나 (공백으로 구분된 노드 토큰 2개).
'#' / '%' 로 시작하는 줄과 빈 줄은 무시합니다.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Set, Tuple, Union

import numpy as np

from errors import (
    CapExceededError,
    EmptyGraphError,
    GraphFormatError,
    IsolatedNodeError,
    MalformedLineError,
    SelfLoopError,
)
from model import Graph


def sparsity_threshold(c0: float) -> Fraction:
    """ε̄₀ = {15(C₀+1)}⁻², exact for rational C₀."""
    return 1 / (15 * (Fraction(c0) + 1)) ** 2


@dataclass(frozen=True, eq=False)
class SparsityStats:
    degrees: np.ndarray
    total_degree: int
    eps0: float
    per_node_eps: np.ndarray
    min_degree: int
    max_degree: int

    def valid_fraction(self, c0: float) -> float:
        # d² ≤ ε̄₀·X₊₊ in exact rationals; threshold sits on a 1/k² grid
        bound = sparsity_threshold(c0) * self.total_degree
        valid = sum(1 for d in self.degrees.tolist() if d * d <= bound)
        return valid / len(self.degrees)


# =============================
# Parsing
# =============================
def _decode(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        line_number = data.count(b"\n", 0, exc.start) + 1
        line = data.split(b"\n")[line_number - 1].decode("utf-8", errors="replace").rstrip("\r")
        raise GraphFormatError(f"edge list is not valid UTF-8 on line {line_number}", line_number, line) from exc


def parse_edge_list(text: Union[bytes, str]) -> Graph:
    if isinstance(text, bytes):
        text = _decode(text)
    index: Dict[str, int] = {}
    labels: List[str] = []
    edges: Set[Tuple[int, int]] = set()

    def _node(token: str) -> int:
        if token not in index:
            index[token] = len(labels)
            labels.append(token)
        return index[token]

    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise MalformedLineError(line_number, raw)
        a, b = tokens
        if a == b:
            raise SelfLoopError(line_number, raw)
        i, j = _node(a), _node(b)
        edges.add((min(i, j), max(i, j)))

    if not edges:
        raise EmptyGraphError("edge list contains no edges")
    return Graph.from_edges(labels, sorted(edges))


def load_edge_list(path: Union[str, Path]) -> Graph:
    return parse_edge_list(Path(path).read_bytes())


def serialize_edge_list(g: Graph) -> str:
    rows, cols = edge_pairs(g)
    return "".join(f"{g.labels[i]} {g.labels[j]}\n" for i, j in zip(rows.tolist(), cols.tolist()))


def edge_pairs(g: Graph) -> Tuple[np.ndarray, np.ndarray]:
    """(rows, cols) of every edge with i < j, row-major."""
    rows: List[int] = []
    cols: List[int] = []
    for i, nbrs in enumerate(g.adjacency):
        for j in nbrs:
            if j > i:
                rows.append(i)
                cols.append(j)
    return np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64)


def adjacency_matrix(g: Graph, cap: int) -> np.ndarray:
    if g.n > cap:
        raise CapExceededError(g.n, cap)
    out = np.zeros((g.n, g.n))
    rows, cols = edge_pairs(g)
    out[rows, cols] = 1.0
    out[cols, rows] = 1.0
    return out


# =============================
# Statistics
# =============================
def sparsity_stats(g: Graph) -> SparsityStats:
    if g.total_degree == 0:
        raise EmptyGraphError("sparsity statistics need at least one edge")
    degrees = np.asarray(g.degrees, dtype=np.int64)
    x_pp = g.total_degree
    squares = degrees * degrees
    per_node = squares / x_pp
    return SparsityStats(
        degrees=degrees,
        total_degree=x_pp,
        eps0=float(Fraction(int(squares.max()), x_pp)),
        per_node_eps=per_node,
        min_degree=int(degrees.min()),
        max_degree=int(degrees.max()),
    )


def strip_isolated(g: Graph) -> Tuple[Graph, List[str]]:
    keep = [i for i, nbrs in enumerate(g.adjacency) if nbrs]
    if not keep:
        raise EmptyGraphError("every node is isolated")
    if len(keep) == g.n:
        return g, []
    removed = [g.labels[i] for i, nbrs in enumerate(g.adjacency) if not nbrs]
    remap = {old: new for new, old in enumerate(keep)}
    edges = [(remap[i], remap[j]) for i in keep for j in g.adjacency[i] if j > i]
    return Graph.from_edges([g.labels[i] for i in keep], edges), removed


def require_no_isolated(g: Graph) -> None:
    isolated = [g.labels[i] for i, nbrs in enumerate(g.adjacency) if not nbrs]
    if isolated:
        raise IsolatedNodeError(isolated)
