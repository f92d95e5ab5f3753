#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Data model (Enums + dataclasses + option schema).

계산 로직과 독립적인 모델 계층. 배열은 numpy, 옵션은 pydantic.
"""

from __future__ import annotations

from dataclasses import dataclass
from dataclasses import field
from enum import Enum
from functools import cached_property
from typing import Iterable, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from config import (
    DENSE_CAP,
    DIVERGENCE_CAP,
    FIT_MAX_ITERATIONS,
    FIT_TOLERANCE,
    LINE_SEARCH_CONTRACTION,
    LINE_SEARCH_MAX_HALVINGS,
)


# =============================
# Enums
# =============================
class SolverKind(str, Enum):
    EXACT_NEWTON = "exact-newton"
    H_PRECONDITIONED = "h-preconditioned"


class SolverChoice(str, Enum):
    AUTO = "auto"
    EXACT = "exact"
    PRECOND = "precond"


class HessianMode(str, Enum):
    DENSE = "dense"
    STRUCTURED = "structured"


# =============================
# Graph
# =============================
@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes 0..n-1.

    labels[i] 는 입력 파일의 원래 라벨, adjacency[i] 는 정렬된 이웃 인덱스.
    """

    labels: Tuple[str, ...]
    adjacency: Tuple[Tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if len(self.labels) != len(self.adjacency):
            raise ValueError("labels and adjacency must have the same length")

    @classmethod
    def from_edges(cls, labels: Iterable[str], edges: Iterable[Tuple[int, int]]) -> "Graph":
        labels = tuple(str(x) for x in labels)
        neighbours: List[set] = [set() for _ in labels]
        for i, j in edges:
            if i == j:
                raise ValueError(f"self-loop at node {i}")
            neighbours[i].add(j)
            neighbours[j].add(i)
        return cls(labels=labels, adjacency=tuple(tuple(sorted(s)) for s in neighbours))

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def degrees(self) -> np.ndarray:
        out = np.fromiter((len(a) for a in self.adjacency), dtype=np.int64, count=self.n)
        out.flags.writeable = False
        return out

    @property
    def total_degree(self) -> int:
        return int(self.degrees.sum())

    @property
    def edge_count(self) -> int:
        return self.total_degree // 2


# =============================
# Fit options
# =============================
class FitOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    tolerance: float = Field(default=FIT_TOLERANCE, gt=0)
    max_iterations: int = Field(default=FIT_MAX_ITERATIONS, gt=0)
    solver: SolverChoice = SolverChoice.AUTO
    dense_cap: int = Field(default=DENSE_CAP, gt=0)
    divergence_cap: float = Field(default=DIVERGENCE_CAP, gt=0)
    contraction: float = Field(default=LINE_SEARCH_CONTRACTION, gt=0, lt=1)
    max_halvings: int = Field(default=LINE_SEARCH_MAX_HALVINGS, ge=0)
    check_existence: bool = True
    keep_iterates: bool = False


# =============================
# Estimates
# =============================
@dataclass(frozen=True)
class EdgeProb:
    p: float
    log_p: float
    log1m_p: float

    def __float__(self) -> float:
        return self.p


@dataclass
class PluginEstimate:
    alpha_tilde: np.ndarray
    degrees: np.ndarray
    total_degree: int
    eps0: float
    max_p_tilde: float
    ll_tilde: Optional[float] = None

    def p_tilde(self, i: int, j: int) -> float:
        return float(self.degrees[i]) * float(self.degrees[j]) / self.total_degree

    @property
    def ll_tilde_defined(self) -> bool:
        return self.ll_tilde is not None


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    log_lik: float
    score_norm: float
    step_norm: float
    halvings: int


@dataclass
class FitResult:
    alpha_hat: np.ndarray
    converged: bool
    iterations: int
    final_score_norm: float
    ll_hat: float
    solver: SolverKind
    link_name: str
    trace: List[IterationRecord] = field(default_factory=list)
    iterates: Optional[List[np.ndarray]] = None
    start_shift: float = 0.0


@dataclass
class ErrorReport:
    sup_err: float
    l2_err: float
    scaled_sup: float
    scaled_l2: float
    per_node_scaled: np.ndarray
    degrees: np.ndarray
    p_rel_max: float
    ll_hat: float
    ll_tilde: Optional[float] = None
    ll_rel: Optional[float] = None
