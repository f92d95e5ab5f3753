#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Exception hierarchy.

모든 오류는 ValueError 계열입니다. (데이터 문제 = ValueError 관례 유지)
"""

from __future__ import annotations

from typing import Optional, Sequence


class NullModelError(ValueError):
    """Root of every error raised by the package."""


# =============================
# Input graphs
# =============================
class GraphFormatError(NullModelError):
    def __init__(self, message: str, line_number: int = 0, line: str = "") -> None:
        super().__init__(message)
        self.line_number = line_number
        self.line = line


class MalformedLineError(GraphFormatError):
    def __init__(self, line_number: int, line: str) -> None:
        super().__init__(f"malformed edge line {line_number}: {line!r}", line_number, line)


class SelfLoopError(GraphFormatError):
    def __init__(self, line_number: int, line: str) -> None:
        super().__init__(f"self-loop on line {line_number}: {line!r}", line_number, line)


class EmptyGraphError(NullModelError):
    pass


class IsolatedNodeError(NullModelError):
    def __init__(self, node_labels: Sequence[str]) -> None:
        labels = list(node_labels)
        shown = ", ".join(labels[:10]) + (" ..." if len(labels) > 10 else "")
        super().__init__(f"isolated nodes (degree 0): {shown}")
        self.node_labels = labels


# =============================
# Numerics
# =============================
class LinkDomainError(NullModelError):
    pass


class CapExceededError(NullModelError):
    def __init__(self, n: int, cap: int) -> None:
        super().__init__(f"dense representation needs n <= {cap}, got n = {n}")
        self.n = n
        self.cap = cap


class MleDivergedError(NullModelError):
    def __init__(self, reason: str) -> None:
        super().__init__(f"MLE does not exist ({reason})")
        self.reason = reason


class LineSearchFailedError(NullModelError):
    def __init__(self, iteration: int, halvings: int) -> None:
        super().__init__(f"line search failed at iteration {iteration} after {halvings} halvings")
        self.iteration = iteration
        self.halvings = halvings


class NotConvergedError(NullModelError):
    pass


class BoundaryEscapeError(NullModelError):
    def __init__(self, node: int, value: float, reason: Optional[str] = None) -> None:
        super().__init__(reason or f"oracle hit the search box at node {node}: {value}")
        self.node = node
        self.value = value


class UndefinedPluginLikelihoodError(NullModelError):
    pass


class InfeasibleTargetError(NullModelError):
    pass


# =============================
# Settings / files
# =============================
class SettingsError(NullModelError):
    pass
