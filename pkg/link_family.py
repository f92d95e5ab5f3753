#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Link-function family: log p_ij = α_i + α_j + ε(α_i, α_j).

내장 링크 3종(log, cloglog, logit)은 ε 가 선형 예측자 s = α_i + α_j 에만
의존합니다. 사용자 정의 링크는 custom_link 로 만들고 C₀ 를 직접 선언합니다.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Tuple

import numpy as np
from scipy.special import expit

from config import FD_ATOL, FD_RTOL, FD_STEP, LINK_NAMES, SUBEXP_BOX, SUBEXP_SAMPLES
from errors import LinkDomainError
from model import EdgeProb

logger = logging.getLogger(__name__)

PairFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
PairFn2 = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]

# below this z = e^s the closed forms lose digits to cancellation
_SERIES_CUTOFF = 1e-3
_LN2 = float(np.log(2.0))


@dataclass(frozen=True)
class LinkSpec:
    """One member of the family.

    deps(x, y) is ∂ε/∂x; the partial in y is deps(y, x).
    d2eps(x, y) returns (∂²ε/∂x∂y, ∂²ε/∂x²).
    bounded=False marks links whose p reaches 1 for finite predictors (log link).
    """

    name: str
    c0: float
    eps: PairFn
    deps: PairFn
    d2eps: PairFn2
    log_p_fn: Optional[PairFn] = None
    log1m_p_fn: Optional[PairFn] = None
    bounded: bool = True

    def log_p(self, x, y) -> np.ndarray:
        if self.log_p_fn is not None:
            return self.log_p_fn(x, y)
        return x + y + self.eps(x, y)

    def log1m_p(self, x, y) -> np.ndarray:
        if self.log1m_p_fn is not None:
            return self.log1m_p_fn(x, y)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.log(-np.expm1(self.log_p(x, y)))

    def feasible(self, x, y) -> np.ndarray:
        return np.asarray(self.log_p(x, y)) < 0


# =============================
# log
# =============================
def _zero(x, y):
    return np.zeros(np.broadcast(x, y).shape)


def _zero_pair(x, y):
    z = _zero(x, y)
    return z, z


def _log_log1m(x, y):
    s = np.asarray(x + y)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(s < 0, np.log(-np.expm1(np.minimum(s, 0))), np.nan)


def link_log() -> LinkSpec:
    return LinkSpec(
        name="log",
        c0=0.0,
        eps=_zero,
        deps=_zero,
        d2eps=_zero_pair,
        log_p_fn=lambda x, y: np.asarray(x + y),
        log1m_p_fn=_log_log1m,
        bounded=False,
    )


# =============================
# cloglog
# =============================
def _cloglog_eps(x, y):
    s = np.asarray(x + y)
    z = np.exp(s)
    small = z < _SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    with np.errstate(divide="ignore"):
        closed = np.log(-np.expm1(-safe) / safe)
    zs = np.where(small, z, 0.0)
    series = -zs / 2 + zs**2 / 24 - zs**4 / 2880
    return np.where(small, series, closed)


def _cloglog_log_p(x, y):
    s = np.asarray(x + y)
    z = np.exp(s)
    small = z < _SERIES_CUTOFF
    with np.errstate(divide="ignore"):
        closed = np.log(-np.expm1(-np.where(small, 1.0, z)))
    return np.where(small, s + _cloglog_eps(x, y), closed)


def _cloglog_deps(x, y):
    # ε'(s) = z/expm1(z) − 1, z = e^s
    s = np.asarray(x + y)
    z = np.exp(s)
    small = z < _SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    with np.errstate(over="ignore"):
        closed = safe / np.expm1(safe) - 1.0
    zs = np.where(small, z, 0.0)
    series = -zs / 2 + zs**2 / 12 - zs**4 / 720
    return np.where(small, series, closed)


def _cloglog_d2eps(x, y):
    # ε''(s) = B(z)·(1 − z/(1 − e^{-z})), B(z) = z/expm1(z)
    s = np.asarray(x + y)
    z = np.exp(s)
    small = z < _SERIES_CUTOFF
    safe = np.where(small, 1.0, z)
    with np.errstate(over="ignore"):
        bern = safe / np.expm1(safe)
    closed = bern * (1.0 + safe / np.expm1(-safe))
    zs = np.where(small, z, 0.0)
    series = -zs / 2 + zs**2 / 6 - zs**4 / 180
    out = np.where(small, series, closed)
    return out, out


def link_cloglog() -> LinkSpec:
    return LinkSpec(
        name="cloglog",
        c0=0.5,
        eps=_cloglog_eps,
        deps=_cloglog_deps,
        d2eps=_cloglog_d2eps,
        log_p_fn=_cloglog_log_p,
        log1m_p_fn=lambda x, y: -np.exp(np.asarray(x + y)),
    )


# =============================
# logit
# =============================
def _logit_d2eps(x, y):
    s = np.asarray(x + y)
    out = -expit(s) * expit(-s)
    return out, out


def link_logit() -> LinkSpec:
    return LinkSpec(
        name="logit",
        c0=1.0,
        eps=lambda x, y: -np.logaddexp(0.0, np.asarray(x + y)),
        deps=lambda x, y: -expit(np.asarray(x + y)),
        d2eps=_logit_d2eps,
        log_p_fn=lambda x, y: -np.logaddexp(0.0, -np.asarray(x + y)),
        log1m_p_fn=lambda x, y: -np.logaddexp(0.0, np.asarray(x + y)),
    )


_BUILTIN = {"log": link_log, "cloglog": link_cloglog, "logit": link_logit}


def link_by_name(name: str) -> LinkSpec:
    if name not in _BUILTIN:
        raise ValueError(f"unknown link: {name} (expected one of {', '.join(LINK_NAMES)})")
    return _BUILTIN[name]()


def custom_link(
    name: str,
    c0: float,
    eps: PairFn,
    deps: PairFn,
    d2eps: PairFn2,
    log_p: Optional[PairFn] = None,
    log1m_p: Optional[PairFn] = None,
    bounded: bool = False,
) -> LinkSpec:
    """Build a link from user callables (numpy-vectorized).

    C₀ is taken on trust; check_subexponential and check_partials sample it.
    """
    if c0 < 0:
        raise ValueError(f"c0 must be nonnegative, got {c0}")
    return LinkSpec(
        name=name,
        c0=float(c0),
        eps=eps,
        deps=deps,
        d2eps=d2eps,
        log_p_fn=log_p,
        log1m_p_fn=log1m_p,
        bounded=bounded,
    )


# =============================
# Probabilities
# =============================
def edge_prob(link: LinkSpec, ai: float, aj: float) -> EdgeProb:
    x, y = np.float64(ai), np.float64(aj)
    if not link.bounded:
        if not bool(link.feasible(x, y)):
            raise LinkDomainError(f"{link.name} link: p >= 1 at predictor {ai + aj:.6g}")
        lp = float(link.log_p(x, y))
        return EdgeProb(p=float(np.exp(lp)), log_p=lp, log1m_p=float(link.log1m_p(x, y)))
    # bounded links: once log p rounds to 0 the complement still carries the digits
    lp = float(link.log_p(x, y))
    l1m = float(link.log1m_p(x, y))
    p = float(np.exp(lp)) if lp < -_LN2 else float(-np.expm1(l1m))
    return EdgeProb(p=p, log_p=min(lp, 0.0), log1m_p=l1m)


# =============================
# Sampled checks
# =============================
def _box_points(samples: int, box: Tuple[float, float], seed: int) -> Tuple[np.ndarray, np.ndarray]:
    rng = np.random.default_rng(seed)
    pts = rng.uniform(box[0], box[1], size=(samples, 2))
    return pts[:, 0], pts[:, 1]


def check_subexponential(
    link: LinkSpec,
    samples: int = SUBEXP_SAMPLES,
    box: Tuple[float, float] = SUBEXP_BOX,
    seed: int = 0,
) -> float:
    """Largest excess of |ε|, |∂ε|, |∂²ε| over c0·exp(x+y) on random box points."""
    x, y = _box_points(samples, box, seed)
    bound = link.c0 * np.exp(x + y)
    cross, same = link.d2eps(x, y)
    worst = -np.inf
    for values in (link.eps(x, y), link.deps(x, y), link.deps(y, x), cross, same):
        worst = max(worst, float(np.max(np.abs(values) - bound)))
    logger.debug("%s link: worst sub-exponential excess %.3g", link.name, worst)
    return worst


def _relative_gap(analytic: np.ndarray, numeric: np.ndarray) -> float:
    gap = np.abs(analytic - numeric) - FD_ATOL
    return float(np.max(np.maximum(gap, 0.0) / np.maximum(np.abs(analytic), np.finfo(float).tiny)))


def check_partials(
    link: LinkSpec,
    samples: int = 1000,
    box: Tuple[float, float] = SUBEXP_BOX,
    seed: int = 0,
    step: float = FD_STEP,
) -> float:
    """Worst relative gap between supplied partials and central differences.

    A result ≤ FD_RTOL means deps and d2eps agree with eps numerically.
    """
    x, y = _box_points(samples, box, seed)
    fd_dx = (link.eps(x + step, y) - link.eps(x - step, y)) / (2 * step)
    fd_cross = (link.deps(x, y + step) - link.deps(x, y - step)) / (2 * step)
    fd_same = (link.deps(x + step, y) - link.deps(x - step, y)) / (2 * step)
    cross, same = link.d2eps(x, y)
    worst = max(
        _relative_gap(link.deps(x, y), fd_dx),
        _relative_gap(cross, fd_cross),
        _relative_gap(same, fd_same),
    )
    if worst > FD_RTOL:
        logger.info("%s link: partials disagree with finite differences (%.3g)", link.name, worst)
    return worst
