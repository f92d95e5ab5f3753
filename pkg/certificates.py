#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Approximation certificates and realized-error reports.

상수 계산 순서: P → F → L (r = 1) → B₀, κ, δ → r = exp(4δ) → M → λ → h, t*.
적용 불가 상황은 예외 대신 applies=False + reasons 로 보고합니다.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional

import numpy as np
import scipy.linalg
from pydantic import BaseModel, ConfigDict

from config import DENSE_CAP
from errors import NotConvergedError, UndefinedPluginLikelihoodError
from estimation import plugin_alpha
from graph_core import require_no_isolated, sparsity_stats, sparsity_threshold
from likelihood import gradient, hessian, pair_blocks
from link_family import LinkSpec
from model import ErrorReport, FitResult, Graph, HessianMode, PluginEstimate

logger = logging.getLogger(__name__)


# =============================
# Schemas
# =============================
class LemmaChain(BaseModel):
    """Function-bound constants at one radius r."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    r: float
    P0: float
    P1: float
    P2: float
    P3: float
    F0: float
    F0_bar: float
    F1: float
    F1_bar: float
    F2: float


class LemmaConstants(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    at_unit: Optional[LemmaChain] = None
    at_r: Optional[LemmaChain] = None
    L1: Optional[float] = None
    L2: Optional[float] = None
    L2_bar: Optional[float] = None
    L3: Optional[float] = None
    M1: Optional[float] = None
    M1_bar: Optional[float] = None
    M2: Optional[float] = None


class Certificate(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    c0: float
    eps0: float
    min_degree: int
    eps_bar0: float
    C: float
    C1: float
    C2: float
    B0: Optional[float] = None
    kappa: Optional[float] = None
    delta: Optional[float] = None
    lam: Optional[float] = None
    h: Optional[float] = None
    t_star: Optional[float] = None
    r: Optional[float] = None
    applies: bool
    reasons: List[str] = []
    lemma_constants: LemmaConstants


class BoundVerdict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha_ok: bool
    p_ok: bool
    ll_ok: Optional[bool]
    guaranteed: bool


# =============================
# Constants
# =============================
def lemma_chain(c0: float, eps0: float, r: float) -> Optional[LemmaChain]:
    """P₀..P₃ and F₀..F₂ at radius r; None when 1 − P₀ε₀ ≤ 0."""
    q = c0 * eps0 * r
    grow = math.exp(q)
    p0 = r * grow
    p1 = p0 * (1 + q)
    p2 = p0 * ((1 + q) ** 2 + q)
    p3 = p0 * ((1 + q) ** 3 + (1 + q) * q + q)
    den = 1 - p0 * eps0
    if den <= 0:
        return None
    f0 = c0 * r + p1 / den
    f0_bar = c0 * r * grow + f0
    f1 = c0 * r + eps0 * (p1 / den) ** 2 + p2 / den
    f1_bar = grow * (c0 * r + c0 * f0 * eps0 * r + f1)
    f2 = c0 * r + 2 * eps0**2 * (p1 / den) ** 3 + 3 * eps0 * p2 * p1 / den**2 + p3 / den
    return LemmaChain(r=r, P0=p0, P1=p1, P2=p2, P3=p3, F0=f0, F0_bar=f0_bar, F1=f1, F1_bar=f1_bar, F2=f2)


def certificate_for(c0: float, eps0: float, min_degree: int = 1) -> Certificate:
    """Certificate from (C₀, ε₀) alone."""
    eps_bar0 = float(sparsity_threshold(c0))
    base = dict(
        c0=float(c0),
        eps0=float(eps0),
        min_degree=int(min_degree),
        eps_bar0=eps_bar0,
        C=10 * (c0 + 1),
        C1=24 * (c0 + 1),
        C2=49 * (c0 + 1),
    )
    reasons: List[str] = []
    if eps0 > eps_bar0:
        reasons.append("eps0_above_threshold")
    if min_degree < 1:
        reasons.append("isolated_node")

    def _done(lemma: LemmaConstants, **values) -> Certificate:
        if reasons:
            logger.debug("certificate inapplicable: %s", ", ".join(reasons))
        return Certificate(**base, **values, applies=not reasons, reasons=reasons, lemma_constants=lemma)

    unit = lemma_chain(c0, eps0, 1.0)
    if unit is None:
        reasons.append("one_minus_p0_eps0_nonpositive")
        return _done(LemmaConstants())
    l1 = 1 + unit.F0 + unit.F0_bar
    l2 = unit.F1
    l2_bar = unit.F0_bar + unit.F1_bar
    l3 = 2 + l2 + l2_bar
    b0 = 1.5 * (l2 + l2_bar + l3)
    partial = dict(at_unit=unit, L1=l1, L2=l2, L2_bar=l2_bar, L3=l3)
    if b0 * eps0 >= 1:
        reasons.append("b0_eps0_not_below_one")
        return _done(LemmaConstants(**partial), B0=b0)

    kappa = 1.5 / (1 - b0 * eps0)
    delta = l1 * kappa * eps0
    r = math.exp(4 * delta)
    at_r = lemma_chain(c0, eps0, r)
    if at_r is None:
        reasons.append("one_minus_p0_eps0_nonpositive_at_r")
        return _done(LemmaConstants(**partial), B0=b0, kappa=kappa, delta=delta, r=r)
    m1 = at_r.F2 * eps0
    m1_bar = 2 * r * (1 + at_r.F0_bar + at_r.F1_bar)
    m2 = m1 + m1_bar
    lam = 2 * m2
    h = 2 * kappa * lam * delta
    t_star: Optional[float]
    if h > 1:
        reasons.append("kantorovich_h_above_one")
        t_star = None
    elif h == 0:
        t_star = delta
    else:
        t_star = (2 / h) * (1 - math.sqrt(1 - h)) * delta
    lemma = LemmaConstants(**partial, at_r=at_r, M1=m1, M1_bar=m1_bar, M2=m2)
    return _done(lemma, B0=b0, kappa=kappa, delta=delta, lam=lam, h=h, t_star=t_star, r=r)


def certificate(g: Graph, link: LinkSpec) -> Certificate:
    require_no_isolated(g)
    stats = sparsity_stats(g)
    return certificate_for(link.c0, stats.eps0, stats.min_degree)


# =============================
# Realized errors
# =============================
def error_report(
    g: Graph,
    link: LinkSpec,
    fit: FitResult,
    plug: PluginEstimate,
    strict: bool = False,
) -> ErrorReport:
    """Compare α̂ with α̃; strict=True raises when ℓ̃ is undefined."""
    if not fit.converged:
        raise NotConvergedError(f"{fit.link_name} fit did not converge")
    if strict and not plug.ll_tilde_defined:
        raise UndefinedPluginLikelihoodError(f"max p~ = {plug.max_p_tilde:.6g} >= 1, plug-in likelihood undefined")
    scale = 10 * (link.c0 + 1) * plug.eps0
    diff = fit.alpha_hat - plug.alpha_tilde
    sup_err = float(np.max(np.abs(diff)))
    l2_err = float(np.linalg.norm(diff))

    # |p̂/p̃ − 1| = |expm1(log p̂ − log p̃)|, log p̃ = α̃_i + α̃_j
    p_rel = 0.0
    for b in pair_blocks(None, link, fit.alpha_hat, g.n):
        tilde = plug.alpha_tilde[b.start : b.stop, None] + plug.alpha_tilde[None, :]
        rel = np.abs(np.expm1(b.log_p - tilde))
        p_rel = max(p_rel, float(np.max(np.where(b.upper, rel, 0.0))))

    ll_rel = None
    if plug.ll_tilde_defined and plug.ll_tilde != 0:
        ll_rel = abs(fit.ll_hat - plug.ll_tilde) / abs(plug.ll_tilde)
    return ErrorReport(
        sup_err=sup_err,
        l2_err=l2_err,
        scaled_sup=sup_err / scale,
        scaled_l2=l2_err / (math.sqrt(g.n) * scale),
        per_node_scaled=diff / scale,
        degrees=np.asarray(plug.degrees),
        p_rel_max=p_rel,
        ll_hat=fit.ll_hat,
        ll_tilde=plug.ll_tilde,
        ll_rel=ll_rel,
    )


def check_bounds(cert: Certificate, rep: ErrorReport) -> BoundVerdict:
    ll_ok = None if rep.ll_rel is None else rep.ll_rel <= cert.C2 * cert.eps0
    return BoundVerdict(
        alpha_ok=rep.sup_err <= cert.C * cert.eps0,
        p_ok=rep.p_rel_max <= cert.C1 * cert.eps0,
        ll_ok=ll_ok,
        guaranteed=cert.applies,
    )


# =============================
# Proof-chain spot checks
# =============================
def hessian_relative_error(g: Graph, link: LinkSpec, cap: int = DENSE_CAP) -> float:
    """‖H⁻¹(∇²ℓ(α̃) − H)‖∞ at the plug-in point."""
    require_no_isolated(g)
    alpha_tilde = plugin_alpha(g.degrees, g.total_degree)
    exact = hessian(g, link, alpha_tilde, HessianMode.DENSE, cap=cap).dense()
    approx = hessian(g, link, alpha_tilde, HessianMode.STRUCTURED)
    d = np.asarray(g.degrees, dtype=float)
    diff = exact - approx.dense()
    # H⁻¹ M = −D⁻¹M + 1(1ᵀM)/(2X₊₊)
    rel = -diff / d[:, None] + diff.sum(axis=0)[None, :] / (2.0 * g.total_degree)
    return float(np.max(np.abs(rel).sum(axis=1)))


def first_step_norm(g: Graph, link: LinkSpec, cap: int = DENSE_CAP) -> float:
    """‖x₁ − x₀‖∞ for the undamped Newton step from x₀ = α̃."""
    require_no_isolated(g)
    alpha_tilde = plugin_alpha(g.degrees, g.total_degree)
    exact = hessian(g, link, alpha_tilde, HessianMode.DENSE, cap=cap).dense()
    step = scipy.linalg.solve(exact, gradient(g, link, alpha_tilde), assume_a="sym")
    return float(np.max(np.abs(step)))
