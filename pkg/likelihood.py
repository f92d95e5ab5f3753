#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Bernoulli log-likelihood, score and Hessian for any link.

All pair sums run over fixed row blocks in ascending index order, so
repeated evaluations are bit-identical. 자기 자신과의 쌍(i = j)은 항상 제외.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Optional, Tuple

import numpy as np
import scipy.linalg

from config import DENSE_CAP, PAIR_BLOCK_ROWS
from errors import CapExceededError, IsolatedNodeError, LinkDomainError
from graph_core import require_no_isolated
from link_family import LinkSpec
from model import Graph, HessianMode


# =============================
# Pair blocks
# =============================
@dataclass
class _PairBlock:
    start: int
    stop: int
    ai: np.ndarray
    aj: np.ndarray
    x: np.ndarray
    offdiag: np.ndarray
    upper: np.ndarray
    log_p: np.ndarray
    log1m_p: np.ndarray


def pair_blocks(g: Optional[Graph], link: LinkSpec, alpha: np.ndarray, n: int) -> Iterator[_PairBlock]:
    cols = np.arange(n)
    for start in range(0, n, PAIR_BLOCK_ROWS):
        stop = min(n, start + PAIR_BLOCK_ROWS)
        rows = np.arange(start, stop)[:, None]
        ai = alpha[start:stop, None]
        aj = alpha[None, :]
        x = np.zeros((stop - start, n))
        if g is not None:
            for r, i in enumerate(range(start, stop)):
                nbrs = g.adjacency[i]
                if nbrs:
                    x[r, list(nbrs)] = 1.0
        offdiag = cols[None, :] != rows
        with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
            lp = np.asarray(link.log_p(ai, aj), dtype=float)
            l1 = np.asarray(link.log1m_p(ai, aj), dtype=float)
        if not link.bounded:
            bad = offdiag & ~(lp < 0)
            if bad.any():
                r, c = np.argwhere(bad)[0]
                raise LinkDomainError(
                    f"{link.name} link: p >= 1 for pair ({start + r}, {c}), predictor {ai[r, 0] + aj[0, c]:.6g}"
                )
        yield _PairBlock(start, stop, ai, aj, x, offdiag, cols[None, :] > rows, lp, l1)


def _as_alpha(alpha, n: int) -> np.ndarray:
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (n,):
        raise ValueError(f"alpha must have shape ({n},), got {alpha.shape}")
    return alpha


# =============================
# Likelihood
# =============================
def log_lik(g: Graph, link: LinkSpec, alpha) -> float:
    """Σ_{i<j} X_ij log p_ij + (1 − X_ij) log(1 − p_ij)."""
    alpha = _as_alpha(alpha, g.n)
    total = 0.0
    for b in pair_blocks(g, link, alpha, g.n):
        terms = np.where(b.x > 0, b.log_p, b.log1m_p)
        total += float(np.sum(np.where(b.upper, terms, 0.0)))
    return total


def f_terms(link: LinkSpec, ai, aj) -> Tuple[np.ndarray, np.ndarray]:
    """(f, f̄) for the pair; f = ∂ε + o(1 + ∂ε), f̄ = 1 − e^ε(1 + f), o = p/(1−p)."""
    ek = link.deps(ai, aj)
    with np.errstate(over="ignore"):
        odds = np.exp(link.log_p(ai, aj) - link.log1m_p(ai, aj))
    f = ek + odds * (1.0 + ek)
    fbar = 1.0 - np.exp(link.eps(ai, aj)) * (1.0 + f)
    return f, fbar


def gradient(g: Graph, link: LinkSpec, alpha) -> np.ndarray:
    alpha = _as_alpha(alpha, g.n)
    out = np.zeros(g.n)
    for b in pair_blocks(g, link, alpha, g.n):
        with np.errstate(over="ignore", invalid="ignore"):
            ea = np.exp(b.ai + b.aj)
            ek = link.deps(b.ai, b.aj)
            odds = np.exp(b.log_p - b.log1m_p)
            f = ek + odds * (1.0 + ek)
            fbar = 1.0 - np.exp(link.eps(b.ai, b.aj)) * (1.0 + f)
            terms = (b.x - ea) + b.x * f + ea * fbar
        out[b.start : b.stop] = np.where(b.offdiag, terms, 0.0).sum(axis=1)
    return out


def scaled_score_norm(g: Graph, link: LinkSpec, alpha) -> float:
    require_no_isolated(g)
    return float(np.max(np.abs(gradient(g, link, alpha) / g.degrees)))


def expected_degrees(link: LinkSpec, alpha) -> np.ndarray:
    """E(X_{i+}) = Σ_{j≠i} p_ij."""
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.shape[0]
    out = np.zeros(n)
    for b in pair_blocks(None, link, alpha, n):
        with np.errstate(invalid="ignore"):
            p = np.exp(b.log_p)
        out[b.start : b.stop] = np.where(b.offdiag, p, 0.0).sum(axis=1)
    return out


# =============================
# Hessian
# =============================
@dataclass(frozen=True, eq=False)
class HessianRep:
    mode: HessianMode
    degrees: np.ndarray
    total_degree: int
    matrix: Optional[np.ndarray] = None

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        d = self.degrees.astype(float)
        return -(np.diag(d) + np.outer(d, d) / self.total_degree)

    def solve(self, v) -> np.ndarray:
        """H⁻¹ v."""
        if self.mode is HessianMode.STRUCTURED:
            return _sherman_morrison(self.degrees, self.total_degree, v)
        return scipy.linalg.solve(self.matrix, np.asarray(v, dtype=float), assume_a="sym")


def _sherman_morrison(degrees: np.ndarray, total_degree: int, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    return -v / degrees + v.sum() / (2.0 * total_degree)


def hessian(
    g: Graph,
    link: LinkSpec,
    alpha,
    mode: HessianMode = HessianMode.DENSE,
    cap: int = DENSE_CAP,
) -> HessianRep:
    """Dense: exact ∇²ℓ(α). Structured: H = −(D + d dᵀ/X₊₊), independent of α."""
    if mode is HessianMode.STRUCTURED:
        return HessianRep(mode, np.asarray(g.degrees), g.total_degree)
    if g.n > cap:
        raise CapExceededError(g.n, cap)
    alpha = _as_alpha(alpha, g.n)
    out = np.zeros((g.n, g.n))
    for b in pair_blocks(g, link, alpha, g.n):
        with np.errstate(over="ignore", invalid="ignore"):
            ea = np.exp(b.ai + b.aj)
            ee = np.exp(link.eps(b.ai, b.aj))
            ek = link.deps(b.ai, b.aj)
            ej = link.deps(b.aj, b.ai)
            cross, same = link.d2eps(b.ai, b.aj)
            odds = np.exp(b.log_p - b.log1m_p)
            uk = 1.0 + ek
            uj = 1.0 + ej
            f = ek + odds * uk
            fbar = 1.0 - ee * (1.0 + f)
            dodds = odds * (1.0 + odds)
            df_j = cross + dodds * uj * uk + odds * cross
            df_k = same + dodds * uk * uk + odds * same
            dfbar_j = -ee * ej * (1.0 + f) - ee * df_j
            dfbar_k = -ee * ek * (1.0 + f) - ee * df_k
            off = -ea + b.x * df_j + ea * (fbar + dfbar_j)
            diag = -ea + b.x * df_k + ea * (fbar + dfbar_k)
        rows = np.arange(b.start, b.stop)
        out[b.start : b.stop, :] = np.where(b.offdiag, off, 0.0)
        out[rows, rows] = np.where(b.offdiag, diag, 0.0).sum(axis=1)
    out = 0.5 * (out + out.T)
    return HessianRep(HessianMode.DENSE, np.asarray(g.degrees), g.total_degree, out)


def apply_H_inverse(g: Graph, v) -> np.ndarray:
    """(−D⁻¹ + 11ᵀ/(2X₊₊)) v in O(n)."""
    degrees = np.asarray(g.degrees)
    if degrees.size and degrees.min() <= 0:
        raise IsolatedNodeError([g.labels[i] for i in np.flatnonzero(degrees <= 0)])
    return _sherman_morrison(degrees, g.total_degree, v)


# =============================
# Poisson approximation
# =============================
def poisson_log_lik(g: Graph, alpha) -> float:
    alpha = _as_alpha(alpha, g.n)
    e = np.exp(alpha)
    return float(alpha @ g.degrees - 0.5 * (e.sum() ** 2 - (e * e).sum()))


def poisson_score_at_plugin(g: Graph) -> np.ndarray:
    """X_{k+} − Σ_{j≠k} exp(α̃_k + α̃_j), which equals X_{k+}²/X₊₊."""
    require_no_isolated(g)
    d = np.asarray(g.degrees).astype(np.longdouble)
    x_pp = np.longdouble(g.total_degree)
    alpha_tilde = np.log(d) - np.log(x_pp) / 2
    e = np.exp(alpha_tilde)
    score = d - e * (e.sum() - e)
    expected = d * d / x_pp
    assert np.max(np.abs(score - expected) / expected) <= 1e-12, "Poisson score drifted from X_{k+}^2/X_{++}"
    return score.astype(np.float64)
