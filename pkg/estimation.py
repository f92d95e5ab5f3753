#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Plug-in estimator, Newton MLE, samplers and the brute-force oracle.

정책:
- 시작점은 항상 α̃. log 링크에서 α̃_i + α̃_j ≥ 0 인 쌍이 있으면
  공통 상수만큼 이동해 최대 예측자를 LOG_LINK_MAX_PREDICTOR 로 맞춤
- n ≤ dense_cap: exact Newton, 그 외: 구조화된 H 를 고정 전처리기로 사용
- 수렴 판정은 ‖D⁻¹∇ℓ‖∞ ≤ tolerance
- MLE 가 없으면 값을 잘라내지 않고 MleDivergedError
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from config import (
    CALIBRATION_BRACKET,
    LOG_LINK_MAX_PREDICTOR,
    ORACLE_BOX,
    ORACLE_EDGE_MARGIN,
    ORACLE_MAX_N,
    ORACLE_MAX_SWEEPS,
    ORACLE_SWEEP_TOLERANCE,
    ORACLE_TOLERANCE,
    PLATEAU_RTOL,
    SAMPLE_WEIGHT_SPREAD,
)
from errors import (
    BoundaryEscapeError,
    InfeasibleTargetError,
    LineSearchFailedError,
    LinkDomainError,
    MleDivergedError,
    NotConvergedError,
    NullModelError,
)
from graph_core import require_no_isolated, sparsity_stats
from likelihood import expected_degrees, gradient, hessian, log_lik
from link_family import LinkSpec, edge_prob, link_log
from model import (
    EdgeProb,
    FitOptions,
    FitResult,
    Graph,
    HessianMode,
    IterationRecord,
    PluginEstimate,
    SolverChoice,
    SolverKind,
)

logger = logging.getLogger(__name__)


# =============================
# Plug-in
# =============================
def plugin_alpha(degrees: np.ndarray, total_degree: int) -> np.ndarray:
    """α̃_i = log X_{i+} − ½ log X₊₊."""
    return np.log(np.asarray(degrees, dtype=float)) - 0.5 * math.log(total_degree)


def plugin_estimate(g: Graph) -> PluginEstimate:
    require_no_isolated(g)
    stats = sparsity_stats(g)
    alpha_tilde = plugin_alpha(stats.degrees, stats.total_degree)
    top = np.sort(stats.degrees)[::-1]
    max_p = float(top[0]) * float(top[1]) / stats.total_degree if g.n > 1 else 0.0
    ll_tilde = log_lik(g, link_log(), alpha_tilde) if max_p < 1.0 else None
    return PluginEstimate(
        alpha_tilde=alpha_tilde,
        degrees=stats.degrees,
        total_degree=stats.total_degree,
        eps0=stats.eps0,
        max_p_tilde=max_p,
        ll_tilde=ll_tilde,
    )


# =============================
# Existence
# =============================
def degree_sequence_interior(degrees: Sequence[int]) -> Tuple[bool, str]:
    """Is the degree sequence strictly inside the polytope of graphical sequences?

    Σ_S d − Σ_T d < |S|(n − 1 − |T|) must hold for all disjoint S ≠ ∅, T;
    for each size pair the largest degrees in S and smallest in T are worst.
    """
    d = sorted((int(x) for x in degrees), reverse=True)
    n = len(d)
    if n < 2:
        return False, "fewer than two nodes"
    if d[0] >= n - 1:
        return False, "node of maximal degree"
    if d[-1] <= 0:
        return False, "isolated node"
    top = np.concatenate([[0], np.cumsum(d)])
    bottom = np.concatenate([[0], np.cumsum(d[::-1])])
    for s in range(1, n + 1):
        t = np.arange(0, n - s + 1)
        hit = np.flatnonzero(top[s] - bottom[t] >= s * (n - 1 - t))
        if hit.size:
            return False, f"degree sequence on the polytope boundary (|S|={s}, |T|={int(t[hit[0]])})"
    return True, ""


# =============================
# Newton fit
# =============================
def _max_pair_predictor(alpha: np.ndarray) -> float:
    top = np.sort(alpha)[::-1]
    return float(top[0] + top[1])


def _start_point(alpha_tilde: np.ndarray, link: LinkSpec) -> Tuple[np.ndarray, float]:
    x0 = alpha_tilde.copy()
    if link.bounded or x0.shape[0] < 2:
        return x0, 0.0
    peak = _max_pair_predictor(x0)
    if peak < LOG_LINK_MAX_PREDICTOR:
        return x0, 0.0
    shift = 0.5 * (LOG_LINK_MAX_PREDICTOR - peak)
    return x0 + shift, shift


def _resolve_solver(g: Graph, opts: FitOptions) -> SolverKind:
    if opts.solver is SolverChoice.EXACT:
        return SolverKind.EXACT_NEWTON
    if opts.solver is SolverChoice.PRECOND:
        return SolverKind.H_PRECONDITIONED
    return SolverKind.EXACT_NEWTON if g.n <= opts.dense_cap else SolverKind.H_PRECONDITIONED


def _try_log_lik(g: Graph, link: LinkSpec, alpha: np.ndarray) -> Optional[float]:
    try:
        value = log_lik(g, link, alpha)
    except LinkDomainError:
        return None
    return value if math.isfinite(value) else None


def fit_mle(g: Graph, link: LinkSpec, opts: Optional[FitOptions] = None) -> FitResult:
    opts = opts or FitOptions()
    require_no_isolated(g)
    if opts.check_existence:
        ok, reason = degree_sequence_interior(g.degrees)
        if not ok:
            logger.info("%s fit refused: %s", link.name, reason)
            raise MleDivergedError(reason)

    degrees = np.asarray(g.degrees, dtype=float)
    x, shift = _start_point(plugin_alpha(g.degrees, g.total_degree), link)
    solver = _resolve_solver(g, opts)
    structured = hessian(g, link, x, HessianMode.STRUCTURED) if solver is SolverKind.H_PRECONDITIONED else None

    ll = log_lik(g, link, x)
    start_norm = float(np.max(np.abs(x)))
    trace: List[IterationRecord] = []
    iterates: Optional[List[np.ndarray]] = [x.copy()] if opts.keep_iterates else None
    converged = False
    score = math.inf
    iteration = 0

    for iteration in range(opts.max_iterations + 1):
        grad = gradient(g, link, x)
        score = float(np.max(np.abs(grad / degrees)))
        if score <= opts.tolerance:
            converged = True
            break
        if iteration == opts.max_iterations:
            break

        hess = structured if structured is not None else hessian(g, link, x, HessianMode.DENSE, cap=opts.dense_cap)
        try:
            direction = -hess.solve(grad)
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as exc:
            raise MleDivergedError(f"singular Hessian at iteration {iteration + 1}") from exc

        step = 1.0
        accepted = None
        for halvings in range(opts.max_halvings + 1):
            candidate = x + step * direction
            value = _try_log_lik(g, link, candidate)
            if value is not None:
                if opts.max_halvings == 0 or value > ll:
                    accepted = (candidate, value)
                    break
                if abs(value - ll) <= PLATEAU_RTOL * max(1.0, abs(ll)):
                    cand_score = float(np.max(np.abs(gradient(g, link, candidate) / degrees)))
                    if cand_score < score:
                        accepted = (candidate, value)
                        break
            step *= opts.contraction
        if accepted is None:
            raise LineSearchFailedError(iteration + 1, opts.max_halvings)

        step_norm = float(np.max(np.abs(accepted[0] - x)))
        x, ll = accepted
        trace.append(IterationRecord(iteration + 1, ll, score, step_norm, halvings))
        if iterates is not None:
            iterates.append(x.copy())
        logger.debug(
            "%s it=%d score=%.3e step=%.3e halvings=%d ll=%.12g",
            link.name, iteration + 1, score, step_norm, halvings, ll,
        )
        if float(np.max(np.abs(x))) > opts.divergence_cap:
            logger.info("%s fit diverged at iteration %d", link.name, iteration + 1)
            raise MleDivergedError(f"|alpha| exceeded {opts.divergence_cap:g} at iteration {iteration + 1}")

    if not converged and float(np.max(np.abs(x))) > start_norm + 1.0:
        raise MleDivergedError(f"no convergence in {opts.max_iterations} iterations with growing |alpha|")
    if converged:
        logger.info("%s fit converged in %d iterations (%s)", link.name, iteration, solver.value)
    else:
        logger.info("%s fit stopped after %d iterations, score %.3e", link.name, iteration, score)

    return FitResult(
        alpha_hat=x,
        converged=converged,
        iterations=len(trace),
        final_score_norm=score,
        ll_hat=ll,
        solver=solver,
        link_name=link.name,
        trace=trace,
        iterates=iterates,
        start_shift=shift,
    )


def fitted_prob(fit: FitResult, link: LinkSpec, i: int, j: int) -> EdgeProb:
    if not fit.converged:
        raise NotConvergedError("fit did not converge")
    if i == j:
        raise NullModelError(f"self-pair ({i}, {i}) has no edge probability")
    return edge_prob(link, float(fit.alpha_hat[i]), float(fit.alpha_hat[j]))


# =============================
# Sampling
# =============================
def sample_graph(alpha, link: LinkSpec, seed: int, labels: Optional[Sequence[str]] = None) -> Graph:
    """Bernoulli draw per pair, PCG64 stream consumed row-major over i < j."""
    alpha = np.asarray(alpha, dtype=float)
    n = alpha.shape[0]
    rng = np.random.default_rng(seed)
    edges: List[Tuple[int, int]] = []
    for i in range(n - 1):
        cols = np.arange(i + 1, n)
        lp = np.asarray(link.log_p(alpha[i], alpha[cols]), dtype=float)
        if not link.bounded and not np.all(lp < 0):
            raise LinkDomainError(f"{link.name} link: p >= 1 in row {i}")
        hits = cols[rng.random(cols.shape[0]) < np.exp(lp)]
        edges.extend((i, int(j)) for j in hits)
    names = [str(k) for k in range(n)] if labels is None else list(labels)
    return Graph.from_edges(names, edges)


def sample_degree_graph(degrees: Sequence[int], seed: int) -> Graph:
    """Erased configuration model: stub matching, then drop loops and repeats."""
    degrees = [int(d) for d in degrees]
    if sum(degrees) % 2:
        raise NullModelError("degree sum must be even")
    multi = nx.configuration_model(degrees, seed=seed)
    simple = nx.Graph(multi)
    simple.remove_edges_from(list(nx.selfloop_edges(simple)))
    edges = sorted((min(u, v), max(u, v)) for u, v in simple.edges())
    return Graph.from_edges([str(k) for k in range(len(degrees))], edges)


def calibrate_alpha(
    n: int,
    mean_degree: float,
    link: LinkSpec,
    spread: float = SAMPLE_WEIGHT_SPREAD,
) -> np.ndarray:
    """Log-spaced α shifted so the expected mean degree hits the target."""
    if n < 2:
        raise InfeasibleTargetError(f"need n >= 2, got {n}")
    if mean_degree < 1:
        raise InfeasibleTargetError(f"mean degree must be >= 1, got {mean_degree:g}")
    if mean_degree >= n - 1:
        raise InfeasibleTargetError(f"mean degree {mean_degree:g} is not below n - 1 = {n - 1}")
    base = np.linspace(0.0, math.log(spread), n)[::-1]

    def excess(c: float) -> float:
        return float(expected_degrees(link, base + c).mean()) - mean_degree

    lo, hi = CALIBRATION_BRACKET
    if not link.bounded:
        hi = min(hi, -0.5 * _max_pair_predictor(base) - 1e-12)
    if excess(hi) < 0:
        raise InfeasibleTargetError(f"{link.name} link cannot reach mean degree {mean_degree:g} with n = {n}")
    shift = brentq(excess, lo, hi, xtol=1e-12)
    return base + shift


# =============================
# Oracle
# =============================
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def _golden_max(fn, lo: float, hi: float, tol: float) -> float:
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = fn(c), fn(d)
    while b - a > tol:
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = fn(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = fn(d)
    return 0.5 * (a + b)


def brute_force_mle(g: Graph, link: LinkSpec) -> np.ndarray:
    """Coordinate-wise golden-section ascent of ℓ over the oracle box.

    Row objectives are summed in extended precision so the sweep can
    resolve coordinate moves well below the float64 flat-top width.
    """
    if g.n > ORACLE_MAX_N:
        raise NullModelError(f"oracle supports n <= {ORACLE_MAX_N}, got {g.n}")
    require_no_isolated(g)
    lo, hi = ORACLE_BOX
    n = g.n
    x_mat = np.zeros((n, n), dtype=bool)
    for i, nbrs in enumerate(g.adjacency):
        x_mat[i, list(nbrs)] = True
    alpha, _ = _start_point(plugin_alpha(g.degrees, g.total_degree), link)
    alpha = np.clip(alpha, lo, hi).astype(np.longdouble)

    def row_objective(k: int, value: float) -> float:
        others = np.delete(np.arange(n), k)
        ak = np.longdouble(value)
        aj = alpha[others]
        lp = link.log_p(ak, aj)
        if not link.bounded and np.any(lp >= 0):
            return -math.inf
        l1 = link.log1m_p(ak, aj)
        return np.sum(np.where(x_mat[k, others], lp, l1))

    upper = np.full(n, hi)
    for sweep in range(ORACLE_MAX_SWEEPS):
        moved = 0.0
        for k in range(n):
            top = hi
            if not link.bounded:
                top = min(hi, float(-np.max(np.delete(alpha, k))) - 1e-12)
            upper[k] = top
            new = _golden_max(lambda v: row_objective(k, v), lo, top, ORACLE_TOLERANCE)
            moved = max(moved, abs(new - float(alpha[k])))
            alpha[k] = new
        if moved < ORACLE_SWEEP_TOLERANCE:
            break
    else:
        logger.info("oracle stopped after %d sweeps", ORACLE_MAX_SWEEPS)

    result = alpha.astype(np.float64)
    for k in range(n):
        if result[k] - lo < ORACLE_EDGE_MARGIN or upper[k] - result[k] < ORACLE_EDGE_MARGIN:
            raise BoundaryEscapeError(k, float(result[k]))
    return result
