from __future__ import annotations

import math

import numpy as np
import pytest

from errors import CapExceededError, IsolatedNodeError, LinkDomainError
from graph_core import parse_edge_list
from likelihood import (
    apply_H_inverse,
    expected_degrees,
    f_terms,
    gradient,
    hessian,
    log_lik,
    poisson_log_lik,
    poisson_score_at_plugin,
    scaled_score_norm,
)
from link_family import link_by_name, link_log, link_logit
from model import Graph, HessianMode

ALL_LINKS = ["log", "cloglog", "logit"]
P3 = "a b\nb c\n"
C4 = "a b\nb c\nc d\nd a\n"


def _random_graph(rng: np.random.Generator, n: int, density: float) -> Graph:
    edges = {(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < density}
    touched = {v for e in edges for v in e}
    for i in range(n):
        if i not in touched:
            j = int(rng.integers(n - 1))
            j = j if j < i else j + 1
            edges.add((min(i, j), max(i, j)))
            touched.update((i, j))
    return Graph.from_edges([str(k) for k in range(n)], sorted(edges))


def _fd_gradient(g, link, alpha, h=1e-5):
    out = np.zeros_like(alpha)
    for k in range(alpha.size):
        e = np.zeros_like(alpha)
        e[k] = h
        out[k] = (log_lik(g, link, alpha + e) - log_lik(g, link, alpha - e)) / (2 * h)
    return out


def _fd_hessian(g, link, alpha, h=1e-5):
    cols = []
    for k in range(alpha.size):
        e = np.zeros_like(alpha)
        e[k] = h
        cols.append((gradient(g, link, alpha + e) - gradient(g, link, alpha - e)) / (2 * h))
    return np.column_stack(cols)


def test_log_lik_path_at_plugin_point():
    g = parse_edge_list(P3)
    alpha = np.array([-math.log(2), 0.0, -math.log(2)])
    assert log_lik(g, link_log(), alpha) == pytest.approx(2 * math.log(0.5) + math.log(0.75), rel=1e-14)
    assert log_lik(g, link_log(), alpha) == pytest.approx(-1.67397, abs=1e-5)


def test_log_lik_logit_at_zero_is_half_everywhere():
    g = parse_edge_list("1 2\n2 3\n3 4\n4 5\n1 5\n2 5\n")
    assert log_lik(g, link_logit(), np.zeros(5)) == pytest.approx(10 * math.log(0.5), rel=1e-14)


def test_log_lik_cycle_at_symmetric_logit_optimum():
    g = parse_edge_list(C4)
    alpha = np.full(4, 0.5 * math.log(2))
    expected = 4 * math.log(2 / 3) + 2 * math.log(1 / 3)
    assert log_lik(g, link_logit(), alpha) == pytest.approx(expected, rel=1e-13)
    assert expected == pytest.approx(-3.81908, abs=1e-5)


def test_log_lik_log_link_rejects_infeasible_predictor():
    g = parse_edge_list(P3)
    with pytest.raises(LinkDomainError):
        log_lik(g, link_log(), np.array([0.0, 0.1, 0.0]))


def test_log_lik_repeated_evaluation_is_bit_identical():
    rng = np.random.default_rng(5)
    g = _random_graph(rng, 300, 0.02)
    alpha = rng.uniform(-4, -2, size=g.n)
    link = link_by_name("cloglog")
    assert log_lik(g, link, alpha) == log_lik(g, link, alpha)
    assert np.array_equal(gradient(g, link, alpha), gradient(g, link, alpha))


@pytest.mark.parametrize(
    "name, value",
    [("log", 0.5 * math.log(2 / 3)), ("logit", 0.5 * math.log(2))],
)
def test_gradient_vanishes_at_symmetric_cycle_optimum(name, value):
    g = parse_edge_list(C4)
    grad = gradient(g, link_by_name(name), np.full(4, value))
    np.testing.assert_allclose(grad, 0.0, atol=1e-12)


def test_log_link_gradient_equals_direct_bernoulli_score():
    rng = np.random.default_rng(11)
    g = _random_graph(rng, 7, 0.4)
    alpha = rng.uniform(-3, -0.5, size=7)
    x = np.zeros((7, 7))
    for i, nbrs in enumerate(g.adjacency):
        x[i, list(nbrs)] = 1
    p = np.exp(alpha[:, None] + alpha[None, :])
    direct = x - (1 - x) * p / (1 - p)
    np.fill_diagonal(direct, 0.0)
    np.testing.assert_allclose(gradient(g, link_log(), alpha), direct.sum(axis=1), rtol=1e-13, atol=1e-14)


def test_f_terms_for_log_link():
    p = math.exp(-1.2)
    f, fbar = f_terms(link_log(), -0.4, -0.8)
    assert float(f) == pytest.approx(p / (1 - p), rel=1e-14)
    assert float(fbar) == pytest.approx(-p / (1 - p), rel=1e-14)


def test_f_terms_vanish_for_logit():
    f, _ = f_terms(link_logit(), np.array([-2.0, 0.3]), np.array([-1.0, 0.4]))
    np.testing.assert_allclose(f, 0.0, atol=1e-15)


@pytest.mark.parametrize("name", ALL_LINKS)
def test_gradient_matches_finite_differences(name):
    link = link_by_name(name)
    rng = np.random.default_rng(100)
    for _ in range(50):
        n = int(rng.integers(3, 9))
        g = _random_graph(rng, n, float(rng.uniform(0.2, 0.8)))
        alpha = rng.uniform(-3.0, -0.5, size=n)
        np.testing.assert_allclose(gradient(g, link, alpha), _fd_gradient(g, link, alpha), rtol=1e-6, atol=1e-7)


@pytest.mark.parametrize("name", ALL_LINKS)
def test_dense_hessian_matches_finite_differences(name):
    link = link_by_name(name)
    rng = np.random.default_rng(200)
    for _ in range(50):
        n = int(rng.integers(3, 9))
        g = _random_graph(rng, n, float(rng.uniform(0.2, 0.8)))
        alpha = rng.uniform(-3.0, -0.5, size=n)
        dense = hessian(g, link, alpha).dense()
        np.testing.assert_allclose(dense, dense.T, rtol=0, atol=1e-12)
        np.testing.assert_allclose(dense, _fd_hessian(g, link, alpha), rtol=1e-5, atol=1e-7)


def test_dense_hessian_respects_cap():
    g = parse_edge_list(C4)
    with pytest.raises(CapExceededError):
        hessian(g, link_logit(), np.zeros(4), HessianMode.DENSE, cap=3)


def test_structured_hessian_for_path():
    g = parse_edge_list(P3)
    h = hessian(g, link_logit(), None, HessianMode.STRUCTURED).dense()
    assert h[0][1] == pytest.approx(-0.5)
    assert h[0][0] == pytest.approx(-1.25)
    assert np.all(np.linalg.eigvalsh(h) < 0)


def test_structured_hessian_ignores_alpha():
    g = parse_edge_list(C4)
    a = hessian(g, link_logit(), np.zeros(4), HessianMode.STRUCTURED).dense()
    b = hessian(g, link_logit(), np.full(4, -3.0), HessianMode.STRUCTURED).dense()
    assert np.array_equal(a, b)


def test_apply_H_inverse_path_examples():
    g = parse_edge_list(P3)
    np.testing.assert_allclose(apply_H_inverse(g, [1.0, 0.0, 0.0]), [-0.875, 0.125, 0.125], rtol=1e-15)
    assert apply_H_inverse(g, np.zeros(3)).tolist() == [0.0, 0.0, 0.0]


def test_apply_H_inverse_is_two_sided_inverse():
    rng = np.random.default_rng(3)
    for _ in range(20):
        n = int(rng.integers(3, 9))
        g = _random_graph(rng, n, 0.5)
        h = hessian(g, link_logit(), None, HessianMode.STRUCTURED).dense()
        v = rng.normal(size=n)
        np.testing.assert_allclose(h @ apply_H_inverse(g, v), v, atol=1e-10)
        np.testing.assert_allclose(apply_H_inverse(g, h @ v), v, atol=1e-10)
        np.testing.assert_allclose(apply_H_inverse(g, v), np.linalg.solve(h, v), rtol=1e-12, atol=1e-14)


def test_apply_H_inverse_rejects_isolated_nodes():
    g = Graph.from_edges(["a", "b", "c"], [(0, 1)])
    with pytest.raises(IsolatedNodeError):
        apply_H_inverse(g, np.ones(3))


def test_poisson_score_examples():
    np.testing.assert_allclose(poisson_score_at_plugin(parse_edge_list(P3)), [0.25, 1.0, 0.25], rtol=1e-12)
    np.testing.assert_allclose(poisson_score_at_plugin(parse_edge_list("a b\nb c\nc a\n")), [2 / 3] * 3, rtol=1e-12)


def test_poisson_score_identity_on_random_graphs():
    rng = np.random.default_rng(2024)
    for _ in range(100):
        n = int(rng.integers(3, 51))
        g = _random_graph(rng, n, float(rng.uniform(0.02, 0.9)))
        d = g.degrees.astype(float)
        np.testing.assert_allclose(poisson_score_at_plugin(g), d * d / g.total_degree, rtol=1e-12)


def test_poisson_log_lik_slope_at_plugin_matches_score():
    rng = np.random.default_rng(8)
    g = _random_graph(rng, 12, 0.3)
    d = g.degrees.astype(float)
    alpha = np.log(d) - 0.5 * math.log(g.total_degree)
    h = 1e-6
    slope = [
        (poisson_log_lik(g, alpha + h * e) - poisson_log_lik(g, alpha - h * e)) / (2 * h)
        for e in np.eye(g.n)
    ]
    np.testing.assert_allclose(slope, poisson_score_at_plugin(g), rtol=1e-6, atol=1e-8)


def test_expected_degrees_logit_at_zero():
    np.testing.assert_allclose(expected_degrees(link_logit(), np.zeros(6)), 2.5, rtol=1e-15)


def test_scaled_score_norm_is_zero_at_optimum():
    g = parse_edge_list(C4)
    assert scaled_score_norm(g, link_logit(), np.full(4, 0.5 * math.log(2))) < 1e-12
