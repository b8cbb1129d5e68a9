from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from erkirchhoff import ContractError
from erkirchhoff.graph import (
    INF,
    Graph,
    build_laplacian,
    complete_graph,
    connected_components,
    empty_graph,
    is_connected,
    path_graph,
    shortest_path_distances,
)
from erkirchhoff.spectral import (
    kirchhoff_index,
    operator_norm,
    pseudo_inverse,
    resistance_distance,
    resistance_matrix,
    symmetric_eigen,
    trace_pinv,
)

from oracles import dense_pinv_connected, exact_kirchhoff, exact_resistance, random_adjacency
from test_graph import graphs


def test_exact_oracle_frozen_values():
    # Frozen from the rational grounded-Laplacian oracle.
    assert exact_resistance(path_graph(2).adjacency, 0, 1) == 1
    assert exact_resistance(path_graph(3).adjacency, 0, 2) == 2
    assert exact_resistance(complete_graph(4).adjacency, 1, 3) == Fraction(1, 2)
    assert exact_kirchhoff(path_graph(3).adjacency) == 4
    assert exact_kirchhoff(complete_graph(4).adjacency) == 3


class TestSymmetricEigen:
    def test_two_by_two(self):
        s = symmetric_eigen([[1, -1], [-1, 1]])
        np.testing.assert_allclose(s.eigenvalues, [0, 2], atol=1e-15)
        assert s.zero_count == 1

    def test_identity(self):
        s = symmetric_eigen(np.eye(3))
        np.testing.assert_allclose(s.eigenvalues, [1, 1, 1])
        assert s.zero_count == 0

    def test_path3_against_characteristic_polynomial(self):
        lap = build_laplacian(path_graph(3))
        roots = np.sort(np.roots(np.poly(lap)).real)
        np.testing.assert_allclose(roots, [0, 1, 3], atol=1e-12)
        np.testing.assert_allclose(symmetric_eigen(lap).eigenvalues, roots, atol=1e-12)

    def test_rejects_non_symmetric(self):
        with pytest.raises(ContractError):
            symmetric_eigen([[0, 1], [0, 0]])
        with pytest.raises(ContractError):
            symmetric_eigen(np.ones((2, 3)))

    @settings(max_examples=50)
    @given(graphs(max_n=30))
    def test_reconstruction_and_residuals(self, g):
        lap = build_laplacian(g)
        s = symmetric_eigen(lap, eigenvectors=True)
        u, w = s.eigenvectors, s.eigenvalues
        scale = max(np.linalg.norm(lap, 2), 1.0)
        assert np.all(np.diff(w) >= 0)
        assert np.linalg.norm(u @ np.diag(w) @ u.T - lap, 2) <= 1e-9 * scale
        residuals = np.linalg.norm(lap @ u - u * w, axis=0)
        assert residuals.max() <= 1e-9 * scale
        assert s.zero_count == len(connected_components(g))
        assert np.all(w >= -s.zero_threshold)


class TestTracePinv:
    def test_examples(self):
        assert trace_pinv(build_laplacian(path_graph(2))) == pytest.approx(0.5, rel=1e-12)
        assert trace_pinv(build_laplacian(path_graph(3))) == pytest.approx(4 / 3, rel=1e-12)
        assert trace_pinv(build_laplacian(complete_graph(4))) == pytest.approx(0.75, rel=1e-12)
        assert trace_pinv(build_laplacian(empty_graph(5))) == 0.0

    @settings(max_examples=50)
    @given(graphs(max_n=15))
    def test_block_additivity(self, g):
        lap = build_laplacian(g)
        parts = sum(trace_pinv(lap[np.ix_(c, c)]) if len(c) > 1 else 0.0 for c in connected_components(g))
        assert trace_pinv(lap) == pytest.approx(parts, rel=1e-9, abs=1e-12)

    @settings(max_examples=50)
    @given(graphs(max_n=15), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, g, rnd):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        h = g.relabel(perm)
        assert trace_pinv(build_laplacian(h)) == pytest.approx(trace_pinv(build_laplacian(g)), rel=1e-9, abs=1e-12)
        assert kirchhoff_index(h) == pytest.approx(kirchhoff_index(g), rel=1e-9)

    def test_rayleigh_monotonicity(self):
        rng = np.random.default_rng(5)
        for _ in range(300):
            n = int(rng.integers(2, 20))
            g = Graph(random_adjacency(rng, n, rng.uniform(0.05, 0.6)))
            missing = [(i, j) for i, j in combinations(range(n), 2) if not g.adjacency[i, j]]
            if not missing:
                continue
            i, j = missing[rng.integers(len(missing))]
            before = trace_pinv(build_laplacian(g))
            after = trace_pinv(build_laplacian(g.with_edge(i, j)))
            if is_connected(g):
                assert after <= before * (1 + 1e-12)
            if is_connected(g.with_edge(i, j)) and not is_connected(g):
                # joining components: still bounded by the path maximum
                assert after <= (n * n - 1) / 6 + 1e-9


class TestPseudoInverse:
    def test_single_edge(self):
        np.testing.assert_allclose(pseudo_inverse(build_laplacian(path_graph(2))),
                                   [[0.25, -0.25], [-0.25, 0.25]], atol=1e-15)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(pseudo_inverse(np.zeros((3, 3))), np.zeros((3, 3)))

    def test_complete3_moore_penrose(self):
        lap = build_laplacian(complete_graph(3))
        pinv = pseudo_inverse(lap)
        np.testing.assert_allclose(lap @ pinv @ lap, lap, atol=1e-12)
        np.testing.assert_allclose(pinv, (np.eye(3) - 1 / 3) / 3, atol=1e-12)

    @settings(max_examples=50)
    @given(graphs(max_n=25))
    def test_invariants(self, g):
        lap = build_laplacian(g)
        pinv = pseudo_inverse(lap)
        scale = max(np.linalg.norm(lap, 2), 1.0)
        np.testing.assert_array_equal(pinv, pinv.T)
        assert np.linalg.norm(lap @ pinv @ lap - lap, 2) <= 1e-8 * scale
        assert np.linalg.norm(pinv @ lap @ pinv - pinv, 2) <= 1e-8 * scale
        np.testing.assert_allclose(pinv.sum(axis=1), 0, atol=1e-9)
        assert np.trace(pinv) == pytest.approx(trace_pinv(lap), rel=1e-10, abs=1e-12)
        if is_connected(g):
            np.testing.assert_allclose(pinv, dense_pinv_connected(lap), atol=1e-9)
        np.testing.assert_allclose(pinv, np.linalg.pinv(lap, hermitian=False), atol=1e-8)


class TestResistance:
    def test_examples(self):
        assert resistance_distance(pseudo_inverse(build_laplacian(path_graph(2))), 0, 1) == pytest.approx(1)
        assert resistance_distance(pseudo_inverse(build_laplacian(path_graph(3))), 0, 2) == pytest.approx(2)
        pinv = pseudo_inverse(build_laplacian(complete_graph(4)))
        for i, j in combinations(range(4), 2):
            assert resistance_distance(pinv, i, j) == pytest.approx(0.5)

    def test_same_node_and_range(self):
        pinv = pseudo_inverse(build_laplacian(path_graph(3)))
        assert resistance_distance(pinv, 1, 1) == 0
        with pytest.raises(ContractError):
            resistance_distance(pinv, 0, 3)

    def test_against_exact_oracle(self):
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 25:
            n = int(rng.integers(2, 9))
            g = Graph(random_adjacency(rng, n, 0.5))
            if not is_connected(g):
                continue
            pinv = pseudo_inverse(build_laplacian(g))
            for i, j in combinations(range(n), 2):
                assert resistance_distance(pinv, i, j) == pytest.approx(float(exact_resistance(g.adjacency, i, j)), rel=1e-10)
            assert kirchhoff_index(g) == pytest.approx(float(exact_kirchhoff(g.adjacency)), rel=1e-10)
            checked += 1

    @settings(max_examples=40)
    @given(graphs(max_n=15))
    def test_metric_and_domination(self, g):
        if not is_connected(g):
            return
        r = resistance_matrix(pseudo_inverse(build_laplacian(g)))
        sp = shortest_path_distances(g)
        tol = 1e-9
        np.testing.assert_allclose(r, r.T, atol=tol)
        off = ~np.eye(g.n, dtype=bool)
        assert np.all(r[off] > 0)
        assert np.all(r[:, None, :] <= r[:, :, None] + r[None, :, :] + tol)
        assert np.all(r <= sp + tol)


class TestKirchhoff:
    def test_examples(self):
        assert kirchhoff_index(path_graph(2)) == pytest.approx(1)
        assert kirchhoff_index(path_graph(3)) == pytest.approx(4)
        assert kirchhoff_index(empty_graph(2)) == INF

    @settings(max_examples=40)
    @given(graphs(max_n=20))
    def test_consistency(self, g):
        if not is_connected(g):
            assert kirchhoff_index(g) == INF
            return
        pinv = pseudo_inverse(build_laplacian(g))
        pair_sum = sum(resistance_distance(pinv, i, j) for i, j in combinations(range(g.n), 2))
        assert kirchhoff_index(g) == pytest.approx(pair_sum, rel=1e-8)


class TestOperatorNorm:
    def test_examples(self):
        assert operator_norm(np.eye(4)) == pytest.approx(1)
        assert operator_norm([[0, 1], [1, 0]]) == pytest.approx(1)
        assert operator_norm(build_laplacian(path_graph(3))) == pytest.approx(3)

    @settings(max_examples=30)
    @given(graphs(max_n=20))
    def test_matches_two_norm(self, g):
        lap = build_laplacian(g)
        assert operator_norm(lap) == pytest.approx(np.linalg.norm(lap, 2), rel=1e-10, abs=1e-12)
