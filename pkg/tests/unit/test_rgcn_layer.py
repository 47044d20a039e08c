"""Unit tests for the R-GCN layer: oracle agreement, symmetries and shapes."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from libs.graph_match.exceptions import ArgumentError, NumericError, ShapeError, StateError
from libs.graph_match.rgcn import (
    DecompositionMode,
    EdgeIndex,
    RgcnLayer,
    backward,
    count_parameters,
    message_passing_oracle,
    reconstruct_weight,
    rgcn_forward,
)
from tests.factories import random_edges, random_layer

pytestmark = pytest.mark.unit

MODES = list(DecompositionMode)


def _random_case(seed: int):
    """Graph with <= 10 nodes and <= 4 relations, layer of width <= 8, in a random mode."""
    rng = np.random.default_rng(seed)
    mode = MODES[seed % len(MODES)]
    num_nodes = int(rng.integers(1, 11))
    num_relations = int(rng.integers(1, 5))
    if mode is DecompositionMode.BLOCK:
        bases = int(rng.integers(1, 5))
        in_dim = bases * int(rng.integers(1, 8 // bases + 1))
        out_dim = bases * int(rng.integers(1, 8 // bases + 1))
    else:
        bases = int(rng.integers(1, 4))
        in_dim, out_dim = int(rng.integers(1, 9)), int(rng.integers(1, 9))
    layer = random_layer(rng, in_dim, out_dim, num_relations, mode, bases, activation=bool(rng.integers(2)))
    edges = random_edges(rng, num_nodes, num_relations, max_edges=3 * num_nodes)
    h = rng.normal(size=(num_nodes, in_dim))
    return layer, edges, h


class TestOracleAgreement:
    """Vectorized forward against the per-edge message-passing loop."""

    @pytest.mark.parametrize("block", range(4))
    def test_random_graphs(self, block):
        for seed in range(block * 60, (block + 1) * 60):
            layer, edges, h = _random_case(seed)

            np.testing.assert_allclose(
                layer.forward(edges, h), message_passing_oracle(layer, edges, h), rtol=0, atol=1e-6
            )

    def test_rgcn_forward_is_layer_forward(self):
        layer, edges, h = _random_case(7)

        np.testing.assert_array_equal(rgcn_forward(layer, edges, h), layer.forward(edges, h))


class TestMessagePassing:
    """Hand-sized cases of the propagation rule."""

    def test_isolated_node_gets_self_connection_only(self, rng):
        layer = random_layer(rng, 3, 2, 2, activation=False)
        edges = EdgeIndex.build(2, np.array([0]), np.array([1]), np.array([0]))
        h = rng.normal(size=(2, 3))

        out = layer.forward(edges, h)

        np.testing.assert_allclose(out[1], layer.params["self_weight"] @ h[1])

    def test_normalizer_counts_incoming_edges_per_relation(self, rng):
        layer = random_layer(rng, 2, 2, 1, DecompositionMode.FULL, activation=False)
        edges = EdgeIndex.build(3, np.array([0, 1]), np.array([0, 0]), np.array([2, 2]))
        h = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 0.0]])

        out = layer.forward(edges, h)

        w = layer.params["weights"][0]
        np.testing.assert_allclose(out[2], (w @ h[0] + w @ h[1]) / 2)

    def test_duplicate_edge_counts_twice(self, rng):
        layer = random_layer(rng, 2, 2, 1, DecompositionMode.FULL, activation=False)
        edges = EdgeIndex.build(3, np.array([0, 0, 1]), np.array([0, 0, 0]), np.array([2, 2, 2]))
        h = rng.normal(size=(3, 2))

        out = layer.forward(edges, h)

        w = layer.params["weights"][0]
        np.testing.assert_allclose(out[2], (2 * w @ h[0] + w @ h[1]) / 3 + layer.params["self_weight"] @ h[2])

    def test_no_edges(self, rng):
        layer = random_layer(rng, 3, 3, 2)
        edges = EdgeIndex.build(4, np.array([]), np.array([]), np.array([]))
        h = rng.normal(size=(4, 3))

        np.testing.assert_allclose(layer.forward(edges, h), np.maximum(h @ layer.params["self_weight"].T, 0))

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(min_value=0, max_value=2**31 - 1))
    def test_permutation_equivariant(self, seed):
        layer, edges, h = _random_case(seed)
        perm = np.random.default_rng(seed).permutation(edges.num_nodes)
        permuted_h = np.empty_like(h)
        permuted_h[perm] = h

        out = layer.forward(edges, h)
        permuted_out = layer.forward(edges.permuted(perm), permuted_h)

        np.testing.assert_allclose(permuted_out[perm], out, atol=1e-12)


class TestDegenerateLayers:
    """Closed-form outputs of trivially parameterized layers."""

    @pytest.mark.parametrize("mode", MODES)
    @pytest.mark.parametrize("activation", [True, False])
    def test_all_zero_weights_give_zero_output(self, rng, mode, activation):
        layer = random_layer(rng, 4, 6, 3, mode, 2, activation)
        layer.set_params({name: np.zeros(shape) for name, shape in layer.param_shapes().items()})
        edges = EdgeIndex.build(5, np.array([0, 1, 2, 4]), np.array([0, 1, 2, 0]), np.array([1, 2, 3, 4]))

        out = layer.forward(edges, rng.normal(size=(5, 4)))

        np.testing.assert_array_equal(out, np.zeros((5, 6)))

    def test_single_node_identity_self_weight(self):
        layer = RgcnLayer(2, 2, 1, DecompositionMode.BASIS, num_bases=1)
        layer.params["self_weight"] = np.eye(2)
        edges = EdgeIndex.build(1, np.array([]), np.array([]), np.array([]))

        out = layer.forward(edges, np.array([[1.0, -2.0]]))

        np.testing.assert_array_equal(out, [[1.0, 0.0]])


class TestDecomposition:
    """Weight materialization and the basis/unconstrained degeneracy."""

    def test_equal_coefficients_average_two_bases(self, rng):
        layer = random_layer(rng, 3, 4, 2, DecompositionMode.BASIS, 2)
        layer.params["coefficients"][1] = [0.5, 0.5]

        np.testing.assert_allclose(reconstruct_weight(layer, 1), layer.params["bases"].mean(axis=0), atol=1e-15)

    def test_basis_with_identity_coefficients_equals_full(self, rng):
        num_relations, in_dim, out_dim = 3, 4, 5
        basis = random_layer(rng, in_dim, out_dim, num_relations, DecompositionMode.BASIS, num_relations)
        basis.params["coefficients"][...] = np.eye(num_relations)
        full = random_layer(rng, in_dim, out_dim, num_relations, DecompositionMode.FULL)
        full.set_params({"weights": basis.params["bases"], "self_weight": basis.params["self_weight"]})
        edges = random_edges(rng, 8, num_relations, max_edges=20)
        h = rng.normal(size=(8, in_dim))

        for r in range(num_relations):
            np.testing.assert_array_equal(reconstruct_weight(basis, r), reconstruct_weight(full, r))
        np.testing.assert_array_equal(basis.forward(edges, h), full.forward(edges, h))

    def test_block_weight_is_block_diagonal(self, rng):
        layer = random_layer(rng, 4, 6, 2, DecompositionMode.BLOCK, 2)

        weight = layer.relation_weight(1)

        np.testing.assert_array_equal(weight[:3, :2], layer.params["blocks"][1, 0])
        np.testing.assert_array_equal(weight[3:, 2:], layer.params["blocks"][1, 1])
        assert not weight[:3, 2:].any()
        assert not weight[3:, :2].any()

    def test_block_needs_divisible_dims(self, rng):
        with pytest.raises(ShapeError):
            RgcnLayer(5, 6, 2, DecompositionMode.BLOCK, num_bases=2, rng=rng)

    @pytest.mark.parametrize(
        ("mode", "expected"),
        [
            (DecompositionMode.FULL, 5 * 24 + 24),
            (DecompositionMode.BASIS, 2 * 24 + 5 * 2 + 24),
            (DecompositionMode.BLOCK, 5 * 2 * 6 + 24),
        ],
    )
    def test_count_parameters(self, rng, mode, expected):
        layer = random_layer(rng, 4, 6, 5, mode, 2)

        assert count_parameters(layer) == expected
        assert count_parameters([layer, layer]) == 2 * expected
        assert sum(p.size for p in layer.params.values()) == expected


class TestErrors:
    """Invalid inputs and call order."""

    def test_relation_weight_out_of_range(self, rng):
        with pytest.raises(ArgumentError):
            random_layer(rng, 2, 2, 3).relation_weight(3)

    def test_edge_relation_exceeds_layer(self, rng):
        layer = random_layer(rng, 2, 2, 2)
        edges = EdgeIndex.build(2, np.array([0]), np.array([2]), np.array([1]))

        with pytest.raises(ShapeError):
            layer.forward(edges, np.ones((2, 2)))

    def test_feature_shape_checked(self, rng):
        layer = random_layer(rng, 3, 2, 1)
        edges = EdgeIndex.build(2, np.array([0]), np.array([0]), np.array([1]))

        with pytest.raises(ShapeError):
            layer.forward(edges, np.ones((2, 4)))

    def test_non_finite_features(self, rng):
        layer = random_layer(rng, 2, 2, 1)
        edges = EdgeIndex.build(2, np.array([0]), np.array([0]), np.array([1]))

        with pytest.raises(NumericError):
            layer.forward(edges, np.array([[np.nan, 0.0], [0.0, 0.0]]))

    def test_endpoint_out_of_range(self):
        with pytest.raises(ShapeError):
            EdgeIndex.build(2, np.array([0]), np.array([0]), np.array([2]))

    def test_backward_without_forward(self, rng):
        layer = random_layer(rng, 2, 2, 1)
        edges = EdgeIndex.build(2, np.array([0]), np.array([0]), np.array([1]))

        with pytest.raises(StateError):
            backward(layer, edges, np.ones((2, 2)), np.ones((2, 2)))

    def test_backward_with_other_inputs(self, rng):
        layer = random_layer(rng, 2, 2, 1)
        edges = EdgeIndex.build(2, np.array([0]), np.array([0]), np.array([1]))
        layer.forward(edges, np.ones((2, 2)))

        with pytest.raises(StateError):
            backward(layer, edges, np.zeros((2, 2)), np.ones((2, 2)))

    def test_set_params_rejects_wrong_names(self, rng):
        layer = random_layer(rng, 2, 2, 1, DecompositionMode.BASIS)

        with pytest.raises(ShapeError):
            layer.set_params({"weights": np.zeros((1, 2, 2)), "self_weight": np.zeros((2, 2))})
