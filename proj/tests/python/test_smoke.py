"""Smoke tests for the gtnet extension module."""

import json

import numpy as np
import pytest

gtnet = pytest.importorskip("gtnet")


def test_tucker_product_matches_kronecker_vectorization():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((2, 3, 2))
    b1 = rng.standard_normal((4, 2))
    b2 = rng.standard_normal((2, 3))
    b3 = rng.standard_normal((3, 2))
    out = gtnet.tucker_product(a, [(1, b1), (2, b2), (3, b3)])
    big = np.kron(np.kron(b1, b2), b3)
    np.testing.assert_allclose(out.ravel(), big @ a.ravel(), atol=1e-12)


def test_contract_matches_einsum():
    rng = np.random.default_rng(2)
    a = rng.standard_normal((2, 3, 4))
    b = rng.standard_normal((3, 5))
    out = gtnet.contract(a, 2, b, 1)
    np.testing.assert_allclose(out, np.einsum("ikl,km->ilm", a, b), atol=1e-13)


def test_mode_n_product_shapes_and_values():
    rng = np.random.default_rng(3)
    a = rng.standard_normal((3, 4, 5))
    b = rng.standard_normal((7, 4))
    out = gtnet.mode_n_product(a, 2, b)
    assert out.shape == (3, 7, 5)
    np.testing.assert_allclose(out, np.einsum("jk,ikl->ijl", b, a), atol=1e-13)


def test_compression_counts_match_the_reference_configuration():
    rows = [2] * 8
    cols = [2] * 8
    assert gtnet.dense_param_count(rows, cols) == 65536
    assert gtnet.tt_param_count(rows, cols, [2] * 7) == 112


def test_tt_round_trip_and_matrix_free_apply():
    rng = np.random.default_rng(4)
    w = rng.standard_normal((8, 8))
    op, err = gtnet.tt_from_matrix(w, [2, 2, 2], [2, 2, 2])
    assert err < 1e-8
    np.testing.assert_allclose(op.reconstruct(), w, atol=1e-10)
    x = rng.standard_normal((2, 2, 2))
    np.testing.assert_allclose(op.apply(x).ravel(), w @ x.ravel(), atol=1e-10)
    assert op.param_count() == sum(c.size for c in op.cores)


def test_circulant_shift_is_a_circular_convolution():
    kernel = np.array([1.0, 2.0, 3.0])
    s = gtnet.gso_circulant(kernel, 8)
    x = np.arange(8.0)
    direct = np.array([sum(kernel[p] * x[(i + p) % 8] for p in range(3)) for i in range(8)])
    np.testing.assert_allclose(s @ x, direct, atol=0)


def test_gcn_forward_equals_the_tucker_route():
    rng = np.random.default_rng(5)
    a = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    x = rng.standard_normal((3, 2))
    w = rng.standard_normal((2, 4))
    direct = gtnet.gcn_forward(x, a, w)
    s = gtnet.gso_gcn(a)
    via_gtn = gtnet.gtn_forward(x, 1, 1, [s], [w.T])
    np.testing.assert_allclose(direct, via_gtn, atol=1e-12)


def test_attention_rows_are_distributions():
    rng = np.random.default_rng(6)
    x = rng.standard_normal((5, 3))
    wq = rng.standard_normal((3, 2))
    wk = rng.standard_normal((3, 2))
    s = gtnet.gso_attention(x, wq, wk, 2.0)
    np.testing.assert_allclose(s.sum(axis=1), np.ones(5), atol=1e-12)
    assert (s > 0).all()


def test_rnn_closed_form_tracks_the_recurrence():
    rng = np.random.default_rng(7)
    q, _ = np.linalg.qr(rng.standard_normal((3, 2)))
    w1 = q @ q.T
    wx = rng.standard_normal((3, 2))
    x = rng.standard_normal((5, 2))
    closed = gtnet.rnn_closed_form(x, w1, wx, 0.7)
    unrolled = gtnet.rnn_unrolled(x, 0.7 * w1, wx)
    np.testing.assert_allclose(closed, unrolled, atol=1e-8)


def test_equivalence_suite_passes():
    for report in gtnet.run_equivalence_suite(123):
        assert report["pass"], report


def test_experiment_runs_deterministically():
    config = json.dumps(
        {
            "data": {"synthetic": {"graph_family": "ring", "n_samples": 20}},
            "training": {"steps": 15},
            "seed": 3,
        }
    )
    a = gtnet.run_experiment(config)
    b = gtnet.run_experiment(config)
    assert a["metric"] == b["metric"]
    assert a["loss_curve"] == b["loss_curve"]
    assert a["trainable_params"] == 329


def test_shape_errors_raise_value_error():
    with pytest.raises(ValueError):
        gtnet.contract(np.zeros((2, 3)), 2, np.zeros((2, 2)), 1)
