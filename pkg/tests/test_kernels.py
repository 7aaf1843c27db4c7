"""The compiled and vectorized kernel twins must agree with the reference code."""

import math

import numpy as np
import pytest

from semrd import (
    Channel,
    Distribution,
    JointSource,
    SemanticMeasure,
    expected_observation_distortion,
    expected_semantic_distortion,
    mutual_information,
)
from semrd.distortion import ObservationMeasure
from semrd.kernels import BACKEND, eval_channels, eval_channels_numpy_path, ratio_products

GEN = SemanticMeasure.generic_f("tv_like", [[0.0, 0.5], [1.0, 0.0], [50.0, 24.5]])
MEASURES = [
    SemanticMeasure.tv(),
    SemanticMeasure.kl(),
    SemanticMeasure.chi2(),
    GEN,
]


def make_problem(rng, num_s, num_x, num_y):
    joint = rng.random((num_s, num_x)) + 0.05
    joint /= joint.sum()
    src = JointSource(joint)
    p_x = joint.sum(axis=0)
    post_x = np.stack([joint[:, x] / p_x[x] for x in range(num_x)])
    rows = rng.random((8, num_x, num_y)) + 0.02
    rows /= rows.sum(axis=2, keepdims=True)
    return src, joint, p_x, post_x, rows


@pytest.mark.parametrize("shape", [(2, 2, 2), (3, 2, 3), (2, 4, 3), (4, 3, 5)])
@pytest.mark.parametrize("measure", MEASURES, ids=[m.kind for m in MEASURES])
def test_backends_match_reference(shape, measure):
    rng = np.random.default_rng(hash(shape) % (2**32))
    src, joint, p_x, post_x, batch = make_problem(rng, *shape)
    cost = ObservationMeasure.hamming().cost_table(shape[1], shape[2])

    rates, dps, dos = eval_channels(joint, p_x, post_x, batch, measure.code, measure.gen_t, measure.gen_f, cost)
    r2, d2, o2 = eval_channels_numpy_path(joint, p_x, post_x, batch, measure.code, measure.gen_t, measure.gen_f, cost)
    assert np.allclose(rates, r2, atol=1e-12)
    assert np.allclose(dps, d2, atol=1e-12)
    assert np.allclose(dos, o2, atol=1e-12)

    px_dist = Distribution(p_x)
    for b in range(batch.shape[0]):
        ch = Channel(batch[b])
        assert rates[b] == pytest.approx(mutual_information(px_dist, ch), abs=1e-10)
        assert dps[b] == pytest.approx(expected_semantic_distortion(src, ch, measure), abs=1e-10)
        assert dos[b] == pytest.approx(
            expected_observation_distortion(src, ch, ObservationMeasure.hamming()), abs=1e-10
        )


def test_sparse_channels_with_dead_outputs():
    # channels with zero rows/columns exercise the 0 log 0 and p_Y=0 paths
    joint = np.array([[0.45, 0.05], [0.05, 0.45]])
    src = JointSource(joint)
    p_x = joint.sum(axis=0)
    post_x = np.stack([joint[:, x] / p_x[x] for x in range(2)])
    batch = np.array(
        [
            [[1.0, 0.0], [1.0, 0.0]],  # y=1 dead
            [[1.0, 0.0], [0.0, 1.0]],  # identity
            [[0.0, 1.0], [0.0, 1.0]],  # y=0 dead
        ]
    )
    cost = ObservationMeasure.hamming().cost_table(2, 2)
    for m in MEASURES:
        rates, dps, dos = eval_channels(joint, p_x, post_x, batch, m.code, m.gen_t, m.gen_f, cost)
        r2, d2, o2 = eval_channels_numpy_path(joint, p_x, post_x, batch, m.code, m.gen_t, m.gen_f, cost)
        assert np.allclose(rates, r2, atol=1e-12)
        assert np.allclose(dps, d2, atol=1e-12)
        assert np.allclose(dos, o2, atol=1e-12)
        assert rates[0] == pytest.approx(0.0, abs=1e-15)
        assert dps[1] == pytest.approx(0.0, abs=1e-15)
        for b in range(3):
            assert dps[b] == pytest.approx(expected_semantic_distortion(src, Channel(batch[b]), m), abs=1e-12)


def test_ratio_products_matches_manual():
    tab = np.array([[0.5, 2.0], [np.inf, 0.25]])
    x_seq = np.array([0, 1, 0])
    proposals = np.array([[0, 1, 1], [1, 0, 0], [0, 1, 0]])
    got = ratio_products(tab, x_seq, proposals)
    want = np.array(
        [
            0.5 * 0.25 * 2.0,
            2.0 * np.inf * 0.5,
            0.5 * 0.25 * 0.5,
        ]
    )
    assert got[0] == pytest.approx(want[0])
    assert math.isinf(got[1])
    assert got[2] == pytest.approx(want[2])


def test_backend_flag_exposed():
    assert BACKEND in ("numba", "numpy")
