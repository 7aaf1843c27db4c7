import numpy as np
import pytest

from semrd import BinarySourceSpec, DistortionSpec


@pytest.fixture
def binary_source_q09():
    return BinarySourceSpec.symmetric(0.9).joint_source()


@pytest.fixture
def tv_hamming():
    return DistortionSpec.from_names("tv", "hamming")


def random_source(rng, num_s, num_x):
    joint = rng.random((num_s, num_x)) + 0.05
    return joint / joint.sum()


def random_channel_rows(rng, num_x, num_y):
    rows = rng.random((num_x, num_y)) + 0.05
    return rows / rows.sum(axis=1, keepdims=True)


def np_assert_close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b} (tol {tol})"


np.seterr(all="ignore")
