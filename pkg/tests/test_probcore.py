import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semrd import (
    Channel,
    Distribution,
    JointSource,
    RDPoint,
    binary_entropy,
    load_source_json,
    marginal_x,
    mutual_information,
    output_distribution,
    posterior_given_x,
    posterior_given_y,
)
from semrd.errors import (
    DimensionMismatch,
    DomainError,
    IndexOutOfRange,
    ZeroMassOutput,
    ZeroMassSymbol,
)

# frozen oracle values (30-digit evaluation of the defining formulas)
H2_011 = 0.4999159581645280
MI_W09_Z01 = 0.531004406410718779


def binary_joint(q, rho=0.5):
    return JointSource([[rho * q, rho * (1 - q)], [(1 - rho) * (1 - q), (1 - rho) * q]])


class TestDistribution:
    def test_renormalized_exactly_once(self):
        d = Distribution([0.5000000001, 0.4999999999])
        assert d.probs.sum() == 1.0

    def test_rejects_bad_sum(self):
        with pytest.raises(DomainError):
            Distribution([0.5, 0.6])

    def test_rejects_negative(self):
        with pytest.raises(DomainError):
            Distribution([1.1, -0.1])

    def test_rejects_nan(self):
        with pytest.raises(DomainError):
            Distribution([float("nan"), 1.0])

    def test_labels_length_checked(self):
        with pytest.raises(DimensionMismatch):
            Distribution([0.5, 0.5], labels=("a",))

    def test_immutable(self):
        d = Distribution([0.25, 0.75])
        with pytest.raises(ValueError):
            d.probs[0] = 1.0


class TestJointSource:
    def test_zero_mass_column_flagged(self):
        src = JointSource([[1.0, 0.0], [0.0, 0.0]])
        assert src.zero_mass_x == (1,)

    def test_full_support_unflagged(self, binary_source_q09):
        assert binary_source_q09.zero_mass_x == ()

    def test_shape_properties(self):
        src = JointSource(np.full((3, 2), 1 / 6))
        assert (src.num_s, src.num_x) == (3, 2)


class TestChannel:
    def test_rows_are_distributions(self):
        with pytest.raises(DomainError):
            Channel([[0.5, 0.4], [0.5, 0.5]])

    def test_binary_builder(self):
        ch = Channel.binary(0.9, 0.1)
        assert np.allclose(ch.rows, [[0.9, 0.1], [0.1, 0.9]])


class TestRDPoint:
    def test_valid(self):
        p = RDPoint(0.5, 0.1, 0.2, "closed_form")
        assert p.rate == 0.5

    def test_rejects_negative_rate(self):
        with pytest.raises(DomainError):
            RDPoint(-0.1, 0.0, 0.0, "solver")

    def test_rejects_unknown_provenance(self):
        with pytest.raises(DomainError):
            RDPoint(0.1, 0.0, 0.0, "guessed")


class TestMarginals:
    def test_symmetric_binary(self, binary_source_q09):
        assert np.allclose(marginal_x(binary_source_q09).probs, [0.5, 0.5])

    def test_point_mass(self):
        assert np.allclose(marginal_x(JointSource([[1, 0], [0, 0]])).probs, [1, 0])

    def test_uniform(self):
        assert np.allclose(marginal_x(JointSource([[0.25, 0.25], [0.25, 0.25]])).probs, [0.5, 0.5])


class TestPosteriorGivenX:
    def test_symmetric_binary(self, binary_source_q09):
        assert np.allclose(posterior_given_x(binary_source_q09, 0).probs, [0.9, 0.1])

    def test_independent_source(self):
        # S independent of X: posterior equals the S marginal for every x
        src = JointSource(np.outer([0.3, 0.7], [0.6, 0.4]))
        for x in range(2):
            assert np.allclose(posterior_given_x(src, x).probs, [0.3, 0.7])

    def test_q_half(self):
        assert np.allclose(posterior_given_x(binary_joint(0.5), 1).probs, [0.5, 0.5])

    def test_zero_mass_symbol(self):
        with pytest.raises(ZeroMassSymbol):
            posterior_given_x(JointSource([[1, 0], [0, 0]]), 1)

    def test_index_range(self, binary_source_q09):
        with pytest.raises(IndexOutOfRange):
            posterior_given_x(binary_source_q09, 5)


class TestPosteriorGivenY:
    def test_identity_channel_matches_posterior_given_x(self, binary_source_q09):
        ch = Channel.identity(2)
        for y in range(2):
            assert np.allclose(
                posterior_given_y(binary_source_q09, ch, y).probs,
                posterior_given_x(binary_source_q09, y).probs,
            )

    def test_uninformative_channel(self, binary_source_q09):
        ch = Channel.binary(0.5, 0.5)
        for y in range(2):
            assert np.allclose(posterior_given_y(binary_source_q09, ch, y).probs, [0.5, 0.5])

    def test_noiseless_channel(self, binary_source_q09):
        ch = Channel.binary(1.0, 0.0)
        assert np.allclose(posterior_given_y(binary_source_q09, ch, 0).probs, [0.9, 0.1])

    def test_zero_mass_output(self, binary_source_q09):
        ch = Channel.binary(0.0, 0.0)  # y = 0 never produced
        with pytest.raises(ZeroMassOutput):
            posterior_given_y(binary_source_q09, ch, 0)

    def test_total_probability_consistency(self, binary_source_q09):
        ch = Channel.binary(0.8, 0.3)
        p_y = output_distribution(binary_source_q09, ch).probs
        mix = sum(
            p_y[y] * posterior_given_y(binary_source_q09, ch, y).probs for y in range(2)
        )
        assert np.allclose(mix, binary_source_q09.joint.sum(axis=1), atol=1e-9)


class TestMutualInformation:
    def test_noiseless_binary(self):
        assert mutual_information(Distribution([0.5, 0.5]), Channel.identity(2)) == pytest.approx(1.0)

    def test_independence(self):
        ch = Channel([[0.3, 0.7], [0.3, 0.7]])
        assert mutual_information(Distribution([0.2, 0.8]), ch) == pytest.approx(0.0, abs=1e-12)

    def test_binary_symmetric_value(self):
        got = mutual_information(Distribution([0.5, 0.5]), Channel.binary(0.9, 0.1))
        assert got == pytest.approx(MI_W09_Z01, abs=1e-12)

    def test_dimension_check(self):
        with pytest.raises(DimensionMismatch):
            mutual_information(Distribution([1 / 3] * 3), Channel.identity(2))

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            rows = rng.random((3, 4)) + 0.01
            rows /= rows.sum(axis=1, keepdims=True)
            p = rng.random(3) + 0.01
            p /= p.sum()
            perm = rng.permutation(4)
            a = mutual_information(Distribution(p), Channel(rows))
            b = mutual_information(Distribution(p), Channel(rows[:, perm]))
            assert a >= 0.0
            assert a == pytest.approx(b, abs=1e-12)


class TestBinaryEntropy:
    def test_maximum(self):
        assert binary_entropy(0.5) == 1.0

    def test_boundaries(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_value(self):
        assert binary_entropy(0.11) == pytest.approx(H2_011, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            binary_entropy(1.2)
        with pytest.raises(DomainError):
            binary_entropy(-0.1)

    @settings(deadline=None, max_examples=60)
    @given(st.floats(0.0, 1.0), st.floats(0.0, 1.0))
    def test_concavity(self, a, b):
        assert binary_entropy((a + b) / 2) >= (binary_entropy(a) + binary_entropy(b)) / 2 - 1e-12


@settings(deadline=None, max_examples=40)
@given(
    st.lists(st.floats(0.01, 1.0), min_size=2, max_size=4),
    st.integers(0, 10_000),
)
def test_posterior_mixture_recovers_s_marginal(weights, seed):
    # sum_y p_Y(y) p_{S|y} must equal p_S for any source and channel
    rng = np.random.default_rng(seed)
    num_s = len(weights)
    joint = np.outer(np.asarray(weights) / sum(weights), rng.random(3) + 0.05)
    joint /= joint.sum()
    src = JointSource(joint)
    rows = rng.random((3, 3)) + 0.05
    rows /= rows.sum(axis=1, keepdims=True)
    ch = Channel(rows)
    p_y = output_distribution(src, ch).probs
    mix = sum(p_y[y] * posterior_given_y(src, ch, y).probs for y in range(3))
    assert np.allclose(mix, joint.sum(axis=1), atol=1e-9)


def test_load_source_json(tmp_path):
    path = tmp_path / "source.json"
    path.write_text(
        '{"joint": [[0.45, 0.05], [0.05, 0.45]], "s_labels": ["ok", "fault"], "x_labels": ["0", "1"]}'
    )
    src = load_source_json(path)
    assert np.allclose(src.joint, [[0.45, 0.05], [0.05, 0.45]])
    assert src.s_labels == ("ok", "fault")


def test_load_source_json_missing_joint(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{}")
    with pytest.raises(DomainError):
        load_source_json(path)
