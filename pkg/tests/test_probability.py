"""Probability kernel: examples, error contracts, and seeded property sweeps."""
import numpy as np
import pytest

from aiflab.errors import (
    AbsoluteContinuityViolation,
    DimensionMismatch,
    InvalidDistribution,
    NonFiniteInput,
)
from aiflab.probability import (
    Categorical,
    Joint2,
    StochasticMatrix,
    entropy,
    factorize,
    kl_divergence,
    outer,
    softmax,
)


def random_categorical(rng, n):
    return Categorical(rng.dirichlet(np.ones(n)))


class TestCategorical:
    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidDistribution):
            Categorical(np.array([0.5, 0.4]))

    def test_rejects_negative(self):
        with pytest.raises(InvalidDistribution):
            Categorical(np.array([1.1, -0.1]))

    def test_rejects_nan(self):
        with pytest.raises(NonFiniteInput):
            Categorical(np.array([np.nan, 1.0]))

    def test_immutable(self):
        c = Categorical.uniform(3)
        with pytest.raises(ValueError):
            c.probs[0] = 0.9

    def test_from_weights(self):
        c = Categorical.from_weights(np.array([2.0, 6.0]))
        np.testing.assert_allclose(c.probs, [0.25, 0.75])


class TestKlDivergence:
    def test_identical_is_zero(self):
        p = Categorical(np.array([0.5, 0.5]))
        assert kl_divergence(p, p) == 0.0

    def test_delta_vs_uniform(self):
        p = Categorical(np.array([1.0, 0.0]))
        q = Categorical(np.array([0.5, 0.5]))
        assert kl_divergence(p, q) == pytest.approx(np.log(2), abs=1e-12)

    def test_two_term_sum(self):
        # direct oracle: 0.5 ln(0.5/0.25) + 0.5 ln(0.5/0.75)
        p = Categorical(np.array([0.5, 0.5]))
        q = Categorical(np.array([0.25, 0.75]))
        expected = 0.5 * np.log(2.0) + 0.5 * np.log(2.0 / 3.0)
        assert expected == pytest.approx(0.143841, abs=1e-6)
        assert kl_divergence(p, q) == pytest.approx(expected, abs=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatch):
            kl_divergence(Categorical.uniform(2), Categorical.uniform(3))

    def test_absolute_continuity(self):
        p = Categorical(np.array([0.5, 0.5]))
        q = Categorical(np.array([1.0, 0.0]))
        with pytest.raises(AbsoluteContinuityViolation):
            kl_divergence(p, q)

    def test_gibbs_inequality_seeded_sweep(self):
        rng = np.random.default_rng(1234)
        for _ in range(1000):
            n = int(rng.integers(2, 6))
            p = random_categorical(rng, n)
            q = random_categorical(rng, n)
            assert kl_divergence(p, q) >= -1e-12
        for _ in range(100):
            p = random_categorical(rng, 4)
            assert abs(kl_divergence(p, p)) == 0.0


class TestEntropy:
    def test_uniform_is_log_n(self):
        assert entropy(Categorical.uniform(4)) == pytest.approx(np.log(4), abs=1e-12)

    def test_delta_is_zero(self):
        assert entropy(Categorical.delta(3, 0)) == 0.0

    def test_two_term_sum(self):
        expected = -(0.25 * np.log(0.25) + 0.75 * np.log(0.75))
        assert expected == pytest.approx(0.562335, abs=1e-6)
        assert entropy(Categorical(np.array([0.25, 0.75]))) == pytest.approx(
            expected, abs=1e-12
        )

    def test_bounded_by_log_support(self):
        rng = np.random.default_rng(99)
        for _ in range(1000):
            n = int(rng.integers(1, 7))
            p = random_categorical(rng, n)
            h = entropy(p)
            assert h <= np.log(n) + 1e-12
        # equality iff uniform
        assert entropy(Categorical.uniform(5)) == pytest.approx(np.log(5), abs=1e-12)


class TestSoftmax:
    def test_equal_scores_uniform(self):
        out = softmax(np.array([3.3, 3.3, 3.3]), precision=1.0)
        np.testing.assert_allclose(out.probs, np.ones(3) / 3, atol=1e-12)

    def test_hand_normalization(self):
        out = softmax(np.array([0.0, -np.log(2)]), precision=1.0)
        np.testing.assert_allclose(out.probs, [2 / 3, 1 / 3], atol=1e-12)

    def test_low_precision_approaches_uniform(self):
        out = softmax(np.array([5.0, 1.0]), precision=1e-9)
        np.testing.assert_allclose(out.probs, [0.5, 0.5], atol=1e-6)

    def test_rejects_nonfinite(self):
        with pytest.raises(NonFiniteInput):
            softmax(np.array([np.inf, 0.0]))

    def test_rejects_bad_precision(self):
        with pytest.raises(ValueError):
            softmax(np.array([1.0, 2.0]), precision=0.0)

    def test_argmax_invariance_seeded_sweep(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            v = rng.normal(size=int(rng.integers(2, 8))) * 10
            prec = float(rng.uniform(0.01, 20.0))
            out = softmax(v, precision=prec)
            assert int(np.argmax(out.probs)) == int(np.argmax(v))


class TestJointFactorize:
    def test_uniform_joint(self):
        fac = factorize(Joint2(np.full((2, 2), 0.25)))
        np.testing.assert_allclose(fac.row_marginal.probs, [0.5, 0.5])
        np.testing.assert_allclose(fac.col_marginal.probs, [0.5, 0.5])
        np.testing.assert_allclose(fac.row_given_col.entries, 0.5)
        np.testing.assert_allclose(fac.col_given_row.entries, 0.5)

    def test_rank_one_joint_has_constant_conditionals(self):
        p = Categorical(np.array([0.3, 0.7]))
        q = Categorical(np.array([0.25, 0.25, 0.5]))
        fac = factorize(outer(p, q))
        for j in range(3):
            np.testing.assert_allclose(fac.row_given_col.entries[:, j], p.probs, atol=1e-15)
        for i in range(2):
            np.testing.assert_allclose(fac.col_given_row.entries[:, i], q.probs, atol=1e-15)

    def test_hand_division(self):
        fac = factorize(Joint2(np.array([[0.4, 0.1], [0.1, 0.4]])))
        np.testing.assert_allclose(fac.row_marginal.probs, [0.5, 0.5])
        np.testing.assert_allclose(fac.row_given_col.entries[:, 0], [0.8, 0.2])

    def test_zero_mass_column_is_uniform_and_flagged(self):
        fac = factorize(Joint2(np.array([[0.6, 0.0], [0.4, 0.0]])))
        assert fac.zero_mass_cols == (1,)
        np.testing.assert_allclose(fac.row_given_col.entries[:, 1], [0.5, 0.5])

    def test_recompose_seeded_sweep(self):
        rng = np.random.default_rng(11)
        for _ in range(300):
            rows, cols = int(rng.integers(2, 5)), int(rng.integers(2, 5))
            table = rng.dirichlet(np.ones(rows * cols)).reshape(rows, cols)
            j = Joint2(table)
            fac = factorize(j)
            via_cols = fac.row_given_col.entries * fac.col_marginal.probs[None, :]
            via_rows = (fac.col_given_row.entries * fac.row_marginal.probs[None, :]).T
            np.testing.assert_allclose(via_cols, table, atol=1e-12)
            np.testing.assert_allclose(via_rows, table, atol=1e-12)


class TestStochasticMatrix:
    def test_rejects_bad_column(self):
        with pytest.raises(InvalidDistribution):
            StochasticMatrix(np.array([[0.5, 0.3], [0.5, 0.6]]))

    def test_apply_preserves_mass(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            n = int(rng.integers(2, 5))
            m = StochasticMatrix(rng.dirichlet(np.ones(n), size=n).T)
            p = random_categorical(rng, n)
            out = m.apply(p)
            assert abs(out.probs.sum() - 1.0) < 1e-12
