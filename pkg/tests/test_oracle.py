"""Brute-force reference computations and the identity suite."""
import numpy as np
import pytest

from aiflab.envs import cue_task_factory
from aiflab.errors import AbsoluteContinuityViolation, TrajectorySpaceTooLarge
from aiflab.functionals import fef_step, predictive_state
from aiflab.model import (
    OBSERVATION_PREFERENCES,
    PreferenceModel,
    model_from_arrays,
    random_model,
)
from aiflab.oracle import (
    expected_log_evidence_exact,
    identity_suite,
    serialize_suite_report,
    trajectory_fef_exact,
)
from aiflab.planning import Policy, evaluate_policy, rollout
from aiflab.probability import Categorical, entropy


class TestExpectedLogEvidence:
    def test_uniform_preferences_give_log_o(self):
        model, _ = random_model(3, 3, 1, 1, seed=0)
        pref = PreferenceModel(OBSERVATION_PREFERENCES, Categorical.uniform(3))
        ps = predictive_state(model.initial_prior, model)
        assert expected_log_evidence_exact(ps, pref) == pytest.approx(
            np.log(3), abs=1e-12
        )

    def test_self_evidence_is_entropy(self):
        model, _ = random_model(3, 4, 1, 1, seed=1)
        ps = predictive_state(model.initial_prior, model)
        pref = PreferenceModel(OBSERVATION_PREFERENCES, ps.q_o)
        assert expected_log_evidence_exact(ps, pref) == pytest.approx(
            entropy(ps.q_o), abs=1e-12
        )

    def test_cue_task_go_cue(self):
        model, pref, _ = cue_task_factory()
        belief = Categorical(np.array([0.0, 0.5, 0.0, 0.5]))
        ps = predictive_state(belief, model)
        assert expected_log_evidence_exact(ps, pref) == pytest.approx(
            np.log(3), abs=1e-12
        )

    def test_zero_preference_on_reachable_obs(self):
        model, _ = random_model(2, 2, 1, 1, seed=3)
        pref = PreferenceModel(
            OBSERVATION_PREFERENCES, Categorical(np.array([1.0, 0.0]))
        )
        ps = predictive_state(model.initial_prior, model)
        with pytest.raises(AbsoluteContinuityViolation):
            expected_log_evidence_exact(ps, pref)


class TestTrajectoryFef:
    def test_single_step_equals_step_value(self):
        for seed in range(20):
            model, pref = random_model(3, 3, 2, 1, seed=seed)
            policy = Policy((seed % 2,))
            trajectory = trajectory_fef_exact(model.initial_prior, policy, model, pref)
            ps = rollout(model.initial_prior, policy, model)[0]
            assert trajectory == pytest.approx(fef_step(ps, pref).value, abs=1e-12)

    def test_two_step_matches_per_step_sum(self):
        for seed in range(20):
            model, pref = random_model(3, 3, 2, 2, seed=seed)
            policy = Policy((0, 1))
            trajectory = trajectory_fef_exact(model.initial_prior, policy, model, pref)
            total = evaluate_policy(
                policy, "fef", model.initial_prior, model, pref
            ).total
            assert trajectory == pytest.approx(total, abs=1e-9)

    def test_deterministic_three_step_hand_value(self):
        # identity likelihood, swap transition, delta prior: the single
        # reachable observation sequence is 1, 0, 1
        swap = np.array([[0.0, 1.0], [1.0, 0.0]])
        model = model_from_arrays(np.eye(2), [swap], np.array([1.0, 0.0]), horizon=3)
        pref = PreferenceModel(
            OBSERVATION_PREFERENCES, Categorical(np.array([0.25, 0.75]))
        )
        policy = Policy((0, 0, 0))
        hand = -2 * np.log(0.75) - np.log(0.25)
        trajectory = trajectory_fef_exact(model.initial_prior, policy, model, pref)
        assert trajectory == pytest.approx(hand, abs=1e-12)
        total = evaluate_policy(policy, "fef", model.initial_prior, model, pref).total
        assert total == pytest.approx(hand, abs=1e-12)

    def test_trajectory_space_cap(self):
        model, pref = random_model(2, 10, 1, 6, seed=0)
        with pytest.raises(TrajectorySpaceTooLarge):
            trajectory_fef_exact(model.initial_prior, Policy((0,) * 6), model, pref)


@pytest.fixture(scope="module")
def report():
    return identity_suite(num_seeds=30, dims=(3, 3, 3), horizon=2)


class TestIdentitySuite:

    def test_zero_failures(self, report):
        assert report.passed
        assert report.failures == []

    def test_all_families_present(self, report):
        prefixes = {key.split("_")[0] for key in report.max_abs_violation}
        assert prefixes >= {"i", "ii", "iii", "iv", "v", "vi", "vii", "viii", "ix", "x"}

    def test_violations_within_tolerance(self, report):
        for identity, violation in report.max_abs_violation.items():
            assert violation <= report.tolerance, identity

    def test_post_err_zero_at_eta0(self, report):
        assert report.max_abs_violation["iii_post_err_zero_at_eta0"] <= 1e-12

    def test_fef_gap_strictly_positive_for_eta_positive(self, report):
        assert report.min_fef_gap_eta_positive > 0.0

    def test_deterministic(self):
        r1 = identity_suite(num_seeds=6, dims=(2, 3, 2), horizon=2)
        r2 = identity_suite(num_seeds=6, dims=(2, 3, 2), horizon=2)
        assert serialize_suite_report(r1) == serialize_suite_report(r2)

    def test_tiny_tolerance_fails_on_roundoff(self):
        report = identity_suite(num_seeds=6, dims=(3, 3, 3), horizon=2, tolerance=1e-18)
        assert not report.passed

    def test_serialization_lists_every_family(self, report):
        text = serialize_suite_report(report)
        assert "failures = 0" in text
        for identity in report.max_abs_violation:
            assert identity in text
