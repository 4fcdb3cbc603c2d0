"""Independent brute-force checks for every identity and bound.

The reference computations here (expected evidence, trajectory values,
mutual information, the raw definitional value of each functional) are
written as plain summations over enumerated outcomes with their own
zero handling. They deliberately do not reuse the decomposition code in
`functionals`, so agreement between the two routes is evidence rather
than tautology.

`identity_suite` drives the whole battery over seeded random models with
posterior-override mixtures and reports the worst violation per identity
family.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import AbsoluteContinuityViolation, TrajectorySpaceTooLarge
from .functionals import (
    BOUND_SLACK,
    PredictiveState,
    efe_step,
    feef_step,
    fef_step,
    gfe_step,
    mixture_override,
    naturalisation_diagnostics,
    predictive_state,
)
from .inference import bayes_posterior, perturbed_posterior, vfe
from .model import (
    OBSERVATION_PREFERENCES,
    GenerativeModel,
    PreferenceModel,
    model_from_arrays,
    random_model,
)
from .planning import Policy, enumerate_policies, evaluate_policy, rollout
from .probability import Categorical, StochasticMatrix

TRAJECTORY_SPACE_CAP = 100_000
DEFAULT_TOLERANCE = 1e-9


# --- raw reference computations ---------------------------------------------


def _preferred_obs_marginal(pref: PreferenceModel, likelihood: np.ndarray) -> np.ndarray:
    if pref.kind == OBSERVATION_PREFERENCES:
        return pref.dist.probs
    return likelihood @ pref.dist.probs


def expected_log_evidence_exact(ps: PredictiveState, pref: PreferenceModel) -> float:
    """-sum_o Q(o|pi) ln pref(o) by direct summation; no variational parts."""
    p_obs = _preferred_obs_marginal(pref, ps.likelihood.entries)
    total = 0.0
    for o in range(ps.q_o.support_size):
        w = ps.q_o.probs[o]
        if w == 0.0:
            continue
        if p_obs[o] <= 0.0:
            raise AbsoluteContinuityViolation(
                f"preferences give zero probability to reachable observation {o}"
            )
        total -= w * np.log(p_obs[o])
    return total


def _raw_rollout_beliefs(belief0: np.ndarray, policy: Policy, model: GenerativeModel):
    beliefs = []
    b = belief0
    for action in policy.actions:
        b = model.transitions[action].entries @ b
        beliefs.append(b)
    return beliefs


def _raw_conditional(joint_row_major: np.ndarray):
    """(q_o, cond) of a joint with uniform columns where q_o is zero."""
    q_o = joint_row_major.sum(axis=1)
    num_states = joint_row_major.shape[1]
    cond = np.empty((num_states, joint_row_major.shape[0]))
    for o in range(joint_row_major.shape[0]):
        if q_o[o] > 0.0:
            cond[:, o] = joint_row_major[o, :] / q_o[o]
        else:
            cond[:, o] = 1.0 / num_states
    return q_o, cond


def _raw_biased(pref: PreferenceModel, likelihood: np.ndarray, cond: np.ndarray) -> np.ndarray:
    if pref.kind == OBSERVATION_PREFERENCES:
        return pref.dist.probs[:, None] * cond.T
    return likelihood * pref.dist.probs[None, :]


def raw_efe_value(ps: PredictiveState, pref: PreferenceModel) -> float:
    """EFE from its definition via explicit loops over (o, x)."""
    A = ps.likelihood.entries
    joint = A * ps.q_x.probs[None, :]
    q_o, cond = _raw_conditional(joint)
    biased = _raw_biased(pref, A, cond)
    posterior = ps.q_x_given_o.entries
    total = 0.0
    for o in range(joint.shape[0]):
        for x in range(joint.shape[1]):
            w = q_o[o] * posterior[x, o]
            if w == 0.0:
                continue
            total += w * (np.log(ps.q_x.probs[x]) - np.log(biased[o, x]))
    return total


def raw_mutual_information(joint: np.ndarray) -> float:
    """MI of a two-variable joint by direct double summation."""
    row = joint.sum(axis=1)
    col = joint.sum(axis=0)
    total = 0.0
    for o in range(joint.shape[0]):
        for x in range(joint.shape[1]):
            j = joint[o, x]
            if j == 0.0:
                continue
            total += j * (np.log(j) - np.log(row[o]) - np.log(col[x]))
    return total


def trajectory_state_marginals(
    belief0: Categorical, policy: Policy, model: GenerativeModel
) -> list:
    """Per-timestep state marginals by enumerating whole state trajectories.

    Sums the probability of every state sequence x_0..x_T under the
    initial prior and the chosen transitions; the per-step marginals must
    match the much cheaper matrix-product belief chain.
    """
    horizon = len(policy)
    num_states = model.num_states
    marginals = [np.zeros(num_states) for _ in range(horizon)]
    for seq in itertools.product(range(num_states), repeat=horizon + 1):
        p = belief0.probs[seq[0]]
        for t, action in enumerate(policy.actions):
            p *= model.transitions[action].entries[seq[t + 1], seq[t]]
        if p == 0.0:
            continue
        for t in range(horizon):
            marginals[t][seq[t + 1]] += p
    return marginals


def trajectory_fef_exact(
    belief0: Categorical,
    policy: Policy,
    model: GenerativeModel,
    pref: PreferenceModel,
) -> float:
    """Trajectory-level FEF by enumerating all observation sequences.

    For each full sequence o_1..o_T the per-step posterior-vs-biased
    divergences are summed and weighted by the product of per-step
    predicted observation probabilities (temporal mean field). Equals the
    sum of per-step FEF values.
    """
    horizon = len(policy)
    num_obs = model.num_obs
    size = num_obs**horizon
    if size > TRAJECTORY_SPACE_CAP:
        raise TrajectorySpaceTooLarge(size, TRAJECTORY_SPACE_CAP)

    A = model.likelihood.entries
    inner = np.zeros((horizon, num_obs))
    q_o_all = np.zeros((horizon, num_obs))
    for t, belief in enumerate(_raw_rollout_beliefs(belief0.probs, policy, model)):
        joint = A * belief[None, :]
        q_o, cond = _raw_conditional(joint)
        biased = _raw_biased(pref, A, cond)
        q_o_all[t] = q_o
        for o in range(num_obs):
            acc = 0.0
            for x in range(model.num_states):
                c = cond[x, o]
                if c == 0.0:
                    continue
                if biased[o, x] <= 0.0:
                    raise AbsoluteContinuityViolation(
                        f"biased joint vanishes on supported outcome (t={t}, o={o}, x={x})"
                    )
                acc += c * (np.log(c) - np.log(biased[o, x]))
            inner[t, o] = acc

    total = 0.0
    for seq in itertools.product(range(num_obs), repeat=horizon):
        weight = 1.0
        for t, o in enumerate(seq):
            weight *= q_o_all[t, o]
        if weight == 0.0:
            continue
        total += weight * sum(inner[t, o] for t, o in enumerate(seq))
    return total


# --- the identity suite ------------------------------------------------------


@dataclass
class IdentitySuiteReport:
    """Worst violation per identity family over a batch of seeded models."""

    seeds_run: int
    dims: tuple
    horizon: int
    tolerance: float
    bound_slack: float
    max_abs_violation: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)
    efe_gap_signs: dict = field(default_factory=lambda: {"positive": 0, "negative": 0})
    marginal_product_gap_signs: dict = field(
        default_factory=lambda: {"positive": 0, "negative": 0}
    )
    min_fef_gap_eta_positive: float = float("inf")

    @property
    def passed(self) -> bool:
        return not self.failures


class _Recorder:
    def __init__(self, report: IdentitySuiteReport):
        self.report = report

    def record(self, identity: str, seed: int, violation: float, threshold: float):
        violation = float(violation)
        prev = self.report.max_abs_violation.get(identity, 0.0)
        if violation > prev:
            self.report.max_abs_violation[identity] = violation
        elif identity not in self.report.max_abs_violation:
            self.report.max_abs_violation[identity] = violation
        if violation > threshold:
            self.report.failures.append((identity, seed, violation))


DEFAULT_ETAS = (0.0, 0.25, 0.5)


def identity_suite(
    num_seeds: int = 100,
    dims: tuple = (3, 3, 3),
    horizon: int = 2,
    tolerance: float = DEFAULT_TOLERANCE,
    bound_slack: float = BOUND_SLACK,
    etas: tuple = DEFAULT_ETAS,
    base_seed: int = 0,
) -> IdentitySuiteReport:
    """Evaluate every cross-module identity on seeded random models.

    Each seed draws a strictly positive random model, a random policy,
    and one override mixture eta from `etas` (cycled). Identity families:

      i     FEF - information gain = EFE
      ii    FEF >= expected preference surprisal, gap = post_err
      iii   EFE = extrinsic + post_err - information gain, signed gap
      iv    the five EFE decompositions and the raw definition agree
      v     FEEF = extrinsic - intrinsic (no override) and its
            likelihood-entropy relation to the EFE extrinsic term
      vi    GFE = FEEF - mutual information, MI >= 0
      vii   one-hot predicted observation reduces FEEF to the biased VFE
      viii  the three VFE decompositions agree; VFE >= -ln evidence,
            tight at the exact posterior
      ix    trajectory FEF enumeration = per-step sum
      x     FEF >= predicted-observation entropy; marginal-product and
            evidence gaps recorded

    Identities are held to `tolerance`, one-sided bounds to
    `bound_slack`. Deterministic for fixed arguments.
    """
    num_states, num_obs, num_actions = dims
    report = IdentitySuiteReport(
        seeds_run=num_seeds,
        dims=tuple(dims),
        horizon=horizon,
        tolerance=tolerance,
        bound_slack=bound_slack,
    )
    rec = _Recorder(report)

    for s in range(num_seeds):
        seed = base_seed + s
        eta = etas[s % len(etas)]
        model, pref = random_model(num_states, num_obs, num_actions, horizon, seed)
        aux = np.random.default_rng([seed, 17])
        policies = enumerate_policies(num_actions, horizon)
        policy = policies[int(aux.integers(len(policies)))]

        steps_plain = rollout(model.initial_prior, policy, model)
        for ps in steps_plain:
            ps_eta = mixture_override(ps, eta)
            efe = efe_step(ps_eta, pref)
            fef = fef_step(ps_eta, pref)
            feef = feef_step(ps_eta, pref)
            gfe = gfe_step(ps_eta, pref)
            nee = expected_log_evidence_exact(ps_eta, pref)
            ig = efe.terms["information_gain"]
            post_err = efe.terms["post_err"]

            # (i)
            rec.record("i_fef_minus_ig_equals_efe", seed,
                       abs((fef.value - fef.terms["information_gain"]) - efe.value),
                       tolerance)

            # (ii)
            fef_gap = fef.value - nee
            rec.record("ii_fef_bound_direction", seed, max(0.0, -fef_gap), bound_slack)
            rec.record("ii_fef_gap_equals_post_err", seed,
                       abs(fef_gap - fef.terms["post_err"]), tolerance)
            if eta > 0.0:
                report.min_fef_gap_eta_positive = min(
                    report.min_fef_gap_eta_positive, fef_gap
                )

            # (iii)
            rec.record("iii_efe_three_term", seed,
                       abs(efe.value - (efe.terms["extrinsic"] + post_err - ig)),
                       tolerance)
            efe_gap = efe.value - nee
            rec.record("iii_efe_signed_gap", seed,
                       abs(efe_gap - (post_err - ig)), tolerance)
            if eta == 0.0:
                rec.record("iii_efe_gap_eta0_nonpositive", seed,
                           max(0.0, efe_gap), bound_slack)
                rec.record("iii_post_err_zero_at_eta0", seed, abs(post_err), tolerance)
            else:
                key = "positive" if efe_gap > 0 else "negative"
                report.efe_gap_signs[key] += 1

            # (iv): raw definition + the five decomposition reassemblies
            forms = [
                raw_efe_value(ps_eta, pref),
                efe.terms["extrinsic"] + post_err - ig,
                efe.terms["entropy"] + efe.terms["energy"],
                efe.terms["accuracy"] + efe.terms["complexity"],
                efe.terms["predicted_uncertainty"] + efe.terms["predicted_divergence"],
                efe.terms["extrinsic"] - efe.terms["obs_information_gain"],
                efe.terms["risk"] + efe.terms["ambiguity"],
            ]
            spread = max(forms) - min(forms)
            rec.record("iv_decomposition_concordance", seed, spread, tolerance)
            rec.record("iv_matches_raw_definition", seed,
                       abs(efe.value - forms[0]), tolerance)

            # (v)
            feef_plain = feef_step(ps, pref)
            efe_plain = efe_step(ps, pref)
            rec.record("v_feef_extrinsic_minus_intrinsic", seed,
                       abs(feef_plain.value
                           - (feef_plain.terms["extrinsic"] - feef_plain.terms["intrinsic"])),
                       tolerance)
            rec.record("v_feef_extrinsic_entropy_relation", seed,
                       abs(feef.terms["extrinsic"]
                           - (efe.terms["extrinsic"] - feef.terms["likelihood_entropy"])),
                       tolerance)
            rec.record("v_feef_efe_epistemic_equality", seed,
                       abs(feef.terms["intrinsic"] - ig), tolerance)

            # (vi)
            mi_raw = raw_mutual_information(ps_eta.joint.entries)
            rec.record("vi_gfe_equals_feef_minus_mi", seed,
                       abs(gfe.value - (feef.value - mi_raw)), tolerance)
            rec.record("vi_mi_matches_raw", seed,
                       abs(gfe.terms["mutual_information"] - mi_raw), tolerance)
            rec.record("vi_mi_nonnegative", seed, max(0.0, -mi_raw), bound_slack)

            # (x)
            diag = naturalisation_diagnostics(ps_eta, pref)
            rec.record("x_fef_entropy_bound", seed,
                       max(0.0, diag.entropy_bound - fef.value), bound_slack)
            rec.record("x_marginal_product_evidence_bound", seed,
                       max(0.0, -diag.jensen_gap), bound_slack)
            key = "positive" if diag.efe_gap >= 0 else "negative"
            report.marginal_product_gap_signs[key] += 1

        # (vii): one-hot predicted observation built from this seed
        target_obs = int(aux.integers(num_obs))
        onehot_lik = np.zeros((num_obs, num_states))
        onehot_lik[target_obs, :] = 1.0
        belief = np.asarray(aux.dirichlet(np.ones(num_states)))
        onehot_model = model_from_arrays(
            onehot_lik, [np.eye(num_states)], belief, horizon=1
        )
        ps_onehot = predictive_state(
            Categorical(belief), StochasticMatrix(onehot_lik)
        )
        feef_onehot = feef_step(ps_onehot, pref)
        q = bayes_posterior(Categorical(belief), onehot_model.likelihood, target_obs)
        vfe_biased = vfe(q, target_obs, Categorical(belief), onehot_model, pref)
        rec.record("vii_onehot_feef_reduces_to_vfe", seed,
                   abs(feef_onehot.value - vfe_biased.vfe), tolerance)

        # (viii): VFE decompositions at the current time
        obs = int(aux.integers(num_obs))
        exact = bayes_posterior(model.initial_prior, model.likelihood, obs)
        q = perturbed_posterior(exact, eta)
        rep = vfe(q, obs, model.initial_prior, model)
        d1 = rep.neg_entropy - rep.energy
        d2 = -rep.accuracy + rep.complexity
        d3 = rep.neg_log_evidence + rep.posterior_divergence
        rec.record("viii_vfe_three_decompositions", seed,
                   max(d1, d2, d3) - min(d1, d2, d3), tolerance)
        rec.record("viii_vfe_evidence_bound", seed,
                   max(0.0, rep.neg_log_evidence - rep.vfe), bound_slack)
        if eta == 0.0:
            rec.record("viii_vfe_tight_at_exact_posterior", seed,
                       abs(rep.vfe - rep.neg_log_evidence), tolerance)

        # (ix): trajectory factorization (only feasible horizons)
        if num_obs**horizon <= TRAJECTORY_SPACE_CAP and horizon <= 3:
            trajectory = trajectory_fef_exact(model.initial_prior, policy, model, pref)
            per_step = evaluate_policy(
                policy, "fef", model.initial_prior, model, pref
            ).total
            rec.record("ix_trajectory_factorization", seed,
                       abs(trajectory - per_step), tolerance)

    return report


def serialize_suite_report(report: IdentitySuiteReport) -> str:
    """Stable text form of a suite report."""
    lines = [
        f"seeds_run = {report.seeds_run}",
        f"dims = {report.dims[0]}x{report.dims[1]}x{report.dims[2]}",
        f"horizon = {report.horizon}",
        f"tolerance = {report.tolerance:.12g}",
        f"bound_slack = {report.bound_slack:.12g}",
        f"failures = {len(report.failures)}",
    ]
    for identity in sorted(report.max_abs_violation):
        lines.append(
            f"max_violation {identity} = {report.max_abs_violation[identity]:.12g}"
        )
    lines.append(
        "efe_gap_signs positive = {positive} negative = {negative}".format(
            **report.efe_gap_signs
        )
    )
    lines.append(
        "marginal_product_gap_signs positive = {positive} negative = {negative}".format(
            **report.marginal_product_gap_signs
        )
    )
    if report.min_fef_gap_eta_positive != float("inf"):
        lines.append(
            f"min_fef_gap_eta_positive = {report.min_fef_gap_eta_positive:.12g}"
        )
    for identity, seed, violation in report.failures:
        lines.append(f"FAIL {identity} seed={seed} violation={violation:.12g}")
    return "\n".join(lines) + "\n"
