"""Per-timestep objective functionals over predicted futures.

Four objectives are computed for a single future timestep of a policy
rollout, each scored against the same preference-biased joint:

    EFE   E[ln Q(x|pi) - ln biased(o,x)]      (expected free energy)
    FEF   E[ln Q(x|o)  - ln biased(o,x)]      (free energy of the future)
    FEEF  KL(Q(o,x|pi) || biased(o,x))        (free energy of the expected future)
    GFE   E[ln Q(o|pi) + ln Q(x|pi) - ln biased(o,x)]   (generalised)

All are costs to be minimized. Every report carries the functional's
decomposition terms with the sign each term contributes to the total, so
the reassembly identities can be checked numerically term by term.

Expectations over the predicted future use the factorization
Q(o|pi) * Qhat(x|o), where Qhat is the exact conditional of the
predictive joint unless a posterior override is installed. Without an
override this equals the predictive joint exactly; with one, it
reintroduces a posterior-approximation error on purpose, which shows up
as the `post_err` term. FEEF and GFE are divergences between whole
joints, so their values ignore the override; their intrinsic-value term
tracks the (possibly overridden) posterior to stay in lockstep with the
EFE's information-gain term.

Probabilities below LOG_EPS are clamped before logs and the report is
flagged; on strictly positive models no clamping ever fires.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DimensionMismatch
from .model import GenerativeModel, PreferenceModel, build_biased_joint
from .probability import (
    LOG_EPS,
    Categorical,
    Joint2,
    StochasticMatrix,
    entropy,
    factorize,
)

# Slack allowed when checking one-sided bounds in floating point.
BOUND_SLACK = 1e-12

EFE = "EFE"
FEF = "FEF"
FEEF = "FEEF"
GFE = "GFE"


@dataclass(frozen=True)
class PredictiveState:
    """Policy-conditioned predictions for one future timestep.

    joint is likelihood * q_x, the veridical predictive joint over
    (observation, state); q_o its observation marginal. q_x_given_o is
    the posterior used inside expectations: the exact conditional of
    `joint` unless `posterior_override` replaced it (the joint and q_o
    are never touched by an override).
    """

    q_x: Categorical
    likelihood: StochasticMatrix
    joint: Joint2
    q_o: Categorical
    q_x_given_o: StochasticMatrix
    posterior_override: Optional[StochasticMatrix] = None


def predictive_state(
    q_x: Categorical,
    model: Union[GenerativeModel, StochasticMatrix],
    posterior_override: Optional[StochasticMatrix] = None,
) -> PredictiveState:
    """Build the predictive joint and its factorization for one timestep.

    `model` may be a full GenerativeModel or just its likelihood. The
    optional override must be a states-by-observations stochastic matrix;
    it replaces only the posterior used in expectations.
    """
    likelihood = model.likelihood if isinstance(model, GenerativeModel) else model
    if q_x.support_size != likelihood.num_cols:
        raise DimensionMismatch("belief length differs from likelihood state count")
    joint = Joint2(likelihood.entries * q_x.probs[None, :])
    fac = factorize(joint)
    if posterior_override is not None:
        if (
            posterior_override.num_rows != likelihood.num_cols
            or posterior_override.num_cols != likelihood.num_rows
        ):
            raise DimensionMismatch("override must be num_states x num_obs")
        q_x_given_o = posterior_override
    else:
        q_x_given_o = fac.col_given_row
    return PredictiveState(
        q_x=q_x,
        likelihood=likelihood,
        joint=joint,
        q_o=fac.row_marginal,
        q_x_given_o=q_x_given_o,
        posterior_override=posterior_override,
    )


def mixture_override(ps: PredictiveState, eta: float) -> PredictiveState:
    """Replace the posterior with (1 - eta) * exact + eta * uniform.

    eta = 0 returns the state unchanged (no override installed), so exact
    and perturbed evaluations share one code path.
    """
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    if eta == 0.0:
        return ps
    exact = factorize(ps.joint).col_given_row.entries
    num_states = exact.shape[0]
    mixed = (1.0 - eta) * exact + eta / num_states
    return predictive_state(
        ps.q_x, ps.likelihood, posterior_override=StochasticMatrix(mixed)
    )


@dataclass(frozen=True)
class FunctionalReport:
    """One timestep's functional value plus every decomposition term.

    Keys in `terms` are stable; each term is stored with the sign it
    carries in its reassembly of `value`. The reassemblies per functional:

    EFE:  value = extrinsic + post_err - information_gain
                = entropy + energy
                = accuracy + complexity
                = predicted_uncertainty + predicted_divergence
                = extrinsic - obs_information_gain
                = risk + ambiguity            (risk doubles as kl_control)
    FEF:  value = neg_expected_evidence + post_err
          value - information_gain = EFE value
    FEEF: value = extrinsic - intrinsic       (exact without override)
          extrinsic = EFE extrinsic - likelihood_entropy
    GFE:  value = FEEF value - mutual_information
                = neg_obs_entropy + neg_state_entropy + energy
    """

    name: str
    value: float
    terms: dict
    clamped: bool


class _ClampTracker:
    """Weighted log-sums over a measure's support with clamped logs."""

    def __init__(self):
        self.clamped = False

    def _log(self, values: np.ndarray) -> np.ndarray:
        if np.any(values < LOG_EPS):
            self.clamped = True
        return np.log(np.maximum(values, LOG_EPS))

    def wlog(self, weights: np.ndarray, values: np.ndarray) -> float:
        """sum over weights > 0 of weights * ln(values)."""
        mask = weights > 0.0
        return float(np.sum(weights[mask] * self._log(values[mask])))

    def wlogratio(self, weights: np.ndarray, num: np.ndarray, den: np.ndarray) -> float:
        """sum over weights > 0 of weights * (ln num - ln den)."""
        mask = weights > 0.0
        return float(
            np.sum(weights[mask] * (self._log(num[mask]) - self._log(den[mask])))
        )


@dataclass(frozen=True)
class _StepContext:
    """Shared ingredients for one (predictive state, preference) evaluation."""

    ps: PredictiveState
    weights: np.ndarray          # q_o(o) * Qhat(x|o), obs x states
    q_x_grid: np.ndarray         # q_x broadcast to obs x states
    posterior_grid: np.ndarray   # Qhat as obs x states
    biased: np.ndarray           # biased joint, obs x states
    biased_obs: np.ndarray       # biased observation marginal
    biased_states: np.ndarray    # biased state marginal
    biased_obs_given_state: np.ndarray
    biased_state_given_obs: np.ndarray  # obs x states layout


def _context(ps: PredictiveState, pref: PreferenceModel) -> _StepContext:
    biased = build_biased_joint(pref, ps.joint, likelihood=ps.likelihood)
    fac = factorize(biased.joint)
    num_obs, num_states = ps.joint.shape
    posterior_grid = ps.q_x_given_o.entries.T
    weights = ps.q_o.probs[:, None] * posterior_grid
    return _StepContext(
        ps=ps,
        weights=weights,
        q_x_grid=np.broadcast_to(ps.q_x.probs[None, :], (num_obs, num_states)),
        posterior_grid=posterior_grid,
        biased=biased.joint.entries,
        biased_obs=fac.row_marginal.probs,
        biased_states=fac.col_marginal.probs,
        biased_obs_given_state=fac.row_given_col.entries,
        biased_state_given_obs=fac.col_given_row.entries.T,
    )


def efe_step(ps: PredictiveState, pref: PreferenceModel) -> FunctionalReport:
    """Expected free energy of one future timestep.

    The value is the definition E[ln q_x - ln biased] under the
    prediction measure; the terms cover the extrinsic/epistemic split
    (with its posterior-error correction), the entropy/energy and
    accuracy/complexity splits, the observation-space form, and the
    risk/ambiguity form taken from the same biased joint.
    """
    c = _context(ps, pref)
    t = _ClampTracker()
    w, q_o = c.weights, ps.q_o.probs

    value = t.wlogratio(w, c.q_x_grid, c.biased)
    extrinsic = -t.wlog(q_o, c.biased_obs)
    information_gain = t.wlogratio(w, c.posterior_grid, c.q_x_grid)
    post_err = t.wlogratio(w, c.posterior_grid, c.biased_state_given_obs)
    entropy_term = t.wlog(w, c.q_x_grid)
    energy = -t.wlog(w, c.biased)
    accuracy = -t.wlog(w, c.biased_obs_given_state)
    complexity = t.wlogratio(w, c.q_x_grid, np.broadcast_to(c.biased_states[None, :], w.shape))
    predicted_uncertainty = -t.wlog(w, ps.likelihood.entries)
    predicted_divergence = t.wlogratio(q_o, q_o, c.biased_obs)
    obs_information_gain = t.wlogratio(
        w, ps.likelihood.entries, np.broadcast_to(q_o[:, None], w.shape)
    )
    terms = {
        "extrinsic": extrinsic,
        "information_gain": information_gain,
        "post_err": post_err,
        "entropy": entropy_term,
        "energy": energy,
        "accuracy": accuracy,
        "complexity": complexity,
        "risk": complexity,
        "ambiguity": accuracy,
        "kl_control": complexity,
        "predicted_uncertainty": predicted_uncertainty,
        "predicted_divergence": predicted_divergence,
        "obs_information_gain": obs_information_gain,
    }
    return FunctionalReport(name=EFE, value=value, terms=terms, clamped=t.clamped)


def fef_step(ps: PredictiveState, pref: PreferenceModel) -> FunctionalReport:
    """Free energy of the future for one timestep.

    Value is E[ln Qhat(x|o) - ln biased] under the prediction measure. It
    exceeds the expected preference surprisal by exactly the
    posterior-approximation error, and subtracting the information-gain
    term recovers the EFE value.
    """
    c = _context(ps, pref)
    t = _ClampTracker()
    w, q_o = c.weights, ps.q_o.probs

    value = t.wlogratio(w, c.posterior_grid, c.biased)
    neg_expected_evidence = -t.wlog(q_o, c.biased_obs)
    information_gain = t.wlogratio(w, c.posterior_grid, c.q_x_grid)
    post_err = t.wlogratio(w, c.posterior_grid, c.biased_state_given_obs)
    accuracy = t.wlog(w, c.biased_obs_given_state)
    terms = {
        "neg_expected_evidence": neg_expected_evidence,
        "post_err": post_err,
        "information_gain": information_gain,
        "accuracy": accuracy,
    }
    return FunctionalReport(name=FEF, value=value, terms=terms, clamped=t.clamped)


def feef_step(ps: PredictiveState, pref: PreferenceModel) -> FunctionalReport:
    """Free energy of the expected future: KL(predictive joint || biased joint).

    The intrinsic term is computed with the same (possibly overridden)
    posterior as the EFE's information gain, so the two epistemic terms
    are equal by construction; the value itself is a pure joint
    divergence and does not depend on the override.
    """
    c = _context(ps, pref)
    t = _ClampTracker()
    joint = ps.joint.entries
    lik = ps.likelihood.entries

    value = t.wlogratio(joint, joint, c.biased)
    extrinsic = t.wlogratio(joint, lik, np.broadcast_to(c.biased_obs[:, None], joint.shape))
    intrinsic = t.wlogratio(c.weights, c.posterior_grid, c.q_x_grid)
    likelihood_entropy = -t.wlog(joint, lik)
    terms = {
        "extrinsic": extrinsic,
        "intrinsic": intrinsic,
        "likelihood_entropy": likelihood_entropy,
    }
    return FunctionalReport(name=FEEF, value=value, terms=terms, clamped=t.clamped)


def gfe_step(ps: PredictiveState, pref: PreferenceModel) -> FunctionalReport:
    """Generalised free energy: factorized posterior over (o, x).

    Value is E[ln q_o + ln q_x - ln biased] under the predictive joint,
    which is the FEEF minus the joint's mutual information.
    """
    c = _context(ps, pref)
    t = _ClampTracker()
    joint = ps.joint.entries
    q_o_grid = np.broadcast_to(ps.q_o.probs[:, None], joint.shape)
    q_x_grid = np.broadcast_to(ps.q_x.probs[None, :], joint.shape)

    neg_obs_entropy = t.wlog(joint, q_o_grid)
    neg_state_entropy = t.wlog(joint, q_x_grid)
    energy = -t.wlog(joint, c.biased)
    mutual_information = (
        t.wlog(joint, joint) - neg_obs_entropy - neg_state_entropy
    )
    value = neg_obs_entropy + neg_state_entropy + energy
    terms = {
        "mutual_information": mutual_information,
        "neg_obs_entropy": neg_obs_entropy,
        "neg_state_entropy": neg_state_entropy,
        "energy": energy,
    }
    return FunctionalReport(name=GFE, value=value, terms=terms, clamped=t.clamped)


STEP_FUNCTIONS = {"efe": efe_step, "fef": fef_step, "feef": feef_step, "gfe": gfe_step}


@dataclass(frozen=True)
class NaturalisationDiagnostics:
    """Diagnostics for attempts to derive the EFE as an evidence bound.

    marginal_product_efe importance-samples the expected evidence with
    the variational prior, which lands on the EFE integrand but under the
    product of marginals instead of the joint; efe_gap records how far
    that is from the actual EFE. jensen_gap (>= 0) is its looseness as an
    evidence bound. entropy_bound is the predicted-observation entropy
    that the FEF provably dominates. max_posterior_prior_deviation
    measures how badly the prior-equals-posterior substitution that
    would rescue the EFE derivation is violated.
    """

    marginal_product_efe: float
    efe_gap: float
    expected_evidence: float
    jensen_gap: float
    entropy_bound: float
    entropy_bound_holds: bool
    max_posterior_prior_deviation: float
    clamped: bool


def naturalisation_diagnostics(
    ps: PredictiveState, pref: PreferenceModel
) -> NaturalisationDiagnostics:
    c = _context(ps, pref)
    t = _ClampTracker()
    product = np.outer(ps.q_o.probs, ps.q_x.probs)
    marginal_product_efe = t.wlogratio(product, c.q_x_grid, c.biased)
    expected_evidence = -t.wlog(ps.q_o.probs, c.biased_obs)

    efe_value = efe_step(ps, pref).value
    fef_value = fef_step(ps, pref).value
    entropy_bound = entropy(ps.q_o)

    exact_cond = factorize(ps.joint).col_given_row.entries
    supported = ps.q_o.probs > 0.0
    deviation = np.abs(exact_cond.T - ps.q_x.probs[None, :])[supported, :]
    max_dev = float(deviation.max()) if deviation.size else 0.0

    return NaturalisationDiagnostics(
        marginal_product_efe=marginal_product_efe,
        efe_gap=efe_value - marginal_product_efe,
        expected_evidence=expected_evidence,
        jensen_gap=marginal_product_efe - expected_evidence,
        entropy_bound=entropy_bound,
        entropy_bound_holds=fef_value >= entropy_bound - BOUND_SLACK,
        max_posterior_prior_deviation=max_dev,
        clamped=t.clamped,
    )


def serialize_report(report: FunctionalReport) -> str:
    """Flat name = value text form with 12 significant digits."""
    lines = [
        f"name = {report.name}",
        f"value = {report.value:.12g}",
        f"clamped = {'true' if report.clamped else 'false'}",
    ]
    lines.extend(f"{key} = {val:.12g}" for key, val in report.terms.items())
    return "\n".join(lines) + "\n"
