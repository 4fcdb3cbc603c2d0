"""State inference at the current timestep and the variational free energy.

The variational family is the full categorical simplex, so optimal
inference has a closed form (exact Bayes) and no iterative descent is
simulated. Perturbed posteriors (exact posterior mixed with uniform)
stand in for imperfect variational optimization wherever a nonzero
posterior-approximation error is wanted.

All logs here are strict: putting posterior mass on a zero-probability
outcome raises AbsoluteContinuityViolation rather than clamping.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import (
    AbsoluteContinuityViolation,
    DimensionMismatch,
    ImpossibleObservation,
    IndexOutOfRange,
)
from .model import GenerativeModel, PreferenceModel, build_biased_joint
from .probability import Categorical, Joint2, StochasticMatrix, kl_divergence

EXACT_BAYES = "exact_bayes"
SUPPLIED_APPROXIMATION = "supplied_approximation"


@dataclass(frozen=True)
class Posterior:
    """A state belief together with how it was obtained."""

    dist: Categorical
    source: str = SUPPLIED_APPROXIMATION


@dataclass(frozen=True)
class VfeReport:
    """Variational free energy of one (posterior, observation) pair.

    Three exact decompositions of the same value:

        vfe = neg_entropy - energy
        vfe = -accuracy + complexity
        vfe = neg_log_evidence + posterior_divergence

    where energy = E_q[ln p(o, x)], neg_entropy = E_q[ln q],
    accuracy = E_q[ln p(o|x)], complexity = KL(q || prior),
    posterior_divergence = KL(q || p(x|o)). When preferences are supplied
    the joint is the preference-biased one and evidence/conditionals come
    from it.
    """

    vfe: float
    energy: float
    neg_entropy: float
    accuracy: float
    complexity: float
    neg_log_evidence: float
    posterior_divergence: float


def bayes_posterior(
    prior: Categorical, likelihood: StochasticMatrix, observation: int
) -> Posterior:
    """Exact posterior over states given one observation index."""
    if not 0 <= observation < likelihood.num_rows:
        raise IndexOutOfRange(f"observation {observation} out of range")
    if prior.support_size != likelihood.num_cols:
        raise DimensionMismatch("prior length differs from likelihood state count")
    weights = likelihood.entries[observation, :] * prior.probs
    total = weights.sum()
    if total <= 0.0:
        raise ImpossibleObservation(
            f"observation {observation} has zero marginal probability"
        )
    return Posterior(Categorical(weights / total), source=EXACT_BAYES)


def perturbed_posterior(exact: Posterior, eta: float) -> Posterior:
    """Mix the exact posterior with uniform at rate eta in [0, 1]."""
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    n = exact.dist.support_size
    mixed = (1.0 - eta) * exact.dist.probs + eta / n
    source = EXACT_BAYES if eta == 0.0 else SUPPLIED_APPROXIMATION
    return Posterior(Categorical(mixed), source=source)


def belief_predict(belief: Categorical, action: int, model: GenerativeModel) -> Categorical:
    """Push a state belief through one action's transition table."""
    if not 0 <= action < model.num_actions:
        raise IndexOutOfRange(f"action {action} out of range [0, {model.num_actions})")
    return model.transitions[action].apply(belief)


def _strict_expected_log(q: np.ndarray, values: np.ndarray, what: str) -> float:
    """E_q[ln values] with 0 ln 0 = 0; strict about q-mass on zeros."""
    mask = q > 0.0
    if np.any(values[mask] <= 0.0):
        raise AbsoluteContinuityViolation(f"posterior mass on zero-probability {what}")
    return float(np.sum(q[mask] * np.log(values[mask])))


def vfe(
    q,
    observation: int,
    prior: Categorical,
    model: GenerativeModel,
    pref: Optional[PreferenceModel] = None,
) -> VfeReport:
    """Score an approximate posterior against the model at one observation.

    `q` may be a Posterior or a bare Categorical. Without preferences the
    joint is the veridical p(o|x) * prior; with preferences the biased
    joint for the same timestep replaces it, so the report describes the
    biased-model free energy instead.
    """
    q_dist = q.dist if isinstance(q, Posterior) else q
    if q_dist.support_size != model.num_states:
        raise DimensionMismatch("posterior length differs from state count")
    if not 0 <= observation < model.num_obs:
        raise IndexOutOfRange(f"observation {observation} out of range")

    if pref is None:
        joint = Joint2(model.likelihood.entries * prior.probs[None, :])
        likelihood_row = model.likelihood.entries[observation, :]
        prior_marginal = prior
    else:
        predictive = Joint2(model.likelihood.entries * prior.probs[None, :])
        biased = build_biased_joint(pref, predictive, likelihood=model.likelihood)
        joint = biased.joint
        fac = joint.factorize()
        likelihood_row = fac.row_given_col.entries[observation, :]
        prior_marginal = fac.col_marginal

    fac = joint.factorize()
    evidence = fac.row_marginal.probs[observation]
    if evidence <= 0.0:
        raise ImpossibleObservation(
            f"observation {observation} has zero probability under the joint"
        )
    conditional = fac.col_given_row.column(observation)

    qp = q_dist.probs
    joint_row = joint.entries[observation, :]
    energy = _strict_expected_log(qp, joint_row, "joint entries")
    neg_entropy = float(np.sum(qp[qp > 0.0] * np.log(qp[qp > 0.0])))
    accuracy = _strict_expected_log(qp, likelihood_row, "likelihood entries")
    complexity = kl_divergence(q_dist, prior_marginal)
    neg_log_evidence = float(-np.log(evidence))
    posterior_divergence = kl_divergence(q_dist, conditional)
    return VfeReport(
        vfe=neg_entropy - energy,
        energy=energy,
        neg_entropy=neg_entropy,
        accuracy=accuracy,
        complexity=complexity,
        neg_log_evidence=neg_log_evidence,
        posterior_divergence=posterior_divergence,
    )
