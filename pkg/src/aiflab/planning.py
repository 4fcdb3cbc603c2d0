"""Policy enumeration, belief rollouts, and the policy posterior.

Policies are exhaustively enumerated action sequences. Beliefs roll
forward through the transition tables without conditioning on future
observations (temporal mean field), so a policy's total objective is the
sum of its per-timestep functional values. The policy posterior is the
softmax of the negated totals: lower cost, higher probability.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import MixedFunctionals, PolicySpaceTooLarge
from .functionals import STEP_FUNCTIONS, mixture_override, predictive_state
from .inference import belief_predict
from .model import GenerativeModel, PreferenceModel
from .probability import Categorical, softmax

POLICY_SPACE_CAP = 100_000


@dataclass(frozen=True)
class Policy:
    """A fixed-length sequence of action indices."""

    actions: tuple

    def __post_init__(self):
        object.__setattr__(self, "actions", tuple(int(a) for a in self.actions))

    def __len__(self):
        return len(self.actions)

    def label(self) -> str:
        return "-".join(str(a) for a in self.actions)


@dataclass(frozen=True)
class PolicyEvaluation:
    """Per-step functional reports for one policy and their sum."""

    policy: Policy
    per_step: tuple
    total: float
    functional: str


def enumerate_policies(num_actions: int, horizon: int) -> list:
    """All num_actions**horizon action sequences in lexicographic order."""
    size = num_actions**horizon
    if size > POLICY_SPACE_CAP:
        raise PolicySpaceTooLarge(size, POLICY_SPACE_CAP)
    return [Policy(seq) for seq in itertools.product(range(num_actions), repeat=horizon)]


def rollout(
    belief0: Categorical,
    policy: Policy,
    model: GenerativeModel,
    eta: float = 0.0,
) -> list:
    """Predictive states for each timestep of a policy.

    The belief chain is belief0 pushed through the chosen transition at
    each step; eta > 0 installs the uniform-mixture posterior override on
    every step's predictive state.
    """
    states = []
    belief = belief0
    for action in policy.actions:
        belief = belief_predict(belief, action, model)
        ps = predictive_state(belief, model)
        if eta > 0.0:
            ps = mixture_override(ps, eta)
        states.append(ps)
    return states


def evaluate_policy(
    policy: Policy,
    functional: str,
    belief0: Categorical,
    model: GenerativeModel,
    pref: PreferenceModel,
    eta: float = 0.0,
) -> PolicyEvaluation:
    """Sum the named functional over the policy's rollout."""
    if functional not in STEP_FUNCTIONS:
        raise ValueError(f"unknown functional {functional!r}")
    step = STEP_FUNCTIONS[functional]
    reports = tuple(step(ps, pref) for ps in rollout(belief0, policy, model, eta=eta))
    total = float(sum(r.value for r in reports))
    return PolicyEvaluation(policy=policy, per_step=reports, total=total, functional=functional)


def evaluate_policies(
    policies,
    functional: str,
    belief0: Categorical,
    model: GenerativeModel,
    pref: PreferenceModel,
    eta: float = 0.0,
) -> list:
    """Evaluate every policy; results are in enumeration order."""
    return [
        evaluate_policy(p, functional, belief0, model, pref, eta=eta) for p in policies
    ]


def policy_posterior(evals, gamma: float = 1.0) -> Categorical:
    """Softmax of negated policy totals at inverse temperature gamma."""
    names = {e.functional for e in evals}
    if len(names) > 1:
        raise MixedFunctionals(f"evaluations mix functionals: {sorted(names)}")
    totals = np.array([e.total for e in evals])
    return softmax(-totals, precision=gamma)


def select_action(
    posterior: Categorical,
    policies,
    stochastic: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> int:
    """First action of the chosen policy.

    Deterministic mode takes the argmax policy; exact probability ties
    break toward the lexicographically first policy because enumeration
    order is lexicographic. Stochastic mode samples a policy with the
    supplied generator.
    """
    if len(policies) == 0:
        raise ValueError("no policies to select from")
    if stochastic:
        if rng is None:
            raise ValueError("stochastic selection requires a seeded generator")
        idx = int(rng.choice(len(policies), p=posterior.probs))
    else:
        idx = int(np.argmax(posterior.probs))
    return policies[idx].actions[0]
