"""Ground-truth environments and the two benchmark task factories.

The cue task separates information-seeking objectives from
information-averse ones: one action is uninformative, the other reveals
a hidden context through a deterministic cue, and preferences are flat
so the only gradient between actions is epistemic. The bandit task does
the opposite: both arms are equally informative and only the reward
probabilities differ, so every objective must rank arms by extrinsic
value alone.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, ParseError
from .model import (
    OBSERVATION_PREFERENCES,
    GenerativeModel,
    PreferenceModel,
    load_model,
    model_from_arrays,
    parse_model_file,
    save_model,
)
from .probability import Categorical


@dataclass
class Environment:
    """Single-owner mutable simulator with a ground-truth model.

    Not thread-safe; parallel experiments should hold independent
    instances with independent seeds.
    """

    model: GenerativeModel
    true_state: int
    seed: int
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if not 0 <= self.true_state < self.model.num_states:
            raise IndexOutOfRange(f"true_state {self.true_state} out of range")
        self.rng = np.random.default_rng(self.seed)


def env_step(env: Environment, action: int):
    """Advance the hidden state and emit an observation.

    The next state is drawn from the action's transition column at the
    current state, the observation from the likelihood column of the new
    state. Mutates `env` and returns (observation, env); the draw is
    deterministic under the environment's seed.
    """
    model = env.model
    if not 0 <= action < model.num_actions:
        raise IndexOutOfRange(f"action {action} out of range")
    next_col = model.transitions[action].entries[:, env.true_state]
    env.true_state = int(env.rng.choice(model.num_states, p=next_col))
    obs_col = model.likelihood.entries[:, env.true_state]
    observation = int(env.rng.choice(model.num_obs, p=obs_col))
    return observation, env


def cue_task_factory():
    """Context-cue task: S=4, O=3, A=2, horizon 1.

    States are (context, location) pairs with locations {start, cue};
    context never changes and location follows the action (stay keeps it,
    go-cue moves to the cue). The start location emits a null observation
    and the cue location deterministically reveals the context.
    Preferences are uniform over the three observations, so going to the
    cue changes nothing extrinsically and gains exactly ln 2 of
    information about the context.

    Returns (GenerativeModel, PreferenceModel, labels).
    """
    labels = {
        "states": ["ctx0/start", "ctx0/cue", "ctx1/start", "ctx1/cue"],
        "observations": ["null", "cue0", "cue1"],
        "actions": ["stay", "go-cue"],
    }
    likelihood = np.zeros((3, 4))
    likelihood[0, 0] = 1.0  # start locations emit null
    likelihood[0, 2] = 1.0
    likelihood[1, 1] = 1.0  # cue location reveals context 0
    likelihood[2, 3] = 1.0  # cue location reveals context 1
    stay = np.eye(4)
    go_cue = np.zeros((4, 4))
    for ctx in (0, 1):
        start, cue = 2 * ctx, 2 * ctx + 1
        go_cue[cue, start] = 1.0
        go_cue[cue, cue] = 1.0
    prior = np.array([0.5, 0.0, 0.5, 0.0])
    model = model_from_arrays(likelihood, [stay, go_cue], prior, horizon=1)
    pref = PreferenceModel(OBSERVATION_PREFERENCES, Categorical.uniform(3))
    return model, pref, labels


def bandit_factory(reward_probs=(0.9, 0.1), reward_preference=0.99):
    """Two-armed bandit: S=2, O=2, A=2, horizon 1.

    Pulling arm a moves deterministically into that arm's state from
    anywhere, so post-action beliefs are certain and the information gain
    is identically zero for both arms. Arm emission probabilities are
    mirror images of each other, so the likelihood columns are equally
    (un)informative and only extrinsic value separates the arms.

    Returns (GenerativeModel, PreferenceModel, labels).
    """
    labels = {
        "states": ["arm0", "arm1"],
        "observations": ["no-reward", "reward"],
        "actions": ["pull-arm0", "pull-arm1"],
    }
    likelihood = np.array(
        [
            [1.0 - reward_probs[0], 1.0 - reward_probs[1]],
            [reward_probs[0], reward_probs[1]],
        ]
    )
    pull = [np.zeros((2, 2)), np.zeros((2, 2))]
    for arm in (0, 1):
        pull[arm][arm, :] = 1.0
    prior = np.array([0.5, 0.5])
    model = model_from_arrays(likelihood, pull, prior, horizon=1)
    pref = PreferenceModel(
        OBSERVATION_PREFERENCES,
        Categorical(np.array([1.0 - reward_preference, reward_preference])),
    )
    return model, pref, labels


def write_cue_task_fixture(path, true_state: int = 0) -> None:
    """Emit the cue task as a model file usable by plan and simulate."""
    model, pref, _ = cue_task_factory()
    save_model(path, model, pref, true_state=true_state)


def write_bandit_fixture(path, true_state: int = 0) -> None:
    """Emit the bandit task as a model file usable by plan and simulate."""
    model, pref, _ = bandit_factory()
    save_model(path, model, pref, true_state=true_state)


def load_environment(path, seed: int):
    """Load a model file with a true_state field as an Environment.

    Returns (Environment, PreferenceModel or None).
    """
    payload = parse_model_file(path)
    if "true_state" not in payload:
        raise ParseError(f"{path}: missing field 'true_state' required for simulation")
    model, pref = load_model(path)
    env = Environment(model=model, true_state=int(payload["true_state"]), seed=seed)
    return env, pref
