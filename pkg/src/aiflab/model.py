"""POMDP generative models, preference models, and biased joints.

A generative model bundles an observation likelihood p(o|x), one state
transition table per action p(x'|x,a), an initial state prior, and a
planning horizon. Preferences are a normalized distribution over either
observations or states; combining them with a policy-conditioned
predictive joint yields the "biased" joint that every objective
functional scores against.

Models are immutable after construction and may be shared read-only
across threads. The file format is JSON (UTF-8, linear probabilities,
full round-trip precision).
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatch, ParseError, ValidationError
from .probability import Categorical, Joint2, StochasticMatrix, factorize

OBSERVATION_PREFERENCES = "observations"
STATE_PREFERENCES = "states"

# Deviation above which a column sum or entry counts as a violation.
VALIDATION_ATOL = 1e-9


@dataclass(frozen=True)
class GenerativeModel:
    """Categorical POMDP: likelihood O x S, per-action transitions S x S."""

    likelihood: StochasticMatrix
    transitions: tuple
    initial_prior: Categorical
    horizon: int

    def __post_init__(self):
        s = self.likelihood.num_cols
        if self.initial_prior.support_size != s:
            raise DimensionMismatch("initial prior length differs from state count")
        if len(self.transitions) < 1:
            raise DimensionMismatch("at least one action is required")
        for a, b in enumerate(self.transitions):
            if b.num_rows != s or b.num_cols != s:
                raise DimensionMismatch(f"transition {a} is not {s}x{s}")
        if self.horizon < 1:
            raise ValueError(f"horizon must be >= 1, got {self.horizon}")
        object.__setattr__(self, "transitions", tuple(self.transitions))

    @property
    def num_states(self) -> int:
        return self.likelihood.num_cols

    @property
    def num_obs(self) -> int:
        return self.likelihood.num_rows

    @property
    def num_actions(self) -> int:
        return len(self.transitions)


@dataclass(frozen=True)
class PreferenceModel:
    """Desired distribution over observations or over states."""

    kind: str
    dist: Categorical

    def __post_init__(self):
        if self.kind not in (OBSERVATION_PREFERENCES, STATE_PREFERENCES):
            raise ValueError(f"unknown preference kind {self.kind!r}")


@dataclass(frozen=True)
class BiasedJointProvenance:
    """Which factorization built a biased joint, and where conventions fired."""

    kind: str
    zero_mass_obs: tuple = ()
    zero_mass_states: tuple = ()


@dataclass(frozen=True)
class BiasedJoint:
    """Preference-biased joint over (observation, state) at one timestep."""

    joint: Joint2
    provenance: BiasedJointProvenance


@dataclass(frozen=True)
class ModelViolation:
    """One violated stochasticity invariant, with its location and size."""

    location: str
    deviation: float
    message: str

    def __str__(self):
        return f"{self.location}: {self.message} (deviation {self.deviation:.3g})"


def _check_table(name: str, table: np.ndarray, rows: int, cols: int, out: list):
    if table.shape != (rows, cols):
        out.append(
            ModelViolation(name, 0.0, f"expected shape {(rows, cols)}, got {table.shape}")
        )
        return
    for j in range(cols):
        col = table[:, j]
        dev = abs(col.sum() - 1.0)
        if dev > VALIDATION_ATOL:
            out.append(
                ModelViolation(
                    f"{name} column {j}", float(dev), f"column sums to {col.sum():.12g}"
                )
            )
        neg = np.flatnonzero(col < -VALIDATION_ATOL)
        for i in neg:
            out.append(
                ModelViolation(
                    f"{name}[{int(i)},{j}]", float(-col[i]), f"negative entry {col[i]:.12g}"
                )
            )


def validate_model(likelihood, transitions, initial_prior, horizon=1) -> list:
    """Report every violated invariant in raw model arrays.

    Returns an empty list iff the arrays form a valid generative model.
    Operates on plain arrays because the typed containers refuse to hold
    invalid tables in the first place.
    """
    violations: list = []
    a = np.asarray(likelihood, dtype=np.float64)
    if a.ndim != 2:
        violations.append(ModelViolation("likelihood", 0.0, "must be a 2-D table"))
        return violations
    num_obs, num_states = a.shape
    _check_table("likelihood", a, num_obs, num_states, violations)
    if len(transitions) < 1:
        violations.append(ModelViolation("transitions", 0.0, "need at least one action"))
    for idx, t in enumerate(transitions):
        _check_table(
            f"transitions[{idx}]",
            np.asarray(t, dtype=np.float64),
            num_states,
            num_states,
            violations,
        )
    p = np.asarray(initial_prior, dtype=np.float64)
    if p.shape != (num_states,):
        violations.append(
            ModelViolation("initial_prior", 0.0, f"expected length {num_states}, got {p.shape}")
        )
    else:
        dev = abs(p.sum() - 1.0)
        if dev > VALIDATION_ATOL:
            violations.append(
                ModelViolation("initial_prior", float(dev), f"sums to {p.sum():.12g}")
            )
        for i in np.flatnonzero(p < -VALIDATION_ATOL):
            violations.append(
                ModelViolation(f"initial_prior[{int(i)}]", float(-p[i]), "negative entry")
            )
    if horizon < 1:
        violations.append(ModelViolation("horizon", 0.0, f"must be >= 1, got {horizon}"))
    return violations


def model_from_arrays(likelihood, transitions, initial_prior, horizon) -> GenerativeModel:
    """Validate raw arrays and build a typed model; raises ValidationError."""
    report = validate_model(likelihood, transitions, initial_prior, horizon)
    if report:
        raise ValidationError(report)
    return GenerativeModel(
        likelihood=StochasticMatrix(likelihood),
        transitions=tuple(StochasticMatrix(t) for t in transitions),
        initial_prior=Categorical(initial_prior),
        horizon=int(horizon),
    )


def build_biased_joint(
    pref: PreferenceModel,
    predictive: Joint2,
    likelihood: Optional[StochasticMatrix] = None,
) -> BiasedJoint:
    """Bias a policy-conditioned predictive joint toward the preferences.

    Observation preferences replace the observation marginal and keep the
    predictive state-given-observation conditional exactly:
    joint(o, x) = pref(o) * Q(x|o). State preferences keep the likelihood
    and replace the state marginal: joint(o, x) = p(o|x) * pref(x). If no
    explicit likelihood is supplied for the state-preference direction it
    is recovered from the predictive joint itself.
    """
    num_obs, num_states = predictive.shape
    fac = factorize(predictive)
    if pref.kind == OBSERVATION_PREFERENCES:
        if pref.dist.support_size != num_obs:
            raise DimensionMismatch(
                f"preference over {pref.dist.support_size} observations, model has {num_obs}"
            )
        table = pref.dist.probs[:, None] * fac.col_given_row.entries.T
        prov = BiasedJointProvenance(
            kind=OBSERVATION_PREFERENCES, zero_mass_obs=fac.zero_mass_rows
        )
    else:
        if pref.dist.support_size != num_states:
            raise DimensionMismatch(
                f"preference over {pref.dist.support_size} states, model has {num_states}"
            )
        lik = likelihood if likelihood is not None else fac.row_given_col
        if lik.num_rows != num_obs or lik.num_cols != num_states:
            raise DimensionMismatch("likelihood shape does not match the predictive joint")
        table = lik.entries * pref.dist.probs[None, :]
        prov = BiasedJointProvenance(
            kind=STATE_PREFERENCES, zero_mass_states=fac.zero_mass_cols
        )
    return BiasedJoint(joint=Joint2(table), provenance=prov)


def random_model(
    num_states: int,
    num_obs: int,
    num_actions: int,
    horizon: int,
    seed: int,
) -> tuple:
    """Seeded random model with strictly positive Dirichlet-style columns.

    Every stochastic column is an independent uniform-Dirichlet draw
    (normalized unit-exponential variates), so all entries are strictly
    positive almost surely and the draw is reproducible from the seed.
    Returns (GenerativeModel, PreferenceModel) with observation
    preferences.
    """
    rng = np.random.default_rng(seed)

    def cols(rows, n):
        g = rng.standard_exponential((rows, n))
        return g / g.sum(axis=0, keepdims=True)

    likelihood = cols(num_obs, num_states)
    transitions = [cols(num_states, num_states) for _ in range(num_actions)]
    prior = cols(num_states, 1)[:, 0]
    pref = cols(num_obs, 1)[:, 0]
    model = model_from_arrays(likelihood, transitions, prior, horizon)
    return model, PreferenceModel(OBSERVATION_PREFERENCES, Categorical(pref))


# --- file format -----------------------------------------------------------
#
# JSON object with fields: num_states, num_obs, num_actions, horizon,
# likelihood (num_obs rows of num_states reals, row-major), transitions
# (num_actions blocks, each num_states rows of num_states reals),
# initial_prior (num_states reals), optional preferences {kind, dist},
# optional true_state (environment fixtures). Probabilities are linear,
# serialized with shortest round-trip decimal representation.

_REQUIRED_FIELDS = ("num_states", "num_obs", "num_actions", "horizon",
                    "likelihood", "transitions", "initial_prior")


def _model_payload(model: GenerativeModel, pref: Optional[PreferenceModel]) -> dict:
    payload = {
        "num_states": model.num_states,
        "num_obs": model.num_obs,
        "num_actions": model.num_actions,
        "horizon": model.horizon,
        "likelihood": [list(row) for row in model.likelihood.entries],
        "transitions": [[list(row) for row in b.entries] for b in model.transitions],
        "initial_prior": list(model.initial_prior.probs),
    }
    if pref is not None:
        payload["preferences"] = {"kind": pref.kind, "dist": list(pref.dist.probs)}
    return payload


def save_model(
    path,
    model: GenerativeModel,
    pref: Optional[PreferenceModel] = None,
    true_state: Optional[int] = None,
) -> None:
    """Write a model (plus optional preferences / environment state) to JSON."""
    payload = _model_payload(model, pref)
    if true_state is not None:
        payload["true_state"] = int(true_state)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")


def parse_model_file(path) -> dict:
    """Load and structurally check a model file; returns the raw payload."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            payload = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path} line {exc.lineno}: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ParseError(f"{path}: top level must be an object")
    for fieldname in _REQUIRED_FIELDS:
        if fieldname not in payload:
            raise ParseError(f"{path}: missing field {fieldname!r}")
    return payload


def load_model(path):
    """Load a model file.

    Returns (GenerativeModel, PreferenceModel or None). Raises ParseError
    for malformed files and ValidationError (with the full violation
    report) for well-formed files describing an invalid model.
    """
    payload = parse_model_file(path)
    try:
        likelihood = np.asarray(payload["likelihood"], dtype=np.float64)
        transitions = [np.asarray(t, dtype=np.float64) for t in payload["transitions"]]
        prior = np.asarray(payload["initial_prior"], dtype=np.float64)
        horizon = int(payload["horizon"])
    except (TypeError, ValueError) as exc:
        raise ParseError(f"{path}: malformed numeric field: {exc}") from exc
    declared = (int(payload["num_obs"]), int(payload["num_states"]))
    if likelihood.shape != declared:
        raise ParseError(
            f"{path}: likelihood shape {likelihood.shape} does not match declared {declared}"
        )
    if len(transitions) != int(payload["num_actions"]):
        raise ParseError(
            f"{path}: {len(transitions)} transition blocks for num_actions="
            f"{payload['num_actions']}"
        )
    model = model_from_arrays(likelihood, transitions, prior, horizon)
    pref = None
    if "preferences" in payload:
        block = payload["preferences"]
        try:
            kind = block["kind"]
            dist = np.asarray(block["dist"], dtype=np.float64)
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}: malformed preferences block: {exc}") from exc
        if kind not in (OBSERVATION_PREFERENCES, STATE_PREFERENCES):
            raise ParseError(f"{path}: unknown preference kind {kind!r}")
        expected = model.num_obs if kind == OBSERVATION_PREFERENCES else model.num_states
        if dist.shape != (expected,):
            raise ValidationError(
                [ModelViolation("preferences", 0.0, f"expected length {expected}")]
            )
        dev = abs(dist.sum() - 1.0)
        if dev > VALIDATION_ATOL or dist.min() < -VALIDATION_ATOL:
            raise ValidationError(
                [ModelViolation("preferences", float(dev), "not a normalized distribution")]
            )
        pref = PreferenceModel(kind, Categorical(dist))
    return model, pref
