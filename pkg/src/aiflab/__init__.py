"""Exact-enumeration laboratory for discrete active-inference objectives.

Categorical POMDPs, closed-form inference, and four policy objectives
(EFE, FEF, FEEF, GFE) with every decomposition term exposed, so that the
identities, bound directions, and behavioral differences between them
can be verified numerically rather than taken on faith.
"""

from .envs import Environment, bandit_factory, cue_task_factory, env_step, load_environment
from .errors import (
    AbsoluteContinuityViolation,
    AifError,
    DimensionMismatch,
    ImpossibleObservation,
    IndexOutOfRange,
    InvalidDistribution,
    MixedFunctionals,
    NonFiniteInput,
    ParseError,
    PolicySpaceTooLarge,
    TrajectorySpaceTooLarge,
    ValidationError,
)
from .functionals import (
    FunctionalReport,
    NaturalisationDiagnostics,
    PredictiveState,
    efe_step,
    feef_step,
    fef_step,
    gfe_step,
    mixture_override,
    naturalisation_diagnostics,
    predictive_state,
    serialize_report,
)
from .inference import (
    Posterior,
    VfeReport,
    bayes_posterior,
    belief_predict,
    perturbed_posterior,
    vfe,
)
from .model import (
    BiasedJoint,
    GenerativeModel,
    ModelViolation,
    PreferenceModel,
    build_biased_joint,
    load_model,
    model_from_arrays,
    random_model,
    save_model,
    validate_model,
)
from .oracle import (
    IdentitySuiteReport,
    expected_log_evidence_exact,
    identity_suite,
    serialize_suite_report,
    trajectory_fef_exact,
    trajectory_state_marginals,
)
from .planning import (
    Policy,
    PolicyEvaluation,
    enumerate_policies,
    evaluate_policies,
    evaluate_policy,
    policy_posterior,
    rollout,
    select_action,
)
from .probability import (
    Categorical,
    Factorization,
    Joint2,
    StochasticMatrix,
    entropy,
    factorize,
    kl_divergence,
    softmax,
)

__version__ = "0.1.0"
