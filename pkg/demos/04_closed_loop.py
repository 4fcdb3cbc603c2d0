"""Closed-loop agent: plan, act, observe, update, re-plan.

Runs the cue task with an EFE agent whose true context is hidden at the
start. The first action is go-cue (epistemic pull), the observation
reveals the context, and the belief collapses onto the true state.
"""
import numpy as np

from aiflab import (
    Environment,
    bayes_posterior,
    cue_task_factory,
    enumerate_policies,
    env_step,
    evaluate_policies,
    policy_posterior,
    select_action,
)
from aiflab.inference import belief_predict

model, pref, labels = cue_task_factory()
env = Environment(model=model, true_state=2, seed=0)  # ctx1, start
policies = enumerate_policies(model.num_actions, model.horizon)

belief = model.initial_prior
print(f"true state: {labels['states'][env.true_state]}")
print(f"initial belief: {np.round(belief.probs, 3)}")
for t in range(3):
    evals = evaluate_policies(policies, "efe", belief, model, pref)
    posterior = policy_posterior(evals, gamma=1.0)
    action = select_action(posterior, policies)
    observation, env = env_step(env, action)
    belief = bayes_posterior(
        belief_predict(belief, action, model), model.likelihood, observation
    ).dist
    print(
        f"t={t}  policy posterior {np.round(posterior.probs, 3)}"
        f"  act {labels['actions'][action]:>7}"
        f"  see {labels['observations'][observation]:>5}"
        f"  belief {np.round(belief.probs, 3)}"
    )
print(f"final belief mass on the true state: {belief.probs[env.true_state]:.3f}")
