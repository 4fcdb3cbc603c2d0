"""Where the epistemic sign flip really comes from: the cue task.

A hidden context is revealed by visiting a cue location; preferences are
flat, so the only thing at stake is information. The EFE and FEEF reward
the visit (posterior 2/3 on go-cue). The FEF is often described as
penalizing it, but against the same biased joint the EFE uses, its
posterior term cancels exactly and it is indifferent (1/2).

The advertised penalty only appears under a different biased joint: one
whose state marginal is the rolled-forward prior instead of the
preference-consistent marginal. That assembly is shown at the end as a
separate objective. The sign of the epistemic term is a property of the
biased joint you score against, not of extending free energy forward in
time.
"""
import numpy as np

from aiflab import (
    cue_task_factory,
    enumerate_policies,
    evaluate_policies,
    policy_posterior,
    softmax,
)

model, pref, labels = cue_task_factory()
policies = enumerate_policies(model.num_actions, model.horizon)
names = [labels["actions"][p.actions[0]] for p in policies]

print("policy totals and posterior mass (gamma = 1):")
per_functional = {}
for fn in ("efe", "fef", "feef", "gfe"):
    evals = evaluate_policies(policies, fn, model.initial_prior, model, pref)
    post = policy_posterior(evals, gamma=1.0)
    per_functional[fn] = evals
    row = ", ".join(
        f"{name}: total {e.total:.4f} mass {post.probs[i]:.4f}"
        for i, (name, e) in enumerate(zip(names, evals))
    )
    print(f"  {fn:>4}  {row}")

ln2, ln3 = np.log(2), np.log(3)
print()
print(f"reference values: ln3 = {ln3:.4f}, ln3 - ln2 = {ln3 - ln2:.4f}")
print("the go-cue step gains exactly ln 2 of information:")
go_eval = per_functional["efe"][1]
print(f"  information_gain = {go_eval.per_step[0].terms['information_gain']:.6f}")

print()
print("FEF under the shared biased joint: the posterior term cancels against")
print("the joint's conditional, leaving only the expected preference surprisal")
for name, e in zip(names, per_functional["fef"]):
    rep = e.per_step[0]
    print(f"  {name:>7}: value {rep.value:.4f} = "
          f"neg_expected_evidence {rep.terms['neg_expected_evidence']:.4f} "
          f"+ post_err {rep.terms['post_err']:.4f}")

print()
print("Re-assembling the biased joint with the *prior* as its state marginal")
print("stops that cancellation; the divergence to the prior is now paid as a cost:")
alt_totals = []
for e in per_functional["fef"]:
    rep = e.per_step[0]
    alt_totals.append(rep.terms["neg_expected_evidence"] + rep.terms["information_gain"])
alt_post = softmax(-np.array(alt_totals), precision=1.0)
for name, total, mass in zip(names, alt_totals, alt_post.probs):
    print(f"  {name:>7}: total {total:.4f} mass {mass:.4f}")
print("under that assembly the agent avoids the cue (go-cue mass 1/3), but the")
print("same substitution applied to the EFE erases its epistemic bonus entirely.")
