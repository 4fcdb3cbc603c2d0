"""Tour of the four objectives on one small random model.

Builds a 3-state model, rolls one step of a policy, and prints every
functional with its full term breakdown, then checks each documented
reassembly of the value from its terms.
"""
import numpy as np

from aiflab import (
    efe_step,
    feef_step,
    fef_step,
    gfe_step,
    predictive_state,
    random_model,
    serialize_report,
)
from aiflab.inference import belief_predict

model, pref = random_model(num_states=3, num_obs=3, num_actions=2, horizon=1, seed=42)
belief = belief_predict(model.initial_prior, action=1, model=model)
ps = predictive_state(belief, model)

print("predicted state belief:", np.round(ps.q_x.probs, 4))
print("predicted observations:", np.round(ps.q_o.probs, 4))
print("preferences:           ", np.round(pref.dist.probs, 4))
print()

for step in (efe_step, fef_step, feef_step, gfe_step):
    report = step(ps, pref)
    print(serialize_report(report))

efe = efe_step(ps, pref)
t = efe.terms
reassemblies = {
    "extrinsic + post_err - information_gain": t["extrinsic"] + t["post_err"] - t["information_gain"],
    "entropy + energy": t["entropy"] + t["energy"],
    "accuracy + complexity": t["accuracy"] + t["complexity"],
    "predicted_uncertainty + predicted_divergence": t["predicted_uncertainty"] + t["predicted_divergence"],
    "extrinsic - obs_information_gain": t["extrinsic"] - t["obs_information_gain"],
    "risk + ambiguity": t["risk"] + t["ambiguity"],
}
print(f"EFE value = {efe.value:.12f}; reassembled from terms:")
for label, val in reassemblies.items():
    print(f"  {val:.12f}  <-  {label}   (|diff| = {abs(val - efe.value):.2e})")

fef = fef_step(ps, pref)
feef = feef_step(ps, pref)
gfe = gfe_step(ps, pref)
print()
print(f"FEF - information_gain = {fef.value - fef.terms['information_gain']:.12f}"
      f"  vs EFE = {efe.value:.12f}")
print(f"FEEF - mutual_information = {feef.value - gfe.terms['mutual_information']:.12f}"
      f"  vs GFE = {gfe.value:.12f}")
