"""Batch experiment runner: verify / plan / simulate.

Exit codes: 0 on success, 1 on identity failures or runtime errors,
2 on usage and configuration errors. All outputs are deterministic
functions of (arguments, model file, seed); floats are printed with 12
significant digits.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from .envs import env_step, load_environment
from .errors import AifError, ParseError, PolicySpaceTooLarge, ValidationError
from .functionals import STEP_FUNCTIONS
from .inference import bayes_posterior, belief_predict
from .model import load_model
from .oracle import identity_suite, serialize_suite_report
from .planning import (
    enumerate_policies,
    evaluate_policies,
    evaluate_policy,
    policy_posterior,
    select_action,
)

FUNCTIONALS = tuple(STEP_FUNCTIONS)


def _fmt(x: float) -> str:
    return f"{float(x):.12g}"


def _write(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_dims(text: str) -> tuple:
    parts = text.lower().split("x")
    if len(parts) != 3:
        raise ValueError(f"dims must look like SxOxA, got {text!r}")
    s, o, a = (int(p) for p in parts)
    if min(s, o, a) < 1:
        raise ValueError("all dims must be >= 1")
    return s, o, a


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aiflab",
        description="Discrete active-inference objectives: verify identities, "
        "plan over policies, simulate closed loops.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_verify = sub.add_parser("verify", help="run the identity suite")
    p_verify.add_argument("--seeds", type=int, default=100)
    p_verify.add_argument("--dims", type=_parse_dims, default=(3, 3, 3),
                          help="SxOxA, e.g. 3x3x3")
    p_verify.add_argument("--horizon", type=int, default=2)
    p_verify.add_argument("--tolerance", type=float, default=1e-9)
    p_verify.add_argument("--seed", type=int, default=0, help="base seed")
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--format", choices=("csv", "text"), default="text")

    p_plan = sub.add_parser("plan", help="evaluate every policy of a model")
    p_plan.add_argument("--model", required=True)
    p_plan.add_argument("--functional", choices=FUNCTIONALS, default="efe")
    p_plan.add_argument("--horizon", type=int, default=None,
                        help="policy length; defaults to the model horizon")
    p_plan.add_argument("--gamma", type=float, default=1.0)
    p_plan.add_argument("--eta", type=float, default=0.0)
    p_plan.add_argument("--out", default=None)
    p_plan.add_argument("--format", choices=("csv", "text"), default="csv")

    p_sim = sub.add_parser("simulate", help="closed-loop plan/act/observe run")
    p_sim.add_argument("--model", required=True,
                       help="model file with a true_state field")
    p_sim.add_argument("--functional", choices=FUNCTIONALS, default="efe")
    p_sim.add_argument("--horizon", type=int, default=None,
                       help="number of environment steps; defaults to the model horizon")
    p_sim.add_argument("--gamma", type=float, default=1.0)
    p_sim.add_argument("--eta", type=float, default=0.0)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--out", default=None)
    p_sim.add_argument("--format", choices=("csv", "text"), default="csv")
    return parser


def _check_common(args) -> None:
    if getattr(args, "gamma", 1.0) <= 0.0:
        raise ValueError(f"gamma must be > 0, got {args.gamma}")
    eta = getattr(args, "eta", 0.0)
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    horizon = getattr(args, "horizon", None)
    if horizon is not None and horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")


def cmd_verify(args) -> int:
    report = identity_suite(
        num_seeds=args.seeds,
        dims=args.dims,
        horizon=args.horizon,
        tolerance=args.tolerance,
        base_seed=args.seed,
    )
    if args.format == "text":
        text = serialize_suite_report(report)
    else:
        lines = ["field,value"]
        for raw in serialize_suite_report(report).splitlines():
            key, _, val = raw.partition(" = ")
            lines.append(f"{key.replace(' ', '_')},{val}")
        text = "\n".join(lines) + "\n"
    _write(text, args.out)
    return 0 if report.passed else 1


def _plan_rows(args, model, pref):
    horizon = args.horizon if args.horizon is not None else model.horizon
    policies = enumerate_policies(model.num_actions, horizon)
    evals = evaluate_policies(
        policies, args.functional, model.initial_prior, model, pref, eta=args.eta
    )
    posterior = policy_posterior(evals, gamma=args.gamma)
    term_keys = list(evals[0].per_step[0].terms)
    header = ["policy", "total", "posterior"]
    for t in range(horizon):
        header.append(f"step{t}_value")
        header.extend(f"step{t}_{key}" for key in term_keys)
    rows = []
    for ev, prob in zip(evals, posterior.probs):
        row = [ev.policy.label(), _fmt(ev.total), _fmt(prob)]
        for rep in ev.per_step:
            row.append(_fmt(rep.value))
            row.extend(_fmt(rep.terms[key]) for key in term_keys)
        rows.append(row)
    return header, rows, posterior


def cmd_plan(args) -> int:
    model, pref = load_model(args.model)
    if pref is None:
        raise ParseError(f"{args.model}: planning requires a preferences block")
    try:
        header, rows, _ = _plan_rows(args, model, pref)
    except PolicySpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if args.format == "csv":
        text = "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"
    else:
        blocks = []
        for row in rows:
            pairs = [f"{key} = {val}" for key, val in zip(header, row)]
            blocks.append("\n".join(pairs))
        text = ("\n\n").join(blocks) + "\n"
    _write(text, args.out)
    return 0


def cmd_simulate(args) -> int:
    env, pref = load_environment(args.model, seed=args.seed)
    if pref is None:
        raise ParseError(f"{args.model}: simulation requires a preferences block")
    model = env.model
    steps = args.horizon if args.horizon is not None else model.horizon
    policies = enumerate_policies(model.num_actions, model.horizon)

    header = (
        ["time", "action", "observation"]
        + [f"belief_{i}" for i in range(model.num_states)]
        + [f"{name}_total" for name in FUNCTIONALS]
    )
    rows = []
    belief = model.initial_prior
    for t in range(steps):
        try:
            evals = evaluate_policies(
                policies, args.functional, belief, model, pref, eta=args.eta
            )
            posterior = policy_posterior(evals, gamma=args.gamma)
            chosen_idx = int(np.argmax(posterior.probs))
            chosen = policies[chosen_idx]
            action = select_action(posterior, policies)
            # Chosen-policy totals under all four objectives, scored from
            # the planning-time belief.
            totals = [
                evals[chosen_idx].total if name == args.functional
                else evaluate_policy(chosen, name, belief, model, pref, eta=args.eta).total
                for name in FUNCTIONALS
            ]
            observation, env = env_step(env, action)
            belief = bayes_posterior(
                belief_predict(belief, action, model), model.likelihood, observation
            ).dist
        except AifError as exc:
            print(f"error at step {t}: {exc}", file=sys.stderr)
            return 1
        rows.append(
            [str(t), str(action), str(observation)]
            + [_fmt(b) for b in belief.probs]
            + [_fmt(v) for v in totals]
        )
    if args.format == "csv":
        text = "\n".join([",".join(header)] + [",".join(r) for r in rows]) + "\n"
    else:
        blocks = []
        for row in rows:
            blocks.append("\n".join(f"{k} = {v}" for k, v in zip(header, row)))
        text = "\n\n".join(blocks) + "\n"
    _write(text, args.out)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        _check_common(args)
        if args.subcommand == "verify":
            return cmd_verify(args)
        if args.subcommand == "plan":
            return cmd_plan(args)
        return cmd_simulate(args)
    except (ParseError, ValidationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except AifError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
