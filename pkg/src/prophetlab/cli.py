"""Command-line front end: ``prophetlab {bounds,verify-lemma,dp,mc,ode}``.

Every command prints (or writes to ``--out``) a report
``{"run": {"command", "config"}, "rows": [...]}`` in JSON, or the same rows
as CSV.  Output depends only on the arguments, so identical invocations give
byte-identical files.  Exit status: 0 ok, 1 usage error, 2 a row missed its
reference value by more than the tolerance.
"""

from __future__ import annotations

import argparse
import math
import sys
from fractions import Fraction

import numpy as np

from . import bounds as B
from . import continuum as C
from . import instances as I
from . import montecarlo as M
from . import offline as O
from . import online as D

DP_FAMILIES = ("adversarial_2ba", "prophet_matching", "secretary_matching", "secretary_2ba",
               "single_choice", "iid_cycle", "iid_jackpot")
MC_FAMILIES = ("single_choice", "secretary_matching", "secretary_2ba", "iid_jackpot")

# parameters at which the headline bounds are attained
HEADLINE = {
    "epsilon": 1e-4,
    "p": 0.299130,
    "q_pm": 0.364352,
    "lambda": {"single_choice": 1.36603, "secretary_matching": 2.27861,
               "secretary_2ba": 1.36987, "iid_jackpot": 1.4737},
    "theta": 2.8224,
}
DEFAULT_M = {"dp": 8, "mc": 200, "iid_jackpot": 2000}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _positive(kind):
    def conv(text):
        v = kind(text)
        if v <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--tol", type=_positive(float), default=None,
                        help="absolute tolerance against reference values")

    fam = argparse.ArgumentParser(add_help=False)
    fam.add_argument("--m", type=_positive(int))
    fam.add_argument("--lambda", dest="lam", type=float)
    fam.add_argument("--theta", type=float)
    fam.add_argument("--mode", choices=I.MODES)

    parser = _Parser(prog="prophetlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("bounds", parents=[common], help="recompute the six headline bounds")

    p = sub.add_parser("verify-lemma", parents=[common], help="exact 4-cycle matching suite")
    p.add_argument("--q", type=_positive(int), default=6, help="largest q to check (at most 7)")

    p = sub.add_parser("dp", parents=[common, fam], help="exact online optimum vs offline optimum")
    p.add_argument("--family", choices=DP_FAMILIES, default="adversarial_2ba")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--p", type=float)
    p.add_argument("--q", type=float, help="q of the prophet instance, or number of pairs for iid_cycle")

    p = sub.add_parser("mc", parents=[common, fam], help="Monte Carlo run of a threshold policy")
    p.add_argument("--family", choices=MC_FAMILIES, default="secretary_matching")
    p.add_argument("--s", type=float, help="first threshold (T for single_choice, s* for iid_jackpot)")
    p.add_argument("--t", type=float, help="second threshold")
    p.add_argument("--trials", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--opt", action="store_true", help="also estimate the offline optimum")
    p.add_argument("--log", help="append the estimate to this CSV log")

    p = sub.add_parser("ode", parents=[common, fam], help="integrate the rolling-particle value function")
    p.add_argument("--step", type=float, default=1e-4)
    p.add_argument("--trajectory", help="write (t, alpha, one_plus_beta) CSV here")
    return parser


# -- commands ----------------------------------------------------------------------

def cmd_bounds(args) -> list[B.BoundReport]:
    return B.headline_bounds()


def cmd_verify_lemma(args) -> list[B.BoundReport]:
    if args.q > 7:
        raise UsageError("--q must be at most 7 for the brute-force suite")
    rows = []
    for q in range(1, args.q + 1):
        inst = I.build_iid_cycle(q)
        brute = O.expected_opt_exact(inst)
        formula = O.iid_cycle_opt(q)
        rows.append(_exact_row("offline_F", q, brute, formula))
        online = D.optimal_online_iid(inst).value
        rows.append(_exact_row("online", q, online, O.iid_cycle_online(q)))
    return rows


def _exact_row(name, q, got: Fraction, want: Fraction) -> B.BoundReport:
    row = B.BoundReport(name, {"q": q, "computed": str(got), "formula": str(want),
                               "exact_match": got == want}, float(got), float(want), setting="4-cycle, IID pairs")
    if got != want:
        # exact suite: any rational difference is a failure, however small
        row.abs_err = math.inf
    return row


def _lam(args, family):
    return args.lam if args.lam is not None else HEADLINE["lambda"][family]


def cmd_dp(args) -> list[B.BoundReport]:
    fam = args.family
    mode = args.mode or (I.NUMERIC if fam == "iid_jackpot" else I.EXACT)
    ref_ratio = None
    if fam == "adversarial_2ba":
        eps = args.epsilon if args.epsilon is not None else HEADLINE["epsilon"]
        inst = I.build_adversarial_2ba(eps, mode)
        params = {"epsilon": eps}
        ref_ratio = B.REFERENCE_VALUES["adversarial_2ba"]
    elif fam == "prophet_matching":
        p = args.p if args.p is not None else HEADLINE["p"]
        q = args.q if args.q is not None else HEADLINE["q_pm"]
        eps = args.epsilon if args.epsilon is not None else HEADLINE["epsilon"]
        inst = I.build_prophet_matching(p, q, eps, mode)
        params = {"p": p, "q": q, "epsilon": eps}
        ref_ratio = B.REFERENCE_VALUES["prophet_matching"]
    elif fam == "iid_cycle":
        q = int(args.q) if args.q is not None else 3
        if args.q is not None and q != args.q:
            raise UsageError("--q must be an integer for iid_cycle")
        inst = I.build_iid_cycle(q, mode)
        params = {"q": q}
    elif fam == "iid_jackpot":
        m = args.m or DEFAULT_M["iid_jackpot"]
        lam = _lam(args, fam)
        theta = args.theta if args.theta is not None else HEADLINE["theta"]
        inst = I.build_iid_jackpot(m, lam, theta, mode)
        params = {"m": m, "lambda": lam, "theta": theta}
    else:
        m = args.m or DEFAULT_M["dp"]
        lam = _lam(args, fam)
        builder = {"secretary_matching": I.build_secretary_matching, "secretary_2ba": I.build_secretary_2ba,
                   "single_choice": I.build_single_choice_secretary}[fam]
        inst = builder(m, lam, mode)
        params = {"m": m, "lambda": lam}

    if isinstance(inst.arrival, I.FixedOrder):
        alg = D.optimal_online_fixed_order(inst).value
    elif isinstance(inst.arrival, I.UniformRandomOrder):
        alg = D.optimal_online_random_order(inst).value
    else:
        alg = D.optimal_online_iid(inst).value

    if fam == "iid_jackpot":
        e_opt = O.expected_opt_finite_jackpot(params["m"], inst.param["lambda"], inst.param["theta"], mode)
    elif isinstance(inst.arrival, I.UniformRandomOrder):
        e_opt = O.expected_opt_exact(inst, exchangeable=True)
    else:
        e_opt = O.expected_opt_exact(inst)
    ratio = alg / e_opt
    setting = B.SETTINGS.get(fam, fam)
    return [
        B.BoundReport("alg", _with_exact(params, alg), float(alg), setting=setting),
        B.BoundReport("e_opt", _with_exact(params, e_opt), float(e_opt), setting=setting),
        B.BoundReport("ratio", _with_exact(params, ratio), float(ratio), ref_ratio, setting=setting),
    ]


def _with_exact(params, x):
    return dict(params, exact=str(x)) if isinstance(x, Fraction) else dict(params)


def cmd_mc(args) -> list[B.BoundReport]:
    if args.trials < 1:
        raise UsageError(f"--trials must be at least 1, got {args.trials}")
    fam = args.family
    lam = _lam(args, fam)
    m = args.m or (DEFAULT_M["iid_jackpot"] if fam == "iid_jackpot" else DEFAULT_M["mc"])
    mode = args.mode or I.NUMERIC
    params = {"m": m, "lambda": lam}
    if fam == "iid_jackpot":
        theta = args.theta if args.theta is not None else HEADLINE["theta"]
        inst = I.build_iid_jackpot(m, lam, theta, mode)
        sc = C.s_star(lam, theta)
        s = args.s if args.s is not None else sc
        policy = M.ThresholdPolicy.iid_particle(s)
        ref = C.alpha_one(lam, theta) if s == sc else None
        params.update(theta=theta, s_star=s)
        opt_ref = float(O.expected_opt_finite_jackpot(m, lam, theta, I.NUMERIC))
    elif fam == "single_choice":
        inst = I.build_single_choice_secretary(m, lam, mode)
        T = args.s if args.s is not None else C.single_choice_threshold(lam)
        policy = M.ThresholdPolicy.single_choice(T)
        ref = C.single_choice_value(lam, T)
        params.update(T=T)
        opt_ref = float(O.expected_opt_finite_secretary(fam, m, lam))
    else:
        if fam == "secretary_matching":
            inst = I.build_secretary_matching(m, lam, mode)
            th, alg = B.optimal_thresholds_secretary_matching(lam), B.alg_secretary_matching
        else:
            inst = I.build_secretary_2ba(m, lam, mode)
            th, alg = B.optimal_thresholds_secretary_2ba(lam), B.alg_secretary_2ba
        s = args.s if args.s is not None else th.s
        t = args.t if args.t is not None else th.t
        if not 0 <= s <= t <= 1:
            raise UsageError(f"thresholds must satisfy 0 <= s <= t <= 1, got s={s}, t={t}")
        policy = M.ThresholdPolicy.secretary_two_stage(s, t)
        ref = float(alg(s, t, lam))
        params.update(s=s, t=t)
        opt_ref = float(O.expected_opt_finite_secretary(fam, m, lam))

    limit = O.expected_opt_limit(fam, {"lambda": lam, "theta": params.get("theta", 0.0)})
    samples = M.policy_samples(inst, policy, args.trials, args.seed, with_opt=args.opt)
    w, opt = samples if args.opt else (samples, None)
    est = M.MCEstimate.from_samples(w, args.seed)
    if args.log:
        M.append_csv_log(args.log, inst, policy, est)
    run = dict(params, trials=est.trials, seed=args.seed, stderr=est.stderr)
    rows = [B.BoundReport("policy_mean", run, est.mean, ref, setting=inst.label)]
    if opt is not None:
        opt_est = M.MCEstimate.from_samples(opt, args.seed)
        rows.append(B.BoundReport("opt_mean", dict(run, stderr=opt_est.stderr), opt_est.mean, opt_ref,
                                  setting=inst.label))
    # finite-m bias of the limit formulas is budgeted explicitly on top of 3 stderr
    for r in rows:
        r.params["tol"] = args.tol if args.tol is not None else 3 * r.params["stderr"] + 0.01 * limit
    return rows


def cmd_ode(args) -> list[B.BoundReport]:
    lam = _lam(args, "iid_jackpot")
    theta = args.theta if args.theta is not None else HEADLINE["theta"]
    if not 0 < args.step <= 1e-2:
        raise UsageError(f"--step must lie in (0, 0.01], got {args.step}")
    sc = C.s_star(lam, theta)
    if sc >= 1:
        raise UsageError(f"s* = {sc} is not below 1 for lambda={lam}, theta={theta}")
    sol = C.alpha_numeric(lam, theta, args.step)
    if args.trajectory:
        sol.to_csv(args.trajectory)
    params = {"lambda": lam, "theta": theta, "step": args.step}
    before = sol.grid <= sc
    err = float(np.max(np.abs(sol.alpha_values[before] - C.alpha_closed(sol.grid[before], lam, theta))))
    after = sol.grid > sc + 0.01
    slope = np.diff(sol.alpha_values)[after[:-1]] / np.diff(sol.grid)[after[:-1]]
    slope_err = float(np.max(np.abs(slope - lam))) if slope.size else 0.0
    a1 = sol.alpha_values[-1]
    opt = O.expected_opt_limit("iid_jackpot", {"lambda": lam, "theta": theta})
    setting = B.SETTINGS["iid_2ba"]
    return [
        B.BoundReport("s_star", params, sol.s_star, sc, setting=setting),
        B.BoundReport("alpha_1", params, a1, C.alpha_one(lam, theta), setting=setting),
        B.BoundReport("max_err_before_s_star", params, err, 0.0, setting=setting),
        B.BoundReport("max_slope_err_after_s_star", params, slope_err, 0.0, setting=setting),
        B.BoundReport("ratio", dict(params, opt_limit=opt), a1 / opt, B.bound_iid(lam, theta), setting=setting),
    ]


COMMANDS = {"bounds": cmd_bounds, "verify-lemma": cmd_verify_lemma, "dp": cmd_dp, "mc": cmd_mc, "ode": cmd_ode}
DEFAULT_TOL = {"bounds": 1e-4, "verify-lemma": 1e-12, "dp": 1e-3, "ode": 1e-4}


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k != "command"}


def failures(rows, tol) -> list[str]:
    bad = []
    for r in rows:
        limit = r.params.get("tol", tol)
        if r.abs_err is not None and not r.abs_err <= limit:
            bad.append(f"{r.name}: |{r.value!r} - {r.reference!r}| = {r.abs_err!r} > {limit!r}")
    return bad


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows = COMMANDS[args.command](args)
    except (UsageError, I.DomainError, B.ValidityError, ValueError) as exc:
        print(f"prophetlab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    tol = args.tol if args.tol is not None else DEFAULT_TOL.get(args.command, 0.0)
    run = {"command": args.command, "config": _config(args)}
    text = B.reports_to_json(rows, run) + "\n" if args.format == "json" else B.reports_to_csv(rows)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    bad = failures(rows, tol)
    for line in bad:
        print(f"tolerance failure: {line}", file=sys.stderr)
    return 2 if bad else 0


if __name__ == "__main__":
    sys.exit(main())
