"""Command-line front end: ``quitgame <command> --game FILE ...``.

Exit status is 0 on success, 1 on a domain error (the error class name is
printed), 2 on a usage error. ``--json`` prints a machine-readable record;
numbers are written with 12 significant digits.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import montecarlo, one_step, perturbation, repeated, solver
from .errors import QuittingGameError
from .game import (
    EventuallyCyclicProfile,
    OneStepGame,
    check_profile,
    parse_vector,
    validate_game,
)
from .probability import rho


class UsageError(Exception):
    pass


def fmt_number(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    s = f"{x:.12g}"
    v = float(s)
    if v == 0.0:
        return 0
    if v.is_integer() and abs(v) < 1e15:
        return int(v)
    return v


def tidy(obj):
    """Recursively convert numpy values and round floats for output."""
    if isinstance(obj, dict):
        return {str(k): tidy(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [tidy(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [tidy(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt_number(obj)
    return obj


def _read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise UsageError(f"{path} is not valid JSON: {e}") from None


def _one_step_inputs(args, game, need_p=True):
    flag_p = getattr(args, "p", None)
    if args.input and (args.v is not None or flag_p is not None):
        raise UsageError("give vectors either in --input or as --v/--p, not both")
    raw = _read_json(args.input) if args.input else {"v": args.v, "p": flag_p}
    v = raw.get("v")
    p = raw.get("p")
    if v is None:
        raise UsageError("missing continuation vector (--v or 'v' in --input)")
    if need_p and p is None:
        raise UsageError("missing profile (--p or 'p' in --input)")
    g = OneStepGame(game, parse_vector(v, game.num_players, what="v"))
    if need_p:
        return g, check_profile(p, game.num_players)
    return g, None


def _player_index(value, game):
    if not 1 <= value <= game.num_players:
        raise UsageError(f"player must be between 1 and {game.num_players}, got {value}")
    return value - 1


def cmd_validate(args, game):
    return {
        "players": game.num_players,
        "coalitions": (1 << game.num_players) - 1,
        "r_max": game.r_max,
        "payoffs": game.to_dict()["payoffs"],
    }, {}, []


def cmd_eval_onestep(args, game):
    g, p = _one_step_inputs(args, game)
    consts = one_step.game_constants(g)
    return (
        {
            "gamma": one_step.one_step_payoff(g, p),
            "continue_prob": rho(p, 0),
            "r_max": consts.r_max,
            "delta_v": consts.delta_v,
        },
        {"v": g.v, "p": p},
        list(one_step.near_boundary_warnings(p)),
    )


def cmd_check_perfect(args, game):
    g, p = _one_step_inputs(args, game)
    rep = one_step.perfectness_report(g, p)
    out = {
        "diffs": rep.diffs,
        "classes": [c.value for c in rep.classes],
        "violations": rep.violations,
        "epsilon_star": rep.epsilon_star,
    }
    return out, {"v": g.v, "p": p}, list(rep.warnings)


def cmd_check_eq(args, game):
    g, p = _one_step_inputs(args, game)
    cert = one_step.equilibrium_certificate(g, p)
    out = {
        "current_values": cert.current_values,
        "best_pure_deviation_values": cert.best_pure_deviation_values,
        "best_pure_deviation_actions": list(cert.best_pure_deviation_actions),
        "gains": cert.gains,
        "epsilon_star": cert.epsilon_star,
    }
    return out, {"v": g.v, "p": p}, list(one_step.near_boundary_warnings(p))


def cmd_convert(args, game):
    g, p = _one_step_inputs(args, game)
    rep = one_step.convert_certificates(g, p)
    intervals = [
        {**iv, "player": iv["player"] + 1} for iv in rep.sharper_intervals
    ]
    out = {
        "xi_p": rep.xi_p,
        "xi_per_player": rep.xi_per_player,
        "equilibrium_epsilon": rep.equilibrium_epsilon,
        "perfectness_epsilon": rep.perfectness_epsilon,
        "perfect_implies_equilibrium": rep.forward_holds,
        "equilibrium_implies_xi_perfect": rep.backward_holds,
        "sharper_intervals": intervals,
        "sharper_holds": rep.sharper_holds,
    }
    return out, {"v": g.v, "p": p}, list(one_step.near_boundary_warnings(p))


def cmd_perturb(args, game):
    g, p = _one_step_inputs(args, game)
    m = _player_index(args.player, game)
    eta = one_step.perfectness_report(g, p).epsilon_star if args.eta is None else args.eta
    rep = perturbation.theorem1_report(g, p, m, args.lam, eta)
    out = {
        "player": m + 1,
        "lambda": rep.lam,
        "eta": rep.eta,
        "eta_verified": rep.eta_verified,
        "p_hat": rep.p_hat,
        "continue_prob": rep.continue_prob,
        "continue_prob_hat": rep.continue_prob_hat,
        "continue_prob_ratio": rep.continue_prob_ratio,
        "payoff_mix_residual": rep.payoff_mix_residual,
        "payoff_shift": rep.payoff_shift,
        "shift_bound": rep.shift_bound,
        "eta_tilde": rep.eta_tilde,
        "p_hat_epsilon": rep.p_hat_epsilon,
        "p_hat_diffs": rep.p_hat_diffs,
        "item4_scope": rep.item4_scope,
        "checks": {
            "continue_prob_scaled": rep.item1_holds,
            "payoff_mix": rep.item2_holds,
            "shift_bound": rep.item3_holds,
            "perfectness_bound": rep.item4_holds,
        },
    }
    return out, {"v": g.v, "p": p, "player": m + 1, "lambda": args.lam, "eta": eta}, []


def _profile(args, game):
    raw = _read_json(args.profile)
    return EventuallyCyclicProfile.from_dict(raw, game.num_players)


def cmd_eval(args, game):
    pi = _profile(args, game)
    res = repeated.repeated_payoff(game, pi)
    out = {
        "payoff": res.payoff,
        "termination_prob": res.termination_prob,
        "per_cycle_continue": res.per_cycle_continue,
        "prefix_continue": res.prefix_continue,
    }
    if args.truncate is not None:
        if args.truncate < 1:
            raise UsageError("--truncate must be at least 1")
        tr = repeated.truncated_payoff(game, pi, args.truncate)
        out["truncated"] = {"horizon": tr.horizon, "payoff": tr.payoff, "tail_bound": tr.tail_bound}
    return out, {"profile": pi.to_dict(), "truncate": args.truncate}, []


def _deviation_dict(dev):
    return {
        "player": dev.player + 1,
        "best_value": dev.best_value,
        "prefix_policy": list(dev.prefix_policy),
        "cycle_policy": list(dev.cycle_policy),
    }


def cmd_best_response(args, game):
    pi = _profile(args, game)
    n = _player_index(args.player, game)
    dev = repeated.best_response(game, pi, n)
    out = _deviation_dict(dev)
    out["current_value"] = repeated.repeated_payoff(game, pi).payoff[n]
    return out, {"profile": pi.to_dict(), "player": n + 1}, []


def cmd_check_eq_quitting(args, game):
    pi = _profile(args, game)
    cert = repeated.equilibrium_certificate_repeated(game, pi)
    out = {
        "payoff": cert.payoff,
        "best_values": cert.best_values,
        "gaps": cert.gaps,
        "epsilon_star": cert.epsilon_star,
        "deviations": [_deviation_dict(d) for d in cert.deviations],
    }
    return out, {"profile": pi.to_dict()}, []


def cmd_check_subgame(args, game):
    pi = _profile(args, game)
    cert = repeated.subgame_certificate(game, pi)
    out = {"epsilon_star": cert.epsilon_star, "per_shift": cert.per_shift, "worst_shift": cert.worst_shift}
    return out, {"profile": pi.to_dict()}, []


def cmd_solve_onestep(args, game):
    g, _ = _one_step_inputs(args, game, need_p=False)
    if args.eps < 0:
        raise UsageError("--eps must be non-negative")
    found = solver.find_one_step_equilibrium(g, args.eps)
    out = {
        "count": len(found),
        "profiles": [
            {"p": p, "epsilon_star": one_step.equilibrium_certificate(g, p).epsilon_star, "gamma": one_step.one_step_payoff(g, p)}
            for p in found
        ],
    }
    warnings = [] if found else ["NoneFound: no profile within eps"]
    return out, {"v": g.v, "eps": args.eps}, warnings


def cmd_psi(args, game):
    g, _ = _one_step_inputs(args, game, need_p=False)
    cert = solver.construct_psi_member(g, args.eps)
    check = solver.verify_psi_certificate(g, cert)
    out = {
        "valid": cert.valid and check.valid,
        "p_source": cert.p_source,
        "m": cert.m + 1,
        "p_hat": cert.p_hat,
        "gamma_hat": cert.gamma_hat,
        "checks": {
            "in_V": {"ok": cert.in_V, "witness": None if cert.in_V_witness is None else cert.in_V_witness + 1},
            "perfect": {"ok": cert.perfect_ok, "epsilon_star": cert.perfect_epsilon, "bound": cert.perfect_bound},
            "continue_bound": {"ok": cert.continue_ok, "continue_prob": cert.continue_prob, "bound": 1.0 - cert.eps},
        },
        "verified_independently": check.valid,
    }
    return out, {"v": g.v, "eps": args.eps}, []


def cmd_simulate(args, game):
    pi = _profile(args, game)
    if args.trials < 1 or args.horizon < 1:
        raise UsageError("--trials and --horizon must be at least 1")
    summary = montecarlo.simulate(game, pi, args.trials, args.horizon, args.seed)
    return summary.to_dict(), {"profile": pi.to_dict(), "trials": args.trials, "horizon": args.horizon, "seed": args.seed}, []


COMMANDS = {
    "validate": (cmd_validate, "check a game file"),
    "eval-onestep": (cmd_eval_onestep, "expected payoff of a one-step game"),
    "check-perfect": (cmd_check_perfect, "smallest eps for which p is eps-perfect"),
    "check-eq": (cmd_check_eq, "smallest eps for which p is a one-step eps-equilibrium"),
    "convert": (cmd_convert, "relations between the two certificates via xi_p"),
    "perturb": (cmd_perturb, "raise one player's quit probability and check the consequences"),
    "eval": (cmd_eval, "expected payoff of an eventually-cyclic profile"),
    "best-response": (cmd_best_response, "best deviation of one player in the full game"),
    "check-eq-quitting": (cmd_check_eq_quitting, "equilibrium gap of a profile in the full game"),
    "check-subgame": (cmd_check_subgame, "worst equilibrium gap over all subgames"),
    "solve-onestep": (cmd_solve_onestep, "find one-step equilibria"),
    "psi": (cmd_psi, "construct and certify a member of psi_eps(v)"),
    "simulate": (cmd_simulate, "Monte-Carlo estimate of the payoff"),
}

ONE_STEP = {"eval-onestep", "check-perfect", "check-eq", "convert", "perturb"}
ONE_STEP_V = {"solve-onestep", "psi"}
PROFILE = {"eval", "best-response", "check-eq-quitting", "check-subgame", "simulate"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="quitgame", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (_, help_) in COMMANDS.items():
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.add_argument("--game", required=True, help="game JSON file")
        sp.add_argument("--json", action="store_true", help="print JSON instead of a table")
        if name in ONE_STEP or name in ONE_STEP_V:
            sp.add_argument("--input", help="JSON file with 'v' (and 'p')")
            sp.add_argument("--v", help="continuation vector, e.g. 0,2 or 9/10,10/9")
        if name in ONE_STEP:
            sp.add_argument("--p", help="quit probabilities, e.g. 1,0.1")
        if name in PROFILE:
            sp.add_argument("--profile", required=True, help="profile JSON file")
        if name == "perturb":
            sp.add_argument("--player", type=int, required=True, help="player to perturb (1-indexed)")
            sp.add_argument("--lambda", dest="lam", type=float, required=True)
            sp.add_argument("--eta", type=float, default=None, help="claimed perfectness of p (default: its exact level)")
        if name == "eval":
            sp.add_argument("--truncate", type=int, help="also report the partial sum over this many stages")
        if name == "best-response":
            sp.add_argument("--player", type=int, required=True, help="deviating player (1-indexed)")
        if name in ONE_STEP_V:
            sp.add_argument("--eps", type=float, required=True)
        if name == "simulate":
            sp.add_argument("--trials", type=int, default=100_000)
            sp.add_argument("--horizon", type=int, default=montecarlo.DEFAULT_HORIZON)
            sp.add_argument("--seed", type=int, default=0)
    return parser


def _digest(command, game, inputs) -> str:
    blob = json.dumps({"command": command, "game": game.to_dict(), "inputs": tidy(inputs)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def _table_lines(obj, prefix=""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, dict) or (isinstance(v, list) and v and isinstance(v[0], dict)):
                yield f"{prefix}{k}:"
                yield from _table_lines(v, prefix + "  ")
            else:
                yield f"{prefix}{k:<28} {_cell(v)}"
    elif isinstance(obj, list):
        for i, v in enumerate(obj, 1):
            yield f"{prefix}[{i}]"
            yield from _table_lines(v, prefix + "  ")


def _cell(v):
    if isinstance(v, list):
        return "(" + ", ".join(_cell(x) for x in v) + ")"
    if v is None:
        return "-"
    return str(v)


def run(argv=None, out=sys.stdout, err=sys.stderr) -> int:
    try:
        args = build_parser().parse_args(argv)
        game = validate_game(_read_json(args.game))
        handler = COMMANDS[args.command][0]
        result, inputs, warnings = handler(args, game)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return 2
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except QuittingGameError as e:
        print(f"error: {type(e).__name__}: {e}", file=err)
        return 1

    record = {
        "command": args.command,
        "inputs_digest": _digest(args.command, game, inputs),
        "result": tidy(result),
        "warnings": list(warnings),
    }
    if args.json:
        print(json.dumps(record, indent=2), file=out)
    else:
        print(f"{args.command}  (inputs {record['inputs_digest'][:12]})", file=out)
        for line in _table_lines(record["result"], "  "):
            print(line, file=out)
        for w in warnings:
            print(f"warning: {w}", file=out)
    return 0


def main(argv=None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
