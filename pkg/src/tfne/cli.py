"""Command-line entry point: ``tfne analyze | threats | simulate | verify``.

Exit status is 0 when the requested check passes, 1 when it fails (a witness
is printed) and 2 on bad input.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import verify as suites
from .crypto import make_scheme
from .equilibria import (
    bimatrix_ne_enumerate,
    ce_hull_dominated,
    is_epsilon_ne,
    is_epsilon_safe,
    is_spe,
    is_weakly_pareto_optimal,
    worst_ne_for,
)
from .errors import ParseError, TfneError, format_history
from .fileio import load_constraint_file, parse_ce_file, parse_game_file, parse_strategy_file
from .game import ConstraintSet, ExtensiveGame, NormalFormGame, StrategyProfile, as_fraction, expected_payoffs, validate_game
from .threats import MODES, EpsilonThreatCalculus, RoundStrategy, is_eps_threat_at_round, is_eps_tfne, is_threat_at, is_tfne


class InputError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _fraction(text):
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError):
        raise argparse.ArgumentTypeError(f"not an exact rational: {text!r}") from None


def _fmt_dist(d) -> str:
    return " ".join(f"{a}={w}" for a, w in sorted(d.items()))


def _fmt_strategy(s) -> str:
    if isinstance(s, RoundStrategy):
        items = sorted(s.choice.items())
    else:
        items = sorted(s.items())
    return "; ".join(f"{format_history(h)}: {_fmt_dist(d)}" for h, d in items) or "(empty)"


def _load_game(path) -> ExtensiveGame:
    g = parse_game_file(_read(path))
    if not isinstance(g, ExtensiveGame):
        raise InputError(f"{path} holds a bimatrix game; use --bimatrix")
    problems = validate_game(g)
    if problems:
        raise InputError(f"{path} is not a valid game: " + "; ".join(problems))
    return g


def _load_profile(paths, g) -> StrategyProfile:
    if not paths:
        raise InputError("--profile needs the player-1 and player-2 strategy files")
    s1 = parse_strategy_file(_read(paths[0]))
    s2 = parse_strategy_file(_read(paths[1]))
    if s1.player != 1 or s2.player != 2:
        raise InputError("--profile expects the player-1 file first and the player-2 file second")
    return StrategyProfile(s1, s2).restrict(g)


def _load_constraints(path, g) -> ConstraintSet | None:
    if path is None:
        return None
    try:
        return load_constraint_file(path).restrict(g)
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}") from None


def _need(t, check):
    if t is None:
        raise InputError(f"--check {check} needs --constraints")
    return t


def _witness(verdict, harm: bool = False) -> str:
    player, strategy, gain = verdict.witness
    if isinstance(strategy, StrategyProfile):
        return f"profile [{_fmt_strategy(strategy.s1)}] / [{_fmt_strategy(strategy.s2)}] improves both players by at least {gain}"
    site = "" if verdict.site is None else f" at {format_history(verdict.site)}"
    if harm:
        return f"player {player} lowers player {3 - player}'s payoff by {gain} by deviating to [{_fmt_strategy(strategy)}]"
    return f"player {player} gains {gain}{site} by deviating to [{_fmt_strategy(strategy)}]"


def _threat_line(rep) -> str:
    where = format_history(rep.site) if isinstance(rep.site, tuple) else f"round {rep.site}"
    if not rep:
        return f"no threat for player {rep.player} at {where}"
    return f"player {rep.player} is threatened at {where}: deviation [{_fmt_strategy_or_dist(rep.deviation)}] gains {rep.gap}"


def _fmt_strategy_or_dist(dev) -> str:
    return _fmt_dist(dev) if isinstance(dev, dict) else _fmt_strategy(dev)


# ---------------------------------------------------------------------------
# analyze


def cmd_analyze(args, out) -> int:
    if args.bimatrix:
        return _analyze_bimatrix(args, out)
    if not args.game:
        raise InputError("analyze needs --game or --bimatrix")
    g = _load_game(args.game)
    if not args.check:
        raise InputError("analyze --game needs --check")
    p = _load_profile(args.profile, g)
    t = _load_constraints(args.constraints, g)
    eps = args.epsilon
    u = expected_payoffs(g, p)
    print(f"expected payoffs: u1={u[0]} u2={u[1]}", file=out)
    check = args.check
    if check == "ne":
        v = is_epsilon_ne(g, t, p, eps)
    elif check == "spe":
        v = is_spe(g, p, eps)
    elif check == "pareto":
        v = is_weakly_pareto_optimal(g, _need(t, check), p)
    elif check == "safe":
        v = is_epsilon_safe(g, _need(t, check), p, eps)
    elif check == "tfne":
        v = is_tfne(g, p, mode=args.mode)
        if v:
            print("PASS tfne: threat-free Nash equilibrium", file=out)
            return 0
        if not v.ne:
            print(f"FAIL tfne: not a Nash equilibrium: {_witness(v.ne)}", file=out)
        else:
            print(f"FAIL tfne: {_threat_line(v.threat)}", file=out)
        return 1
    else:  # eps-tfne
        t = _need(t, check)
        calc = EpsilonThreatCalculus(g, t, eps)
        if args.round is not None:
            rep = is_eps_threat_at_round(g, t, p, args.round, eps, calc=calc)
            print(("FAIL" if rep else "PASS") + f" eps-threat at round {args.round}: {_threat_line(rep)}", file=out)
            return 1 if rep else 0
        v = is_eps_tfne(g, t, p, eps, calc=calc)
        if v:
            print(f"PASS eps-tfne at epsilon {eps}", file=out)
            return 0
        if not v.ne:
            print(f"FAIL eps-tfne: not an epsilon-Nash equilibrium: {_witness(v.ne)}", file=out)
        for rep in v.threats:
            print(f"FAIL eps-tfne: {_threat_line(rep)}", file=out)
        return 1
    if v:
        print(f"PASS {check}", file=out)
        return 0
    print(f"FAIL {check}: {_witness(v, harm=check == 'safe')}", file=out)
    return 1


def _analyze_bimatrix(args, out) -> int:
    nf = parse_game_file(_read(args.bimatrix))
    if not isinstance(nf, NormalFormGame):
        raise InputError(f"{args.bimatrix} holds an extensive game; use --game")
    eqs = bimatrix_ne_enumerate(nf)
    for k, e in enumerate(eqs):
        print(f"ne {k}: row=({_fmt_vec(e.row)}) col=({_fmt_vec(e.col)}) payoffs=({e.payoffs[0]},{e.payoffs[1]})", file=out)
    if eqs.degenerate:
        print("warning: degenerate game, only isolated equilibria listed", file=out)
    for i in (1, 2):
        print(f"worst for player {i}: ne {eqs.index(worst_ne_for(nf, i, eqs))}", file=out)
    if not args.ce:
        return 0
    from .protocols.dhr import decompose_ce

    d = decompose_ce(nf, eqs, parse_ce_file(_read(args.ce)))
    target = d.payoffs()
    print(f"ce: l={d.ell} sequence=({','.join(str(i) for i in d.indices)}) payoffs=({target[0]},{target[1]})", file=out)
    dom = ce_hull_dominated(nf, eqs, target)
    if dom:
        w = " ".join(f"{k}:{x}" for k, x in enumerate(dom.weights) if x)
        print(f"FAIL pareto: dominated by weights {w} with margin {dom.margin}", file=out)
        return 1
    print("PASS pareto: no mixture of equilibria improves both players", file=out)
    return 0


def _fmt_vec(v) -> str:
    return ",".join(str(x) for x in v)


# ---------------------------------------------------------------------------
# threats


def cmd_threats(args, out) -> int:
    g = _load_game(args.game)
    p = _load_profile(args.profile, g)
    t = _load_constraints(args.constraints, g)
    found = 0
    if t is not None:
        calc = EpsilonThreatCalculus(g, t, args.epsilon)
        rounds = [args.round] if args.round is not None else range(1, calc.n + 1)
        for r in rounds:
            rep = is_eps_threat_at_round(g, t, p, r, args.epsilon, calc=calc)
            found += bool(rep)
            print(_threat_line(rep), file=out)
    else:
        for h in g.nonterminals():
            rep = is_threat_at(g, p, h, mode=args.mode)
            found += bool(rep)
            print(_threat_line(rep), file=out)
    print(f"{found} threat(s) found", file=out)
    return 1 if found else 0


# ---------------------------------------------------------------------------
# simulate


def cmd_simulate(args, out) -> int:
    from .protocols import coinflip, dhr, owp
    from .protocols.base import empirical_outcome_distribution

    if args.protocol == "coinflip":
        scheme = make_scheme(args.scheme, args.k)
        proto = coinflip.CoinFlipProtocol(args.k, scheme)
        machines = (coinflip.honest_p1(scheme), coinflip.honest_p2(scheme))
    elif args.protocol == "dhr":
        if not args.bimatrix or not args.ce:
            raise InputError("simulate dhr needs --bimatrix and --ce")
        nf = parse_game_file(_read(args.bimatrix))
        if not isinstance(nf, NormalFormGame):
            raise InputError(f"{args.bimatrix} is not a bimatrix game")
        eqs = bimatrix_ne_enumerate(nf)
        d = dhr.decompose_ce(nf, eqs, parse_ce_file(_read(args.ce)))
        scheme = make_scheme(args.scheme, args.k)
        proto = dhr.DHRProtocol(nf, d, args.k, scheme, eqs)
        machines = (dhr.honest_p1(scheme, d.ell), dhr.honest_p2(d.ell))
    else:
        from .crypto import ToyOWP

        f = ToyOWP.random(args.k, seed=0)
        proto = owp.OWPProtocol(f, modified=True)
        machines = owp.claim_instance(f, "ii")
    res = empirical_outcome_distribution(proto, machines, args.k, args.runs, args.seed)
    runs = res["runs"]
    print(f"protocol {args.protocol} k={args.k} scheme={args.scheme} runs={runs} seed={args.seed}", file=out)
    for label, c in sorted(res["labels"].items()):
        print(f"{label}: {c} ({c / runs:.4f})", file=out)
    if args.protocol == "coinflip":
        wins = res["labels"].get("p1-wins", 0)
        print(f"p1-win frequency: {wins / runs:.4f}", file=out)
    if args.protocol == "dhr":
        n = len(proto.d.sequence)
        tv = sum(abs(res["labels"].get(f"index-{j}", 0) / runs - 1 / n) for j in range(n)) / 2
        print(f"leaf-index total variation from uniform: {tv:.4f}", file=out)
    return 0


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args, out) -> int:
    names = list(suites.SUITES) if args.suite == "all" else [args.suite]
    ok = True
    for name in names:
        fn = suites.SUITES[name]
        kwargs = {"seed": args.seed}
        if args.trials is not None:
            kwargs["trials"] = args.trials
        res = fn(**kwargs)
        print(res.summary if len(names) == 1 else f"{name}: {res.summary}", file=out)
        for f in res.failures[:5]:
            print(f"  failure: {f!r}", file=out)
        ok = ok and res.ok
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tfne", description="Threat-free Nash equilibrium checks and protocol instances.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--game", help="extensive game file")
        p.add_argument("--profile", nargs=2, metavar=("P1", "P2"), help="strategy files of player 1 and player 2")
        p.add_argument("--constraints", help="constraint file listing strategy files per player")
        p.add_argument("--epsilon", type=_fraction, default=Fraction(0), help="slack as an exact rational (default 0)")
        p.add_argument("--round", type=int, help="restrict round-based checks to one round")
        p.add_argument("--mode", choices=MODES, default="unconditional", help="payoff comparison for unconstrained threats")

    a = sub.add_parser("analyze", help="check a profile, or list bimatrix equilibria")
    common(a)
    a.add_argument("--check", choices=("ne", "spe", "tfne", "eps-tfne", "pareto", "safe"))
    a.add_argument("--bimatrix", help="bimatrix game file")
    a.add_argument("--ce", help="CE weight file over the listed equilibria")

    t = sub.add_parser("threats", help="report threats at every history or round")
    common(t)

    s = sub.add_parser("simulate", help="run honest machines of a protocol many times")
    s.add_argument("protocol", choices=("coinflip", "dhr", "owp"))
    s.add_argument("--k", type=int, default=2)
    s.add_argument("--scheme", choices=("ideal", "toy"), default="ideal")
    s.add_argument("--runs", type=int, default=10_000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--bimatrix")
    s.add_argument("--ce")

    v = sub.add_parser("verify", help="run a randomized property suite")
    v.add_argument("suite", choices=tuple(suites.SUITES) + ("all",))
    v.add_argument("--trials", type=int)
    v.add_argument("--seed", type=int, default=7)
    return ap


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    handlers = {"analyze": cmd_analyze, "threats": cmd_threats, "simulate": cmd_simulate, "verify": cmd_verify}
    try:
        if args.command == "threats" and (not args.game or not args.profile):
            raise InputError("threats needs --game and --profile")
        if getattr(args, "runs", 1) is not None and getattr(args, "runs", 1) < 1:
            raise InputError("--runs must be positive")
        return handlers[args.command](args, out)
    except (InputError, ParseError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except TfneError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
