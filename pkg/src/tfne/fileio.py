"""Line-oriented text formats for games, strategies, constraint sets and CE weights.

Extensive game::

    extensive
    root n0
    node n0 player=1 a=n1 b=n2
    leaf n1 u1=1 u2=-1/2

Bimatrix game::

    bimatrix 2 2
    (2,1) (0,0)
    (0,0) (1,2)

Strategy (``/`` is the root, deeper histories join labels with ``/``)::

    strategy player=1
    at / : a=1/2 b=1/2

Constraint set (paths relative to the file)::

    constraints
    t1 honest.st
    t2 p2.st

CE weights: one ``<ne-index> <rational>`` per line.  ``#`` starts a comment.
"""
from __future__ import annotations

import os
import re
from fractions import Fraction

from .errors import ParseError, format_history
from .game import ROOT, BehavioralStrategy, ConstraintSet, ExtensiveGame, NormalFormGame, as_fraction

_CELL = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _rat(tok: str, lineno: int) -> Fraction:
    try:
        if not re.fullmatch(r"[+-]?\d+(/\d+)?", tok):
            raise ValueError
        return as_fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(lineno, f"not an exact rational: {tok!r}") from None


def _kv(tok: str, lineno: int):
    if "=" not in tok:
        raise ParseError(lineno, f"expected key=value, got {tok!r}")
    k, v = tok.rsplit("=", 1)
    if not k or not v:
        raise ParseError(lineno, f"expected key=value, got {tok!r}")
    return k, v


def _fmt(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


# ---------------------------------------------------------------------------
# games


def parse_game_file(text: str):
    """Parse an ``extensive`` or ``bimatrix`` document."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError(0, "empty game file")
    lineno, head = lines[0]
    word = head.split()[0]
    if word == "extensive":
        return _parse_extensive(lines)
    if word == "bimatrix":
        return _parse_bimatrix(lines)
    raise ParseError(lineno, "header must be 'extensive' or 'bimatrix'")


def _parse_extensive(lines):
    head_line, head = lines[0]
    if head.split() != ["extensive"]:
        raise ParseError(head_line, "unexpected text after 'extensive'")
    nodes, leaves, root = {}, {}, None
    defined = {}
    for lineno, line in lines[1:]:
        parts = line.split()
        kind = parts[0]
        if kind == "root":
            if len(parts) != 2:
                raise ParseError(lineno, "expected 'root <id>'")
            if root is not None:
                raise ParseError(lineno, "root given twice")
            root = (parts[1], lineno)
            continue
        if kind not in ("node", "leaf") or len(parts) < 2:
            raise ParseError(lineno, f"unknown line kind {kind!r}")
        nid = parts[1]
        if nid in defined:
            raise ParseError(lineno, f"id {nid!r} already defined on line {defined[nid]}")
        defined[nid] = lineno
        if kind == "leaf":
            vals = dict(_kv(t, lineno) for t in parts[2:])
            if set(vals) != {"u1", "u2"}:
                raise ParseError(lineno, "leaf needs exactly u1=<rat> u2=<rat>")
            leaves[nid] = (_rat(vals["u1"], lineno), _rat(vals["u2"], lineno))
            continue
        if len(parts) < 4 or not parts[2].startswith("player="):
            raise ParseError(lineno, "expected 'node <id> player=<1|2> <label>=<child> ...'")
        player = parts[2].split("=", 1)[1]
        if player not in ("1", "2"):
            raise ParseError(lineno, f"player must be 1 or 2, got {player!r}")
        kids = []
        for tok in parts[3:]:
            label, child = _kv(tok, lineno)
            if "/" in label:
                raise ParseError(lineno, f"action label {label!r} may not contain '/'")
            if any(label == a for a, _ in kids):
                raise ParseError(lineno, f"action label {label!r} repeated")
            kids.append((label, child))
        nodes[nid] = (int(player), kids, lineno)
    if root is None:
        raise ParseError(0, "missing 'root <id>' line")
    for nid, (_, kids, lineno) in nodes.items():
        for label, child in kids:
            if child not in nodes and child not in leaves:
                raise ParseError(lineno, f"child id {child!r} of action {label!r} is not defined")
    if root[0] not in defined:
        raise ParseError(root[1], f"root id {root[0]!r} is not defined")

    actions, owner, payoffs = {}, {}, {}
    used = {}
    stack = [(root[0], ROOT)]
    while stack:
        nid, h = stack.pop()
        if nid in used:
            line = nodes[nid][2] if nid in nodes else defined[nid]
            raise ParseError(line, f"id {nid!r} is reached twice; the file must describe a tree")
        used[nid] = h
        if nid in leaves:
            payoffs[h] = leaves[nid]
            continue
        player, kids, _ = nodes[nid]
        owner[h] = player
        actions[h] = tuple(a for a, _ in kids)
        for a, child in reversed(kids):
            stack.append((child, h + (a,)))
    for nid, lineno in defined.items():
        if nid not in used:
            raise ParseError(lineno, f"id {nid!r} is not reachable from the root")
    return ExtensiveGame(actions, owner, payoffs)


def _parse_bimatrix(lines):
    lineno, head = lines[0]
    parts = head.split()
    if len(parts) != 3 or not parts[1].isdigit() or not parts[2].isdigit():
        raise ParseError(lineno, "expected 'bimatrix <rows> <cols>'")
    m, n = int(parts[1]), int(parts[2])
    if m < 1 or n < 1:
        raise ParseError(lineno, "bimatrix dimensions must be positive")
    body = lines[1:]
    if len(body) != m:
        raise ParseError(body[-1][0] if body else lineno, f"expected {m} rows, found {len(body)}")
    mat = []
    for lineno, line in body:
        cells = _CELL.findall(line)
        if _CELL.sub("", line).strip() or len(cells) != n:
            raise ParseError(lineno, f"expected {n} cells of the form (u1,u2)")
        mat.append(tuple((_rat(a, lineno), _rat(b, lineno)) for a, b in cells))
    return NormalFormGame(tuple(f"r{i}" for i in range(m)), tuple(f"c{j}" for j in range(n)), tuple(mat))


def emit_game_file(g) -> str:
    if isinstance(g, NormalFormGame):
        m, n = g.shape
        out = [f"bimatrix {m} {n}"]
        for row in g.payoffs:
            out.append(" ".join(f"({_fmt(a)},{_fmt(b)})" for a, b in row))
        return "\n".join(out) + "\n"
    ids = {h: f"n{k}" for k, h in enumerate(g.histories())}
    out = ["extensive", f"root {ids[ROOT]}"]
    for h in g.histories():
        if g.is_terminal(h):
            u1, u2 = g.payoff(h)
            out.append(f"leaf {ids[h]} u1={_fmt(u1)} u2={_fmt(u2)}")
        else:
            kids = " ".join(f"{a}={ids[h + (a,)]}" for a in g.actions(h))
            out.append(f"node {ids[h]} player={g.player(h)} {kids}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# strategies


def _parse_path(tok: str, lineno: int):
    if tok == "/":
        return ROOT
    parts = tok.split("/")
    if any(not p for p in parts):
        raise ParseError(lineno, f"malformed history {tok!r}")
    return tuple(parts)


def parse_strategy_file(text: str) -> BehavioralStrategy:
    lines = list(_lines(text))
    if not lines:
        raise ParseError(0, "empty strategy file")
    lineno, head = lines[0]
    m = re.fullmatch(r"strategy\s+player=([12])", head)
    if not m:
        raise ParseError(lineno, "header must be 'strategy player=<1|2>'")
    player = int(m.group(1))
    choice = {}
    for lineno, line in lines[1:]:
        parts = line.split()
        if len(parts) < 4 or parts[0] != "at" or parts[2] != ":":
            raise ParseError(lineno, "expected 'at <history> : <label>=<rat> ...'")
        h = _parse_path(parts[1], lineno)
        if h in choice:
            raise ParseError(lineno, f"history {parts[1]} listed twice")
        dist = {}
        for tok in parts[3:]:
            a, w = _kv(tok, lineno)
            if a in dist:
                raise ParseError(lineno, f"action {a!r} repeated")
            dist[a] = _rat(w, lineno)
        if any(w < 0 for w in dist.values()) or sum(dist.values()) != 1:
            raise ParseError(lineno, "probabilities must be nonnegative and sum to 1")
        choice[h] = dist
    return BehavioralStrategy(player, choice)


def emit_strategy_file(s: BehavioralStrategy) -> str:
    out = [f"strategy player={s.player}"]
    for h, d in sorted(s.items(), key=lambda kv: (len(kv[0]), kv[0])):
        body = " ".join(f"{a}={_fmt(w)}" for a, w in sorted(d.items()))
        out.append(f"at {format_history(h)} : {body}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# constraint sets


def parse_constraint_file(text: str, base_dir: str = ".", read=None) -> ConstraintSet:
    """Read ``t1 <path>`` / ``t2 <path>`` lines and load each strategy file."""
    read = read or (lambda p: open(p, encoding="utf-8").read())
    lines = list(_lines(text))
    if not lines or lines[0][1] != "constraints":
        raise ParseError(lines[0][0] if lines else 0, "header must be 'constraints'")
    sides = {1: [], 2: []}
    for lineno, line in lines[1:]:
        parts = line.split(None, 1)
        if len(parts) != 2 or parts[0] not in ("t1", "t2"):
            raise ParseError(lineno, "expected 't1 <path>' or 't2 <path>'")
        player = int(parts[0][1])
        path = os.path.join(base_dir, parts[1].strip())
        try:
            s = parse_strategy_file(read(path))
        except OSError as e:
            raise ParseError(lineno, f"cannot read {parts[1].strip()}: {e.strerror}") from None
        except ParseError as e:
            raise ParseError(lineno, f"in {parts[1].strip()}: {e}") from None
        if s.player != player:
            raise ParseError(lineno, f"{parts[1].strip()} holds a strategy of player {s.player}")
        sides[player].append(s)
    if not sides[1] or not sides[2]:
        raise ParseError(0, "both t1 and t2 need at least one strategy")
    return ConstraintSet(tuple(sides[1]), tuple(sides[2]))


def emit_constraint_file(paths1, paths2) -> str:
    return "constraints\n" + "".join(f"t1 {p}\n" for p in paths1) + "".join(f"t2 {p}\n" for p in paths2)


def load_constraint_file(path: str) -> ConstraintSet:
    with open(path, encoding="utf-8") as fh:
        return parse_constraint_file(fh.read(), os.path.dirname(os.path.abspath(path)))


# ---------------------------------------------------------------------------
# CE weights


def parse_ce_file(text: str) -> dict:
    out = {}
    for lineno, line in _lines(text):
        parts = line.split()
        if len(parts) != 2 or not parts[0].isdigit():
            raise ParseError(lineno, "expected '<ne-index> <rational>'")
        idx = int(parts[0])
        if idx in out:
            raise ParseError(lineno, f"index {idx} listed twice")
        out[idx] = _rat(parts[1], lineno)
    if not out:
        raise ParseError(0, "empty CE file")
    return out


def emit_ce_file(weights: dict) -> str:
    return "".join(f"{i} {_fmt(as_fraction(w))}\n" for i, w in sorted(weights.items()))
