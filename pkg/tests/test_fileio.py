import random
from pathlib import Path
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tfne.crypto import ToyOWP
from tfne.errors import ParseError
from tfne.fileio import (
    emit_ce_file,
    emit_constraint_file,
    emit_game_file,
    emit_strategy_file,
    load_constraint_file,
    parse_ce_file,
    parse_constraint_file,
    parse_game_file,
    parse_strategy_file,
)
from tfne.game import ExtensiveGame, NormalFormGame, leaf, node, validate_game
from tfne.protocols import owp
from tfne.random_games import random_behavioral, random_bimatrix, random_game

from conftest import CORPUS as _CORPUS

CORPUS = Path(_CORPUS)


def _text(name):
    return (CORPUS / name).read_text()


@pytest.mark.parametrize("name", ["oneshot.eg", "entry.eg", "owp_n2.eg", "owp_modified_n2.eg", "bos.bm"])
def test_corpus_games_round_trip(name):
    g = parse_game_file(_text(name))
    assert parse_game_file(emit_game_file(g)) == g
    if isinstance(g, ExtensiveGame):
        assert validate_game(g) == []


@pytest.mark.parametrize("name", ["entry_out.st", "entry_in.st", "entry_fight.st", "entry_accommodate.st"])
def test_corpus_strategies_round_trip(name):
    s = parse_strategy_file(_text(name))
    assert parse_strategy_file(emit_strategy_file(s)) == s


@pytest.mark.parametrize("name", ["bos_uniform.ce", "bos_dominated.ce"])
def test_corpus_ce_round_trip(name):
    w = parse_ce_file(_text(name))
    assert parse_ce_file(emit_ce_file(w)) == w
    assert sum(w.values()) == 1


def test_oneshot_game():
    g = parse_game_file(_text("oneshot.eg"))
    assert g == ExtensiveGame.from_tree(node(1, {"left": leaf(1, 0), "right": leaf(0, 1)}))


def test_corpus_permutation_games_match_builders():
    f = ToyOWP.parse(_text("owp_n2.perm"))
    assert parse_game_file(_text("owp_n2.eg")) == owp.build_owp_game(2, f)
    assert parse_game_file(_text("owp_modified_n2.eg")) == owp.build_modified_owp_game(2, f)


def test_bimatrix_file():
    nf = parse_game_file(_text("bos.bm"))
    assert isinstance(nf, NormalFormGame)
    assert nf == NormalFormGame.from_matrices([[2, 0], [0, 1]], [[1, 0], [0, 2]])


def test_constraint_file():
    t = load_constraint_file(str(CORPUS / "entry.ct"))
    assert len(t.t1) == 2 and len(t.t2) == 2
    files = {"a.st": _text("entry_out.st"), "b.st": _text("entry_fight.st")}
    text = emit_constraint_file(["a.st"], ["b.st"])
    t = parse_constraint_file(text, "", read=files.__getitem__)
    assert t.t1 == (parse_strategy_file(files["a.st"]),)
    with pytest.raises(ParseError):
        parse_constraint_file(emit_constraint_file(["b.st"], ["b.st"]), "", read=files.__getitem__)
    with pytest.raises(ParseError):
        parse_constraint_file("constraints\nt1 a.st\n", "", read=files.__getitem__)


BAD_GAMES = {
    "dangling child": "extensive\nroot n0\nnode n0 player=1 a=n1 b=n2\nleaf n1 u1=0 u2=0\n",
    "duplicate id": "extensive\nroot n0\nnode n0 player=1 a=n1\nleaf n1 u1=0 u2=0\nleaf n1 u1=1 u2=1\n",
    "shared child": "extensive\nroot n0\nnode n0 player=1 a=n1 b=n1\nleaf n1 u1=0 u2=0\n",
    "bad rational": "extensive\nroot n0\nnode n0 player=1 a=n1\nleaf n1 u1=0.5 u2=0\n",
    "slash in label": "extensive\nroot n0\nnode n0 player=1 a/b=n1\nleaf n1 u1=0 u2=0\n",
    "bad header": "game\n",
    "empty": "# nothing\n",
    "short row": "bimatrix 2 2\n(1,1) (0,0)\n(0,0)\n",
}


@pytest.mark.parametrize("case", sorted(BAD_GAMES))
def test_malformed_games_raise_parse_error(case):
    with pytest.raises(ParseError):
        parse_game_file(BAD_GAMES[case])


def test_dangling_child_names_the_line():
    with pytest.raises(ParseError) as e:
        parse_game_file(BAD_GAMES["dangling child"])
    assert "line 3" in str(e.value) and "n2" in str(e.value)


@pytest.mark.parametrize(
    "text",
    [
        "strategy player=3\n",
        "strategy player=1\nat / : a=1/2\n",
        "strategy player=1\nat / : a=1\nat / : b=1\n",
        "strategy player=1\nat // : a=1\n",
        "strategy player=1\nat / a=1\n",
    ],
)
def test_malformed_strategies_raise_parse_error(text):
    with pytest.raises(ParseError):
        parse_strategy_file(text)


def test_malformed_ce_files():
    for text in ("", "x 1\n", "0 1/2\n0 1/2\n", "0 0.5\n"):
        with pytest.raises(ParseError):
            parse_ce_file(text)


seeds = st.integers(0, 10**6)


@given(seeds)
def test_random_games_round_trip(seed):
    rng = random.Random(seed)
    g = random_game(rng, depth=rng.randint(1, 4), branching=3, generic=False)
    assert parse_game_file(emit_game_file(g)) == g
    s = random_behavioral(rng, g, rng.choice((1, 2)))
    assert parse_strategy_file(emit_strategy_file(s)) == s


@given(seeds)
def test_random_bimatrices_round_trip(seed):
    rng = random.Random(seed)
    nf = random_bimatrix(rng, rng.randint(1, 4), rng.randint(1, 4))
    assert parse_game_file(emit_game_file(nf)) == nf


@given(st.dictionaries(st.integers(0, 9), st.fractions(min_value=0, max_value=5), min_size=1))
def test_ce_weights_round_trip(w):
    assert parse_ce_file(emit_ce_file(w)) == {i: Fraction(x) for i, x in w.items()}
