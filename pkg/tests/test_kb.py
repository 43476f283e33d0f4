from __future__ import annotations

import pytest

from conftest import CHAIN_KB_TEXT, FOUR_KB_TEXT
from oracle_loop.kb import Axiom, KnowledgeBase, kb_to_text, parse_kb, violates
from oracle_loop.syntax import Implies, Not, ParseError, Var
from support import soup_kbs


def test_parse_sections_and_comments():
    kb = parse_kb(
        """
        # a broken chain
        [K]
        x          # the fact
        x -> y
        y -> z
        [B]
        ~z
        """
    )
    assert [ax.source_text for ax in kb.axioms] == ["x", "x -> y", "y -> z"]
    assert kb.axioms[1].formula == Implies(Var("x"), Var("y"))
    assert kb.background == (Not(Var("z")),)
    assert kb.positive == () and kb.negative == ()


def test_axiom_ids_are_dense_and_str_is_source_text():
    kb = parse_kb(FOUR_KB_TEXT)
    assert [ax.id for ax in kb.axioms] == [0, 1, 2, 3]
    assert str(kb.axioms[1]) == "~a"
    with pytest.raises(ValueError):
        KnowledgeBase(axioms=(Axiom(1, Var("a"), "a"),))


@pytest.mark.parametrize(
    "text,fragment",
    [
        ("[K]\na\n[K]\nb\n", "duplicate section"),
        ("[Q]\na\n", "unknown section header"),
        ("a -> b\n", "outside any section"),
        ("[B]\na\n", "no axioms"),
        ("", "no axioms"),
    ],
)
def test_structural_errors(text, fragment):
    with pytest.raises(ParseError) as err:
        parse_kb(text)
    assert fragment in str(err.value)


def test_formula_errors_point_at_file_coordinates():
    with pytest.raises(ParseError) as err:
        parse_kb("[K]\na\n  b -> \n")
    assert err.value.line == 3
    assert err.value.column == 8  # the end of `  b -> `


def test_round_trip_through_text():
    for kb in [parse_kb(FOUR_KB_TEXT), parse_kb(CHAIN_KB_TEXT)] + soup_kbs(8, seed=5):
        again = parse_kb(kb_to_text(kb))
        assert [ax.formula for ax in again.axioms] == [ax.formula for ax in kb.axioms]
        assert again.background == kb.background
        assert again.positive == kb.positive
        assert again.negative == kb.negative


def test_extended_appends_test_cases_functionally():
    kb = parse_kb(CHAIN_KB_TEXT)
    grown = kb.extended(positive=[Var("x")], negative=[Var("w")])
    assert grown.positive == (Var("x"),)
    assert grown.negative == (Var("w"),)
    assert kb.positive == ()  # original untouched
    assert grown.axioms is kb.axioms
    assert kb.extended() is kb


def test_violates_inconsistency_and_negative_entailment():
    kb = parse_kb(FOUR_KB_TEXT)
    formulas = [ax.formula for ax in kb.axioms]
    assert violates(formulas, kb)
    assert not violates((), kb)
    assert violates(formulas[:2], kb)  # {a, ~a}
    assert not violates([formulas[0], formulas[2]], kb)  # {a, b}

    chained = parse_kb("[K]\nx\nx -> y\n[N]\ny\n")
    assert violates([ax.formula for ax in chained.axioms], chained)
    assert not violates([chained.axioms[1].formula], chained)
