from __future__ import annotations

import pytest

from oracle_loop.kb import parse_kb

# K = {a, ~a, b, ~b}: two disjoint conflicts, four two-axiom diagnoses.
FOUR_KB_TEXT = "[K]\na\n~a\nb\n~b\n"

# Implication chain that is broken by the background: three singleton diagnoses.
CHAIN_KB_TEXT = "[K]\nx\nx -> y\ny -> z\n[B]\n~z\n"

# The chain used throughout the docs: a -> x -> y -> b with a asserted and b forbidden.
DOC_CHAIN_KB_TEXT = "[K]\na -> x\nx -> y\ny -> b\n[B]\na\n[N]\nb\n"


@pytest.fixture
def four_kb():
    return parse_kb(FOUR_KB_TEXT)


@pytest.fixture
def chain_kb():
    return parse_kb(CHAIN_KB_TEXT)


@pytest.fixture
def doc_chain_kb():
    return parse_kb(DOC_CHAIN_KB_TEXT)
