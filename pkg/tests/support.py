"""Shared builders for the test suite: small random instances and session walks."""

from __future__ import annotations

import random
from dataclasses import dataclass

from oracle_loop.bench import Scenario, make_batch
from oracle_loop.experts import Answer, ExpertProfile, TargetDiagnosis, answer_query
from oracle_loop.kb import Axiom, KnowledgeBase, violates
from oracle_loop.queries import Query
from oracle_loop.session import SessionConfig, SessionState, integrate_answer, new_session, next_query
from oracle_loop.syntax import And, Formula, Implies, Not, Or, Var, formula_to_text


def small_scenarios(count: int, seed: int) -> list[Scenario]:
    """Generated scenarios kept small enough for brute-force cross-checks."""
    return make_batch(count, master_seed=seed, min_axioms=10, max_axioms=12,
                      max_fault_cardinality=2)


def _random_formula(rng: random.Random, num_vars: int) -> Formula:
    def var() -> Formula:
        node: Formula = Var(f"v{rng.randrange(num_vars)}")
        return Not(node) if rng.random() < 0.4 else node

    shape = rng.randrange(4)
    if shape == 0:
        return var()
    ctor = (And, Or, Implies)[shape - 1]
    return ctor(var(), var())


def random_soup_kb(rng: random.Random) -> KnowledgeBase | None:
    """A small arbitrary-shape KB, or None when the draw is not debuggable.

    Unlike the chain scenarios these have no planned conflict structure, so
    they exercise the solver-facing paths on messier inputs.
    """
    num_vars = rng.randint(2, 4)
    formulas = [_random_formula(rng, num_vars) for _ in range(rng.randint(4, 9))]
    background = (Var("v0"),) if rng.random() < 0.3 else ()
    negative = (Var(f"v{num_vars - 1}"),) if rng.random() < 0.3 else ()
    kb = KnowledgeBase(
        axioms=tuple(Axiom(i, f, formula_to_text(f)) for i, f in enumerate(formulas)),
        background=background,
        negative=negative,
    )
    if violates((), kb) or not violates(formulas, kb):
        return None
    return kb


def soup_kbs(count: int, seed: int) -> list[KnowledgeBase]:
    rng = random.Random(seed)
    found: list[KnowledgeBase] = []
    while len(found) < count:
        kb = random_soup_kb(rng)
        if kb is not None:
            found.append(kb)
    return found


@dataclass(frozen=True)
class WalkStep:
    before: SessionState
    query: Query
    answer: Answer
    after: SessionState


def walk_session(
    kb: KnowledgeBase,
    config: SessionConfig,
    profile: ExpertProfile,
    dstar: TargetDiagnosis,
    max_iterations: int = 400,
) -> list[WalkStep]:
    """Drive a session to completion, keeping every intermediate state."""
    state = new_session(kb, config)
    steps: list[WalkStep] = []
    for _ in range(max_iterations):
        if state.finished:
            return steps
        query = next_query(state)
        answer = answer_query(query, profile, dstar)
        after = integrate_answer(state, query, answer)
        steps.append(WalkStep(state, query, answer, after))
        state = after
    raise AssertionError("session did not finish within the iteration budget")
