"""Simulated experts: the oracle and the four answering behaviors.

The intended knowledge base is K \\ D* — everything outside the seeded
fault set is correct, everything inside is not.  All four profiles
consult that same oracle and differ only in how much of it they reveal
per query (and therefore how many axioms they had to evaluate).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .queries import Query


class ExpertProfile(enum.Enum):
    QUERY_BASED = "qb"
    MINIMALIST = "min"
    PRAGMATIST = "prag"
    MAXIMALIST = "max"


@dataclass(frozen=True)
class TargetDiagnosis:
    """The seeded actually-faulty axioms D*; ground truth of a scenario."""

    axiom_ids: frozenset[int]

    def __contains__(self, ax: int) -> bool:
        return ax in self.axiom_ids

    def __iter__(self):
        return iter(sorted(self.axiom_ids))


class AnswerKind(enum.Enum):
    WHOLE_QUERY_TRUE = "whole_true"
    WHOLE_QUERY_FALSE = "whole_false"
    AXIOM_LABELS = "labels"


@dataclass(frozen=True)
class Answer:
    """What the expert said, plus how many axioms they evaluated to say it."""

    kind: AnswerKind
    labels: tuple[tuple[int, bool], ...]
    effort: int

    def __post_init__(self) -> None:
        if self.kind is not AnswerKind.AXIOM_LABELS and self.labels:
            raise ValueError("whole-query answers carry no per-axiom labels")
        if self.effort < 1:
            raise ValueError("answering always evaluates at least one axiom")


def oracle_label(ax: int, dstar: TargetDiagnosis) -> bool:
    """True iff the intended KB retains the axiom (ax ∉ D*)."""
    return ax not in dstar


def answer_query(query: Query, profile: ExpertProfile, dstar: TargetDiagnosis) -> Answer:
    """Answer per profile, labels following the query's presentation order.

    Effort counts evaluated axioms: a scan stops at the first false label
    for everyone except the maximalist, and an all-true query costs |Q|
    regardless of profile.
    """
    labels = [(ax, oracle_label(ax, dstar)) for ax in query.axiom_ids]
    first_false = next((i for i, (_, value) in enumerate(labels) if not value), None)

    if first_false is None:
        if profile is ExpertProfile.QUERY_BASED:
            return Answer(AnswerKind.WHOLE_QUERY_TRUE, (), len(labels))
        return Answer(AnswerKind.AXIOM_LABELS, tuple(labels), len(labels))

    j = first_false + 1  # axioms evaluated up to and including the first false
    if profile is ExpertProfile.QUERY_BASED:
        return Answer(AnswerKind.WHOLE_QUERY_FALSE, (), j)
    if profile is ExpertProfile.MINIMALIST:
        return Answer(AnswerKind.AXIOM_LABELS, (labels[first_false],), j)
    if profile is ExpertProfile.PRAGMATIST:
        return Answer(AnswerKind.AXIOM_LABELS, tuple(labels[:j]), j)
    return Answer(AnswerKind.AXIOM_LABELS, tuple(labels), len(labels))
