"""Knowledge-base container and the line-oriented KB file format.

A debugging instance is a four-part structure: the debuggable axioms K,
trusted background formulas B, positive test cases P (must be entailed)
and negative test cases N (must not be entailed).  Files use section
headers ``[K]`` ``[B]`` ``[P]`` ``[N]``, one formula per non-blank line,
``#`` comments.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .sat import entails, find_model
from .syntax import Formula, ParseError, evaluate_formula, formula_to_text, parse_formula


@dataclass(frozen=True)
class Axiom:
    """One debuggable statement of K, keeping the text it was written as."""

    id: int
    formula: Formula
    source_text: str

    def __str__(self) -> str:
        return self.source_text


@dataclass(frozen=True)
class KnowledgeBase:
    axioms: tuple[Axiom, ...]
    background: tuple[Formula, ...] = ()
    positive: tuple[Formula, ...] = ()
    negative: tuple[Formula, ...] = ()

    def __post_init__(self) -> None:
        for pos, ax in enumerate(self.axioms):
            if ax.id != pos:
                raise ValueError(f"axiom ids must be dense: position {pos} holds id {ax.id}")

    def formulas_of(self, ids: Iterable[int]) -> tuple[Formula, ...]:
        return tuple(self.axioms[i].formula for i in ids)

    def all_ids(self) -> frozenset[int]:
        return frozenset(range(len(self.axioms)))

    def extended(self, positive: Sequence[Formula] = (), negative: Sequence[Formula] = ()) -> "KnowledgeBase":
        """The same KB with new test cases appended (used after each answer)."""
        if not positive and not negative:
            return self
        return KnowledgeBase(
            self.axioms,
            self.background,
            self.positive + tuple(positive),
            self.negative + tuple(negative),
        )


_HEADERS = {"[K]": "K", "[B]": "B", "[P]": "P", "[N]": "N"}


def parse_kb(text: str) -> KnowledgeBase:
    """Parse the KB file format; raise ParseError with line/column on bad input."""
    sections: dict[str, list] = {}
    current: str | None = None
    last_line = 1

    for lineno, raw in enumerate(text.splitlines(), start=1):
        last_line = lineno
        content = raw.split("#", 1)[0]
        stripped = content.strip()
        if not stripped:
            continue
        if stripped in _HEADERS:
            name = _HEADERS[stripped]
            if name in sections:
                raise ParseError(f"duplicate section [{name}]", lineno, content.index("[") + 1)
            sections[name] = []
            current = name
            continue
        if stripped.startswith("["):
            raise ParseError(f"unknown section header {stripped!r}", lineno, content.index("[") + 1)
        if current is None:
            raise ParseError("formula outside any section (expected a [K]/[B]/[P]/[N] header first)", lineno, 1)
        # pass the unstripped slice so error columns match the file
        formula = parse_formula(content, line=lineno)
        sections[current].append((formula, stripped))

    axioms = tuple(
        Axiom(i, formula, text) for i, (formula, text) in enumerate(sections.get("K", ()))
    )
    if not axioms:
        raise ParseError("knowledge base has no axioms (section [K] missing or empty)", last_line, 1)
    return KnowledgeBase(
        axioms=axioms,
        background=tuple(f for f, _ in sections.get("B", ())),
        positive=tuple(f for f, _ in sections.get("P", ())),
        negative=tuple(f for f, _ in sections.get("N", ())),
    )


def kb_to_text(kb: KnowledgeBase) -> str:
    lines = ["[K]"]
    lines += [ax.source_text for ax in kb.axioms]
    for header, formulas in (("[B]", kb.background), ("[P]", kb.positive), ("[N]", kb.negative)):
        if formulas:
            lines.append(header)
            lines += [formula_to_text(f) for f in formulas]
    return "\n".join(lines) + "\n"


def violates(k_part: Iterable[Formula], kb: KnowledgeBase) -> bool:
    """True iff k_part ∪ B ∪ P is inconsistent or entails a negative test case.

    The returned model of the consistency check doubles as a cheap
    counterexample filter: only negative test cases it satisfies need a
    real entailment check.
    """
    context = list(k_part) + list(kb.background) + list(kb.positive)
    model = find_model(context)
    if model is None:
        return True
    for negated in kb.negative:
        if evaluate_formula(negated, model) and entails(context, negated):
            return True
    return False
