"""Minimal conflicts and leading minimal diagnoses.

The engine follows the classic model-based diagnosis recipe: extract
subset-minimal conflicts with a QuickXplain-style divide and conquer,
then search the hitting-set tree for irreducible hitting sets, which are
exactly the minimal diagnoses.  The tree is explored best-first by
diagnosis probability so the first `m` confirmed goals are the leading
diagnoses.

`ViolationTester` funnels every requirement check through one cache.
Violation is monotone in the test cases — a set that violates once keeps
violating as P and N grow — so positive results survive `advance()`
while negative ones are dropped.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from heapq import heappop, heappush
from typing import Iterable, Mapping, Sequence

from .kb import KnowledgeBase
from .sat import ClauseCompiler
from .syntax import Not, evaluate_formula

_DEFAULT_FAULT_PROB = 0.1


class NoDiagnosisError(ValueError):
    """Background plus positive test cases violate requirements on their own."""


class AlreadyValidError(ValueError):
    """The knowledge base satisfies every requirement; nothing to diagnose."""


@dataclass(frozen=True)
class Conflict:
    """Subset-minimal set of axiom ids that violates requirements."""

    axiom_ids: frozenset[int]

    def __iter__(self):
        return iter(sorted(self.axiom_ids))

    def __len__(self) -> int:
        return len(self.axiom_ids)


@dataclass(frozen=True)
class Diagnosis:
    """Irreducible set of axiom ids whose removal restores all requirements."""

    axiom_ids: frozenset[int]

    def __iter__(self):
        return iter(sorted(self.axiom_ids))

    def __len__(self) -> int:
        return len(self.axiom_ids)

    def __contains__(self, ax: int) -> bool:
        return ax in self.axiom_ids


@dataclass(frozen=True)
class FaultProbabilities:
    """Per-axiom fault probability, each strictly inside (0, 1)."""

    p: Mapping[int, float]

    def __post_init__(self) -> None:
        for ax, value in self.p.items():
            if not 0.0 < value < 1.0:
                raise ValueError(f"fault probability for axiom {ax} must be in (0,1), got {value}")

    def of(self, ax: int) -> float:
        return self.p[ax]

    def ratio(self, ax: int) -> float:
        """Odds p/(1−p); the per-axiom factor of the diagnosis weight."""
        value = self.p[ax]
        return value / (1.0 - value)

    @classmethod
    def uniform(cls, kb: KnowledgeBase, p: float = _DEFAULT_FAULT_PROB) -> "FaultProbabilities":
        return cls({ax.id: p for ax in kb.axioms})

    @classmethod
    def from_text(cls, text: str, kb: KnowledgeBase, default: float = _DEFAULT_FAULT_PROB) -> "FaultProbabilities":
        """Parse `axiomIndex<TAB>prob` lines; unlisted axioms get the default."""
        table = {ax.id: default for ax in kb.axioms}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                index_text, prob_text = line.split("\t")
                index, prob = int(index_text), float(prob_text)
            except ValueError as exc:
                raise ValueError(f"probability file line {lineno}: expected 'index<TAB>prob', got {raw!r}") from exc
            if index not in table:
                raise ValueError(f"probability file line {lineno}: no axiom with index {index}")
            table[index] = prob
        return cls(table)


@dataclass(frozen=True)
class DiagnosisSet:
    """Leading diagnoses with normalized probabilities, most probable first."""

    diagnoses: tuple[Diagnosis, ...]
    probs: tuple[float, ...]
    complete: bool

    def __post_init__(self) -> None:
        if len(self.diagnoses) != len(self.probs):
            raise ValueError("diagnoses and probs must have equal length")
        if self.probs and abs(sum(self.probs) - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1, got {sum(self.probs)}")

    def __len__(self) -> int:
        return len(self.diagnoses)

    def __iter__(self):
        return iter(self.diagnoses)


def diagnosis_probability(diagnosis: Diagnosis, probs: FaultProbabilities) -> float:
    """∏_{ax∈D} p(ax) · ∏_{ax∉D} (1−p(ax)) over the whole axiom set."""
    result = 1.0
    for ax in sorted(probs.p):
        value = probs.p[ax]
        result *= value if ax in diagnosis.axiom_ids else 1.0 - value
    return result


def make_diagnosis_set(
    diagnoses: Iterable[Diagnosis], probs: FaultProbabilities, complete: bool
) -> DiagnosisSet:
    ordered = sorted(
        set(diagnoses),
        key=lambda d: (-diagnosis_probability(d, probs), len(d.axiom_ids), tuple(sorted(d.axiom_ids))),
    )
    if not ordered:
        return DiagnosisSet((), (), complete)
    raw = [diagnosis_probability(d, probs) for d in ordered]
    total = sum(raw)
    return DiagnosisSet(tuple(ordered), tuple(r / total for r in raw), complete)


class ViolationTester:
    """Cached requirement checks over subsets of K, shared per debugging session.

    Formula compilation is shared through one ClauseCompiler, results are
    memoized per axiom-id set, and discovered minimal conflicts are kept
    for hitting-set-tree label reuse.  `advance(kb)` moves to a KB with
    grown test cases: violating subsets stay violating (monotonicity), so
    only the non-violating cache and conflict minimality are invalidated.
    """

    def __init__(self, kb: KnowledgeBase) -> None:
        self.kb = kb
        self._compiler = ClauseCompiler()
        self._violating: set[frozenset[int]] = set()
        self._ok: set[frozenset[int]] = set()
        self._conflicts: list[frozenset[int]] = []
        self._stale_conflicts: list[frozenset[int]] = []
        self.eval_count = 0

    def advance(self, kb: KnowledgeBase) -> None:
        if kb.axioms != self.kb.axioms:
            raise ValueError("advance() must keep the same axiom set")
        self.kb = kb
        self._ok.clear()
        self._stale_conflicts.extend(self._conflicts)
        self._conflicts = []

    @property
    def conflicts(self) -> tuple[Conflict, ...]:
        """Minimal conflicts discovered so far under the current test cases."""
        return tuple(Conflict(c) for c in self._conflicts)

    def violates(self, ids: Iterable[int]) -> bool:
        key = frozenset(ids)
        if key in self._violating:
            return True
        if key in self._ok:
            return False
        result = self._evaluate(key)
        (self._violating if result else self._ok).add(key)
        return result

    def _evaluate(self, ids: frozenset[int]) -> bool:
        kb = self.kb
        context = [kb.axioms[i].formula for i in sorted(ids)]
        context += list(kb.background) + list(kb.positive)
        self.eval_count += 1
        model = self._compiler.solve(context)
        if model is None:
            return True
        for negated in kb.negative:
            # the consistency model is a free counterexample: only test
            # cases it satisfies can possibly be entailed
            if evaluate_formula(negated, model):
                self.eval_count += 1
                if self._compiler.solve(context + [Not(negated)]) is None:
                    return True
        return False

    def minimal_conflict(self, candidates: Sequence[int]) -> frozenset[int] | None:
        """A subset-minimal violating subset of `candidates`, or None."""
        ordered = list(candidates)
        if not self.violates(frozenset(ordered)):
            return None
        if self.violates(frozenset()):
            return frozenset()
        core = frozenset(self._quickxplain(frozenset(), False, ordered))
        if core not in self._conflicts:
            self._conflicts.append(core)
        return core

    def _quickxplain(self, background: frozenset[int], check: bool, candidates: list[int]) -> list[int]:
        if check and self.violates(background):
            return []
        if len(candidates) == 1:
            return list(candidates)
        mid = len(candidates) // 2
        left, right = candidates[:mid], candidates[mid:]
        right_core = self._quickxplain(background | frozenset(left), bool(left), right)
        left_core = self._quickxplain(background | frozenset(right_core), bool(right_core), left)
        return left_core + right_core

    def conflict_avoiding(self, path: frozenset[int]) -> frozenset[int] | None:
        """Some minimal conflict disjoint from `path`, or None if none exists."""
        for c in self._conflicts:
            if not (c & path):
                return c
        for i, c in enumerate(self._stale_conflicts):
            if not (c & path):
                # still violating under grown test cases, but possibly no
                # longer minimal — re-minimize before reuse
                del self._stale_conflicts[i]
                return self.minimal_conflict(sorted(c))
        return self.minimal_conflict(sorted(self.kb.all_ids() - path))


def find_minimal_conflict(
    candidates: Sequence[int], kb: KnowledgeBase, tester: ViolationTester | None = None
) -> Conflict | None:
    """Subset-minimal conflict within `candidates` (order-preferring), or None.

    Returns the empty conflict when background and positive test cases
    violate requirements with no axioms at all.
    """
    if tester is None:
        tester = ViolationTester(kb)
    core = tester.minimal_conflict(list(candidates))
    return None if core is None else Conflict(core)


_NODE = 1
_GOAL = 0


def compute_leading_diagnoses(
    kb: KnowledgeBase,
    probs: FaultProbabilities | None = None,
    m: int | None = 9,
    tester: ViolationTester | None = None,
) -> DiagnosisSet:
    """The `m` most probable minimal diagnoses (all of them for m=None).

    Hitting-set tree over minimal conflicts, explored in uniform-cost
    order by an admissible weight bound, so confirmed goals arrive in
    descending probability (ties: ascending cardinality, then
    lexicographic ids).  `complete` is exact: the search continues past
    the m-th goal until either a further diagnosis is confirmed or the
    frontier is exhausted.
    """
    if probs is None:
        probs = FaultProbabilities.uniform(kb)
    if tester is None:
        tester = ViolationTester(kb)
    if m is not None and m < 1:
        raise ValueError(f"m must be positive, got {m}")
    if tester.violates(frozenset()):
        raise NoDiagnosisError("background and positive test cases alone violate requirements")
    all_ids = kb.all_ids()
    if not tester.violates(all_ids):
        raise AlreadyValidError("knowledge base already satisfies all requirements")

    ratio = {ax: probs.ratio(ax) for ax in all_ids}
    root_bound = 1.0
    for r in ratio.values():
        if r > 1.0:
            root_bound *= r

    heap: list[tuple] = [(-root_bound, 0, (), _NODE, frozenset())]
    processed: set[frozenset[int]] = set()
    found: list[frozenset[int]] = []
    complete = False

    while heap:
        neg_bound, card, lex, kind, path = heappop(heap)
        if kind == _GOAL:
            found.append(path)
            if m is not None and len(found) > m:
                found.pop()
                break
            continue
        if path in processed:
            continue
        processed.add(path)
        if any(d <= path for d in found):
            continue  # superset of a known diagnosis: never minimal
        conflict = tester.conflict_avoiding(path)
        if conflict is None:
            # complete hitting set; a diagnosis iff irreducible
            rest = all_ids - path
            if all(tester.violates(rest | {ax}) for ax in sorted(path)):
                weight = 1.0
                for ax in sorted(path):
                    weight *= ratio[ax]
                heappush(heap, (-weight, card, lex, _GOAL, path))
            continue
        for ax in sorted(conflict):
            child = path | {ax}
            if child in processed:
                continue
            bound = -neg_bound * min(ratio[ax], 1.0)
            heappush(heap, (-bound, card + 1, tuple(sorted(child)), _NODE, child))
    else:
        complete = True

    return make_diagnosis_set((Diagnosis(f) for f in found), probs, complete)


_BRUTE_FORCE_LIMIT = 14


def brute_force_diagnoses(
    kb: KnowledgeBase,
    max_card: int | None = None,
    probs: FaultProbabilities | None = None,
) -> DiagnosisSet:
    """All minimal diagnoses up to `max_card` by plain subset enumeration.

    Independent of the hitting-set machinery on purpose — this is the
    oracle the search is validated against.  Guarded to |K| ≤ 14.
    """
    n = len(kb.axioms)
    if n > _BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force limited to |K| ≤ {_BRUTE_FORCE_LIMIT}, got {n}")
    if max_card is None:
        max_card = n
    if probs is None:
        probs = FaultProbabilities.uniform(kb)

    from .kb import violates  # plain uncached test: independence over speed

    found: list[frozenset[int]] = []
    all_ids = sorted(kb.all_ids())
    for card in range(0, max_card + 1):
        for combo in itertools.combinations(all_ids, card):
            d = frozenset(combo)
            if any(prev <= d for prev in found):
                continue
            rest = [kb.axioms[i].formula for i in all_ids if i not in d]
            if not violates(rest, kb):
                found.append(d)
    # a truncated enumeration cannot certify absence of larger diagnoses
    complete = max_card >= n
    return make_diagnosis_set((Diagnosis(f) for f in found), probs, complete)
