"""Query generation and one-step-lookahead scoring.

Queries are subsets of K shown to the expert.  Restricting queries to K
makes the q-partition a pure membership computation: a leading diagnosis
D is predicted to survive a positive answer iff D ∩ Q = ∅ (the query
axioms all remain in K \\ D), and minimality of diagnoses makes that
classification semantically exact, so no reasoner is needed during
selection.  Singleton queries are scored over the discriminating axioms;
normal queries over all realizable bipartitions of the leading set.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Sequence

from .diagnosis import DiagnosisSet
from .kb import KnowledgeBase


class UnrealizablePartitionError(ValueError):
    """No query within K can produce the requested bipartition."""


class Heuristic(enum.Enum):
    ENT = "ent"
    SPL = "spl"


@dataclass(frozen=True)
class Query:
    """Ordered axiom ids; presentation order is ascending id by convention."""

    axiom_ids: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.axiom_ids:
            raise ValueError("query must contain at least one axiom")
        if list(self.axiom_ids) != sorted(set(self.axiom_ids)):
            raise ValueError(f"query axioms must be unique and ascending, got {self.axiom_ids}")

    def __len__(self) -> int:
        return len(self.axiom_ids)

    def __iter__(self):
        return iter(self.axiom_ids)


def make_query(ids: Iterable[int]) -> Query:
    return Query(tuple(sorted(set(ids))))


@dataclass(frozen=True)
class QPartition:
    """Indices into the leading DiagnosisSet, split by predicted reaction."""

    d_plus: tuple[int, ...]
    d_minus: tuple[int, ...]
    d_zero: tuple[int, ...] = ()


def q_partition_by_membership(query: Query, ds: DiagnosisSet) -> QPartition:
    """Partition leading diagnoses by intersection with the query.

    For Q ⊆ K this is exact: D ∩ Q = ∅ puts D in dPlus (a true answer
    keeps D alive), any overlap puts it in dMinus; dZero stays empty.
    """
    q = frozenset(query.axiom_ids)
    d_plus, d_minus = [], []
    for i, d in enumerate(ds.diagnoses):
        (d_minus if d.axiom_ids & q else d_plus).append(i)
    return QPartition(tuple(d_plus), tuple(d_minus))


def discriminating_axioms(ds: DiagnosisSet) -> frozenset[int]:
    """Axioms in the union but not the intersection of the leading diagnoses.

    Exactly the axioms ax for which Q={ax} has both dPlus and dMinus
    nonempty, hence the candidate pool for singleton queries.
    """
    sets = [d.axiom_ids for d in ds.diagnoses]
    if not sets:
        return frozenset()
    union = frozenset().union(*sets)
    common = sets[0].intersection(*sets[1:]) if len(sets) > 1 else sets[0]
    return union - common


def score_spl(partition: QPartition) -> float:
    return abs(len(partition.d_plus) - len(partition.d_minus)) + len(partition.d_zero)


def score_ent(partition: QPartition, probs: Sequence[float]) -> float:
    p_plus = sum(probs[i] for i in partition.d_plus)
    p_minus = sum(probs[i] for i in partition.d_minus)
    p_zero = sum(probs[i] for i in partition.d_zero)
    return abs(p_plus - p_minus) + p_zero


def _score(partition: QPartition, ds: DiagnosisSet, heuristic: Heuristic) -> float:
    if heuristic is Heuristic.SPL:
        return score_spl(partition)
    return score_ent(partition, ds.probs)


def select_best_sq(ds: DiagnosisSet, heuristic: Heuristic) -> Query | None:
    """Best singleton query by pure membership bookkeeping.

    O(|K|·|ds|) set operations, no solver involvement; ties go to the
    lowest axiom id.  None when fewer than two diagnoses remain.
    """
    if len(ds) < 2:
        return None
    best: tuple[float, int] | None = None
    for ax in sorted(discriminating_axioms(ds)):
        query = Query((ax,))
        score = _score(q_partition_by_membership(query, ds), ds, heuristic)
        if best is None or score < best[0]:
            best = (score, ax)
    if best is None:
        return None
    return Query((best[1],))


_BIPARTITION_GUARD = 12


def enumerate_realizable_bipartitions(
    ds: DiagnosisSet, kb: KnowledgeBase
) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """All (dPlus, dMinus) index splits some query Q ⊆ K can realize.

    A split is realizable iff the pool K \\ ∪(dPlus diagnoses) — the only
    axioms Q may draw from without disturbing dPlus — still intersects
    every dMinus diagnosis.  Memberships are bitmasks, so each candidate
    costs a handful of word operations.
    """
    n = len(ds)
    if not 2 <= n <= _BIPARTITION_GUARD:
        raise ValueError(f"bipartition enumeration needs 2 ≤ |ds| ≤ {_BIPARTITION_GUARD}, got {n}")

    masks = []
    for d in ds.diagnoses:
        mask = 0
        for ax in d.axiom_ids:
            mask |= 1 << ax
        masks.append(mask)
    k_mask = (1 << len(kb.axioms)) - 1

    result = []
    for split in range(1, (1 << n) - 1):
        union_plus = 0
        for i in range(n):
            if split & (1 << i):
                union_plus |= masks[i]
        pool = k_mask & ~union_plus
        if all(masks[i] & pool for i in range(n) if not split & (1 << i)):
            d_plus = tuple(i for i in range(n) if split & (1 << i))
            d_minus = tuple(i for i in range(n) if not split & (1 << i))
            result.append((d_plus, d_minus))
    return result


def realize_query(
    d_plus: Sequence[int], d_minus: Sequence[int], ds: DiagnosisSet, kb: KnowledgeBase
) -> Query:
    """Construct a subset-minimal query producing exactly this bipartition.

    Greedy set cover over the pool (most uncovered dMinus diagnoses
    first, ties to the lowest id), then a deletion pass for
    subset-minimality.  The membership partition of the result reproduces
    (dPlus, dMinus) by construction.
    """
    union_plus = frozenset().union(*(ds.diagnoses[i].axiom_ids for i in d_plus)) if d_plus else frozenset()
    pool = kb.all_ids() - union_plus
    targets = {i: ds.diagnoses[i].axiom_ids & pool for i in d_minus}
    if any(not hit for hit in targets.values()):
        raise UnrealizablePartitionError(
            f"dMinus diagnoses {sorted(i for i, hit in targets.items() if not hit)} "
            "cannot be hit without touching dPlus"
        )

    chosen: list[int] = []
    uncovered = set(targets)
    while uncovered:
        gain = {}
        for i in uncovered:
            for ax in targets[i]:
                gain[ax] = gain.get(ax, 0) + 1
        ax = min(gain, key=lambda a: (-gain[a], a))
        chosen.append(ax)
        uncovered = {i for i in uncovered if ax not in targets[i]}

    # deletion pass: drop anything the rest still covers
    for ax in sorted(chosen):
        rest = [c for c in chosen if c != ax]
        if rest and all(any(c in targets[i] for c in rest) for i in d_minus):
            chosen = rest

    query = make_query(chosen)
    check = q_partition_by_membership(query, ds)
    if set(check.d_plus) != set(d_plus) or set(check.d_minus) != set(d_minus):
        raise UnrealizablePartitionError(f"realized query {query} does not reproduce the bipartition")
    return query


def select_best_normal_query(ds: DiagnosisSet, kb: KnowledgeBase, heuristic: Heuristic) -> Query | None:
    """Best normal query over all realizable bipartitions of the leading set.

    Scores come straight from the partitions; only score-tied candidates
    get realized, and ties resolve to the smallest query, then
    lexicographic axiom ids.
    """
    if len(ds) < 2:
        return None
    candidates = enumerate_realizable_bipartitions(ds, kb)
    if not candidates:
        return None

    best_score: float | None = None
    tied: list[tuple[tuple[int, ...], tuple[int, ...]]] = []
    for d_plus, d_minus in candidates:
        score = _score(QPartition(d_plus, d_minus), ds, heuristic)
        if best_score is None or score < best_score - 1e-12:
            best_score, tied = score, [(d_plus, d_minus)]
        elif abs(score - best_score) <= 1e-12:
            tied.append((d_plus, d_minus))

    best_query: Query | None = None
    for d_plus, d_minus in tied:
        query = realize_query(d_plus, d_minus, ds, kb)
        if best_query is None or (len(query), query.axiom_ids) < (len(best_query), best_query.axiom_ids):
            best_query = query
    return best_query
