"""The sequential debugging loop.

Each iteration selects the best query for the current leading diagnoses,
hands it to the expert, converts the answer into test cases, and
recomputes the leading set.  Answers never need trusting: elimination is
solver-backed (a diagnosis survives iff K minus it still satisfies all
test cases), so semantically redundant axioms cannot slip through.

Queries are selected eagerly — at session creation and after each
integrated answer — and memoized in the state, which keeps `next_query`
pure: calling it twice returns the same object and records nothing.
"""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field, replace
from typing import Iterable

from .diagnosis import (
    Diagnosis,
    DiagnosisSet,
    FaultProbabilities,
    ViolationTester,
    compute_leading_diagnoses,
)
from .experts import Answer, AnswerKind, ExpertProfile, TargetDiagnosis, answer_query
from .kb import KnowledgeBase
from .queries import (
    Heuristic,
    Query,
    q_partition_by_membership,
    select_best_normal_query,
    select_best_sq,
)
from .syntax import conjunction


class QueryType(enum.Enum):
    SQ = "sq"
    NORMAL = "normal"


@dataclass(frozen=True)
class SessionConfig:
    query_type: QueryType = QueryType.SQ
    heuristic: Heuristic = Heuristic.ENT
    leading_cap: int = 9
    fault_probs: FaultProbabilities | None = None
    random_seed: int = 0

    def __post_init__(self) -> None:
        if self.leading_cap < 2:
            raise ValueError(f"leading_cap must be ≥ 2, got {self.leading_cap}")


@dataclass(frozen=True)
class Metrics:
    """#Q, #Ax and the expert's cumulative waiting time."""

    num_queries: int = 0
    num_axioms: int = 0
    compute_time_nanos: int = 0
    per_iteration_nanos: tuple[int, ...] = ()


@dataclass(frozen=True)
class SessionState:
    kb: KnowledgeBase
    config: SessionConfig
    probs: FaultProbabilities
    ds: DiagnosisSet
    history: tuple[tuple[Query, Answer], ...]
    metrics: Metrics
    finished: bool
    result: Diagnosis | None
    pending: Query | None
    pending_nanos: int
    tester: ViolationTester = field(compare=False, repr=False)


def _select(ds: DiagnosisSet, kb: KnowledgeBase, config: SessionConfig) -> tuple[Query, int]:
    start = time.perf_counter_ns()
    if config.query_type is QueryType.SQ:
        query = select_best_sq(ds, config.heuristic)
    else:
        query = select_best_normal_query(ds, kb, config.heuristic)
    elapsed = time.perf_counter_ns() - start
    if query is None:
        # unreachable for Q ⊆ K: any axiom distinguishing two minimal
        # diagnoses realizes a valid bipartition
        raise RuntimeError(f"no valid query exists although {len(ds)} diagnoses remain")
    return query, elapsed


def new_session(kb: KnowledgeBase, config: SessionConfig) -> SessionState:
    probs = config.fault_probs if config.fault_probs is not None else FaultProbabilities.uniform(kb)
    tester = ViolationTester(kb)
    ds = compute_leading_diagnoses(kb, probs, config.leading_cap, tester)
    finished = len(ds) == 1 and ds.complete
    if finished:
        return SessionState(
            kb, config, probs, ds, (), Metrics(), True, ds.diagnoses[0], None, 0, tester
        )
    query, nanos = _select(ds, kb, config)
    metrics = Metrics(compute_time_nanos=nanos, per_iteration_nanos=(nanos,))
    return SessionState(kb, config, probs, ds, (), metrics, False, None, query, nanos, tester)


def next_query(state: SessionState) -> Query | None:
    """The pending query, or None when the session is finished.  Pure."""
    return state.pending


def _validate_answer(query: Query, answer: Answer) -> None:
    if answer.kind is not AnswerKind.AXIOM_LABELS:
        return
    if not answer.labels:
        raise ValueError("an axiom-label answer must label at least one axiom")
    positions = []
    for ax, _ in answer.labels:
        if ax not in query.axiom_ids:
            raise ValueError(f"label for axiom {ax} which is not part of the query")
        positions.append(query.axiom_ids.index(ax))
    if positions != sorted(set(positions)):
        raise ValueError("labels must follow the query's presentation order without repeats")


def _answer_test_cases(query: Query, answer: Answer, kb: KnowledgeBase):
    if answer.kind is AnswerKind.WHOLE_QUERY_TRUE:
        return list(kb.formulas_of(query.axiom_ids)), []
    if answer.kind is AnswerKind.WHOLE_QUERY_FALSE:
        # exactly the information content of a whole-query "false": the
        # intended KB must not entail the conjunction of the query
        return [], [conjunction(kb.formulas_of(query.axiom_ids))]
    positive = [kb.axioms[ax].formula for ax, value in answer.labels if value]
    negative = [kb.axioms[ax].formula for ax, value in answer.labels if not value]
    return positive, negative


def integrate_answer(state: SessionState, query: Query, answer: Answer) -> SessionState:
    """Fold one answer into the session: test cases, elimination, next query."""
    if state.finished or state.pending is None:
        raise ValueError("session has no pending query")
    if query != state.pending:
        raise ValueError(f"answer refers to {query}, but the pending query is {state.pending}")
    _validate_answer(query, answer)

    positive, negative = _answer_test_cases(query, answer, state.kb)
    kb = state.kb.extended(positive, negative)
    state.tester.advance(kb)
    ds = compute_leading_diagnoses(kb, state.probs, state.config.leading_cap, state.tester)

    metrics = replace(
        state.metrics,
        num_queries=state.metrics.num_queries + 1,
        num_axioms=state.metrics.num_axioms + answer.effort,
    )
    history = state.history + ((query, answer),)
    finished = len(ds) == 1 and ds.complete
    if finished:
        return replace(
            state, kb=kb, ds=ds, history=history, metrics=metrics,
            finished=True, result=ds.diagnoses[0], pending=None, pending_nanos=0,
        )
    pending, nanos = _select(ds, kb, state.config)
    metrics = replace(
        metrics,
        compute_time_nanos=metrics.compute_time_nanos + nanos,
        per_iteration_nanos=metrics.per_iteration_nanos + (nanos,),
    )
    return replace(
        state, kb=kb, ds=ds, history=history, metrics=metrics,
        finished=False, result=None, pending=pending, pending_nanos=nanos,
    )


@dataclass(frozen=True)
class IterationRecord:
    """One answered query, as exported in transcripts plus validity stats."""

    iteration: int
    query_type: str
    axiom_ids: tuple[int, ...]
    answer_kind: str
    labels: tuple[tuple[int, bool], ...]
    effort: int
    cum_queries: int
    cum_axioms: int
    selection_nanos: int
    d_plus_size: int
    d_minus_size: int
    eliminated: int


@dataclass(frozen=True)
class SessionResult:
    final_diagnosis: Diagnosis
    metrics: Metrics
    records: tuple[IterationRecord, ...]


def _canonical_answer(query: Query, answer: Answer) -> tuple[str, tuple[tuple[int, bool], ...]]:
    """Transcript form of an answer; |Q|=1 collapses to axiom labels.

    For a singleton query all four profiles convey the same single bit,
    so the exported record is normalized to make that coincidence
    literal.
    """
    if len(query) == 1 and answer.kind is not AnswerKind.AXIOM_LABELS:
        value = answer.kind is AnswerKind.WHOLE_QUERY_TRUE
        return AnswerKind.AXIOM_LABELS.value, ((query.axiom_ids[0], value),)
    return answer.kind.value, answer.labels


def run_auto_session(
    kb: KnowledgeBase,
    config: SessionConfig,
    profile: ExpertProfile,
    dstar: TargetDiagnosis,
    max_iterations: int | None = None,
) -> SessionResult:
    """Loop select → answer → integrate until one diagnosis remains."""
    if max_iterations is None:
        max_iterations = 10 * len(kb.axioms)
    state = new_session(kb, config)
    records = []
    iteration = 0
    while not state.finished:
        iteration += 1
        if iteration > max_iterations:
            raise RuntimeError(f"session exceeded {max_iterations} iterations; this is a bug")
        query = next_query(state)
        partition = q_partition_by_membership(query, state.ds)
        nanos = state.pending_nanos
        before = set(state.ds.diagnoses)
        answer = answer_query(query, profile, dstar)
        state = integrate_answer(state, query, answer)
        kind, labels = _canonical_answer(query, answer)
        records.append(
            IterationRecord(
                iteration=iteration,
                query_type=state.config.query_type.value,
                axiom_ids=query.axiom_ids,
                answer_kind=kind,
                labels=labels,
                effort=answer.effort,
                cum_queries=state.metrics.num_queries,
                cum_axioms=state.metrics.num_axioms,
                selection_nanos=nanos,
                d_plus_size=len(partition.d_plus),
                d_minus_size=len(partition.d_minus),
                eliminated=len(before - set(state.ds.diagnoses)),
            )
        )
    return SessionResult(state.result, state.metrics, tuple(records))


def transcript_lines(records: Iterable[IterationRecord], include_times: bool = True) -> list[str]:
    """Line-delimited JSON export, one record per answered query."""
    lines = []
    for r in records:
        entry = {
            "iteration": r.iteration,
            "queryType": r.query_type,
            "axiomIds": list(r.axiom_ids),
            "answerKind": r.answer_kind,
            "labels": [[ax, value] for ax, value in r.labels],
            "effort": r.effort,
            "numQueries": r.cum_queries,
            "numAxioms": r.cum_axioms,
        }
        if include_times:
            entry["selectionNanos"] = r.selection_nanos
        lines.append(json.dumps(entry, sort_keys=True))
    return lines
