from __future__ import annotations

import pytest

from oracle_loop.diagnosis import (
    Diagnosis,
    FaultProbabilities,
    compute_leading_diagnoses,
    make_diagnosis_set,
)
from oracle_loop.kb import parse_kb
from oracle_loop.queries import (
    Heuristic,
    QPartition,
    Query,
    UnrealizablePartitionError,
    discriminating_axioms,
    enumerate_realizable_bipartitions,
    make_query,
    q_partition_by_membership,
    realize_query,
    score_ent,
    score_spl,
    select_best_normal_query,
    select_best_sq,
)
from oracle_loop.sat import solver_call_count


@pytest.fixture
def four_ds(four_kb):
    # diagnoses in presentation order: {0,2} {0,3} {1,2} {1,3}
    return compute_leading_diagnoses(four_kb, m=None)


@pytest.fixture
def chain_ds(chain_kb):
    return compute_leading_diagnoses(chain_kb, m=None)


def test_query_requires_distinct_ascending_ids():
    assert make_query([2, 0]).axiom_ids == (0, 2)
    with pytest.raises(ValueError):
        Query(())
    with pytest.raises(ValueError):
        Query((1, 1))
    with pytest.raises(ValueError):
        Query((2, 0))


def test_membership_partition_on_fixture(four_ds):
    part = q_partition_by_membership(Query((0,)), four_ds)
    assert part.d_plus == (2, 3)  # the diagnoses avoiding ax0
    assert part.d_minus == (0, 1)
    assert part.d_zero == ()

    both = q_partition_by_membership(Query((0, 1)), four_ds)
    assert both.d_plus == ()
    assert both.d_minus == (0, 1, 2, 3)


def test_discriminating_axioms(four_ds, chain_ds):
    assert discriminating_axioms(four_ds) == frozenset({0, 1, 2, 3})
    assert discriminating_axioms(chain_ds) == frozenset({0, 1, 2})

    probs = FaultProbabilities({0: 0.1, 1: 0.1, 2: 0.1})
    shared = make_diagnosis_set(
        [Diagnosis(frozenset({0, 1})), Diagnosis(frozenset({0, 2}))], probs, True
    )
    assert discriminating_axioms(shared) == frozenset({1, 2})


def test_scores():
    assert score_spl(QPartition((0, 1), (2, 3))) == 0
    assert score_spl(QPartition((0,), (1, 2))) == 1
    assert score_spl(QPartition((0,), (1,), (2,))) == 1
    assert score_ent(QPartition((0, 1), (2,)), (0.5, 0.25, 0.25)) == pytest.approx(0.5)
    assert score_ent(QPartition((0,), (1,), (2,)), (0.4, 0.4, 0.2)) == pytest.approx(0.2)


def test_select_best_sq_breaks_ties_by_lowest_id(four_ds):
    # every singleton splits the fixture 2/2, so both heuristics land on ax0
    assert select_best_sq(four_ds, Heuristic.SPL) == Query((0,))
    assert select_best_sq(four_ds, Heuristic.ENT) == Query((0,))


def test_select_best_sq_heuristics_can_disagree(chain_kb):
    probs = FaultProbabilities({0: 0.05, 1: 0.05, 2: 0.4})
    ds = compute_leading_diagnoses(chain_kb, probs=probs, m=None)
    # ENT prefers the probability-balancing axiom, SPL only counts heads
    assert select_best_sq(ds, Heuristic.ENT) == Query((2,))
    assert select_best_sq(ds, Heuristic.SPL) == Query((0,))


def test_select_best_sq_needs_two_diagnoses(four_kb):
    probs = FaultProbabilities.uniform(four_kb)
    single = make_diagnosis_set([Diagnosis(frozenset({0, 2}))], probs, True)
    assert select_best_sq(single, Heuristic.ENT) is None


def test_select_best_sq_uses_no_solver(four_ds):
    before = solver_call_count()
    select_best_sq(four_ds, Heuristic.ENT)
    select_best_sq(four_ds, Heuristic.SPL)
    assert solver_call_count() == before


def test_realizable_bipartitions_on_the_four_diagnosis_fixture(four_kb, four_ds):
    splits = enumerate_realizable_bipartitions(four_ds, four_kb)
    plus_sets = {frozenset(p) for p, _ in splits}
    # 14 candidate bipartitions, of which 8 survive: whenever the dPlus
    # diagnoses jointly cover K (both diagonal pairs and every triple),
    # no axiom is left for a query to use
    assert len(splits) == 8
    assert all(len(p) + len(m) == 4 for p, m in splits)
    assert plus_sets == {
        frozenset({0}), frozenset({1}), frozenset({2}), frozenset({3}),
        frozenset({0, 1}), frozenset({0, 2}), frozenset({1, 3}), frozenset({2, 3}),
    }


def test_all_bipartitions_realizable_for_disjoint_singletons(chain_kb, chain_ds):
    splits = enumerate_realizable_bipartitions(chain_ds, chain_kb)
    assert len(splits) == 6  # 2^3 - 2


def test_bipartition_guard(four_kb, four_ds):
    probs = FaultProbabilities.uniform(four_kb)
    single = make_diagnosis_set([Diagnosis(frozenset({0}))], probs, True)
    with pytest.raises(ValueError):
        enumerate_realizable_bipartitions(single, four_kb)

    wide_kb = parse_kb("[K]\n" + "\n".join(f"w{i}" for i in range(13)) + "\n")
    wide_probs = FaultProbabilities.uniform(wide_kb, p=0.5)
    wide = make_diagnosis_set(
        [Diagnosis(frozenset({i})) for i in range(13)], wide_probs, True
    )
    with pytest.raises(ValueError):
        enumerate_realizable_bipartitions(wide, wide_kb)


def test_realize_query_greedy_cover(four_kb, four_ds):
    # dMinus = the two diagnoses containing ax0; one axiom covers both
    assert realize_query((2, 3), (0, 1), four_ds, four_kb) == Query((0,))


def test_realize_query_prefers_high_gain_axioms(chain_kb):
    probs = FaultProbabilities.uniform(chain_kb)
    ds = make_diagnosis_set(
        [Diagnosis(frozenset({0, 1})), Diagnosis(frozenset({1, 2}))], probs, False
    )
    assert realize_query((), (0, 1), ds, chain_kb) == Query((1,))


def test_realize_query_unrealizable_partition(four_kb, four_ds):
    with pytest.raises(UnrealizablePartitionError):
        realize_query((0, 3), (1, 2), four_ds, four_kb)


def test_realized_queries_reproduce_their_bipartition(four_kb, four_ds):
    for d_plus, d_minus in enumerate_realizable_bipartitions(four_ds, four_kb):
        query = q_partition_by_membership(
            realize_query(d_plus, d_minus, four_ds, four_kb), four_ds
        )
        assert query.d_plus == d_plus
        assert query.d_minus == d_minus


def test_select_best_normal_query_on_fixture(four_kb, four_ds):
    # several 2/2 splits tie at score 0; the smallest lexicographic
    # realization wins for both heuristics
    assert select_best_normal_query(four_ds, four_kb, Heuristic.SPL) == Query((0,))
    assert select_best_normal_query(four_ds, four_kb, Heuristic.ENT) == Query((0,))


def test_select_best_normal_query_needs_two_diagnoses(four_kb):
    probs = FaultProbabilities.uniform(four_kb)
    single = make_diagnosis_set([Diagnosis(frozenset({0, 2}))], probs, True)
    assert select_best_normal_query(single, four_kb, Heuristic.ENT) is None
