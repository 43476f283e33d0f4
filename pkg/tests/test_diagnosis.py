from __future__ import annotations

import pytest

from oracle_loop.diagnosis import (
    AlreadyValidError,
    Diagnosis,
    FaultProbabilities,
    NoDiagnosisError,
    ViolationTester,
    brute_force_diagnoses,
    compute_leading_diagnoses,
    diagnosis_probability,
    find_minimal_conflict,
    make_diagnosis_set,
)
from oracle_loop.kb import parse_kb, violates
from support import small_scenarios, soup_kbs


def _id_sets(ds):
    return {frozenset(d.axiom_ids) for d in ds.diagnoses}


def test_four_diagnosis_fixture(four_kb):
    ds = compute_leading_diagnoses(four_kb, m=6)
    assert _id_sets(ds) == {
        frozenset({0, 2}),
        frozenset({0, 3}),
        frozenset({1, 2}),
        frozenset({1, 3}),
    }
    assert ds.complete
    assert ds.probs == (0.25, 0.25, 0.25, 0.25)


def test_chain_fixture_m_2_is_incomplete(chain_kb):
    ds = compute_leading_diagnoses(chain_kb, m=2)
    assert len(ds.diagnoses) == 2
    assert not ds.complete
    assert all(len(d) == 1 for d in ds.diagnoses)

    full = compute_leading_diagnoses(chain_kb, m=None)
    assert _id_sets(full) == {frozenset({0}), frozenset({1}), frozenset({2})}
    assert full.complete


def test_m_equal_to_diagnosis_count_is_still_complete(four_kb):
    assert compute_leading_diagnoses(four_kb, m=4).complete
    assert not compute_leading_diagnoses(four_kb, m=3).complete


def test_biased_probabilities_reorder_diagnoses(chain_kb):
    probs = FaultProbabilities({0: 0.05, 1: 0.05, 2: 0.4})
    ds = compute_leading_diagnoses(chain_kb, probs=probs, m=1)
    assert sorted(ds.diagnoses[0].axiom_ids) == [2]


def test_error_cases():
    with pytest.raises(NoDiagnosisError):
        compute_leading_diagnoses(parse_kb("[K]\na\n[B]\nb\n~b\n"))
    with pytest.raises(AlreadyValidError):
        compute_leading_diagnoses(parse_kb("[K]\na -> b\n[B]\na\n[P]\nb\n"))
    with pytest.raises(ValueError):
        compute_leading_diagnoses(parse_kb("[K]\na\n~a\n"), m=0)


def test_minimal_conflict_prefers_candidate_order(four_kb):
    assert sorted(find_minimal_conflict([0, 1, 2, 3], four_kb)) == [0, 1]
    assert sorted(find_minimal_conflict([2, 3, 0, 1], four_kb)) == [2, 3]
    assert find_minimal_conflict([0, 2], four_kb) is None


def test_minimal_conflict_chain_needs_all_three(chain_kb):
    conflict = find_minimal_conflict([0, 1, 2], chain_kb)
    assert sorted(conflict) == [0, 1, 2]


def test_empty_conflict_when_background_is_broken():
    kb = parse_kb("[K]\na\n[B]\nb\n~b\n")
    assert sorted(find_minimal_conflict([0], kb)) == []


def test_conflicts_are_minimal_when_rechecked(four_kb, chain_kb):
    for kb, candidates in ((four_kb, [0, 1, 2, 3]), (chain_kb, [0, 1, 2])):
        conflict = set(find_minimal_conflict(candidates, kb))
        assert violates(kb.formulas_of(conflict), kb)
        for ax in conflict:
            assert not violates(kb.formulas_of(conflict - {ax}), kb)


def test_diagnosis_probability_products():
    kb = parse_kb("[K]\na\n~a\n")
    probs = FaultProbabilities.uniform(kb, p=0.1)
    assert diagnosis_probability(Diagnosis(frozenset({0})), probs) == pytest.approx(0.09)
    assert diagnosis_probability(Diagnosis(frozenset()), probs) == pytest.approx(0.81)

    ds = compute_leading_diagnoses(kb, probs=probs, m=None)
    assert ds.probs == pytest.approx((0.5, 0.5))


def test_make_diagnosis_set_orders_by_probability_and_collapses_duplicates():
    probs = FaultProbabilities({0: 0.3, 1: 0.1, 2: 0.1, 3: 0.1})
    singles = [Diagnosis(frozenset({i})) for i in range(4)]
    pair = Diagnosis(frozenset({1, 2}))
    ds = make_diagnosis_set(singles + [pair, singles[0]], probs, complete=True)
    assert len(ds.diagnoses) == 5  # the duplicate {0} collapsed
    assert sorted(ds.diagnoses[0].axiom_ids) == [0]
    assert sorted(ds.diagnoses[-1].axiom_ids) == [1, 2]
    assert list(ds.probs) == sorted(ds.probs, reverse=True)
    assert sum(ds.probs) == pytest.approx(1.0)


def test_exact_probability_ties_break_by_cardinality_then_ids():
    # p = 0.5 keeps every product an exact dyadic, so ties are bit-exact
    probs = FaultProbabilities({i: 0.5 for i in range(3)})
    ds = make_diagnosis_set(
        [
            Diagnosis(frozenset({2})),
            Diagnosis(frozenset({0, 1})),
            Diagnosis(frozenset({0})),
            Diagnosis(frozenset({1})),
        ],
        probs,
        complete=False,
    )
    assert [sorted(d.axiom_ids) for d in ds.diagnoses] == [[0], [1], [2], [0, 1]]


def test_fault_probabilities_validate_range():
    with pytest.raises(ValueError):
        FaultProbabilities({0: 1.0})
    with pytest.raises(ValueError):
        FaultProbabilities({0: 0.0})


def test_fault_probabilities_from_text():
    kb = parse_kb("[K]\na\nb\nc\n")
    probs = FaultProbabilities.from_text("0\t0.2\n# comment\n2\t0.6\n", kb)
    assert probs.of(0) == pytest.approx(0.2)
    assert probs.of(1) == pytest.approx(0.1)  # unlisted -> default
    assert probs.of(2) == pytest.approx(0.6)


def test_brute_force_on_fixtures(four_kb, chain_kb):
    assert _id_sets(brute_force_diagnoses(four_kb)) == {
        frozenset({0, 2}), frozenset({0, 3}), frozenset({1, 2}), frozenset({1, 3})
    }
    assert _id_sets(brute_force_diagnoses(chain_kb)) == {
        frozenset({0}), frozenset({1}), frozenset({2})
    }
    valid = brute_force_diagnoses(parse_kb("[K]\na -> b\n[B]\na\n[P]\nb\n"))
    assert _id_sets(valid) == {frozenset()}
    assert valid.complete


def test_brute_force_guard():
    text = "[K]\n" + "\n".join(f"q{i}" for i in range(15)) + "\n"
    with pytest.raises(ValueError):
        brute_force_diagnoses(parse_kb(text))


def test_leading_set_matches_brute_force_on_small_instances():
    kbs = soup_kbs(12, seed=31) + [s.kb for s in small_scenarios(6, seed=32)]
    for kb in kbs:
        fast = _id_sets(compute_leading_diagnoses(kb, m=None))
        slow = _id_sets(brute_force_diagnoses(kb))
        assert fast == slow


def test_diagnoses_are_irreducible_and_hit_every_conflict(four_kb):
    tester = ViolationTester(four_kb)
    ds = compute_leading_diagnoses(four_kb, m=None, tester=tester)
    all_ids = four_kb.all_ids()
    for d in ds.diagnoses:
        rest = all_ids - d.axiom_ids
        assert not violates(four_kb.formulas_of(rest), four_kb)
        for ax in sorted(d.axiom_ids):
            assert violates(four_kb.formulas_of(rest | {ax}), four_kb)
        for conflict in tester.conflicts:
            assert d.axiom_ids & set(conflict)


def test_tester_advance_requires_same_axioms(four_kb, chain_kb):
    tester = ViolationTester(four_kb)
    with pytest.raises(ValueError):
        tester.advance(chain_kb)


def test_repeated_computation_is_deterministic(four_kb):
    first = compute_leading_diagnoses(four_kb, m=3)
    second = compute_leading_diagnoses(four_kb, m=3)
    assert first == second
