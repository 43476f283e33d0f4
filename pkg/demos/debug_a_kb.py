"""
Debugging a broken knowledge base, step by step
===============================================

"""

# A tiny KB about a sensor pipeline.  The author *intended* a clean chain
# from `power` to `alarm`, but one of the middle axioms is wrong: the
# engineer wrote `heater -> ~alarm` where `heater -> alarm` was meant.
# Background knowledge says power is on; the test requirement says the
# alarm must be derivable.
from oracle_loop import parse_kb

KB_TEXT = """\
[K]
power -> sensor
sensor -> heater
heater -> ~alarm
[B]
power
[N]
~alarm
"""

kb = parse_kb(KB_TEXT)
for ax in kb.axioms:
    print(f"  axiom {ax.id}: {ax.source_text}")

# Compute the leading diagnoses: the minimal sets of axioms whose removal
# makes the KB consistent with the requirements.  Every axiom is equally
# suspicious a priori, so the three singletons tie.
from oracle_loop import compute_leading_diagnoses

ds = compute_leading_diagnoses(kb, m=None)
print(f"\n{len(ds.diagnoses)} candidate diagnoses (complete={ds.complete}):")
for d, p in zip(ds.diagnoses, ds.probs):
    print(f"  remove {set(d.axiom_ids)}  p={p:.3f}")

# We cannot tell which candidate is right without more information, so we
# start an interactive session and let it interrogate an expert.  Here the
# "expert" is simulated: it knows axiom 2 (`heater -> ~alarm`) is the bug
# and answers queries accordingly, labelling axioms until it has justified
# its answer (the pragmatist style).
from oracle_loop import (
    ExpertProfile,
    Heuristic,
    QueryType,
    SessionConfig,
    TargetDiagnosis,
    answer_query,
    integrate_answer,
    new_session,
    next_query,
)

config = SessionConfig(query_type=QueryType.SQ, heuristic=Heuristic.ENT)
expert_knows = TargetDiagnosis(frozenset({2}))

state = new_session(kb, config)
while not state.finished:
    query = next_query(state)
    answer = answer_query(query, ExpertProfile.PRAGMATIST, expert_knows)
    shown = ", ".join(kb.axioms[i].source_text for i in query.axiom_ids)
    print(f"\n  system asks : is [{shown}] correct?")
    print(f"  expert says : {answer.kind.value} (labels {list(answer.labels)})")
    state = integrate_answer(state, query, answer)
    print(f"  remaining   : {[set(d.axiom_ids) for d in state.ds.diagnoses]}")

# Two questions suffice.  The session ends when exactly one diagnosis
# survives — the axiom the engineer actually got wrong.
final = state.result
print(f"\nfaulty axiom(s): {[kb.axioms[i].source_text for i in sorted(final.axiom_ids)]}")
print(f"queries asked  : {state.metrics.num_queries}")
print(f"axioms labelled: {state.metrics.num_axioms}")
