"""
Singleton vs. normal queries across expert styles
=================================================

"""

# How much does the querying strategy matter, and how much does the
# expert's answering style matter?  This script generates a small batch of
# fault-seeded KBs, runs every (strategy, heuristic, expert) combination
# on each, and prints the aggregate picture.  Seeded generation makes the
# whole run reproducible.
from oracle_loop.bench import Grid, make_batch, run_experiment, render_summary, summarize

scenarios = make_batch(24, master_seed=2024)
sizes = sorted(len(s.kb.axioms) for s in scenarios)
print(f"{len(scenarios)} scenarios, |K| from {sizes[0]} to {sizes[-1]}")

rows = run_experiment(scenarios, Grid(), workers=2)
print(f"{len(rows)} session rows collected\n")

# The summary answers the headline questions: how much extra effort the
# expert style costs on normal queries (Q1), whether it costs anything on
# singleton queries (Q2 — it never does), how often plain singleton
# querying beats the smarter strategy outright (Q3), and how the
# per-iteration selection times compare (Q4).
print(render_summary(summarize(rows)))

# A quick per-cell average, for texture.  Rows carry per-session totals;
# group them by (strategy, heuristic, expert profile).
from collections import defaultdict

totals = defaultdict(lambda: [0, 0, 0])
for row in rows:
    cell = totals[(row.query_type, row.heuristic, row.profile)]
    cell[0] += row.num_queries
    cell[1] += row.num_axioms
    cell[2] += 1

print("\nmean #queries / #axioms per session:")
for (qt, heur, prof), (q, ax, n) in sorted(totals.items()):
    print(f"  {qt:7s} {heur:4s} {prof:12s}  {q / n:5.2f}  {ax / n:6.2f}")
