"""Scenario generation and the strategy-comparison experiment.

Scenarios are built, not found: each fault slot becomes a disjoint
implication chain whose last link drives a contradiction with a
background fact, a positive test case, or a negative test case.  The
chain is then the unique minimal conflict for that slot, the seeded
faulty axioms hit one chain each, and the Cartesian structure yields a
healthy population of competing diagnoses for the session to whittle
down.  Padding (positive Horn clauses over fresh variables) brings |K|
up to size without ever joining a conflict.

The experiment runs the {SQ, Normal} × {ENT, SPL} × profile grid over a
scenario batch and reports per-cell #Q, #Ax and selection times as CSV;
`summarize` reduces a report to the four comparison questions.
"""

from __future__ import annotations

import csv
import logging
import random
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .diagnosis import ViolationTester
from .experts import ExpertProfile, TargetDiagnosis
from .kb import Axiom, KnowledgeBase
from .queries import Heuristic
from .session import QueryType, SessionConfig, run_auto_session
from .syntax import And, Formula, Implies, Not, Var, formula_to_text

logger = logging.getLogger(__name__)


class GenerationError(RuntimeError):
    """The generator could not produce a verified scenario within its retry budget."""


@dataclass(frozen=True)
class ScenarioParams:
    num_vars: int
    num_axioms: int
    fault_cardinality: int
    min_links: int = 1
    max_links: int = 3
    random_seed: int = 0

    def __post_init__(self) -> None:
        if self.fault_cardinality < 1:
            raise ValueError("fault cardinality must be ≥ 1")
        if self.num_axioms < self.fault_cardinality * (self.min_links + 2):
            raise ValueError("numAxioms too small for the requested fault chains")


_STYLES = ("background", "positive", "negative")


def _build(params: ScenarioParams, seed: int) -> tuple[KnowledgeBase, TargetDiagnosis]:
    rng = random.Random(seed)
    fresh = iter(f"v{i}" for i in range(params.num_vars + params.num_axioms * 2))

    k_formulas: list[Formula] = []
    faulty: list[Formula] = []
    background: list[Formula] = []
    positive: list[Formula] = []
    negative: list[Formula] = []

    for slot in range(params.fault_cardinality):
        # keep room for the remaining slots' minimal chains
        slots_left = params.fault_cardinality - slot - 1
        headroom = params.num_axioms - len(k_formulas) - slots_left * (params.min_links + 2) - 2
        links = rng.randint(params.min_links, max(params.min_links, min(params.max_links, headroom)))
        chain = [Var(next(fresh)) for _ in range(links + 1)]
        terminal = Var(next(fresh))
        k_formulas.append(chain[0])
        for a, b in zip(chain, chain[1:]):
            k_formulas.append(Implies(a, b))
        style = rng.choice(_STYLES)
        if style == "background":
            # intended axiom was `last -> ~terminal`; the fault flips it
            branch: Formula = Implies(chain[-1], terminal)
            background.append(Not(terminal))
        elif style == "negative":
            branch = Implies(chain[-1], terminal)
            negative.append(terminal)
        else:
            branch = Implies(chain[-1], Not(terminal))
            positive.append(terminal)
        k_formulas.append(branch)
        faulty.append(branch)

    # padding: positive Horn noise, harmless by construction
    pad_pool = [Var(next(fresh)) for _ in range(max(3, params.num_vars // 4))]
    chain_vars = [f for f in k_formulas if isinstance(f, Var)]
    while len(k_formulas) < params.num_axioms:
        shape = rng.random()
        if shape < 0.25:
            k_formulas.append(rng.choice(pad_pool))
        elif shape < 0.5 and len(pad_pool) >= 3:
            a, b, c = rng.sample(pad_pool, 3)
            k_formulas.append(Implies(And(a, b), c))
        elif shape < 0.75 and chain_vars:
            # tail noise: chain variables feeding fresh padding
            k_formulas.append(Implies(rng.choice(chain_vars), rng.choice(pad_pool)))
        else:
            a, b = rng.sample(pad_pool, 2)
            k_formulas.append(Implies(a, b))

    order = list(range(len(k_formulas)))
    rng.shuffle(order)
    axioms = tuple(
        Axiom(i, k_formulas[j], formula_to_text(k_formulas[j])) for i, j in enumerate(order)
    )
    faulty_ids = {id(f) for f in faulty}
    dstar_ids = frozenset(i for i, j in enumerate(order) if id(k_formulas[j]) in faulty_ids)
    kb = KnowledgeBase(axioms, tuple(background), tuple(positive), tuple(negative))
    return kb, TargetDiagnosis(dstar_ids)


def _verify(kb: KnowledgeBase, dstar: TargetDiagnosis) -> bool:
    """D* must be a minimal diagnosis and the instance must need debugging."""
    tester = ViolationTester(kb)
    if tester.violates(frozenset()):
        return False
    if not tester.violates(kb.all_ids()):
        return False
    rest = kb.all_ids() - dstar.axiom_ids
    if tester.violates(rest):
        return False
    return all(tester.violates(rest | {ax}) for ax in sorted(dstar.axiom_ids))


_RETRY_BUDGET = 20


def generate_scenario(params: ScenarioParams) -> tuple[KnowledgeBase, TargetDiagnosis]:
    """Deterministic in params; retries with derived seeds until verified."""
    rng = random.Random(params.random_seed)
    for _ in range(_RETRY_BUDGET):
        kb, dstar = _build(params, rng.getrandbits(64))
        if _verify(kb, dstar):
            return kb, dstar
    raise GenerationError(f"no verifiable scenario within {_RETRY_BUDGET} attempts for {params}")


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    kb: KnowledgeBase
    dstar: TargetDiagnosis


def make_batch(
    count: int,
    master_seed: int,
    min_axioms: int = 10,
    max_axioms: int = 40,
    max_fault_cardinality: int = 3,
) -> list[Scenario]:
    """The default experiment corpus: `count` verified random scenarios."""
    rng = random.Random(master_seed)
    batch = []
    for index in range(count):
        num_axioms = rng.randint(min_axioms, max_axioms)
        cardinality = rng.randint(1, max_fault_cardinality)
        params = ScenarioParams(
            num_vars=num_axioms,
            num_axioms=num_axioms,
            fault_cardinality=cardinality,
            random_seed=rng.getrandbits(32),
        )
        kb, dstar = generate_scenario(params)
        batch.append(Scenario(f"s{index:03d}", kb, dstar))
    return batch


@dataclass(frozen=True)
class Grid:
    query_types: tuple[QueryType, ...] = (QueryType.SQ, QueryType.NORMAL)
    heuristics: tuple[Heuristic, ...] = (Heuristic.ENT, Heuristic.SPL)
    profiles: tuple[ExpertProfile, ...] = tuple(ExpertProfile)
    leading_cap: int = 9


@dataclass(frozen=True)
class ReportRow:
    scenario_id: str
    query_type: str
    heuristic: str
    profile: str
    num_queries: int
    num_axioms: int
    total_selection_nanos: int
    mean_selection_nanos: float


def _scenario_rows(scenario: Scenario, grid: Grid) -> list[ReportRow]:
    rows = []
    for query_type in grid.query_types:
        for heuristic in grid.heuristics:
            for profile in grid.profiles:
                config = SessionConfig(
                    query_type=query_type, heuristic=heuristic, leading_cap=grid.leading_cap
                )
                result = run_auto_session(scenario.kb, config, profile, scenario.dstar)
                if result.final_diagnosis.axiom_ids != scenario.dstar.axiom_ids:
                    raise RuntimeError(
                        f"{scenario.scenario_id}/{query_type.value}/{heuristic.value}/"
                        f"{profile.value}: found {sorted(result.final_diagnosis.axiom_ids)}, "
                        f"seeded {sorted(scenario.dstar.axiom_ids)}"
                    )
                total = result.metrics.compute_time_nanos
                count = max(result.metrics.num_queries, 1)
                rows.append(
                    ReportRow(
                        scenario_id=scenario.scenario_id,
                        query_type=query_type.value,
                        heuristic=heuristic.value,
                        profile=profile.value,
                        num_queries=result.metrics.num_queries,
                        num_axioms=result.metrics.num_axioms,
                        total_selection_nanos=total,
                        mean_selection_nanos=total / count,
                    )
                )
    return rows


def run_experiment(scenarios: Sequence[Scenario], grid: Grid, workers: int = 1) -> list[ReportRow]:
    """One session per grid cell per scenario; rows sorted for stable output.

    A scenario whose session errors out is dropped with a logged reason
    rather than poisoning the batch.
    """
    rows: list[ReportRow] = []
    if workers <= 1:
        for scenario in scenarios:
            try:
                rows.extend(_scenario_rows(scenario, grid))
            except Exception:
                logger.exception("scenario %s aborted", scenario.scenario_id)
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [(s, pool.submit(_scenario_rows, s, grid)) for s in scenarios]
            for scenario, future in futures:
                try:
                    rows.extend(future.result())
                except Exception:
                    logger.exception("scenario %s aborted", scenario.scenario_id)
    rows.sort(key=lambda r: (r.scenario_id, r.query_type, r.heuristic, r.profile))
    return rows


_CSV_HEADER = ["scenarioId", "queryType", "heuristic", "profile", "#Q", "#Ax",
               "totalSelectionTime", "meanSelectionTime"]


def write_report(rows: Iterable[ReportRow], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(_CSV_HEADER)
        for r in rows:
            writer.writerow([
                r.scenario_id, r.query_type, r.heuristic, r.profile,
                r.num_queries, r.num_axioms, r.total_selection_nanos,
                repr(r.mean_selection_nanos),
            ])


def read_report(path: str | Path) -> list[ReportRow]:
    with open(path, newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != _CSV_HEADER:
            raise ValueError(f"unexpected report header: {header}")
        return [
            ReportRow(
                scenario_id=row[0], query_type=row[1], heuristic=row[2], profile=row[3],
                num_queries=int(row[4]), num_axioms=int(row[5]),
                total_selection_nanos=int(row[6]), mean_selection_nanos=float(row[7]),
            )
            for row in reader
        ]


@dataclass(frozen=True)
class Summary:
    """Answers to the four comparison questions, straight from report rows."""

    scenario_count: int
    # Q1: spread between expert profiles on normal queries, (max−min)/min per
    # (scenario, heuristic) group
    q1_max_overhead_ax_pct: float
    q1_mean_overhead_ax_pct: float
    q1_max_overhead_q_pct: float
    q1_mean_overhead_q_pct: float
    # Q2: profile ranking by mean effort on normal queries (best first)
    q2_mean_ax_by_profile: tuple[tuple[str, float], ...]
    q2_mean_q_by_profile: tuple[tuple[str, float], ...]
    # Q3: fraction of scenarios where the best SQ strategy beats the best
    # normal-query strategy
    q3_sq_wins_ax_fraction: float
    q3_sq_wins_q_fraction: float
    # Q4: per-iteration selection time, SQ vs normal
    q4_median_sq_nanos: float
    q4_median_normal_nanos: float
    q4_reduction_pct: float


def summarize(rows: Sequence[ReportRow]) -> Summary:
    if not rows:
        raise ValueError("cannot summarize an empty report")
    normal = [r for r in rows if r.query_type == "normal"]
    sq = [r for r in rows if r.query_type == "sq"]
    scenario_ids = sorted({r.scenario_id for r in rows})

    overhead_ax, overhead_q = [], []
    groups: dict[tuple[str, str], list[ReportRow]] = {}
    for r in normal:
        groups.setdefault((r.scenario_id, r.heuristic), []).append(r)
    for group in groups.values():
        ax = [r.num_axioms for r in group]
        q = [r.num_queries for r in group]
        overhead_ax.append((max(ax) - min(ax)) / min(ax) * 100.0)
        overhead_q.append((max(q) - min(q)) / min(q) * 100.0)

    def profile_means(metric) -> tuple[tuple[str, float], ...]:
        by_profile: dict[str, list[int]] = {}
        for r in normal:
            by_profile.setdefault(r.profile, []).append(metric(r))
        means = {p: sum(v) / len(v) for p, v in by_profile.items()}
        return tuple(sorted(means.items(), key=lambda item: (item[1], item[0])))

    sq_wins_ax = sq_wins_q = 0
    comparable = 0
    for sid in scenario_ids:
        sq_rows = [r for r in sq if r.scenario_id == sid]
        normal_rows = [r for r in normal if r.scenario_id == sid]
        if not sq_rows or not normal_rows:
            continue
        comparable += 1
        if min(r.num_axioms for r in sq_rows) < min(r.num_axioms for r in normal_rows):
            sq_wins_ax += 1
        if min(r.num_queries for r in sq_rows) < min(r.num_queries for r in normal_rows):
            sq_wins_q += 1

    median_sq = statistics.median(r.mean_selection_nanos for r in sq) if sq else 0.0
    median_normal = statistics.median(r.mean_selection_nanos for r in normal) if normal else 0.0
    reduction = (1.0 - median_sq / median_normal) * 100.0 if median_normal else 0.0

    return Summary(
        scenario_count=len(scenario_ids),
        q1_max_overhead_ax_pct=max(overhead_ax, default=0.0),
        q1_mean_overhead_ax_pct=sum(overhead_ax) / len(overhead_ax) if overhead_ax else 0.0,
        q1_max_overhead_q_pct=max(overhead_q, default=0.0),
        q1_mean_overhead_q_pct=sum(overhead_q) / len(overhead_q) if overhead_q else 0.0,
        q2_mean_ax_by_profile=profile_means(lambda r: r.num_axioms),
        q2_mean_q_by_profile=profile_means(lambda r: r.num_queries),
        q3_sq_wins_ax_fraction=sq_wins_ax / comparable if comparable else 0.0,
        q3_sq_wins_q_fraction=sq_wins_q / comparable if comparable else 0.0,
        q4_median_sq_nanos=median_sq,
        q4_median_normal_nanos=median_normal,
        q4_reduction_pct=reduction,
    )


def render_summary(summary: Summary) -> str:
    lines = [
        f"scenarios: {summary.scenario_count}",
        "Q1  profile overhead on normal queries ((max-min)/min per scenario+heuristic):",
        f"    #Ax: max {summary.q1_max_overhead_ax_pct:.1f}%  mean {summary.q1_mean_overhead_ax_pct:.1f}%",
        f"    #Q:  max {summary.q1_max_overhead_q_pct:.1f}%  mean {summary.q1_mean_overhead_q_pct:.1f}%",
        "Q2  profile ranking on normal queries (mean, best first):",
        "    #Ax: " + "  ".join(f"{p}={v:.2f}" for p, v in summary.q2_mean_ax_by_profile),
        "    #Q:  " + "  ".join(f"{p}={v:.2f}" for p, v in summary.q2_mean_q_by_profile),
        "Q3  scenarios where best SQ beats best normal:",
        f"    #Ax: {summary.q3_sq_wins_ax_fraction * 100:.1f}%   #Q: {summary.q3_sq_wins_q_fraction * 100:.1f}%",
        "Q4  per-iteration selection time (median of per-session means):",
        f"    SQ {summary.q4_median_sq_nanos / 1e3:.1f} µs  vs  normal {summary.q4_median_normal_nanos / 1e3:.1f} µs"
        f"  → reduction {summary.q4_reduction_pct:.1f}%",
    ]
    return "\n".join(lines)
