"""Satisfiability and entailment for formula sets.

A self-contained DPLL decides everything; no external solver.  Formulas
are compiled to CNF once (Tseitin auxiliary variables, cached per
subtree) so repeated checks over overlapping formula sets stay cheap.
`truth_table_satisfiable` is an independent enumeration oracle used by
the tests; it never shares code with the DPLL path.
"""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping

from .syntax import And, Formula, Iff, Implies, Not, Or, Var, evaluate_formula, formula_variables

# Count of DPLL invocations, for instrumentation (query selection must be
# able to prove it made zero solver calls).
_solver_calls = 0


def solver_call_count() -> int:
    return _solver_calls


class ClauseCompiler:
    """Tseitin translation sharing auxiliary variables across formulas.

    One compiler instance defines one integer variable space.  Identical
    subtrees (frozen dataclasses compare structurally) map to the same
    auxiliary variable, so compiling a formula twice is free.
    """

    def __init__(self) -> None:
        self._var_ids: dict[str, int] = {}
        self._next_id = 1
        self._roots: dict[Formula, int] = {}
        self._clauses: dict[Formula, tuple[tuple[int, ...], ...]] = {}

    def variable_id(self, name: str) -> int:
        vid = self._var_ids.get(name)
        if vid is None:
            vid = self._next_id
            self._next_id += 1
            self._var_ids[name] = vid
        return vid

    def _fresh(self) -> int:
        vid = self._next_id
        self._next_id += 1
        return vid

    def compile(self, f: Formula) -> tuple[int, tuple[tuple[int, ...], ...]]:
        """Return (root literal, defining clauses) for `f`."""
        root = self._roots.get(f)
        if root is not None:
            return root, self._clauses[f]

        acc: list[tuple[int, ...]] = []
        root = self._encode(f, acc)
        clauses = tuple(acc)
        self._roots[f] = root
        self._clauses[f] = clauses
        return root, clauses

    def _encode(self, f: Formula, acc: list[tuple[int, ...]]) -> int:
        cached = self._roots.get(f)
        if cached is not None:
            acc.extend(self._clauses[f])
            return cached

        before = len(acc)
        if isinstance(f, Var):
            lit = self.variable_id(f.name)
        elif isinstance(f, Not):
            lit = -self._encode(f.operand, acc)
        else:
            a = self._encode(f.left, acc)  # type: ignore[attr-defined]
            b = self._encode(f.right, acc)  # type: ignore[attr-defined]
            lit = self._fresh()
            if isinstance(f, And):
                acc += [(-lit, a), (-lit, b), (lit, -a, -b)]
            elif isinstance(f, Or):
                acc += [(-lit, a, b), (lit, -a), (lit, -b)]
            elif isinstance(f, Implies):
                acc += [(-lit, -a, b), (lit, a), (lit, -b)]
            elif isinstance(f, Iff):
                acc += [(-lit, -a, b), (-lit, a, -b), (lit, a, b), (lit, -a, -b)]
            else:
                raise TypeError(f"not a formula: {f!r}")
        self._roots[f] = lit
        self._clauses[f] = tuple(acc[before:])
        return lit

    def assemble(self, formulas: Iterable[Formula]) -> tuple[list[tuple[int, ...]], int]:
        """CNF asserting every formula in the set, plus the variable count."""
        clauses: list[tuple[int, ...]] = []
        seen: set[Formula] = set()
        for f in formulas:
            if f in seen:
                continue
            seen.add(f)
            root, defs = self.compile(f)
            clauses.extend(defs)
            clauses.append((root,))
        return clauses, self._next_id - 1

    def decode(self, raw: list[int]) -> dict[str, bool]:
        return {name: raw[vid] > 0 for name, vid in self._var_ids.items() if vid < len(raw)}

    def solve(self, formulas: Iterable[Formula]) -> dict[str, bool] | None:
        """A model of the conjunction as {var: bool}, or None if unsat."""
        clauses, nvars = self.assemble(formulas)
        raw = solve_cnf(clauses, nvars)
        if raw is None:
            return None
        return self.decode(raw)


def solve_cnf(clauses: list[tuple[int, ...]], nvars: int) -> list[int] | None:
    """DPLL with two watched literals and unit propagation.

    Returns `assign` with assign[v] in {v, -v} for v in 1..nvars (index 0
    unused), or None when unsatisfiable.
    """
    global _solver_calls
    _solver_calls += 1

    assign = [0] * (nvars + 1)
    watches: dict[int, list[int]] = {}
    units: list[int] = []

    for idx, clause in enumerate(clauses):
        if not clause:
            return None
        if len(clause) == 1:
            units.append(clause[0])
        else:
            watches.setdefault(clause[0], []).append(idx)
            watches.setdefault(clause[1], []).append(idx)

    watched = [list(clause[:2]) for clause in clauses]
    trail: list[int] = []

    def value(lit: int) -> int:
        v = assign[abs(lit)]
        if v == 0:
            return 0
        return 1 if (v > 0) == (lit > 0) else -1

    def propagate(queue: list[int]) -> bool:
        while queue:
            lit = queue.pop()
            cur = value(lit)
            if cur == 1:
                continue
            if cur == -1:
                return False
            assign[abs(lit)] = lit
            trail.append(lit)
            falsified = -lit
            for cidx in list(watches.get(falsified, ())):
                clause = clauses[cidx]
                pair = watched[cidx]
                other = pair[0] if pair[1] == falsified else pair[1]
                if value(other) == 1:
                    continue
                moved = False
                for cand in clause:
                    if cand == other or cand == falsified:
                        continue
                    if value(cand) != -1:
                        pair[0], pair[1] = other, cand
                        watches[falsified].remove(cidx)
                        watches.setdefault(cand, []).append(cidx)
                        moved = True
                        break
                if not moved:
                    ov = value(other)
                    if ov == -1:
                        return False
                    if ov == 0:
                        queue.append(other)
        return True

    # decision stack: (trail length, literal whose flip is still untried)
    stack: list[tuple[int, int]] = []
    queue = list(units)
    cursor = 1

    while True:
        if propagate(queue):
            while cursor <= nvars and assign[cursor] != 0:
                cursor += 1
            if cursor > nvars:
                return assign
            decision = -cursor  # try the negative phase first
            stack.append((len(trail), decision))
            queue = [decision]
        else:
            # backtrack to the most recent decision with an untried flip
            while stack:
                mark, tried = stack.pop()
                while len(trail) > mark:
                    assign[abs(trail.pop())] = 0
                if tried != 0:
                    stack.append((mark, 0))
                    queue = [-tried]
                    cursor = 1
                    break
            else:
                return None


def find_model(formulas: Iterable[Formula], compiler: ClauseCompiler | None = None) -> dict[str, bool] | None:
    if compiler is None:
        compiler = ClauseCompiler()
    return compiler.solve(formulas)


def is_satisfiable(formulas: Iterable[Formula]) -> bool:
    """True iff some assignment satisfies every formula in the set."""
    return find_model(formulas) is not None


def entails(premises: Iterable[Formula], conclusion: Formula) -> bool:
    """True iff premises ∪ {¬conclusion} is unsatisfiable."""
    return not is_satisfiable(list(premises) + [Not(conclusion)])


# ---------------------------------------------------------------------------
# Independent oracle: exhaustive truth-table enumeration.

_TT_VAR_LIMIT = 16


def truth_table_satisfiable(formulas: Iterable[Formula]) -> bool:
    fs = list(formulas)
    names = sorted(set().union(*[formula_variables(f) for f in fs]) if fs else set())
    if len(names) > _TT_VAR_LIMIT:
        raise ValueError(f"truth-table oracle limited to {_TT_VAR_LIMIT} variables, got {len(names)}")
    for bits in itertools.product((False, True), repeat=len(names)):
        assignment = dict(zip(names, bits))
        if all(evaluate_formula(f, assignment) for f in fs):
            return True
    return False


def truth_table_entails(premises: Iterable[Formula], conclusion: Formula) -> bool:
    return not truth_table_satisfiable(list(premises) + [Not(conclusion)])
