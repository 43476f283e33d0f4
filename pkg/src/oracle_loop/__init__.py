"""oracle-loop: interactive fault localization for propositional knowledge bases."""

from oracle_loop.diagnosis import (
    DiagnosisSet,
    FaultProbabilities,
    compute_leading_diagnoses,
)
from oracle_loop.experts import ExpertProfile, TargetDiagnosis, answer_query
from oracle_loop.kb import KnowledgeBase, parse_kb
from oracle_loop.queries import Heuristic, select_best_normal_query, select_best_sq
from oracle_loop.session import (
    QueryType,
    SessionConfig,
    integrate_answer,
    new_session,
    next_query,
    run_auto_session,
    transcript_lines,
)

__version__ = "0.1.0"
