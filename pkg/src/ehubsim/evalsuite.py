"""Text-to-SQL evaluation: execution accuracy, surface metrics, and the
four-way error taxonomy (QSD / QLE / RPE / RGE).

Failed cases get exactly one error label from a deterministic cascade:
precision-operator differences first (RPE), then pure projection
subset/superset differences (RGE), then structural differences such as
table, LIMIT, aggregate, or field mismatches (QSD), and query-logic
errors (QLE) otherwise.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .errors import BackendUnavailable, EhubError, NonSqlOutput, ValidationError
from .sqlmetrics import (
    ClauseMap,
    aggregate_functions,
    bleu_n,
    component_match_f1,
    extract_clauses,
    from_table_names,
    group_by_columns,
    limit_value,
    rouge,
    selected_field_names,
    split_projections,
    strip_precision_ops,
    tokenize_sql,
)
from .store import Datastore, ResultTable

USER_CLASSES = ("system_operator", "user")

ERROR_TYPES = ("QSD", "QLE", "RPE", "RGE")


@dataclass(frozen=True)
class QaCase:
    case_id: str
    user_class: str
    question: str
    gold_sql: str
    db: str = "platform"

    def __post_init__(self) -> None:
        if self.user_class not in USER_CLASSES:
            raise ValidationError(
                f"case {self.case_id}: user_class must be one of {USER_CLASSES}"
            )


@dataclass
class EvalCaseResult:
    case_id: str
    user_class: str
    predicted_sql: str
    execution_match: bool
    component_f1: float
    bleu: dict[int, float]
    rouge_1: float
    rouge_2: float
    rouge_l: float
    error_type: str  # QSD | QLE | RPE | RGE | none

    def metric_row(self) -> dict:
        return {
            "case_id": self.case_id,
            "user_class": self.user_class,
            "execution_match": self.execution_match,
            "component_f1": self.component_f1,
            "bleu_1": self.bleu[1],
            "bleu_2": self.bleu[2],
            "bleu_3": self.bleu[3],
            "bleu_4": self.bleu[4],
            "rouge_1": self.rouge_1,
            "rouge_2": self.rouge_2,
            "rouge_l": self.rouge_l,
            "error_type": self.error_type,
            "predicted_sql": self.predicted_sql,
        }


METRIC_KEYS = ("component_f1", "bleu_1", "bleu_2", "bleu_3", "bleu_4",
               "rouge_1", "rouge_2", "rouge_l")


@dataclass
class EvalSlice:
    """Aggregates for one (model, user class) pair."""

    model: str
    user_class: str
    case_count: int
    execution_accuracy: float
    metric_medians: dict[str, float]
    error_counts: dict[str, int]
    error_proportions: dict[str, float]


@dataclass
class EvalReport:
    model: str
    slices: list[EvalSlice]
    cases: list[EvalCaseResult]
    partial: bool = False

    def to_json(self) -> str:
        return json.dumps({
            "model": self.model,
            "partial": self.partial,
            "slices": [{
                "model": s.model,
                "user_class": s.user_class,
                "case_count": s.case_count,
                "execution_accuracy": s.execution_accuracy,
                "metric_medians": s.metric_medians,
                "error_counts": s.error_counts,
                "error_proportions": s.error_proportions,
            } for s in self.slices],
            "cases": [c.metric_row() for c in self.cases],
        }, indent=2)

    def to_csv(self) -> str:
        """One row per (model, domain) in the standard metric column layout."""
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["Model", "Domain", "Execution Accuracy", "F1",
                         "BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4",
                         "ROUGE-1", "ROUGE-2", "ROUGE-L"])
        for s in self.slices:
            writer.writerow([
                s.model,
                "System" if s.user_class == "system_operator" else "User",
                f"{s.execution_accuracy:.4f}",
                *(f"{s.metric_medians[k]:.4f}" for k in METRIC_KEYS),
            ])
        return buf.getvalue()

    def heatmap_data(self) -> dict:
        """Error-type proportion matrix for dashboard rendering."""
        return {
            "error_types": list(ERROR_TYPES),
            "rows": [{
                "model": s.model,
                "user_class": s.user_class,
                "proportions": [s.error_proportions.get(e, 0.0)
                                for e in ERROR_TYPES],
            } for s in self.slices],
        }


def load_corpus(path: str | Path) -> list[QaCase]:
    """Read QA cases from a JSON-lines file."""
    cases = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if not line:
            continue
        rec = json.loads(line)
        cases.append(QaCase(
            case_id=str(rec["case_id"]),
            user_class=rec["user_class"],
            question=rec["question"],
            gold_sql=rec["gold_sql"],
            db=rec.get("db", "platform"),
        ))
    return cases


# --- result comparison -------------------------------------------------------

def _canon_value(v):
    if isinstance(v, bool):
        return float(int(v))
    if isinstance(v, (int, float)):
        return round(float(v), 6)
    return v


def normalize_result_set(result: ResultTable, gold_has_order_by: bool):
    """Canonical comparison form: names dropped, reals rounded to 1e-6,
    integers widened; rows form a multiset unless the gold query ordered them."""
    rows = [tuple(_canon_value(v) for v in row) for row in result.rows]
    if gold_has_order_by:
        return ("ordered", tuple(rows))
    return ("unordered", Counter(rows))


def execution_accuracy(pred_sql: str, gold_sql: str, db: Datastore) -> bool:
    """True iff both queries execute and yield the same normalized result."""
    gold_result = db.execute_sql(gold_sql)
    try:
        pred_result = db.execute_sql(pred_sql)
    except EhubError:
        return False
    ordered = "ORDER BY" in extract_clauses(gold_sql).clauses
    return (normalize_result_set(pred_result, ordered)
            == normalize_result_set(gold_result, ordered))


# --- error classification ----------------------------------------------------

def _clauses_equal_outside_select(pred: ClauseMap, gold: ClauseMap) -> bool:
    for name in ("WHERE", "GROUP BY", "ORDER BY"):
        if (name in pred.clauses) != (name in gold.clauses):
            return False
        if name in pred.clauses and pred.clauses[name] != gold.clauses[name]:
            return False
    return (pred.from_tokens == gold.from_tokens
            and pred.having_tokens == gold.having_tokens
            and pred.limit_tokens == gold.limit_tokens)


def classify_error(pred_sql: str, gold_sql: str) -> str:
    """Single deterministic label for a failed case: RPE, RGE, QSD, or QLE."""
    pred_tokens = tokenize_sql(pred_sql)
    gold_tokens = tokenize_sql(gold_sql)

    # 1. RPE: identical once DISTINCT/ABS/ROUND precision operators are removed
    if pred_tokens != gold_tokens and \
            strip_precision_ops(pred_tokens) == strip_precision_ops(gold_tokens):
        return "RPE"

    pred_map = extract_clauses(pred_sql)
    gold_map = extract_clauses(gold_sql)

    # 2. RGE: projection list strict subset/superset, all else identical
    if not pred_map.unparsable and not gold_map.unparsable \
            and _clauses_equal_outside_select(pred_map, gold_map):
        pred_proj = Counter(split_projections(pred_map.clauses.get("SELECT", [])))
        gold_proj = Counter(split_projections(gold_map.clauses.get("SELECT", [])))
        if pred_proj != gold_proj:
            if (pred_proj & gold_proj) == pred_proj or \
                    (pred_proj & gold_proj) == gold_proj:
                return "RGE"

    # 3. QSD: structural differences
    pred_select = pred_map.clauses.get("SELECT", [])
    gold_select = gold_map.clauses.get("SELECT", [])
    if from_table_names(pred_map) != from_table_names(gold_map):
        return "QSD"
    if limit_value(pred_map) != limit_value(gold_map):
        return "QSD"
    if aggregate_functions(pred_select) != aggregate_functions(gold_select):
        return "QSD"
    if group_by_columns(pred_map) != group_by_columns(gold_map):
        return "QSD"
    if selected_field_names(pred_select) != selected_field_names(gold_select):
        return "QSD"

    # 4. QLE: join/filter logic differences
    return "QLE"


# --- case evaluation and aggregation ------------------------------------------

def evaluate_case(case: QaCase, predicted_sql: str, db: Datastore) -> EvalCaseResult:
    pred_tokens = tokenize_sql(predicted_sql)
    gold_tokens = tokenize_sql(case.gold_sql)
    match = execution_accuracy(predicted_sql, case.gold_sql, db)
    return EvalCaseResult(
        case_id=case.case_id,
        user_class=case.user_class,
        predicted_sql=predicted_sql,
        execution_match=match,
        component_f1=component_match_f1(predicted_sql, case.gold_sql),
        bleu={n: bleu_n(pred_tokens, gold_tokens, n) for n in (1, 2, 3, 4)},
        rouge_1=rouge(pred_tokens, gold_tokens, "1"),
        rouge_2=rouge(pred_tokens, gold_tokens, "2"),
        rouge_l=rouge(pred_tokens, gold_tokens, "L"),
        error_type="none" if match else classify_error(predicted_sql, case.gold_sql),
    )


def lower_median(values: Sequence[float]) -> float:
    """Median with the lower-of-two convention for even counts."""
    if not values:
        raise ValueError("median of empty sequence")
    ordered = sorted(values)
    return ordered[(len(ordered) - 1) // 2]


def _build_slice(model: str, user_class: str,
                 results: list[EvalCaseResult]) -> EvalSlice:
    rows = [r.metric_row() for r in results]
    exec_acc = sum(1 for r in results if r.execution_match) / len(results)
    medians = {k: lower_median([row[k] for row in rows]) for k in METRIC_KEYS}
    errors = Counter(r.error_type for r in results if r.error_type != "none")
    total_errors = sum(errors.values())
    proportions = {
        e: (errors.get(e, 0) / total_errors if total_errors else 0.0)
        for e in ERROR_TYPES
    }
    return EvalSlice(
        model=model,
        user_class=user_class,
        case_count=len(results),
        execution_accuracy=exec_acc,
        metric_medians=medians,
        error_counts={e: errors.get(e, 0) for e in ERROR_TYPES},
        error_proportions=proportions,
    )


def run_evaluation(
    cases: Sequence[QaCase],
    predict: Callable[[QaCase], str],
    db: Datastore,
    model: str,
) -> EvalReport:
    """Generate SQL for every case, score it, and aggregate per user class.

    ``predict`` maps a case to SQL text (typically the retrieval pipeline
    plus a model backend). A BackendUnavailable abort yields a report
    flagged partial with the cases evaluated so far.
    """
    results: list[EvalCaseResult] = []
    partial = False
    for case in cases:
        try:
            predicted = predict(case)
        except NonSqlOutput:
            predicted = ""
        except BackendUnavailable:
            partial = True
            break
        results.append(evaluate_case(case, predicted, db))

    slices = []
    for user_class in USER_CLASSES:
        subset = [r for r in results if r.user_class == user_class]
        if subset:
            slices.append(_build_slice(model, user_class, subset))
    return EvalReport(model=model, slices=slices, cases=results, partial=partial)
