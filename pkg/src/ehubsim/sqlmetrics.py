"""Token-level SQL comparison metrics.

Tokenization keeps parens, commas, and operators as tokens, preserves
string literals verbatim, folds everything else to lowercase, and drops
semicolon statement terminators. Clause extraction scans top-level
keywords with parenthesis-depth tracking, so subquery tokens stay inside
the enclosing clause.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Optional, Sequence

_TOKEN_RE = re.compile(
    r"""
    '(?:[^']|'')*'      # single-quoted literal, '' escape
    | \w+               # identifier / keyword / number
    | [^\s]             # any other single character
    """,
    re.VERBOSE,
)

# Tokens compared as punctuation-free in clause overlap scoring.
_PUNCT_TOKENS = {"(", ")", ",", "."}

CLAUSE_NAMES = ("SELECT", "WHERE", "GROUP BY", "ORDER BY")

_AGGREGATES = {"count", "avg", "sum", "min", "max"}

_SQL_KEYWORDS = {
    "select", "distinct", "from", "where", "group", "order", "by", "having",
    "limit", "offset", "as", "and", "or", "not", "in", "is", "null", "like",
    "between", "join", "inner", "left", "right", "outer", "cross", "on",
    "union", "intersect", "except", "case", "when", "then", "else", "end",
    "asc", "desc", "exists", "all", "any", "with",
}


def tokenize_sql(sql: str) -> list[str]:
    """Split SQL into comparison tokens.

    Keywords and identifiers are lowercased; quoted string literals are
    kept verbatim (quotes included); semicolons are dropped.
    """
    tokens = []
    for tok in _TOKEN_RE.findall(sql):
        if tok == ";":
            continue
        if tok.startswith("'"):
            tokens.append(tok)
        else:
            tokens.append(tok.lower())
    return tokens


@dataclass
class ClauseMap:
    """Top-level clause token spans of one SELECT statement."""

    clauses: dict[str, list[str]] = field(default_factory=dict)
    unparsable: bool = False
    # spans used internally by the error classifier
    from_tokens: list[str] = field(default_factory=list)
    having_tokens: list[str] = field(default_factory=list)
    limit_tokens: list[str] = field(default_factory=list)


_BOUNDARY = {"select", "from", "where", "group", "having", "order", "limit",
             "union", "intersect", "except"}


def extract_clauses(sql: str) -> ClauseMap:
    """Locate top-level SELECT / WHERE / GROUP BY / ORDER BY spans.

    Subquery contents stay inside the enclosing clause's span. Queries
    with no top-level SELECT fall back to one whole-query span and are
    flagged unparsable.
    """
    tokens = tokenize_sql(sql)
    depth = 0
    spans: list[tuple[str, list[str]]] = []
    current: Optional[list[str]] = None
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth = max(0, depth - 1)
        if depth == 0 and not tok.startswith("'") and tok in _BOUNDARY:
            if tok in ("group", "order") and i + 1 < len(tokens) \
                    and tokens[i + 1] == "by":
                name = f"{tok} by"
                i += 1
            else:
                name = tok
            current = []
            spans.append((name, current))
            i += 1
            continue
        if current is not None:
            current.append(tok)
        i += 1

    names = [name for name, _ in spans]
    if "select" not in names:
        out = ClauseMap(unparsable=True)
        out.clauses["SELECT"] = list(tokens)
        return out

    out = ClauseMap()
    for name, span in spans:
        if name == "select":
            out.clauses.setdefault("SELECT", span)
        elif name == "where":
            out.clauses.setdefault("WHERE", span)
        elif name == "group by":
            out.clauses.setdefault("GROUP BY", span)
        elif name == "order by":
            out.clauses.setdefault("ORDER BY", span)
        elif name == "from":
            out.from_tokens = out.from_tokens or span
        elif name == "having":
            out.having_tokens = out.having_tokens or span
        elif name == "limit":
            out.limit_tokens = out.limit_tokens or span
    return out


def _comparison_multiset(tokens: Sequence[str]) -> Counter:
    return Counter(t for t in tokens if t not in _PUNCT_TOKENS)


def _multiset_f1(pred: Counter, gold: Counter) -> float:
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    overlap = sum((pred & gold).values())
    p = overlap / sum(pred.values())
    r = overlap / sum(gold.values())
    if p + r == 0:
        return 0.0
    return 2 * p * r / (p + r)


def component_match_f1(pred_sql: str, gold_sql: str) -> float:
    """Mean per-clause token-overlap F1 over SELECT/WHERE/GROUP BY/ORDER BY.

    Punctuation tokens are excluded from the overlap. A clause present on
    only one side scores 0; clauses absent from both are skipped. If either
    query is unparsable, the whole token streams are compared as one clause.
    """
    pred_map = extract_clauses(pred_sql)
    gold_map = extract_clauses(gold_sql)
    if pred_map.unparsable or gold_map.unparsable:
        return _multiset_f1(
            _comparison_multiset(tokenize_sql(pred_sql)),
            _comparison_multiset(tokenize_sql(gold_sql)),
        )
    scores = []
    for name in CLAUSE_NAMES:
        in_pred = name in pred_map.clauses
        in_gold = name in gold_map.clauses
        if not in_pred and not in_gold:
            continue
        if in_pred != in_gold:
            scores.append(0.0)
            continue
        scores.append(_multiset_f1(
            _comparison_multiset(pred_map.clauses[name]),
            _comparison_multiset(gold_map.clauses[name]),
        ))
    if not scores:
        return 0.0
    return sum(scores) / len(scores)


# --- BLEU / ROUGE -----------------------------------------------------------

def _ngrams(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(pred: Sequence[str], gold: Sequence[str], n: int) -> float:
    """BLEU with uniform weights over orders 1..n.

    Clipped n-gram precision; brevity penalty exp(1 - |gold|/|pred|) when
    the prediction is shorter; zero numerators at order >= 2 are add-one
    smoothed. An empty prediction scores 0.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not pred:
        return 0.0
    log_sum = 0.0
    for order in range(1, n + 1):
        pred_ngrams = _ngrams(pred, order)
        gold_ngrams = _ngrams(gold, order)
        matched = sum((pred_ngrams & gold_ngrams).values())
        total = sum(pred_ngrams.values())
        if matched == 0:
            if order == 1:
                return 0.0
            precision = (matched + 1) / (total + 1)
        else:
            precision = matched / total
        log_sum += math.log(precision) / n
    bp = 1.0
    if len(pred) < len(gold):
        bp = math.exp(1.0 - len(gold) / len(pred))
    return bp * math.exp(log_sum)


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, start=1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[j - 1]))
        prev = cur
    return prev[-1]


def rouge(pred: Sequence[str], gold: Sequence[str], variant: str) -> float:
    """ROUGE-1 / ROUGE-2 (n-gram overlap F1) or ROUGE-L (LCS F1, beta=1)."""
    if not pred and not gold:
        return 1.0
    if not pred or not gold:
        return 0.0
    if variant in ("1", "2", 1, 2):
        order = int(variant)
        pred_ngrams = _ngrams(pred, order)
        gold_ngrams = _ngrams(gold, order)
        if not pred_ngrams and not gold_ngrams:
            return 1.0 if list(pred) == list(gold) else 0.0
        if not pred_ngrams or not gold_ngrams:
            return 0.0
        overlap = sum((pred_ngrams & gold_ngrams).values())
        p = overlap / sum(pred_ngrams.values())
        r = overlap / sum(gold_ngrams.values())
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)
    if variant in ("L", "l"):
        lcs = _lcs_length(pred, gold)
        p = lcs / len(pred)
        r = lcs / len(gold)
        return 0.0 if p + r == 0 else 2 * p * r / (p + r)
    raise ValueError(f"unknown ROUGE variant {variant!r}")


# --- structural analysis used by the error classifier -----------------------

def strip_precision_ops(tokens: Sequence[str]) -> list[str]:
    """Remove DISTINCT keywords and unwrap ABS(x) / ROUND(x[, n]) calls."""
    out = [t for t in tokens if t != "distinct"]
    changed = True
    while changed:
        changed = False
        for i, tok in enumerate(out):
            if tok in ("abs", "round") and i + 1 < len(out) and out[i + 1] == "(":
                depth = 0
                for j in range(i + 1, len(out)):
                    if out[j] == "(":
                        depth += 1
                    elif out[j] == ")":
                        depth -= 1
                        if depth == 0:
                            inner = out[i + 2:j]
                            if tok == "round":
                                inner = _drop_round_digits(inner)
                            out = out[:i] + inner + out[j + 1:]
                            changed = True
                            break
                if changed:
                    break
    return out


def _drop_round_digits(inner: list[str]) -> list[str]:
    # ROUND(expr, n): drop the trailing ", n" at depth 0
    depth = 0
    for i in range(len(inner) - 1, -1, -1):
        if inner[i] == ")":
            depth += 1
        elif inner[i] == "(":
            depth -= 1
        elif inner[i] == "," and depth == 0:
            return inner[:i]
    return inner


def split_projections(select_span: Sequence[str]) -> list[tuple[str, ...]]:
    """Split a SELECT span on top-level commas; strip aliases and qualifiers."""
    items: list[list[str]] = [[]]
    depth = 0
    for tok in select_span:
        if tok == "(":
            depth += 1
        elif tok == ")":
            depth = max(0, depth - 1)
        if tok == "," and depth == 0:
            items.append([])
        else:
            items[-1].append(tok)
    out = []
    for item in items:
        if "as" in item:
            item = item[:item.index("as")]
        item = _collapse_qualifiers(item)
        if item:
            out.append(tuple(item))
    return out


def _collapse_qualifiers(tokens: Sequence[str]) -> list[str]:
    """Turn [t, '.', col] into [col]."""
    out: list[str] = []
    i = 0
    while i < len(tokens):
        if (i + 2 < len(tokens)
                and tokens[i + 1] == "."
                and re.fullmatch(r"\w+", tokens[i])
                and re.fullmatch(r"\w+", tokens[i + 2])):
            out.append(tokens[i + 2])
            i += 3
        else:
            if tokens[i] != ".":
                out.append(tokens[i])
            i += 1
    return out


def from_table_names(clause_map: ClauseMap) -> frozenset[str]:
    """Table identifiers in the top-level FROM span (after FROM/JOIN)."""
    tokens = clause_map.from_tokens
    names: set[str] = set()
    depth = 0
    expect_table = True
    for tok in tokens:
        if tok == "(":
            depth += 1
            continue
        if tok == ")":
            depth = max(0, depth - 1)
            continue
        if depth > 0:
            continue
        if tok == "join":
            expect_table = True
            continue
        if tok in ("inner", "left", "right", "outer", "cross", "natural"):
            continue
        if tok == ",":
            expect_table = True
            continue
        if expect_table and re.fullmatch(r"\w+", tok) and tok not in _SQL_KEYWORDS:
            names.add(tok)
            expect_table = False
    return frozenset(names)


def limit_value(clause_map: ClauseMap) -> Optional[str]:
    for tok in clause_map.limit_tokens:
        if re.fullmatch(r"\d+", tok):
            return tok
    return None


def aggregate_functions(select_span: Sequence[str]) -> Counter:
    """Multiset of aggregate function names invoked in the SELECT span."""
    out: Counter = Counter()
    for i, tok in enumerate(select_span):
        if tok in _AGGREGATES and i + 1 < len(select_span) \
                and select_span[i + 1] == "(":
            out[tok] += 1
    return out


def group_by_columns(clause_map: ClauseMap) -> Counter:
    span = clause_map.clauses.get("GROUP BY", [])
    return Counter(_collapse_qualifiers(
        [t for t in span if t not in _PUNCT_TOKENS]))


def selected_field_names(select_span: Sequence[str]) -> frozenset[str]:
    """Identifier-like tokens projected by SELECT, aliases excluded."""
    names: set[str] = set()
    skip_next = False
    collapsed = _collapse_qualifiers(list(select_span))
    for i, tok in enumerate(collapsed):
        if skip_next:
            skip_next = False
            continue
        if tok == "as":
            skip_next = True
            continue
        if tok in _PUNCT_TOKENS or tok.startswith("'"):
            continue
        if tok in _SQL_KEYWORDS:
            continue
        if tok in _AGGREGATES and i + 1 < len(collapsed) and collapsed[i + 1] == "(":
            continue
        if re.fullmatch(r"\w+", tok):
            if re.fullmatch(r"\d+(\.\d+)?", tok):
                continue
            # skip non-aggregate function names too
            if i + 1 < len(collapsed) and collapsed[i + 1] == "(":
                continue
            names.add(tok)
        elif tok == "*":
            names.add("*")
    return frozenset(names)
