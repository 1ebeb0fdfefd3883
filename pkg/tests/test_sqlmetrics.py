import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ehubsim.sqlmetrics import (
    bleu_n,
    component_match_f1,
    extract_clauses,
    rouge,
    strip_precision_ops,
    tokenize_sql,
)

GOLD_SYS = ("SELECT edge_id, COUNT(*) AS station_count FROM stations "
            "GROUP BY edge_id ORDER BY station_count DESC LIMIT 1;")
PRED_SYS = ("SELECT edge_id, COUNT(station_id) AS station_count FROM stations "
            "GROUP BY edge_id ORDER BY station_count DESC LIMIT 1;")
GOLD_USER = ("SELECT end_edge, COUNT(*) AS freq FROM user_paths "
             "GROUP BY end_edge ORDER BY freq DESC LIMIT 3;")


class TestTokenizer:
    def test_simple_select(self):
        assert tokenize_sql("SELECT a FROM t") == ["select", "a", "from", "t"]

    def test_count_star(self):
        assert tokenize_sql("COUNT(*)") == ["count", "(", "*", ")"]

    def test_gold_user_query_token_count(self):
        assert len(tokenize_sql(GOLD_USER)) == 20

    def test_string_literals_kept_verbatim(self):
        tokens = tokenize_sql("SELECT * FROM t WHERE x = 'A bC'")
        assert "'A bC'" in tokens

    def test_quoted_punctuation_stays_single_token(self):
        tokens = tokenize_sql("REPLACE(seq, '(', '')")
        assert tokens == ["replace", "(", "seq", ",", "'('", ",", "''", ")"]

    def test_case_folding(self):
        assert tokenize_sql("SeLeCt COUNT(X)") == \
            ["select", "count", "(", "x", ")"]

    @given(st.text(max_size=200))
    @settings(max_examples=200, deadline=None)
    def test_total_on_arbitrary_text(self, text):
        tokens = tokenize_sql(text)
        assert all(isinstance(t, str) and t for t in tokens)


class TestExtractClauses:
    def test_select_only(self):
        cm = extract_clauses("SELECT a FROM t")
        assert set(cm.clauses) == {"SELECT"}
        assert cm.clauses["SELECT"] == ["a"]

    def test_gold_system_clauses(self):
        cm = extract_clauses(GOLD_SYS)
        assert Counter(cm.clauses["SELECT"]) == Counter(
            ["edge_id", ",", "count", "(", "*", ")", "as", "station_count"])
        assert cm.clauses["GROUP BY"] == ["edge_id"]
        assert cm.clauses["ORDER BY"] == ["station_count", "desc"]

    def test_subquery_stays_in_where(self):
        cm = extract_clauses(
            "SELECT a FROM t WHERE x IN (SELECT y FROM u GROUP BY y)")
        assert "GROUP BY" not in cm.clauses
        where = cm.clauses["WHERE"]
        assert "select" in where and "y" in where

    def test_missing_clause_absent(self):
        cm = extract_clauses("SELECT a FROM t")
        assert "WHERE" not in cm.clauses
        assert "ORDER BY" not in cm.clauses

    def test_unparsable_falls_back_flagged(self):
        cm = extract_clauses("DELETE FROM t")
        assert cm.unparsable
        assert "SELECT" in cm.clauses  # whole-query fallback span


class TestComponentF1:
    def test_identical_query(self):
        assert component_match_f1(GOLD_SYS, GOLD_SYS) == 1.0

    def test_disjoint_select_only(self):
        assert component_match_f1("SELECT a", "SELECT b") == 0.0

    def test_station_count_pair(self):
        # SELECT differs only in the COUNT argument: F1 0.8 there, 1.0 on
        # GROUP BY and ORDER BY
        assert component_match_f1(PRED_SYS, GOLD_SYS) == \
            pytest.approx(0.9333, abs=1e-4)

    def test_clause_present_on_one_side_scores_zero(self):
        a = "SELECT a FROM t WHERE x = 1"
        b = "SELECT a FROM t"
        assert component_match_f1(a, b) == pytest.approx(0.5)


def reference_bleu1(pred, gold):
    """Slow direct form: clipped unigram precision times brevity penalty."""
    if not pred:
        return 0.0
    pred_counts = Counter(pred)
    gold_counts = Counter(gold)
    clipped = sum(min(c, gold_counts[t]) for t, c in pred_counts.items())
    precision = clipped / len(pred)
    bp = math.exp(1 - len(gold) / len(pred)) if len(pred) < len(gold) else 1.0
    return precision * bp


class TestBleu:
    def test_identical_all_orders(self):
        tokens = tokenize_sql(GOLD_SYS)
        for n in (1, 2, 3, 4):
            assert bleu_n(tokens, tokens, n) == pytest.approx(1.0)

    def test_single_substitution_bleu1(self):
        pred = ["select", "a", "from", "t"]
        gold = ["select", "b", "from", "t"]
        assert bleu_n(pred, gold, 1) == pytest.approx(0.75, abs=1e-9)

    def test_empty_prediction(self):
        assert bleu_n([], ["select"], 4) == 0.0

    def test_brevity_penalty(self):
        pred = ["select", "a"]
        gold = ["select", "a", "from", "t"]
        expected = math.exp(1 - 4 / 2) * math.exp(
            (math.log(1.0) + math.log(1.0)) / 2)
        assert bleu_n(pred, gold, 2) == pytest.approx(expected)

    def test_smoothing_applies_above_order_one(self):
        pred = ["a", "b"]
        gold = ["a", "c"]
        # unigram precision 1/2; bigram numerator 0 -> (0+1)/(1+1)
        expected = math.exp((math.log(0.5) + math.log(0.5)) / 2)
        assert bleu_n(pred, gold, 2) == pytest.approx(expected)

    @given(st.lists(st.sampled_from("abcdef"), max_size=12),
           st.lists(st.sampled_from("abcdef"), max_size=12))
    @settings(max_examples=100, deadline=None)
    def test_bleu1_matches_reference(self, pred, gold):
        assert bleu_n(pred, gold, 1) == pytest.approx(
            reference_bleu1(pred, gold), abs=1e-12)

    @given(st.lists(st.sampled_from("abcd"), max_size=10),
           st.lists(st.sampled_from("abcd"), max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_bounded(self, pred, gold):
        for n in (1, 2, 3, 4):
            assert 0.0 <= bleu_n(pred, gold, n) <= 1.0 + 1e-12


class TestRouge:
    def test_identical(self):
        tokens = tokenize_sql(GOLD_USER)
        for variant in ("1", "2", "L"):
            assert rouge(tokens, tokens, variant) == pytest.approx(1.0)

    def test_lcs_example(self):
        assert rouge(["a", "b", "c"], ["a", "c"], "L") == \
            pytest.approx(0.8, abs=1e-9)

    def test_disjoint_all_variants(self):
        for variant in ("1", "2", "L"):
            assert rouge(["a", "b"], ["c", "d"], variant) == 0.0

    def test_single_disjoint_tokens(self):
        # no bigrams exist on either side, but the lists differ
        assert rouge(["a"], ["b"], "2") == 0.0

    def test_empty_rules(self):
        for variant in ("1", "2", "L"):
            assert rouge([], [], variant) == 1.0
            assert rouge([], ["a"], variant) == 0.0
            assert rouge(["a"], [], variant) == 0.0

    @given(st.lists(st.sampled_from("abcd"), max_size=10),
           st.lists(st.sampled_from("abcd"), max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_all_one_iff_identical(self, pred, gold):
        scores = [rouge(pred, gold, v) for v in ("1", "2", "L")]
        if pred == gold:
            assert all(s == pytest.approx(1.0) for s in scores)
        else:
            assert any(s < 1.0 for s in scores)

    @given(st.lists(st.sampled_from("abcd"), max_size=10),
           st.lists(st.sampled_from("abcd"), max_size=10))
    @settings(max_examples=100, deadline=None)
    def test_bounded(self, pred, gold):
        for variant in ("1", "2", "L"):
            assert 0.0 <= rouge(pred, gold, variant) <= 1.0


class TestStripPrecisionOps:
    def test_distinct_removed(self):
        assert strip_precision_ops(tokenize_sql("SELECT DISTINCT a FROM t")) \
            == tokenize_sql("SELECT a FROM t")

    def test_abs_unwrapped(self):
        assert strip_precision_ops(tokenize_sql("SELECT ABS(x - 1) FROM t")) \
            == tokenize_sql("SELECT x - 1 FROM t")

    def test_round_digits_dropped(self):
        assert strip_precision_ops(tokenize_sql("SELECT ROUND(x, 2) FROM t")) \
            == tokenize_sql("SELECT x FROM t")

    def test_nested(self):
        assert strip_precision_ops(
            tokenize_sql("SELECT ROUND(ABS(x), 2) FROM t")) \
            == tokenize_sql("SELECT x FROM t")
