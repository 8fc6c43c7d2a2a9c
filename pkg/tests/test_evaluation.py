import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats
from sklearn.metrics import precision_recall_fscore_support

from markup_infer.baselines.random_baseline import RandomClassifier
from markup_infer.evaluation import evaluate, macro_f1, macro_table, paired_ttest, t_two_sided_p


def test_perfect():
    r = evaluate(list("abcab"), list("abcab"))
    assert r.macro == {"precision": 1.0, "recall": 1.0, "f1": 1.0}


def test_all_one_class():
    r = evaluate(["A"] * 4, ["A", "A", "B", "B"], ["A", "B"])
    a, b = r.per_class["A"], r.per_class["B"]
    assert (a.precision, a.recall) == (0.5, 1.0) and a.f1 == pytest.approx(2 / 3)
    assert (b.precision, b.recall, b.f1) == (0, 0, 0)
    assert r.macro_f1 == pytest.approx(1 / 3)


def test_hand_confusion_matrix():
    gold = [0] * 4 + [1] * 6
    pred = [0, 0, 0, 1] + [0, 0, 1, 1, 1, 1]
    r = evaluate(pred, gold, [0, 1])
    assert r.confusion == [[3, 1], [2, 4]]
    c0, c1 = r.per_class[0], r.per_class[1]
    assert c0.precision == pytest.approx(0.6) and c0.recall == pytest.approx(0.75)
    assert c0.f1 == pytest.approx(2 / 3)
    assert c1.precision == pytest.approx(0.8) and c1.recall == pytest.approx(2 / 3)
    assert c1.f1 == pytest.approx(16 / 22)
    assert r.macro_f1 == pytest.approx((2 / 3 + 16 / 22) / 2)
    assert round(r.macro_f1, 3) == 0.697


def test_length_and_label_errors():
    with pytest.raises(ValueError, match="length"):
        evaluate([1], [1, 2])
    with pytest.raises(ValueError):
        evaluate(["z"], ["a"], ["a"])


def _recount(pred, gold, classes):
    out = {}
    for c in classes:
        tp = sum(1 for p, g in zip(pred, gold) if p == c and g == c)
        fp = sum(1 for p, g in zip(pred, gold) if p == c and g != c)
        fn = sum(1 for p, g in zip(pred, gold) if p != c and g == c)
        pr = tp / (tp + fp) if tp + fp else 0.0
        rc = tp / (tp + fn) if tp + fn else 0.0
        out[c] = (pr, rc, 2 * pr * rc / (pr + rc) if pr + rc else 0.0, tp + fn)
    return out


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from("abcd"), st.sampled_from("abcd")), min_size=1, max_size=60),
       st.randoms(use_true_random=False))
def test_agrees_with_recount_and_sklearn(pairs, rnd):
    pred, gold = [p for p, _ in pairs], [g for _, g in pairs]
    classes = list("abcd")
    r = evaluate(pred, gold, classes)
    want = _recount(pred, gold, classes)
    p, rc, f, s = precision_recall_fscore_support(gold, pred, labels=classes, zero_division=0)
    for i, c in enumerate(classes):
        got = r.per_class[c]
        assert (got.precision, got.recall, got.f1, got.support) == pytest.approx(want[c])
        assert (got.precision, got.recall, got.f1, got.support) == pytest.approx((p[i], rc[i], f[i], s[i]))
    assert sum(x.support for x in r.per_class.values()) == len(pairs)
    assert all(0 <= v <= 1 for v in r.macro.values())
    shuffled = pairs[:]
    rnd.shuffle(shuffled)
    r2 = evaluate([p for p, _ in shuffled], [g for _, g in shuffled], classes)
    assert r2.to_json() == r.to_json()


def test_macro_f1_scorer_order():
    assert macro_f1(["A", "A", "B", "B"], ["A"] * 4) == pytest.approx(1 / 3)


def test_random_baseline_convergence():
    classes = [f"c{i}" for i in range(8)]
    gold = [classes[i % 8] for i in range(100_000)]
    pred = RandomClassifier(random_state=0).fit(None, classes).predict(gold)
    assert abs(evaluate(list(pred), gold, classes).macro_f1 - 0.125) <= 0.01


# ---------------------------------------------------------------- t-test


def test_hand_t_test():
    r = paired_ttest([2, 1, 3, 0, 2], [0] * 5)
    assert r.df == 4 and r.t == pytest.approx(3.138, abs=1e-3) and r.p == pytest.approx(0.0349, abs=1e-4)


def test_degenerate_paths():
    r = paired_ttest([0.3, 0.5], [0.3, 0.5])
    assert r.degenerate and r.p == 1.0
    r = paired_ttest([2, 2, 2, 2], [1, 1, 1, 1])
    assert r.degenerate and math.isinf(r.t) and r.p < 1e-12
    with pytest.raises(ValueError):
        paired_ttest([1], [0])


def test_t_test_matches_scipy():
    rng = random.Random(4)
    for _ in range(200):
        n = rng.randint(2, 30)
        a = [rng.gauss(0, 1) for _ in range(n)]
        b = [x + rng.gauss(rng.uniform(-1, 1), rng.uniform(0.1, 2)) for x in a]
        ours = paired_ttest(a, b)
        ref = stats.ttest_rel(a, b)
        assert ours.t == pytest.approx(ref.statistic, rel=1e-10)
        assert ours.p == pytest.approx(ref.pvalue, rel=1e-7, abs=1e-12)


@pytest.mark.parametrize("t,df", [(0.0, 3), (1.5, 1), (10.0, 2), (40.0, 50), (-2.2, 9)])
def test_tail_probability(t, df):
    assert t_two_sided_p(t, df) == pytest.approx(2 * stats.t.sf(abs(t), df), rel=1e-8, abs=1e-14)


# ---------------------------------------------------------------- tables


def test_macro_table_layout():
    r = evaluate(["A"] * 4, ["A", "A", "B", "B"], ["A", "B"])
    table = macro_table({"Random Forest": {"Events": r}, "Random": {"Events": r, "Drama": r}})
    lines = table.splitlines()
    assert lines[0].startswith("Macro averages")
    assert "Events" in lines[1] and "Drama" in lines[1]
    rf = next(line for line in lines if line.startswith("Random Forest"))
    assert "25.00" in rf and "50.00" in rf and "33.33" in rf and rf.rstrip().endswith("-")
    assert len({len(line) for line in lines[2:]}) == 1


def test_report_text_and_json():
    r = evaluate(["A", "B"], ["A", "B"], ["A", "B"], {"seed": 3})
    assert "macro avg" in r.to_text()
    assert r.to_json()["provenance"] == {"seed": 3}
    assert np.array(r.to_json()["confusion"]).trace() == 2
