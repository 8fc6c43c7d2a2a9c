"""Per-class and macro precision/recall/F1, paired t-tests, report tables."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy import integrate, special


@dataclass
class ClassScores:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass
class EvaluationReport:
    classes: list
    per_class: dict
    macro: dict
    confusion: list
    provenance: dict = field(default_factory=dict)

    @property
    def macro_f1(self) -> float:
        return self.macro["f1"]

    def to_json(self) -> dict:
        return {
            "classes": self.classes,
            "per_class": {c: vars(s) for c, s in self.per_class.items()},
            "macro": self.macro,
            "confusion": self.confusion,
            "provenance": self.provenance,
        }

    def to_text(self) -> str:
        width = max([len(c) for c in self.classes] + [9])
        lines = [f"{'class':<{width}}  {'precision':>9}  {'recall':>9}  {'F1':>9}  {'support':>7}"]
        for c in self.classes:
            s = self.per_class[c]
            lines.append(f"{c:<{width}}  {100 * s.precision:9.2f}  {100 * s.recall:9.2f}  {100 * s.f1:9.2f}  {s.support:7d}")
        m = self.macro
        lines.append(f"{'macro avg':<{width}}  {100 * m['precision']:9.2f}  {100 * m['recall']:9.2f}  {100 * m['f1']:9.2f}  "
                     f"{sum(s.support for s in self.per_class.values()):7d}")
        return "\n".join(lines)


def _ratio(a: float, b: float) -> float:
    return a / b if b else 0.0


def evaluate(predictions: Sequence, gold: Sequence, classes: Optional[Sequence] = None,
             provenance: Optional[dict] = None) -> EvaluationReport:
    """Confusion matrix (rows gold, columns predicted) and derived metrics.

    A metric with a zero denominator is 0; macro values are unweighted means
    over ``classes``.
    """
    if len(predictions) != len(gold):
        raise ValueError(f"length mismatch: {len(predictions)} predictions, {len(gold)} gold labels")
    if classes is None:
        classes = sorted(set(gold) | set(predictions))
    classes = list(classes)
    index = {c: i for i, c in enumerate(classes)}
    cm = np.zeros((len(classes), len(classes)), dtype=np.int64)
    for p, g in zip(predictions, gold):
        if p not in index or g not in index:
            raise ValueError(f"label outside class list: {p if p not in index else g!r}")
        cm[index[g], index[p]] += 1
    per_class = {}
    for c, i in index.items():
        tp = int(cm[i, i])
        fp = int(cm[:, i].sum()) - tp
        fn = int(cm[i, :].sum()) - tp
        prec = _ratio(tp, tp + fp)
        rec = _ratio(tp, tp + fn)
        per_class[c] = ClassScores(prec, rec, _ratio(2 * prec * rec, prec + rec), tp + fn)
    macro = {k: float(np.mean([getattr(s, k) for s in per_class.values()])) for k in ("precision", "recall", "f1")}
    return EvaluationReport(classes, per_class, macro, cm.tolist(), dict(provenance or {}))


def macro_f1(gold: Sequence, predictions: Sequence, classes: Optional[Sequence] = None) -> float:
    """Macro F1 with scikit-learn's ``scorer(y_true, y_pred)`` argument order."""
    if classes is None:
        classes = sorted(set(gold))
    classes = list(classes) + sorted(set(predictions) - set(classes))
    return evaluate(list(predictions), list(gold), classes).macro_f1


@dataclass(frozen=True)
class TTestResult:
    t: float
    p: float
    df: int
    degenerate: bool = False


def _t_pdf(x: float, df: int) -> float:
    logc = special.gammaln((df + 1) / 2) - special.gammaln(df / 2) - 0.5 * math.log(df * math.pi)
    return math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))


def t_two_sided_p(t: float, df: int) -> float:
    """Two-sided tail probability, integrating the Student-t density."""
    if math.isinf(t):
        return 0.0
    a = abs(t)
    # substitute x = a + u/(1-u) to integrate over a finite interval
    def integrand(u):
        if u >= 1.0:
            return 0.0
        return _t_pdf(a + u / (1 - u), df) / (1 - u) ** 2

    tail, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-10, limit=200)
    return min(1.0, 2.0 * tail)


def paired_ttest(a: Sequence[float], b: Sequence[float]) -> TTestResult:
    """Paired t-test on ``a - b``; df = n - 1, two-sided p value.

    All-zero differences give ``p = 1`` flagged degenerate; zero spread with
    a nonzero mean gives an infinite t and ``p = 0``.
    """
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if d.ndim != 1 or len(d) < 2:
        raise ValueError("need two equal-length score lists with at least 2 pairs")
    n = len(d)
    mean = d.mean()
    sd = d.std(ddof=1)
    if np.all(d == 0):
        return TTestResult(float("nan"), 1.0, n - 1, True)
    if sd == 0:
        return TTestResult(math.copysign(float("inf"), mean), 0.0, n - 1, True)
    t = float(mean / (sd / math.sqrt(n)))
    return TTestResult(t, t_two_sided_p(t, n - 1), n - 1)


def macro_table(results: Mapping[str, Mapping[str, EvaluationReport]]) -> str:
    """Aligned text table: one row per system, P/R/F1 columns per dataset."""
    datasets: list = []
    for per_ds in results.values():
        for ds in per_ds:
            if ds not in datasets:
                datasets.append(ds)
    name_w = max([len(s) for s in results] + [10])
    col_w = 27
    head = f"{'Classifier':<{name_w}}" + "".join(f" | {ds:^{col_w}}" for ds in datasets)
    sub = " " * name_w + "".join(f" | {'Precision':>9} {'Recall':>8} {'F1':>8}" for _ in datasets)
    lines = ["Macro averages for precision, recall, and F1 score [%]", head, sub, "-" * len(sub)]
    for system, per_ds in results.items():
        row = f"{system:<{name_w}}"
        for ds in datasets:
            r = per_ds.get(ds)
            if r is None:
                row += f" | {'-':>9} {'-':>8} {'-':>8}"
            else:
                m = r.macro
                row += f" | {100 * m['precision']:9.2f} {100 * m['recall']:8.2f} {100 * m['f1']:8.2f}"
        lines.append(row)
    return "\n".join(lines)


def dumps_report(report: EvaluationReport) -> str:
    return json.dumps(report.to_json(), indent=2, sort_keys=True)
