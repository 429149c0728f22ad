"""Edge-recovery metrics: confusion counts, TPR/FDR, F1 threshold scan, AUC."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .exceptions import DegenerateTruthError, ShapeMismatchError


def _flatten_pair(pred, truth, include_diagonal: bool):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise ShapeMismatchError(f"shapes differ: {pred.shape} vs {truth.shape}")
    if include_diagonal or pred.ndim != 2 or pred.shape[0] != pred.shape[1]:
        return pred.ravel(), truth.ravel()
    off = ~np.eye(pred.shape[0], dtype=bool)
    return pred[off], truth[off]


def confusion_counts(pred, truth, include_diagonal: bool = True):
    """Edge-wise (TP, FP, FN, TN) over all ordered pairs."""
    p, t = _flatten_pair(pred, truth, include_diagonal)
    p = p.astype(bool)
    t = t.astype(bool)
    tp = int((p & t).sum())
    fp = int((p & ~t).sum())
    fn = int((~p & t).sum())
    tn = int((~p & ~t).sum())
    return tp, fp, fn, tn


def tpr_fdr(pred, truth, include_diagonal: bool = True):
    """True positive rate and false discovery rate; 0/0 counts as 0."""
    tp, fp, fn, _ = confusion_counts(pred, truth, include_diagonal)
    tpr = tp / (tp + fn) if tp + fn > 0 else 0.0
    fdr = fp / (fp + tp) if fp + tp > 0 else 0.0
    return tpr, fdr


def f1_score(pred, truth, include_diagonal: bool = True) -> float:
    tp, fp, fn, _ = confusion_counts(pred, truth, include_diagonal)
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom > 0 else 0.0


def auc(scores, truth, include_diagonal: bool = True) -> float:
    """Rank-based (Mann-Whitney) area under the ROC curve; ties count 1/2.

    Raises:
        DegenerateTruthError: truth has no positive or no negative labels.
    """
    s, t = _flatten_pair(scores, truth, include_diagonal)
    t = t.astype(bool)
    n_pos = int(t.sum())
    n_neg = t.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateTruthError("AUC needs at least one positive and one negative")
    ranks = rankdata(s, method="average")
    u = ranks[t].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def max_f1_threshold(scores, truth, include_diagonal: bool = True):
    """Threshold (over the distinct score values) maximizing the F1 score.

    Prediction at threshold ``t`` is ``score >= t``; the candidate set is the
    distinct scores plus ``+inf``, so both the empty and the fully connected
    graph are reachable.  Ties in F1 are broken toward the sparser graph
    (larger threshold).  Returns ``(threshold, binary graph, f1)``.
    """
    scores = np.asarray(scores, dtype=float)
    s, t = _flatten_pair(scores, truth, include_diagonal)
    if not t.astype(bool).any() or t.astype(bool).all():
        raise DegenerateTruthError("F1 scan needs at least one positive and one negative")
    candidates = np.concatenate([[np.inf], np.unique(s)[::-1]])
    best_thr, best_f1 = np.inf, -1.0
    for thr in candidates:
        pred = s >= thr
        tp = int((pred & (t != 0)).sum())
        fp = int((pred & (t == 0)).sum())
        fn = int((~pred & (t != 0)).sum())
        denom = 2 * tp + fp + fn
        f1 = 2 * tp / denom if denom > 0 else 0.0
        if f1 > best_f1:
            best_f1, best_thr = f1, thr
    graph = (scores >= best_thr).astype(np.int8)
    if not include_diagonal and scores.ndim == 2 and scores.shape[0] == scores.shape[1]:
        np.fill_diagonal(graph, 0)
    return float(best_thr), graph, float(best_f1)


@dataclass(frozen=True)
class MetricsReport:
    """One evaluation of a recovered graph against the ground truth."""

    tpr: float
    fdr: float
    f1: float
    auc: float
    threshold: float | None
    tp: int
    fp: int
    fn: int
    tn: int
    method: str
    seed: int
    config_hash: str

    def to_dict(self) -> dict:
        return asdict(self)


def evaluate_graph(scores, pred, truth, method: str, seed: int, config_hash: str,
                   include_diagonal: bool = True,
                   threshold: float | None = None) -> MetricsReport:
    """Bundle all metrics for one prediction into a report."""
    tp, fp, fn, tn = confusion_counts(pred, truth, include_diagonal)
    tpr, fdr = tpr_fdr(pred, truth, include_diagonal)
    return MetricsReport(
        tpr=tpr,
        fdr=fdr,
        f1=f1_score(pred, truth, include_diagonal),
        auc=auc(scores, truth, include_diagonal),
        threshold=threshold,
        tp=tp, fp=fp, fn=fn, tn=tn,
        method=method,
        seed=seed,
        config_hash=config_hash,
    )


def write_metrics_json(path, report: MetricsReport) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report.to_dict(), fh, indent=1)
        fh.write("\n")
