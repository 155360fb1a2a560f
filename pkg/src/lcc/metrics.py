"""Multi-label evaluation measures and k-fold cross-validation."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, FoldError, LCCError

MEASURES = ("hamming", "subset_accuracy", "recall", "precision", "f_measure")


def evaluate(y_true, y_pred):
    """The five per-instance measures for one labelling.

    Hamming counts agreements (higher is better).  Recall with no true
    positives labels, or precision with no predicted positives, is 1 when the
    other side is empty as well and 0 otherwise.
    """
    y = np.asarray(y_true).astype(int)
    yh = np.asarray(y_pred).astype(int)
    if y.shape != yh.shape or y.ndim != 1:
        raise DimensionMismatch(f"labellings have shapes {y.shape} and {yh.shape}")
    tp = int(np.sum((y == 1) & (yh == 1)))
    pos, pred_pos = int(y.sum()), int(yh.sum())
    recall = tp / pos if pos else float(pred_pos == 0)
    precision = tp / pred_pos if pred_pos else float(pos == 0)
    f = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return {
        "hamming": float(np.mean(y == yh)),
        "subset_accuracy": float(np.array_equal(y, yh)),
        "recall": float(recall),
        "precision": float(precision),
        "f_measure": float(f),
    }


def evaluate_batch(Y_true, Y_pred):
    """Measures averaged over the rows of two label matrices."""
    Y_true, Y_pred = np.asarray(Y_true), np.asarray(Y_pred)
    if Y_true.shape != Y_pred.shape:
        raise DimensionMismatch(f"{Y_true.shape} vs {Y_pred.shape}")
    rows = [evaluate(a, b) for a, b in zip(Y_true, Y_pred)]
    return {m: float(np.mean([r[m] for r in rows])) for m in MEASURES}


@dataclass(frozen=True)
class EvalReport:
    method: str
    mean: dict
    std: dict
    folds: tuple = field(default=(), compare=False)

    def row(self):
        out = {"method": self.method}
        for m in MEASURES:
            out[f"{m}_mean"] = self.mean[m]
            out[f"{m}_std"] = self.std[m]
        return out


def fold_assignment(n, folds, seed):
    """Fold index per row: seeded shuffle, then contiguous near-equal blocks."""
    if folds < 2:
        raise ValueError("need at least two folds")
    if n < folds:
        raise ValueError(f"{n} rows cannot fill {folds} folds")
    perm = np.random.default_rng(seed).permutation(n)
    assign = np.empty(n, dtype=int)
    for f, block in enumerate(np.array_split(perm, folds)):
        assign[block] = f
    return assign


def cross_validate(dataset, method, folds=5, seed=0, name=None):
    """k-fold CV of ``method`` (anything with ``fit_predict(X_tr, Y_tr, X_te)``).

    Measures are averaged over the rows of each test fold, then mean and
    sample standard deviation are taken across folds.
    """
    if dataset.n == 0:
        raise ValueError("empty dataset")
    assign = fold_assignment(dataset.n, folds, seed)
    per_fold = []
    for f in range(folds):
        tr, te = assign != f, assign == f
        try:
            Yh = method.fit_predict(dataset.X[tr], dataset.Y[tr], dataset.X[te])
        except LCCError as exc:
            raise FoldError(f, exc) from exc
        per_fold.append(evaluate_batch(dataset.Y[te], Yh))
    mean = {m: float(np.mean([r[m] for r in per_fold])) for m in MEASURES}
    std = {m: float(np.std([r[m] for r in per_fold], ddof=1)) for m in MEASURES}
    return EvalReport(name or getattr(method, "name", type(method).__name__), mean, std, tuple(per_fold))


def write_reports(reports, path):
    """One CSV row per method: mean and std columns for each measure."""
    cols = ["method"] + [f"{m}_{s}" for m in MEASURES for s in ("mean", "std")]
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(cols)
        for r in reports:
            row = r.row()
            w.writerow([row["method"]] + [format(row[c], ".17g") for c in cols[1:]])
