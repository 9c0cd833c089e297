"""Confusion-matrix accounting and the four headline metrics.

MCC = (TP*TN - FP*FN) / sqrt((TP+FP)(TP+FN)(TN+FP)(TN+FN)), defined as 0
when any denominator factor vanishes.  SE = TP/(TP+FN), ES = TN/(TN+FP),
PR = TP/(TP+FP); undefined ratios evaluate to 0 and are listed in
``ConfusionMatrix.degenerate``.  Numerators are computed in exact integer
arithmetic before the final float division.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self) -> None:
        for name in ("tp", "tn", "fp", "fn"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def degenerate(self) -> frozenset[str]:
        """Which of se/es/pr have a zero denominator."""
        out = set()
        if self.tp + self.fn == 0:
            out.add("se")
        if self.tn + self.fp == 0:
            out.add("es")
        if self.tp + self.fp == 0:
            out.add("pr")
        return frozenset(out)


def confusion(labels: Sequence[int], preds: Sequence[int]) -> ConfusionMatrix:
    """Count a binary confusion matrix from parallel label/prediction lists."""
    if len(labels) != len(preds):
        raise ValueError(f"length mismatch: {len(labels)} labels vs {len(preds)} predictions")
    if len(labels) == 0:
        raise ValueError("cannot build a confusion matrix from empty inputs")
    tp = tn = fp = fn = 0
    for y, p in zip(labels, preds):
        if y not in (0, 1) or p not in (0, 1):
            raise ValueError(f"labels and predictions must be 0/1, got ({y}, {p})")
        if y == 1:
            tp, fn = (tp + 1, fn) if p == 1 else (tp, fn + 1)
        else:
            tn, fp = (tn + 1, fp) if p == 0 else (tn, fp + 1)
    return ConfusionMatrix(tp=tp, tn=tn, fp=fp, fn=fn)


def mcc(m: ConfusionMatrix) -> float:
    """Matthews correlation coefficient; 0 for degenerate denominators."""
    if m.total == 0:
        raise ValueError("confusion matrix is empty")
    denom2 = (m.tp + m.fp) * (m.tp + m.fn) * (m.tn + m.fp) * (m.tn + m.fn)
    if denom2 == 0:
        return 0.0
    return (m.tp * m.tn - m.fp * m.fn) / math.sqrt(denom2)


def se_es_pr(m: ConfusionMatrix) -> tuple[float, float, float]:
    """(sensitivity, specificity, precision); zero-denominator ratios are 0."""
    if m.total == 0:
        raise ValueError("confusion matrix is empty")
    se = m.tp / (m.tp + m.fn) if m.tp + m.fn else 0.0
    es = m.tn / (m.tn + m.fp) if m.tn + m.fp else 0.0
    pr = m.tp / (m.tp + m.fp) if m.tp + m.fp else 0.0
    return se, es, pr


@dataclass(frozen=True)
class EvalReport:
    """Confusion counts plus MCC/SE/ES/PR for one evaluated model."""

    matrix: ConfusionMatrix
    mcc: float
    se: float
    es: float
    pr: float
    pipeline: str = ""
    seed: int | None = None
    wall_time_s: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def from_confusion(
        cls,
        matrix: ConfusionMatrix,
        pipeline: str = "",
        seed: int | None = None,
        wall_time_s: float | None = None,
        **extra,
    ) -> "EvalReport":
        se, es, pr = se_es_pr(matrix)
        return cls(
            matrix=matrix,
            mcc=mcc(matrix),
            se=se,
            es=es,
            pr=pr,
            pipeline=pipeline,
            seed=seed,
            wall_time_s=wall_time_s,
            extra=dict(extra),
        )

    def as_row(self) -> dict:
        row = {
            "pipeline": self.pipeline,
            "tp": self.matrix.tp,
            "tn": self.matrix.tn,
            "fp": self.matrix.fp,
            "fn": self.matrix.fn,
            "mcc": round(self.mcc, 6),
            "se": round(self.se, 6),
            "es": round(self.es, 6),
            "pr": round(self.pr, 6),
            "seed": self.seed,
            "wall_time_s": None if self.wall_time_s is None else round(self.wall_time_s, 3),
        }
        row.update(self.extra)
        return row


REPORT_COLUMNS = ["pipeline", "tp", "tn", "fp", "fn", "mcc", "se", "es", "pr", "seed", "wall_time_s"]


def write_report_csv(reports: Iterable[EvalReport], path: str | Path) -> None:
    rows = [r.as_row() for r in reports]
    columns = list(REPORT_COLUMNS)
    for row in rows:
        columns += [k for k in row if k not in columns]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(rows)


def write_report_json(reports: Iterable[EvalReport], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for report in reports:
            fh.write(json.dumps(report.as_row()) + "\n")
