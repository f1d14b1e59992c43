"""Evaluation protocols: span P/R/F1, recall at N, end-to-end accuracy,
and mean/min/max aggregation across repeated runs."""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from collections.abc import Sequence

Span = tuple[int, int]


def _validate_spans(spans: Sequence[Span], what: str) -> None:
    ordered = sorted(spans)
    for start, end in ordered:
        if start >= end:
            raise ValueError(f"{what} span {start, end} is empty or inverted")
    for (_, prev_end), (start, _) in zip(ordered, ordered[1:]):
        if start < prev_end:
            raise ValueError(f"{what} spans overlap: {ordered}")


def span_prf(
    predicted: Sequence[Sequence[Span]],
    gold: Sequence[Sequence[Span]],
) -> tuple[float, float, float]:
    """Micro-averaged precision/recall/F1 over exact span boundary matches.

    A predicted span counts only when both endpoints equal a gold span.
    With no spans on either side corpus-wide all three scores are 1.0.
    """
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions vs {len(gold)} gold lists")
    tp = n_pred = n_gold = 0
    for pred_spans, gold_spans in zip(predicted, gold):
        _validate_spans(pred_spans, "predicted")
        _validate_spans(gold_spans, "gold")
        pred_set = {tuple(s) for s in pred_spans}
        gold_set = {tuple(s) for s in gold_spans}
        tp += len(pred_set & gold_set)
        n_pred += len(pred_set)
        n_gold += len(gold_set)
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def recall_at_n(ranked: Sequence[Sequence], gold: Sequence, n: int) -> float:
    """Fraction of questions whose gold item appears in the first ``n`` entries."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if len(ranked) != len(gold):
        raise ValueError(f"{len(ranked)} ranked lists vs {len(gold)} gold items")
    if not ranked:
        return 0.0
    hits = sum(1 for items, answer in zip(ranked, gold) if answer in list(items)[:n])
    return hits / len(ranked)


def end_to_end_accuracy(
    predicted: Sequence[tuple[str, str] | None],
    gold: Sequence[tuple[str, str]],
) -> float:
    """Fraction of questions whose top (entity, relation) exactly matches
    the ground truth; abstentions (None) count as incorrect."""
    if len(predicted) != len(gold):
        raise ValueError(f"{len(predicted)} predictions vs {len(gold)} gold pairs")
    if not predicted:
        return 0.0
    hits = sum(1 for p, g in zip(predicted, gold) if p is not None and tuple(p) == tuple(g))
    return hits / len(predicted)


def format_score(value: float) -> str:
    """Two decimals with trailing zeros stripped: 74.866.. -> "74.87"."""
    return f"{value:.2f}".rstrip("0").rstrip(".")


@dataclass
class RunStats:
    """Per-metric aggregate over repeated runs."""
    values: tuple[float, ...]
    mean: float
    min: float
    max: float

    def summary(self) -> str:
        return f"{format_score(self.mean)} [{format_score(self.min)} {format_score(self.max)}]"


def aggregate_runs(values: Sequence[float]) -> RunStats:
    """Exact mean/min/max of one metric over runs; the textual form is
    ``mean [min max]``."""
    if not values:
        raise ValueError("need at least one run")
    vals = tuple(float(v) for v in values)
    lo, hi = min(vals), max(vals)
    # the true mean lies in [lo, hi]; clamp away any last-ulp float drift
    mean = min(max(statistics.fmean(vals), lo), hi)
    return RunStats(vals, mean, lo, hi)


@dataclass
class RunReport:
    """All metrics of a multi-run experiment plus the seeds that produced them."""
    metrics: dict[str, RunStats]
    seeds: list[int]

    def lines(self) -> list[str]:
        return [f"{name}\t{stats.summary()}" for name, stats in self.metrics.items()]
