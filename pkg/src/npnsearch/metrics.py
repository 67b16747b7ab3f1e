"""Accuracy statistics comparing an estimated pattern against the truth.

All four ratios are normalized by counts in the true pattern, so the
false-positive rates may exceed 1. A bidirected edge in the estimate
contributes an arrow mark in both directions.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .errors import DenominatorError, EmptyAggregateError
from .graph import PatternGraph


@dataclass(frozen=True)
class MetricsReport:
    adj_fpr: float
    adj_rr: float
    arrow_fpr: float
    arrow_rr: float


def _ratio(numerator: int, denominator: int, what: str) -> float:
    if denominator == 0:
        if numerator == 0:
            return 0.0
        raise DenominatorError(f"{what}: {numerator} counted against an empty truth set")
    return numerator / denominator


def compute_metrics(estimated: PatternGraph, truth: PatternGraph) -> MetricsReport:
    """Adjacency and arrow-endpoint false-positive and recovery rates.

    An arrow matches only when the same ordered pair is adjacent with an
    arrowhead at the same end in both graphs.
    """
    if estimated.node_count != truth.node_count:
        raise ValueError("estimated and true patterns must share a node count")
    h_adj = estimated.adjacencies()
    p_adj = truth.adjacencies()
    h_arr = estimated.arrows()
    p_arr = truth.arrows()
    return MetricsReport(
        adj_fpr=_ratio(len(h_adj - p_adj), len(p_adj), "adjacency FPR"),
        adj_rr=_ratio(len(h_adj & p_adj), len(p_adj), "adjacency recovery"),
        arrow_fpr=_ratio(len(h_arr - p_arr), len(p_arr), "arrow FPR"),
        arrow_rr=_ratio(len(h_arr & p_arr), len(p_arr), "arrow recovery"),
    )


def aggregate(reports: Sequence[MetricsReport]) -> MetricsReport:
    """Componentwise arithmetic mean of the reports."""
    reports = list(reports)
    if not reports:
        raise EmptyAggregateError("no reports to aggregate")
    n = len(reports)
    return MetricsReport(
        adj_fpr=sum(r.adj_fpr for r in reports) / n,
        adj_rr=sum(r.adj_rr for r in reports) / n,
        arrow_fpr=sum(r.arrow_fpr for r in reports) / n,
        arrow_rr=sum(r.arrow_rr for r in reports) / n,
    )
