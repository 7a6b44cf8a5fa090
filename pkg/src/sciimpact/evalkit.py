"""Experiment protocol and metrics.

The protocol is a repeated half-split: each run draws a fresh 50/50
train/test partition (seeded), fits the requested learner, and scores the
held-out half on the classification, ranking, and (for the regression task)
error metrics. Reports carry per-run values plus mean and standard
deviation, and echo the configuration that produced them so reruns are
reproducible.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import learners
from .errors import SchemaError, UndefinedMetricError
from .factorlab import LabeledExample, to_matrix

CLASSIFICATION_METRICS = ("precision", "recall", "f1", "auc", "accuracy", "pre3", "map")
REGRESSION_METRICS = ("r2", "mae")


def split_half(examples: Sequence, seed: int) -> tuple[list, list]:
    """Uniform random disjoint 50/50 split; odd counts give train the extra item."""
    n = len(examples)
    if n < 2:
        raise ValueError("need at least 2 examples to split")
    order = np.random.default_rng(seed).permutation(n)
    cut = (n + 1) // 2
    train = [examples[i] for i in order[:cut]]
    test = [examples[i] for i in order[cut:]]
    return train, test


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean; 0 when both are 0."""
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


@dataclass(frozen=True)
class ClassificationMetrics:
    precision: float
    recall: float
    f1: float
    accuracy: float
    no_positive_predictions: bool = False


def classification_metrics(
    scores: Sequence[float],
    labels: Sequence[int],
    threshold: float = 0.5,
) -> ClassificationMetrics:
    """Confusion-matrix metrics at a score threshold. Precision is reported
    as 0 (flagged) when nothing is predicted positive."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    if len(scores) != len(labels):
        raise ValueError("scores and labels differ in length")
    pred = scores >= threshold
    tp = int(np.sum(pred & (labels == 1)))
    fp = int(np.sum(pred & (labels == 0)))
    fn = int(np.sum(~pred & (labels == 1)))
    no_pos = (tp + fp) == 0
    precision = 0.0 if no_pos else tp / (tp + fp)
    recall = 0.0 if (tp + fn) == 0 else tp / (tp + fn)
    accuracy = float(np.mean(pred == (labels == 1)))
    return ClassificationMetrics(precision, recall, f1_score(precision, recall), accuracy, no_pos)


def auc(scores: Sequence[float], labels: Sequence[int]) -> float:
    """Rank-based (Mann-Whitney) AUC with ties counted as half."""
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)
    n_pos = int(np.sum(labels == 1))
    n_neg = int(np.sum(labels == 0))
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC undefined with a single class")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores))
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # average 1-based rank
        i = j + 1
    rank_sum = float(ranks[labels == 1].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


@dataclass(frozen=True)
class RankingMetrics:
    pre3: float
    map: float
    n_authors: int


def ranking_metrics(
    group_ids: Sequence[str],
    scores: Sequence[float],
    labels: Sequence[int],
) -> RankingMetrics:
    """Per-author ranking quality.

    Each author's papers are ordered by descending score (stable in input
    order). Authors with at least one positive qualify; for them Pre@3 is
    the precision among the top min(3, n) papers and AP averages precision
    at each positive's rank. Both are averaged over qualifying authors.
    """
    by_author: dict[str, list[int]] = {}
    for i, g in enumerate(group_ids):
        by_author.setdefault(g, []).append(i)
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels, dtype=int)

    pre3_values: list[float] = []
    ap_values: list[float] = []
    for author in sorted(by_author):
        idx = np.asarray(by_author[author])
        ranked = idx[np.argsort(-scores[idx], kind="stable")]
        ranked_labels = labels[ranked]
        if ranked_labels.sum() == 0:
            continue
        k = min(3, len(ranked_labels))
        pre3_values.append(float(ranked_labels[:k].mean()))
        hits = 0
        precisions = []
        for rank, lab in enumerate(ranked_labels, start=1):
            if lab == 1:
                hits += 1
                precisions.append(hits / rank)
        ap_values.append(float(np.mean(precisions)))
    if not pre3_values:
        raise UndefinedMetricError("no author with a positive example; ranking undefined")
    return RankingMetrics(float(np.mean(pre3_values)), float(np.mean(ap_values)), len(pre3_values))


@dataclass(frozen=True)
class RegressionMetrics:
    r2: float | None  # None when the truths are constant (flagged, MAE still valid)
    mae: float

    @property
    def undefined_r2(self) -> bool:
        return self.r2 is None


def regression_metrics(predictions: Sequence[float], truths: Sequence[float]) -> RegressionMetrics:
    predictions = np.asarray(predictions, dtype=float)
    truths = np.asarray(truths, dtype=float)
    if len(predictions) != len(truths) or len(truths) < 2:
        raise ValueError("need two equal-length series of length >= 2")
    mae = float(np.abs(predictions - truths).mean())
    ss_tot = float(((truths - truths.mean()) ** 2).sum())
    if ss_tot == 0.0:
        return RegressionMetrics(None, mae)
    ss_res = float(((truths - predictions) ** 2).sum())
    return RegressionMetrics(1.0 - ss_res / ss_tot, mae)


# ---------------------------------------------------------------------------
# reports


@dataclass
class EvalReport:
    task: str
    learner: str
    runs: int
    metric_names: tuple[str, ...]
    per_run: list[dict[str, float]]
    mean: dict[str, float]
    stdev: dict[str, float]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "learner": self.learner,
            "runs": self.runs,
            "metric_names": list(self.metric_names),
            "per_run": self.per_run,
            "mean": self.mean,
            "stdev": self.stdev,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"


def report_from_runs(task, learner, runs_metrics, metric_names, config) -> EvalReport:
    mean = {}
    stdev = {}
    for name in metric_names:
        values = np.asarray([m[name] for m in runs_metrics], dtype=float)
        mean[name] = float(values.mean())
        stdev[name] = float(values.std(ddof=1)) if len(values) > 1 else 0.0
    return EvalReport(
        task=task,
        learner=learner,
        runs=len(runs_metrics),
        metric_names=tuple(metric_names),
        per_run=runs_metrics,
        mean=mean,
        stdev=stdev,
        config=config,
    )


def format_table(headers: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            widths[i] = max(widths[i], len(cell))
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers))]
    lines.append("  ".join("-" * w for w in widths))
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)))
    return "\n".join(lines)


def render_reports_table(reports: Sequence[EvalReport]) -> str:
    """Aligned text table, one row per report (learner), mean (stdev) cells."""
    metric_names = reports[0].metric_names
    headers = ["method"] + list(metric_names)
    rows = []
    for rep in reports:
        cells = [rep.learner]
        for name in metric_names:
            m = rep.mean[name]
            s = rep.stdev[name]
            cells.append(f"{m:.4f} ({s:.4f})" if rep.runs > 1 else f"{m:.4f}")
        rows.append(cells)
    return format_table(headers, rows)


# ---------------------------------------------------------------------------
# protocol


def _classification_bundle(scores, labels, groups, threshold=0.5) -> dict[str, float]:
    cm = classification_metrics(scores, labels, threshold)
    rk = ranking_metrics(groups, scores, labels)
    return {
        "precision": cm.precision,
        "recall": cm.recall,
        "f1": cm.f1,
        "auc": auc(scores, labels),
        "accuracy": cm.accuracy,
        "pre3": rk.pre3,
        "map": rk.map,
    }


def run_protocol(
    examples: Sequence[LabeledExample],
    learner: str = "lrc",
    runs: int = 10,
    seed: int = 0,
    feature_names: Sequence[str] | None = None,
    threshold: float = 0.5,
    config: Mapping | None = None,
) -> EvalReport:
    """Repeated half-split evaluation; per-run seeds derive from ``seed``
    through a seeded generator, so the whole report is reproducible."""
    X, y, names, groups = to_matrix(examples, feature_names)
    groups = np.asarray(groups)
    run_seeds = np.random.default_rng(seed).integers(0, 2**31 - 1, size=runs)
    task = "regression" if learner == "linear" else "classification"
    fit = learners.fit_linear_regression if task == "regression" else learners.get_learner(learner)

    per_run: list[dict[str, float]] = []
    for r, run_seed in enumerate(run_seeds):
        try:
            tr_idx, te_idx = split_half(np.arange(len(examples)), int(run_seed))
            tr = np.asarray(tr_idx)
            te = np.asarray(te_idx)
            model = fit(X[tr], y[tr], feature_names=names, seed=int(run_seed))
            scores = learners.predict_scores(model, X[te])
            if task == "classification":
                per_run.append(_classification_bundle(scores, y[te], groups[te], threshold))
            else:
                rm = regression_metrics(scores, y[te])
                if rm.r2 is None:
                    raise UndefinedMetricError("constant truths in the test half")
                per_run.append({"r2": rm.r2, "mae": rm.mae})
        except Exception as exc:
            raise type(exc)(f"run {r}: {exc}") from exc

    metric_names = REGRESSION_METRICS if task == "regression" else CLASSIFICATION_METRICS
    echo = dict(config or {})
    echo.update({"learner": learner, "runs": runs, "seed": seed, "threshold": threshold})
    return report_from_runs(task, learner, per_run, metric_names, echo)


def random_baseline(
    examples: Sequence[LabeledExample],
    seed: int = 0,
    runs: int = 10,
    threshold: float = 0.5,
    config: Mapping | None = None,
) -> EvalReport:
    """Uniform random scores (positive with probability 1/2 at the default
    threshold), evaluated on the full example set, averaged over runs."""
    if len(examples) < 2:
        raise ValueError("need at least 2 examples")
    _, y, _, groups = to_matrix(examples)
    rng = np.random.default_rng(seed)
    per_run = []
    for _ in range(runs):
        scores = rng.random(len(examples))
        per_run.append(_classification_bundle(scores, y, np.asarray(groups), threshold))
    echo = dict(config or {})
    echo.update({"learner": "random", "runs": runs, "seed": seed, "threshold": threshold})
    return report_from_runs("classification", "random", per_run, CLASSIFICATION_METRICS, echo)


# ---------------------------------------------------------------------------
# factor-group ablation


@dataclass
class JackknifeReport:
    learner: str
    runs: int
    full_f1: float
    f1_without: dict[str, float | None]
    f1_with_only: dict[str, float | None]
    notes: dict[str, str]
    config: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "learner": self.learner,
            "runs": self.runs,
            "full_f1": self.full_f1,
            "f1_without": self.f1_without,
            "f1_with_only": self.f1_with_only,
            "notes": self.notes,
            "config": self.config,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=1) + "\n"

    def to_text(self) -> str:
        rows = []
        for g in self.f1_without:
            wo = self.f1_without[g]
            only = self.f1_with_only[g]
            rows.append(
                [
                    g,
                    "n/a" if wo is None else f"{wo:.4f}",
                    "n/a" if only is None else f"{only:.4f}",
                ]
            )
        table = format_table(["group", "F1 without", "F1 with only"], rows)
        return f"full-set F1: {self.full_f1:.4f}\n{table}"


def default_groups(factor_names: Sequence[str]) -> dict[str, list[str]]:
    """Partition factor names by their leading group letter (A, C, V, ...)."""
    groups: dict[str, list[str]] = {}
    for name in factor_names:
        groups.setdefault(name.split("-", 1)[0], []).append(name)
    return groups


def jackknife(
    examples: Sequence[LabeledExample],
    learner: str = "lrc",
    runs: int = 10,
    seed: int = 0,
    groups: Mapping[str, Sequence[str]] | None = None,
    config: Mapping | None = None,
) -> JackknifeReport:
    """For each factor group: performance with the group removed and with
    only that group. Groups must partition the dataset's factor catalog."""
    all_names = list(examples[0].factors)
    if groups is None:
        groups = default_groups(all_names)
    claimed = [n for g in groups.values() for n in g]
    unknown = [n for n in claimed if n not in all_names]
    if unknown:
        raise SchemaError(f"unknown factor names in groups: {unknown}")
    if sorted(claimed) != sorted(all_names):
        raise SchemaError("groups must partition the factor catalog exactly")

    full = run_protocol(examples, learner, runs, seed, feature_names=all_names)
    f1_without: dict[str, float | None] = {}
    f1_with_only: dict[str, float | None] = {}
    notes: dict[str, str] = {}
    for g in groups:
        members = set(groups[g])
        remaining = [n for n in all_names if n not in members]
        if remaining:
            f1_without[g] = run_protocol(examples, learner, runs, seed, feature_names=remaining).mean["f1"]
        else:
            f1_without[g] = None
            notes[f"without:{g}"] = "empty-feature-set"
        only = [n for n in all_names if n in members]
        if only:
            f1_with_only[g] = run_protocol(examples, learner, runs, seed, feature_names=only).mean["f1"]
        else:
            f1_with_only[g] = None
            notes[f"with-only:{g}"] = "empty-feature-set"

    echo = dict(config or {})
    echo.update({"learner": learner, "runs": runs, "seed": seed})
    return JackknifeReport(
        learner=learner,
        runs=runs,
        full_f1=full.mean["f1"],
        f1_without=f1_without,
        f1_with_only=f1_with_only,
        notes=notes,
        config=echo,
    )


# ---------------------------------------------------------------------------
# factor tables


def correlation_table(examples: Sequence[LabeledExample]) -> dict[str, float | None]:
    """Pearson correlation of each factor against the label (or target value).
    Constant factors are flagged as None."""
    X, y, names, _ = to_matrix(examples)
    out: dict[str, float | None] = {}
    for i, name in enumerate(names):
        try:
            out[name] = learners.pearson_cc(X[:, i], y)
        except UndefinedMetricError:
            out[name] = None
    return out


def igr_table(examples: Sequence[LabeledExample], bins: int = 10) -> list[dict]:
    """Information gain ratio per factor, ranked descending (ties by name)."""
    X, y, names, _ = to_matrix(examples)
    labels = y.astype(int)
    scored = [
        {"factor": name, "igr": learners.information_gain_ratio(X[:, i], labels, bins)}
        for i, name in enumerate(names)
    ]
    scored.sort(key=lambda row: (-row["igr"], row["factor"]))
    for rank, row in enumerate(scored, start=1):
        row["rank"] = rank
    return scored


def factor_response(
    examples: Sequence[LabeledExample],
    factor: str,
    bins: int = 20,
) -> list[dict]:
    """Binned response curve: positive fraction per factor bin with a
    mean +/- standard-error band, ready for external plotting."""
    X, y, names, _ = to_matrix(examples)
    if factor not in names:
        raise SchemaError(f"unknown factor {factor!r}")
    values = X[:, names.index(factor)]
    assign = learners.discretize_equal_frequency(values, bins)
    rows = []
    for b in np.unique(assign):
        mask = assign == b
        labels = y[mask]
        n = int(mask.sum())
        p = float(labels.mean())
        stderr = math.sqrt(p * (1.0 - p) / n) if n > 0 else 0.0
        rows.append(
            {
                "bin": int(b),
                "value_lo": float(values[mask].min()),
                "value_hi": float(values[mask].max()),
                "value_mean": float(values[mask].mean()),
                "n": n,
                "positive_fraction": p,
                "stderr": stderr,
            }
        )
    return rows
