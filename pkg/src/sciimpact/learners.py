"""Models and statistics: linear/logistic regression, naive Bayes, tree
ensembles, Pearson correlation, and information gain ratio.

Everything is implemented on numpy with explicit seeds; fitting the same
matrix with the same seed yields bit-identical models. Models carry their
feature schema and per-feature standardization so prediction can refuse
mismatched inputs.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateLabelsError, SchemaError, UndefinedMetricError

MODEL_FORMAT = "sciimpact-model"
MODEL_FORMAT_VERSION = 1

KIND_LINEAR = "linear-regression"
KIND_LOGISTIC = "logistic-regression"
KIND_NB = "naive-bayes"
KIND_BAG = "bagged-trees"
KIND_RF = "random-forest"


@dataclass
class TrainedModel:
    kind: str
    feature_names: tuple[str, ...]
    standardization: dict | None
    params: dict
    seed: int | None = None

    def check_schema(self, feature_names: Sequence[str]) -> None:
        if tuple(feature_names) != self.feature_names:
            raise SchemaError(
                f"model expects features {list(self.feature_names)}, got {list(feature_names)}"
            )


def _standardize_fit(X: np.ndarray) -> tuple[np.ndarray, dict]:
    mean = X.mean(axis=0)
    std = X.std(axis=0)
    constant = std == 0.0
    safe_std = np.where(constant, 1.0, std)
    Xs = (X - mean) / safe_std
    return Xs, {"mean": mean, "std": safe_std, "constant": constant}


def _standardize_apply(X: np.ndarray, stats: dict) -> np.ndarray:
    return (np.asarray(X, dtype=float) - np.asarray(stats["mean"])) / np.asarray(stats["std"])


# ---------------------------------------------------------------------------
# linear regression (future h-index)


def fit_linear_regression(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str] | None = None,
    clip_feature: str = "h-index",
    seed: int | None = None,
) -> TrainedModel:
    """Least squares on standardized features via an SVD-backed solver.

    Constant columns are dropped (zero weight, warning); any remaining rank
    deficiency resolves to the minimum-norm solution, also with a warning.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, f = X.shape
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(f)]
    Xs, stats = _standardize_fit(X)
    active = ~stats["constant"]
    if not active.all():
        dropped = [feature_names[i] for i in range(f) if not active[i]]
        warnings.warn(f"constant features dropped from the fit: {dropped}")

    design = np.hstack([np.ones((n, 1)), Xs[:, active]])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < design.shape[1]:
        warnings.warn("rank-deficient design; minimum-norm least-squares solution used")

    weights = np.zeros(f)
    weights[active] = coef[1:]
    return TrainedModel(
        kind=KIND_LINEAR,
        feature_names=tuple(feature_names),
        standardization=stats,
        params={"intercept": float(coef[0]), "weights": weights, "clip_feature": clip_feature},
        seed=seed,
    )


class LinearPrediction(NamedTuple):
    value: float
    clipped: bool


def predict_linear(model: TrainedModel, features: Mapping[str, float]) -> LinearPrediction:
    """Score one feature mapping; the result never drops below the current
    h-index feature (an h-index cannot decrease)."""
    missing = [n for n in model.feature_names if n not in features]
    if missing:
        raise SchemaError(f"missing features: {missing}")
    x = np.asarray([[features[n] for n in model.feature_names]], dtype=float)
    raw = float(predict_linear_matrix(model, x, clip=False)[0])
    clip_feature = model.params.get("clip_feature")
    floor = float(features[clip_feature]) if clip_feature in features else -math.inf
    if raw < floor:
        return LinearPrediction(floor, True)
    return LinearPrediction(raw, False)


def predict_linear_matrix(model: TrainedModel, X: np.ndarray, clip: bool = True) -> np.ndarray:
    Xs = _standardize_apply(X, model.standardization)
    scores = model.params["intercept"] + Xs @ np.asarray(model.params["weights"])
    clip_feature = model.params.get("clip_feature")
    if clip and clip_feature in model.feature_names:
        idx = model.feature_names.index(clip_feature)
        scores = np.maximum(scores, np.asarray(X, dtype=float)[:, idx])
    return scores


# ---------------------------------------------------------------------------
# logistic regression


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def fit_logistic_regression(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str] | None = None,
    l2: float = 1e-4,
    tol: float = 1e-8,
    max_iter: int = 500,
    seed: int | None = None,
) -> TrainedModel:
    """Newton-Raphson maximum likelihood with an L2 penalty on the weights
    (not the intercept), on standardized features. Stops when the gradient
    max-norm falls below ``tol``."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateLabelsError("logistic regression needs both classes present")

    n, f = X.shape
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(f)]
    Xs, stats = _standardize_fit(X)
    design = np.hstack([np.ones((n, 1)), Xs])
    w = np.zeros(f + 1)
    penalty_mask = np.ones(f + 1)
    penalty_mask[0] = 0.0

    converged = False
    for _ in range(max_iter):
        p = _sigmoid(design @ w)
        grad = design.T @ (p - y) + l2 * penalty_mask * w
        if np.abs(grad).max() < tol:
            converged = True
            break
        wdiag = np.clip(p * (1.0 - p), 1e-12, None)
        hess = design.T @ (design * wdiag[:, None])
        hess[np.diag_indices_from(hess)] += l2 * penalty_mask + 1e-12
        w = w - np.linalg.solve(hess, grad)
    else:
        warnings.warn("logistic regression did not reach tolerance; using last iterate")

    weights = w[1:].copy()
    weights[stats["constant"]] = 0.0
    return TrainedModel(
        kind=KIND_LOGISTIC,
        feature_names=tuple(feature_names),
        standardization=stats,
        params={"intercept": float(w[0]), "weights": weights, "l2": l2, "converged": converged},
        seed=seed,
    )


def predict_logistic(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    Xs = _standardize_apply(X, model.standardization)
    return _sigmoid(model.params["intercept"] + Xs @ np.asarray(model.params["weights"]))


# ---------------------------------------------------------------------------
# Gaussian naive Bayes


def fit_naive_bayes(
    X: np.ndarray,
    y: np.ndarray,
    feature_names: Sequence[str] | None = None,
    var_floor: float = 1e-9,
    seed: int | None = None,
) -> TrainedModel:
    """Per-class univariate normals with a variance floor; priors from counts."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y)
    classes = np.unique(y)
    if len(classes) < 2:
        raise DegenerateLabelsError("naive Bayes needs both classes present")
    means, variances, priors = [], [], []
    for c in classes:
        rows = X[y == c]
        means.append(rows.mean(axis=0))
        variances.append(np.maximum(rows.var(axis=0), var_floor))
        priors.append(len(rows) / len(y))
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(X.shape[1])]
    return TrainedModel(
        kind=KIND_NB,
        feature_names=tuple(feature_names),
        standardization=None,
        params={
            "classes": np.asarray(classes, dtype=float),
            "means": np.asarray(means),
            "variances": np.asarray(variances),
            "priors": np.asarray(priors),
        },
        seed=seed,
    )


def predict_naive_bayes(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    """Posterior probability of the positive (larger) class."""
    X = np.asarray(X, dtype=float)
    means = np.asarray(model.params["means"])
    variances = np.asarray(model.params["variances"])
    priors = np.asarray(model.params["priors"])
    log_post = np.empty((X.shape[0], len(priors)))
    for i in range(len(priors)):
        ll = -0.5 * (np.log(2.0 * np.pi * variances[i]) + (X - means[i]) ** 2 / variances[i])
        log_post[:, i] = np.log(priors[i]) + ll.sum(axis=1)
    log_post -= log_post.max(axis=1, keepdims=True)
    post = np.exp(log_post)
    post /= post.sum(axis=1, keepdims=True)
    return post[:, -1]


# ---------------------------------------------------------------------------
# tree ensembles


def _gini_best_split(X, y, feature_ids):
    """Best (feature, threshold, impurity_decrease) among candidate features."""
    n = len(y)
    total_pos = y.sum()
    parent = 2.0 * (total_pos / n) * (1.0 - total_pos / n)
    best = None
    for fid in feature_ids:
        values = X[:, fid]
        order = np.argsort(values, kind="stable")
        sv = values[order]
        sy = y[order]
        pos_prefix = np.cumsum(sy)
        idx = np.nonzero(sv[1:] != sv[:-1])[0]  # split between i and i+1
        if idx.size == 0:
            continue
        n_left = idx + 1
        n_right = n - n_left
        pos_left = pos_prefix[idx]
        pos_right = total_pos - pos_left
        p_left = pos_left / n_left
        p_right = pos_right / n_right
        gini = (n_left * 2 * p_left * (1 - p_left) + n_right * 2 * p_right * (1 - p_right)) / n
        j = int(np.argmin(gini))
        decrease = parent - gini[j]
        if best is None or decrease > best[2] + 1e-15:
            threshold = 0.5 * (sv[idx[j]] + sv[idx[j] + 1])
            best = (int(fid), float(threshold), float(decrease))
    return best


def _grow_tree(X, y, rng, max_depth, min_leaf, subsample_features, depth=0):
    n, f = X.shape
    pos = float(y.mean())
    if depth >= max_depth or n < 2 * min_leaf or pos in (0.0, 1.0):
        return {"leaf": pos}
    if subsample_features:
        k = max(1, int(round(math.sqrt(f))))
        feature_ids = np.sort(rng.choice(f, size=k, replace=False))
    else:
        feature_ids = np.arange(f)
    best = _gini_best_split(X, y, feature_ids)
    if best is None or best[2] <= 1e-12:
        return {"leaf": pos}
    fid, threshold, _ = best
    mask = X[:, fid] <= threshold
    if mask.sum() < min_leaf or (~mask).sum() < min_leaf:
        return {"leaf": pos}
    return {
        "feature": fid,
        "threshold": threshold,
        "left": _grow_tree(X[mask], y[mask], rng, max_depth, min_leaf, subsample_features, depth + 1),
        "right": _grow_tree(X[~mask], y[~mask], rng, max_depth, min_leaf, subsample_features, depth + 1),
    }


def _tree_predict(tree, X):
    out = np.empty(X.shape[0])
    stack = [(tree, np.arange(X.shape[0]))]
    while stack:
        node, idx = stack.pop()
        if idx.size == 0:
            continue
        if "leaf" in node:
            out[idx] = node["leaf"]
            continue
        mask = X[idx, node["feature"]] <= node["threshold"]
        stack.append((node["left"], idx[mask]))
        stack.append((node["right"], idx[~mask]))
    return out


def fit_tree_ensemble(
    X: np.ndarray,
    y: np.ndarray,
    kind: str = KIND_BAG,
    n_trees: int = 100,
    max_depth: int = 12,
    min_leaf: int = 1,
    feature_names: Sequence[str] | None = None,
    seed: int = 0,
) -> TrainedModel:
    """Bootstrap-aggregated Gini decision trees; the random-forest variant
    additionally samples sqrt(F) candidate features per split. Per-tree seeds
    derive from the master seed, so results are reproducible and trees could
    be grown in parallel without changing the output."""
    if kind not in (KIND_BAG, KIND_RF):
        raise ValueError(f"unknown ensemble kind {kind!r}")
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(np.unique(y)) < 2:
        raise DegenerateLabelsError("tree ensemble needs both classes present")
    n = X.shape[0]
    if feature_names is None:
        feature_names = [f"x{i}" for i in range(X.shape[1])]
    subsample = kind == KIND_RF
    trees = []
    for child in np.random.SeedSequence(seed).spawn(n_trees):
        rng = np.random.default_rng(child)
        boot = rng.integers(0, n, size=n)
        trees.append(_grow_tree(X[boot], y[boot], rng, max_depth, min_leaf, subsample))
    return TrainedModel(
        kind=kind,
        feature_names=tuple(feature_names),
        standardization=None,
        params={"trees": trees, "n_trees": n_trees, "max_depth": max_depth, "min_leaf": min_leaf},
        seed=seed,
    )


def predict_tree_ensemble(model: TrainedModel, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    acc = np.zeros(X.shape[0])
    for tree in model.params["trees"]:
        acc += _tree_predict(tree, X)
    return acc / len(model.params["trees"])


# ---------------------------------------------------------------------------
# statistics


def pearson_cc(x: Sequence[float], y: Sequence[float]) -> float:
    """Sample Pearson correlation; a binary series is handled identically."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("pearson_cc needs two equal-length series of length >= 2")
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(xc @ xc) * float(yc @ yc))
    if denom == 0.0:
        raise UndefinedMetricError("correlation undefined for a constant series")
    return float(xc @ yc) / denom


def _entropy_from_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    if total == 0:
        return 0.0
    p = counts[counts > 0] / total
    return float(-(p * np.log(p)).sum())


def discretize_equal_frequency(feature: Sequence[float], bins: int = 10) -> np.ndarray:
    """Bin ids from equal-frequency cut points (duplicates merged).

    Cut points are the 1/bins .. (bins-1)/bins quantiles (linear
    interpolation); a value's bin is the number of cut points strictly
    below it, so every value maps to exactly one bin.
    """
    x = np.asarray(feature, dtype=float)
    cuts = np.unique(np.quantile(x, np.arange(1, bins) / bins))
    return np.searchsorted(cuts, x, side="left")


def information_gain_ratio(feature: Sequence[float], labels: Sequence[int], bins: int = 10) -> float:
    """Information gain about the labels divided by the split entropy of the
    equal-frequency-binned feature; 0 when the feature is constant."""
    x = np.asarray(feature, dtype=float)
    y = np.asarray(labels)
    if len(x) != len(y) or len(x) < 2:
        raise ValueError("information_gain_ratio needs two equal-length series of length >= 2")
    assign = discretize_equal_frequency(x, bins)
    bin_ids, bin_counts = np.unique(assign, return_counts=True)
    intrinsic = _entropy_from_counts(bin_counts)
    if intrinsic == 0.0:
        return 0.0
    classes = np.unique(y)
    h_y = _entropy_from_counts(np.asarray([(y == c).sum() for c in classes]))
    cond = 0.0
    for b, nb in zip(bin_ids, bin_counts):
        sub = y[assign == b]
        cond += (nb / len(y)) * _entropy_from_counts(np.asarray([(sub == c).sum() for c in classes]))
    return max((h_y - cond) / intrinsic, 0.0)


# ---------------------------------------------------------------------------
# learner registry and persistence

FitFunction = Callable[..., TrainedModel]

_PREDICTORS = {
    KIND_LINEAR: predict_linear_matrix,
    KIND_LOGISTIC: predict_logistic,
    KIND_NB: predict_naive_bayes,
    KIND_BAG: predict_tree_ensemble,
    KIND_RF: predict_tree_ensemble,
}

LEARNERS: dict[str, FitFunction] = {
    "lrc": lambda X, y, feature_names=None, seed=0: fit_logistic_regression(X, y, feature_names=feature_names, seed=seed),
    "nb": lambda X, y, feature_names=None, seed=0: fit_naive_bayes(X, y, feature_names=feature_names, seed=seed),
    "bag": lambda X, y, feature_names=None, seed=0: fit_tree_ensemble(X, y, kind=KIND_BAG, feature_names=feature_names, seed=seed),
    "rf": lambda X, y, feature_names=None, seed=0: fit_tree_ensemble(X, y, kind=KIND_RF, feature_names=feature_names, seed=seed),
}


def register_learner(name: str, fitter: FitFunction, predictor: Callable | None = None) -> None:
    """Plug in an external classifier (e.g. an SVM) under a CLI-usable name."""
    LEARNERS[name] = fitter
    if predictor is not None:
        _PREDICTORS[name] = predictor


def get_learner(name: str) -> FitFunction:
    try:
        return LEARNERS[name]
    except KeyError:
        raise NotImplementedError(
            f"learner {name!r} has no native implementation; register one via register_learner()"
        ) from None


def predict_scores(model: TrainedModel, X: np.ndarray, feature_names: Sequence[str] | None = None) -> np.ndarray:
    """Probabilities (classifiers) or clipped values (regression) for a matrix."""
    if feature_names is not None:
        model.check_schema(feature_names)
    predictor = _PREDICTORS.get(model.kind)
    if predictor is None:
        raise NotImplementedError(f"no predictor registered for model kind {model.kind!r}")
    return predictor(model, X)


def _to_jsonable(value):
    if isinstance(value, np.ndarray):
        return {"__array__": value.tolist(), "dtype": str(value.dtype)}
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {k: _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    return value


def _from_jsonable(value):
    if isinstance(value, dict):
        if "__array__" in value:
            return np.asarray(value["__array__"], dtype=value["dtype"])
        return {k: _from_jsonable(v) for k, v in value.items()}
    if isinstance(value, list):
        return [_from_jsonable(v) for v in value]
    return value


def save_model(model: TrainedModel, path) -> None:
    doc = {
        "format": MODEL_FORMAT,
        "format_version": MODEL_FORMAT_VERSION,
        "kind": model.kind,
        "feature_names": list(model.feature_names),
        "standardization": _to_jsonable(model.standardization),
        "params": _to_jsonable(model.params),
        "seed": model.seed,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, indent=1)
        fh.write("\n")


def load_model(path) -> TrainedModel:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise SchemaError(f"{path}: not a model file")
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise SchemaError(f"{path}: unsupported model format version")
    return TrainedModel(
        kind=doc["kind"],
        feature_names=tuple(doc["feature_names"]),
        standardization=_from_jsonable(doc["standardization"]),
        params=_from_jsonable(doc["params"]),
        seed=doc["seed"],
    )
