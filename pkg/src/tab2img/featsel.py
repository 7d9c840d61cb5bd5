"""Feature importance: ReliefF, mRMR, and their subsampled ensemble.

Scores are always reported both raw and normalized (shift negatives to zero
when present, then scale to sum 1; uniform when everything cancels).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dataset import NUMERICAL, TypedDataset
from .seeding import substream


class FeatureSelectionError(ValueError):
    pass


@dataclass(frozen=True)
class ImportanceVector:
    feature_names: tuple
    raw: np.ndarray
    normalized: np.ndarray
    method: str
    base_vectors: tuple = ()


def normalize_scores(raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=np.float64)
    shifted = raw - min(float(raw.min()), 0.0)
    total = float(shifted.sum())
    if total <= 1e-300:
        return np.full(len(raw), 1.0 / len(raw))
    return shifted / total


def _feature_diffs(ds: TypedDataset, i: int, others: np.ndarray) -> np.ndarray:
    # per-feature contribution of sample i against each row in `others`:
    # |x_i - x_j| for numerical (normalized data), 0/1 mismatch otherwise
    out = np.empty((len(others), ds.n_features))
    for f, (kind, col) in enumerate(zip(ds.kinds, ds.columns)):
        if kind.kind == NUMERICAL:
            out[:, f] = np.abs(col[others] - col[i])
        else:
            out[:, f] = (col[others] != col[i]).astype(np.float64)
    return out


def relieff(ds: TypedDataset, k_neighbors: int = 10, seed: int = 0) -> ImportanceVector:
    """Multiclass ReliefF over all samples.

    For each sample, the k nearest same-class hits pull feature scores down by
    their diffs and the k nearest misses of every other class push them up,
    weighted by the prior of the miss class renormalized over non-self classes.
    Distances are the sum of per-feature diffs. Ties in neighbor selection
    break by (distance, index). The seed parameter is part of the interface
    but unused: this variant visits every sample, so it has no random choice.
    """
    del seed
    n, F = ds.n_samples, ds.n_features
    if k_neighbors < 1:
        raise FeatureSelectionError("k_neighbors must be >= 1")
    counts = ds.class_counts()
    for cls, cnt in counts.items():
        if cnt <= k_neighbors:
            raise FeatureSelectionError(
                f"class {cls!r} has {cnt} samples, needs more than k_neighbors={k_neighbors}"
            )
    priors = {cls: counts[cls] / n for cls in ds.classes}

    D = np.zeros((n, n))
    for kind, col in zip(ds.kinds, ds.columns):
        if kind.kind == NUMERICAL:
            D += np.abs(col[:, None] - col[None, :])
        else:
            D += (col[:, None] != col[None, :]).astype(np.float64)

    by_class = {cls: np.flatnonzero(ds.labels == cls) for cls in ds.classes}
    W = np.zeros(F)
    denom = n * k_neighbors
    for i in range(n):
        own = ds.labels[i]
        for cls in ds.classes:
            cand = by_class[cls]
            if cls == own:
                cand = cand[cand != i]
            order = np.lexsort((cand, D[i, cand]))
            near = cand[order[:k_neighbors]]
            diffs = _feature_diffs(ds, i, near).sum(axis=0)
            if cls == own:
                W -= diffs / denom
            else:
                W += (priors[cls] / (1.0 - priors[own])) * diffs / denom
    return ImportanceVector(ds.feature_names, W, normalize_scores(W), "relieff")


def _discretize(ds: TypedDataset, n_bins: int) -> list:
    codes = []
    for kind, col in zip(ds.kinds, ds.columns):
        if kind.kind == NUMERICAL:
            edges = np.quantile(col, np.linspace(0.0, 1.0, n_bins + 1))
            interior = np.unique(edges)[1:-1]
            codes.append(np.searchsorted(interior, col, side="right"))
        else:
            _, inv = np.unique(col, return_inverse=True)
            codes.append(inv)
    return codes


def _mutual_information(a: np.ndarray, b: np.ndarray) -> float:
    table = np.zeros((int(a.max()) + 1, int(b.max()) + 1))
    np.add.at(table, (a, b), 1.0)
    n = table.sum()
    p = table / n
    pi = p.sum(axis=1, keepdims=True)
    pj = p.sum(axis=0, keepdims=True)
    nz = p > 0
    return float(np.sum(p[nz] * np.log(p[nz] / (pi @ pj)[nz])))


def mrmr(ds: TypedDataset, select_k: int, n_bins: int = 5) -> ImportanceVector:
    """Greedy minimum-redundancy maximum-relevance ranking (MID criterion).

    Relevance is the mutual information of a feature with the label;
    redundancy the mean MI with already selected features; both estimated on
    n_bins quantile bins for numerical features and raw levels otherwise.
    The feature selected at rank r scores select_k - (r - 1), unselected
    features score 0, so select_k = n_features leaves no zero scores.
    """
    F = ds.n_features
    if not 1 <= select_k <= F:
        raise FeatureSelectionError(f"select_k {select_k} outside [1, {F}]")
    codes = _discretize(ds, n_bins)
    _, y = np.unique(ds.labels, return_inverse=True)
    relevance = np.array([_mutual_information(c, y) for c in codes])

    selected: list[int] = []
    remaining = list(range(F))
    pair_mi: dict = {}

    def mi(a: int, b: int) -> float:
        key = (min(a, b), max(a, b))
        if key not in pair_mi:
            pair_mi[key] = _mutual_information(codes[a], codes[b])
        return pair_mi[key]

    while len(selected) < select_k:
        best_f, best_score = None, -math.inf
        for f in remaining:
            if selected:
                score = relevance[f] - sum(mi(f, s) for s in selected) / len(selected)
            else:
                score = relevance[f]
            if score > best_score:
                best_f, best_score = f, score
        selected.append(best_f)
        remaining.remove(best_f)

    raw = np.zeros(F)
    for rank, f in enumerate(selected):
        raw[f] = select_k - rank
    return ImportanceVector(ds.feature_names, raw, normalize_scores(raw), "mrmr")


def ensemble_importance(
    ds: TypedDataset,
    rounds: int = 10,
    subsample: float = 0.8,
    seed: int = 0,
    k_neighbors: int | None = None,
) -> ImportanceVector:
    """Mean of 2*rounds normalized base vectors (ReliefF + mRMR per round),
    each fitted on a stratified subsample, re-normalized to sum 1.

    mRMR selects ceil(n_features / 2) features per round. k_neighbors defaults
    to min(10, smallest subsampled class - 1) so small classes stay legal.
    """
    if rounds < 1:
        raise FeatureSelectionError("rounds must be >= 1")
    if not 0.0 < subsample <= 1.0:
        raise FeatureSelectionError("subsample must be in (0, 1]")
    select_k = math.ceil(ds.n_features / 2)
    base: list = []
    for r in range(rounds):
        rng = substream(seed, "ensemble", r)
        keep: list = []
        min_class = ds.n_samples
        for cls in ds.classes:
            idx = np.flatnonzero(ds.labels == cls)
            take = max(2, int(round(subsample * len(idx))))
            take = min(take, len(idx))
            min_class = min(min_class, take)
            keep.extend(int(i) for i in rng.choice(idx, size=take, replace=False))
        sub = ds.take(sorted(keep))
        k = k_neighbors if k_neighbors is not None else min(10, min_class - 1)
        base.append(("relieff", relieff(sub, k_neighbors=k).normalized))
        base.append(("mrmr", mrmr(sub, select_k).normalized))
    mean = np.mean([v for _, v in base], axis=0)
    return ImportanceVector(
        ds.feature_names,
        mean,
        mean / mean.sum(),
        "ensemble",
        base_vectors=tuple(base),
    )
