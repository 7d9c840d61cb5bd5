"""Mixed-type associations and the feature distance matrix.

Pair dispatch: numerical-numerical uses Spearman rank correlation (SPC),
binary-numerical point-biserial (PBC), and every pair involving a categorical
feature, plus binary-binary, a chi-square-based coefficient in [0, 1] (PHIK)
obtained by matching the pedestal-corrected contingency chi-square to the
expected chi-square of a discretized bivariate standard normal with the same
binning. Distances are 1 - |association|; degenerate pairs get distance 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtr, ndtri, owens_t
from scipy.stats import rankdata

from .dataset import BINARY, CATEGORICAL, NUMERICAL, TypedDataset

SPC = "SPC"
PBC = "PBC"
PHIK = "PHIK"

PHIK_BINS = 10
_RHO_HI = 1.0 - 1e-10
_BISECT_TOL = 1e-12


class AssocResult(NamedTuple):
    value: float
    degenerate: bool


def _pearson(a: np.ndarray, b: np.ndarray) -> AssocResult:
    a = a - a.mean()
    b = b - b.mean()
    denom = math.sqrt(float(np.dot(a, a)) * float(np.dot(b, b)))
    if denom == 0.0:
        return AssocResult(0.0, True)
    r = float(np.dot(a, b)) / denom
    return AssocResult(min(1.0, max(-1.0, r)), False)


def spearman(x, y) -> AssocResult:
    """Spearman rank correlation: Pearson on fractional ranks (ties averaged).

    Constant input yields association 0 with the degenerate flag set.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if len(x) != len(y):
        raise ValueError("spearman: length mismatch")
    if len(x) < 2 or np.all(x == x[0]) or np.all(y == y[0]):
        return AssocResult(0.0, True)
    return _pearson(rankdata(x), rankdata(y))


def point_biserial(groups, y) -> AssocResult:
    """Point-biserial correlation of a two-valued grouping against y.

    r = (mean(y | high) - mean(y | low)) / std_pop(y) * sqrt(p * q), identical
    to the Pearson correlation of y with the group coded 0/1.
    """
    groups = np.asarray(groups)
    y = np.asarray(y, dtype=np.float64)
    if len(groups) != len(y):
        raise ValueError("point_biserial: length mismatch")
    values = np.unique(groups)
    if len(values) != 2:
        return AssocResult(0.0, True)
    sd = float(np.std(y))
    if sd == 0.0:
        return AssocResult(0.0, True)
    high = groups == values[1]
    p = float(np.mean(high))
    r = (float(y[high].mean()) - float(y[~high].mean())) / sd * math.sqrt(p * (1.0 - p))
    return AssocResult(min(1.0, max(-1.0, r)), False)


def _quantile_codes(x: np.ndarray, n_bins: int) -> np.ndarray | None:
    edges = np.quantile(x, np.linspace(0.0, 1.0, n_bins + 1))
    interior = np.unique(edges)[1:-1]
    if interior.size == 0:
        return None
    return np.searchsorted(interior, x, side="right")


def _category_codes(x: np.ndarray) -> np.ndarray | None:
    _, codes = np.unique(x, return_inverse=True)
    if codes.max() == 0:
        return None
    return codes


def _side_codes(x, numeric: bool | None, n_bins: int) -> np.ndarray | None:
    x = np.asarray(x)
    if numeric is None:
        try:
            as_float = x.astype(np.float64)
        except (TypeError, ValueError):
            return _category_codes(x)
        numeric = len(np.unique(as_float)) > n_bins
        x = as_float
    if numeric:
        return _quantile_codes(np.asarray(x, dtype=np.float64), n_bins)
    return _category_codes(x)


def _is_bijection(table: np.ndarray) -> bool:
    if table.shape[0] != table.shape[1]:
        return False
    hits = table > 0
    return bool(np.all(hits.sum(axis=0) == 1) and np.all(hits.sum(axis=1) == 1))


def bvn_cdf(h: np.ndarray, k: np.ndarray, rho: float) -> np.ndarray:
    """P(X <= h, Y <= k) for a standard bivariate normal, via Owen's T.

    h and k must be finite; values within 1e-12 of zero are nudged to keep the
    T(h, (k - rho h)/(h s)) form away from its removable singularity.
    """
    h = np.where(np.abs(h) < 1e-12, 1e-12, h)
    k = np.where(np.abs(k) < 1e-12, 1e-12, k)
    if rho == 0.0:
        return ndtr(h) * ndtr(k)
    s = math.sqrt(1.0 - rho * rho)
    ah = (k - rho * h) / (h * s)
    ak = (h - rho * k) / (k * s)
    out = 0.5 * (ndtr(h) + ndtr(k)) - owens_t(h, ah) - owens_t(k, ak)
    out = out - np.where(h * k < 0, 0.5, 0.0)
    return np.clip(out, 0.0, 1.0)


def _cell_probabilities(zx: np.ndarray, zy: np.ndarray, rho: float) -> np.ndarray:
    # zx, zy: interior edges (finite, ascending); implicit outer edges at +-inf
    R, C = len(zx) + 1, len(zy) + 1
    F = np.zeros((R + 1, C + 1))
    F[-1, -1] = 1.0
    if len(zx):
        F[1:-1, -1] = ndtr(zx)
    if len(zy):
        F[-1, 1:-1] = ndtr(zy)
    if len(zx) and len(zy):
        H, K = np.meshgrid(zx, zy, indexing="ij")
        F[1:-1, 1:-1] = bvn_cdf(H, K, rho)
    P = F[1:, 1:] - F[:-1, 1:] - F[1:, :-1] + F[:-1, :-1]
    return np.clip(P, 0.0, 1.0)


def _expected_chi2(zx, zy, pq: np.ndarray, n: int, rho: float) -> float:
    P = _cell_probabilities(zx, zy, rho)
    return float(n * np.sum((P - pq) ** 2 / pq))


def phik(x, y, n_bins: int = PHIK_BINS, numeric_x: bool | None = None,
         numeric_y: bool | None = None) -> AssocResult:
    """Chi-square-matched association in [0, 1] for binned/categorical pairs.

    Numerical sides are cut into n_bins quantile bins (duplicate edges merged);
    other sides use their distinct values. The Pearson chi-square of the
    contingency table, minus the (R-1)(C-1) independence pedestal (floored at
    zero), is matched by bisection to the expected chi-square of a discretized
    bivariate standard normal sharing the table's marginals. A table whose
    nonzero pattern is a bijection (perfect dependence) returns exactly 1.
    Either variable collapsing to a single bin is degenerate: (0, flagged).
    """
    cx = _side_codes(x, numeric_x, n_bins)
    cy = _side_codes(y, numeric_y, n_bins)
    if cx is None or cy is None:
        return AssocResult(0.0, True)
    R = int(cx.max()) + 1
    C = int(cy.max()) + 1
    table = np.zeros((R, C))
    np.add.at(table, (cx, cy), 1.0)
    table = table[table.sum(axis=1) > 0][:, table.sum(axis=0) > 0]
    R, C = table.shape
    if R < 2 or C < 2:
        return AssocResult(0.0, True)
    if _is_bijection(table):
        return AssocResult(1.0, False)

    n = table.sum()
    p = table.sum(axis=1) / n
    q = table.sum(axis=0) / n
    expected = np.outer(p, q) * n
    chi2 = float(np.sum((table - expected) ** 2 / expected))
    pedestal = (R - 1) * (C - 1)
    target = max(0.0, chi2 - pedestal)
    if target == 0.0:
        return AssocResult(0.0, False)

    zx = ndtri(np.cumsum(p)[:-1])
    zy = ndtri(np.cumsum(q)[:-1])
    pq = np.outer(p, q)
    if _expected_chi2(zx, zy, pq, int(n), _RHO_HI) <= target:
        return AssocResult(1.0, False)
    lo, hi = 0.0, _RHO_HI
    while hi - lo > _BISECT_TOL:
        mid = 0.5 * (lo + hi)
        if _expected_chi2(zx, zy, pq, int(n), mid) < target:
            lo = mid
        else:
            hi = mid
    return AssocResult(0.5 * (lo + hi), False)


def assoc_kind_for(kind_x: str, kind_y: str) -> str:
    kinds = {kind_x, kind_y}
    if kinds == {NUMERICAL}:
        return SPC
    if kinds == {BINARY, NUMERICAL}:
        return PBC
    return PHIK


def association(x, y, kind_x: str, kind_y: str) -> tuple[AssocResult, str]:
    """Dispatch the right measure for a feature pair; returns (result, tag)."""
    tag = assoc_kind_for(kind_x, kind_y)
    if tag == SPC:
        return spearman(x, y), tag
    if tag == PBC:
        if kind_x == BINARY:
            return point_biserial(x, y), tag
        return point_biserial(y, x), tag
    return (
        phik(x, y, numeric_x=kind_x == NUMERICAL, numeric_y=kind_y == NUMERICAL),
        tag,
    )


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric feature distances with the association bookkeeping behind them."""

    names: tuple
    d: np.ndarray
    kinds: np.ndarray
    assoc: np.ndarray


def distance_matrix(ds: TypedDataset) -> DistanceMatrix:
    """All-pairs feature distances d = 1 - |association|, in [0, 1].

    Degenerate pairs (constant columns, collapsed tables) land at distance 1.
    The kinds matrix records the measure actually used per pair.
    """
    F = ds.n_features
    d = np.zeros((F, F))
    assoc = np.ones((F, F))
    kinds = np.empty((F, F), dtype=object)
    kinds[:] = ""
    for i in range(F):
        for j in range(i + 1, F):
            res, tag = association(
                ds.columns[i], ds.columns[j], ds.kinds[i].kind, ds.kinds[j].kind
            )
            d[i, j] = d[j, i] = 1.0 - abs(res.value)
            assoc[i, j] = assoc[j, i] = res.value
            kinds[i, j] = kinds[j, i] = tag
    return DistanceMatrix(names=tuple(ds.feature_names), d=d, kinds=kinds, assoc=assoc)
