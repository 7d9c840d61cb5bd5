"""Pixel layout by greedy rank matching.

Feature distances and pixel distances are each reduced to rank matrices over
their strict upper triangles; the optimizer permutes the feature-to-cell
assignment to minimize the L1 gap between the two rank patterns. Padding
placeholders enter as virtual features at maximal distance, which pushes real
feature clusters toward the grid interior.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

PAD_DISTANCE = 2.0
MIN_SIDE = 8


class LayoutError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    rows: int
    cols: int

    @property
    def n_cells(self) -> int:
        return self.rows * self.cols

    def coords(self) -> np.ndarray:
        # cell index -> (row, col), row-major
        r, c = np.divmod(np.arange(self.n_cells), self.cols)
        return np.column_stack([r, c])


def choose_grid(n_original: int, target_side: int | None = None) -> tuple[Grid, int]:
    """Pick the grid and the noise budget (free cells) for n_original features.

    Default side: max(ceil(sqrt(2 * n_original)), 8), so at least half of the
    cells are available for noisy copies and the image is never tiny. An
    explicit target_side must fit all original features.
    """
    if n_original < 1:
        raise LayoutError("n_original must be >= 1")
    if target_side is not None:
        if target_side * target_side < n_original:
            raise LayoutError(
                f"target_side {target_side} gives {target_side ** 2} cells "
                f"< {n_original} features"
            )
        side = target_side
    else:
        side = max(math.ceil(math.sqrt(2 * n_original)), MIN_SIDE)
    return Grid(side, side), side * side - n_original


def rank_matrix(d: np.ndarray) -> np.ndarray:
    """Symmetric integer ranks (1-based) of the strict upper-triangle entries,
    ascending by distance, ties broken by (i, j) position. Diagonal is 0.
    """
    d = np.asarray(d, dtype=np.float64)
    m = d.shape[0]
    if d.shape != (m, m):
        raise LayoutError("rank_matrix expects a square matrix")
    iu, ju = np.triu_indices(m, 1)
    order = np.lexsort((ju, iu, d[iu, ju]))
    ranks = np.empty(len(order), dtype=np.int64)
    ranks[order] = np.arange(1, len(order) + 1)
    R = np.zeros((m, m), dtype=np.int64)
    R[iu, ju] = ranks
    return R + R.T


def pixel_distances(grid: Grid) -> np.ndarray:
    xy = grid.coords().astype(np.float64)
    diff = xy[:, None, :] - xy[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=2))


def pad_distances(d: np.ndarray, n_pad: int) -> np.ndarray:
    """Append n_pad virtual features at PAD_DISTANCE from everything."""
    m = d.shape[0]
    out = np.full((m + n_pad, m + n_pad), PAD_DISTANCE)
    out[:m, :m] = d
    np.fill_diagonal(out, 0.0)
    return out


@dataclass(frozen=True)
class PixelLayout:
    grid: Grid
    assignment: np.ndarray
    n_features: int
    initial_error: int
    final_error: int
    iterations: int
    swaps: int
    error_trace: tuple

    def cell_of(self, element: int) -> tuple:
        c = int(self.assignment[element])
        return (c // self.grid.cols, c % self.grid.cols)

    def padding_cells(self) -> set:
        return {
            self.cell_of(e) for e in range(self.n_features, len(self.assignment))
        }


def layout_error(feat_rank: np.ndarray, pix_rank: np.ndarray, assignment: np.ndarray) -> int:
    """Sum over element pairs i<j of |feat_rank[i,j] - pix_rank[cell(i),cell(j)]|."""
    Q = pix_rank[np.ix_(assignment, assignment)]
    return int(np.abs(feat_rank - Q).sum() // 2)


def optimize(
    feat_rank: np.ndarray,
    pix_rank: np.ndarray,
    grid: Grid,
    max_steps: int = 30000,
    patience: int = 300,
    seed: int = 0,
    n_features: int | None = None,
) -> PixelLayout:
    """Greedy swap search from the row-major identity assignment.

    Each iteration takes the least-recently-considered element (ties by
    index), evaluates swapping it with every other element, applies the single
    largest strict error reduction (ties by partner index) or, if none exists,
    marks the element considered. Stops at max_steps iterations, after
    `patience` consecutive iterations without improvement, or at error 0. The
    seed parameter is interface-stable but unused: every choice above is
    deterministic. error_trace holds the error after each iteration.
    """
    del seed
    m = grid.n_cells
    if feat_rank.shape != (m, m) or pix_rank.shape != (m, m):
        raise LayoutError(
            f"rank matrices must be {m}x{m} for a {grid.rows}x{grid.cols} grid"
        )
    if max_steps < 0 or patience < 1:
        raise LayoutError("max_steps must be >= 0 and patience >= 1")
    n_real = m if n_features is None else n_features
    if not 0 <= n_real <= m:
        raise LayoutError("n_features outside [0, n_cells]")

    F = feat_rank.astype(np.int64)
    assignment = np.arange(m)
    Q = pix_rank[np.ix_(assignment, assignment)].astype(np.int64)
    D = np.abs(F - Q)
    error = int(D.sum() // 2)
    initial_error = error

    last_considered = np.full(m, -1, dtype=np.int64)
    trace: list = []
    no_improve = 0
    swaps = 0
    iterations = 0
    indices = np.arange(m)
    while iterations < max_steps and no_improve < patience and error > 0 and m > 1:
        iterations += 1
        a = int(np.lexsort((indices, last_considered))[0])
        # delta[b]: error change from swapping cells of a and b; pair (a,b)
        # itself is unaffected, so drop columns a and b from every row sum
        A = np.abs(F[a][None, :] - Q)
        B = np.abs(F - Q[a][None, :])
        Cv = np.abs(F[a] - Q[a])
        sum_a = A.sum(axis=1) - A[:, a] - np.diagonal(A)
        sum_b = B.sum(axis=1) - B[:, a] - np.diagonal(B)
        sum_c = Cv.sum() - Cv - Cv[a]
        sum_d = D.sum(axis=1) - D[:, a] - np.diagonal(D)
        delta = sum_a + sum_b - sum_c - sum_d
        delta[a] = 0
        best = int(delta.min())
        if best < 0:
            b = int(np.flatnonzero(delta == best)[0])
            assignment[[a, b]] = assignment[[b, a]]
            Q[[a, b], :] = Q[[b, a], :]
            Q[:, [a, b]] = Q[:, [b, a]]
            D = np.abs(F - Q)
            error += best
            swaps += 1
            no_improve = 0
        else:
            last_considered[a] = iterations
            no_improve += 1
        trace.append(error)

    return PixelLayout(
        grid=grid,
        assignment=assignment,
        n_features=n_real,
        initial_error=initial_error,
        final_error=error,
        iterations=iterations,
        swaps=swaps,
        error_trace=tuple(trace),
    )
