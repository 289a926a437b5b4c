"""Shortest noncontractible loops of a conformal metric on a grid torus.

The continuous systole is approximated by shortest cycles of an 8-neighbour
graph whose edge weights are the flat edge length times the mean of e^u at the
two endpoints. A cycle of homotopy class (k, l) lifts to a path from a node to
its translate by k*g1 + l*g2, and it must cross the cut line i = 0 (if k != 0)
or j = 0 (if k = 0), so those two lines are the only basepoints needed.

Graph lengths are lengths of actual polygonal loops, so they bound the true
systole from above; conversely any loop is approximated by a graph path at most
a factor (1 + anisotropy) longer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .fields import TorusGrid

K_MAX = 3
MAX_NODES = 96 * 96
_STEPS = ((1, 0), (0, 1), (1, 1), (1, -1))


@dataclass(frozen=True)
class SystoleResult:
    length: float
    homotopy_class: tuple[int, int]
    tolerance: float
    graph_shape: tuple[int, int]

    def __float__(self):
        return self.length


def _divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def step_vectors(grid: TorusGrid, s1: int = 1, s2: int = 1) -> list[np.ndarray]:
    m = grid.moduli
    e1 = np.array([m.scale, 0.0]) * s1 / grid.n1
    e2 = np.array([m.scale * m.x, m.scale * m.y]) * s2 / grid.n2
    return [a * e1 + b * e2 for a, b in _STEPS]


def anisotropy(grid: TorusGrid, s1: int = 1, s2: int = 1) -> float:
    """Worst-case ratio - 1 of graph-path length to Euclidean length over all directions.

    Between two consecutive stencil directions at angle alpha the worst ratio is
    1 / cos(alpha / 2); for a square 8-neighbour stencil this is sqrt(4 - 2 sqrt 2) - 1.
    """
    vecs = step_vectors(grid, s1, s2)
    angles = sorted(
        math.atan2(v[1], v[0]) % (2 * math.pi) for w in vecs for v in (w, -w)
    )
    gaps = np.diff(angles + [angles[0] + 2 * math.pi])
    return 1.0 / math.cos(float(gaps.max()) / 2.0) - 1.0


def choose_strides(grid: TorusGrid, max_nodes: int = MAX_NODES) -> tuple[int, int]:
    """Subsampling strides giving at most max_nodes graph nodes with the least anisotropy."""
    best = None
    for s1 in _divisors(grid.n1):
        for s2 in _divisors(grid.n2):
            m1, m2 = grid.n1 // s1, grid.n2 // s2
            if m1 * m2 > max_nodes or min(m1, m2) < 4:
                continue
            key = (round(anisotropy(grid, s1, s2), 9), -(m1 * m2))
            if best is None or key < best[0]:
                best = (key, (s1, s2))
    if best is None:
        return 1, 1
    return best[1]


def graph_anisotropy(grid: TorusGrid, max_nodes: int = MAX_NODES) -> float:
    return anisotropy(grid, *choose_strides(grid, max_nodes))


def _cover_graph(eu: np.ndarray, steps: list[np.ndarray], i_rng, j_rng):
    i0, i1 = i_rng
    j0, j1 = j_rng
    m1, m2 = eu.shape
    ni, nj = i1 - i0 + 1, j1 - j0 + 1
    ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
    w = eu[ii % m1, jj % m2]
    ids = np.arange(ni * nj).reshape(ni, nj)
    rows, cols, vals = [], [], []
    for (a, b), vec in zip(_STEPS, steps):
        length = float(np.hypot(*vec))
        src = ids[max(0, -a) : ni - max(0, a), max(0, -b) : nj - max(0, b)]
        dst = ids[max(0, a) : ni - max(0, -a), max(0, b) : nj - max(0, -b)]
        ws = w[max(0, -a) : ni - max(0, a), max(0, -b) : nj - max(0, b)]
        wd = w[max(0, a) : ni - max(0, -a), max(0, b) : nj - max(0, -b)]
        rows.append(src.ravel())
        cols.append(dst.ravel())
        vals.append((length * 0.5 * (ws + wd)).ravel())
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    v = np.concatenate(vals)
    g = coo_matrix((np.concatenate([v, v]), (np.concatenate([r, c]), np.concatenate([c, r]))),
                   shape=(ni * nj, ni * nj)).tocsr()
    return g, ids


def graph_systole(u: np.ndarray, grid: TorusGrid, k_max: int = K_MAX,
                  max_nodes: int = MAX_NODES) -> SystoleResult:
    """Shortest noncontractible graph loop for the metric e^{2u} g0 sampled on grid."""
    s1, s2 = choose_strides(grid, max_nodes)
    eu = np.exp(np.asarray(u, dtype=float).reshape(grid.shape)[::s1, ::s2])
    m1, m2 = eu.shape
    steps = step_vectors(grid, s1, s2)
    tol = anisotropy(grid, s1, s2)
    mod = grid.moduli

    # straight loops along the generators are graph cycles and give an upper bound
    row_loops = mod.scale * eu.mean(axis=0)
    e2_len = float(np.hypot(*steps[1])) * m2
    col_loops = e2_len * eu.mean(axis=1)
    best = float(row_loops.min())
    best_cls = (1, 0)
    if col_loops.min() < best:
        best, best_cls = float(col_loops.min()), (0, 1)
    limit = best * (1.0 + 1e-12)

    # flat radius any path of graph length <= limit can reach
    reach = limit / float(eu.min())
    d_j = min(int(math.ceil(reach * m2 / (mod.scale * mod.y))) + 1, k_max * m2)
    d_i = min(int(math.ceil(reach * (1.0 + mod.x / mod.y) * m1 / mod.scale)) + 1, k_max * m1)
    i_rng = (-d_i, m1 - 1 + d_i)
    j_rng = (-d_j, m2 - 1 + d_j)
    g, ids = _cover_graph(eu, steps, i_rng, j_rng)

    def node(i, j):
        return ids[i - i_rng[0], j - j_rng[0]]

    sources = [(0, j) for j in range(m2)] + [(i, 0) for i in range(1, m1)]
    classes = [(k, l) for k in range(-k_max, k_max + 1) for l in range(-k_max, k_max + 1)
               if (k, l) != (0, 0)]
    chunk = 64
    for start in range(0, len(sources), chunk):
        batch = sources[start : start + chunk]
        dist = dijkstra(g, directed=False, indices=[node(*s) for s in batch], limit=limit)
        for row, (si, sj) in enumerate(batch):
            for k, l in classes:
                ti, tj = si + k * m1, sj + l * m2
                if not (i_rng[0] <= ti <= i_rng[1] and j_rng[0] <= tj <= j_rng[1]):
                    continue
                d = dist[row, node(ti, tj)]
                if d < best:
                    best, best_cls = float(d), (k, l)
    return SystoleResult(best, best_cls, tol, (m1, m2))


# -- noncontractible loops inside sub/superlevel sets -------------------------

def _periodic_components(mask: np.ndarray) -> int:
    """Number of 4-connected components of a boolean mask on a periodic grid."""
    n1, n2 = mask.shape
    ids = np.arange(n1 * n2).reshape(n1, n2)
    rows, cols = [], []
    for shift_axis in (0, 1):
        nb = np.roll(ids, -1, axis=shift_axis)
        both = mask & np.roll(mask, -1, axis=shift_axis)
        rows.append(ids[both])
        cols.append(nb[both])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    g = coo_matrix((np.ones(r.size), (r, c)), shape=(n1 * n2, n1 * n2))
    n, labels = connected_components(g, directed=False)
    # isolated unmasked nodes each form a component; discount them
    return n - int(np.count_nonzero(~mask))


def has_noncontractible_loop(mask: np.ndarray) -> bool:
    """True if the set of masked grid nodes carries a noncontractible 4-connected cycle.

    A simple noncontractible cycle on the torus has a primitive class, which is
    never in 2Z^2, so its component lifts to fewer than four components of the
    2x2 cover. Components with only contractible cycles lift to exactly four.
    """
    mask = np.asarray(mask, dtype=bool)
    if not mask.any():
        return False
    base = _periodic_components(mask)
    cover = _periodic_components(np.tile(mask, (2, 2)))
    return cover < 4 * base


def critical_loop_levels(u: np.ndarray) -> tuple[float, float]:
    """(v1, v2): the least level whose sublevel set {u <= v1} and the greatest level whose
    superlevel set {u >= v2} carry a noncontractible grid loop."""
    u = np.asarray(u, dtype=float)
    vals = np.unique(u)

    def first_true(pred) -> int:
        # pred is monotone (False ... True) and true at the last index
        lo, hi = 0, vals.size - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if pred(vals[mid]):
                hi = mid
            else:
                lo = mid + 1
        return lo

    i1 = first_true(lambda v: has_noncontractible_loop(u <= v))
    if has_noncontractible_loop(u >= vals[-1]):
        i2 = vals.size - 1
    else:
        i2 = first_true(lambda v: not has_noncontractible_loop(u >= v)) - 1
    return float(vals[i1]), float(vals[i2])
