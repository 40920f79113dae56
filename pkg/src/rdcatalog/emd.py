"""Earth mover's distance between small histograms.

Two independent routes are kept side by side on purpose:

* :func:`emd_1d` evaluates the closed form for histograms on a line,
  integrating |CDF(p) - CDF(q)| over the merged support.
* :func:`emd_exact` solves the balanced transportation problem with a
  hand-rolled transportation simplex (u-v potentials, anti-cycling
  fallback to smallest-index pivoting).

Both normalize mass to 1 before comparing, so histograms with unequal
totals are compared by shape.  Bin counts are capped at
:data:`MAX_BINS` per histogram; the solver is dense and quadratic in
the bin count, so large inputs must be rebinned by the caller first.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BINS = 64

_RC_TOL = 1e-12


class EmdError(Exception):
    pass


class SizeLimit(EmdError):
    pass


class DimensionMismatch(EmdError):
    pass


@dataclass(frozen=True)
class Histogram:
    """Point masses at explicit positions; positions (n,) or (n, d).

    1-D positions must be strictly increasing.  Categorical histograms
    are expressed as index positions 0..n-1 plus a ground matrix passed
    to :func:`emd`.
    """

    positions: np.ndarray
    masses: np.ndarray

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=np.float64)
        mass = np.asarray(self.masses, dtype=np.float64)
        if pos.ndim not in (1, 2):
            raise ValueError("positions must be a (n,) or (n, d) array")
        if mass.ndim != 1 or mass.shape[0] != pos.shape[0]:
            raise ValueError("masses must be 1-D and match positions")
        if pos.shape[0] == 0:
            raise ValueError("histogram needs at least one bin")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if pos.ndim == 1 and np.any(np.diff(pos) <= 0):
            raise ValueError("1-D positions must be strictly increasing")
        if not np.all(np.isfinite(mass)) or np.any(mass < 0):
            raise ValueError("masses must be finite and non-negative")
        if mass.sum() <= 0:
            raise ValueError("total mass must be positive")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "masses", mass)

    @property
    def ndim(self) -> int:
        return 1 if self.positions.ndim == 1 else self.positions.shape[1]

    @property
    def size(self) -> int:
        return self.positions.shape[0]

    def normalized(self) -> "Histogram":
        return Histogram(self.positions, self.masses / self.masses.sum())


def _check_pair(p: Histogram, q: Histogram):
    if p.ndim != q.ndim:
        raise DimensionMismatch(f"position dimensions differ: {p.ndim} vs {q.ndim}")
    if p.size > MAX_BINS or q.size > MAX_BINS:
        raise SizeLimit(f"histograms capped at {MAX_BINS} bins, got {p.size} and {q.size}")


def emd_1d(p: Histogram, q: Histogram) -> float:
    """Closed-form distance on the line across the merged support."""
    _check_pair(p, q)
    if p.ndim != 1:
        raise DimensionMismatch("closed form requires 1-D positions")
    xs = np.concatenate([p.positions, q.positions])
    steps = np.concatenate([p.masses / p.masses.sum(), -q.masses / q.masses.sum()])
    order = np.argsort(xs, kind="stable")
    xs = xs[order]
    cdf = np.cumsum(steps[order])
    return float(np.sum(np.abs(cdf[:-1]) * np.diff(xs)))


def _cost_matrix(p: Histogram, q: Histogram) -> np.ndarray:
    a = p.positions if p.positions.ndim == 2 else p.positions[:, None]
    b = q.positions if q.positions.ndim == 2 else q.positions[:, None]
    diff = a[:, None, :] - b[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=2))


def _initial_basis(supply: np.ndarray, demand: np.ndarray):
    """Northwest-corner start: flows plus a spanning set of m+n-1 cells."""
    m, n = len(supply), len(demand)
    flow = np.zeros((m, n))
    basis: list[tuple[int, int]] = []
    s = supply.copy()
    d = demand.copy()
    i = j = 0
    while i < m and j < n:
        moved = min(s[i], d[j])
        flow[i, j] = moved
        basis.append((i, j))
        s[i] -= moved
        d[j] -= moved
        if i == m - 1 and j == n - 1:
            break
        # advance one pointer only, keeping the basis a tree even when
        # both sides exhaust at once (the stalled cell stays at flow 0)
        if s[i] <= d[j] and i < m - 1:
            i += 1
        else:
            j += 1
    return flow, basis


def _potentials(costs: np.ndarray, basis: list[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
    m, n = costs.shape
    u = np.full(m, np.nan)
    v = np.full(n, np.nan)
    rows_adj: list[list[int]] = [[] for _ in range(m)]
    cols_adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in basis:
        rows_adj[i].append(j)
        cols_adj[j].append(i)
    u[0] = 0.0
    stack = [("r", 0)]
    while stack:
        kind, idx = stack.pop()
        if kind == "r":
            for j in rows_adj[idx]:
                if np.isnan(v[j]):
                    v[j] = costs[idx, j] - u[idx]
                    stack.append(("c", j))
        else:
            for i in cols_adj[idx]:
                if np.isnan(u[i]):
                    u[i] = costs[i, idx] - v[idx]
                    stack.append(("r", i))
    return u, v


def _find_cycle(basis: list[tuple[int, int]], enter: tuple[int, int], m: int, n: int):
    """Cells of the unique cycle the entering cell closes in the basis tree.

    Nodes 0..m-1 are rows, m..m+n-1 are columns.  Returns the cycle as a
    cell list starting with ``enter``; signs alternate +,-,+,- along it.
    """
    adj: dict[int, list[tuple[int, tuple[int, int]]]] = {}
    for i, j in basis:
        adj.setdefault(i, []).append((m + j, (i, j)))
        adj.setdefault(m + j, []).append((i, (i, j)))
    start, goal = enter[0], m + enter[1]
    parent: dict[int, tuple[int, tuple[int, int]]] = {start: (-1, (-1, -1))}
    queue = [start]
    while queue:
        node = queue.pop(0)
        if node == goal:
            break
        for nxt, cell in adj.get(node, ()):
            if nxt not in parent:
                parent[nxt] = (node, cell)
                queue.append(nxt)
    path_cells = []
    node = goal
    while node != start:
        prev, cell = parent[node]
        path_cells.append(cell)
        node = prev
    return [enter] + path_cells


def _transport_cost(costs: np.ndarray, supply: np.ndarray, demand: np.ndarray) -> float:
    m, n = costs.shape
    flow, basis = _initial_basis(supply, demand)
    basis_set = set(basis)
    max_iter = 200 * (m + n) * max(m, n)
    stalled = 0
    for _ in range(max_iter):
        u, v = _potentials(costs, basis)
        reduced = costs - u[:, None] - v[None, :]
        for i, j in basis:
            reduced[i, j] = 0.0
        if stalled < 2 * (m + n):
            flat = int(np.argmin(reduced))
            enter = (flat // n, flat % n)
            if reduced[enter] >= -_RC_TOL:
                break
        else:
            # anti-cycling: smallest-index entering cell
            candidates = np.argwhere(reduced < -_RC_TOL)
            if len(candidates) == 0:
                break
            enter = tuple(int(x) for x in candidates[0])
        cycle = _find_cycle(basis, enter, m, n)
        minus = cycle[1::2]
        theta = min(flow[c] for c in minus)
        leave = min(c for c in minus if flow[c] == theta)
        for idx, cell in enumerate(cycle):
            flow[cell] += theta if idx % 2 == 0 else -theta
        flow[leave] = 0.0
        basis_set.discard(leave)
        basis_set.add(enter)
        basis = sorted(basis_set)
        stalled = stalled + 1 if theta == 0.0 else 0
    else:
        raise EmdError("transportation solver failed to converge")
    return float(np.sum(flow * costs))


def emd_exact(p: Histogram, q: Histogram, ground: np.ndarray | None = None) -> float:
    """Balanced optimal-transport cost between the normalized histograms.

    ``ground`` overrides the Euclidean position distance with an explicit
    (p.size, q.size) cost matrix, which also permits categorical bins.
    """
    if p.size > MAX_BINS or q.size > MAX_BINS:
        raise SizeLimit(f"histograms capped at {MAX_BINS} bins, got {p.size} and {q.size}")
    if ground is not None:
        ground = np.asarray(ground, dtype=np.float64)
        if ground.shape != (p.size, q.size):
            raise DimensionMismatch(
                f"ground matrix shape {ground.shape} != ({p.size}, {q.size})"
            )
        if not np.all(np.isfinite(ground)) or np.any(ground < 0):
            raise ValueError("ground distances must be finite and non-negative")
    elif p.ndim != q.ndim:
        raise DimensionMismatch(
            f"position dimensions differ ({p.ndim} vs {q.ndim}) and no ground matrix given"
        )
    supply = p.masses / p.masses.sum()
    demand = q.masses / q.masses.sum()
    keep_p = supply > 0
    keep_q = demand > 0
    if ground is not None:
        costs = ground[np.ix_(keep_p, keep_q)]
    else:
        costs = _cost_matrix(p, q)[np.ix_(keep_p, keep_q)]
    supply = supply[keep_p]
    demand = demand[keep_q]
    supply /= supply.sum()
    demand /= demand.sum()
    if costs.shape == (1, 1):
        return float(costs[0, 0])
    return _transport_cost(costs, supply, demand)


def emd(p: Histogram, q: Histogram, ground: np.ndarray | None = None) -> float:
    """Distance between two histograms; closed form on the line, solver otherwise."""
    if p.size > MAX_BINS or q.size > MAX_BINS:
        raise SizeLimit(f"histograms capped at {MAX_BINS} bins, got {p.size} and {q.size}")
    if ground is None and p.ndim == 1 and q.ndim == 1:
        return emd_1d(p, q)
    return emd_exact(p, q, ground=ground)
