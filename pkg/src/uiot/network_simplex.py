"""Exact solver for the balanced transportation problem.

Primal network simplex specialized to the bipartite transportation
graph: the basis is a spanning tree over row nodes 0..n-1 and column
nodes n..n+m-1 with exactly n+m-1 arcs. Pricing is a vectorized
Dantzig rule (most negative reduced cost); degenerate pivot streaks
fall back to Bland's rule, which guarantees termination.

Returns a vertex solution, so plans are sparse (at most n+m-1 cells),
which is what makes per-screenshot matchings readable downstream.
"""
from __future__ import annotations

import numpy as np

# reduced costs above -OPT_TOL count as optimal; dual accumulation error
# over a ~500-node tree stays orders of magnitude below this
OPT_TOL = 1e-11
_DEGENERATE_FLOW = 1e-15


def northwest_corner(row_masses: np.ndarray, col_masses: np.ndarray):
    """Initial basic feasible solution as a staircase spanning tree.

    Always emits exactly n+m-1 basic cells; simultaneous exhaustion of
    a row and a column inserts a zero-flow basic cell, keeping the
    basis a tree even for degenerate (e.g. uniform equal) marginals.
    """
    n = len(row_masses)
    m = len(col_masses)
    rem_a = np.array(row_masses, dtype=np.float64)
    rem_b = np.array(col_masses, dtype=np.float64)
    size = n + m - 1
    arc_i = np.empty(size, dtype=np.intp)
    arc_j = np.empty(size, dtype=np.intp)
    flow = np.empty(size, dtype=np.float64)
    i = j = 0
    for k in range(size):
        t = rem_a[i] if rem_a[i] <= rem_b[j] else rem_b[j]
        arc_i[k] = i
        arc_j[k] = j
        flow[k] = t
        rem_a[i] -= t
        rem_b[j] -= t
        if k == size - 1:
            break
        if rem_a[i] == 0.0 and i < n - 1:
            i += 1
        elif j < m - 1:
            j += 1
        else:
            i += 1
    return arc_i, arc_j, flow


def min_cost_start(cost: np.ndarray, row_masses: np.ndarray, col_masses: np.ndarray):
    """Greedy matrix-minimum initial basis: repeatedly allocate on the
    cheapest still-active cell.

    Produces the same tree structure guarantees as the northwest rule
    (each step retires exactly one row or column, n+m-1 cells total)
    but starts the simplex several times closer to optimal on cosine
    costs, which is what keeps dense pair sweeps fast.
    """
    n, m = cost.shape
    rem_a = np.array(row_masses, dtype=np.float64)
    rem_b = np.array(col_masses, dtype=np.float64)
    size = n + m - 1
    arc_i = np.empty(size, dtype=np.intp)
    arc_j = np.empty(size, dtype=np.intp)
    flow = np.empty(size, dtype=np.float64)
    work = np.array(cost, dtype=np.float64)
    rows_left, cols_left = n, m
    for k in range(size):
        i, j = divmod(int(np.argmin(work)), m)
        t = rem_a[i] if rem_a[i] <= rem_b[j] else rem_b[j]
        arc_i[k] = i
        arc_j[k] = j
        flow[k] = t
        rem_a[i] -= t
        rem_b[j] -= t
        if k == size - 1:
            break
        # retire exactly one side, never stranding the last row/column
        if rem_a[i] == 0.0 and rows_left > 1:
            work[i, :] = np.inf
            rows_left -= 1
        elif rem_b[j] == 0.0 and cols_left > 1:
            work[:, j] = np.inf
            cols_left -= 1
        elif rows_left > 1:
            work[i, :] = np.inf
            rows_left -= 1
        else:
            work[:, j] = np.inf
            cols_left -= 1
    return arc_i, arc_j, flow


def solve_transport(
    cost: np.ndarray,
    row_masses: np.ndarray,
    col_masses: np.ndarray,
    opt_tol: float = OPT_TOL,
) -> tuple[np.ndarray, int]:
    """Minimize <plan, cost> over couplings of the given marginals.

    Marginals must be balanced (equal totals); callers validate simplex
    membership. Returns (plan, pivot_count).
    """
    C = np.ascontiguousarray(cost, dtype=np.float64)
    n, m = C.shape
    a = np.asarray(row_masses, dtype=np.float64)
    b = np.asarray(col_masses, dtype=np.float64)

    # single-row/column problems have a unique coupling
    if n == 1:
        return b.copy().reshape(1, m), 0
    if m == 1:
        return a.copy().reshape(n, 1), 0

    arc_i, arc_j, flow = min_cost_start(C, a, b)
    n_basic = n + m - 1
    n_nodes = n + m

    u = np.empty(n, dtype=np.float64)
    v = np.empty(m, dtype=np.float64)
    parent = np.empty(n_nodes, dtype=np.intp)
    parent_arc = np.empty(n_nodes, dtype=np.intp)

    pivots = 0
    degenerate_streak = 0
    use_bland = False
    # Bland's rule terminates finitely; the streak threshold only decides
    # when to give up on the faster Dantzig pricing
    bland_threshold = 20 * n_nodes + 200

    while True:
        # rebuild tree adjacency from the basic arc list
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n_nodes)]
        for k in range(n_basic):
            r = arc_i[k]
            c = n + arc_j[k]
            adj[r].append((c, k))
            adj[c].append((r, k))

        # duals via DFS from row node 0 (u[0] = 0); also records parents
        # for the cycle search below
        parent[0] = -1
        parent_arc[0] = -1
        u[0] = 0.0
        visited = 1
        stack = [0]
        seen = np.zeros(n_nodes, dtype=bool)
        seen[0] = True
        while stack:
            x = stack.pop()
            if x < n:
                ux = u[x]
                for y, k in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        parent[y] = x
                        parent_arc[y] = k
                        v[y - n] = C[x, y - n] - ux
                        visited += 1
                        stack.append(y)
            else:
                vx = v[x - n]
                for y, k in adj[x]:
                    if not seen[y]:
                        seen[y] = True
                        parent[y] = x
                        parent_arc[y] = k
                        u[y] = C[y, x - n] - vx
                        visited += 1
                        stack.append(y)
        if visited != n_nodes:
            raise AssertionError("basis lost spanning-tree structure")

        reduced = C - u[:, None] - v[None, :]
        if use_bland:
            negatives = np.flatnonzero(reduced.ravel() < -opt_tol)
            if negatives.size == 0:
                break
            enter = int(negatives[0])
        else:
            enter = int(np.argmin(reduced.ravel()))
            if reduced.flat[enter] >= -opt_tol:
                break
        ei, ej = divmod(enter, m)

        # cycle = entering arc + the unique tree path between its endpoints
        anc_nodes = []
        anc_arcs = []
        x = ei
        while x != -1:
            anc_nodes.append(x)
            anc_arcs.append(parent_arc[x])
            x = parent[x]
        apos = {node: idx for idx, node in enumerate(anc_nodes)}
        path_b = []
        x = n + ej
        while x not in apos:
            path_b.append(parent_arc[x])
            x = parent[x]
        junction = apos[x]
        # walk order: entering, up from the column endpoint, down to the row
        # endpoint; signs alternate (+ at even walk positions)
        cycle = path_b + anc_arcs[:junction][::-1]

        theta = np.inf
        leave_slot = -1
        for p, k in enumerate(cycle):
            if p % 2 == 0:  # walk position p+1: odd positions donate flow
                f = flow[k]
                if f < theta or (
                    use_bland
                    and f == theta
                    and (arc_i[k], arc_j[k]) < (arc_i[leave_slot], arc_j[leave_slot])
                ):
                    theta = f
                    leave_slot = k
        if leave_slot < 0:
            raise AssertionError("transport cycle without a donor arc")

        if theta > 0.0:
            for p, k in enumerate(cycle):
                if p % 2 == 0:
                    flow[k] -= theta
                else:
                    flow[k] += theta
            degenerate_streak = 0
        else:
            degenerate_streak += 1
            if degenerate_streak > bland_threshold:
                use_bland = True

        arc_i[leave_slot] = ei
        arc_j[leave_slot] = ej
        flow[leave_slot] = theta
        pivots += 1

    plan = np.zeros((n, m), dtype=np.float64)
    plan[arc_i, arc_j] = np.maximum(flow, 0.0)
    return plan, pivots
