"""Divisors, the graph Laplacian, Picard classes and indegree divisors.

A divisor is a tuple of ints indexed by vertex id.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import CapExceeded, DisconnectedGraphError, GraphError
from .graph import Multigraph, bits, popcount

Divisor = tuple[int, ...]

INDEGREE_SET_CAP = 20


def zero(g: Multigraph) -> Divisor:
    return (0,) * g.n_vertices


def unit(g: Multigraph, v: int, k: int = 1) -> Divisor:
    d = [0] * g.n_vertices
    d[v] = k
    return tuple(d)


def add(a: Sequence[int], b: Sequence[int]) -> Divisor:
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence[int], b: Sequence[int]) -> Divisor:
    return tuple(x - y for x, y in zip(a, b))


def degree(d: Sequence[int]) -> int:
    return sum(d)


def restrict_sum(d: Sequence[int], w: int) -> int:
    """``D_W``, the sum of ``d`` over the vertex mask ``w``."""
    return sum(d[v] for v in bits(w))


def _require_connected(g: Multigraph) -> None:
    if not g.is_connected():
        raise DisconnectedGraphError("operation needs a connected graph")


def adjacency_counts(g: Multigraph) -> list[list[int]]:
    """``val(v, w)`` for ``v != w``; the diagonal holds ``val(v)``."""
    n = g.n_vertices
    a = [[0] * n for _ in range(n)]
    for u, v in g.edges:
        if u != v:
            a[u][v] += 1
            a[v][u] += 1
            a[u][u] += 1
            a[v][v] += 1
    return a


def laplacian(g: Multigraph, d: Sequence[int]) -> Divisor:
    """``Δ(D)_v = -D_v val(v) + Σ_{w≠v} D_w val(v, w)``; loops contribute nothing."""
    a = adjacency_counts(g)
    n = g.n_vertices
    return tuple(
        -d[v] * a[v][v] + sum(d[w] * a[v][w] for w in range(n) if w != v)
        for v in range(n)
    )


def fire_set(g: Multigraph, d: Sequence[int], w: int, times: int = 1) -> Divisor:
    """Every vertex of ``w`` fires ``times`` times: one chip per edge leaving ``w``."""
    out = list(d)
    for u, v in g.edges:
        if u == v:
            continue
        iu, iv = w >> u & 1, w >> v & 1
        if iu and not iv:
            out[u] -= times
            out[v] += times
        elif iv and not iu:
            out[v] -= times
            out[u] += times
    return tuple(out)


def _distances(g: Multigraph, q: int) -> list[int]:
    a = adjacency_counts(g)
    dist = [-1] * g.n_vertices
    dist[q] = 0
    queue = deque([q])
    while queue:
        x = queue.popleft()
        for y in range(g.n_vertices):
            if y != x and a[x][y] and dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def is_q_reduced(g: Multigraph, d: Sequence[int], q: int) -> bool:
    if any(d[v] < 0 for v in range(g.n_vertices) if v != q):
        return False
    return _burn(g, d, q) == g.all_vertices


def _burn(g: Multigraph, d: Sequence[int], q: int) -> int:
    """Dhar's burning process from ``q``; returns the mask of burnt vertices."""
    burnt = 1 << q
    changed = True
    while changed:
        changed = False
        for v in range(g.n_vertices):
            if burnt >> v & 1:
                continue
            fire = 0
            for i in bits(g.incident[v]):
                x, y = g.edges[i]
                other = y if x == v else x
                if other != v and burnt >> other & 1:
                    fire += 1
            if fire > d[v]:
                burnt |= 1 << v
                changed = True
    return burnt


def q_reduce(g: Multigraph, d: Sequence[int], q: int = 0) -> Divisor:
    """The unique ``q``-reduced divisor linearly equivalent to ``d``."""
    _require_connected(g)
    if len(d) != g.n_vertices:
        raise GraphError("divisor length does not match the graph")
    cur = tuple(d)
    # Make every vertex other than q nonnegative: firing the ball of radius k
    # feeds each vertex at distance k+1 and only drains the sphere of radius k.
    dist = _distances(g, q)
    for k in range(max(dist) - 1, -1, -1):
        ball = 0
        for v, dv in enumerate(dist):
            if dv <= k:
                ball |= 1 << v
        shell = [v for v, dv in enumerate(dist) if dv == k + 1]
        need = max((-cur[v] for v in shell), default=0)
        if need > 0:
            cur = fire_set(g, cur, ball, need)
    while True:
        burnt = _burn(g, cur, q)
        if burnt == g.all_vertices:
            return cur
        cur = fire_set(g, cur, g.all_vertices & ~burnt)


def pic_equivalent(g: Multigraph, d1: Sequence[int], d2: Sequence[int]) -> bool:
    _require_connected(g)
    if degree(d1) != degree(d2):
        return False
    return q_reduce(g, d1, 0) == q_reduce(g, d2, 0)


def bareiss_determinant(m: Sequence[Sequence[int]]) -> int:
    """Exact integer determinant by fraction-free elimination."""
    a = [list(row) for row in m]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for r in range(k + 1, n):
                if a[r][k] != 0:
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def reduced_laplacian_matrix(g: Multigraph, q: int = 0) -> list[list[int]]:
    """``diag(val) - adjacency`` with row and column ``q`` removed."""
    a = adjacency_counts(g)
    idx = [v for v in range(g.n_vertices) if v != q]
    return [[a[i][i] if i == j else -a[i][j] for j in idx] for i in idx]


def pic_class_count(g: Multigraph, deg: int = 0) -> int:
    """``|Pic^deg(Γ)|``, the number of spanning trees (independent of ``deg``)."""
    _require_connected(g)
    return bareiss_determinant(reduced_laplacian_matrix(g))


@dataclass(frozen=True)
class PartialOrientation:
    """Orientation of the edges in ``support``; ``heads[e]`` is the vertex edge
    ``e`` points to.  Loops in the support need no head."""

    support: int
    heads: Mapping[int, int] = field(default_factory=dict)


def indegree_divisor(g: Multigraph, o: PartialOrientation) -> Divisor:
    out = [0] * g.n_vertices
    for i in bits(o.support):
        u, v = g.edges[i]
        if u == v:
            out[u] += 1
            continue
        h = o.heads.get(i)
        if h not in (u, v):
            raise GraphError(f"edge {g.edge_labels[i]} needs a head among its endpoints")
        out[h] += 1
    return tuple(out)


def _loop_part(g: Multigraph, s: int) -> list[int]:
    base = [0] * g.n_vertices
    for i in bits(s & g.loop_mask):
        base[g.edges[i][0]] += 1
    return base


def indegree_set(g: Multigraph, s: int) -> list[Divisor]:
    """All indegree divisors of orientations of ``s``, deduplicated and sorted."""
    nonloops = bits(s & ~g.loop_mask)
    if len(nonloops) > INDEGREE_SET_CAP:
        raise CapExceeded(
            f"{len(nonloops)} non-loop edges; indegree sets are materialized up to {INDEGREE_SET_CAP}"
        )
    current = {tuple(_loop_part(g, s))}
    for i in nonloops:
        u, v = g.edges[i]
        nxt = set()
        for d in current:
            a = list(d)
            a[u] += 1
            nxt.add(tuple(a))
            b = list(d)
            b[v] += 1
            nxt.add(tuple(b))
        current = nxt
    return sorted(current)


def is_indegree_realizable(g: Multigraph, s: int, d: Sequence[int]) -> bool:
    """Whether ``d`` is the indegree divisor of some orientation of ``s``.

    Loops are forced; the non-loop edges are assigned to endpoints by
    augmenting paths in the edge/vertex bipartite graph with vertex capacities.
    """
    if len(d) != g.n_vertices or sum(d) != popcount(s):
        return False
    cap = [x - y for x, y in zip(d, _loop_part(g, s))]
    if any(c < 0 for c in cap):
        return False
    nonloops = bits(s & ~g.loop_mask)
    owner: dict[int, int] = {}  # edge -> vertex it points to
    load = [0] * g.n_vertices
    assigned_to: list[list[int]] = [[] for _ in range(g.n_vertices)]

    for e in nonloops:
        # BFS over alternating paths: edge -> endpoint; full endpoint -> its edges.
        parent_edge = {e: None}
        queue = deque([e])
        found = None
        while queue and found is None:
            x = queue.popleft()
            for v in g.edges[x]:
                if load[v] < cap[v]:
                    found = (x, v)
                    break
                for y in assigned_to[v]:
                    if y not in parent_edge:
                        parent_edge[y] = x
                        queue.append(y)
        if found is None:
            return False
        x, v = found
        # Shift along the path: x takes v, x's previous vertex goes to its parent edge.
        load[v] += 1
        while x is not None:
            prev_v = owner.get(x)
            if prev_v is not None:
                assigned_to[prev_v].remove(x)
            owner[x] = v
            assigned_to[v].append(x)
            if prev_v is None:
                break
            v = prev_v
            x = parent_edge[x]
    return True


def parse_divisor_tokens(g: Multigraph, tokens: Iterable[str]) -> Divisor:
    out = [0] * g.n_vertices
    for tok in tokens:
        name, sep, val = tok.partition("=")
        if not sep:
            raise GraphError(f"expected name=value, got {tok!r}")
        if name not in g.vertex_index:
            raise GraphError(f"unknown vertex {name!r}")
        try:
            out[g.vertex_index[name]] += int(val)
        except ValueError:
            raise GraphError(f"bad integer in {tok!r}") from None
    return tuple(out)


def format_divisor(g: Multigraph, d: Sequence[int]) -> str:
    return " ".join(f"{name}={x}" for name, x in zip(g.vertex_names, d))
