"""Spanning trees, connected spanning subgraphs and the maps between them.

Spanning subgraphs are identified by the mask of their *kept* edges.
"""

from __future__ import annotations

from itertools import combinations

from .divisors import pic_class_count
from .errors import CapExceeded, DisconnectedGraphError, GraphError
from .graph import GraphMorphism, Multigraph, bits, genus, kept_edge_ids, mask_of, parent_to_sub_mask, popcount

SUBSET_EDGE_CAP = 20


def _require_connected(g: Multigraph) -> None:
    if not g.is_connected():
        raise DisconnectedGraphError("operation needs a connected graph")


def tree_sort_key(mask: int) -> tuple[int, ...]:
    return tuple(bits(mask))


def _trees(edges: list[tuple[int, int, int]], n_comp: int) -> list[int]:
    # edges: (edge id, a, b) on current (contracted) vertex labels; loops dropped.
    edges = [e for e in edges if e[1] != e[2]]
    if n_comp == 1:
        return [0]
    if not edges:
        return []
    pivot = min(edges)
    eid, a, b = pivot
    rest = [e for e in edges if e is not pivot]
    out = []
    merged = [(i, a if x == b else x, a if y == b else y) for i, x, y in rest]
    for t in _trees(merged, n_comp - 1):
        out.append(t | (1 << eid))
    # deleting the pivot keeps connectivity iff it is not a bridge of the current graph
    if _joined(rest, a, b):
        out.extend(_trees(rest, n_comp))
    return out


def _joined(edges: list[tuple[int, int, int]], a: int, b: int) -> bool:
    adj: dict[int, list[int]] = {}
    for _, x, y in edges:
        adj.setdefault(x, []).append(y)
        adj.setdefault(y, []).append(x)
    seen = {a}
    stack = [a]
    while stack:
        x = stack.pop()
        if x == b:
            return True
        for y in adj.get(x, ()):
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return False


def spanning_trees(g: Multigraph) -> list[int]:
    """All spanning trees as kept-edge masks, ordered by their sorted edge ids."""
    _require_connected(g)
    edges = [(i, u, v) for i, (u, v) in enumerate(g.edges)]
    trees = _trees(edges, g.n_vertices)
    return sorted(trees, key=tree_sort_key)


def connected_spanning_subgraphs(g: Multigraph) -> list[int]:
    """Kept-edge masks of every connected ``Γ∖S``, grouped by ``|S|`` ascending."""
    _require_connected(g)
    m = g.n_edges
    if m > SUBSET_EDGE_CAP:
        raise CapExceeded(f"{m} edges; subset enumeration is capped at {SUBSET_EDGE_CAP}")
    full = g.all_edges
    out = []
    for k in range(m + 1):
        for removed in combinations(range(m), k):
            kept = full & ~mask_of(removed)
            if g.is_connected(kept):
                out.append(kept)
    return out


def complexity(g: Multigraph) -> int:
    """Number of spanning trees, by the matrix-tree determinant."""
    return pic_class_count(g)


def genus_profile(g: Multigraph) -> dict[int, int]:
    """``h -> n_h``: the number of connected spanning subgraphs of genus ``h``."""
    base = g.n_edges - genus(g)  # |V| - 1 for connected g
    prof = {h: 0 for h in range(genus(g) + 1)}
    for kept in connected_spanning_subgraphs(g):
        prof[popcount(kept) - base] += 1
    return prof


def restrict_tree_inclusion(g: Multigraph, s: int) -> dict[int, int]:
    """``ST(Γ∖S) ↪ ST(Γ)``: trees of ``delete_edges(g, s)`` (in its own edge ids)
    mapped to the same trees as kept masks of ``g``."""
    if not g.is_connected(g.all_edges & ~s):
        raise DisconnectedGraphError("Γ∖S must be connected")
    ids = kept_edge_ids(g, s)
    out = {}
    for t in spanning_trees(g):
        if t & s:
            continue
        out[parent_to_sub_mask(ids, t)] = t
    return out


def morphism_tree_pullback(f: GraphMorphism) -> dict[int, int]:
    """``f^*: ST(Γ') ↪ ST(Γ)`` for a genus-preserving morphism."""
    if not f.preserves_genus():
        raise GraphError("tree pullback needs a genus-preserving morphism")
    out = {}
    for t in spanning_trees(f.target):
        out[t] = f.pull_edges(t) | f.contracted
    return out
