"""Finite multigraphs with labeled edges, vertex/edge subsets as bitmasks.

Vertex subsets and edge subsets are plain Python ints used as bitsets:
bit ``i`` set means vertex (or edge) ``i`` belongs to the set.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

from .errors import CapExceeded, GraphError

MAX_VERTICES = 64


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in increasing order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def subset_key(mask: int) -> tuple[int, tuple[int, ...]]:
    """Canonical sort key for subsets: by size, then by sorted members."""
    b = bits(mask)
    return (len(b), tuple(b))


class Multigraph:
    """Immutable multigraph; loops and parallel edges allowed.

    ``edges[i]`` is the endpoint pair ``(u, v)`` of edge ``i`` with ``u <= v``.
    """

    __slots__ = ("vertex_names", "edge_labels", "edges", "__dict__")

    def __init__(
        self,
        vertex_names: Sequence[str],
        edges: Sequence[tuple[int, int]],
        edge_labels: Sequence[str] | None = None,
    ):
        n = len(vertex_names)
        if n == 0:
            raise GraphError("a graph needs at least one vertex")
        if n > MAX_VERTICES:
            raise CapExceeded(f"{n} vertices exceeds the bitset limit of {MAX_VERTICES}")
        if len(set(vertex_names)) != n:
            raise GraphError("vertex names must be unique")
        norm = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge endpoint out of range: {(u, v)}")
            norm.append((u, v) if u <= v else (v, u))
        if edge_labels is None:
            edge_labels = [f"e{i}" for i in range(len(norm))]
        if len(edge_labels) != len(norm):
            raise GraphError("one label per edge required")
        if len(set(edge_labels)) != len(edge_labels):
            raise GraphError("edge labels must be unique")
        object.__setattr__(self, "vertex_names", tuple(str(x) for x in vertex_names))
        object.__setattr__(self, "edges", tuple(norm))
        object.__setattr__(self, "edge_labels", tuple(str(x) for x in edge_labels))

    def __setattr__(self, name, value):
        if name in Multigraph.__slots__[:3]:
            raise AttributeError("Multigraph is immutable")
        object.__setattr__(self, name, value)

    @classmethod
    def from_edge_list(cls, n: int, edges: Sequence[tuple[int, int]]) -> "Multigraph":
        return cls([str(i) for i in range(n)], edges)

    def __repr__(self):
        return f"Multigraph(|V|={self.n_vertices}, |E|={self.n_edges})"

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return (
            self.vertex_names == other.vertex_names
            and self.edges == other.edges
            and self.edge_labels == other.edge_labels
        )

    def __hash__(self):
        return hash((self.vertex_names, self.edges, self.edge_labels))

    @property
    def n_vertices(self) -> int:
        return len(self.vertex_names)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def all_vertices(self) -> int:
        return (1 << self.n_vertices) - 1

    @property
    def all_edges(self) -> int:
        return (1 << self.n_edges) - 1

    @cached_property
    def vertex_index(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.vertex_names)}

    @cached_property
    def edge_index(self) -> dict[str, int]:
        return {label: i for i, label in enumerate(self.edge_labels)}

    @cached_property
    def loop_mask(self) -> int:
        return mask_of(i for i, (u, v) in enumerate(self.edges) if u == v)

    @cached_property
    def incident(self) -> tuple[int, ...]:
        """Per vertex, the mask of incident edges (loops included)."""
        inc = [0] * self.n_vertices
        for i, (u, v) in enumerate(self.edges):
            inc[u] |= 1 << i
            inc[v] |= 1 << i
        return tuple(inc)

    @cached_property
    def edge_masks(self) -> tuple[int, ...]:
        """Per edge, the vertex mask of its endpoints."""
        return tuple((1 << u) | (1 << v) for u, v in self.edges)

    def vertex_set(self, names: Iterable[str]) -> int:
        try:
            return mask_of(self.vertex_index[x] for x in names)
        except KeyError as exc:
            raise GraphError(f"unknown vertex {exc.args[0]!r}") from None

    def edge_set(self, labels: Iterable[str]) -> int:
        try:
            return mask_of(self.edge_index[x] for x in labels)
        except KeyError as exc:
            raise GraphError(f"unknown edge {exc.args[0]!r}") from None

    def vertex_names_of(self, mask: int) -> list[str]:
        return [self.vertex_names[i] for i in bits(mask)]

    def edge_labels_of(self, mask: int) -> list[str]:
        return [self.edge_labels[i] for i in bits(mask)]

    # -- connectivity -------------------------------------------------

    def components(self, edge_mask: int | None = None, vertex_mask: int | None = None) -> list[int]:
        """Connected components (as vertex masks) of the subgraph with the given
        vertices and those edges of ``edge_mask`` lying inside ``vertex_mask``.
        Ordered by lowest vertex id."""
        if edge_mask is None:
            edge_mask = self.all_edges
        if vertex_mask is None:
            vertex_mask = self.all_vertices
        adj: dict[int, list[int]] = {v: [] for v in bits(vertex_mask)}
        for i in bits(edge_mask):
            u, v = self.edges[i]
            if u != v and u in adj and v in adj:
                adj[u].append(v)
                adj[v].append(u)
        seen = 0
        comps = []
        for start in adj:
            if seen >> start & 1:
                continue
            comp = 1 << start
            stack = [start]
            while stack:
                x = stack.pop()
                for y in adj[x]:
                    if not comp >> y & 1:
                        comp |= 1 << y
                        stack.append(y)
            seen |= comp
            comps.append(comp)
        return comps

    def is_connected(self, edge_mask: int | None = None) -> bool:
        return len(self.components(edge_mask)) == 1

    def is_connected_subset(self, w: int) -> bool:
        """Whether the induced subgraph on ``w`` is connected (empty: False)."""
        return w != 0 and len(self.components(None, w)) == 1

    # -- counts ---------------------------------------------------------

    def valence(self, s: int, w1: int, w2: int) -> int:
        """Number of edges of ``s`` joining ``w1`` to ``w2`` (disjoint sets)."""
        if w1 & w2:
            raise GraphError("valence needs disjoint vertex sets")
        count = 0
        for i in bits(s):
            u, v = self.edges[i]
            if (w1 >> u & 1 and w2 >> v & 1) or (w2 >> u & 1 and w1 >> v & 1):
                count += 1
        return count

    def val(self, w: int, s: int | None = None) -> int:
        """Valence of ``w`` against its complement, restricted to ``s``."""
        return self.valence(self.all_edges if s is None else s, w, self.all_vertices & ~w)

    def internal_edge_count(self, s: int, w: int) -> int:
        """Edges of ``s`` with both endpoints in ``w`` (loops included)."""
        count = 0
        for i in bits(s):
            if self.edge_masks[i] & ~w == 0:
                count += 1
        return count

    def internal_edges(self, w: int, s: int | None = None) -> int:
        s = self.all_edges if s is None else s
        return mask_of(i for i in bits(s) if self.edge_masks[i] & ~w == 0)

    def crossing_edges(self, w1: int, w2: int) -> int:
        out = 0
        for i, (u, v) in enumerate(self.edges):
            if (w1 >> u & 1 and w2 >> v & 1) or (w2 >> u & 1 and w1 >> v & 1):
                out |= 1 << i
        return out

    def induced_genus(self, w: int) -> int:
        """First Betti number of the induced subgraph on ``w``."""
        if not w:
            return 0
        e = self.internal_edge_count(self.all_edges, w)
        return e - popcount(w) + len(self.components(None, w))

    # -- biconnected subsets --------------------------------------------

    @cached_property
    def _biconnected(self) -> tuple[int, ...]:
        if not self.is_connected():
            raise GraphError("biconnected subsets need a connected graph")
        full = self.all_vertices
        out = []
        for w in range(1, full):
            if self.is_connected_subset(w) and self.is_connected_subset(full & ~w):
                out.append(w)
        return tuple(sorted(out, key=subset_key))

    def biconnected_subsets(self, cap: int | None = None) -> list[int]:
        """All nontrivial ``W`` with ``Γ[W]`` and ``Γ[W^c]`` connected."""
        check_cap(self, cap)
        return list(self._biconnected)

    @cached_property
    def biconnected_keys(self) -> tuple[int, ...]:
        """One side per complementary biconnected pair: the side holding vertex 0."""
        return tuple(w for w in self._biconnected if w & 1)


def default_cap() -> int:
    import os

    raw = os.environ.get("VSTAB_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise GraphError(f"VSTAB_CAP must be an integer, got {raw!r}") from None
    return 12


def check_cap(g: Multigraph, cap: int | None = None) -> None:
    cap = default_cap() if cap is None else cap
    if g.n_vertices > cap:
        raise CapExceeded(f"graph has {g.n_vertices} vertices, cap is {cap}")


def genus(g: Multigraph) -> int:
    return g.n_edges - g.n_vertices + len(g.components())


def valence(g: Multigraph, s: int, w1: int, w2: int) -> int:
    return g.valence(s, w1, w2)


def internal_edge_count(g: Multigraph, s: int, w: int) -> int:
    return g.internal_edge_count(s, w)


def biconnected_subsets(g: Multigraph, cap: int | None = None) -> list[int]:
    return g.biconnected_subsets(cap)


def delete_edges(g: Multigraph, s: int) -> Multigraph:
    """The spanning subgraph ``Γ∖S``.  Kept edges are renumbered in increasing
    order of their original ids; labels are preserved."""
    kept = [i for i in range(g.n_edges) if not s >> i & 1]
    return Multigraph(g.vertex_names, [g.edges[i] for i in kept], [g.edge_labels[i] for i in kept])


def kept_edge_ids(g: Multigraph, s: int) -> list[int]:
    """Original ids of the edges of ``delete_edges(g, s)``, in its edge order."""
    return [i for i in range(g.n_edges) if not s >> i & 1]


def sub_to_parent_mask(ids: Sequence[int], sub_mask: int) -> int:
    return mask_of(ids[i] for i in bits(sub_mask))


def parent_to_sub_mask(ids: Sequence[int], parent_mask: int) -> int:
    return mask_of(j for j, i in enumerate(ids) if parent_mask >> i & 1)


def induced_subgraph(g: Multigraph, w: int) -> tuple[Multigraph, list[int], list[int]]:
    """Induced subgraph on ``w`` with its vertex and edge id maps back to ``g``."""
    verts = bits(w)
    pos = {v: k for k, v in enumerate(verts)}
    eids = bits(g.internal_edges(w))
    sub = Multigraph(
        [g.vertex_names[v] for v in verts],
        [(pos[g.edges[i][0]], pos[g.edges[i][1]]) for i in eids],
        [g.edge_labels[i] for i in eids],
    )
    return sub, verts, eids


@dataclass(frozen=True, eq=False)
class GraphMorphism:
    """A contraction followed by a relabeling of the target.

    ``vertex_map[v]`` is the image of source vertex ``v``; ``edge_pullback[e']``
    is the source edge mapped onto target edge ``e'``.
    """

    source: Multigraph
    target: Multigraph
    contracted: int
    vertex_map: tuple[int, ...]
    edge_pullback: tuple[int, ...]

    def __post_init__(self):
        src, tgt = self.source, self.target
        if len(self.vertex_map) != src.n_vertices:
            raise GraphError("vertex map must cover every source vertex")
        if set(self.vertex_map) != set(range(tgt.n_vertices)):
            raise GraphError("vertex map must be surjective")
        if len(self.edge_pullback) != tgt.n_edges:
            raise GraphError("edge pullback must cover every target edge")
        image = mask_of(self.edge_pullback)
        if popcount(image) != tgt.n_edges or image & self.contracted:
            raise GraphError("edge pullback must be injective and avoid contracted edges")
        if image | self.contracted != src.all_edges:
            raise GraphError("every source edge is either contracted or pulled back")
        blocks = {}
        for comp in src.components(self.contracted):
            images = {self.vertex_map[v] for v in bits(comp)}
            if len(images) != 1:
                raise GraphError("contracted components must collapse to one vertex")
            (img,) = images
            if img in blocks:
                raise GraphError("distinct contracted components must stay distinct")
            blocks[img] = comp
        for j, i in enumerate(self.edge_pullback):
            u, v = src.edges[i]
            fu, fv = sorted((self.vertex_map[u], self.vertex_map[v]))
            if (fu, fv) != tgt.edges[j]:
                raise GraphError(f"edge {tgt.edge_labels[j]} does not match its pullback")

    @classmethod
    def identity(cls, g: Multigraph) -> "GraphMorphism":
        return cls(g, g, 0, tuple(range(g.n_vertices)), tuple(range(g.n_edges)))

    def preimage(self, w: int) -> int:
        """``f_V^{-1}(W)`` as a source vertex mask."""
        return mask_of(v for v, fv in enumerate(self.vertex_map) if w >> fv & 1)

    def pull_edges(self, s: int) -> int:
        """``f^E(S)`` for a target edge mask ``S``."""
        return mask_of(self.edge_pullback[j] for j in bits(s))

    def push_edges(self, s: int) -> int:
        """``(f^E)^{-1}(S)`` for a source edge mask ``S``."""
        return mask_of(j for j, i in enumerate(self.edge_pullback) if s >> i & 1)

    @property
    def image_edges(self) -> int:
        return mask_of(self.edge_pullback)

    def preserves_genus(self) -> bool:
        return genus(self.source) == genus(self.target)

    def then_relabel(self, perm: Sequence[int], edge_perm: Sequence[int] | None = None) -> "GraphMorphism":
        """Post-compose with an isomorphism of the target: vertex ``v`` goes to
        ``perm[v]`` and target edge ``j`` becomes edge ``edge_perm[j]``."""
        tgt = self.target
        n, m = tgt.n_vertices, tgt.n_edges
        edge_perm = list(range(m)) if edge_perm is None else list(edge_perm)
        names = [""] * n
        for v, pv in enumerate(perm):
            names[pv] = tgt.vertex_names[v]
        new_edges: list = [None] * m
        labels: list = [None] * m
        pull: list = [None] * m
        for j, pj in enumerate(edge_perm):
            u, v = tgt.edges[j]
            new_edges[pj] = (perm[u], perm[v])
            labels[pj] = tgt.edge_labels[j]
            pull[pj] = self.edge_pullback[j]
        new_tgt = Multigraph(names, new_edges, labels)
        return GraphMorphism(
            self.source, new_tgt, self.contracted,
            tuple(perm[x] for x in self.vertex_map), tuple(pull),
        )


def contract_edges(g: Multigraph, s: int) -> GraphMorphism:
    """The contraction ``Γ → Γ/S``.

    Target vertices are the components of ``(V, S)`` ordered by lowest source
    vertex, named by joining member names with ``+``.
    """
    comps = g.components(s)
    vmap = [0] * g.n_vertices
    names = []
    for k, comp in enumerate(comps):
        for v in bits(comp):
            vmap[v] = k
        names.append("+".join(g.vertex_names_of(comp)))
    pull = [i for i in range(g.n_edges) if not s >> i & 1]
    tgt = Multigraph(
        names,
        [(vmap[g.edges[i][0]], vmap[g.edges[i][1]]) for i in pull],
        [g.edge_labels[i] for i in pull],
    )
    return GraphMorphism(g, tgt, s, tuple(vmap), tuple(pull))
