"""The poset of divisors on spanning subgraphs and its upper subsets."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import divisors as dv
from .divisors import Divisor
from .errors import GraphError, VStabError
from .graph import GraphMorphism, Multigraph, bits, delete_edges, popcount
from .spanning import complexity, connected_spanning_subgraphs


@dataclass(frozen=True, order=True)
class OrbitPair:
    """A spanning subgraph (mask of kept edges) carrying a divisor."""

    kept: int
    divisor: Divisor

    def rank(self) -> int:
        return popcount(self.kept)


def ambient_degree(g: Multigraph, a: OrbitPair) -> int:
    """``d`` with ``|D| = d - |E(G)^c|``."""
    return sum(a.divisor) + g.n_edges - popcount(a.kept)


def leq(g: Multigraph, a: OrbitPair, b: OrbitPair) -> bool:
    """``a <= b``: ``G_a ⊆ G_b`` and ``D_b - D_a`` is an indegree divisor of ``G_b - G_a``."""
    if ambient_degree(g, a) != ambient_degree(g, b):
        raise GraphError("orbit pairs of different degrees are not comparable")
    if a.kept & ~b.kept:
        return False
    return dv.is_indegree_realizable(g, b.kept & ~a.kept, dv.sub(b.divisor, a.divisor))


def covers_above(g: Multigraph, a: OrbitPair) -> Iterator[OrbitPair]:
    """Elements covering ``a``: add one edge and one chip at an endpoint."""
    seen = set()
    for i in range(g.n_edges):
        if a.kept >> i & 1:
            continue
        u, v = g.edges[i]
        for h in {u, v}:
            b = OrbitPair(a.kept | 1 << i, dv.add(a.divisor, dv.unit(g, h)))
            if b not in seen:
                seen.add(b)
                yield b


def covers_below(g: Multigraph, b: OrbitPair) -> Iterator[OrbitPair]:
    seen = set()
    for i in bits(b.kept):
        u, v = g.edges[i]
        for h in {u, v}:
            a = OrbitPair(b.kept & ~(1 << i), dv.sub(b.divisor, dv.unit(g, h)))
            if a not in seen:
                seen.add(a)
                yield a


def pushforward(f: GraphMorphism, a: OrbitPair) -> OrbitPair:
    """Push ``(Γ∖S, D)`` along ``f``; contracted deleted edges inside a fibre
    add one chip each to that fibre's image."""
    src, tgt = f.source, f.target
    s = src.all_edges & ~a.kept
    extra = s & f.contracted
    out = [0] * tgt.n_vertices
    for v, fv in enumerate(f.vertex_map):
        out[fv] += a.divisor[v]
    for i in bits(extra):
        out[f.vertex_map[src.edges[i][0]]] += 1
    kept_tgt = tgt.all_edges & ~f.push_edges(s)
    return OrbitPair(kept_tgt, tuple(out))


def lift(f: GraphMorphism, target: OrbitPair) -> OrbitPair:
    """A preimage of ``target`` under ``pushforward(f, ·)``: keep the pulled-back
    edges plus every contracted edge and place each value on one fibre vertex."""
    src = f.source
    s = f.pull_edges(f.target.all_edges & ~target.kept)
    d = [0] * src.n_vertices
    placed = set()
    for v, fv in enumerate(f.vertex_map):
        if fv not in placed:
            placed.add(fv)
            d[v] = target.divisor[fv]
    return OrbitPair(src.all_edges & ~s, tuple(d))


def _orientation_between(g: Multigraph, s: int, d: Divisor) -> dict[int, int] | None:
    """Heads of an orientation of ``s`` with indegree divisor ``d``, if any."""
    # small search; the flow test decides existence, this recovers a witness
    if not dv.is_indegree_realizable(g, s, d):
        return None
    heads: dict[int, int] = {}
    remaining = list(d)
    for i in bits(s & g.loop_mask):
        remaining[g.edges[i][0]] -= 1
    todo = bits(s & ~g.loop_mask)
    for k, i in enumerate(todo):
        u, v = g.edges[i]
        rest = 0
        for j in todo[k + 1:]:
            rest |= 1 << j
        for h in (u, v):
            trial = list(remaining)
            trial[h] -= 1
            if trial[h] >= 0 and dv.is_indegree_realizable(g, rest, trial):
                heads[i] = h
                remaining = trial
                break
        else:
            raise AssertionError("orientation witness lost")
    return heads


def upper_lift(f: GraphMorphism, a: OrbitPair, b_target: OrbitPair) -> OrbitPair:
    """Given ``a`` with ``f(a) <= b_target``, build ``b >= a`` with ``f(b) = b_target``."""
    src, tgt = f.source, f.target
    fa = pushforward(f, a)
    added_tgt = b_target.kept & ~fa.kept
    heads_tgt = _orientation_between(tgt, added_tgt, dv.sub(b_target.divisor, fa.divisor))
    if heads_tgt is None:
        raise GraphError("f(a) is not below the requested target element")
    extra = [0] * src.n_vertices
    for j in bits(added_tgt):
        i = f.edge_pullback[j]
        u, v = src.edges[i]
        if tgt.loop_mask >> j & 1:
            # loop downstairs: both ends lie in one fibre, either one will do
            extra[u] += 1
            continue
        h = heads_tgt[j]
        extra[u if f.vertex_map[u] == h else v] += 1
    return OrbitPair(a.kept | f.pull_edges(added_tgt), dv.add(a.divisor, extra))


@dataclass
class UpperSet:
    """A subset of the connected orbit poset, stored stratum by stratum."""

    graph: Multigraph
    degree: int
    strata: dict[int, frozenset[Divisor]] = field(default_factory=dict)

    def __post_init__(self):
        self.strata = {k: frozenset(v) for k, v in self.strata.items() if v}

    def __contains__(self, a: OrbitPair) -> bool:
        return a.divisor in self.strata.get(a.kept, ())

    def __len__(self) -> int:
        return sum(len(v) for v in self.strata.values())

    def __eq__(self, other):
        if not isinstance(other, UpperSet):
            return NotImplemented
        return self.graph == other.graph and self.degree == other.degree and self.strata == other.strata

    def at(self, kept: int) -> list[Divisor]:
        return sorted(self.strata.get(kept, ()))

    def elements(self) -> list[OrbitPair]:
        return sorted(
            (OrbitPair(k, d) for k, ds in self.strata.items() for d in ds),
            key=lambda a: (-popcount(a.kept), tuple(bits(a.kept)), a.divisor),
        )

    @classmethod
    def from_elements(cls, g: Multigraph, degree: int, elements: Iterable[OrbitPair]) -> "UpperSet":
        strata: dict[int, set] = {}
        for a in elements:
            if ambient_degree(g, a) != degree:
                raise GraphError("element degree does not match the upper set")
            strata.setdefault(a.kept, set()).add(a.divisor)
        return cls(g, degree, strata)


def upward_closure(g: Multigraph, degree: int, elements: Iterable[OrbitPair]) -> UpperSet:
    found = set()
    queue = deque()
    for a in elements:
        if a not in found:
            found.add(a)
            queue.append(a)
    while queue:
        a = queue.popleft()
        for b in covers_above(g, a):
            if b not in found:
                found.add(b)
                queue.append(b)
    return UpperSet.from_elements(g, degree, found)


def is_upper_set(p: UpperSet) -> bool:
    """Closed under covers (hence under ``leq``, which covers generate), with
    every member on a connected spanning subgraph."""
    g = p.graph
    for a in p.elements():
        if not g.is_connected(a.kept):
            return False
        if ambient_degree(g, a) != p.degree:
            return False
        for b in covers_above(g, a):
            if b not in p:
                return False
    return True


@dataclass(frozen=True)
class TypeReport:
    sN: bool
    numerical_sN: bool
    N: bool
    numerical_N: bool

    def all_true(self) -> bool:
        return self.sN and self.numerical_sN and self.N and self.numerical_N


def _bijects_onto_pic(g: Multigraph, kept: int, divs: list[Divisor]) -> bool:
    sub = delete_edges(g, g.all_edges & ~kept)
    c = complexity(sub)
    if len(divs) != c:
        return False
    reduced = {dv.q_reduce(sub, d, 0) for d in divs}
    return len(reduced) == c


def classify_type(p: UpperSet) -> TypeReport:
    if not is_upper_set(p):
        raise VStabError("classify_type needs an upper set")
    g = p.graph
    full = g.all_edges
    subs = connected_spanning_subgraphs(g)
    numerical_sN = True
    sN = True
    for kept in subs:
        divs = p.at(kept)
        c = complexity(delete_edges(g, full & ~kept))
        if len(divs) != c:
            numerical_sN = False
            sN = False
        elif sN and not _bijects_onto_pic(g, kept, divs):
            sN = False
    top = p.at(full)
    numerical_N = len(top) == complexity(g)
    N = numerical_N and _bijects_onto_pic(g, full, top)
    rep = TypeReport(sN, numerical_sN, N, numerical_N)
    # sN ⇒ {numerical sN, N} ⇒ numerical N
    if (sN and not (numerical_sN and N)) or ((numerical_sN or N) and not numerical_N):
        raise AssertionError(f"type implications violated: {rep}")
    return rep


def format_upper_set(p: UpperSet) -> list[str]:
    g = p.graph
    lines = []
    for a in p.elements():
        labels = ",".join(g.edge_labels_of(a.kept))
        lines.append(f"orbit {{{labels}}} | {dv.format_divisor(g, a.divisor)}")
    return lines
