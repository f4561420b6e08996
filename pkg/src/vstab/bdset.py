"""Tree functions and their generalized break divisor sets."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Mapping

from . import divisors as dv
from .divisors import Divisor
from .errors import DisconnectedGraphError, GraphError, IntegrityError, InvalidStability, StructureError
from .graph import GraphMorphism, Multigraph, bits, contract_edges, delete_edges, genus, kept_edge_ids, parent_to_sub_mask, sub_to_parent_mask
from .orbits import OrbitPair, UpperSet, _orientation_between, classify_type, is_upper_set, pushforward as push_pair
from .spanning import complexity, connected_spanning_subgraphs, morphism_tree_pullback, spanning_trees
from .stability import VStability, _subtree_sets, require_valid, validate, vset


class TreeFunction:
    """A divisor of degree ``d - b1(Γ)`` attached to every spanning tree."""

    __slots__ = ("graph", "degree", "values")

    def __init__(self, graph: Multigraph, degree: int, values: Mapping[int, Divisor]):
        trees = spanning_trees(graph)
        if set(values) != set(trees):
            raise StructureError("a tree function needs exactly one value per spanning tree")
        want = degree - genus(graph)
        for t, d in values.items():
            if len(d) != graph.n_vertices:
                raise StructureError("divisor length does not match the graph")
            if sum(d) != want:
                raise StructureError(
                    f"value on tree {{{','.join(graph.edge_labels_of(t))}}} has degree {sum(d)}, expected {want}"
                )
        self.graph = graph
        self.degree = degree
        self.values = {t: tuple(values[t]) for t in trees}

    def __call__(self, t: int) -> Divisor:
        return self.values[t]

    def __eq__(self, other):
        if not isinstance(other, TreeFunction):
            return NotImplemented
        return self.graph == other.graph and self.degree == other.degree and self.values == other.values

    def __repr__(self):
        return f"TreeFunction(degree={self.degree}, trees={len(self.values)})"


def random_tree_function(g: Multigraph, degree: int, rng: random.Random, spread: int = 1) -> TreeFunction:
    """Each tree gets an independent divisor of the right degree near zero."""
    want = degree - genus(g)
    values = {}
    for t in spanning_trees(g):
        d = [rng.randint(-spread, spread) for _ in range(g.n_vertices)]
        d[rng.randrange(g.n_vertices)] += want - sum(d)
        values[t] = tuple(d)
    return TreeFunction(g, degree, values)


def bd_set(i: TreeFunction, kept: int) -> list[Divisor]:
    """``BD_I(G)``: the union of ``I(T) + D(G - T)`` over trees ``T ⊆ G``."""
    g = i.graph
    if not g.is_connected(kept):
        raise DisconnectedGraphError("BD-sets live on connected spanning subgraphs")
    out = set()
    for t, base in i.values.items():
        if t & ~kept:
            continue
        for extra in dv.indegree_set(g, kept & ~t):
            out.add(dv.add(base, extra))
    return sorted(out)


def bd_upper_set(i: TreeFunction) -> UpperSet:
    g = i.graph
    strata = {kept: frozenset(bd_set(i, kept)) for kept in connected_spanning_subgraphs(g)}
    return UpperSet(g, i.degree, strata)


def restrict_tree_function(i: TreeFunction, s: int) -> TreeFunction:
    g = i.graph
    if not g.is_connected(g.all_edges & ~s):
        raise DisconnectedGraphError("Γ∖S must be connected")
    sub = delete_edges(g, s)
    ids = kept_edge_ids(g, s)
    values = {}
    for t, d in i.values.items():
        if not t & s:
            values[parent_to_sub_mask(ids, t)] = d
    return TreeFunction(sub, i.degree - bin(s).count("1"), values)


def pushforward_tree_function(f: GraphMorphism, i: TreeFunction) -> TreeFunction:
    if i.graph != f.source:
        raise StructureError("tree function lives on a different graph than the morphism source")
    pull = morphism_tree_pullback(f)
    values = {}
    for t_tgt, t_src in pull.items():
        values[t_tgt] = push_pair(f, OrbitPair(t_src, i(t_src))).divisor
    return TreeFunction(f.target, i.degree, values)


def contraction_edges(g: Multigraph) -> list[int]:
    """Edges that are neither loops nor bridges."""
    out = []
    for e in range(g.n_edges):
        if g.loop_mask >> e & 1:
            continue
        if g.is_connected(g.all_edges & ~(1 << e)):
            out.append(e)
    return out


def _heredity_failures(i: TreeFunction) -> list[str]:
    g = i.graph
    bad = []
    for kept in connected_spanning_subgraphs(g):
        c = complexity(delete_edges(g, g.all_edges & ~kept))
        if len(bd_set(i, kept)) != c:
            bad.append("restriction to {" + ",".join(g.edge_labels_of(kept)) + "}")
    for e in contraction_edges(g):
        f = contract_edges(g, 1 << e)
        j = pushforward_tree_function(f, i)
        if len(bd_set(j, j.graph.all_edges)) != complexity(j.graph):
            bad.append(f"contraction of {g.edge_labels[e]}")
    return bad


def is_numerical_N(i: TreeFunction, check_heredity: bool = True) -> bool:
    g = i.graph
    size = len(bd_set(i, g.all_edges))
    c = complexity(g)
    if size < c:
        raise IntegrityError(f"|BD_I| = {size} is below the complexity {c}")
    if size != c:
        return False
    if check_heredity:
        bad = _heredity_failures(i)
        if bad:
            raise IntegrityError("numerical N-type not inherited: " + "; ".join(bad))
    return True


# -- the bijection with V-stabilities -------------------------------------------


def tree_function_from_vstability(n: VStability) -> TreeFunction:
    """``I_n(T)``: subtree sums ``n_W - b1(Γ[W])`` over the sides of each tree edge."""
    require_valid(n)
    g = n.graph
    b1 = genus(g)
    values = {}
    for t in spanning_trees(g):
        parent, sub = _subtree_sets(g, t)
        target = [0] * g.n_vertices
        for v in range(g.n_vertices):
            w = sub[v]
            target[v] = n.degree - b1 if v == 0 else n.value(w) - g.induced_genus(w)
        d = list(target)
        for v in range(1, g.n_vertices):
            d[parent[v]] -= target[v]
        for v in range(1, g.n_vertices):
            w = sub[v]
            wc = g.all_vertices & ~w
            if dv.restrict_sum(d, w) != n.value(w) - g.induced_genus(w):
                raise IntegrityError("tree function misses a subtree sum")
            if dv.restrict_sum(d, wc) != n.value(wc) - g.induced_genus(wc):
                raise IntegrityError("tree function misses a complementary subtree sum")
        values[t] = tuple(d)
    return TreeFunction(g, n.degree, values)


def adapted_trees(g: Multigraph, w: int) -> list[int]:
    """Spanning trees with exactly one edge across ``W``: a tree of ``Γ[W]``,
    a tree of ``Γ[W^c]`` and one crossing edge."""
    return [t for t in spanning_trees(g) if g.val(w, t) == 1]


def vstability_from_tree_function(i: TreeFunction, check: bool = True) -> VStability:
    if check and not is_numerical_N(i):
        raise InvalidStability("tree function is not of numerical N-type")
    g = i.graph
    values = {}
    for w in g.biconnected_keys:
        seen = {dv.restrict_sum(i(t), w) + g.induced_genus(w) for t in adapted_trees(g, w)}
        if len(seen) != 1:
            raise IntegrityError(
                "adapted trees disagree on {" + ",".join(g.vertex_names_of(w)) + f"}}: {sorted(seen)}"
            )
        values[w] = seen.pop()
    n = VStability(g, i.degree, values)
    bad = validate(n)
    if bad:
        raise IntegrityError("recovered stability is invalid: " + bad[0].message)
    return n


@dataclass
class MainTheoremReport:
    degree: int
    strata_checked: int = 0
    mismatches: list[str] = field(default_factory=list)
    sN: bool = False
    numerical_sN: bool = False
    N: bool = False
    numerical_N: bool = False
    round_trip: bool = False
    component_count: int = 0
    complexity: int = 0

    @property
    def passed(self) -> bool:
        return (
            not self.mismatches
            and self.sN and self.numerical_sN and self.N and self.numerical_N
            and self.round_trip
            and self.component_count == self.complexity
        )

    def lines(self) -> list[str]:
        out = [
            f"strata_checked {self.strata_checked}",
            f"strata_mismatches {len(self.mismatches)}",
        ]
        out += [f"mismatch {m}" for m in self.mismatches]
        out += [
            f"sN {str(self.sN).lower()}",
            f"numerical_sN {str(self.numerical_sN).lower()}",
            f"N {str(self.N).lower()}",
            f"numerical_N {str(self.numerical_N).lower()}",
            f"round_trip {str(self.round_trip).lower()}",
            f"component_count {self.component_count}",
            f"complexity {self.complexity}",
            f"result {'pass' if self.passed else 'fail'}",
        ]
        return out


def verify_main_theorem(n: VStability) -> MainTheoremReport:
    g = n.graph
    rep = MainTheoremReport(n.degree)
    p = vset(n)
    i = tree_function_from_vstability(n)
    for kept in connected_spanning_subgraphs(g):
        rep.strata_checked += 1
        if p.at(kept) != bd_set(i, kept):
            rep.mismatches.append("{" + ",".join(g.edge_labels_of(kept)) + "}")
    if is_upper_set(p):
        t = classify_type(p)
        rep.sN, rep.numerical_sN, rep.N, rep.numerical_N = t.sN, t.numerical_sN, t.N, t.numerical_N
    else:
        rep.mismatches.append("V-subset is not an upper set")
    try:
        rep.round_trip = vstability_from_tree_function(i) == n
    except (IntegrityError, InvalidStability) as exc:
        rep.mismatches.append(f"round trip: {exc}")
    rep.component_count = len(p.at(g.all_edges))
    rep.complexity = complexity(g)
    return rep


# -- lemmas on restriction and morphisms -------------------------------------------


def restriction_agrees(i: TreeFunction, s: int) -> bool:
    """``BD_{I_{Γ∖S}}(G) = BD_I(G)`` for every connected ``G ⊆ Γ∖S``."""
    g = i.graph
    j = restrict_tree_function(i, s)
    ids = kept_edge_ids(g, s)
    for kept_sub in connected_spanning_subgraphs(j.graph):
        if bd_set(j, kept_sub) != bd_set(i, sub_to_parent_mask(ids, kept_sub)):
            return False
    return True


@dataclass
class MorphismBDStats:
    inclusion: bool
    strata: int
    equal_strata: int


def morphism_inclusion(f: GraphMorphism, i: TreeFunction) -> MorphismBDStats:
    """Compare ``BD_{f_*I}`` with the push-forward of ``BD_I``, stratum by stratum."""
    j = pushforward_tree_function(f, i)
    pushed: dict[int, set] = {}
    for kept in connected_spanning_subgraphs(f.source):
        for d in bd_set(i, kept):
            b = push_pair(f, OrbitPair(kept, d))
            pushed.setdefault(b.kept, set()).add(b.divisor)
    inclusion = True
    equal = 0
    strata = connected_spanning_subgraphs(f.target)
    for kept in strata:
        mine = set(bd_set(j, kept))
        theirs = pushed.get(kept, set())
        if not mine <= theirs:
            inclusion = False
        if mine == theirs:
            equal += 1
    return MorphismBDStats(inclusion, len(strata), equal)


@dataclass
class InjectionDiagnostic:
    edge: int
    deletion_size: int
    contraction_size: int
    total_size: int
    disjoint: bool


def deletion_contraction_injection(i: TreeFunction, e: int) -> InjectionDiagnostic:
    """Build ``+u`` and the shifted lift from ``Γ/e`` and check their images are disjoint."""
    g = i.graph
    if e not in contraction_edges(g):
        raise GraphError("edge must be neither a loop nor a bridge")
    u, v = g.edges[e]
    full = g.all_edges
    top = set(bd_set(i, full))
    dele = restrict_tree_function(i, 1 << e)
    plus_u = {dv.add(d, dv.unit(g, u)) for d in bd_set(dele, dele.graph.all_edges)}
    f = contract_edges(g, 1 << e)
    j = pushforward_tree_function(f, i)
    pull = morphism_tree_pullback(f)
    lifted = set()
    shift = dv.sub(dv.unit(g, v), dv.unit(g, u))
    for d in bd_set(j, f.target.all_edges):
        base = None
        for t_tgt, t_src in pull.items():
            heads = _orientation_between(f.target, f.target.all_edges & ~t_tgt, dv.sub(d, j(t_tgt)))
            if heads is None:
                continue
            extra = [0] * g.n_vertices
            for jj in bits(f.target.all_edges & ~t_tgt):
                x, y = g.edges[f.edge_pullback[jj]]
                if f.target.loop_mask >> jj & 1:
                    extra[x] += 1
                else:
                    extra[x if f.vertex_map[x] == heads[jj] else y] += 1
            base = dv.add(i(t_src), extra)
            break
        if base is None or base not in top:
            raise IntegrityError("lift from the contraction left the BD-set")
        k = 0
        while dv.add(base, tuple(x * (k + 1) for x in shift)) in top:
            k += 1
        lifted.add(dv.add(base, tuple(x * k for x in shift)))
    disjoint = not (plus_u & lifted)
    return InjectionDiagnostic(e, len(plus_u), len(lifted), len(top), disjoint)
