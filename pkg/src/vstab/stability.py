"""General V-stability conditions and their V-subsets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from . import divisors as dv
from .divisors import Divisor
from .errors import CapExceeded, DisconnectedGraphError, IntegrityError, InvalidStability, StructureError
from .graph import (
    GraphMorphism,
    Multigraph,
    bits,
    check_cap,
    delete_edges,
    genus,
    popcount,
)
from .orbits import UpperSet
from .ratlp import StrictSystem, solve_strict
from .spanning import connected_spanning_subgraphs, spanning_trees

ENUM_KEY_CAP = 40


class VStability:
    """Degree ``d`` plus one integer per complementary biconnected pair.

    Values are stored on the side containing vertex 0; the other side is
    ``d + 1 - val(W) - n_W``.  ``extra`` keeps any complement values that were
    supplied explicitly so that :func:`validate` can cross-check them.
    """

    __slots__ = ("graph", "degree", "values", "extra")

    def __init__(self, graph: Multigraph, degree: int, values: Mapping[int, int], extra: Mapping[int, int] | None = None):
        keys = set(graph.biconnected_keys)
        if set(values) != keys:
            missing = sorted(keys - set(values))
            unknown = sorted(set(values) - keys)
            parts = []
            if missing:
                parts.append("missing " + ", ".join(_fmt(graph, w) for w in missing))
            if unknown:
                parts.append("not a stored biconnected side: " + ", ".join(_fmt(graph, w) for w in unknown))
            raise StructureError("; ".join(parts))
        self.graph = graph
        self.degree = int(degree)
        self.values = {w: int(values[w]) for w in graph.biconnected_keys}
        self.extra = dict(extra or {})

    @classmethod
    def from_assignments(cls, graph: Multigraph, degree: int, assignments: Mapping[int, int]) -> "VStability":
        """Build from values on either side of each pair; a pair must be
        covered at least once, and doubly-listed pairs are kept for checking."""
        full = graph.all_vertices
        bic = set(graph._biconnected)
        values, extra = {}, {}
        for w, x in assignments.items():
            if w not in bic:
                raise StructureError(f"{_fmt(graph, w)} is not a nontrivial biconnected subset")
            if w & 1:
                values[w] = x
            else:
                extra[full & ~w] = x
        for wc, x in list(extra.items()):
            if wc not in values:
                values[wc] = degree + 1 - graph.val(wc) - x
                del extra[wc]
        return cls(graph, degree, values, extra)

    def value(self, w: int) -> int:
        if w in self.values:
            return self.values[w]
        wc = self.graph.all_vertices & ~w
        if wc in self.values:
            return self.degree + 1 - self.graph.val(wc) - self.values[wc]
        raise StructureError(f"{_fmt(self.graph, w)} is not a nontrivial biconnected subset")

    def items(self):
        return [(w, self.values[w]) for w in self.graph.biconnected_keys]

    def __eq__(self, other):
        if not isinstance(other, VStability):
            return NotImplemented
        return self.graph == other.graph and self.degree == other.degree and self.values == other.values

    def __hash__(self):
        return hash((self.degree, tuple(sorted(self.values.items()))))

    def __repr__(self):
        body = ", ".join(f"{_fmt(self.graph, w)}: {x}" for w, x in self.items())
        return f"VStability(degree={self.degree}, {{{body}}})"


def _fmt(g: Multigraph, w: int) -> str:
    return "{" + ",".join(g.vertex_names_of(w)) + "}"


@dataclass(frozen=True)
class Violation:
    kind: str
    subsets: tuple[int, ...]
    amount: int
    message: str


def _vstab2_triples(g: Multigraph) -> list[tuple[int, int, int]]:
    bic = g._biconnected
    bset = set(bic)
    full = g.all_vertices
    out = []
    for i, w1 in enumerate(bic):
        for w2 in bic[i + 1:]:
            if w1 & w2:
                continue
            u = w1 | w2
            if u != full and u in bset:
                out.append((w1, w2, u))
    return out


def validate(n: VStability) -> list[Violation]:
    g = n.graph
    if not g.is_connected():
        raise DisconnectedGraphError("V-stability needs a connected graph")
    out = []
    for wc, x in sorted(n.extra.items()):
        w = g.all_vertices & ~wc
        total = n.values[wc] + x
        want = n.degree + 1 - g.val(wc)
        if total != want:
            out.append(Violation(
                "Vstab1", (wc, w), total - want,
                f"n{_fmt(g, wc)} + n{_fmt(g, w)} = {total}, expected d + 1 - val = {want}",
            ))
    for w1, w2, u in _vstab2_triples(g):
        x = n.value(u) - n.value(w1) - n.value(w2) - g.valence(g.all_edges, w1, w2)
        if not -1 <= x <= 0:
            out.append(Violation(
                "Vstab2", (w1, w2, u), x,
                f"n{_fmt(g, u)} - n{_fmt(g, w1)} - n{_fmt(g, w2)} - val = {x}, outside [-1, 0]",
            ))
    return out


def require_valid(n: VStability) -> None:
    bad = validate(n)
    if bad:
        raise InvalidStability(bad[0].message)


# -- V-subsets ----------------------------------------------------------


def _box_bounds(n: VStability, s: int) -> list[tuple[int, int]]:
    """Per-vertex bounds on ``D_v`` from the connected-subset estimate with ``W = {v}``."""
    g = n.graph
    full = g.all_vertices
    out = []
    for v in range(g.n_vertices):
        w = 1 << v
        zs = g.components(None, full & ~w)
        k = len(zs)
        nz = sum(n.value(z) for z in zs)
        es = g.internal_edge_count(s, w)
        lo = n.degree - nz + k - g.val(w) - es
        hi = n.degree - g.val(w, s) - nz - es
        out.append((lo, hi))
    return out


def _stable_stratum_box(n: VStability, s: int) -> list[Divisor]:
    g = n.graph
    nv = g.n_vertices
    deg = n.degree - popcount(s)
    if nv == 1:
        return [(deg,)]
    bounds = _box_bounds(n, s)
    kept = g.all_edges & ~s
    # constraints become checkable once the highest vertex of W is placed
    checks: list[list[tuple[int, int, int]]] = [[] for _ in range(nv)]
    for w in g._biconnected:
        lo = n.value(w) - g.internal_edge_count(s, w)
        hi = n.value(w) - 1 + g.val(w, kept) - g.internal_edge_count(s, w)
        checks[w.bit_length() - 1].append((w, lo, hi))
    out = []
    d = [0] * nv

    def rec(v: int, partial: int):
        if v == nv - 1:
            x = deg - partial
            lo, hi = bounds[v]
            if not lo <= x <= hi:
                return
            d[v] = x
            if _passes(d, checks[v]):
                out.append(tuple(d))
            return
        lo, hi = bounds[v]
        for x in range(lo, hi + 1):
            d[v] = x
            if _passes(d, checks[v]):
                rec(v + 1, partial + x)

    rec(0, 0)
    return sorted(out)


def _passes(d, checks) -> bool:
    for w, lo, hi in checks:
        t = 0
        m = w
        while m:
            low = m & -m
            t += d[low.bit_length() - 1]
            m ^= low
        if not lo <= t <= hi:
            return False
    return True


def is_stable(n: VStability, kept: int, d: Sequence[int]) -> bool:
    """Membership of ``(Γ∖S, D)`` in ``P_n`` straight from the definition."""
    g = n.graph
    s = g.all_edges & ~kept
    if sum(d) != n.degree - popcount(s) or not g.is_connected(kept):
        return False
    return all(dv.restrict_sum(d, w) + g.internal_edge_count(s, w) >= n.value(w) for w in g._biconnected)


def vset(n: VStability, method: str = "box") -> UpperSet:
    """The V-subset ``P_n`` as an upper set of the connected orbit poset."""
    require_valid(n)
    g = n.graph
    if method == "bd":
        from .bdset import bd_upper_set, tree_function_from_vstability

        return bd_upper_set(tree_function_from_vstability(n))
    if method != "box":
        raise ValueError(f"unknown method {method!r}")
    strata = {}
    for kept in connected_spanning_subgraphs(g):
        strata[kept] = frozenset(_stable_stratum_box(n, g.all_edges & ~kept))
    return UpperSet(g, n.degree, strata)


# -- functoriality and translation ----------------------------------------


def restrict(n: VStability, s: int) -> VStability:
    g = n.graph
    if not g.is_connected(g.all_edges & ~s):
        raise DisconnectedGraphError("Γ∖S must be connected")
    sub = delete_edges(g, s)
    values = {w: n.value(w) - g.internal_edge_count(s, w) for w in sub.biconnected_keys}
    return VStability(sub, n.degree - popcount(s), values)


def pushforward(f: GraphMorphism, n: VStability) -> VStability:
    if n.graph != f.source:
        raise StructureError("stability lives on a different graph than the morphism source")
    values = {w: n.value(f.preimage(w)) for w in f.target.biconnected_keys}
    return VStability(f.target, n.degree, values)


def translate(n: VStability, d: Sequence[int]) -> VStability:
    if len(d) != n.graph.n_vertices:
        raise StructureError("divisor length does not match the graph")
    values = {w: x + dv.restrict_sum(d, w) for w, x in n.values.items()}
    return VStability(n.graph, n.degree + sum(d), values)


# -- canonical forms --------------------------------------------------------


def _subtree_sets(g: Multigraph, t: int) -> tuple[list[int | None], list[int]]:
    """Root ``t`` at vertex 0; return each vertex's parent and subtree mask."""
    nv = g.n_vertices
    adj: list[list[int]] = [[] for _ in range(nv)]
    for i in bits(t):
        u, v = g.edges[i]
        adj[u].append(v)
        adj[v].append(u)
    parent: list[int | None] = [None] * nv
    order = [0]
    seen = {0}
    for x in order:
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                parent[y] = x
                order.append(y)
    if len(order) != nv:
        raise StructureError("not a spanning tree")
    sub = [1 << v for v in range(nv)]
    for x in reversed(order[1:]):
        sub[parent[x]] |= sub[x]
    return parent, sub


def _check_tree(g: Multigraph, t: int) -> None:
    if popcount(t) != g.n_vertices - 1 or not g.is_connected(t) or t & g.loop_mask:
        raise StructureError("edge set is not a spanning tree")


def canonical_form(n: VStability, t: int | None = None) -> tuple[VStability, Divisor]:
    """The translate ``n + D`` of degree ``g(Γ)`` with ``ñ_W = g(Γ[W])`` whenever
    ``val_T(W) = 1``; the window on the remaining subsets is checked."""
    require_valid(n)
    g = n.graph
    t = spanning_trees(g)[0] if t is None else t
    _check_tree(g, t)
    parent, sub = _subtree_sets(g, t)
    target = [0] * g.n_vertices
    for v in range(g.n_vertices):
        w = sub[v]
        if v == 0:
            target[v] = genus(g) - n.degree
        else:
            target[v] = g.induced_genus(w) - n.value(w)
    d = list(target)
    for v in range(1, g.n_vertices):
        d[parent[v]] -= target[v]
    d = tuple(d)
    out = translate(n, d)
    for w in g._biconnected:
        vt = g.val(w, t)
        x = out.value(w) - g.induced_genus(w)
        if not -vt + 1 <= x <= vt - 1:
            raise IntegrityError(f"canonical form leaves the window at {_fmt(g, w)}: {x} with val_T = {vt}")
    return out, d


def equivalent_by_translation(n1: VStability, n2: VStability) -> Divisor | None:
    if n1.graph != n2.graph:
        raise StructureError("stabilities live on different graphs")
    t = spanning_trees(n1.graph)[0]
    c1, d1 = canonical_form(n1, t)
    c2, d2 = canonical_form(n2, t)
    if c1 != c2:
        return None
    d = dv.sub(d1, d2)
    if translate(n1, d) != n2:
        raise IntegrityError("translation witness does not map n1 to n2")
    return d


def _linear_forms(g: Multigraph, degree: int, keys: Sequence[int]):
    """``n_X = const + coef * n[key]`` for every biconnected ``X``."""
    idx = {w: i for i, w in enumerate(keys)}
    full = g.all_vertices
    forms = {}
    for x in g._biconnected:
        if x in idx:
            forms[x] = (0, 1, idx[x])
        else:
            forms[x] = (degree + 1 - g.val(full & ~x), -1, idx[full & ~x])
    return forms


def enumerate_up_to_translation(g: Multigraph, cap: int | None = None) -> list[VStability]:
    """One canonical V-stability of degree ``g(Γ)`` per translation class,
    relative to the lexicographically first spanning tree."""
    check_cap(g, cap)
    keys = list(g.biconnected_keys)
    if len(keys) > (ENUM_KEY_CAP if cap is None else max(cap, ENUM_KEY_CAP)):
        raise CapExceeded(f"{len(keys)} biconnected pairs exceed the enumeration cap")
    t = spanning_trees(g)[0]
    d = genus(g)
    nk = len(keys)
    lo0, hi0 = [], []
    for w in keys:
        base = g.induced_genus(w)
        vt = g.val(w, t)
        lo0.append(base - vt + 1)
        hi0.append(base + vt - 1)
    forms = _linear_forms(g, d, keys)
    # each Vstab2 triple is const + sum(c * n[k]) in [-1, 0] with c = ±1
    constraints = []
    watch: list[list[int]] = [[] for _ in keys]
    for w1, w2, u in _vstab2_triples(g):
        terms = [forms[u], forms[w1], forms[w2]]
        const = terms[0][0] - terms[1][0] - terms[2][0] - g.valence(g.all_edges, w1, w2)
        coefs: dict[int, int] = {}
        for sign, (_, c, k) in zip((1, -1, -1), terms):
            coefs[k] = coefs.get(k, 0) + sign * c
        coefs = {k: c for k, c in coefs.items() if c}
        ci = len(constraints)
        constraints.append((const, tuple(coefs.items())))
        for k in coefs:
            watch[k].append(ci)
    found = []
    vals: list[int | None] = [None] * nk

    def propagate(lo, hi, k) -> bool:
        # forward checking: tighten keys left alone in a constraint touching k
        for ci in watch[k]:
            const, coefs = constraints[ci]
            rest = None
            s = const
            for j, c in coefs:
                if vals[j] is None:
                    if rest is not None:
                        break
                    rest = (j, c)
                else:
                    s += c * vals[j]
            else:
                if rest is None:
                    if not -1 <= s <= 0:
                        return False
                    continue
                j, c = rest
                # -1 <= s + c x <= 0
                a, b = (-1 - s, -s) if c == 1 else (s, s + 1)
                lo[j] = max(lo[j], a)
                hi[j] = min(hi[j], b)
                if lo[j] > hi[j]:
                    return False
        return True

    def pick(lo, hi):
        best = None
        for j in range(nk):
            if vals[j] is None and (best is None or hi[j] - lo[j] < hi[best] - lo[best]):
                best = j
        return best

    def rec(lo, hi):
        k = pick(lo, hi)
        if k is None:
            found.append(VStability(g, d, dict(zip(keys, vals))))
            return
        for x in range(lo[k], hi[k] + 1):
            vals[k] = x
            nlo, nhi = list(lo), list(hi)
            nlo[k] = nhi[k] = x
            if propagate(nlo, nhi, k):
                rec(nlo, nhi)
        vals[k] = None

    rec(lo0, hi0)
    found.sort(key=lambda n: tuple(x for _, x in n.items()))
    for n in found:
        if validate(n):
            raise IntegrityError("enumerated stability fails validation")
    return found



# -- classical stabilities ----------------------------------------------------


@dataclass(frozen=True)
class Polarization:
    values: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(Fraction(x) for x in self.values))

    @property
    def total(self) -> Fraction:
        return sum(self.values, Fraction(0))

    def on(self, w: int) -> Fraction:
        return sum((self.values[v] for v in bits(w)), Fraction(0))


def from_polarization(g: Multigraph, phi: Polarization | Sequence) -> VStability:
    if not isinstance(phi, Polarization):
        phi = Polarization(tuple(phi))
    if len(phi.values) != g.n_vertices:
        raise StructureError("polarization length does not match the graph")
    total = phi.total
    if total.denominator != 1:
        raise InvalidStability(f"total degree {total} is not an integer")
    values = {}
    for w in g.biconnected_keys:
        x = phi.on(w) - Fraction(g.val(w), 2)
        if x.denominator == 1:
            raise InvalidStability(f"polarization is not general at {_fmt(g, w)}")
        values[w] = math.ceil(x)
    return VStability(g, int(total), values)


def classical_system(n: VStability) -> StrictSystem:
    g = n.graph
    sys = StrictSystem(g.n_vertices)
    sys.add_eq([1] * g.n_vertices, n.degree)
    for w, x in n.items():
        row = [1 if w >> v & 1 else 0 for v in range(g.n_vertices)]
        half = Fraction(g.val(w), 2)
        sys.add_gt(row, x - 1 + half)
        sys.add_lt(row, x + half)
    return sys


def is_classical(n: VStability) -> Polarization | None:
    require_valid(n)
    res = solve_strict(classical_system(n))
    if not res.feasible:
        return None
    phi = Polarization(tuple(res.point))
    if from_polarization(n.graph, phi) != n:
        raise IntegrityError("classical witness does not reproduce the stability")
    return phi
