"""Test graphs, brute-force oracles and random instance builders.

The oracles only use ``Multigraph`` as a container; the builders at the end
go through the library on purpose.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations, combinations_with_replacement, permutations, product

from vstab import divisors as dv
from vstab.graph import GraphMorphism, Multigraph, contract_edges, popcount
from vstab.orbits import OrbitPair, covers_above, upward_closure


def vine(t: int) -> Multigraph:
    return Multigraph(["u", "v"], [(0, 1)] * t, [f"e{i}" for i in range(t)])


def triangle() -> Multigraph:
    return Multigraph(["a", "b", "c"], [(0, 1), (1, 2), (0, 2)], ["ab", "bc", "ac"])


def theta() -> Multigraph:
    return Multigraph(["u", "v"], [(0, 1)] * 3, ["a", "b", "c"])


def cycle(n: int) -> Multigraph:
    names = [chr(ord("a") + i) for i in range(n)]
    edges = [(i, (i + 1) % n) for i in range(n)]
    return Multigraph(names, edges, [names[u] + names[v] for u, v in edges])


def path(n: int) -> Multigraph:
    names = [chr(ord("a") + i) for i in range(n)]
    return Multigraph(names, [(i, i + 1) for i in range(n - 1)])


def star_tree() -> Multigraph:
    return Multigraph(list("abcd"), [(0, 1), (1, 2), (1, 3)], ["ab", "bc", "bd"])


def msa_not() -> Multigraph:
    labels = ["13", "35", "24", "45", "16", "26", "14", "23"]
    return Multigraph(
        [str(i) for i in range(1, 7)],
        [(int(a) - 1, int(b) - 1) for a, b in labels],
        ["e" + x for x in labels],
    )


MSA_ZERO = [{1, 4, 5}, {2, 3, 5}, {3, 4, 5}, {2, 4, 6}, {1, 3, 6}]
MSA_ONE = [{1, 3, 5}, {2, 4, 5}, {2, 3, 6}, {1, 4, 6}, {1, 2, 6}]


def msa_offset(members: set[int]) -> int:
    """``n_W - g(Γ[W])`` for the degree-4 stability on the msa-not graph."""
    if len(members) <= 2 or members in MSA_ZERO:
        return 0
    if len(members) >= 4 or members in MSA_ONE:
        return 1
    raise KeyError(members)


def corpus() -> dict[str, Multigraph]:
    return {
        "vine2": vine(2),
        "vine3": vine(3),
        "vine4": vine(4),
        "triangle": triangle(),
        "cycle4": cycle(4),
        "tree": star_tree(),
        "msa_not": msa_not(),
    }


# -- oracles ------------------------------------------------------------------


def bf_connected(n: int, edges, kept) -> bool:
    adj = {v: set() for v in range(n)}
    for i in kept:
        u, v = edges[i]
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    return len(seen) == n


def bf_spanning_trees(g: Multigraph) -> list[int]:
    out = []
    for combo in combinations(range(g.n_edges), g.n_vertices - 1):
        if any(g.edges[i][0] == g.edges[i][1] for i in combo):
            continue
        if bf_connected(g.n_vertices, g.edges, combo):
            out.append(sum(1 << i for i in combo))
    return sorted(out)


def bf_indegree_set(g: Multigraph, s: int) -> set[tuple[int, ...]]:
    ids = [i for i in range(g.n_edges) if s >> i & 1]
    out = set()
    for choice in product((0, 1), repeat=len(ids)):
        d = [0] * g.n_vertices
        for i, c in zip(ids, choice):
            d[g.edges[i][c]] += 1
        out.add(tuple(d))
    return out


def bf_leq(g: Multigraph, a, b) -> bool:
    if a.kept & ~b.kept:
        return False
    diff = tuple(x - y for x, y in zip(b.divisor, a.divisor))
    return diff in bf_indegree_set(g, b.kept & ~a.kept)


def bf_biconnected(g: Multigraph) -> set[int]:
    n = g.n_vertices
    full = (1 << n) - 1
    out = set()
    for w in range(1, full):
        ok = True
        for side in (w, full & ~w):
            verts = [v for v in range(n) if side >> v & 1]
            remap = {v: k for k, v in enumerate(verts)}
            sub = [(remap[u], remap[v]) for u, v in g.edges if u in remap and v in remap]
            if not bf_connected(len(verts), sub, range(len(sub))):
                ok = False
        if ok:
            out.add(w)
    return out


def laplacian_rows(g: Multigraph) -> list[list[int]]:
    n = g.n_vertices
    q = [[0] * n for _ in range(n)]
    for u, v in g.edges:
        if u != v:
            q[u][u] += 1
            q[v][v] += 1
            q[u][v] -= 1
            q[v][u] -= 1
    return q


def fraction_inverse(m: list[list[int]]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        p = next(r for r in range(c, n) if a[r][c] != 0)
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def chip_firing_class_count(g: Multigraph) -> int:
    """``|Z^{n-1} / Q Z^{n-1}|`` as the size of the subgroup of ``(Q/Z)^{n-1}``
    generated by the columns of ``Q^{-1}``, with ``Q`` the reduced Laplacian."""
    n = g.n_vertices
    if n == 1:
        return 1
    lap = laplacian_rows(g)
    red = [row[1:] for row in lap[1:]]
    inv = fraction_inverse(red)
    gens = [tuple(inv[r][c] % 1 for r in range(n - 1)) for c in range(n - 1)]
    zero = tuple(Fraction(0) for _ in range(n - 1))
    seen = {zero}
    frontier = [zero]
    while frontier:
        nxt = []
        for x in frontier:
            for gvec in gens:
                y = tuple((a + b) % 1 for a, b in zip(x, gvec))
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return len(seen)


def all_small_graphs(max_v: int = 4, max_e: int = 6):
    """Connected multigraphs (loops and parallel edges allowed) on ``1..max_v``
    vertices with at most ``max_e`` edges, one per isomorphism class."""
    out = []
    for n in range(1, max_v + 1):
        slots = [(u, v) for u in range(n) for v in range(u, n)]
        seen = set()
        perms = list(permutations(range(n)))
        for m in range(0, max_e + 1):
            for multiset in combinations_with_replacement(slots, m):
                if not bf_connected(n, multiset, range(m)):
                    continue
                canon = min(
                    tuple(sorted(tuple(sorted((p[u], p[v]))) for u, v in multiset)) for p in perms
                )
                if canon in seen:
                    continue
                seen.add(canon)
                out.append(Multigraph.from_edge_list(n, list(multiset)))
    return out


def bf_stable_divisors(n, kept: int, box: int = 6) -> set[tuple[int, ...]]:
    """Stable divisors on ``Γ∖S`` by scanning a wide integer box."""
    g = n.graph
    s = g.all_edges & ~kept
    deg = n.degree - bin(s).count("1")
    out = set()
    nv = g.n_vertices
    for head in product(range(-box, box + 1), repeat=nv - 1):
        d = head + (deg - sum(head),)
        ok = True
        for w in bf_biconnected(g):
            dw = sum(d[v] for v in range(nv) if w >> v & 1)
            es = sum(1 for i in range(g.n_edges) if s >> i & 1 and all(w >> x & 1 for x in g.edges[i]))
            if dw + es < n.value(w):
                ok = False
                break
        if ok:
            out.add(d)
    return out


def fm_strict_feasible(n_vars: int, eqs, strict) -> bool:
    """Fourier-Motzkin with strictness flags.  Rows are ``(coeffs, rhs, strict)``
    meaning ``a x < b`` (strict) or ``a x <= b``; equalities are split."""
    rows = []
    for a, b in eqs:
        rows.append(([Fraction(x) for x in a], Fraction(b), False))
        rows.append(([-Fraction(x) for x in a], -Fraction(b), False))
    for a, b, sense in strict:
        if sense == "<":
            rows.append(([Fraction(x) for x in a], Fraction(b), True))
        else:
            rows.append(([-Fraction(x) for x in a], -Fraction(b), True))
    for k in range(n_vars):
        pos = [r for r in rows if r[0][k] > 0]
        neg = [r for r in rows if r[0][k] < 0]
        rest = [r for r in rows if r[0][k] == 0]
        for ap, bp, sp in pos:
            for an, bn, sn in neg:
                fp, fn = ap[k], -an[k]
                a = [x * fn + y * fp for x, y in zip(ap, an)]
                b = bp * fn + bn * fp
                rest.append((a, b, sp or sn))
        rows = rest
    for _, b, s in rows:
        if (s and not 0 < b) or (not s and not 0 <= b):
            return False
    return True


def msa_stability():
    from vstab.stability import VStability

    g = msa_not()
    values = {}
    for w in g.biconnected_keys:
        members = {v + 1 for v in range(6) if w >> v & 1}
        side = members if len(members) <= 3 else set(range(1, 7)) - members
        if side is members:
            values[w] = g.induced_genus(w) + msa_offset(members)
        else:
            wc = g.all_vertices & ~w
            values[w] = 4 + 1 - g.val(w) - (g.induced_genus(wc) + msa_offset(side))
    return VStability(g, 4, values)


def random_polarization(g: Multigraph, degree: int, rng) -> list[Fraction]:
    """Rational values with denominator 97 summing to ``degree``; general with high probability."""
    phi = [Fraction(rng.randint(-300, 300), 97) for _ in range(g.n_vertices - 1)]
    phi.append(degree - sum(phi, Fraction(0)))
    return phi


def bf_valid(g: Multigraph, degree: int, value) -> bool:
    """Both stability axioms from scratch; ``value(W)`` is defined on every biconnected W."""
    full = (1 << g.n_vertices) - 1
    bic = bf_biconnected(g)

    def val(w):
        return sum(1 for u, v in g.edges if (w >> u & 1) != (w >> v & 1))

    def cross(a, b):
        return sum(1 for u, v in g.edges if (a >> u & 1 and b >> v & 1) or (b >> u & 1 and a >> v & 1))

    for w in bic:
        if value(w) + value(full & ~w) != degree + 1 - val(w):
            return False
    for w1 in bic:
        for w2 in bic:
            u = w1 | w2
            if w1 & w2 or u == full or u not in bic:
                continue
            x = value(u) - value(w1) - value(w2) - cross(w1, w2)
            if not -1 <= x <= 0:
                return False
    return True


# -- random instances and negative controls --------------------------------------


def random_element(g: Multigraph, d: int, rng: random.Random) -> OrbitPair:
    kept = rng.randrange(1 << g.n_edges) if g.n_edges else 0
    deg = d - (g.n_edges - popcount(kept))
    div = [rng.randint(-1, 2) for _ in range(g.n_vertices)]
    div[rng.randrange(g.n_vertices)] += deg - sum(div)
    return OrbitPair(kept, tuple(div))


def random_above(g: Multigraph, a: OrbitPair, rng: random.Random, steps: int) -> OrbitPair:
    for _ in range(steps):
        ups = list(covers_above(g, a))
        if not ups:
            break
        a = rng.choice(ups)
    return a


def random_morphism(g: Multigraph, rng: random.Random) -> GraphMorphism:
    s = 0
    for i in range(g.n_edges):
        if rng.random() < 0.35:
            s |= 1 << i
    f = contract_edges(g, s)
    n = f.target.n_vertices
    perm = list(range(n))
    rng.shuffle(perm)
    eperm = list(range(f.target.n_edges))
    rng.shuffle(eperm)
    return f.then_relabel(perm, eperm)


def cycle_six_tops():
    """An upper set on the 3-cycle with six top divisors, two in each class."""
    tri = Multigraph(["v0", "v1", "v2"], [(0, 1), (1, 2), (0, 2)], ["a", "b", "c"])
    d0 = (1, 0, 0)
    steps = [(0, 0, 1), (0, 0, 1), (1, 1, 2), (1, 1, 2), (2, 2, 0), (2, 2, 0)]  # (edge, tail, head)
    tree_level = []
    p = d0
    for e, u, v in steps:
        tree_level.append(OrbitPair(tri.all_edges & ~(1 << e), dv.sub(p, dv.unit(tri, u))))
        p = dv.add(dv.sub(p, dv.unit(tri, u)), dv.unit(tri, v))
    assert p == d0
    return tri, upward_closure(tri, 1, tree_level)


def brute_translation_classes(g: Multigraph, width: int = 3) -> int:
    """Valid degree-g(Γ) stabilities in a box, grouped by degree-0 translation."""
    keys = sorted(w for w in bf_biconnected(g) if w & 1)
    full = (1 << g.n_vertices) - 1
    d = len(g.edges) - g.n_vertices + 1

    def val(w):
        return sum(1 for u, v in g.edges if (w >> u & 1) != (w >> v & 1))
    valid = set()
    for vals in product(range(-width, width + 1), repeat=len(keys)):
        table = dict(zip(keys, vals))

        def value(w, table=table):
            if w in table:
                return table[w]
            return d + 1 - val(full & ~w) - table[full & ~w]

        if bf_valid(g, d, value):
            valid.add(vals)
    parent = {v: v for v in valid}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    moves = []
    for head in product(range(-2 * width, 2 * width + 1), repeat=g.n_vertices - 1):
        shift = (-sum(head),) + head
        moves.append(tuple(sum(shift[v] for v in range(g.n_vertices) if w >> v & 1) for w in keys))
    for v in valid:
        for mv in moves:
            u = tuple(a + b for a, b in zip(v, mv))
            if u in parent:
                parent[find(u)] = find(v)
    return len({find(v) for v in valid})


def random_connected_multigraph(rng: random.Random, max_v: int = 5, max_e: int = 8, loops: bool = True) -> Multigraph:
    n = rng.randint(1, max_v)
    edges = [(rng.randrange(v), v) for v in range(1, n)]
    for _ in range(rng.randint(0, max_e - len(edges))):
        u, v = rng.randrange(n), rng.randrange(n)
        if u == v and not loops:
            continue
        edges.append((min(u, v), max(u, v)))
    rng.shuffle(edges)
    return Multigraph.from_edge_list(n, edges)
