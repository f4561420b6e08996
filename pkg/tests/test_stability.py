import random
from fractions import Fraction

import pytest
from conftest import connected_multigraphs
from helpers import (
    bf_stable_divisors,
    brute_translation_classes,
    bf_valid,
    cycle,
    msa_not,
    msa_stability,
    random_polarization,
    star_tree,
    triangle,
    vine,
)
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from vstab import divisors as dv
from vstab.errors import CapExceeded, DisconnectedGraphError, InvalidStability, StructureError
from vstab.graph import Multigraph, contract_edges, delete_edges, genus, kept_edge_ids, sub_to_parent_mask
from vstab.orbits import classify_type, is_upper_set
from vstab.orbits import pushforward as push_pair
from vstab.spanning import complexity, connected_spanning_subgraphs, spanning_trees
from vstab.stability import (
    Polarization,
    VStability,
    canonical_form,
    enumerate_up_to_translation,
    equivalent_by_translation,
    from_polarization,
    is_classical,
    is_stable,
    pushforward,
    restrict,
    translate,
    validate,
    vset,
)


def vine_stab(t: int, d: int, n1: int) -> VStability:
    return VStability(vine(t), d, {0b01: n1})


def random_stability(g: Multigraph, rng: random.Random) -> VStability:
    """A random translate of a random canonical class."""
    classes = enumerate_up_to_translation(g)
    n = rng.choice(classes)
    return translate(n, tuple(rng.randint(-2, 2) for _ in range(g.n_vertices)))


# -- validation ---------------------------------------------------------------


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_vine_pairs_are_valid(t):
    for d in range(-2, 3):
        for n1 in range(-3, 4):
            n = vine_stab(t, d, n1)
            assert validate(n) == []
            assert n.value(0b01) + n.value(0b10) == d + 1 - t


def test_vine_inconsistent_pair():
    g = vine(2)
    n = VStability.from_assignments(g, 0, {0b01: 0, 0b10: 0})
    bad = validate(n)
    assert [v.kind for v in bad] == ["Vstab1"]
    assert bad[0].amount == 1
    with pytest.raises(InvalidStability):
        vset(n)


def test_complement_only_assignment_is_derived():
    g = vine(3)
    n = VStability.from_assignments(g, 1, {0b10: 2})
    assert n.value(0b01) == 1 + 1 - 3 - 2
    assert validate(n) == []


def test_missing_and_unknown_keys():
    tri = triangle()
    with pytest.raises(StructureError):
        VStability(tri, 1, {0b001: 0})
    with pytest.raises(StructureError):
        VStability(tri, 1, {0b001: 0, 0b011: 0, 0b101: 0, 0b111: 0})
    with pytest.raises(StructureError):
        VStability.from_assignments(tri, 1, {0b111: 0})


def test_vstab2_violation_reports_witnesses():
    tri = triangle()
    n = VStability(tri, 1, {0b001: 0, 0b011: 3, 0b101: 0})
    bad = validate(n)
    assert bad and all(v.kind == "Vstab2" for v in bad)
    assert any(0b011 in v.subsets for v in bad)


def test_validate_needs_connected_graph():
    g = Multigraph(list("ab"), [])
    n = VStability.__new__(VStability)
    n.graph, n.degree, n.values, n.extra = g, 0, {}, {}
    with pytest.raises(DisconnectedGraphError):
        validate(n)


def test_msa_not_example():
    n = msa_stability()
    g = n.graph
    assert genus(g) == 3
    assert validate(n) == []
    assert bf_valid(g, 4, n.value)
    p = vset(n)
    assert len(p.at(g.all_edges)) == complexity(g) == 36
    assert is_classical(n) is None


# -- V-subsets ----------------------------------------------------------------


@pytest.mark.parametrize("t", [1, 2, 3, 5])
def test_vine_vset_shape(t):
    for d in (-1, 0, 2):
        for n1 in (-3, 0, 3):
            n = vine_stab(t, d, n1)
            n2 = n.value(0b10)
            top = vset(n).at(vine(t).all_edges)
            assert top == sorted((n1 + a, n2 + t - 1 - a) for a in range(t))


def test_tree_vset_single_divisor():
    g = star_tree()
    n = enumerate_up_to_translation(g)[0]
    p = vset(n)
    assert len(p) == 1 and len(p.at(g.all_edges)) == 1


@settings(max_examples=25)
@given(connected_multigraphs(max_v=4, max_e=5), st.randoms(use_true_random=False))
def test_vset_box_bd_and_bruteforce_agree(g, rng):
    n = random_stability(g, rng)
    box = vset(n)
    assert box == vset(n, method="bd")
    assert is_upper_set(box)
    for kept in connected_spanning_subgraphs(g):
        s = g.all_edges & ~kept
        got = set(box.at(kept))
        assert got == bf_stable_divisors(n, kept, box=5)
        assert len(got) == complexity(delete_edges(g, s))
        for d in got:
            assert is_stable(n, kept, d)
            # both sides of the sandwich
            for w in g.biconnected_subsets():
                dw = dv.restrict_sum(d, w) + g.internal_edge_count(s, w)
                assert n.value(w) <= dw <= n.value(w) - 1 + g.val(w, kept)
    assert classify_type(box).all_true()


def test_disconnected_strata_are_empty():
    n = vine_stab(2, 1, 0)
    p = vset(n)
    assert p.at(0) == []
    assert not is_stable(n, 0, (0, 0))


def test_vset_unknown_method():
    with pytest.raises(ValueError):
        vset(vine_stab(2, 0, 0), method="nope")


# -- functoriality and translation ----------------------------------------------


def test_restrict_vine():
    n = vine_stab(3, 2, 1)
    r = restrict(n, 0b100)
    assert r.graph == delete_edges(vine(3), 0b100)
    assert r.degree == 1 and r.values == {0b01: 1}
    assert restrict(n, 0) == n
    with pytest.raises(DisconnectedGraphError):
        restrict(n, 0b111)


@settings(max_examples=25)
@given(connected_multigraphs(max_v=4, max_e=6), st.randoms(use_true_random=False))
def test_restriction_consistency(g, rng):
    n = random_stability(g, rng)
    p = vset(n)
    subs = connected_spanning_subgraphs(g)
    kept = rng.choice(subs)
    s = g.all_edges & ~kept
    r = restrict(n, s)
    assert validate(r) == []
    ids = kept_edge_ids(g, s)
    q = vset(r)
    for sub_kept in connected_spanning_subgraphs(r.graph):
        assert q.at(sub_kept) == p.at(sub_to_parent_mask(ids, sub_kept))


def test_pushforward_triangle_to_vine():
    tri = triangle()
    n = VStability(tri, 1, {0b001: 0, 0b011: 0, 0b101: 0})
    assert validate(n) == []
    f = contract_edges(tri, 0b001)
    m = pushforward(f, n)
    assert m.graph.n_vertices == 2 and m.degree == 1
    # the target vertex holding a and b pulls back to {a, b}
    w = 1 << f.vertex_map[0]
    assert m.value(w) == n.value(0b011)
    assert validate(m) == []


@settings(max_examples=25)
@given(connected_multigraphs(max_v=4, max_e=6), st.randoms(use_true_random=False))
def test_pushforward_maps_vsets(g, rng):
    n = random_stability(g, rng)
    s = 0
    for i in range(g.n_edges):
        if rng.random() < 0.4:
            s |= 1 << i
    f = contract_edges(g, s)
    m = pushforward(f, n)
    assert m.degree == n.degree and validate(m) == []
    target = vset(m)
    for a in vset(n).elements():
        assert push_pair(f, a) in target


@settings(max_examples=25)
@given(connected_multigraphs(max_v=4, max_e=6), st.randoms(use_true_random=False))
def test_translation_shifts_vsets(g, rng):
    n = random_stability(g, rng)
    d = tuple(rng.randint(-3, 3) for _ in range(g.n_vertices))
    m = translate(n, d)
    assert m.degree == n.degree + sum(d) and validate(m) == []
    assert translate(m, tuple(-x for x in d)) == n
    assert translate(n, (0,) * g.n_vertices) == n
    p, q = vset(n), vset(m)
    for kept in connected_spanning_subgraphs(g):
        assert q.at(kept) == sorted(dv.add(x, d) for x in p.at(kept))
    assert equivalent_by_translation(n, m) == d


# -- canonical forms and enumeration ------------------------------------------------


@pytest.mark.parametrize("t", [1, 2, 3, 4, 5])
def test_vine_canonical_and_single_class(t):
    n = vine_stab(t, 3, -2)
    c, d = canonical_form(n)
    assert c.degree == t - 1 and c.values == {0b01: 0}
    assert translate(n, d) == c
    assert len(enumerate_up_to_translation(vine(t))) == 1


def test_tree_single_class():
    g = star_tree()
    classes = enumerate_up_to_translation(g)
    assert len(classes) == 1
    rng = random.Random(1)
    for _ in range(5):
        n = translate(classes[0], tuple(rng.randint(-3, 3) for _ in range(4)))
        assert canonical_form(n)[0] == classes[0]


@settings(max_examples=25)
@given(connected_multigraphs(max_v=4, max_e=6), st.randoms(use_true_random=False))
def test_canonical_form_is_idempotent_and_tree_independent_in_class(g, rng):
    n = random_stability(g, rng)
    trees = spanning_trees(g)
    t = rng.choice(trees)
    c, _ = canonical_form(n, t)
    assert c.degree == genus(g)
    again, d0 = canonical_form(c, t)
    assert again == c and d0 == (0,) * g.n_vertices
    m = translate(n, tuple(rng.randint(-2, 2) for _ in range(g.n_vertices)))
    assert canonical_form(m, t)[0] == c


def test_canonical_rejects_non_tree():
    tri = triangle()
    n = VStability(tri, 1, {0b001: 0, 0b011: 0, 0b101: 0})
    with pytest.raises(StructureError):
        canonical_form(n, 0b111)


def test_triangle_class_count_matches_brute_force():
    classes = enumerate_up_to_translation(triangle())
    assert len(classes) == brute_translation_classes(triangle()) == 2


def test_enumeration_outputs_are_inequivalent():
    for g in (triangle(), cycle(4)):
        classes = enumerate_up_to_translation(g)
        for i, a in enumerate(classes):
            assert validate(a) == []
            for b in classes[i + 1:]:
                assert equivalent_by_translation(a, b) is None


def test_msa_not_enumeration_contains_example():
    classes = enumerate_up_to_translation(msa_not())
    c, _ = canonical_form(msa_stability(), spanning_trees(msa_not())[0])
    assert c in classes
    assert enumerate_up_to_translation(msa_not()) == classes


def test_enumeration_cap():
    g = Multigraph.from_edge_list(7, [(i, j) for i in range(7) for j in range(i + 1, 7)])
    with pytest.raises(CapExceeded):
        enumerate_up_to_translation(g)


def test_vset_is_injective_on_classes():
    for g in (triangle(), cycle(4), Multigraph.from_edge_list(4, [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)])):
        classes = enumerate_up_to_translation(g)
        seen = {}
        for n in classes:
            key = frozenset(vset(n).strata.items())
            assert key not in seen
            seen[key] = n


# -- classical stabilities -----------------------------------------------------


def test_vine_polarization_example():
    n = from_polarization(vine(2), [Fraction(1, 3), Fraction(-1, 3)])
    assert n.degree == 0
    assert n.value(0b01) == 0 and n.value(0b10) == -1


def test_polarization_errors():
    with pytest.raises(InvalidStability):
        from_polarization(vine(2), [1, -1])
    with pytest.raises(InvalidStability):
        from_polarization(vine(2), [Fraction(1, 3), Fraction(1, 3)])
    with pytest.raises(StructureError):
        from_polarization(vine(2), [0, 0, 0])


@given(st.sampled_from(["vine2", "vine3", "triangle", "cycle4", "msa"]), st.integers(-3, 5),
       st.randoms(use_true_random=False))
def test_polarization_round_trip_and_covariance(name, d, rng):
    g = {"vine2": vine(2), "vine3": vine(3), "triangle": triangle(), "cycle4": cycle(4), "msa": msa_not()}[name]
    phi = random_polarization(g, d, rng)
    try:
        n = from_polarization(g, phi)
    except InvalidStability:
        assume(False)
    assert validate(n) == [] and n.degree == d
    w = is_classical(n)
    assert isinstance(w, Polarization) and w.total == d
    assert from_polarization(g, w) == n
    shift = tuple(rng.randint(-2, 2) for _ in range(g.n_vertices))
    moved = [a + b for a, b in zip(phi, shift)]
    assert from_polarization(g, moved) == translate(n, shift)


@pytest.mark.parametrize("t", [1, 2, 3, 4])
def test_vine_stabilities_are_classical(t):
    for n1 in range(-3, 4):
        assert is_classical(vine_stab(t, 1, n1)) is not None


def test_triangle_and_cycle_classes_are_classical():
    for g in (triangle(), cycle(4)):
        for n in enumerate_up_to_translation(g):
            assert is_classical(n) is not None
