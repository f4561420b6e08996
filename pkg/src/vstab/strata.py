"""Invariants of fine V-compactified Jacobians read off the V-subset."""

from __future__ import annotations

from dataclasses import dataclass

from . import divisors as dv
from .graph import Multigraph, genus, popcount
from .orbits import OrbitPair, UpperSet, covers_above
from .spanning import genus_profile
from .stability import VStability, vset


@dataclass
class OrbitPosetReport:
    """Elements of ``P_n`` with their cover relations.

    ``order`` is ``"orbit"`` (cover pairs go from ``(G', D')`` up to ``(G, D)``
    with ``G ⊂ G'`` reversed, i.e. ``lower <= upper`` in the poset) or ``"face"``
    (the same pairs read as "``upper`` is a face of ``lower``").
    """

    upper_set: UpperSet
    elements: list[OrbitPair]
    covers: list[tuple[int, int]]
    dims: list[int]
    order: str = "orbit"

    def maximal(self) -> list[OrbitPair]:
        has_up = {a for a, _ in self.covers}
        return [e for k, e in enumerate(self.elements) if k not in has_up]

    def minimal(self) -> list[OrbitPair]:
        has_down = {b for _, b in self.covers}
        return [e for k, e in enumerate(self.elements) if k not in has_down]

    def top_cells(self) -> list[OrbitPair]:
        """Cells of largest dimension label."""
        top = max(self.dims)
        return [e for e, d in zip(self.elements, self.dims) if d == top]


def _report(p: UpperSet, order: str) -> OrbitPosetReport:
    g = p.graph
    elements = p.elements()
    index = {a: k for k, a in enumerate(elements)}
    covers = []
    for k, a in enumerate(elements):
        for b in covers_above(g, a):
            j = index.get(b)
            if j is not None:
                covers.append((k, j))
    covers.sort()
    dims = [g.n_edges - popcount(a.kept) for a in elements]
    return OrbitPosetReport(p, elements, covers, dims, order)


def orbit_poset(n: VStability) -> OrbitPosetReport:
    return _report(vset(n), "orbit")


def mumford_face_poset(n: VStability) -> OrbitPosetReport:
    """Cells ``θ_{G,D}`` indexed by ``P_n``; the faces of ``θ_{G,D}`` are the
    cells of elements above ``(G, D)``, and ``dim θ_{G,D} = |E(G)^c|``."""
    return _report(vset(n), "face")


def component_count(n: VStability) -> int:
    return len(vset(n).at(n.graph.all_edges))


def to_dot(rep: OrbitPosetReport) -> str:
    g = rep.upper_set.graph
    lines = [f"digraph {rep.order} {{"]
    for k, a in enumerate(rep.elements):
        labels = ",".join(g.edge_labels_of(a.kept))
        lines.append(f'  n{k} [label="{{{labels}}} | {dv.format_divisor(g, a.divisor)}" dim={rep.dims[k]}];')
    for a, b in rep.covers:
        # orbit closures point down, faces point up
        if rep.order == "orbit":
            lines.append(f"  n{b} -> n{a};")
        else:
            lines.append(f"  n{a} -> n{b};")
    lines.append("}")
    return "\n".join(lines)


class TwoVariablePolynomial:
    """Integer polynomial in ``q`` and ``L``; keys are ``(deg_q, deg_L)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[tuple[int, int], int] | None = None):
        self.coeffs = {k: v for k, v in (coeffs or {}).items() if v}

    @classmethod
    def const(cls, c: int) -> "TwoVariablePolynomial":
        return cls({(0, 0): c})

    @classmethod
    def q(cls) -> "TwoVariablePolynomial":
        return cls({(1, 0): 1})

    @classmethod
    def L(cls) -> "TwoVariablePolynomial":
        return cls({(0, 1): 1})

    def __add__(self, other):
        other = _lift(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0) + v
        return TwoVariablePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return TwoVariablePolynomial({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out: dict = {}
        for (a, b), x in self.coeffs.items():
            for (c, d), y in other.coeffs.items():
                out[(a + c, b + d)] = out.get((a + c, b + d), 0) + x * y
        return TwoVariablePolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = TwoVariablePolynomial.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, int):
            other = TwoVariablePolynomial.const(other)
        if not isinstance(other, TwoVariablePolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def evaluate(self, q, L):
        return sum(v * q**a * L**b for (a, b), v in self.coeffs.items())

    def __str__(self):
        if not self.coeffs:
            return "0"
        parts = []
        for (a, b), v in sorted(self.coeffs.items()):
            mono = "*".join(
                x for x in (
                    "" if a == 0 else ("q" if a == 1 else f"q^{a}"),
                    "" if b == 0 else ("L" if b == 1 else f"L^{b}"),
                ) if x
            )
            if not mono:
                term = str(abs(v))
            elif abs(v) == 1:
                term = mono
            else:
                term = f"{abs(v)}*{mono}"
            parts.append(("- " if v < 0 else "+ ") + term)
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self):
        return f"TwoVariablePolynomial({self})"


def _lift(x) -> TwoVariablePolynomial:
    return x if isinstance(x, TwoVariablePolynomial) else TwoVariablePolynomial.const(int(x))


@dataclass(frozen=True)
class GrothendieckClass:
    """``c(Γ) L^g`` times the class of the normalization's Jacobian, kept symbolic."""

    polynomial: TwoVariablePolynomial
    times_j0: bool = True

    def __str__(self):
        return f"({self.polynomial}) * [J0]" if self.times_j0 else str(self.polynomial)


def grothendieck_class(n: VStability) -> GrothendieckClass:
    g = n.graph
    count = component_count(n)
    return GrothendieckClass(TwoVariablePolynomial({(0, genus(g)): count}))


def perverse_graph_factor(g: Multigraph) -> TwoVariablePolynomial:
    """``Σ_h n_h (qL)^{g-h} ((1-q)(1-qL))^h``."""
    q, L = TwoVariablePolynomial.q(), TwoVariablePolynomial.L()
    b1 = genus(g)
    out = TwoVariablePolynomial()
    for h, nh in genus_profile(g).items():
        out = out + nh * (q * L) ** (b1 - h) * ((1 - q) * (1 - q * L)) ** h
    return out
