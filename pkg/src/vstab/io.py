"""Line-oriented text formats for graphs, divisors, stabilities and tree functions."""

from __future__ import annotations

import re
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from .divisors import Divisor, format_divisor
from .errors import ParseError, StructureError
from .graph import Multigraph, genus
from .stability import Polarization, VStability

_SET = re.compile(r"^\{([^{}]*)\}$")


def _lines(text: str) -> Iterable[tuple[int, list[str]]]:
    for no, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line.split()


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


# -- graphs -------------------------------------------------------------------


def parse_graph(text: str) -> Multigraph:
    names: list[str] = []
    index: dict[str, int] = {}
    edges, labels = [], []

    def vertex(name: str) -> int:
        if name not in index:
            index[name] = len(names)
            names.append(name)
        return index[name]

    for no, tok in _lines(text):
        if tok[0] == "v":
            if len(tok) != 2:
                raise ParseError("expected 'v <name>'", no)
            vertex(tok[1])
        elif tok[0] == "e":
            if len(tok) != 4:
                raise ParseError("expected 'e <label> <u> <v>'", no)
            if tok[1] in labels:
                raise ParseError(f"duplicate edge label {tok[1]!r}", no)
            edges.append((vertex(tok[2]), vertex(tok[3])))
            labels.append(tok[1])
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", no)
    if not names:
        raise ParseError("graph has no vertices")
    return Multigraph(names, edges, labels)


def load_graph(path) -> Multigraph:
    return parse_graph(_read(path))


def format_graph(g: Multigraph) -> str:
    out = [f"v {name}" for name in g.vertex_names]
    for label, (u, v) in zip(g.edge_labels, g.edges):
        out.append(f"e {label} {g.vertex_names[u]} {g.vertex_names[v]}")
    return "\n".join(out) + "\n"


# -- divisors ----------------------------------------------------------------------


def _divisor_tokens(g: Multigraph, tokens: Sequence[str], no: int | None) -> Divisor:
    out = [0] * g.n_vertices
    for tok in tokens:
        name, sep, val = tok.partition("=")
        if not sep:
            raise ParseError(f"expected name=int, got {tok!r}", no)
        if name not in g.vertex_index:
            raise ParseError(f"unknown vertex {name!r}", no)
        try:
            out[g.vertex_index[name]] += int(val)
        except ValueError:
            raise ParseError(f"bad integer in {tok!r}", no) from None
    return tuple(out)


def parse_divisor(g: Multigraph, text: str) -> Divisor:
    found = None
    for no, tok in _lines(text):
        if tok[0] != "d":
            raise ParseError("expected 'd <name>=<int> ...'", no)
        if found is not None:
            raise ParseError("more than one divisor line", no)
        found = _divisor_tokens(g, tok[1:], no)
    if found is None:
        raise ParseError("no divisor line")
    return found


def format_divisor_line(g: Multigraph, d: Sequence[int]) -> str:
    return f"d {format_divisor(g, d)}"


# -- vertex and edge sets ----------------------------------------------------------------


def _parse_set(token: str, no: int) -> list[str]:
    m = _SET.match(token)
    if not m:
        raise ParseError(f"expected a braced set, got {token!r}", no)
    body = m.group(1).strip()
    return [x.strip() for x in body.split(",")] if body else []


def _split_set(tok: list[str], no: int) -> tuple[str, list[str]]:
    """Rejoin a braced set that may contain spaces; return it and the rest."""
    line = " ".join(tok[1:])
    end = line.find("}")
    if not line.startswith("{") or end < 0:
        raise ParseError("expected a braced set", no)
    return line[: end + 1].replace(" ", ""), line[end + 1:].split()


def _vertex_mask(g: Multigraph, names: list[str], no: int) -> int:
    mask = 0
    for x in names:
        if x not in g.vertex_index:
            raise ParseError(f"unknown vertex {x!r}", no)
        mask |= 1 << g.vertex_index[x]
    return mask


def _edge_mask(g: Multigraph, labels: list[str], no: int) -> int:
    mask = 0
    for x in labels:
        if x not in g.edge_index:
            raise ParseError(f"unknown edge {x!r}", no)
        mask |= 1 << g.edge_index[x]
    return mask


def parse_edge_labels(g: Multigraph, text: str) -> int:
    """``a,b,c`` or ``{a,b,c}`` to an edge mask."""
    text = text.strip()
    if not text.startswith("{"):
        text = "{" + text + "}"
    return _edge_mask(g, _parse_set(text, 0), 0)


# -- stabilities -------------------------------------------------------------------------


def parse_stability(g: Multigraph, text: str) -> VStability:
    degree = None
    given: dict[int, int] = {}
    for no, tok in _lines(text):
        if tok[0] == "degree":
            if len(tok) != 2:
                raise ParseError("expected 'degree <d>'", no)
            try:
                degree = int(tok[1])
            except ValueError:
                raise ParseError(f"bad degree {tok[1]!r}", no) from None
        elif tok[0] == "n":
            body, rest = _split_set(tok, no)
            if len(rest) != 1:
                raise ParseError("expected 'n {v,...} <int>'", no)
            w = _vertex_mask(g, _parse_set(body, no), no)
            try:
                x = int(rest[0])
            except ValueError:
                raise ParseError(f"bad integer {rest[0]!r}", no) from None
            if w in given and given[w] != x:
                raise ParseError("conflicting values for the same subset", no)
            given[w] = x
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", no)
    if degree is None:
        raise ParseError("missing 'degree <d>' line")
    bic = set(g.biconnected_subsets())
    for w in given:
        if w not in bic:
            raise StructureError("{" + ",".join(g.vertex_names_of(w)) + "} is not a nontrivial biconnected subset")
    return VStability.from_assignments(g, degree, given)


def load_stability(g: Multigraph, path) -> VStability:
    return parse_stability(g, _read(path))


def format_stability(n: VStability) -> str:
    g = n.graph
    out = [f"degree {n.degree}"]
    for w, x in n.items():
        out.append("n {" + ",".join(g.vertex_names_of(w)) + f"}} {x}")
    return "\n".join(out) + "\n"


# -- tree functions ----------------------------------------------------------------------


def parse_tree_function(g: Multigraph, text: str, degree: int | None = None):
    from .bdset import TreeFunction

    values = {}
    file_degree = None
    for no, tok in _lines(text):
        if tok[0] == "degree":
            try:
                file_degree = int(tok[1])
            except (IndexError, ValueError):
                raise ParseError("expected 'degree <d>'", no) from None
        elif tok[0] == "I":
            body, rest = _split_set(tok, no)
            t = _edge_mask(g, _parse_set(body, no), no)
            if t in values:
                raise ParseError("tree listed twice", no)
            values[t] = _divisor_tokens(g, rest, no)
        else:
            raise ParseError(f"unknown directive {tok[0]!r}", no)
    if not values:
        raise ParseError("no 'I' lines")
    if degree is not None and file_degree is not None and degree != file_degree:
        raise StructureError(f"file says degree {file_degree}, command line says {degree}")
    if degree is None:
        degree = file_degree
    if degree is None:
        degree = sum(next(iter(values.values()))) + genus(g)
    return TreeFunction(g, degree, values)


def load_tree_function(g: Multigraph, path, degree: int | None = None):
    return parse_tree_function(g, _read(path), degree)


def format_tree_function(i) -> str:
    g = i.graph
    out = [f"degree {i.degree}"]
    for t, d in i.values.items():
        out.append("I {" + ",".join(g.edge_labels_of(t)) + "} " + format_divisor(g, d))
    return "\n".join(out) + "\n"


def format_polarization(g: Multigraph, phi: Polarization) -> str:
    return " ".join(f"{name}={Fraction(x)}" for name, x in zip(g.vertex_names, phi.values))
