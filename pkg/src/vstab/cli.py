"""``vstab`` command line.

Exit codes: 0 success or true, 1 false, 2 invalid stability, 3 parse or
structure error, 4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import sys

from . import io
from .bdset import bd_upper_set, is_numerical_N, verify_main_theorem
from .divisors import format_divisor
from .errors import CapExceeded, GraphError, IntegrityError, InvalidStability, ParseError, StructureError
from .graph import check_cap, genus
from .orbits import classify_type, format_upper_set
from .spanning import complexity, genus_profile
from .stability import canonical_form, enumerate_up_to_translation, is_classical, validate, vset
from .strata import component_count, grothendieck_class, orbit_poset, perverse_graph_factor, to_dot

EXIT_OK, EXIT_FALSE, EXIT_INVALID, EXIT_PARSE, EXIT_CAP = 0, 1, 2, 3, 4


class Report:
    """Ordered key/value pairs plus optional free-form blocks.

    Plain output prints ``key: value``; ``--structured`` prints ``key=value``
    and each block line as ``<block>[<i>]=<line>``.
    """

    def __init__(self, structured: bool):
        self.structured = structured
        self.out: list[str] = []

    def kv(self, key: str, value) -> None:
        if isinstance(value, bool):
            value = str(value).lower()
        self.out.append(f"{key}={value}" if self.structured else f"{key}: {value}")

    def block(self, name: str, lines: list[str]) -> None:
        if self.structured:
            self.out.extend(f"{name}[{k}]={line}" for k, line in enumerate(lines))
        else:
            self.out.append(f"{name}:")
            self.out.extend(f"  {line}" for line in lines)

    def emit(self, stream) -> None:
        for line in self.out:
            print(line, file=stream)


def _cap(args) -> int | None:
    return args.cap


def cmd_info(args, rep: Report) -> int:
    g = io.load_graph(args.graph)
    check_cap(g, _cap(args))
    rep.kv("vertices", g.n_vertices)
    rep.kv("edges", g.n_edges)
    rep.kv("genus", genus(g))
    rep.kv("connected", g.is_connected())
    if g.is_connected():
        rep.kv("complexity", complexity(g))
        prof = genus_profile(g)
        rep.kv("genus_profile", " ".join(f"{h}:{prof[h]}" for h in sorted(prof)))
        rep.kv("biconnected_pairs", len(g.biconnected_keys))
    return EXIT_OK


def _load_pair(args):
    g = io.load_graph(args.graph)
    check_cap(g, _cap(args))
    n = io.load_stability(g, args.stability)
    if args.degree is not None and args.degree != n.degree:
        raise StructureError(f"file says degree {n.degree}, command line says {args.degree}")
    return g, n


def _violations(n, rep: Report) -> int:
    bad = validate(n)
    if bad:
        rep.kv("valid", False)
        rep.block("violations", [f"{v.kind} {v.message}" for v in bad])
        return EXIT_INVALID
    return EXIT_OK


def cmd_validate(args, rep: Report) -> int:
    _, n = _load_pair(args)
    code = _violations(n, rep)
    if code == EXIT_OK:
        rep.kv("valid", True)
        rep.kv("degree", n.degree)
        rep.kv("pairs", len(n.values))
    return code


def cmd_classical(args, rep: Report) -> int:
    g, n = _load_pair(args)
    if _violations(n, rep):
        return EXIT_INVALID
    phi = is_classical(n)
    rep.kv("classical", phi is not None)
    if phi is None:
        rep.kv("certificate", "strict system infeasible: maximal common slack is not positive")
        return EXIT_FALSE
    rep.kv("phi", io.format_polarization(g, phi))
    return EXIT_OK


def cmd_verify(args, rep: Report) -> int:
    _, n = _load_pair(args)
    if _violations(n, rep):
        return EXIT_INVALID
    r = verify_main_theorem(n)
    for line in r.lines():
        key, _, value = line.partition(" ")
        rep.kv(key, value)
    return EXIT_OK if r.passed else EXIT_FALSE


def cmd_enumerate(args, rep: Report) -> int:
    g = io.load_graph(args.graph)
    reps = enumerate_up_to_translation(g, _cap(args))
    rep.kv("classes", len(reps))
    nonclassical = 0
    lines = []
    for k, n in enumerate(reps):
        classical = is_classical(n) is not None
        nonclassical += not classical
        body = " ".join("{" + ",".join(g.vertex_names_of(w)) + f"}}={x}" for w, x in n.items())
        lines.append(f"{k} classical={str(classical).lower()} {body}")
    rep.kv("nonclassical", nonclassical)
    rep.block("stabilities", lines)
    return EXIT_OK


def cmd_vset(args, rep: Report) -> int:
    _, n = _load_pair(args)
    if _violations(n, rep):
        return EXIT_INVALID
    p = vset(n)
    rep.kv("elements", len(p))
    rep.kv("top", len(p.at(n.graph.all_edges)))
    rep.block("orbits", format_upper_set(p))
    return EXIT_OK


def cmd_bdset(args, rep: Report) -> int:
    g = io.load_graph(args.graph)
    check_cap(g, _cap(args))
    i = io.load_tree_function(g, args.treefn, args.degree)
    p = bd_upper_set(i)
    numerical = is_numerical_N(i)
    rep.kv("degree", i.degree)
    rep.kv("elements", len(p))
    rep.kv("top", len(p.at(g.all_edges)))
    rep.kv("complexity", complexity(g))
    rep.kv("numerical_N", numerical)
    if numerical:
        t = classify_type(p)
        rep.kv("sN", t.sN)
    rep.block("orbits", format_upper_set(p))
    return EXIT_OK if numerical else EXIT_FALSE


def cmd_canonical(args, rep: Report) -> int:
    g, n = _load_pair(args)
    if _violations(n, rep):
        return EXIT_INVALID
    t = io.parse_edge_labels(g, args.tree) if args.tree else None
    c, d = canonical_form(n, t)
    rep.kv("shift", format_divisor(g, d))
    rep.block("canonical", io.format_stability(c).splitlines())
    return EXIT_OK


def cmd_strata(args, rep: Report) -> int:
    g, n = _load_pair(args)
    if _violations(n, rep):
        return EXIT_INVALID
    rep.kv("component_count", component_count(n))
    rep.kv("complexity", complexity(g))
    rep.kv("grothendieck_class", grothendieck_class(n))
    rep.kv("perverse_graph_factor", perverse_graph_factor(g))
    po = orbit_poset(n)
    rep.kv("orbits", len(po.elements))
    rep.kv("covers", len(po.covers))
    rep.block("dot", to_dot(po).splitlines())
    return EXIT_OK


COMMANDS = {
    "info": (cmd_info, ["graph"]),
    "validate": (cmd_validate, ["graph", "stability"]),
    "classical": (cmd_classical, ["graph", "stability"]),
    "verify": (cmd_verify, ["graph", "stability"]),
    "enumerate": (cmd_enumerate, ["graph"]),
    "vset": (cmd_vset, ["graph", "stability"]),
    "bdset": (cmd_bdset, ["graph", "treefn"]),
    "canonical": (cmd_canonical, ["graph", "stability"]),
    "strata": (cmd_strata, ["graph", "stability"]),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="vstab", description="V-stability conditions and break divisor sets on multigraphs")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, files) in COMMANDS.items():
        p = sub.add_parser(name)
        for f in files:
            p.add_argument(f)
        p.add_argument("--degree", type=int, default=None, help="expected degree (checked against the input)")
        p.add_argument("--tree", default=None, help="spanning tree as comma-separated edge labels")
        p.add_argument(
            "--cap", type=int, default=None,
            help="vertex cap for exponential enumerations (default: $VSTAB_CAP or 12)",
        )
        p.add_argument("--structured", action="store_true", help="emit key=value lines")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    rep = Report(args.structured)
    func = COMMANDS[args.command][0]
    try:
        code = func(args, rep)
    except CapExceeded as exc:
        rep.emit(sys.stdout)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except InvalidStability as exc:
        rep.emit(sys.stdout)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ParseError, StructureError, GraphError) as exc:
        rep.emit(sys.stdout)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except IntegrityError as exc:
        rep.emit(sys.stdout)
        print(f"internal check failed: {exc}", file=sys.stderr)
        return EXIT_FALSE
    rep.emit(sys.stdout)
    return code


if __name__ == "__main__":
    sys.exit(main())
