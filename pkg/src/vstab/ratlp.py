"""Exact rational feasibility of systems with strict inequalities.

Everything runs on :class:`fractions.Fraction`; there is no floating point.
An open polyhedron ``{x : A_eq x = b_eq, a_i x < b_i, ...}`` is nonempty iff
the LP ``max t  s.t.  a_i x + t <= b_i,  t <= 1`` has a positive optimum.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

Rational = Fraction

LT, GT = "<", ">"


@dataclass
class StrictSystem:
    n_vars: int
    equalities: list[tuple[list[Fraction], Fraction]] = field(default_factory=list)
    strict: list[tuple[list[Fraction], Fraction, str]] = field(default_factory=list)

    def add_eq(self, row: Sequence, rhs) -> None:
        self._check(row)
        self.equalities.append(([Fraction(x) for x in row], Fraction(rhs)))

    def add_lt(self, row: Sequence, rhs) -> None:
        self._check(row)
        self.strict.append(([Fraction(x) for x in row], Fraction(rhs), LT))

    def add_gt(self, row: Sequence, rhs) -> None:
        self._check(row)
        self.strict.append(([Fraction(x) for x in row], Fraction(rhs), GT))

    def _check(self, row):
        if len(row) != self.n_vars:
            raise ValueError(f"row has {len(row)} entries, system has {self.n_vars} variables")

    def satisfied_by(self, x: Sequence[Fraction]) -> bool:
        for row, rhs in self.equalities:
            if _dot(row, x) != rhs:
                return False
        for row, rhs, sense in self.strict:
            val = _dot(row, x)
            if (sense == LT and not val < rhs) or (sense == GT and not val > rhs):
                return False
        return True


@dataclass
class StrictResult:
    point: list[Fraction] | None
    slack: Fraction

    @property
    def feasible(self) -> bool:
        return self.point is not None


def _dot(row, x):
    return sum((a * b for a, b in zip(row, x)), Fraction(0))


class Infeasible(Exception):
    pass


class Unbounded(Exception):
    pass


def _pivot(tab, basis, r, c):
    prow = tab[r]
    p = prow[c]
    nz = [j for j, v in enumerate(prow) if v]
    for j in nz:
        prow[j] = prow[j] / p
    # the tableau is sparse; only touch columns where the pivot row is nonzero
    for i, row in enumerate(tab):
        if i != r:
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
    basis[r] = c


def _simplex(tab, basis, n_cols, allowed):
    """Maximize the objective in the last row of ``tab`` (stored as ``-c``),
    entering only columns in ``allowed``.  Bland's rule throughout."""
    obj = tab[-1]
    while True:
        obj = tab[-1]
        enter = next((j for j in range(n_cols) if j in allowed and obj[j] < 0), None)
        if enter is None:
            return
        best = None
        leave = None
        for i in range(len(tab) - 1):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            raise Unbounded()
        _pivot(tab, basis, leave, enter)


def maximize(c: Sequence, a_ub: Sequence[Sequence], b_ub: Sequence, a_eq=(), b_eq=()) -> tuple[Fraction, list[Fraction]]:
    """``max c·y`` over ``y >= 0`` with ``a_ub y <= b_ub`` and ``a_eq y = b_eq``.

    Two-phase tableau simplex; raises :class:`Infeasible` or :class:`Unbounded`.
    """
    n = len(c)
    rows = [([Fraction(v) for v in r], Fraction(b), "le") for r, b in zip(a_ub, b_ub)]
    rows += [([Fraction(v) for v in r], Fraction(b), "eq") for r, b in zip(a_eq, b_eq)]
    # normalize to nonnegative rhs
    norm = []
    for r, b, kind in rows:
        if b < 0:
            r, b = [-v for v in r], -b
            kind = {"le": "ge", "eq": "eq"}[kind]
        norm.append((r, b, kind))
    n_slack = sum(1 for _, _, k in norm if k in ("le", "ge"))
    n_art = sum(1 for _, _, k in norm if k in ("ge", "eq"))
    n_cols = n + n_slack + n_art
    tab = []
    basis = []
    si = n
    ai = n + n_slack
    art_cols = set()
    for r, b, kind in norm:
        row = r + [Fraction(0)] * (n_slack + n_art) + [b]
        if kind == "le":
            row[si] = Fraction(1)
            basis.append(si)
            si += 1
        elif kind == "ge":
            row[si] = Fraction(-1)
            si += 1
            row[ai] = Fraction(1)
            basis.append(ai)
            art_cols.add(ai)
            ai += 1
        else:
            row[ai] = Fraction(1)
            basis.append(ai)
            art_cols.add(ai)
            ai += 1
        tab.append(row)
    real_cols = set(range(n + n_slack))
    if art_cols:
        # phase one: maximize -sum(artificials)
        obj = [Fraction(0)] * (n_cols + 1)
        for j in art_cols:
            obj[j] = Fraction(1)
        for i, bcol in enumerate(basis):
            if bcol in art_cols:
                obj = [o - v for o, v in zip(obj, tab[i])]
        tab.append(obj)
        _simplex(tab, basis, n_cols, real_cols | art_cols)
        if tab[-1][-1] != 0:
            raise Infeasible()
        tab.pop()
        # drive remaining artificials out of the basis
        for i, bcol in enumerate(list(basis)):
            if bcol in art_cols:
                j = next((j for j in sorted(real_cols) if tab[i][j] != 0), None)
                if j is not None:
                    _pivot(tab, basis, i, j)
    obj = [Fraction(0)] * (n_cols + 1)
    for j in range(n):
        obj[j] = -Fraction(c[j])
    for i, bcol in enumerate(basis):
        if obj[bcol] != 0:
            f = obj[bcol]
            obj = [o - f * v for o, v in zip(obj, tab[i])]
    tab.append(obj)
    _simplex(tab, basis, n_cols, real_cols)
    y = [Fraction(0)] * n_cols
    for i, bcol in enumerate(basis):
        y[bcol] = tab[i][-1]
    return tab[-1][-1], y[:n]


def _eliminate(sys: StrictSystem):
    """Gauss-Jordan on the equalities.  Returns ``(pivots, free, base, coef)``
    with ``x[p] = base[p] + sum(coef[p][f] * x[f])`` or ``None`` if inconsistent."""
    n = sys.n_vars
    rows = [list(r) + [b] for r, b in sys.equalities]
    pivots = []
    r = 0
    for c in range(n):
        k = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if k is None:
            continue
        rows[r], rows[k] = rows[k], rows[r]
        p = rows[r][c]
        rows[r] = [v / p for v in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    if any(all(v == 0 for v in row[:n]) and row[n] != 0 for row in rows[r:]):
        return None
    free = [c for c in range(n) if c not in pivots]
    base = {}
    coef = {}
    for i, p in enumerate(pivots):
        base[p] = rows[i][n]
        coef[p] = {f: -rows[i][f] for f in free if rows[i][f] != 0}
    return pivots, free, base, coef


def solve_strict(sys: StrictSystem) -> StrictResult:
    """Maximize the common slack ``t`` (capped at 1) of all strict rows.

    Equalities are eliminated first and ``t`` is shifted so that the origin is
    feasible, which lets the simplex start from the slack basis.
    """
    elim = _eliminate(sys)
    if elim is None:
        return StrictResult(None, Fraction(0))
    pivots, free, base, coef = elim
    k = len(free)
    reduced = []
    for row, rhs, sense in sys.strict:
        sign = 1 if sense == LT else -1
        r = [Fraction(0)] * k
        b = rhs
        for j, f in enumerate(free):
            r[j] += row[f]
        for p in pivots:
            if row[p]:
                b -= row[p] * base[p]
                for j, f in enumerate(free):
                    r[j] += row[p] * coef[p].get(f, 0)
        reduced.append(([sign * v for v in r], sign * b))
    if not reduced:
        x = [Fraction(0)] * sys.n_vars
        for p in pivots:
            x[p] = base[p]
        return StrictResult(x, Fraction(1))
    # t = t' - shift with t' >= 0 keeps every right-hand side nonnegative
    shift = max(Fraction(0), -min(b for _, b in reduced))
    a_ub = [r + [-v for v in r] + [Fraction(1)] for r, _ in reduced]
    b_ub = [b + shift for _, b in reduced]
    a_ub.append([Fraction(0)] * (2 * k) + [Fraction(1)])
    b_ub.append(1 + shift)
    c = [Fraction(0)] * (2 * k) + [Fraction(1)]
    best, y = maximize(c, a_ub, b_ub)
    best -= shift
    if best <= 0:
        return StrictResult(None, best)
    z = [y[j] - y[k + j] for j in range(k)]
    x = [Fraction(0)] * sys.n_vars
    for j, f in enumerate(free):
        x[f] = z[j]
    for p in pivots:
        x[p] = base[p] + sum((cf * x[f] for f, cf in coef[p].items()), Fraction(0))
    if not sys.satisfied_by(x):
        raise AssertionError("LP witness fails the strict system")
    return StrictResult(x, best)


def strict_feasible(sys: StrictSystem) -> list[Fraction] | None:
    """An exact interior point of the open polyhedron, or ``None`` if empty."""
    return solve_strict(sys).point
