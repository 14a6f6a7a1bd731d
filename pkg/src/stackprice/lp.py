"""Exact rational linear programming.

A two-phase primal simplex over :class:`fractions.Fraction` with Bland's
rule.  The problems produced by the pricing engine are small and dense
(tens of variables, at most a few hundred rows), and equalities such as a
profit ratio of exactly 3/2 must come out exact, so no tolerance appears
anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping, Optional

from .errors import StructuralError
from .rational import as_rational

LE, EQ, GE = "<=", "==", ">="
RELATIONS = (LE, EQ, GE)

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping
    relation: str
    rhs: Fraction

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise StructuralError(f"unknown relation {self.relation!r}")
        coeffs = {}
        for name, value in dict(self.coeffs).items():
            value = as_rational(value)
            if value:
                coeffs[name] = value
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "rhs", as_rational(self.rhs))

    def lhs(self, point: Mapping) -> Fraction:
        return sum((c * point[name] for name, c in self.coeffs.items()), Fraction(0))

    def satisfied_by(self, point: Mapping) -> bool:
        value = self.lhs(point)
        if self.relation == LE:
            return value <= self.rhs
        if self.relation == GE:
            return value >= self.rhs
        return value == self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """``sense`` (max or min) of ``objective . x + constant`` subject to ``constraints``.

    Variables are free unless ``lower``/``upper`` give a bound.
    """

    variables: tuple
    objective: Mapping
    constraints: tuple = ()
    lower: Mapping = field(default_factory=dict)
    upper: Mapping = field(default_factory=dict)
    sense: str = "max"
    constant: Fraction = Fraction(0)

    def __post_init__(self):
        variables = tuple(self.variables)
        if len(set(variables)) != len(variables):
            raise StructuralError("duplicate variable names")
        known = set(variables)
        object.__setattr__(self, "variables", variables)
        objective = {k: as_rational(v) for k, v in dict(self.objective).items()}
        constraints = tuple(self.constraints)
        for name in objective:
            if name not in known:
                raise StructuralError(f"objective mentions unknown variable {name!r}")
        for con in constraints:
            if not isinstance(con, Constraint):
                raise StructuralError("constraints must be Constraint instances")
            for name in con.coeffs:
                if name not in known:
                    raise StructuralError(f"constraint mentions unknown variable {name!r}")
        lower = {k: as_rational(v) for k, v in dict(self.lower).items()}
        upper = {k: as_rational(v) for k, v in dict(self.upper).items()}
        for name in list(lower) + list(upper):
            if name not in known:
                raise StructuralError(f"bound on unknown variable {name!r}")
        if self.sense not in ("max", "min"):
            raise StructuralError("sense must be 'max' or 'min'")
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", constraints)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "constant", as_rational(self.constant))

    def value(self, point: Mapping) -> Fraction:
        return self.constant + sum((c * point[n] for n, c in self.objective.items()), Fraction(0))

    def is_feasible(self, point: Mapping) -> bool:
        for name in self.variables:
            x = point[name]
            if name in self.lower and x < self.lower[name]:
                return False
            if name in self.upper and x > self.upper[name]:
                return False
        return all(con.satisfied_by(point) for con in self.constraints)

    def to_text(self) -> str:
        """Plain-text dump, one inequality per line."""

        def term_list(coeffs):
            parts = []
            for name in self.variables:
                c = coeffs.get(name)
                if c:
                    sign = "-" if c < 0 else "+"
                    mag = abs(c)
                    parts.append(f"{sign} {'' if mag == 1 else str(mag) + ' '}{name}")
            if not parts:
                return "0"
            text = " ".join(parts)
            return text[2:] if text.startswith("+ ") else "-" + text[2:]

        lines = [f"{self.sense} {term_list(self.objective)}" + (f" + {self.constant}" if self.constant else "")]
        lines.append("subject to")
        for con in self.constraints:
            lines.append(f"  {term_list(con.coeffs)} {con.relation} {con.rhs}")
        for name in self.variables:
            lo, hi = self.lower.get(name), self.upper.get(name)
            if lo is None and hi is None:
                lines.append(f"  {name} free")
            elif hi is None:
                lines.append(f"  {name} >= {lo}")
            elif lo is None:
                lines.append(f"  {name} <= {hi}")
            else:
                lines.append(f"  {lo} <= {name} <= {hi}")
        return "\n".join(lines)


@dataclass(frozen=True)
class LpOutcome:
    """Result of :func:`solve_lp`.

    ``certificate`` holds, by status:

    * optimal: dual multipliers keyed by constraint index (``<=`` rows are
      nonnegative, ``>=`` rows nonpositive for a max problem), plus
      ``("bound", name)`` entries for finite upper bounds of variables that
      also have a lower bound;
    * infeasible: Farkas multipliers in the same keying;
    * unbounded: ``{"point": feasible point, "ray": improving direction}``.
    """

    status: str
    optimum: Optional[Fraction] = None
    solution: Mapping = field(default_factory=dict)
    certificate: Mapping = field(default_factory=dict)
    pivots: int = 0


class _Tableau:
    """Dense tableau for ``max c.x`` over ``A x (rel) b`` with ``x >= 0`` and ``b >= 0``."""

    def __init__(self, rows, rels, rhs, ncols):
        self.m = len(rows)
        self.artificial = set()
        extra = []  # (row, column kind)
        for i, rel in enumerate(rels):
            if rel == LE:
                extra.append((i, "slack"))
            elif rel == GE:
                extra.append((i, "surplus"))
                extra.append((i, "art"))
            else:
                extra.append((i, "art"))
        self.width = ncols + len(extra)
        self.T = [[Fraction(0)] * (self.width + 1) for _ in range(self.m)]
        for i, row in enumerate(rows):
            Ti = self.T[i]
            for j, v in row.items():
                Ti[j] = v
            Ti[self.width] = rhs[i]
        self.basis = [None] * self.m
        self.origin_col = [None] * self.m  # column holding e_i in the starting tableau
        for offset, (i, kind) in enumerate(extra):
            j = ncols + offset
            if kind == "surplus":
                self.T[i][j] = Fraction(-1)
            else:
                self.T[i][j] = Fraction(1)
                self.basis[i] = j
                self.origin_col[i] = j
                if kind == "art":
                    self.artificial.add(j)
        self.pivots = 0

    def objective_row(self, cost):
        """Reduced costs ``c_j - c_B B^-1 A_j`` and ``-value`` in the last slot."""
        z = [Fraction(0)] * (self.width + 1)
        for j, c in cost.items():
            z[j] = c
        for i, bj in enumerate(self.basis):
            cb = cost.get(bj)
            if cb:
                Ti = self.T[i]
                for j in range(self.width + 1):
                    v = Ti[j]
                    if v:
                        z[j] -= cb * v
        return z

    def pivot(self, r, q, z):
        Tr = self.T[r]
        piv = Tr[q]
        if piv != 1:
            inv = 1 / piv
            for j in range(self.width + 1):
                if Tr[j]:
                    Tr[j] *= inv
        nz = [j for j in range(self.width + 1) if Tr[j]]
        for i in range(self.m):
            if i == r:
                continue
            Ti = self.T[i]
            f = Ti[q]
            if f:
                for j in nz:
                    Ti[j] -= f * Tr[j]
        f = z[q]
        if f:
            for j in nz:
                z[j] -= f * Tr[j]
        self.basis[r] = q
        self.pivots += 1

    def run(self, z, allowed):
        """Bland's rule iterations; returns ``None`` at optimum or the unbounded column."""
        W = self.width
        while True:
            q = None
            for j in range(W):
                if z[j] > 0 and j in allowed:
                    q = j
                    break
            if q is None:
                return None
            r = None
            best = None
            for i in range(self.m):
                a = self.T[i][q]
                if a > 0:
                    ratio = self.T[i][W] / a
                    if best is None or ratio < best or (ratio == best and self.basis[i] < self.basis[r]):
                        best, r = ratio, i
            if r is None:
                return q
            self.pivot(r, q, z)

    def values(self):
        x = [Fraction(0)] * self.width
        for i, bj in enumerate(self.basis):
            x[bj] = self.T[i][self.width]
        return x

    def duals(self, z, cost):
        # The starting identity column j of row i has d_j = c_j - y_i.
        return [cost.get(self.origin_col[i], Fraction(0)) - z[self.origin_col[i]] for i in range(self.m)]


def solve_lp(lp: LinearProgram) -> LpOutcome:
    """Solve ``lp`` exactly.

    On optimality the returned point is re-substituted into every constraint
    and bound; any failure there is a bug and raises ``AssertionError``.
    """
    sign = Fraction(1) if lp.sense == "max" else Fraction(-1)

    # Column layout: each variable maps to (col, factor) parts plus an offset,
    # x = offset + sum(factor * col_value).
    cols = []
    expansion = {}
    bound_rows = []  # (coeff dict over cols, rel, rhs, bound key)
    for name in lp.variables:
        lo = lp.lower.get(name)
        hi = lp.upper.get(name)
        if lo is not None:
            j = len(cols)
            cols.append((name, 1))
            expansion[name] = (lo, [(j, Fraction(1))])
            if hi is not None:
                bound_rows.append(({j: Fraction(1)}, LE, hi - lo, ("bound", name, "upper")))
        elif hi is not None:
            j = len(cols)
            cols.append((name, -1))
            expansion[name] = (hi, [(j, Fraction(-1))])
        else:
            j = len(cols)
            cols.append((name, 1))
            cols.append((name, -1))
            expansion[name] = (Fraction(0), [(j, Fraction(1)), (j + 1, Fraction(-1))])
    ncols = len(cols)

    rows, rels, rhs, flips, keys = [], [], [], [], []

    def add_row(coeffs_cols, rel, b, key):
        if b < 0:
            coeffs_cols = {j: -v for j, v in coeffs_cols.items()}
            b = -b
            rel = {LE: GE, GE: LE, EQ: EQ}[rel]
            flips.append(-1)
        else:
            flips.append(1)
        rows.append(coeffs_cols)
        rels.append(rel)
        rhs.append(b)
        keys.append(key)

    for idx, con in enumerate(lp.constraints):
        row = {}
        b = con.rhs
        for name, a in con.coeffs.items():
            off, parts = expansion[name]
            b -= a * off
            for j, f in parts:
                row[j] = row.get(j, Fraction(0)) + a * f
        row = {j: v for j, v in row.items() if v}
        add_row(row, con.relation, b, idx)
    for coeffs_cols, rel, b, key in bound_rows:
        add_row(coeffs_cols, rel, b, key)

    tab = _Tableau(rows, rels, rhs, ncols)
    structural = set(range(tab.width)) - tab.artificial

    obj_cols = {}
    obj_const = lp.constant
    for name, c in lp.objective.items():
        off, parts = expansion[name]
        obj_const += c * off
        for j, f in parts:
            obj_cols[j] = obj_cols.get(j, Fraction(0)) + sign * c * f
    obj_cols = {j: v for j, v in obj_cols.items() if v}

    def map_multipliers(y, scale):
        cert = {}
        for i, key in enumerate(keys):
            v = y[i] * flips[i] * scale
            if isinstance(key, tuple):
                if v:
                    cert[key[:2]] = cert.get(key[:2], Fraction(0)) + v
            else:
                cert[key] = v
        return cert

    def point_from(x):
        point = {}
        for name in lp.variables:
            off, parts = expansion[name]
            point[name] = off + sum((f * x[j] for j, f in parts), Fraction(0))
        return point

    if tab.artificial:
        phase_one = {j: Fraction(-1) for j in tab.artificial}
        z1 = tab.objective_row(phase_one)
        tab.run(z1, set(range(tab.width)))
        if z1[tab.width] != 0:
            # Phase-one optimum is -sum(artificials) < 0.
            y = tab.duals(z1, phase_one)
            return LpOutcome(INFEASIBLE, certificate=map_multipliers(y, 1), pivots=tab.pivots)
        # Drive zero-valued artificials out of the basis where possible.
        for i in range(tab.m):
            if tab.basis[i] in tab.artificial:
                Ti = tab.T[i]
                for j in range(tab.width):
                    if j in structural and Ti[j]:
                        tab.pivot(i, j, z1)
                        break

    z = tab.objective_row(obj_cols)
    unbounded_col = tab.run(z, structural)
    x = tab.values()
    if unbounded_col is not None:
        point = point_from(x)
        dx = [Fraction(0)] * tab.width
        dx[unbounded_col] = Fraction(1)
        for i, bj in enumerate(tab.basis):
            dx[bj] = -tab.T[i][unbounded_col]
        ray = {}
        for name in lp.variables:
            _, parts = expansion[name]
            ray[name] = sum((f * dx[j] for j, f in parts), Fraction(0))
        return LpOutcome(UNBOUNDED, solution=point, certificate={"point": point, "ray": ray}, pivots=tab.pivots)

    point = point_from(x)
    optimum = lp.value(point)
    assert lp.is_feasible(point), "simplex returned an infeasible point"
    y = tab.duals(z, obj_cols)
    return LpOutcome(OPTIMAL, optimum=optimum, solution=point, certificate=map_multipliers(y, sign), pivots=tab.pivots)


def _standardize_bounds(lp: LinearProgram):
    """Split variables into free / nonnegative and move other bounds into rows."""
    nonneg, extra = set(), []
    for name in lp.variables:
        lo, hi = lp.lower.get(name), lp.upper.get(name)
        if lo == 0:
            nonneg.add(name)
        elif lo is not None:
            extra.append(Constraint({name: 1}, GE, lo))
        if hi is not None:
            extra.append(Constraint({name: 1}, LE, hi))
    return nonneg, list(lp.constraints) + extra


def dual_of(lp: LinearProgram, prefix: str = "y") -> LinearProgram:
    """The LP dual.

    Bounds other than ``x >= 0`` are first turned into explicit rows, so the
    dual has one variable ``(prefix, i)`` per row of that expanded system.
    For a max primal the dual is a min problem and vice versa; the objective
    constant carries over, so optima agree under strong duality.
    """
    nonneg, rows = _standardize_bounds(lp)
    names = tuple((prefix, i) for i in range(len(rows)))
    objective = {names[i]: con.rhs for i, con in enumerate(rows) if con.rhs}
    lower, upper = {}, {}
    for i, con in enumerate(rows):
        if con.relation == EQ:
            continue
        # max primal: <= rows get y >= 0; min primal: >= rows get y >= 0.
        nonneg_dual = (con.relation == LE) == (lp.sense == "max")
        if nonneg_dual:
            lower[names[i]] = Fraction(0)
        else:
            upper[names[i]] = Fraction(0)
    constraints = []
    for name in lp.variables:
        coeffs = {names[i]: con.coeffs[name] for i, con in enumerate(rows) if name in con.coeffs}
        c = lp.objective.get(name, Fraction(0))
        if name in nonneg:
            rel = GE if lp.sense == "max" else LE
        else:
            rel = EQ
        constraints.append(Constraint(coeffs, rel, c))
    return LinearProgram(
        variables=names,
        objective=objective,
        constraints=tuple(constraints),
        lower=lower,
        upper=upper,
        sense="min" if lp.sense == "max" else "max",
        constant=lp.constant,
    )


def make_lp(objective: Mapping, constraints, *, lower=None, upper=None, sense="max", variables=None) -> LinearProgram:
    """Convenience constructor taking ``(coeffs, relation, rhs)`` triples."""
    cons = tuple(c if isinstance(c, Constraint) else Constraint(*c) for c in constraints)
    if variables is None:
        seen: dict[Hashable, None] = {}
        for name in objective:
            seen.setdefault(name)
        for con in cons:
            for name in con.coeffs:
                seen.setdefault(name)
        variables = tuple(seen)
    return LinearProgram(variables, objective, cons, lower or {}, upper or {}, sense)
