"""Exact two-phase simplex over rationals.

Solves min c.x subject to A x = b with x >= 0 (variables may be declared
free, in which case they are split internally into a difference of two
nonnegative parts). Every comparison is exact, so feasibility verdicts
carry no tolerance.

Three implementation choices keep desk-scale problems fast without
giving up exactness:

* Integer pivoting. Each row is scaled once so its coefficients are
  integers, and the basis inverse is stored as an integer matrix times a
  scalar determinant. Pivot updates then use fraction-free arithmetic
  (the divisions in the update are exact), avoiding per-entry gcd work.
  Right-hand sides and basic values stay exact Fractions.

* Pricing computes the whole reduced-cost vector in one row-major pass
  and enters the most negative column (ties to the smallest index). If a
  long run of degenerate pivots suggests cycling, pivoting switches
  permanently to Bland's smallest-index rule, which is the anti-cycling
  guarantee: termination is certain on every input.

* Presolve. A zero right-hand side row whose coefficients all share one
  sign pins its (sign-restricted) variables to zero; those variables are
  eliminated up front. Probability couplings over sparse supports shrink
  dramatically under this rule, while signed formulations pass through
  untouched because their rows mix signs.

Redundant equality rows are tolerated: after phase 1 their artificial
variables either pivot out at level zero or are pinned there for good.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Sequence

__all__ = ["LinearProgram", "LPResult", "solve"]

ZERO = Fraction(0)
ONE = Fraction(1)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass
class LinearProgram:
    """min objective.x subject to rows[i].x = rhs[i], x >= 0.

    Rows are sparse maps from variable index to coefficient. A variable
    listed in free_vars is unrestricted in sign. No objective means a
    pure feasibility question.
    """

    num_vars: int
    rows: list[dict[int, Fraction]]
    rhs: list[Fraction]
    objective: dict[int, Fraction] | None = None
    free_vars: frozenset[int] = frozenset()

    def __post_init__(self) -> None:
        if len(self.rows) != len(self.rhs):
            raise ValueError("rows and rhs lengths differ")
        for row in self.rows:
            for j in row:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"coefficient for unknown variable {j}")
        if self.objective:
            for j in self.objective:
                if not 0 <= j < self.num_vars:
                    raise ValueError(f"objective term for unknown variable {j}")
        for j in self.free_vars:
            if not 0 <= j < self.num_vars:
                raise ValueError(f"free flag for unknown variable {j}")


@dataclass
class LPResult:
    status: str
    x: dict[int, Fraction] = field(default_factory=dict)
    objective_value: Fraction | None = None
    infeasibility: Fraction | None = None
    iterations: int = 0

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL

    def value(self, j: int) -> Fraction:
        return self.x.get(j, ZERO)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def solve(lp: LinearProgram) -> LPResult:
    """Solve an equality-form LP exactly; see module docstring."""
    # Working copy: split free variables into differences of nonnegative
    # parts, mirror column indexed num_vars + rank(free var).
    mirrors = sorted(lp.free_vars)
    mirror_col = {j: lp.num_vars + t for t, j in enumerate(mirrors)}
    ncols = lp.num_vars + len(mirrors)

    rows: list[dict[int, Fraction]] = []
    for row in lp.rows:
        wrow = {j: Fraction(c) for j, c in row.items() if c != 0}
        for j in mirrors:
            if j in wrow:
                wrow[mirror_col[j]] = -wrow[j]
        rows.append(wrow)
    rhs = [Fraction(v) for v in lp.rhs]
    cost = {j: Fraction(c) for j, c in (lp.objective or {}).items() if c != 0}
    for j in mirrors:
        if j in cost:
            cost[mirror_col[j]] = -cost[j]
    splittable = [j not in lp.free_vars for j in range(lp.num_vars)] + [
        True
    ] * len(mirrors)

    fixed, keep_rows, status, gap = _presolve(ncols, rows, rhs, splittable)
    if status == INFEASIBLE:
        return LPResult(INFEASIBLE, infeasibility=gap)
    rows = [rows[i] for i in keep_rows]
    rhs = [rhs[i] for i in keep_rows]

    core = _Core(ncols, rows, rhs, cost, set(fixed))
    status, gap = core.run(optimize=bool(cost))
    if status == INFEASIBLE:
        return LPResult(INFEASIBLE, infeasibility=gap, iterations=core.iterations)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, iterations=core.iterations)

    x: dict[int, Fraction] = {}
    for i, j in enumerate(core.basis):
        if j >= 0 and core.xb[i] != 0:
            x[j] = x.get(j, ZERO) + core.xb[i]
    for j in mirrors:
        mc = mirror_col[j]
        if mc in x:
            x[j] = x.get(j, ZERO) - x.pop(mc)
    x = {j: v for j, v in sorted(x.items()) if v != 0}
    objective_value = None
    if lp.objective is not None:
        objective_value = sum(
            (Fraction(c) * x.get(j, ZERO) for j, c in lp.objective.items()), ZERO
        )
    return LPResult(
        OPTIMAL, x=x, objective_value=objective_value, iterations=core.iterations
    )


def _presolve(
    ncols: int,
    rows: list[dict[int, Fraction]],
    rhs: list[Fraction],
    splittable: list[bool],
) -> tuple[set[int], list[int], str, Fraction | None]:
    """Pin to zero every variable forced there by a same-sign zero row.

    Only sign-restricted variables can be pinned. Returns the pinned set
    and the surviving row indices; detects the immediate infeasibility of
    an empty row with nonzero right-hand side.
    """
    fixed: set[int] = set()
    alive = [True] * len(rows)
    live_entries = [dict(row) for row in rows]
    changed = True
    while changed:
        changed = False
        for i, row in enumerate(live_entries):
            if not alive[i]:
                continue
            if fixed:
                for j in [j for j in row if j in fixed]:
                    del row[j]
            if not row:
                if rhs[i] != 0:
                    return fixed, [], INFEASIBLE, abs(rhs[i])
                alive[i] = False
                changed = True
                continue
            if rhs[i] != 0:
                continue
            signs = {c > 0 for c in row.values()}
            if len(signs) > 1:
                continue
            if not all(splittable[j] for j in row):
                continue
            fixed.update(row)
            alive[i] = False
            changed = True
    keep = [i for i, a in enumerate(alive) if a]
    return fixed, keep, OPTIMAL, None


class _Core:
    """Revised simplex with an integer basis inverse.

    binv holds det * B^-1 with integer entries and det > 0; rows of the
    constraint matrix are scaled to integers once at setup. Artificial
    variables are represented by basis entries -1 - row; they never enter
    the basis once out, and rows whose artificial cannot be evicted
    (dependent equations) are marked sticky so later pivots keep those
    artificials at level zero.
    """

    def __init__(
        self,
        ncols: int,
        rows: list[dict[int, Fraction]],
        rhs: list[Fraction],
        cost: dict[int, Fraction],
        banned: set[int],
    ) -> None:
        m = len(rows)
        self.m = m
        self.ncols = ncols
        self.banned = banned
        self.iterations = 0

        # Scale every row to integer coefficients; flip signs so b >= 0.
        int_rows: list[dict[int, int]] = []
        self.xb: list[Fraction] = []
        for row, b in zip(rows, rhs):
            scale = 1
            for c in row.values():
                scale = _lcm(scale, c.denominator)
            if b < 0:
                scale = -scale
            int_rows.append(
                {j: int(c * scale) for j, c in row.items() if j not in banned}
            )
            self.xb.append(b * scale)
        self.rows = int_rows

        # Integer objective: common positive scaling never moves the argmin.
        cscale = 1
        for c in cost.values():
            cscale = _lcm(cscale, c.denominator)
        self.cost = [0] * ncols
        for j, c in cost.items():
            if j not in banned:
                self.cost[j] = int(c * cscale)

        self.cols: list[list[tuple[int, int]]] = [[] for _ in range(ncols)]
        for i, row in enumerate(int_rows):
            for j, c in row.items():
                if c:
                    self.cols[j].append((i, c))

        self.det = 1
        self.binv = [[1 if i == k else 0 for k in range(m)] for i in range(m)]
        self.basis = [-1 - i for i in range(m)]  # negative = artificial of row i
        self.in_basis: set[int] = set()
        self.sticky: set[int] = set()
        self.bland = False
        self.degenerate_streak = 0

    # -- integer linear algebra -------------------------------------------

    def _d_vector(self, j: int) -> list[int]:
        """det * B^-1 * a_j, integer."""
        d = [0] * self.m
        binv = self.binv
        for r, coef in self.cols[j]:
            if coef == 1:
                for i in range(self.m):
                    if binv[i][r]:
                        d[i] += binv[i][r]
            elif coef == -1:
                for i in range(self.m):
                    if binv[i][r]:
                        d[i] -= binv[i][r]
            else:
                for i in range(self.m):
                    if binv[i][r]:
                        d[i] += coef * binv[i][r]
        return d

    def _dual_scaled(self, cb: list[int]) -> list[int]:
        """det * y where y = cb . B^-1."""
        y = [0] * self.m
        binv = self.binv
        for i, c in enumerate(cb):
            if c:
                row = binv[i]
                for k in range(self.m):
                    if row[k]:
                        y[k] += c * row[k]
        return y

    def _scaled_reduced_costs(self, y: list[int], cb_scale: int) -> list[int]:
        """det * reduced cost per column, using integer cost * cb_scale."""
        rc = [self.cost[j] * cb_scale * self.det for j in range(self.ncols)]
        rows = self.rows
        for r, yr in enumerate(y):
            if yr:
                for j, coef in rows[r].items():
                    rc[j] -= coef * yr
        return rc

    def _pivot(self, entering: int, row: int, d: list[int]) -> None:
        piv = d[row]
        det = self.det
        binv = self.binv
        prow = binv[row]
        m = self.m

        theta = self.xb[row] * det / piv
        if theta != 0:
            for i in range(m):
                if i != row and d[i]:
                    self.xb[i] -= theta * Fraction(d[i], det)
            self.degenerate_streak = 0
        else:
            self.degenerate_streak += 1
        self.xb[row] = theta

        nz = [k for k in range(m) if prow[k]]
        for i in range(m):
            if i == row:
                continue
            di = d[i]
            irow = binv[i]
            if di:
                for k in nz:
                    irow[k] = (piv * irow[k] - di * prow[k]) // det
            else:
                for k in nz:
                    if irow[k]:
                        irow[k] = piv * irow[k] // det
        # Entries of untouched columns still scale with the determinant.
        for i in range(m):
            if i == row:
                continue
            irow = binv[i]
            for k in range(m):
                if prow[k] == 0 and irow[k]:
                    irow[k] = piv * irow[k] // det

        self.det = piv
        if self.det < 0:
            self.det = -self.det
            for i in range(m):
                binv[i] = [-v for v in binv[i]]
            prow = binv[row]

        leaving = self.basis[row]
        if leaving >= 0:
            self.in_basis.discard(leaving)
        self.basis[row] = entering
        self.in_basis.add(entering)

        if not self.bland and self.degenerate_streak > 3 * m + 20:
            self.bland = True

    # -- pivot selection ----------------------------------------------------

    def _choose_entering(self, rc: list[int]) -> int:
        best = -1
        if self.bland:
            for j in range(self.ncols):
                if rc[j] < 0 and j not in self.in_basis and j not in self.banned:
                    return j
            return -1
        best_val = 0
        for j in range(self.ncols):
            v = rc[j]
            if v < best_val and j not in self.in_basis and j not in self.banned:
                best = j
                best_val = v
        return best

    def _ratio_row(self, d: list[int], honor_sticky: bool) -> int:
        if honor_sticky and self.sticky:
            for i in sorted(self.sticky):
                if d[i] != 0 and self.basis[i] < 0:
                    return i
        best = -1
        best_num: Fraction | None = None
        best_den = 1
        for i in range(self.m):
            di = d[i]
            if di <= 0:
                continue
            # ratio xb[i] / (di / det); det > 0 cancels in comparisons
            if best == -1:
                best, best_num, best_den = i, self.xb[i], di
                continue
            lhs = self.xb[i] * best_den
            rhs = best_num * di
            if lhs < rhs or (
                lhs == rhs and self._bland_key(i) < self._bland_key(best)
            ):
                best, best_num, best_den = i, self.xb[i], di
        return best

    def _bland_key(self, i: int) -> int:
        j = self.basis[i]
        return j if j >= 0 else self.ncols - 1 - j  # artificials past real columns

    # -- phases ---------------------------------------------------------------

    def run(self, optimize: bool) -> tuple[str, Fraction | None]:
        gap = self._phase1()
        if gap > 0:
            return INFEASIBLE, gap
        self._evict_artificials()
        if optimize and not self._phase2():
            return UNBOUNDED, None
        return OPTIMAL, None

    def _phase1(self) -> Fraction:
        m = self.m
        while True:
            cb = [1 if self.basis[i] < 0 else 0 for i in range(m)]
            if not any(cb):
                break
            y = self._dual_scaled(cb)
            rc = [0] * self.ncols
            for r, yr in enumerate(y):
                if yr:
                    for j, coef in self.rows[r].items():
                        rc[j] -= coef * yr
            entering = self._choose_entering(rc)
            if entering < 0:
                break
            d = self._d_vector(entering)
            row = self._ratio_row(d, honor_sticky=False)
            if row < 0:
                raise AssertionError("phase-1 objective is bounded below by zero")
            self.iterations += 1
            self._pivot(entering, row, d)
        return sum(
            (self.xb[i] for i in range(m) if self.basis[i] < 0), ZERO
        )

    def _evict_artificials(self) -> None:
        for row in range(self.m):
            if self.basis[row] >= 0:
                continue
            brow = self.binv[row]
            entering = -1
            for j in range(self.ncols):
                if j in self.in_basis or j in self.banned:
                    continue
                cell = 0
                for r, coef in self.cols[j]:
                    if brow[r]:
                        cell += coef * brow[r]
                if cell != 0:
                    entering = j
                    break
            if entering >= 0:
                self._pivot(entering, row, self._d_vector(entering))
            else:
                self.sticky.add(row)

    def _phase2(self) -> bool:
        while True:
            cb = [
                self.cost[self.basis[i]] if self.basis[i] >= 0 else 0
                for i in range(self.m)
            ]
            y = self._dual_scaled(cb)
            rc = self._scaled_reduced_costs(y, cb_scale=1)
            entering = self._choose_entering(rc)
            if entering < 0:
                return True
            d = self._d_vector(entering)
            row = self._ratio_row(d, honor_sticky=True)
            if row < 0:
                return False
            self.iterations += 1
            self._pivot(entering, row, d)
