"""One k-valued content measured in two contexts: the full-splits theory.

When every dichotomization of a pair of content-sharing k-valued
variables enters the canonical system, the support of each bunch still
has at most k states, so a connected coupling is described by a k-by-k
matrix r with r[i][j] the probability that the two sides land on values
i and j. Row sums must match one distribution, column sums the other,
diagonal entries must equal the pointwise minima (1-splits), every pair
block must sum to the min of the pair sums (2-splits), and larger subsets
add one equality per canonical subset (m-splits).

The closed-form side of the story: a connected coupling of the 1-2
subsystem exists exactly when one distribution *nominally dominates* the
other, i.e. falls strictly below it in at most one coordinate; the
coupling is then unique, supported on the diagonal plus a single row or
column, and constructed explicitly here. Feasibility of the 1-2
subsystem already settles the whole full-splits system, because the
higher-order constraints are linear consequences of the 1- and 2-split
ones whenever those are satisfiable; the residual of that linear identity
is exposed for diagnostics, a nonzero value being a certificate of
contextuality.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .canonical import ValueSet, canonical_subset
from .simplex import LinearProgram, solve
from .solver import Verdict

__all__ = [
    "TwoConnectionInstance",
    "CouplingMatrix",
    "nominally_dominates",
    "analyze_full_splits",
    "construct_12_coupling",
    "split_constraint_value",
    "relation_residual",
    "constraint_matrix",
    "rank_of_constraint_matrix",
    "lp_cross_check",
    "coupling_entry_bounds",
    "canonical_index_subsets",
    "ALL_SPLITS_MAX_K",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# Guard for max_m="all": the number of canonical subsets is 2**(k-1) - 1.
ALL_SPLITS_MAX_K = 10


@dataclass(frozen=True)
class TwoConnectionInstance:
    """A pair of exact distributions over values 0..k-1, one per context."""

    k: int
    p: tuple[Fraction, ...]
    q: tuple[Fraction, ...]

    @staticmethod
    def from_vectors(
        p: Sequence[Fraction | str | int], q: Sequence[Fraction | str | int]
    ) -> "TwoConnectionInstance":
        pv = tuple(Fraction(v) for v in p)
        qv = tuple(Fraction(v) for v in q)
        if len(pv) != len(qv):
            raise ValueError(f"length mismatch: {len(pv)} vs {len(qv)}")
        if len(pv) < 2:
            raise ValueError("need at least 2 values")
        for name, vec in (("p", pv), ("q", qv)):
            if any(v < 0 for v in vec):
                raise ValueError(f"{name} has a negative entry")
            if sum(vec, ZERO) != 1:
                raise ValueError(f"{name} does not sum to 1")
        return TwoConnectionInstance(len(pv), pv, qv)


@dataclass(frozen=True)
class CouplingMatrix:
    """k-by-k coupling: entries nonnegative, rows sum to p, columns to q."""

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def k(self) -> int:
        return len(self.entries)

    def row_sums(self) -> tuple[Fraction, ...]:
        return tuple(sum(row, ZERO) for row in self.entries)

    def col_sums(self) -> tuple[Fraction, ...]:
        k = self.k
        return tuple(
            sum((self.entries[i][j] for i in range(k)), ZERO) for j in range(k)
        )

    def block_sum(self, subset: Iterable[int]) -> Fraction:
        idx = list(subset)
        return sum(
            (self.entries[i][j] for i in idx for j in idx), ZERO
        )


def nominally_dominates(
    a: Sequence[Fraction], b: Sequence[Fraction]
) -> bool:
    """Whether a falls strictly below b in at most one coordinate.

    Ties never count. Identically distributed pairs dominate each other,
    and for k = 2 domination holds in both directions for any pair.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return sum(1 for x, y in zip(a, b) if Fraction(x) < Fraction(y)) <= 1


def split_constraint_value(
    inst: TwoConnectionInstance, subset: Iterable[int]
) -> Fraction:
    """Required coincidence-on-1 probability of the split with this subset:
    the smaller of the two subset sums."""
    idx = _check_subset(inst.k, subset)
    return min(
        sum((inst.p[i] for i in idx), ZERO), sum((inst.q[i] for i in idx), ZERO)
    )


def _check_subset(k: int, subset: Iterable[int]) -> list[int]:
    idx = sorted(set(subset))
    if not idx:
        raise ValueError("empty subset")
    if len(idx) >= k:
        raise ValueError("subset must be proper")
    for i in idx:
        if not 0 <= i < k:
            raise IndexError(f"value index {i} out of range for k={k}")
    return idx


def construct_12_coupling(inst: TwoConnectionInstance) -> CouplingMatrix | None:
    """The unique connected coupling of the 1-2 subsystem, if one exists.

    Diagonal entries are the pointwise minima. If p dominates q, the
    column of the exceptional index j (the one with p[j] < q[j], if any)
    absorbs the row surpluses p[i] - q[i]; if only q dominates p, the fill
    is the transpose arrangement along the exceptional row. Returns None
    when neither distribution dominates.
    """
    k, p, q = inst.k, inst.p, inst.q
    p_dom = nominally_dominates(p, q)
    q_dom = nominally_dominates(q, p)
    if not p_dom and not q_dom:
        return None
    r = [[ZERO] * k for _ in range(k)]
    for i in range(k):
        r[i][i] = min(p[i], q[i])
    if p_dom:
        low = [i for i in range(k) if p[i] < q[i]]
        # With no strictly low coordinate p equals q and the diagonal
        # already works; otherwise the single low column takes the slack.
        if low:
            j = low[0]
            for i in range(k):
                if i != j:
                    r[i][j] = p[i] - q[i]
    else:
        low = [j for j in range(k) if q[j] < p[j]]
        if low:
            i = low[0]
            for j in range(k):
                if j != i:
                    r[i][j] = q[j] - p[j]
    return CouplingMatrix(tuple(tuple(row) for row in r))


def analyze_full_splits(inst: TwoConnectionInstance) -> Verdict:
    """Contextuality verdict for the system of all splits of the pair.

    Noncontextual exactly when one side nominally dominates the other;
    the witness coupling is then the unique 1-2 coupling.
    """
    coupling = construct_12_coupling(inst)
    if coupling is None:
        return Verdict(feasible=False)
    return Verdict(feasible=True, degree=ZERO, total_variation=ONE, coupling=coupling)


def relation_residual(
    inst: TwoConnectionInstance, subset: Iterable[int]
) -> Fraction:
    """Residual of the identity tying an m-split constraint (m >= 3) to the
    1- and 2-split constraints.

    Left side: the subset-sum min. Right side: the sum of singleton minima
    plus, for every pair inside the subset, the excess of the pair min
    over its two singleton minima. Any connected coupling of the 1-2
    subsystem forces the residual to zero, so a nonzero residual certifies
    contextuality of the full-splits system.
    """
    idx = _check_subset(inst.k, subset)
    if len(idx) < 3:
        raise ValueError("residual is defined for subsets of size 3 or more")
    p, q = inst.p, inst.q
    lhs = split_constraint_value(inst, idx)
    rhs = sum((min(p[i], q[i]) for i in idx), ZERO)
    for i, j in combinations(idx, 2):
        rhs += min(p[i] + p[j], q[i] + q[j]) - min(p[i], q[i]) - min(p[j], q[j])
    return lhs - rhs


def canonical_index_subsets(k: int, max_size: int | None = None) -> list[tuple[int, ...]]:
    """Canonical dichotomy subsets of {0..k-1}, optionally size-capped."""
    values = ValueSet(tuple(f"{i}" for i in range(k)))
    out = []
    for size in range(1, k // 2 + 1):
        if max_size is not None and size > max_size:
            break
        for combo in combinations(range(k), size):
            w = tuple(values.labels[i] for i in combo)
            if canonical_subset(w, values) == w:
                out.append(combo)
    return out


def constraint_matrix(k: int) -> tuple[tuple[int, ...], ...]:
    """Boolean matrix of the 1-2 system over the k*k coupling variables.

    Rows, in order: k row-sum rows, k column-sum rows, k diagonal rows,
    then the C(k,2) pair-block rows for i < j. Columns are the cells (i,j)
    in row-major order.
    """
    if k < 2:
        raise ValueError("need k >= 2")
    cols = k * k

    def cell(i: int, j: int) -> int:
        return i * k + j

    rows: list[tuple[int, ...]] = []
    for i in range(k):
        row = [0] * cols
        for j in range(k):
            row[cell(i, j)] = 1
        rows.append(tuple(row))
    for j in range(k):
        row = [0] * cols
        for i in range(k):
            row[cell(i, j)] = 1
        rows.append(tuple(row))
    for i in range(k):
        row = [0] * cols
        row[cell(i, i)] = 1
        rows.append(tuple(row))
    for i, j in combinations(range(k), 2):
        row = [0] * cols
        for a, b in ((i, i), (i, j), (j, i), (j, j)):
            row[cell(a, b)] = 1
        rows.append(tuple(row))
    return tuple(rows)


def rank_of_constraint_matrix(k: int) -> int:
    """Exact rank of the 1-2 constraint matrix over the rationals."""
    matrix = [[Fraction(v) for v in row] for row in constraint_matrix(k)]
    rank = 0
    col = 0
    rows, cols = len(matrix), k * k
    while rank < rows and col < cols:
        pivot = next((r for r in range(rank, rows) if matrix[r][col] != 0), None)
        if pivot is None:
            col += 1
            continue
        matrix[rank], matrix[pivot] = matrix[pivot], matrix[rank]
        inv = ONE / matrix[rank][col]
        matrix[rank] = [v * inv for v in matrix[rank]]
        for r in range(rows):
            if r != rank and matrix[r][col] != 0:
                factor = matrix[r][col]
                matrix[r] = [
                    a - factor * b for a, b in zip(matrix[r], matrix[rank])
                ]
        rank += 1
        col += 1
    return rank


def _reduced_lp(
    inst: TwoConnectionInstance, max_m: int | str
) -> LinearProgram:
    k, p, q = inst.k, inst.p, inst.q
    if max_m == "all":
        if k > ALL_SPLITS_MAX_K:
            raise ValueError(
                f"max_m='all' capped at k <= {ALL_SPLITS_MAX_K}, got {k}"
            )
        limit = k // 2
    else:
        if not isinstance(max_m, int) or max_m < 2:
            raise ValueError(f"max_m must be an int >= 2 or 'all', got {max_m!r}")
        limit = max_m

    def cell(i: int, j: int) -> int:
        return i * k + j

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(k):
        rows.append({cell(i, j): ONE for j in range(k)})
        rhs.append(p[i])
    for j in range(k):
        rows.append({cell(i, j): ONE for i in range(k)})
        rhs.append(q[j])
    for i in range(k):
        rows.append({cell(i, i): ONE})
        rhs.append(min(p[i], q[i]))
    for i, j in combinations(range(k), 2):
        rows.append(
            {cell(i, i): ONE, cell(i, j): ONE, cell(j, i): ONE, cell(j, j): ONE}
        )
        rhs.append(min(p[i] + p[j], q[i] + q[j]))
    for subset in canonical_index_subsets(k, max_size=limit):
        if len(subset) < 3:
            continue
        rows.append({cell(i, j): ONE for i in subset for j in subset})
        rhs.append(split_constraint_value(inst, subset))
    return LinearProgram(num_vars=k * k, rows=rows, rhs=rhs)


def lp_cross_check(inst: TwoConnectionInstance, max_m: int | str = 2) -> Verdict:
    """Feasibility of the coupling constraints, decided by exact LP.

    Works in the k*k support space rather than the full canonical state
    space: the support of each bunch has at most k states, so nothing is
    lost. max_m=2 checks the 1-2 subsystem; larger values add m-split
    equalities up to that size; "all" adds every canonical subset.
    """
    result = solve(_reduced_lp(inst, max_m))
    if not result.feasible:
        return Verdict(feasible=False, infeasibility_gap=result.infeasibility)
    k = inst.k
    entries = tuple(
        tuple(result.value(i * k + j) for j in range(k)) for i in range(k)
    )
    return Verdict(
        feasible=True,
        degree=ZERO,
        total_variation=ONE,
        coupling=CouplingMatrix(entries),
    )


def coupling_entry_bounds(
    inst: TwoConnectionInstance, i: int, j: int, max_m: int | str = 2
) -> tuple[Fraction, Fraction] | None:
    """Exact min and max of one coupling entry over the feasible set.

    None when the constraints are infeasible. Equal bounds for every cell
    certify that the feasible set is a single point.
    """
    lp = _reduced_lp(inst, max_m)
    target = i * inst.k + j
    lp.objective = {target: ONE}
    low = solve(lp)
    if not low.feasible:
        return None
    lp.objective = {target: -ONE}
    high = solve(lp)
    return low.value(target), high.value(target)
