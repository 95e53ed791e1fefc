"""Contextuality verdicts for all-binary systems, by exact LP.

A canonical system is noncontextual when one jointly distributed family
of variables (a global coupling) simultaneously reproduces every bunch
distribution and couples every connection multimaximally. That is a
linear feasibility question over the probability masses of all global
states, and it is decided here exactly.

The degree of contextuality is computed from the same equality system by
allowing signed masses: among all quasi-couplings matching the bunches
and the multimaximal connection couplings (one always exists), minimize
the total variation, i.e. the sum of absolute masses. The minimum equals
1 exactly when a proper probability coupling exists; the excess over 1 is
the degree. The absolute values are linearized by the standard split of
each signed mass into a difference of two nonnegative parts.

Connection constraints follow the chain characterization: contexts are
sorted by the probability of the split firing, and each adjacent pair is
required to coincide with probability equal to the smaller marginal.
Together with the bunch equalities this pins every connection to its
unique multimaximal coupling while keeping the constraint count linear in
the number of contexts per connection.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .canonical import CanonicalSystem
from .coupling import JointMass, QuasiJointMass, is_multimaximal, joint_marginal
from .simplex import LinearProgram, LPResult, solve

__all__ = [
    "Verdict",
    "ConnectedProgram",
    "SystemTooLargeError",
    "DEFAULT_MAX_STATES",
    "max_states",
    "build_connected_constraints",
    "solve_feasibility",
    "min_total_variation",
    "is_noncontextual",
    "global_variables",
    "witness_matches_bunches",
    "witness_connection_couplings",
    "witness_is_multimaximal",
]

ZERO = Fraction(0)
ONE = Fraction(1)

# Cap on the number of global states (LP columns before the signed split).
# 2**20 states corresponds to twenty binary variables.
DEFAULT_MAX_STATES = 1 << 20
MAX_STATES_ENV = "CBD_MAX_VARS"


class SystemTooLargeError(ValueError):
    """Raised when the global state space would exceed the configured cap."""


def max_states() -> int:
    raw = os.environ.get(MAX_STATES_ENV)
    if raw is None:
        return DEFAULT_MAX_STATES
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"{MAX_STATES_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"{MAX_STATES_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True)
class Verdict:
    """Outcome of a contextuality query.

    ``feasible`` reports whether a proper (nonnegative) connected coupling
    exists. A probability witness always comes with degree 0; a signed
    witness carries the minimal total variation and the degree in excess
    of 1.
    """

    feasible: bool
    witness: JointMass | None = None
    quasi_witness: QuasiJointMass | None = None
    degree: Fraction | None = None
    total_variation: Fraction | None = None
    infeasibility_gap: Fraction | None = None
    coupling: object | None = None

    @property
    def contextual(self) -> bool:
        return not self.feasible


@dataclass
class ConnectedProgram(LinearProgram):
    """The feasibility LP of a canonical system, with variable labeling.

    Variables are the 2**n global states of the n binary system variables
    listed in ``rvs`` (content id, context id), ordered context-major; the
    state with index g assigns to the t-th variable the bit (g >> t) & 1.
    """

    rvs: tuple[tuple[str, str], ...] = ()


def global_variables(cs: CanonicalSystem) -> list[tuple[str, str]]:
    """All (content, context) variables, context-major, deterministic."""
    sys = cs.system
    return [(q, c) for c in sys.contexts for q in sys.contexts[c]]


def _one_marginal(cs: CanonicalSystem, content: str, context: str) -> Fraction:
    """Probability that a variable takes its index-1 value."""
    sys = cs.system
    bunch = sys.bunches[context]
    pos = bunch.contents.index(content)
    fired = sys.contents[content].labels[1]
    return sum(
        (mass for state, mass in bunch.masses.items() if state[pos] == fired), ZERO
    )


def _equality_rows(
    cs: CanonicalSystem,
) -> tuple[list[dict[int, Fraction]], list[Fraction], list[tuple[str, str]]]:
    """Bunch-marginal and connection rows over the global state space."""
    sys = cs.system
    rvs = global_variables(cs)
    n = len(rvs)
    num_states = 1 << n
    if num_states > max_states():
        raise SystemTooLargeError(
            f"{n} binary variables give {num_states} global states, "
            f"cap is {max_states()} (override with {MAX_STATES_ENV})"
        )
    bit_of = {rv: t for t, rv in enumerate(rvs)}

    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []

    # One equality per state of each bunch, zero-mass states included:
    # a signed coupling must reproduce the bunch distribution everywhere,
    # not only on its support.
    offset = 0
    for c in sys.contexts:
        qs = sys.contexts[c]
        t = len(qs)
        mask = (1 << t) - 1
        local_rhs = [ZERO] * (1 << t)
        bunch = sys.bunches[c]
        for state, mass in bunch.masses.items():
            pattern = 0
            for pos, (q, v) in enumerate(zip(qs, state)):
                if sys.contents[q].index(v):
                    pattern |= 1 << pos
            local_rhs[pattern] += mass
        local_rows: list[dict[int, Fraction]] = [dict() for _ in range(1 << t)]
        for g in range(num_states):
            local_rows[(g >> offset) & mask][g] = ONE
        rows.extend(local_rows)
        rhs.extend(local_rhs)
        offset += t

    # Chain constraints per connection: contexts sorted by marginal
    # (ties by context id), one coincidence equality per adjacent pair.
    for q in sys.contents:
        hosts = sys.contexts_measuring(q)
        if len(hosts) < 2:
            continue
        margs = {c: _one_marginal(cs, q, c) for c in hosts}
        chain = sorted(hosts, key=lambda c: (margs[c], c))
        for c1, c2 in zip(chain, chain[1:]):
            t1, t2 = bit_of[(q, c1)], bit_of[(q, c2)]
            row = {
                g: ONE
                for g in range(num_states)
                if (g >> t1) & 1 and (g >> t2) & 1
            }
            rows.append(row)
            rhs.append(min(margs[c1], margs[c2]))
    return rows, rhs, rvs


def build_connected_constraints(cs: CanonicalSystem) -> ConnectedProgram:
    """Equality system whose nonnegative solutions are the connected couplings."""
    rows, rhs, rvs = _equality_rows(cs)
    return ConnectedProgram(
        num_vars=1 << len(rvs), rows=rows, rhs=rhs, rvs=tuple(rvs)
    )


def _witness_from_solution(
    rvs: Sequence[tuple[str, str]], x: dict[int, Fraction], quasi: bool
):
    n = len(rvs)
    variables = tuple(f"{q}@{c}" for q, c in rvs)
    masses = {
        tuple((g >> t) & 1 for t in range(n)): mass for g, mass in x.items()
    }
    return (QuasiJointMass if quasi else JointMass)(variables, masses)


def solve_feasibility(lp: ConnectedProgram) -> Verdict:
    """Decide whether a proper connected coupling exists; produce one if so."""
    result = solve(lp)
    if result.feasible:
        witness = _witness_from_solution(lp.rvs, result.x, quasi=False)
        return Verdict(
            feasible=True, witness=witness, degree=ZERO, total_variation=ONE
        )
    return Verdict(feasible=False, infeasibility_gap=result.infeasibility)


def min_total_variation(cs: CanonicalSystem) -> Verdict:
    """Minimal total variation over signed connected couplings, exactly.

    Tries the probability problem first: when it is feasible the minimum
    is 1 and the witness doubles as the optimal quasi-coupling. Otherwise
    each signed mass x is split as x = u - v with u, v >= 0 and the LP
    minimizes the sum of all parts, which at an optimum equals the sum of
    absolute masses.
    """
    rows, rhs, rvs = _equality_rows(cs)
    num_states = 1 << len(rvs)
    probability = solve(LinearProgram(num_vars=num_states, rows=rows, rhs=rhs))
    if probability.feasible:
        witness = _witness_from_solution(rvs, probability.x, quasi=False)
        quasi = QuasiJointMass(witness.variables, dict(witness.masses))
        return Verdict(
            feasible=True,
            witness=witness,
            quasi_witness=quasi,
            degree=ZERO,
            total_variation=ONE,
        )

    split_rows = [
        {**row, **{j + num_states: -coef for j, coef in row.items()}} for row in rows
    ]
    objective = {j: ONE for j in range(2 * num_states)}
    result = solve(
        LinearProgram(
            num_vars=2 * num_states, rows=split_rows, rhs=rhs, objective=objective
        )
    )
    if not result.feasible:
        raise ValueError(
            "equality system admits no signed solution; "
            "the input is not a valid canonical system"
        )
    signed: dict[int, Fraction] = {}
    for j, value in result.x.items():
        g = j % num_states
        signed[g] = signed.get(g, ZERO) + (value if j < num_states else -value)
    signed = {g: v for g, v in signed.items() if v != 0}
    total = sum((abs(v) for v in signed.values()), ZERO)
    quasi = _witness_from_solution(rvs, signed, quasi=True)
    return Verdict(
        feasible=False,
        quasi_witness=quasi,
        degree=total - 1,
        total_variation=total,
    )


def is_noncontextual(cs: CanonicalSystem) -> bool:
    """Whether a multimaximally connected coupling exists."""
    return solve_feasibility(build_connected_constraints(cs)).feasible


# -- witness verification -----------------------------------------------------
#
# These checks close the loop: a claimed witness is re-verified against the
# system it came from, independently of how the LP found it.


def witness_matches_bunches(cs: CanonicalSystem, witness: JointMass) -> bool:
    """Marginalize a witness onto every context and compare bunches exactly."""
    sys = cs.system
    rvs = global_variables(cs)
    index_of = {rv: t for t, rv in enumerate(rvs)}
    for c in sys.contexts:
        qs = sys.contexts[c]
        marg = joint_marginal(witness, [index_of[(q, c)] for q in qs])
        expected: dict[tuple, Fraction] = {}
        for state, mass in sys.bunches[c].masses.items():
            bits = tuple(sys.contents[q].index(v) for q, v in zip(qs, state))
            expected[bits] = expected.get(bits, ZERO) + mass
        if dict(marg.masses) != {k: v for k, v in expected.items() if v != 0}:
            return False
    return True


def witness_connection_couplings(
    cs: CanonicalSystem, witness: JointMass
) -> dict[str, JointMass]:
    """The witness's coupling of each connection with two or more contexts."""
    sys = cs.system
    rvs = global_variables(cs)
    index_of = {rv: t for t, rv in enumerate(rvs)}
    out: dict[str, JointMass] = {}
    for q in sys.contents:
        hosts = sys.contexts_measuring(q)
        if len(hosts) < 2:
            continue
        out[q] = joint_marginal(witness, [index_of[(q, c)] for c in hosts])
    return out


def witness_is_multimaximal(cs: CanonicalSystem, witness: JointMass) -> bool:
    return all(
        is_multimaximal(j) for j in witness_connection_couplings(cs, witness).values()
    )
