"""Maximal and multimaximal couplings of binary random variables.

A coupling of stochastically unrelated variables imposes a joint
distribution with the prescribed one-variable marginals. For two binary
variables the coupling maximizing the probability of coincidence is
unique and given in closed form by the min rule. For a whole connection
(any number of binary variables sharing a content) the coupling that is
maximal for *every pair simultaneously* is again unique; it is realized
here by the monotone threshold construction: draw one uniform level and
fire every variable whose marginal exceeds it. Pairwise coincidence
probabilities then hit min(p_i, p_j) exactly, which characterizes
multimaximality, and checking that characterization is how the
construction is verified rather than trusted.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

__all__ = [
    "JointMass",
    "QuasiJointMass",
    "maximal_coupling_pair",
    "multimaximal_coupling",
    "is_multimaximal",
    "joint_marginal",
    "one_marginals",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def _normalize_states(
    variables: Sequence[str], masses: Mapping[tuple, Fraction]
) -> dict[tuple, Fraction]:
    arity = len(variables)
    clean: dict[tuple, Fraction] = {}
    for state, mass in masses.items():
        state = tuple(state)
        if len(state) != arity:
            raise ValueError(f"state {state!r} has arity {len(state)}, need {arity}")
        mass = Fraction(mass)
        if mass != 0:
            clean[state] = clean.get(state, ZERO) + mass
    return dict(sorted(clean.items()))


@dataclass(frozen=True)
class JointMass:
    """Joint probability mass function, sparse, exact, nonnegative."""

    variables: tuple[str, ...]
    masses: Mapping[tuple, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        clean = _normalize_states(self.variables, self.masses)
        for state, mass in clean.items():
            if mass < 0:
                raise ValueError(f"negative mass {mass} at state {state!r}")
        if sum(clean.values(), ZERO) != 1:
            raise ValueError("masses must sum exactly to 1")
        object.__setattr__(self, "masses", clean)

    def mass(self, state: Sequence) -> Fraction:
        return self.masses.get(tuple(state), ZERO)


@dataclass(frozen=True)
class QuasiJointMass:
    """Signed mass function summing to 1; negativity is the whole point."""

    variables: tuple[str, ...]
    masses: Mapping[tuple, Fraction]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        clean = _normalize_states(self.variables, self.masses)
        if sum(clean.values(), ZERO) != 1:
            raise ValueError("quasi masses must sum exactly to 1")
        object.__setattr__(self, "masses", clean)

    def mass(self, state: Sequence) -> Fraction:
        return self.masses.get(tuple(state), ZERO)

    def total_variation(self) -> Fraction:
        return sum((abs(m) for m in self.masses.values()), ZERO)


def maximal_coupling_pair(
    a: Fraction, b: Fraction, variables: tuple[str, str] = ("1", "2")
) -> JointMass:
    """The coupling of two binary variables maximizing coincidence.

    With 1-marginals a and b: Pr[11] = min(a, b), Pr[00] = 1 - max(a, b),
    and the remaining mass sits on the single discordant state.
    """
    a, b = Fraction(a), Fraction(b)
    for value in (a, b):
        if not 0 <= value <= 1:
            raise ValueError(f"marginal {value} outside [0, 1]")
    both = min(a, b)
    return JointMass(
        variables,
        {
            (1, 1): both,
            (1, 0): a - both,
            (0, 1): b - both,
            (0, 0): 1 - max(a, b),
        },
    )


def multimaximal_coupling(
    marginals: Sequence[tuple[str, Fraction]]
) -> JointMass:
    """The unique coupling of a binary connection maximal for every pair.

    Monotone threshold construction: sort the 1-marginals ascending (ties
    broken by variable id, which cannot matter because tied variables
    coincide almost surely); the support is the chain of states in which
    the top t marginals fire, t = 0..n, and the mass of consecutive chain
    states is the gap between consecutive sorted marginals. Coordinates of
    the result stay in the caller's original order.
    """
    if not marginals:
        raise ValueError("need at least one marginal")
    names = [str(name) for name, _ in marginals]
    if len(set(names)) != len(names):
        raise ValueError(f"duplicate variable ids in {names!r}")
    probs = [Fraction(p) for _, p in marginals]
    for p in probs:
        if not 0 <= p <= 1:
            raise ValueError(f"marginal {p} outside [0, 1]")
    n = len(probs)
    order = sorted(range(n), key=lambda i: (probs[i], names[i]))
    masses: dict[tuple, Fraction] = {}
    boundaries = [ZERO] + [probs[i] for i in order] + [ONE]
    # Level u in (boundaries[t], boundaries[t+1]) fires exactly the
    # variables ranked above t in the ascending order.
    for t in range(n + 1):
        width = boundaries[t + 1] - boundaries[t]
        if width == 0:
            continue
        state = [0] * n
        for i in order[t:]:
            state[i] = 1
        masses[tuple(state)] = masses.get(tuple(state), ZERO) + width
    return JointMass(tuple(names), masses)


def one_marginals(joint: JointMass | QuasiJointMass) -> list[Fraction]:
    """Pr[variable = 1] per coordinate; requires 0/1 states."""
    out = [ZERO] * len(joint.variables)
    for state, mass in joint.masses.items():
        for i, v in enumerate(state):
            if v not in (0, 1):
                raise ValueError(f"non-binary value {v!r} in state {state!r}")
            if v:
                out[i] += mass
    return out


def is_multimaximal(joint: JointMass) -> bool:
    """Whether every pair attains coincidence probability min of marginals.

    For binary connections the pairwise criterion is equivalent to every
    subset being maximally coupled, so this is the full multimaximality
    check. A single-variable joint passes vacuously.
    """
    margs = one_marginals(joint)
    n = len(joint.variables)
    for i in range(n):
        for j in range(i + 1, n):
            both = sum(
                (m for s, m in joint.masses.items() if s[i] == 1 and s[j] == 1),
                ZERO,
            )
            if both != min(margs[i], margs[j]):
                return False
    return True


def joint_marginal(joint, indices: Sequence[int]):
    """Exact marginal of a joint (or quasi-joint) on an index subset.

    Coordinates come back in the order given; the result has the same
    type as the input.
    """
    indices = list(indices)
    if not indices:
        raise ValueError("need at least one index")
    n = len(joint.variables)
    if len(set(indices)) != len(indices):
        raise ValueError(f"duplicate indices {indices!r}")
    for i in indices:
        if not 0 <= i < n:
            raise IndexError(f"index {i} out of range for {n} variables")
    acc: dict[tuple, Fraction] = {}
    for state, mass in joint.masses.items():
        key = tuple(state[i] for i in indices)
        acc[key] = acc.get(key, ZERO) + mass
    variables = tuple(joint.variables[i] for i in indices)
    return type(joint)(variables, acc)
