"""Dichotomization and the canonical (all-binary) representation.

A *split* of a categorical variable is the indicator of a value subset W:
it equals 1 exactly when the variable lands in W. W and its complement
give indistinguishable indicators up to relabeling, so each split is
stored under a canonical representative: the smaller of the two subsets,
with ties broken lexicographically under the value-set order.

Compiling a system to canonical form replaces every variable by binary
splits and pushes the bunch distributions forward. The support of each
bunch never grows: a support state of the original bunch determines all
of its split values at once.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .systems import BunchDistribution, System, ValueSet, validate_system

__all__ = [
    "SplitLabel",
    "CanonicalSystem",
    "canonical_subset",
    "enumerate_dichotomies",
    "split_representation",
    "canonicalize",
    "wrap_binary_system",
    "BIT_VALUES",
]

# Split variables take these values; "1" means the original value is in W.
BIT_VALUES = ValueSet(("0", "1"))


def canonical_subset(subset: Iterable[str], values: ValueSet) -> tuple[str, ...]:
    """Canonical representative of a dichotomy: W or its complement.

    Picks the smaller side; on equal sizes, the side that comes first
    lexicographically under the value-set order. Idempotent.
    """
    pos = {v: i for i, v in enumerate(values.labels)}
    w = sorted(set(subset), key=pos.__getitem__)
    for v in w:
        if v not in pos:
            raise ValueError(f"value {v!r} not in value set {values.labels!r}")
    if not w:
        raise ValueError("empty subset has no canonical form")
    if len(w) == len(values):
        raise ValueError("improper subset (whole value set) has no canonical form")
    comp = [v for v in values.labels if v not in set(w)]
    if len(w) < len(comp):
        return tuple(w)
    if len(comp) < len(w):
        return tuple(comp)
    w_key = tuple(pos[v] for v in w)
    c_key = tuple(pos[v] for v in comp)
    return tuple(w) if w_key < c_key else tuple(comp)


def enumerate_dichotomies(values: ValueSet) -> list[tuple[str, ...]]:
    """All canonical dichotomy subsets of a value set.

    There are 2**(k-1) - 1 of them: half of the 2**k - 2 proper nonempty
    subsets, one per complement pair. Ordered by size, then by position.
    """
    k = len(values)
    if k < 2:
        raise ValueError("need at least 2 values to dichotomize")
    out: list[tuple[str, ...]] = []
    for size in range(1, k // 2 + 1):
        for combo in combinations(range(k), size):
            w = tuple(values.labels[i] for i in combo)
            if canonical_subset(w, values) == w:
                out.append(w)
    return out


@dataclass(frozen=True)
class SplitLabel:
    """Identity of a split: source content plus canonical subset W."""

    content: str
    values: tuple[str, ...]

    def render(self) -> str:
        return f"{self.content}{{{','.join(self.values)}}}"


def split_representation(content: str, values: ValueSet) -> list[SplitLabel]:
    """The value detectors of a variable, canonical and deduplicated.

    One detector per value; for a binary variable the two detectors are
    the same split, so a binary variable is its own (single-split)
    representation.
    """
    if len(values) < 2:
        raise ValueError("need at least 2 values to dichotomize")
    seen: list[tuple[str, ...]] = []
    for v in values.labels:
        w = canonical_subset((v,), values)
        if w not in seen:
            seen.append(w)
    return [SplitLabel(content, w) for w in seen]


@dataclass(frozen=True)
class CanonicalSystem:
    """An all-binary system whose contents are canonical splits.

    ``splits`` records where each binary content came from. Every content
    is binary, and the value at index 1 of its value set is the "split
    fired" outcome, i.e. the bit of a variable is the index of its value.
    """

    system: System
    splits: Mapping[str, SplitLabel]

    def __post_init__(self) -> None:
        object.__setattr__(self, "splits", dict(sorted(self.splits.items())))
        for q, vs in self.system.contents.items():
            if len(vs) != 2:
                raise ValueError(f"content {q!r} is not binary in a canonical system")


def canonicalize(sys: System, policy: str = "detectors") -> CanonicalSystem:
    """Compile a system into its canonical all-binary representation.

    policy="detectors" replaces each variable by its value detectors.
    policy="all-splits" uses every canonical dichotomy of each value set,
    which is what expanding by all coarsenings and then taking detectors
    would produce once duplicate splits are merged (overlapping
    coarsenings share splits, so direct enumeration is both simpler and
    cheaper). Bunch masses are pushed forward support state by support
    state, so support sizes never grow.
    """
    if policy not in ("detectors", "all-splits"):
        raise ValueError(f"unknown policy {policy!r}")
    report = validate_system(sys)
    if not report.ok:
        raise ValueError("invalid system: " + "; ".join(report.violations))

    labels_of: dict[str, list[SplitLabel]] = {}
    splits: dict[str, SplitLabel] = {}
    for q, values in sys.contents.items():
        if len(values) < 2:
            raise ValueError(f"content {q!r} has fewer than 2 values")
        if policy == "detectors":
            labels = split_representation(q, values)
        else:
            labels = [SplitLabel(q, w) for w in enumerate_dichotomies(values)]
        labels_of[q] = labels
        for label in labels:
            splits[label.render()] = label

    contents = {sid: BIT_VALUES for sid in splits}
    contexts: dict[str, tuple[str, ...]] = {}
    bunches: dict[str, BunchDistribution] = {}
    for c, qs in sys.contexts.items():
        measured = tuple(
            label.render() for q in qs for label in labels_of[q]
        )
        masses: dict[tuple[str, ...], Fraction] = {}
        for state, mass in sys.bunches[c].masses.items():
            bits = tuple(
                "1" if v in label.values else "0"
                for q, v in zip(qs, state)
                for label in labels_of[q]
            )
            masses[bits] = masses.get(bits, Fraction(0)) + mass
        contexts[c] = measured
        bunches[c] = BunchDistribution(c, measured, masses)
    return CanonicalSystem(System(contents, contexts, bunches), splits)


def wrap_binary_system(sys: System) -> CanonicalSystem:
    """Treat an already all-binary system as canonical without relabeling.

    Each content becomes the split that fires on its second value, so the
    bit of a variable is the index of its value in its own value set.
    """
    report = validate_system(sys)
    if not report.ok:
        raise ValueError("invalid system: " + "; ".join(report.violations))
    splits = {}
    for q, vs in sys.contents.items():
        if len(vs) != 2:
            raise ValueError(f"content {q!r} is not binary")
        splits[q] = SplitLabel(q, (vs.labels[1],))
    return CanonicalSystem(sys, splits)
