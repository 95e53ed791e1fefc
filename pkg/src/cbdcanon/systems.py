"""Content-context systems of categorical random variables.

A *system* is a family of random variables double-indexed by what they
measure (the content) and the conditions of the recording (the context).
Variables sharing a context are jointly distributed and form a *bunch*;
variables sharing a content across contexts form a *connection* and carry
no joint distribution of their own. The data model here stores, for each
context, the exact joint distribution of its bunch, sparsely (support
states only) and with Fraction masses throughout.

Instances are plain frozen dataclasses and all operations are pure
functions, so values can be shared freely across threads or processes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

from .rationals import format_rational, parse_rational

__all__ = [
    "ValueSet",
    "BunchDistribution",
    "System",
    "ValidationReport",
    "validate_system",
    "bunch_marginal",
    "connection_marginals",
    "remove_context",
    "remove_content",
    "system_from_dict",
    "system_to_dict",
]

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class ValueSet:
    """Ordered set of distinct value labels; list position is the order.

    The construction order is load-bearing: it defines the lexicographic
    rules used when dichotomizations are put into canonical form.
    """

    labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if not self.labels:
            raise ValueError("value set must be nonempty")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"duplicate value labels in {self.labels!r}")
        object.__setattr__(self, "labels", tuple(str(v) for v in self.labels))

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class BunchDistribution:
    """Joint distribution of all variables sharing one context.

    Only the support is stored; absent state tuples have mass zero.
    Constructors keep structurally broken data out (wrong arity, duplicate
    states) but deliberately allow probabilistic violations such as masses
    not summing to one, so that ``validate_system`` can report them.
    """

    context: str
    contents: tuple[str, ...]
    masses: Mapping[tuple[str, ...], Fraction]

    def __post_init__(self) -> None:
        contents = tuple(str(q) for q in self.contents)
        if len(set(contents)) != len(contents):
            raise ValueError(f"duplicate contents in bunch {self.context!r}")
        clean: dict[tuple[str, ...], Fraction] = {}
        for state, mass in self.masses.items():
            state = tuple(str(v) for v in state)
            if len(state) != len(contents):
                raise ValueError(
                    f"state {state!r} has arity {len(state)}, "
                    f"bunch {self.context!r} measures {len(contents)} contents"
                )
            if state in clean:
                raise ValueError(f"duplicate state {state!r} in bunch {self.context!r}")
            mass = Fraction(mass)
            if mass != 0:
                clean[state] = mass
        object.__setattr__(self, "contents", contents)
        object.__setattr__(self, "masses", dict(sorted(clean.items())))

    def total_mass(self) -> Fraction:
        return sum(self.masses.values(), ZERO)

    def support(self) -> tuple[tuple[str, ...], ...]:
        return tuple(self.masses)

    def mass(self, state: Sequence[str]) -> Fraction:
        return self.masses.get(tuple(state), ZERO)


@dataclass(frozen=True)
class System:
    """A content-context system: value sets, measurement map, and bunches."""

    contents: Mapping[str, ValueSet]
    contexts: Mapping[str, tuple[str, ...]]
    bunches: Mapping[str, BunchDistribution]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "contents", {str(q): v for q, v in sorted(self.contents.items())}
        )
        object.__setattr__(
            self,
            "contexts",
            {str(c): tuple(qs) for c, qs in sorted(self.contexts.items())},
        )
        object.__setattr__(
            self, "bunches", {str(c): b for c, b in sorted(self.bunches.items())}
        )

    def contexts_measuring(self, content: str) -> tuple[str, ...]:
        return tuple(c for c, qs in self.contexts.items() if content in qs)


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_system(sys: System) -> ValidationReport:
    """Check every system invariant and report all violations found.

    Checked: the measurement relation projects onto all contents and all
    contexts, each content keeps one value set everywhere it appears,
    bunch masses are nonnegative and sum exactly to one, and every bunch
    state has the right arity with in-range values.
    """
    bad: list[str] = []
    measured: set[str] = set()
    for c, qs in sys.contexts.items():
        if not qs:
            bad.append(f"context {c!r} measures no contents")
        for q in qs:
            if q in sys.contents:
                measured.add(q)
            else:
                bad.append(f"context {c!r} measures unknown content {q!r}")
        if c not in sys.bunches:
            bad.append(f"context {c!r} has no bunch distribution")
    for q in sys.contents:
        if q not in measured:
            bad.append(f"orphan content {q!r}: measured in no context")
    for c, bunch in sys.bunches.items():
        if c not in sys.contexts:
            bad.append(f"bunch for unknown context {c!r}")
            continue
        if bunch.contents != sys.contexts[c]:
            bad.append(
                f"bunch for context {c!r} lists contents {bunch.contents!r}, "
                f"context declares {sys.contexts[c]!r}"
            )
            continue
        value_sets = [sys.contents.get(q) for q in bunch.contents]
        for state, mass in bunch.masses.items():
            if mass < 0:
                bad.append(f"negative mass {mass} at state {state!r} in context {c!r}")
            for q, v, vs in zip(bunch.contents, state, value_sets):
                if vs is not None and v not in vs:
                    bad.append(
                        f"value-set mismatch: content {q!r} takes value {v!r} "
                        f"in context {c!r}, allowed values {vs.labels!r}"
                    )
        total = bunch.total_mass()
        if total != 1:
            bad.append(f"mass sum != 1 in context {c!r}: {format_rational(total)}")
    return ValidationReport(tuple(bad))


def bunch_marginal(bunch: BunchDistribution, subset: Sequence[str]) -> BunchDistribution:
    """Marginalize a bunch onto a subset of its contents (caller's order)."""
    positions = []
    for q in subset:
        if q not in bunch.contents:
            raise KeyError(f"content {q!r} not measured in context {bunch.context!r}")
        positions.append(bunch.contents.index(q))
    acc: dict[tuple[str, ...], Fraction] = {}
    for state, mass in bunch.masses.items():
        key = tuple(state[i] for i in positions)
        acc[key] = acc.get(key, ZERO) + mass
    return BunchDistribution(bunch.context, tuple(subset), acc)


def connection_marginals(
    sys: System, content: str
) -> list[tuple[str, BunchDistribution]]:
    """Single-variable distributions of one content in every context measuring it.

    Contexts come back in lexicographic id order, so the result is stable
    across runs and across machines.
    """
    if content not in sys.contents:
        raise KeyError(f"unknown content {content!r}")
    out = []
    for c in sys.contexts_measuring(content):
        out.append((c, bunch_marginal(sys.bunches[c], [content])))
    return out


def remove_context(sys: System, context: str) -> System:
    """Delete one context; contents left unmeasured disappear with it."""
    if context not in sys.contexts:
        raise KeyError(f"unknown context {context!r}")
    contexts = {c: qs for c, qs in sys.contexts.items() if c != context}
    bunches = {c: b for c, b in sys.bunches.items() if c != context}
    kept = {q for qs in contexts.values() for q in qs}
    contents = {q: v for q, v in sys.contents.items() if q in kept}
    return System(contents, contexts, bunches)


def remove_content(sys: System, content: str) -> System:
    """Delete one content everywhere; contexts left empty disappear."""
    if content not in sys.contents:
        raise KeyError(f"unknown content {content!r}")
    contexts: dict[str, tuple[str, ...]] = {}
    bunches: dict[str, BunchDistribution] = {}
    for c, qs in sys.contexts.items():
        rest = tuple(q for q in qs if q != content)
        if not rest:
            continue
        contexts[c] = rest
        bunches[c] = bunch_marginal(sys.bunches[c], rest)
    contents = {q: v for q, v in sys.contents.items() if q != content}
    return System(contents, contexts, bunches)


def system_from_dict(obj: Mapping[str, Any]) -> System:
    """Build a System from the JSON file schema.

    Schema: {"contents": [{"id", "values"}...],
             "contexts": [{"id", "measures", "distribution"}...]} where each
    distribution entry is {"state": {contentId: value, ...}, "p": string}.
    States omitted from a distribution have mass zero.
    """
    try:
        contents = {
            str(entry["id"]): ValueSet(tuple(entry["values"]))
            for entry in obj["contents"]
        }
        contexts: dict[str, tuple[str, ...]] = {}
        bunches: dict[str, BunchDistribution] = {}
        for entry in obj["contexts"]:
            cid = str(entry["id"])
            measures = tuple(str(q) for q in entry["measures"])
            masses: dict[tuple[str, ...], Fraction] = {}
            for item in entry.get("distribution", ()):
                state = item["state"]
                key = tuple(str(state[q]) for q in measures)
                masses[key] = masses.get(key, ZERO) + parse_rational(item["p"])
            contexts[cid] = measures
            bunches[cid] = BunchDistribution(cid, measures, masses)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed system object: {exc}") from exc
    return System(contents, contexts, bunches)


def system_to_dict(sys: System) -> dict[str, Any]:
    """Inverse of ``system_from_dict``; masses render as "a/b" strings."""
    return {
        "contents": [
            {"id": q, "values": list(vs.labels)} for q, vs in sys.contents.items()
        ],
        "contexts": [
            {
                "id": c,
                "measures": list(qs),
                "distribution": [
                    {
                        "state": {q: v for q, v in zip(qs, state)},
                        "p": format_rational(mass),
                    }
                    for state, mass in sys.bunches[c].masses.items()
                ],
            }
            for c, qs in sys.contexts.items()
        ],
    }
