"""System expansion: new contents computed from existing ones.

Two expansion shapes cover everything: *joining*, which adds the tuple of
several same-context variables as a new variable, and *coarsening*, which
adds the image of one variable under a partition of its value set. Any
other pointwise transformation factors as joining followed by coarsening,
so no general-function API is offered.

Expansions never disturb what is already there: marginalizing an expanded
bunch back onto the old contents reproduces the old bunch exactly, and the
new coordinate of every support state is a deterministic function of the
old coordinates.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .systems import BunchDistribution, System, ValueSet

__all__ = [
    "Partition",
    "parse_partition",
    "enumerate_partitions",
    "expand_join",
    "expand_coarsen",
    "expand_all_coarsenings",
    "ALL_SCHEME_MAX_VALUES",
]

# Set-partition counts grow like Bell numbers; scheme="all" is capped to
# keep enumeration at desk scale (Bell(10) = 115975).
ALL_SCHEME_MAX_VALUES = 10


def _compound_label(parts: Sequence[str], seen: set[str] | None = None) -> str:
    """Label for a tuple/block of values: concatenated when unambiguous."""
    joined = "".join(parts)
    if all(len(p) == 1 for p in parts):
        return joined
    return ",".join(parts)


@dataclass(frozen=True)
class Partition:
    """Partition of a value set into at least two disjoint covering blocks.

    Blocks are normalized: values inside a block follow the value-set
    order, and blocks are sorted by their earliest value. The normalized
    form doubles as the signature used to generate content ids.
    """

    blocks: tuple[tuple[str, ...], ...]

    @staticmethod
    def from_blocks(blocks: Iterable[Iterable[str]], values: ValueSet) -> "Partition":
        pos = {v: i for i, v in enumerate(values.labels)}
        norm = []
        seen: set[str] = set()
        for block in blocks:
            block = [str(v) for v in block]
            if not block:
                raise ValueError("empty block in partition")
            for v in block:
                if v not in pos:
                    raise ValueError(f"value {v!r} not in value set {values.labels!r}")
                if v in seen:
                    raise ValueError(f"value {v!r} appears in two blocks")
                seen.add(v)
            norm.append(tuple(sorted(block, key=pos.__getitem__)))
        if seen != set(values.labels):
            missing = sorted(set(values.labels) - seen, key=pos.__getitem__)
            raise ValueError(f"partition does not cover values {missing!r}")
        if len(norm) < 2:
            raise ValueError("trivial one-block partition is excluded")
        norm.sort(key=lambda b: pos[b[0]])
        return Partition(tuple(norm))

    def signature(self) -> str:
        return "|".join(",".join(block) for block in self.blocks)

    def block_of(self, value: str) -> tuple[str, ...]:
        for block in self.blocks:
            if value in block:
                return block
        raise KeyError(f"value {value!r} not in partition")

    def is_discrete(self) -> bool:
        """True for the all-singletons partition (a relabeling, not a lumping)."""
        return all(len(b) == 1 for b in self.blocks)


def parse_partition(text: str, values: ValueSet) -> Partition:
    """Parse the CLI syntax: blocks split by "|", values by ",", e.g. "1,2|3"."""
    blocks = [part.split(",") for part in text.split("|")]
    return Partition.from_blocks([[v.strip() for v in b] for b in blocks], values)


def enumerate_partitions(values: ValueSet, scheme: str = "interval") -> list[Partition]:
    """All partitions of a value set with at least two blocks.

    scheme="interval": blocks are runs of consecutive values under the
    value-set order; there are 2**(k-1) - 1 of them. scheme="all": every
    set partition; there are Bell(k) - 1. Order is deterministic: by block
    count, then by block contents in value-set order.
    """
    k = len(values)
    if k < 2:
        raise ValueError("need at least 2 values to partition")
    labels = values.labels
    out: list[Partition] = []
    if scheme == "interval":
        # Each of the k-1 gaps is either a cut or not; "no cuts" is the
        # excluded one-block partition.
        for cuts in range(1, 1 << (k - 1)):
            blocks = []
            start = 0
            for gap in range(k - 1):
                if cuts >> gap & 1:
                    blocks.append(labels[start : gap + 1])
                    start = gap + 1
            blocks.append(labels[start:])
            out.append(Partition.from_blocks(blocks, values))
    elif scheme == "all":
        if k > ALL_SCHEME_MAX_VALUES:
            raise ValueError(
                f"scheme='all' capped at {ALL_SCHEME_MAX_VALUES} values, got {k}"
            )
        for blocks in _set_partitions(list(labels)):
            if len(blocks) >= 2:
                out.append(Partition.from_blocks(blocks, values))
    else:
        raise ValueError(f"unknown scheme {scheme!r}; use 'interval' or 'all'")
    pos = {v: i for i, v in enumerate(labels)}
    out.sort(
        key=lambda p: (
            len(p.blocks),
            tuple(tuple(pos[v] for v in b) for b in p.blocks),
        )
    )
    return out


def _set_partitions(items: list[str]):
    """Recursive set-partition enumeration: place each item into an existing
    block or open a new one."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for sub in _set_partitions(rest):
        for i in range(len(sub)):
            yield sub[:i] + [[first] + sub[i]] + sub[i + 1 :]
        yield [[first]] + sub


def expand_join(sys: System, contents: Sequence[str], new_content: str) -> System:
    """Add the tuple of several contents as a new content.

    The new variable appears exactly in the contexts measuring all of the
    joined contents; its value set is the full product of the component
    value sets, so it is shared across those contexts.
    """
    contents = [str(q) for q in contents]
    if len(contents) < 2:
        raise ValueError("joining needs at least two contents")
    if len(set(contents)) != len(contents):
        raise ValueError(f"cannot join a content with itself: {contents!r}")
    for q in contents:
        if q not in sys.contents:
            raise KeyError(f"unknown content {q!r}")
    if new_content in sys.contents:
        raise ValueError(f"content id {new_content!r} already in use")
    hosts = [c for c, qs in sys.contexts.items() if all(q in qs for q in contents)]
    if not hosts:
        raise ValueError(f"no context measures all of {contents!r}")

    def tuple_label(vals: Sequence[str]) -> str:
        return _compound_label(vals)

    product: list[tuple[str, ...]] = [()]
    for q in contents:
        product = [p + (v,) for p in product for v in sys.contents[q].labels]
    labels = [tuple_label(p) for p in product]
    if len(set(labels)) != len(labels):
        labels = [",".join(p) for p in product]
    joined_values = ValueSet(tuple(labels))
    label_of = {p: l for p, l in zip(product, labels)}

    new_contents = dict(sys.contents)
    new_contents[new_content] = joined_values
    new_contexts = dict(sys.contexts)
    new_bunches = dict(sys.bunches)
    for c in hosts:
        qs = sys.contexts[c]
        idx = [qs.index(q) for q in contents]
        masses = {
            state + (label_of[tuple(state[i] for i in idx)],): mass
            for state, mass in sys.bunches[c].masses.items()
        }
        new_contexts[c] = qs + (new_content,)
        new_bunches[c] = BunchDistribution(c, new_contexts[c], masses)
    return System(new_contents, new_contexts, new_bunches)


def expand_coarsen(
    sys: System, content: str, partition: Partition, new_content: str
) -> System:
    """Add the image of one content under a partition of its value set."""
    if content not in sys.contents:
        raise KeyError(f"unknown content {content!r}")
    if new_content in sys.contents:
        raise ValueError(f"content id {new_content!r} already in use")
    values = sys.contents[content]
    # Re-normalizing against the content's value set validates the blocks.
    partition = Partition.from_blocks(partition.blocks, values)
    coarse_labels = tuple(_compound_label(b) for b in partition.blocks)
    if len(set(coarse_labels)) != len(coarse_labels):
        coarse_labels = tuple(",".join(b) for b in partition.blocks)
    coarse_of = {
        v: coarse_labels[i] for i, b in enumerate(partition.blocks) for v in b
    }

    new_contents = dict(sys.contents)
    new_contents[new_content] = ValueSet(coarse_labels)
    new_contexts = dict(sys.contexts)
    new_bunches = dict(sys.bunches)
    for c, qs in sys.contexts.items():
        if content not in qs:
            continue
        pos = qs.index(content)
        masses = {
            state + (coarse_of[state[pos]],): mass
            for state, mass in sys.bunches[c].masses.items()
        }
        new_contexts[c] = qs + (new_content,)
        new_bunches[c] = BunchDistribution(c, new_contexts[c], masses)
    return System(new_contents, new_contexts, new_bunches)


def expand_all_coarsenings(sys: System, content: str, scheme: str = "interval") -> System:
    """Add one coarsening of a content per partition from the given scheme.

    Generated ids are "<content>:<partition signature>", so re-running the
    expansion is idempotent: existing ids are skipped. The all-singletons
    partition only relabels the original variable and is skipped too.
    """
    if content not in sys.contents:
        raise KeyError(f"unknown content {content!r}")
    out = sys
    for partition in enumerate_partitions(sys.contents[content], scheme):
        if partition.is_discrete():
            continue
        new_id = f"{content}:{partition.signature()}"
        if new_id in out.contents:
            continue
        out = expand_coarsen(out, content, partition, new_id)
    return out
