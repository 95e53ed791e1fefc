"""Randomized instance generation and oracle agreement sweeps.

Instances are generated from integer compositions of a fixed denominator,
so every distribution is exact and sums to one by construction. Seeds are
stretched through SHA-256, which makes every instance reproducible across
runs, platforms, and Python versions.

The centerpiece is the equivalence sweep: for each random two-context
instance, the closed-form dominance criterion, the 1-2 LP, and the
all-splits LP must return the same verdict, and whenever they are
feasible the LP witness must coincide with the explicitly constructed
coupling (which is the entire feasible set). Any disagreement is an
implementation bug and gets reported verbatim.
"""
from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .canonical import ValueSet
from .systems import BunchDistribution, System
from .two_connection import (
    TwoConnectionInstance,
    construct_12_coupling,
    lp_cross_check,
    nominally_dominates,
)

__all__ = [
    "derive_seed",
    "random_two_connection",
    "random_binary_system",
    "random_noncontextual_binary_system",
    "SweepReport",
    "equivalence_sweep",
]

ZERO = Fraction(0)
BITS = ValueSet(("0", "1"))


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labeled parts."""
    payload = "::".join(str(p) for p in parts).encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def _random_composition(rng: random.Random, cells: int, total: int) -> list[int]:
    """Uniform bars-and-stars composition of `total` into `cells` parts."""
    cuts = sorted(rng.randint(0, total) for _ in range(cells - 1))
    bounds = [0] + cuts + [total]
    return [bounds[i + 1] - bounds[i] for i in range(cells)]


def _random_distribution(
    rng: random.Random, cells: int, denominator: int
) -> list[Fraction]:
    return [
        Fraction(part, denominator)
        for part in _random_composition(rng, cells, denominator)
    ]


def random_two_connection(
    k: int, max_denominator: int, seed: int
) -> TwoConnectionInstance:
    """Seeded random pair of exact k-point distributions."""
    if k < 2:
        raise ValueError("need k >= 2")
    if max_denominator < k:
        raise ValueError("max_denominator must be at least k")
    rng = random.Random(seed)
    p = _random_distribution(rng, k, max_denominator)
    q = _random_distribution(rng, k, max_denominator)
    return TwoConnectionInstance.from_vectors(p, q)


def _boundary_variant(
    rng: random.Random, inst: TwoConnectionInstance
) -> TwoConnectionInstance:
    """Push an instance onto a boundary: ties with p, or extra zeros."""
    p = list(inst.p)
    q = list(p)
    kind = rng.randrange(3)
    if kind == 0:
        pass  # q = p exactly: mutual dominance
    elif kind == 1:
        i, j = rng.sample(range(inst.k), 2)
        q[i], q[j] = q[j], q[i]
    else:
        i, j = rng.sample(range(inst.k), 2)
        q[j] += q[i]
        q[i] = ZERO
    return TwoConnectionInstance.from_vectors(p, q)


@dataclass(frozen=True)
class SweepReport:
    k_values: tuple[int, ...]
    count: int
    seed: int
    instances: int
    agreements: int
    first_counterexample: str | None
    wall_time: float

    @property
    def ok(self) -> bool:
        return self.agreements == self.instances

    def to_dict(self, include_timing: bool = False) -> dict:
        # Timing is excluded by default so that equal (k, count, seed)
        # inputs serialize to identical bytes.
        out = {
            "k_values": list(self.k_values),
            "count": self.count,
            "seed": self.seed,
            "instances": self.instances,
            "agreements": self.agreements,
            "first_counterexample": self.first_counterexample,
        }
        if include_timing:
            out["wall_time_s"] = self.wall_time
        return out


def _check_instance(inst: TwoConnectionInstance) -> str | None:
    """Three-way verdict agreement plus witness uniqueness; None when clean."""
    dominance = nominally_dominates(inst.p, inst.q) or nominally_dominates(
        inst.q, inst.p
    )
    v12 = lp_cross_check(inst, 2)
    vall = lp_cross_check(inst, "all")
    if not (dominance == v12.feasible == vall.feasible):
        return (
            f"verdict disagreement: dominance={dominance} "
            f"lp12={v12.feasible} lp_all={vall.feasible}"
        )
    if dominance:
        built = construct_12_coupling(inst)
        if built is None:
            return "dominance holds but construction returned none"
        for verdict, label in ((v12, "lp12"), (vall, "lp_all")):
            if verdict.coupling.entries != built.entries:
                return f"{label} witness differs from the unique coupling"
    return None


def equivalence_sweep(
    k_values: Sequence[int], count: int, seed: int, max_denominator: int = 20
) -> SweepReport:
    """Run the agreement check over seeded random instances.

    Every tenth instance is pushed onto a boundary (ties between the two
    distributions, or extra zeros) before checking; degenerate inputs are
    where verdict code usually breaks.
    """
    start = time.perf_counter()
    instances = 0
    agreements = 0
    first_counterexample: str | None = None
    for k in k_values:
        for i in range(count):
            inst = random_two_connection(
                k, max_denominator, derive_seed(seed, k, i)
            )
            if i % 10 == 9:
                rng = random.Random(derive_seed(seed, k, i, "boundary"))
                inst = _boundary_variant(rng, inst)
            instances += 1
            failure = _check_instance(inst)
            if failure is None:
                agreements += 1
            elif first_counterexample is None:
                first_counterexample = (
                    f"k={k} index={i} p={[str(v) for v in inst.p]} "
                    f"q={[str(v) for v in inst.q]}: {failure}"
                )
    return SweepReport(
        k_values=tuple(k_values),
        count=count,
        seed=seed,
        instances=instances,
        agreements=agreements,
        first_counterexample=first_counterexample,
        wall_time=time.perf_counter() - start,
    )


# -- random binary systems ------------------------------------------------


def _cyclic_contexts(
    num_contents: int, num_contexts: int, context_size: int
) -> dict[str, tuple[str, ...]]:
    names = [f"q{i}" for i in range(num_contents)]
    out = {}
    for c in range(num_contexts):
        members = tuple(
            names[(c + t) % num_contents] for t in range(context_size)
        )
        out[f"c{c}"] = members
    return out


def random_binary_system(
    seed: int,
    num_contents: int = 4,
    num_contexts: int = 4,
    context_size: int = 2,
    denominator: int = 12,
) -> System:
    """Random all-binary system with overlapping cyclic contexts.

    Bunches are independent random distributions, so the system may or
    may not be contextual; use the noncontextual generator when a known
    verdict is needed.
    """
    if not 1 <= context_size <= num_contents:
        raise ValueError("context_size out of range")
    rng = random.Random(seed)
    contexts = _cyclic_contexts(num_contents, num_contexts, context_size)
    contents = {f"q{i}": BITS for i in range(num_contents)}
    bunches = {}
    for c, qs in contexts.items():
        cells = 1 << len(qs)
        dist = _random_distribution(rng, cells, denominator)
        masses = {
            tuple(f"{(s >> t) & 1}" for t in range(len(qs))): mass
            for s, mass in enumerate(dist)
        }
        bunches[c] = BunchDistribution(c, qs, masses)
    return System(contents, contexts, bunches)


def random_noncontextual_binary_system(
    seed: int,
    num_contents: int = 4,
    num_contexts: int = 4,
    context_size: int = 2,
    denominator: int = 12,
) -> System:
    """Random all-binary system that is noncontextual by construction.

    All bunches are marginals of one hidden joint distribution over the
    contents. Each connection then has identical marginals everywhere, its
    multimaximal coupling is the almost-sure-equal one, and the hidden
    joint itself provides the connected coupling.
    """
    if not 1 <= context_size <= num_contents:
        raise ValueError("context_size out of range")
    rng = random.Random(seed)
    contexts = _cyclic_contexts(num_contents, num_contexts, context_size)
    contents = {f"q{i}": BITS for i in range(num_contents)}
    cells = 1 << num_contents
    hidden = _random_distribution(rng, cells, denominator)
    bunches = {}
    for c, qs in contexts.items():
        positions = [int(q[1:]) for q in qs]
        masses: dict[tuple[str, ...], Fraction] = {}
        for s, mass in enumerate(hidden):
            if mass == 0:
                continue
            key = tuple(f"{(s >> pos) & 1}" for pos in positions)
            masses[key] = masses.get(key, ZERO) + mass
        bunches[c] = BunchDistribution(c, qs, masses)
    return System(contents, contexts, bunches)
