"""Brute-force reference solvers.

Everything here enumerates, with no shared machinery beyond the raw metric:
these are the oracles the clever solvers are tested against, so they must
stay independently simple. All of them are guarded against oversized inputs.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Optional, Sequence

from .model import (
    SizeGuard,
    Solution,
    SpiderInstance,
    distance,
)
from .reductions import ArrearsInstance, check_arrears

DEFAULT_PARTITION_GUARD = 12
DEFAULT_ARREARS_GUARD = 2_000_000


def iter_min_size_partitions(n: int, r: int) -> Iterator[list[tuple[int, ...]]]:
    """Yield every partition of range(n) into blocks of size >= r, each once.

    Blocks come out in order of their smallest element, members ascending.
    Branches that cannot reach all-blocks-full anymore are cut early.
    """
    if n == 0:
        yield []
        return
    blocks: list[list[int]] = []

    def rec(i: int) -> Iterator[list[tuple[int, ...]]]:
        remaining = n - i
        deficit = sum(r - len(b) for b in blocks if len(b) < r)
        if deficit > remaining:
            return
        if remaining == 0:
            yield [tuple(b) for b in blocks]
            return
        for b in blocks:
            b.append(i)
            yield from rec(i + 1)
            b.pop()
        blocks.append([i])
        yield from rec(i + 1)
        blocks.pop()

    yield from rec(0)


def brute_clustering(
    instance: SpiderInstance, *, guard: int = DEFAULT_PARTITION_GUARD
) -> Optional[Solution]:
    """Optimal min-max diameter clustering by full partition enumeration.

    None when no partition into clusters of size >= r exists (n < r). The
    witness is the first optimal partition in enumeration order.
    """
    n = len(instance.users)
    if n > guard:
        raise SizeGuard(f"brute_clustering limited to {guard} users, got {n}")
    if n < instance.r:
        return None
    best_value: Optional[int] = None
    best_partition: Optional[list[tuple[int, ...]]] = None
    for partition in iter_min_size_partitions(n, instance.r):
        value = 0
        for block in partition:
            for a in range(len(block)):
                for b in range(a + 1, len(block)):
                    dist = distance(instance.users[block[a]], instance.users[block[b]])
                    if dist > value:
                        value = dist
        if best_value is None or value < best_value:
            best_value = value
            best_partition = partition
    if best_value is None:
        return None
    return Solution(clusters=tuple(best_partition or ()), value=best_value)


def brute_gathering(
    instance: SpiderInstance, *, guard: int = DEFAULT_PARTITION_GUARD
) -> Optional[Solution]:
    """Optimal min-max radius gathering by full enumeration.

    Every partition is combined with the best facility per cluster (ties to
    the smallest facility index). None when n < r or there is no facility.
    """
    n = len(instance.users)
    if n > guard:
        raise SizeGuard(f"brute_gathering limited to {guard} users, got {n}")
    facilities = instance.facilities or ()
    if n < instance.r or not facilities:
        return None
    best_value: Optional[int] = None
    best_partition: Optional[list[tuple[int, ...]]] = None
    best_assignment: Optional[list[int]] = None
    for partition in iter_min_size_partitions(n, instance.r):
        value = 0
        assignment: list[int] = []
        for block in partition:
            block_best: Optional[tuple[int, int]] = None
            for fidx, f in enumerate(facilities):
                radius = max(distance(instance.users[i], f) for i in block)
                if block_best is None or radius < block_best[0]:
                    block_best = (radius, fidx)
            assert block_best is not None
            assignment.append(block_best[1])
            if block_best[0] > value:
                value = block_best[0]
        if best_value is None or value < best_value:
            best_value = value
            best_partition = partition
            best_assignment = assignment
    if best_value is None:
        return None
    return Solution(
        clusters=tuple(best_partition or ()),
        value=best_value,
        facility_of=tuple(best_assignment or ()),
    )


def brute_arrears(
    arrears: ArrearsInstance, *, guard: int = DEFAULT_ARREARS_GUARD
) -> Optional[tuple[int, ...]]:
    """First feasible choice vector for an arrears instance, or None.

    Tries every combination of per-duty options in lexicographic order of the
    (1-based) choice indices.
    """
    space = 1
    for options in arrears.duties:
        space *= len(options)
        if space > guard:
            raise SizeGuard(f"brute_arrears limited to {guard} choice vectors")
    for z in itertools.product(*(range(1, len(opts) + 1) for opts in arrears.duties)):
        if check_arrears(arrears, z).feasible:
            return z
    return None
