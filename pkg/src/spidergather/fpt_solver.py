"""Exact solver for min-max r-gather clustering and r-gathering on spiders.

Parameterized by the number of user-bearing legs d. The solver sweeps users
in ascending coordinate order while building at most one multi-leg cluster
at a time. A multi-leg cluster consists of a "ball" part (users near the
center, collected one by one during the sweep, at most 2r-1 of them) and a
"segment" part (a contiguous run on a single leg further out, committed in
one step when the cluster closes). Once a leg stops participating, its
remaining users are finished off by the single-leg suffix solver.

The DP state after the i-th swept user is (S, j, k): S the set of legs still
participating, j the size of the open ball, k the index of the last ball
user. An optimal solution only ever needs ball users among the first
min(n_l, (2r-1) d) users of each leg (there are at most d multi-leg
clusters, each with fewer than 2r ball users), so the sweep visits just
those; users beyond the cut can still appear in segments and suffix
completions, and legs still participating after the sweep are finished by a
final round of suffix completions.

The stored state count is what the parameter buys: the table is keyed by
subsets of legs times a polynomial number of (position, ball) combinations,
and infeasible entries are never stored.
"""

from __future__ import annotations

import logging
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional

from .cost_oracle import FacilityIndex, best_facility, cost_clustering, cost_gathering
from .line_suffix import SuffixRow, suffix_costs_clustering, suffix_costs_gathering
from .model import (
    Cost,
    INFEASIBLE,
    Normalized,
    PointOnSpider,
    SizeGuard,
    Solution,
    SpiderInstance,
    distance,
    normalize,
)

log = logging.getLogger(__name__)

CLUSTERING = "clustering"
GATHERING = "gathering"

DEFAULT_ENUM_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class SolveStats:
    """Size measurements of one DP run."""

    states: int  # value-table entries stored, all layers, infeasible never stored
    layers: int
    swept_users: int
    legs: int


@dataclass(frozen=True)
class DpRun:
    """Full result of one DP run: optimal value, witness, measurements."""

    value: Cost
    solution: Optional[Solution]
    stats: SolveStats


def prune(instance: SpiderInstance) -> tuple[int, ...]:
    """Positions of the users the DP sweeps, on a normalized instance.

    Per leg: its first min(n_l, (2r-1) d) users in coordinate order, where d
    counts user-bearing legs. Positions come back in global sorted order.
    The instance must already be in canonical user order (see normalize).
    """
    d_users = len({u.leg for u in instance.users})
    bound = (2 * instance.r - 1) * d_users
    taken: dict[int, int] = {}
    kept = []
    for pos, u in enumerate(instance.users):
        c = taken.get(u.leg, 0)
        if c < bound:
            kept.append(pos)
            taken[u.leg] = c + 1
    return tuple(kept)


@dataclass
class _Prep:
    """Shared precomputation on a normalized instance."""

    inst: SpiderInstance
    kind: str
    n: int
    r: int
    d_users: int
    points: tuple[PointOnSpider, ...]
    xs: list[int]
    legs: list[int]
    leg_members: list[list[int]]  # by leg-1: global positions, ascending
    rank_in_leg: list[int]
    suffix: list[SuffixRow]  # by leg-1
    fac_index: Optional[FacilityIndex]
    close_cost: Callable[[int, int], Cost]  # (ball-last position, segment-last position)

    def r_minus(self, pos: int) -> Cost:
        """Cost of finishing pos's leg single-leg from pos on (pos included)."""
        leg = self.legs[pos]
        members = self.leg_members[leg - 1]
        return self.suffix[leg - 1].values[len(members) - self.rank_in_leg[pos]]

    def r_plus(self, pos: int) -> Cost:
        """Cost of finishing pos's leg single-leg strictly after pos."""
        leg = self.legs[pos]
        members = self.leg_members[leg - 1]
        return self.suffix[leg - 1].values[len(members) - self.rank_in_leg[pos] - 1]


def _prepare(inst: SpiderInstance, kind: str) -> _Prep:
    if kind not in (CLUSTERING, GATHERING):
        raise ValueError(f"unknown problem kind {kind!r}")
    points = inst.users
    n = len(points)
    xs = [p.x for p in points]
    legs = [p.leg for p in points]
    d_users = max(legs, default=0)  # user-bearing legs are 1..d_users after normalize
    leg_members: list[list[int]] = [[] for _ in range(d_users)]
    rank_in_leg = [0] * n
    for pos, leg in enumerate(legs):
        rank_in_leg[pos] = len(leg_members[leg - 1])
        leg_members[leg - 1].append(pos)

    fac_index: Optional[FacilityIndex] = None
    suffix: list[SuffixRow] = []
    if kind == CLUSTERING:
        for members in leg_members:
            suffix.append(suffix_costs_clustering([xs[p] for p in members], inst.r))
        close_cost: Callable[[int, int], Cost] = lambda u, v: xs[u] + xs[v]
    else:
        fac_index = FacilityIndex(inst.facilities or ())
        for leg0, members in enumerate(leg_members):
            suffix.append(
                suffix_costs_gathering([xs[p] for p in members], leg0 + 1, fac_index, inst.r)
            )
        cache: dict[tuple[int, int, int], Cost] = {}
        index = fac_index

        def close_cost(u: int, v: int) -> Cost:
            key = (legs[v], xs[v], xs[u])
            val = cache.get(key)
            if val is None:
                val = cost_gathering(points[u], points[v], index)
                cache[key] = val
            return val

    return _Prep(
        inst=inst,
        kind=kind,
        n=n,
        r=inst.r,
        d_users=d_users,
        points=points,
        xs=xs,
        legs=legs,
        leg_members=leg_members,
        rank_in_leg=rank_in_leg,
        suffix=suffix,
        fac_index=fac_index,
        close_cost=close_cost,
    )


def run_dp(
    instance: SpiderInstance,
    kind: str = CLUSTERING,
    *,
    use_pruning: bool = True,
    want_solution: bool = True,
) -> DpRun:
    """Run the DP on any instance; see solve for the common entry point.

    With use_pruning=False the sweep visits every user (useful as a
    self-check; the answer must not change). With want_solution=False only
    the optimal value and stats are computed, which keeps memory flat.
    """
    norm = normalize(instance)
    prep = _prepare(norm.instance, kind)
    n, r, d_users = prep.n, prep.r, prep.d_users
    if n == 0:
        return DpRun(INFEASIBLE, None, SolveStats(0, 0, 0, 0))

    sweep = prune(norm.instance) if use_pruning else tuple(range(n))
    swept_per_leg = [0] * d_users
    for pos in sweep:
        swept_per_leg[prep.legs[pos] - 1] += 1
    # Cost of finishing each leg's unswept tail single-leg.
    tails: list[Cost] = [
        prep.suffix[leg0].values[len(prep.leg_members[leg0]) - swept_per_leg[leg0]]
        for leg0 in range(d_users)
    ]

    bits_k = (n + 1).bit_length()
    bits_j = (2 * r).bit_length()
    shift_s = bits_k + bits_j
    mask_jk = (1 << shift_s) - 1
    mask_k = (1 << bits_k) - 1
    full_s = (1 << d_users) - 1
    cap = 2 * r - 1

    init_key = full_s << shift_s
    layers: list[dict[int, Cost]] = [{init_key: 0}]
    preds: list[dict[int, tuple]] = [{}] if want_solution else []

    for i, u_pos in enumerate(sweep, start=1):
        u_leg = prep.legs[u_pos]
        u_bit = 1 << (u_leg - 1)
        prev = layers[-1]
        cur: dict[int, Cost] = {}
        prd: dict[int, tuple] = {}

        r_minus_u = prep.r_minus(u_pos)
        for key, val in prev.items():
            s = key >> shift_s
            if s & u_bit:
                j = (key & mask_jk) >> bits_k
                if j < cap:  # grow the ball with u
                    nkey = (key & ~mask_jk) + ((j + 1) << bits_k) + (u_pos + 1)
                    if nkey not in cur or val < cur[nkey]:
                        cur[nkey] = val
                        if want_solution:
                            prd[nkey] = ("b", key)
                if r_minus_u != INFEASIBLE:  # retire u's leg, finish it single-leg
                    nv = val if val >= r_minus_u else r_minus_u
                    nkey = key - (u_bit << shift_s)
                    if nkey not in cur or nv < cur[nkey]:
                        cur[nkey] = nv
                        if want_solution:
                            prd[nkey] = ("d", key)
            else:  # u's leg already retired; u was consumed earlier or will be later
                if key not in cur or val < cur[key]:
                    cur[key] = val
                    if want_solution:
                        prd[key] = ("c", key)

        # Close the open cluster: pick a segment of p users on a still-active
        # leg just beyond the current position.
        seg_options: list[list[tuple[int, int, Cost]]] = []
        for leg0 in range(d_users):
            members = prep.leg_members[leg0]
            start = bisect_right(members, u_pos)
            opts: list[tuple[int, int, Cost]] = []
            for p in range(1, cap):
                mi = start + p - 1
                if mi >= len(members):
                    break
                leftover = prep.suffix[leg0].values[len(members) - mi - 1]
                if leftover != INFEASIBLE:
                    opts.append((p, members[mi], leftover))
            seg_options.append(opts)

        for key, val in list(cur.items()):
            j = (key & mask_jk) >> bits_k
            if j == 0:
                continue
            s = key >> shift_s
            k_pos = (key & mask_k) - 1
            p_lo = r - j if r > j else 1
            p_hi = cap - j
            m = s
            while m:
                l_bit = m & -m
                m ^= l_bit
                leg0 = l_bit.bit_length() - 1
                for p, v_pos, leftover in seg_options[leg0]:
                    if p < p_lo or p > p_hi:
                        continue
                    cost = prep.close_cost(k_pos, v_pos)
                    if cost == INFEASIBLE:
                        continue
                    nv = val
                    if cost > nv:
                        nv = cost
                    if leftover > nv:
                        nv = leftover
                    nkey = (s ^ l_bit) << shift_s
                    if nkey not in cur or nv < cur[nkey]:
                        cur[nkey] = nv
                        if want_solution:
                            prd[nkey] = ("x", key, leg0 + 1, p)

        layers.append(cur)
        if want_solution:
            preds.append(prd)

    # Legs still active consumed all their swept users in balls; finish their
    # unswept tails single-leg.
    final = layers[-1]
    fprd = preds[-1] if want_solution else None
    levels: dict[int, list[int]] = {}
    for key in final:
        if key & mask_jk == 0:
            levels.setdefault((key >> shift_s).bit_count(), []).append(key)
    for count in range(d_users, 0, -1):
        for key in levels.get(count, []):
            val = final[key]
            s = key >> shift_s
            m = s
            while m:
                l_bit = m & -m
                m ^= l_bit
                tail = tails[l_bit.bit_length() - 1]
                if tail == INFEASIBLE:
                    continue
                nv = val if val >= tail else tail
                nkey = (s ^ l_bit) << shift_s
                old = final.get(nkey)
                if old is None or nv < old:
                    if old is None:
                        levels.setdefault(count - 1, []).append(nkey)
                    final[nkey] = nv
                    if fprd is not None:
                        fprd[nkey] = ("t", key, l_bit.bit_length())

    stats = SolveStats(
        states=sum(len(layer) for layer in layers),
        layers=len(layers),
        swept_users=len(sweep),
        legs=d_users,
    )
    value = final.get(0, INFEASIBLE)
    if value == INFEASIBLE or not want_solution:
        return DpRun(value, None, stats)

    solution = _reconstruct(prep, norm, sweep, swept_per_leg, layers, preds, value)
    return DpRun(value, solution, stats)


def _emit_suffix(prep: _Prep, leg: int, start_rank: int, clusters: list[list[int]]) -> None:
    members = prep.leg_members[leg - 1]
    row = prep.suffix[leg - 1]
    k = len(members) - start_rank
    while k > 0:
        t = row.first_size[k]
        assert t > 0, "suffix reconstruction on an infeasible row"
        start = len(members) - k
        clusters.append(list(members[start : start + t]))
        k -= t


def _reconstruct(
    prep: _Prep,
    norm: Normalized,
    sweep: tuple[int, ...],
    swept_per_leg: list[int],
    layers: list[dict[int, Cost]],
    preds: list[dict[int, tuple]],
    value: Cost,
) -> Solution:
    # Walk the predecessor records back to the initial state...
    records: list[tuple[int, tuple]] = []
    layer = len(layers) - 1
    key = 0
    init_key = ((1 << prep.d_users) - 1) << ((prep.n + 1).bit_length() + (2 * prep.r).bit_length())
    while not (layer == 0 and key == init_key):
        rec = preds[layer][key]
        records.append((layer, rec))
        key = rec[1]
        if rec[0] in ("b", "d", "c"):
            layer -= 1
    records.reverse()

    # ...then replay them forward, materializing clusters as they complete.
    clusters: list[list[int]] = []
    ball: list[int] = []
    for layer, rec in records:
        tag = rec[0]
        if tag == "b":
            ball.append(sweep[layer - 1])
        elif tag == "c":
            pass
        elif tag == "d":
            pos = sweep[layer - 1]
            _emit_suffix(prep, prep.legs[pos], prep.rank_in_leg[pos], clusters)
        elif tag == "x":
            leg, p = rec[2], rec[3]
            members = prep.leg_members[leg - 1]
            start = bisect_right(members, sweep[layer - 1])
            clusters.append(ball + members[start : start + p])
            ball = []
            _emit_suffix(prep, leg, start + p, clusters)
        else:  # "t"
            leg = rec[2]
            _emit_suffix(prep, leg, swept_per_leg[leg - 1], clusters)
    assert not ball, "open ball left after replay"

    facility_of: Optional[list[int]] = None
    check = 0
    if prep.kind == GATHERING:
        facility_of = []
        assert prep.fac_index is not None
        for cluster in clusters:
            found = best_facility([prep.points[p] for p in cluster], prep.fac_index)
            assert found is not None
            facility_of.append(found[0])
            check = max(check, found[1])
    else:
        for cluster in clusters:
            for a in range(len(cluster)):
                for b in range(a + 1, len(cluster)):
                    check = max(
                        check, distance(prep.points[cluster[a]], prep.points[cluster[b]])
                    )
    if check != value:
        raise RuntimeError(
            f"reconstructed solution costs {check}, table says {value}"
        )

    mapped = [sorted(norm.user_order[p] for p in c) for c in clusters]
    order = sorted(range(len(mapped)), key=lambda ci: mapped[ci][0])
    out_clusters = tuple(tuple(mapped[ci]) for ci in order)
    out_facilities: Optional[tuple[int, ...]] = None
    if facility_of is not None:
        out_facilities = tuple(norm.facility_order[facility_of[ci]] for ci in order)
    assert isinstance(value, int)
    return Solution(clusters=out_clusters, value=value, facility_of=out_facilities)


def solve(
    instance: SpiderInstance, kind: str = CLUSTERING, *, use_pruning: bool = True
) -> Optional[Solution]:
    """Optimal solution for an instance, or None when infeasible.

    Cluster and facility indices in the result refer to the instance's own
    ordering. The reported value is exact.
    """
    return run_dp(instance, kind, use_pruning=use_pruning).solution


def enumerate_suffix_special(
    instance: SpiderInstance,
    kind: str = CLUSTERING,
    *,
    node_budget: int = DEFAULT_ENUM_NODE_BUDGET,
) -> Cost:
    """Optimal value by exhaustive search over multi-leg cluster families.

    Follows the same sweep as the DP but materializes every choice path,
    costing finished clusters directly from the metric (no closing-cost
    shortcuts) and finishing retired legs with the suffix tables. Small
    instances only; raises SizeGuard beyond node_budget search nodes.
    """
    norm = normalize(instance)
    prep = _prepare(norm.instance, kind)
    n, r = prep.n, prep.r
    if n == 0:
        return INFEASIBLE
    cap = 2 * r - 1
    facilities = norm.instance.facilities or ()

    def true_cost(members: list[int]) -> Cost:
        pts = [prep.points[p] for p in members]
        if kind == CLUSTERING:
            worst = 0
            for a in range(len(pts)):
                for b in range(a + 1, len(pts)):
                    worst = max(worst, distance(pts[a], pts[b]))
            return worst
        best: Cost = INFEASIBLE
        for f in facilities:
            radius = max(distance(p, f) for p in pts)
            if radius < best:
                best = radius
        return best

    best: Cost = INFEASIBLE
    nodes = 0

    def rec(i: int, s: int, ball: tuple[int, ...], acc: Cost) -> None:
        nonlocal best, nodes
        nodes += 1
        if nodes > node_budget:
            raise SizeGuard(f"enumeration exceeded {node_budget} nodes")
        if acc >= best:
            return
        if i == n:
            if not ball:
                best = acc
            return
        leg_bit = 1 << (prep.legs[i] - 1)
        variants: list[tuple[int, tuple[int, ...], Cost]] = []
        if s & leg_bit:
            if len(ball) < cap:
                variants.append((s, ball + (i,), acc))
            r_minus = prep.r_minus(i)
            if r_minus != INFEASIBLE:
                nv = acc if acc >= r_minus else r_minus
                if nv < best:
                    variants.append((s ^ leg_bit, ball, nv))
        else:
            variants.append((s, ball, acc))
        for s1, ball1, acc1 in variants:
            if len(ball1) < cap:
                rec(i + 1, s1, ball1, acc1)
            if ball1:
                j = len(ball1)
                p_lo = r - j if r > j else 1
                m = s1
                while m:
                    l_bit = m & -m
                    m ^= l_bit
                    leg0 = l_bit.bit_length() - 1
                    members = prep.leg_members[leg0]
                    start = bisect_right(members, i)
                    for p in range(p_lo, cap - j + 1):
                        mi = start + p - 1
                        if mi >= len(members):
                            break
                        leftover = prep.suffix[leg0].values[len(members) - mi - 1]
                        if leftover == INFEASIBLE:
                            continue
                        cost = true_cost(list(ball1) + members[start : start + p])
                        nv = acc1
                        if cost > nv:
                            nv = cost
                        if leftover > nv:
                            nv = leftover
                        if nv < best:
                            rec(i + 1, s1 ^ l_bit, (), nv)

    rec(0, (1 << prep.d_users) - 1, (), 0)
    return best
