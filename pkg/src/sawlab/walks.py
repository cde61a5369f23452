"""Exact backtracking enumeration of SAWs, half-space walks, and bridges.

All counts are exact Python integers.  A walk of length n relative to a
height function h and start vertex v is

* a *half-space walk* if every non-initial height exceeds h(v),
* a *bridge* if in addition no height exceeds the final one, and
* a *reversed bridge* under the mirrored condition.

``decompose`` splits a half-space walk into alternating bridges and
reversed bridges with strictly decreasing spans, following the recursion
that extracts at each step the largest remaining signed height excursion
and breaks at its last maximizer.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass
from typing import Iterator, Literal

from .errors import ResourceBudgetError, UsageError, budget
from .families import GraphFamily, Label
from .heights import HeightFunction

WalkKind = Literal["saw", "halfspace", "bridge"]


@dataclass(frozen=True)
class Walk:
    vertices: tuple[Label, ...]

    def __len__(self) -> int:
        return len(self.vertices) - 1


def make_walk(family: GraphFamily, vertices) -> Walk:
    """Build a walk, checking adjacency and self-avoidance."""
    vs = tuple(vertices)
    if not vs:
        raise UsageError("a walk needs at least one vertex")
    if len(set(vs)) != len(vs):
        raise UsageError("walk revisits a vertex")
    for a, b in zip(vs, vs[1:]):
        if b not in family.neighbors(a):
            raise UsageError(f"walk step {a!r} -> {b!r} is not an edge")
    return Walk(vs)


def span(hf: HeightFunction, w: Walk) -> int:
    """Max height minus min height over the walk's vertices."""
    hs = [hf.evaluate(v) for v in w.vertices]
    return max(hs) - min(hs)


def is_halfspace(hf: HeightFunction, w: Walk) -> bool:
    h0 = hf.evaluate(w.vertices[0])
    return all(hf.evaluate(v) > h0 for v in w.vertices[1:])


def is_bridge(hf: HeightFunction, w: Walk) -> bool:
    hs = [hf.evaluate(v) for v in w.vertices]
    return all(hs[0] < h <= hs[-1] for h in hs[1:])


def is_reversed_bridge(hf: HeightFunction, w: Walk) -> bool:
    hs = [hf.evaluate(v) for v in w.vertices]
    return all(hs[-1] <= h < hs[0] for h in hs[1:])


# ---------------------------------------------------------------------------
# counting

class _BudgetHit(Exception):
    pass


def _deepen(count_one_level, n_max, node_budget):
    """Iterative deepening under a node budget: levels are completed in
    order, so a budget hit yields a clean partial table whose length is the
    high-water mark plus one."""
    counts = []
    spent = 0
    for n in range(n_max + 1):
        try:
            level, used = count_one_level(n, node_budget - spent)
        except _BudgetHit:
            break
        counts.append(level)
        spent += used
    return counts


def _count_saws_from(family, start, n_max, prefix=None):
    """counts[d] = number of SAWs of length d extending the prefix (or from
    start); when a prefix of length p is given, only depths > p are filled."""
    neighbors = family.neighbors
    counts = [0] * (n_max + 1)
    path = list(prefix) if prefix else [start]
    used = set(path)
    base = len(path) - 1

    def go(v, depth):
        counts[depth] += 1
        if depth == n_max:
            return
        for u in neighbors(v):
            if u not in used:
                used.add(u)
                go(u, depth + 1)
                used.discard(u)

    go(path[-1], base)
    if prefix:
        counts[base] = 0
    return counts


def _count_halfspace_from(family, hf, start, n_max, prefix=None):
    neighbors, ev = family.neighbors, hf.evaluate
    counts = [0] * (n_max + 1)
    path = list(prefix) if prefix else [start]
    used = set(path)
    h0 = ev(path[0])
    base = len(path) - 1

    def go(v, depth):
        counts[depth] += 1
        if depth == n_max:
            return
        for u in neighbors(v):
            if u not in used and ev(u) > h0:
                used.add(u)
                go(u, depth + 1)
                used.discard(u)

    go(path[-1], base)
    if prefix:
        counts[base] = 0
    return counts


def _count_bridges_from(family, hf, start, n_max, prefix=None):
    """Bridges of each length: half-space pruning during the search, with the
    final-maximum condition checked at emission via the running maximum."""
    neighbors, ev = family.neighbors, hf.evaluate
    counts = [0] * (n_max + 1)
    spans = [dict() for _ in range(n_max + 1)]
    path = list(prefix) if prefix else [start]
    used = set(path)
    h0 = ev(path[0])
    base = len(path) - 1
    run_max = max(ev(v) for v in path)

    def go(v, depth, hi):
        hv = ev(v)
        if hv == hi:
            counts[depth] += 1
            s = hv - h0
            spans[depth][s] = spans[depth].get(s, 0) + 1
        if depth == n_max:
            return
        for u in neighbors(v):
            if u not in used and ev(u) > h0:
                used.add(u)
                go(u, depth + 1, max(hi, ev(u)))
                used.discard(u)

    go(path[-1], base, run_max)
    if prefix:
        counts[base] = 0
        spans[base] = {}
    return counts, spans


def _budgeted_level(family, hf, start, n, mode, node_budget):
    """Count walks of length exactly n under a node budget (used only on
    the budget-protected path)."""
    neighbors = family.neighbors
    ev = hf.evaluate if hf is not None else None
    h0 = ev(start) if ev else 0
    state = {"nodes": 0, "count": 0}
    spans: dict = {}

    def go(v, depth, hi):
        state["nodes"] += 1
        if state["nodes"] > node_budget:
            raise _BudgetHit
        if depth == n:
            if mode == "bridge":
                hv = ev(v)
                if hv == hi:
                    state["count"] += 1
                    spans[hv - h0] = spans.get(hv - h0, 0) + 1
            else:
                state["count"] += 1
            return
        for u in neighbors(v):
            if u not in used and (mode == "saw" or ev(u) > h0):
                used.add(u)
                go(u, depth + 1, hi if mode != "bridge" else max(hi, ev(u)))
                used.discard(u)

    used = {start}
    go(start, 0, h0)
    return (state["count"], spans), state["nodes"]


def _saw_prefixes(family, hf, start, depth, mode):
    """All SAW prefixes of length exactly `depth` honoring the mode's prune
    rule, in deterministic neighbor order."""
    h0 = hf.evaluate(start) if hf is not None else 0
    out = []

    def go(path, used):
        if len(path) - 1 == depth:
            out.append(tuple(path))
            return
        for u in family.neighbors(path[-1]):
            if u in used:
                continue
            if mode in ("halfspace", "bridge") and hf.evaluate(u) <= h0:
                continue
            path.append(u)
            used.add(u)
            go(path, used)
            used.discard(u)
            path.pop()

    go([start], {start})
    return out


def _worker_counts(args):
    from .families import parse_family
    from .heights import parse_height
    family_spec, height_spec, mode, start, n_max, prefix = args
    family = parse_family(family_spec)
    hf = parse_height(family, height_spec) if height_spec else None
    if mode == "saw":
        return _count_saws_from(family, start, n_max, prefix), None
    if mode == "halfspace":
        return _count_halfspace_from(family, hf, start, n_max, prefix), None
    counts, spans = _count_bridges_from(family, hf, start, n_max, prefix)
    return counts, spans


def _merge_spans(total, part):
    for d, table in enumerate(part):
        for s, c in table.items():
            total[d][s] = total[d].get(s, 0) + c


def _parallel_counts(family, hf, start, n_max, mode, jobs, split_depth=3):
    """Partition the enumeration tree by all prefixes of a fixed depth and
    add up the per-prefix counts; totals are independent of scheduling."""
    split = min(split_depth, n_max)
    if mode == "saw":
        shallow = _count_saws_from(family, start, split)
    elif mode == "halfspace":
        shallow = _count_halfspace_from(family, hf, start, split)
    else:
        shallow, shallow_spans = _count_bridges_from(family, hf, start, split)
    prefixes = _saw_prefixes(family, hf, start, split, mode)
    counts = [0] * (n_max + 1)
    counts[:split + 1] = shallow
    spans = [dict() for _ in range(n_max + 1)]
    if mode == "bridge":
        for d in range(split + 1):
            spans[d] = dict(shallow_spans[d])
    height_spec = hf.spec if hf is not None else None
    tasks = [(family.spec, height_spec, mode, start, n_max, p) for p in prefixes]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        for part_counts, part_spans in pool.map(_worker_counts, tasks, chunksize=8):
            for d in range(split + 1, n_max + 1):
                counts[d] += part_counts[d]
            if part_spans is not None:
                _merge_spans(spans, [({} if d <= split else t)
                                     for d, t in enumerate(part_spans)])
    return counts, spans


def count_saws(family: GraphFamily, start: Label, n_max: int, jobs: int = 1,
               node_budget: int | None = None) -> list[int]:
    """Exact per-length SAW counts from a start vertex.

    With a node budget the levels are counted in order and a budget hit
    returns the completed prefix of the table (its length marks the high
    water), instead of an error.
    """
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if node_budget is not None:
        levels = _deepen(lambda n, left: _budgeted_level(family, None, start, n, "saw", left),
                         n_max, node_budget)
        return [c for (c, _) in levels]
    if jobs > 1 and n_max > 3:
        counts, _ = _parallel_counts(family, None, start, n_max, "saw", jobs)
        return counts
    return _count_saws_from(family, start, n_max)


def count_halfspace(family: GraphFamily, hf: HeightFunction, start: Label,
                    n_max: int, jobs: int = 1,
                    node_budget: int | None = None) -> list[int]:
    """Exact counts of walks whose non-initial heights all exceed the start's."""
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if node_budget is not None:
        levels = _deepen(lambda n, left: _budgeted_level(family, hf, start, n, "halfspace", left),
                         n_max, node_budget)
        return [c for (c, _) in levels]
    if jobs > 1 and n_max > 3:
        counts, _ = _parallel_counts(family, hf, start, n_max, "halfspace", jobs)
        return counts
    return _count_halfspace_from(family, hf, start, n_max)


def count_bridges(family: GraphFamily, hf: HeightFunction, start: Label,
                  n_max: int, jobs: int = 1,
                  node_budget: int | None = None) -> tuple[list[int], list[dict]]:
    """Exact bridge counts per length, plus per-length span distributions."""
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    if node_budget is not None:
        levels = _deepen(lambda n, left: _budgeted_level(family, hf, start, n, "bridge", left),
                         n_max, node_budget)
        return [c for (c, _) in levels], [s for (_, s) in levels]
    if jobs > 1 and n_max > 3:
        return _parallel_counts(family, hf, start, n_max, "bridge", jobs)
    return _count_bridges_from(family, hf, start, n_max)


# ---------------------------------------------------------------------------
# streaming enumeration (independent code path used as the counting oracle)

def enumerate_walks(family: GraphFamily, hf: HeightFunction | None, start: Label,
                    n: int, kind: WalkKind) -> Iterator[Walk]:
    """Yield each qualifying walk of length exactly n once.

    Deliberately separate from the counters: grows all SAWs in neighbor
    order and applies the predicate as an emission filter, with no
    height-based pruning.
    """
    if n < 0:
        raise UsageError("length must be >= 0")
    if kind not in ("saw", "halfspace", "bridge"):
        raise UsageError(f"unknown walk kind {kind!r}")
    if kind != "saw" and hf is None:
        raise UsageError("half-space and bridge enumeration need a height function")
    cap = budget("ENUM_WALKS")
    emitted = 0

    def qualifies(vs) -> bool:
        if kind == "saw":
            return True
        w = Walk(tuple(vs))
        return is_halfspace(hf, w) if kind == "halfspace" else is_bridge(hf, w)

    def go(path, used):
        nonlocal emitted
        if len(path) - 1 == n:
            if qualifies(path):
                emitted += 1
                if emitted > cap:
                    raise ResourceBudgetError("enumeration budget exceeded")
                yield Walk(tuple(path))
            return
        for u in family.neighbors(path[-1]):
            if u not in used:
                path.append(u)
                used.add(u)
                yield from go(path, used)
                used.discard(u)
                path.pop()

    yield from go([start], {start})


# ---------------------------------------------------------------------------
# bridge decomposition

@dataclass(frozen=True)
class BridgeDecomposition:
    """Spans S_1 > ... > S_k > 0 and break indices 0 < n_1 < ... < n_k = n."""

    spans: tuple[int, ...]
    breaks: tuple[int, ...]

    @property
    def order(self) -> int:
        return len(self.spans)


def decompose(hf: HeightFunction, w: Walk) -> BridgeDecomposition:
    """Split a half-space walk into alternating bridge / reversed-bridge
    subwalks with strictly decreasing spans."""
    if not is_halfspace(hf, w):
        raise UsageError("decompose expects a half-space walk")
    hs = [hf.evaluate(v) for v in w.vertices]
    n = len(hs) - 1
    if n == 0:
        return BridgeDecomposition(spans=(), breaks=())
    spans: list[int] = []
    breaks: list[int] = []
    prev = 0
    j = 1
    while True:
        sign = -1 if j % 2 else 1  # (-1)^j
        best = None
        arg = prev
        for m in range(prev, n + 1):
            val = sign * (hs[prev] - hs[m])
            if best is None or val >= best:
                best = val
                arg = m
        spans.append(best)
        breaks.append(arg)
        if arg == n:
            break
        prev = arg
        j += 1
    return BridgeDecomposition(spans=tuple(spans), breaks=tuple(breaks))


def subwalks(w: Walk, dec: BridgeDecomposition) -> list[Walk]:
    parts = []
    lo = 0
    for hi in dec.breaks:
        parts.append(Walk(w.vertices[lo:hi + 1]))
        lo = hi
    return parts
