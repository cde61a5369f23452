"""Synthesis of height functions from finite lattice quotients.

Given a symmetric quotient of Z^n by a full-rank translation lattice, this
module builds rational edge increments on the doubled (bidirected) quotient
graph that

* sum to zero around every basis cycle except a distinguished one,
* sum to one around the distinguished cycle, and
* give every quotient vertex an outgoing edge of each strict sign,

then lifts and scales the increments to an integer height function on the
lattice.  Directed quotient edges are identified with pairs
``(orbit_index, step)`` where ``step`` is a signed unit vector, which pins
down parallel edge copies and makes the antisymmetry delta(-e) = -delta(e)
a property of the representation.

The basis is arranged so that every cycle except the distinguished one has
zero winding along the distinguished lattice generator.  The coefficient of
the distinguished cycle in the expansion of any closed walk is then a dual
linear form in the walk's lift displacement, which keeps the staged
construction exact and cheap.

The construction is staged: the distinguished cycle is seeded uniformly,
its translates are explored segment by segment with each segment total
forced by the distinguished coordinate of the closed walk it completes,
totals are spread in equal shares with a small prime-scaled perturbation
that keeps explored path sums off the integers, inter-component connector
edges are set to zero, and residual edges are fixed last.  A direct
rational solve of the same linear system (with greedy nullspace sign
repair, and the dual-form particular solution as a final resort) acts as an
independent fallback and cross-check.

All arithmetic in this module is exact (fractions.Fraction); no floats.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from .errors import InvariantViolationError, UsageError
from .families import GraphFamily, Label
from .quotient import QuotientGraph, SubgroupDescriptor, build_quotient, check_symmetric

DirectedEdge = tuple[int, tuple[int, ...]]  # (tail orbit, unit step)

_PERTURB_PRIME = 101


def _vec_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


def _vec_neg(a):
    return tuple(-x for x in a)


def _unit_steps(n: int):
    steps = []
    for i in range(n):
        e = tuple(1 if k == i else 0 for k in range(n))
        steps.append(e)
        steps.append(_vec_neg(e))
    return tuple(steps)


def _dim(q: QuotientGraph) -> int:
    if q.lattice is None:
        raise UsageError("height synthesis needs a lattice quotient")
    return q.lattice.dim


def edge_head(q: QuotientGraph, e: DirectedEdge) -> int:
    return q.project(_vec_add(q.reps[e[0]], e[1]))


def edge_partner(q: QuotientGraph, e: DirectedEdge) -> DirectedEdge:
    return (edge_head(q, e), _vec_neg(e[1]))


def edge_canonical(q: QuotientGraph, e: DirectedEdge) -> DirectedEdge:
    return min(e, edge_partner(q, e))


def directed_edges(q: QuotientGraph) -> list[DirectedEdge]:
    return [(i, s) for i in range(q.orbit_count) for s in _unit_steps(_dim(q))]


def undirected_edges(q: QuotientGraph) -> list[DirectedEdge]:
    return sorted({edge_canonical(q, e) for e in directed_edges(q)})


def project_walk(q: QuotientGraph, start: tuple[int, ...], steps) -> tuple[DirectedEdge, ...]:
    """Project a lattice walk (start vector plus unit steps) to quotient edges."""
    cur = start
    out = []
    for s in steps:
        out.append((q.project(cur), tuple(s)))
        cur = _vec_add(cur, s)
    return tuple(out)


def unit_square_generators(q: QuotientGraph) -> list[tuple[DirectedEdge, ...]]:
    """Projections of the unit squares of Z^n from each orbit representative.

    These generate the lattice's cycle space with respect to any translation
    subgroup; Z^1 has none (a tree).
    """
    n = _dim(q)
    squares = []
    for rep in q.reps:
        for i, j in itertools.combinations(range(n), 2):
            ei = tuple(1 if k == i else 0 for k in range(n))
            ej = tuple(1 if k == j else 0 for k in range(n))
            squares.append(project_walk(q, rep, [ei, ej, _vec_neg(ei), _vec_neg(ej)]))
    return squares


def distinguished_shift(q: QuotientGraph) -> tuple[int, ...]:
    """The longest lattice generator (HNF row), ties broken lexicographically."""
    rows = q.lattice.hnf_rows
    return max(rows, key=lambda r: (sum(abs(c) for c in r), r))


def straight_steps(shift: tuple[int, ...]):
    steps = []
    for i, c in enumerate(shift):
        unit = tuple((1 if c > 0 else -1) if k == i else 0 for k in range(len(shift)))
        steps.extend([unit] * abs(c))
    return steps


def distinguished_cycle(q: QuotientGraph, start_orbit: int = 0) -> tuple[DirectedEdge, ...]:
    """Projection of the straight path realizing the longest lattice shift,
    based at an orbit representative: a closed walk of the quotient."""
    shift = distinguished_shift(q)
    cyc = project_walk(q, q.reps[start_orbit], straight_steps(shift))
    if edge_head(q, cyc[-1]) != cyc[0][0]:
        raise InvariantViolationError("distinguished path does not close in the quotient")
    return cyc


def _is_simple_cycle(q: QuotientGraph, cyc) -> bool:
    tails = [e[0] for e in cyc]
    return len(set(tails)) == len(tails) and len({edge_canonical(q, e) for e in cyc}) == len(cyc)


def _solve_square_rational(matrix, rhs):
    """Solve an n x n rational system by elimination (matrix nonsingular)."""
    n = len(rhs)
    a = [[Fraction(matrix[i][j]) for j in range(n)] + [Fraction(rhs[i])] for i in range(n)]
    for col in range(n):
        piv = next(r for r in range(col, n) if a[r][col] != 0)
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(row[n] for row in a)


def dual_form(q: QuotientGraph) -> tuple[Fraction, ...]:
    """The rational vector w with (HNF row_j) . w = [row_j is distinguished].

    For a closed quotient walk, the dot product of w with the walk's lift
    displacement equals the walk's coefficient on the distinguished cycle in
    the basis built by :func:`cycle_basis`.
    """
    rows = q.lattice.hnf_rows
    star = distinguished_shift(q)
    rhs = [1 if r == star else 0 for r in rows]
    # solve rows . w = rhs with rows as the coefficient matrix
    return _solve_square_rational([list(r) for r in rows], rhs)


def walk_displacement(edges) -> tuple[int, ...]:
    disp = None
    for _, step in edges:
        disp = step if disp is None else _vec_add(disp, step)
    return disp


def lam_for(q: QuotientGraph):
    """Distinguished-coordinate functional on closed walks (edge sequences)."""
    w = dual_form(q)

    def lam(edges) -> Fraction:
        disp = walk_displacement(edges)
        return sum((Fraction(d) * c for d, c in zip(disp, w)), Fraction(0))

    return lam


# ---------------------------------------------------------------------------
# exact linear algebra over directed-edge vectors

class _Echelon:
    """Incremental row echelon over Q for sparse vectors keyed by a fixed
    total order; used for rank and independence tests."""

    def __init__(self):
        self.rows: dict = {}  # pivot key -> reduced row (dict key->Fraction)

    @staticmethod
    def _reduce(vec: dict, rows: dict) -> dict:
        v = {k: c for k, c in vec.items() if c != 0}
        while True:
            pivot = None
            for key in sorted(v):
                if key in rows:
                    pivot = key
                    break
            if pivot is None:
                return v
            coef = v[pivot]
            for k2, c2 in rows[pivot].items():
                v[k2] = v.get(k2, Fraction(0)) - coef * c2
                if v[k2] == 0:
                    del v[k2]

    def add(self, vec: dict) -> bool:
        """Insert if independent of the current span; returns True if added."""
        v = self._reduce(vec, self.rows)
        if not v:
            return False
        pivot = min(v)
        inv = 1 / v[pivot]
        row = {k: c * inv for k, c in v.items()}
        for p, r in list(self.rows.items()):
            if pivot in r:
                coef = r[pivot]
                for k2, c2 in row.items():
                    r[k2] = r.get(k2, Fraction(0)) - coef * c2
                    if r[k2] == 0:
                        del r[k2]
        self.rows[pivot] = row
        return True

    def contains(self, vec: dict) -> bool:
        return not self._reduce(vec, self.rows)

    @property
    def rank(self) -> int:
        return len(self.rows)


def cycle_vector(cyc) -> dict:
    v: dict = {}
    for e in cyc:
        v[e] = v.get(e, Fraction(0)) + 1
        if v[e] == 0:
            del v[e]
    return v


def _solve_linear(rows: list[dict], rhs: list[Fraction], keys: list):
    """Gaussian elimination for Sum_k row[k] x[k] = rhs; returns a particular
    solution (free unknowns zero) and a nullspace basis, or None if
    inconsistent."""
    work = [dict(r) for r in rows]
    b = list(rhs)
    pivots: list = []
    r = 0
    for key in keys:
        pr = None
        for i in range(r, len(work)):
            if work[i].get(key, 0) != 0:
                pr = i
                break
        if pr is None:
            continue
        work[r], work[pr] = work[pr], work[r]
        b[r], b[pr] = b[pr], b[r]
        inv = 1 / work[r][key]
        work[r] = {k: c * inv for k, c in work[r].items()}
        b[r] = b[r] * inv
        for i in range(len(work)):
            if i != r and work[i].get(key, 0) != 0:
                coef = work[i][key]
                for k2, c2 in work[r].items():
                    work[i][k2] = work[i].get(k2, Fraction(0)) - coef * c2
                    if work[i][k2] == 0:
                        del work[i][k2]
                b[i] = b[i] - coef * b[r]
        pivots.append(key)
        r += 1
        if r == len(work):
            break
    for i in range(r, len(work)):
        if b[i] != 0:
            return None
    # rows are fully reduced, so with free unknowns at zero each pivot reads
    # its value straight off the right-hand side
    free = [k for k in keys if k not in set(pivots)]
    particular = {k: Fraction(0) for k in keys}
    for i, key in enumerate(pivots):
        particular[key] = b[i]
    null_basis = []
    for f in free:
        vec = {k: Fraction(0) for k in keys}
        vec[f] = Fraction(1)
        for i, key in enumerate(pivots):
            vec[key] = -work[i].get(f, Fraction(0))
        null_basis.append(vec)
    return particular, null_basis


# ---------------------------------------------------------------------------
# public types

@dataclass(frozen=True)
class DirectedCycleBasis:
    """Basis of the directed cycle space of the doubled quotient graph.

    The first ``rho`` elements span the projections of the generating set;
    the last is the distinguished cycle, the only basis element with nonzero
    winding along the distinguished lattice generator.  Elements are stored
    as directed edge sequences (the non-distinguished ones may be formal
    compositions rather than single closed walks).
    """

    cycles: tuple[tuple[DirectedEdge, ...], ...]
    rho: int
    dim: int
    distinguished_steps: tuple[tuple[int, ...], ...] = ()

    def distinguished(self) -> tuple[DirectedEdge, ...]:
        return self.cycles[-1]


@dataclass(frozen=True)
class EdgeIncrement:
    """Antisymmetric rational edge values on the doubled quotient graph.

    Values are stored on canonical edge representatives only, so
    delta(-e) = -delta(e) holds by construction.
    """

    orbit_count: int
    values: dict = field(repr=False)  # canonical DirectedEdge -> Fraction
    method: str = "staged"

    def value(self, q: QuotientGraph, e: DirectedEdge) -> Fraction:
        c = edge_canonical(q, e)
        return self.values[c] if c == e else -self.values[c]

    def walk_sum(self, q: QuotientGraph, edges) -> Fraction:
        return sum((self.value(q, e) for e in edges), Fraction(0))

    def out_values(self, q: QuotientGraph, i: int) -> list[Fraction]:
        return [self.value(q, (i, s)) for s in _unit_steps(_dim(q))]


def cycle_basis(q: QuotientGraph, generators) -> DirectedCycleBasis:
    """Basis of the directed cycle space of the doubled quotient graph.

    Built from the doubled-edge pairs and the spanning-tree fundamental
    cycles (the latter composed with distinguished-cycle copies to cancel
    their distinguished winding), ordered so a maximal independent family of
    generator projections comes first and the distinguished cycle last.
    Dimension is |E| plus the undirected cycle-space dimension.
    """
    if not check_symmetric(q):
        raise UsageError("cycle basis requires a symmetric quotient")
    n_orb = q.orbit_count
    undirected = undirected_edges(q)
    lam = lam_for(q)

    # spanning tree over orbits (BFS in canonical edge order, loops skipped)
    parent_edge: dict[int, DirectedEdge] = {}
    seen = {0}
    frontier = [0]
    adjacency: dict[int, list[DirectedEdge]] = {i: [] for i in range(n_orb)}
    for e in directed_edges(q):
        adjacency[e[0]].append(e)
    while frontier:
        i = frontier.pop(0)
        for e in sorted(adjacency[i]):
            j = edge_head(q, e)
            if j not in seen:
                seen.add(j)
                parent_edge[j] = e  # directed parent -> child
                frontier.append(j)
    if len(seen) != n_orb:
        raise InvariantViolationError("quotient graph is disconnected")
    tree_canon = {edge_canonical(q, e) for e in parent_edge.values()}

    def tree_path(i: int, j: int) -> list[DirectedEdge]:
        def to_root(k):
            out = []
            while k != 0:
                e = parent_edge[k]
                out.append(e)
                k = e[0]
            return out
        up_i = to_root(i)
        up_j = to_root(j)
        while up_i and up_j and up_i[-1] == up_j[-1]:
            up_i.pop()
            up_j.pop()
        path = [edge_partner(q, e) for e in up_i]  # i up to the meet point
        path.extend(reversed(up_j))                # meet point down to j
        return path

    def fundamental_cycle(f: DirectedEdge) -> tuple[DirectedEdge, ...]:
        i, j = f[0], edge_head(q, f)
        return tuple([f] + tree_path(j, i))

    dist = distinguished_cycle(q)
    rev_dist = tuple(edge_partner(q, e) for e in reversed(dist))
    if lam(dist) != 1:
        raise InvariantViolationError("distinguished cycle must have unit winding")

    def cancel_winding(seq) -> tuple[DirectedEdge, ...]:
        c = lam(seq)
        if c.denominator != 1:
            raise InvariantViolationError("closed walk with fractional winding")
        c = int(c)
        if c > 0:
            return tuple(seq) + rev_dist * c
        if c < 0:
            return tuple(seq) + dist * (-c)
        return tuple(seq)

    gen_cycles = [tuple(g) for g in generators]
    ech = _Echelon()
    chosen: list[tuple[DirectedEdge, ...]] = []
    rho = 0
    for g in gen_cycles:
        if lam(g) != 0:
            raise InvariantViolationError("generator projection must lift to a cycle")
        for oriented in (g, tuple(edge_partner(q, e) for e in reversed(g))):
            if ech.add(cycle_vector(oriented)):
                chosen.append(oriented)
                rho += 1

    if not ech.add(cycle_vector(dist)):
        raise InvariantViolationError(
            "distinguished cycle lies in the generator span; no room for the unit total")

    middle: list[tuple[DirectedEdge, ...]] = []
    for e in undirected:
        digon = (e, edge_partner(q, e))
        if ech.add(cycle_vector(digon)):
            middle.append(digon)
    for f in undirected:
        if f in tree_canon:
            continue
        cyc = cancel_winding(fundamental_cycle(f))
        if ech.add(cycle_vector(cyc)):
            middle.append(cyc)

    n_edges = len(undirected)
    expected_dim = n_edges + (n_edges - (n_orb - 1))
    if ech.rank != expected_dim:
        raise InvariantViolationError(
            f"cycle space dimension {ech.rank} != expected {expected_dim}")
    cycles = tuple(chosen + middle + [dist])
    return DirectedCycleBasis(cycles=cycles, rho=rho, dim=expected_dim,
                              distinguished_steps=tuple(straight_steps(distinguished_shift(q))))


class _StagedStuck(Exception):
    pass


def _staged_solve(basis: DirectedCycleBasis, q: QuotientGraph) -> dict:
    """The staged exploration; returns canonical-edge values."""
    lam = lam_for(q)
    values: dict[DirectedEdge, Fraction] = {}
    explored_adj: dict[int, list[DirectedEdge]] = {i: [] for i in range(q.orbit_count)}

    def set_value(e: DirectedEdge, val: Fraction):
        c = edge_canonical(q, e)
        values[c] = val if c == e else -val
        explored_adj[c[0]].append(c)
        p = edge_partner(q, c)
        explored_adj[p[0]].append(p)

    def unset_value(e: DirectedEdge):
        c = edge_canonical(q, e)
        del values[c]
        explored_adj[c[0]].remove(c)
        p = edge_partner(q, c)
        explored_adj[p[0]].remove(p)

    def edge_value(e: DirectedEdge) -> Fraction:
        c = edge_canonical(q, e)
        v = values[c]
        return v if c == e else -v

    def is_explored(e: DirectedEdge) -> bool:
        return edge_canonical(q, e) in values

    def touched(i: int) -> bool:
        return bool(explored_adj[i])

    def find_saw(a: int, b: int, need_nonint: bool, node_cap: int = 100_000):
        """Directed SAW over explored edges from a to b; with need_nonint
        only a non-integer value sum is accepted."""
        if a == b:
            return None if need_nonint else []
        nodes = 0
        path: list[DirectedEdge] = []
        used = {a}

        def dfs(v: int, acc: Fraction):
            nonlocal nodes
            nodes += 1
            if nodes > node_cap:
                raise _StagedStuck("explored-SAW search budget exceeded")
            for e in sorted(explored_adj[v]):
                w = edge_head(q, e)
                if w == b:
                    tot = acc + edge_value(e)
                    if not need_nonint or tot.denominator != 1:
                        path.append(e)
                        return True
                    continue
                if w in used:
                    continue
                path.append(e)
                used.add(w)
                if dfs(w, acc + edge_value(e)):
                    return True
                used.discard(w)
                path.pop()
            return False

        if dfs(a, Fraction(0)):
            return list(path)
        return None

    # path-sum bookkeeping: once a pair of vertices has a non-integer
    # explored SAW it keeps one (the explored set only grows), so only
    # unresolved pairs are rechecked
    nonint_ok: set[tuple[int, int]] = set()

    def unresolved_pairs():
        verts = [i for i in range(q.orbit_count) if touched(i)]
        return [(a, b) for a, b in itertools.combinations(verts, 2)
                if (a, b) not in nonint_ok]

    def count_resolvable(pairs) -> int:
        return sum(1 for a, b in pairs if find_saw(a, b, need_nonint=True) is not None)

    def record_pairs() -> None:
        for a, b in unresolved_pairs():
            if find_saw(a, b, need_nonint=True) is not None:
                nonint_ok.add((a, b))

    def assign_segment(seg: list[DirectedEdge], total: Fraction):
        """Spread total in equal shares of one sign, perturbed so that as
        many explored path sums as possible avoid the integers."""
        m = len(seg)
        if total == 0:
            raise _StagedStuck("segment total vanished")
        if m == 1:
            set_value(seg[0], total)
            record_pairs()
            return
        share = total / m
        candidates = []
        for attempt in range(3):
            eps = abs(total) / (m * _PERTURB_PRIME ** (attempt + 1))
            for rot in range(min(m, 3)):
                pattern = [Fraction(0)] * m
                pattern[rot] = eps
                pattern[(rot + 1) % m] = -eps
                vals = [share + p for p in pattern]
                if any(v == 0 or (v > 0) != (total > 0) for v in vals):
                    continue
                candidates.append(vals)
        if not candidates:
            raise _StagedStuck("no same-sign distribution available")
        best = None
        for vals in candidates:
            for e, v in zip(seg, vals):
                set_value(e, v)
            pairs = unresolved_pairs()
            good = count_resolvable(pairs)
            if good == len(pairs):
                record_pairs()
                return
            if best is None or good > best[0]:
                best = (good, vals)
            for e in seg:
                unset_value(e)
        # no candidate resolved everything; apply the best one
        for e, v in zip(seg, best[1]):
            set_value(e, v)
        record_pairs()

    def explore_cycle(cyc: tuple[DirectedEdge, ...]):
        if all(is_explored(e) for e in cyc):
            return
        tails = [e[0] for e in cyc]
        start = next((k for k, t in enumerate(tails) if touched(t)), None)
        if start is None:
            raise _StagedStuck("cycle does not meet the explored region")
        cyc = cyc[start:] + cyc[:start]
        run: list[DirectedEdge] = []
        for e in cyc:
            if is_explored(e):
                if run:
                    _finish_run(run)
                    run = []
                continue
            run.append(e)
            if touched(edge_head(q, e)):
                _finish_run(run)
                run = []
        if run:
            _finish_run(run)

    def _finish_run(seg: list[DirectedEdge]):
        seg = list(seg)
        a = seg[0][0]
        b = edge_head(q, seg[-1])
        if a == b:
            total = lam(seg)
        else:
            back = find_saw(b, a, need_nonint=True)
            if back is None:
                raise _StagedStuck("no non-integer return SAW for a segment")
            total = lam(list(seg) + back) - sum((edge_value(e) for e in back), Fraction(0))
        assign_segment(seg, total)

    # translates of the distinguished cycle through every orbit
    translates = {}
    for i in range(q.orbit_count):
        cyc = project_walk(q, q.reps[i], basis.distinguished_steps)
        if not _is_simple_cycle(q, cyc):
            raise _StagedStuck("a distinguished translate is not a simple cycle")
        translates[i] = cyc

    # connected components of the union of the translates
    comp = list(range(q.orbit_count))

    def find_root(x):
        while comp[x] != x:
            comp[x] = comp[comp[x]]
            x = comp[x]
        return x

    for cyc in translates.values():
        r0 = find_root(cyc[0][0])
        for e in cyc:
            r = find_root(edge_head(q, e))
            if r != r0:
                comp[r] = r0
                r0 = find_root(r0)
    roots = sorted({find_root(i) for i in range(q.orbit_count)})
    component_of = {i: roots.index(find_root(i)) for i in range(q.orbit_count)}

    # connectors between components, in canonical edge order (set to zero
    # when their target component's exploration starts)
    connectors: list[DirectedEdge] = []
    order = [component_of[0]]
    joined = {component_of[0]}
    remaining = set(range(len(roots))) - joined
    while remaining:
        found = None
        for e in undirected_edges(q):
            ca, cb = component_of[e[0]], component_of[edge_head(q, e)]
            if ca == cb or ((ca in joined) == (cb in joined)):
                continue
            found = (e, cb if cb not in joined else ca)
            break
        if found is None:
            raise _StagedStuck("components cannot be connected")
        connectors.append(found[0])
        joined.add(found[1])
        order.append(found[1])
        remaining.discard(found[1])

    # Stage 1: seed the distinguished cycle uniformly
    dist = basis.distinguished()
    unit = Fraction(1, len(dist))
    for e in dist:
        set_value(e, unit)
    record_pairs()

    # Stages 2-4: explore each component's translate cycles in order
    conn_iter = iter(connectors)
    for comp_pos, comp_id in enumerate(order):
        if comp_pos > 0:
            set_value(next(conn_iter), Fraction(0))
            record_pairs()
        pending = [i for i in sorted(translates) if component_of[i] == comp_id]
        while pending:
            nxt = next((i for i in pending if any(touched(e[0]) for e in translates[i])), None)
            if nxt is None:
                raise _StagedStuck("no translate touches the explored region")
            pending.remove(nxt)
            explore_cycle(translates[nxt])

    # Stage 5: residual edges fixed by the explored-walk rule
    for e in undirected_edges(q):
        if e in values:
            continue
        a, b = e[0], edge_head(q, e)
        back = find_saw(b, a, need_nonint=False)
        if back is None:
            raise _StagedStuck("residual edge endpoints not connected by explored SAWs")
        val = lam([e] + back) - sum((edge_value(x) for x in back), Fraction(0))
        set_value(e, val)
    return values


def _dual_particular(q: QuotientGraph) -> dict:
    """The dual-form solution delta(i, step) = step . w: exact on every
    basis cycle and sign-valid at every vertex."""
    w = dual_form(q)
    out = {}
    for e in undirected_edges(q):
        out[e] = sum((Fraction(d) * c for d, c in zip(e[1], w)), Fraction(0))
    return out


def _direct_solve(basis: DirectedCycleBasis, q: QuotientGraph) -> dict:
    """Rational Gaussian elimination on the cycle constraints with greedy
    nullspace sign repair; falls back to the dual-form solution if the
    repair cannot reach every vertex."""
    keys = undirected_edges(q)
    rows = []
    for cyc in basis.cycles:
        row: dict = {}
        for e in cyc:
            c = edge_canonical(q, e)
            row[c] = row.get(c, Fraction(0)) + (1 if c == e else -1)
            if row[c] == 0:
                del row[c]
        rows.append(row)
    rhs = [Fraction(0)] * (len(rows) - 1) + [Fraction(1)]
    solved = _solve_linear(rows, rhs, keys)
    if solved is None:
        raise InvariantViolationError("increment system is inconsistent")
    particular, null_basis = solved

    steps = _unit_steps(_dim(q))

    def signs_ok(vals: dict) -> int:
        good = 0
        for i in range(q.orbit_count):
            outs = []
            for s in steps:
                c = edge_canonical(q, (i, s))
                outs.append(vals[c] if c == (i, s) else -vals[c])
            if any(v > 0 for v in outs) and any(v < 0 for v in outs):
                good += 1
        return good

    current = dict(particular)
    target = q.orbit_count
    trial_ts = [Fraction(1), Fraction(-1), Fraction(1, 2), Fraction(-1, 2),
                Fraction(1, 3), Fraction(-1, 3), Fraction(2), Fraction(-2),
                Fraction(1, 5), Fraction(-1, 5), Fraction(1, 7), Fraction(-1, 7)]
    for _ in range(6):
        if signs_ok(current) == target:
            return current
        improved = False
        for nv in null_basis:
            base = signs_ok(current)
            best_t, best_score = None, base
            for t in trial_ts:
                cand = {k: current[k] + t * nv[k] for k in current}
                sc = signs_ok(cand)
                if sc > best_score:
                    best_t, best_score = t, sc
            if best_t is not None:
                current = {k: current[k] + best_t * nv[k] for k in current}
                improved = True
                if best_score == target:
                    return current
        if not improved:
            break
    if signs_ok(current) == target:
        return current
    dual = _dual_particular(q)
    if signs_ok(dual) != target:
        raise InvariantViolationError("no sign-valid increment solution found")
    return dual


def increment_invariant_problems(inc: EdgeIncrement, basis: DirectedCycleBasis,
                                 q: QuotientGraph) -> list[str]:
    problems = []
    for i, cyc in enumerate(basis.cycles):
        want = Fraction(1) if i == len(basis.cycles) - 1 else Fraction(0)
        got = inc.walk_sum(q, cyc)
        if got != want:
            problems.append(f"cycle {i}: sum {got} != {want}")
    for i in range(q.orbit_count):
        outs = inc.out_values(q, i)
        if not (any(v > 0 for v in outs) and any(v < 0 for v in outs)):
            problems.append(f"orbit {i}: out-increments miss a strict sign")
    return problems


def solve_increments(basis: DirectedCycleBasis, q: QuotientGraph,
                     method: str = "auto") -> EdgeIncrement:
    """Increments satisfying the cycle constraints and the sign condition.

    ``auto`` runs the staged exploration and falls back to the direct
    rational solve (with sign repair) when the staged route gets stuck; the
    method actually used is recorded on the result.
    """
    if method not in ("auto", "staged", "direct"):
        raise UsageError(f"unknown method {method!r}")
    attempts = []
    if method in ("auto", "staged"):
        attempts.append("staged")
    if method in ("auto", "direct"):
        attempts.append("direct")
    last_error = None
    for name in attempts:
        try:
            if name == "staged":
                values = _staged_solve(basis, q)
            else:
                values = _direct_solve(basis, q)
            label = name if name == "staged" or method == "direct" else "direct-fallback"
            inc = EdgeIncrement(orbit_count=q.orbit_count, values=values, method=label)
            problems = increment_invariant_problems(inc, basis, q)
            if problems:
                raise InvariantViolationError("; ".join(problems))
            return inc
        except (_StagedStuck, InvariantViolationError) as exc:
            last_error = exc
            continue
    raise InvariantViolationError(f"no increment solution found: {last_error}")


# ---------------------------------------------------------------------------
# lifting

@dataclass(frozen=True)
class LiftedHeight:
    """Integer height on the lattice obtained by scaling and integrating an
    edge increment along paths from the origin."""

    scaling: int
    increments: EdgeIncrement
    quotient: QuotientGraph = field(repr=False)

    def evaluate(self, v: Label) -> int:
        q = self.quotient
        total = Fraction(0)
        cur = (0,) * _dim(q)
        for n_step in straight_steps(tuple(v)):
            total += self.increments.value(q, (q.project(cur), n_step))
            cur = _vec_add(cur, n_step)
        scaled = total * self.scaling
        if scaled.denominator != 1:
            raise InvariantViolationError("scaled height is not an integer")
        return int(scaled)

    def max_edge_change(self) -> int:
        q = self.quotient
        return max(abs(int(self.increments.value(q, e) * self.scaling))
                   for e in directed_edges(q))

    def as_height_function(self):
        from .heights import HeightFunction
        q = self.quotient
        d = self.max_edge_change()
        n_orb = q.orbit_count
        r_bound = 0 if n_orb == 1 else (n_orb - 1) * (2 * d + 1) + 2
        reps = q.reps

        def shift_to_rep(v):
            rep = reps[q.project(v)]
            return rep, self.evaluate(v) - self.evaluate(rep)

        return HeightFunction(
            spec=f"synth:m={self.scaling}", evaluate=self.evaluate,
            declared_d=d, declared_r=r_bound,
            h_orbits=reps, h_orbit_of=lambda v: q.project(v),
            shift_to_rep=shift_to_rep,
        )


def lift_height(inc: EdgeIncrement, family: GraphFamily, q: QuotientGraph,
                check_radius: int = 4) -> LiftedHeight:
    """Scale increments to integers and integrate; verifies path
    independence on a ball (any closed-walk sum must vanish)."""
    denoms = [v.denominator for v in inc.values.values()]
    m = 1
    for d in denoms:
        m = m * d // gcd(m, d)
    lifted = LiftedHeight(scaling=m, increments=inc, quotient=q)
    from collections import deque

    from .families import ball
    b = ball(family, family.origin, check_radius)
    # BFS accumulation, then consistency across every ball edge
    cache = {family.origin: 0}
    queue = deque([family.origin])
    while queue:
        v = queue.popleft()
        for u in family.neighbors(v):
            if u not in b.dist:
                continue
            step = tuple(a - c for a, c in zip(u, v))
            inc_val = inc.value(q, (q.project(v), step)) * m
            if inc_val.denominator != 1:
                raise InvariantViolationError("scaling did not clear denominators")
            if u not in cache:
                cache[u] = cache[v] + int(inc_val)
                queue.append(u)
            elif cache[u] != cache[v] + int(inc_val):
                raise InvariantViolationError(
                    f"path-dependent increments: closed walk through {u!r} has nonzero sum")
    if cache[family.origin] != 0:
        raise InvariantViolationError("origin height must be zero")
    for v in list(cache)[:64]:
        if lifted.evaluate(v) != cache[v]:
            raise InvariantViolationError("straight-path evaluation disagrees with BFS lift")
    return lifted


def verify_cocycle(inc: EdgeIncrement, family: GraphFamily, q: QuotientGraph,
                   trials: int, seed: int = 0) -> bool:
    """Project random closed walks (length <= 20) and check the increment
    sums vanish; vacuously true for zero trials."""
    rng = random.Random(seed)
    n = _dim(q)
    steps = _unit_steps(n)
    for _ in range(trials):
        start = tuple(rng.randint(-3, 3) for _ in range(n))
        length = rng.randint(2, 10)
        walk = [rng.choice(steps) for _ in range(length)]
        end = start
        for s in walk:
            end = _vec_add(end, s)
        closed = walk + straight_steps(tuple(a - c for a, c in zip(start, end)))
        total = inc.walk_sum(q, project_walk(q, start, closed))
        if total != 0:
            return False
    return True


def synthesize_height(family: GraphFamily, shifts, method: str = "auto"):
    """Full pipeline: quotient, cycle basis from unit squares, increments,
    integer lift.  Returns (quotient, basis, increments, lifted height)."""
    sub = SubgroupDescriptor(family.spec, tuple(tuple(s) for s in shifts))
    q = build_quotient(family, sub)
    if not check_symmetric(q):
        raise InvariantViolationError("translation quotient is unexpectedly asymmetric")
    basis = cycle_basis(q, unit_square_generators(q))
    inc = solve_increments(basis, q, method=method)
    lifted = lift_height(inc, family, q)
    return q, basis, inc, lifted
