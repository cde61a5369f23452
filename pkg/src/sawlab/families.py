"""Lazy vertex oracles for infinite, locally finite, quasi-transitive graphs.

A family is represented by canonical vertex labels plus a pure neighbor
function, so arbitrarily large graphs can be explored without materializing
them.  All built-in families are vertex-transitive; their single declared
orbit is the origin.  Finer orbit structure (needed by height functions)
lives in :mod:`sawlab.heights`.

Built-ins and their labels:

* ``z{n}``        hypercubic lattice, labels are n-tuples of ints;
* ``tree:{d}``    d-regular tree suspended from a fixed ray, labels are
                  ``(ray_index, child_path)`` so the horocyclic height is
                  ``len(child_path) - ray_index``;
* ``hex``         hexagonal lattice as a brick wall on Z^2 (E/W edges always,
                  N edge when x+y is even), degree 3;
* ``squareoct``   square/octagon (4.8.8) lattice as cells (i, j) with corner
                  labels 0..3 = E, N, W, S;
* ``heis``        Cayley graph of the discrete Heisenberg group on Z^3 with
                  right multiplication by the six standard generators;
* ``zcyl:{n}:{v}`` cylinder quotient Z^n / <v> (built in sawlab.quotient).

Neighbor lists are returned sorted, so enumeration order is reproducible.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cache
from typing import Callable

from .errors import MalformedLabelError, ResourceBudgetError, UsageError, budget

Label = tuple


@dataclass(frozen=True)
class GraphFamily:
    """Lazy oracle for one infinite graph.

    ``spec`` is the parseable name (see :func:`parse_family`); it is what
    reports carry and what parallel workers use to rebuild the oracle.
    """

    spec: str
    neighbors: Callable[[Label], tuple[Label, ...]] = field(repr=False)
    origin: Label
    declared_orbits: tuple[Label, ...]
    orbit_of: Callable[[Label], int] = field(repr=False)
    max_degree: int

    @property
    def name(self) -> str:
        return self.spec

    def orbit_count(self) -> int:
        return len(self.declared_orbits)


@dataclass(frozen=True)
class Ball:
    """Induced subgraph of all vertices within ``radius`` of ``root``."""

    root: Label
    radius: int
    vertices: tuple[Label, ...]
    edges: tuple[tuple[Label, Label], ...]
    dist: dict = field(repr=False)

    def vertex_count(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return len(self.edges)


def _require(cond: bool, label, family: str, why: str) -> None:
    if not cond:
        raise MalformedLabelError(f"{family}: bad label {label!r}: {why}")


def _check_int_tuple(v, n: int, family: str) -> None:
    _require(isinstance(v, tuple) and len(v) == n, v, family, f"expected {n}-tuple")
    _require(all(isinstance(c, int) and not isinstance(c, bool) for c in v), v, family,
             "coordinates must be ints")


def hypercubic(n: int) -> GraphFamily:
    """The lattice Z^n with nearest-neighbor adjacency."""
    if n < 1:
        raise UsageError("hypercubic dimension must be >= 1")
    spec = f"z{n}"

    @cache
    def neighbors(v: Label) -> tuple[Label, ...]:
        _check_int_tuple(v, n, spec)
        out = []
        for i in range(n):
            for s in (1, -1):
                out.append(v[:i] + (v[i] + s,) + v[i + 1:])
        return tuple(sorted(out))

    origin = (0,) * n
    return GraphFamily(spec=spec, neighbors=neighbors, origin=origin,
                       declared_orbits=(origin,), orbit_of=lambda v: 0,
                       max_degree=2 * n)


def regular_tree(d: int) -> GraphFamily:
    """The d-regular tree suspended from a fixed ray.

    Labels are ``(j, path)``: follow the ray to its j-th vertex, then descend
    along ``path`` (tuples of child indices).  Each vertex has one neighbor
    one level closer to the ray's end and d-1 neighbors one level further.
    """
    if d < 3:
        raise UsageError("regular tree needs degree >= 3")
    spec = f"tree:{d}"

    def check(v) -> None:
        _require(isinstance(v, tuple) and len(v) == 2, v, spec, "expected (ray_index, path)")
        j, path = v
        _require(isinstance(j, int) and j >= 0, v, spec, "ray index must be a non-negative int")
        _require(isinstance(path, tuple), v, spec, "path must be a tuple")
        for k, c in enumerate(path):
            hi = (d - 1) if (j == 0 or k > 0) else (d - 2)
            _require(isinstance(c, int) and 0 <= c < hi, v, spec, f"child index {c} out of range")

    # uncached: tree vertices are never revisited during enumeration, and
    # the lists below are constructed in sorted order (a path prefix sorts
    # before its extensions, smaller ray indices first)
    def neighbors(v: Label) -> tuple[Label, ...]:
        check(v)
        j, path = v
        if path:
            out = [(j, path[:-1])]
            out.extend((j, path + (c,)) for c in range(d - 1))
        elif j >= 1:
            out = [(j - 1, ())]
            out.extend((j, (c,)) for c in range(d - 2))
            out.append((j + 1, ()))
        else:
            out = [(0, (c,)) for c in range(d - 1)]
            out.append((1, ()))
        return tuple(out)

    origin = (0, ())
    return GraphFamily(spec=spec, neighbors=neighbors, origin=origin,
                       declared_orbits=(origin,), orbit_of=lambda v: 0,
                       max_degree=d)


def hexagonal() -> GraphFamily:
    """Hexagonal lattice in brick-wall coordinates on Z^2 (degree 3)."""
    spec = "hex"

    @cache
    def neighbors(v: Label) -> tuple[Label, ...]:
        _check_int_tuple(v, 2, spec)
        x, y = v
        out = [(x + 1, y), (x - 1, y)]
        if (x + y) % 2 == 0:
            out.append((x, y + 1))
        else:
            out.append((x, y - 1))
        return tuple(sorted(out))

    origin = (0, 0)
    return GraphFamily(spec=spec, neighbors=neighbors, origin=origin,
                       declared_orbits=(origin,), orbit_of=lambda v: 0,
                       max_degree=3)


# Corner codes for the square/octagon lattice: cell (i, j) is a small square
# (drawn as a diamond) whose corners E, N, W, S carry horizontal offsets
# +1, 0, -1, 0 inside the cell.
SQUAREOCT_CORNERS = ("E", "N", "W", "S")
_SO_E, _SO_N, _SO_W, _SO_S = range(4)


def square_octagon() -> GraphFamily:
    """Square/octagon (4.8.8) lattice: squares joined by octagon edges."""
    spec = "squareoct"

    @cache
    def neighbors(v: Label) -> tuple[Label, ...]:
        _require(isinstance(v, tuple) and len(v) == 3, v, spec, "expected (i, j, corner)")
        i, j, k = v
        _require(all(isinstance(c, int) and not isinstance(c, bool) for c in v), v, spec,
                 "coordinates must be ints")
        _require(0 <= k <= 3, v, spec, "corner must be in 0..3")
        if k == _SO_E:
            out = [(i, j, _SO_N), (i, j, _SO_S), (i + 1, j, _SO_W)]
        elif k == _SO_N:
            out = [(i, j, _SO_E), (i, j, _SO_W), (i, j + 1, _SO_S)]
        elif k == _SO_W:
            out = [(i, j, _SO_N), (i, j, _SO_S), (i - 1, j, _SO_E)]
        else:
            out = [(i, j, _SO_E), (i, j, _SO_W), (i, j - 1, _SO_N)]
        return tuple(sorted(out))

    origin = (0, 0, _SO_N)
    return GraphFamily(spec=spec, neighbors=neighbors, origin=origin,
                       declared_orbits=(origin,), orbit_of=lambda v: 0,
                       max_degree=3)


def heisenberg() -> GraphFamily:
    """Cayley graph of the discrete Heisenberg group.

    Vertices (x, y, z) stand for the upper unitriangular matrix with x, y on
    the superdiagonal and z in the corner; edges are right multiplication by
    the three generators and their inverses.
    """
    spec = "heis"

    @cache
    def neighbors(v: Label) -> tuple[Label, ...]:
        _check_int_tuple(v, 3, spec)
        x, y, z = v
        out = [
            (x + 1, y, z),
            (x - 1, y, z),
            (x, y + 1, z + x),
            (x, y - 1, z - x),
            (x, y, z + 1),
            (x, y, z - 1),
        ]
        return tuple(sorted(out))

    origin = (0, 0, 0)
    return GraphFamily(spec=spec, neighbors=neighbors, origin=origin,
                       declared_orbits=(origin,), orbit_of=lambda v: 0,
                       max_degree=6)


def ball(family: GraphFamily, center: Label, radius: int,
         max_vertices: int | None = None) -> Ball:
    """Breadth-first closure of ``center`` to the given radius, with the
    complete induced edge set."""
    if radius < 0:
        raise UsageError("ball radius must be >= 0")
    cap = budget("BALL_VERTICES") if max_vertices is None else max_vertices
    dist = {center: 0}
    order = [center]
    queue = deque([center])
    while queue:
        v = queue.popleft()
        dv = dist[v]
        if dv == radius:
            continue
        for u in family.neighbors(v):
            if u not in dist:
                dist[u] = dv + 1
                order.append(u)
                if len(order) > cap:
                    raise ResourceBudgetError(
                        f"ball({family.spec}, r={radius}) exceeds {cap} vertices")
                queue.append(u)
    inside = set(order)
    edges = []
    for v in order:
        for u in family.neighbors(v):
            if u in inside and v < u:
                edges.append((v, u))
    return Ball(root=center, radius=radius, vertices=tuple(order),
                edges=tuple(sorted(edges)), dist=dist)


def parse_family(spec: str) -> GraphFamily:
    """Resolve a family spec string (``z2``, ``tree:3``, ``hex``,
    ``squareoct``, ``heis``, ``zcyl:n:v1,v2,...``)."""
    spec = spec.strip()
    if spec.startswith("z") and spec[1:].isdigit():
        n = int(spec[1:])
        if not 1 <= n <= 4:
            raise UsageError("built-in hypercubic lattices are z1..z4")
        return hypercubic(n)
    if spec.startswith("tree:"):
        d = int(spec.split(":", 1)[1])
        if not 3 <= d <= 6:
            raise UsageError("built-in regular trees are tree:3..tree:6")
        return regular_tree(d)
    if spec == "hex":
        return hexagonal()
    if spec == "squareoct":
        return square_octagon()
    if spec == "heis":
        return heisenberg()
    if spec.startswith("zcyl:"):
        from .quotient import cylinder
        parts = spec.split(":")
        if len(parts) != 3:
            raise UsageError("cylinder spec is zcyl:n:v1,v2,...")
        n = int(parts[1])
        v = tuple(int(c) for c in parts[2].split(","))
        return cylinder(n, v)
    raise UsageError(f"unknown family spec {spec!r}")


BUILTIN_FAMILY_SPECS = (
    "z1", "z2", "z3", "z4",
    "tree:3", "tree:4", "tree:5", "tree:6",
    "hex", "squareoct", "heis",
)
