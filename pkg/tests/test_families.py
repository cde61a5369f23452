"""Graph family oracles: canonical labels, neighbor structure, balls."""

import itertools

import pytest
from hypothesis import given, strategies as st

from sawlab.bounds import ball_isomorphic
from sawlab.errors import MalformedLabelError, ResourceBudgetError, UsageError
from sawlab.families import (
    BUILTIN_FAMILY_SPECS,
    ball,
    heisenberg,
    hypercubic,
    parse_family,
    regular_tree,
    square_octagon,
)

ALL_SPECS = BUILTIN_FAMILY_SPECS + ("zcyl:2:0,6",)


def sample_vertices(family, count=40, depth=6):
    """Deterministic scatter of vertices: walks with rotating neighbor
    choices plus straight rays in each direction from the origin."""
    out = [family.origin]
    for k in range(count - 1):
        v = family.origin
        for step in range(1 + k % depth):
            nbrs = family.neighbors(v)
            v = nbrs[(k + step * step) % len(nbrs)]
        out.append(v)
    ray_len = max(2, count // (2 * len(family.neighbors(family.origin))))
    for idx in range(len(family.neighbors(family.origin))):
        v = family.origin
        prev = None
        for _ in range(ray_len):
            nbrs = [u for u in family.neighbors(v) if u != prev]
            prev, v = v, nbrs[idx % len(nbrs)]
            out.append(v)
    return list(dict.fromkeys(out))


def test_z2_neighbors_exact():
    z2 = hypercubic(2)
    assert set(z2.neighbors((0, 0))) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
    assert set(z2.neighbors((3, -2))) == {(4, -2), (2, -2), (3, -1), (3, -3)}


def test_tree_neighbor_structure():
    t3 = regular_tree(3)
    nbrs = t3.neighbors((0, ()))
    assert len(nbrs) == 3
    heights = sorted(len(p) - j for j, p in nbrs)
    assert heights == [-1, 1, 1]
    # deep ray vertex: one ray child, one subtree child, one parent
    nbrs = t3.neighbors((2, ()))
    assert set(nbrs) == {(3, ()), (1, ()), (2, (0,))}


def test_heisenberg_right_multiplication():
    he = heisenberg()
    assert set(he.neighbors((0, 0, 0))) == {
        (1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)}
    # the y-generator twists z by x
    assert (2, 4, 9 + 2) in he.neighbors((2, 3, 9))
    assert (2, 2, 9 - 2) in he.neighbors((2, 3, 9))


def test_square_octagon_degree_and_faces():
    so = square_octagon()
    for v in sample_vertices(so, 30):
        assert len(so.neighbors(v)) == 3
    # square face: the four corners of a cell form a 4-cycle
    cell = [(0, 0, 0), (0, 0, 1), (0, 0, 2), (0, 0, 3)]
    for a, b in itertools.combinations(cell, 2):
        adjacent = a in so.neighbors(b)
        expected = (a[2] - b[2]) % 2 == 1  # E-N, N-W, W-S, S-E adjacent
        assert adjacent == expected


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_neighbor_symmetry_and_degree(spec):
    fam = parse_family(spec)
    pairs = 0
    for v in sample_vertices(fam, 800, depth=12):
        nbrs = fam.neighbors(v)
        assert len(set(nbrs)) == len(nbrs), "duplicate neighbor"
        assert v not in nbrs, "self-loop"
        assert len(nbrs) <= fam.max_degree
        for u in nbrs:
            assert v in fam.neighbors(u)
            pairs += 1
    # Z^1's scatter collapses onto a short segment; everywhere else the
    # sample covers at least a thousand ordered edge pairs
    assert pairs >= (600 if spec == "z1" else 1000)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_degree_constant_on_orbits(spec):
    fam = parse_family(spec)
    degrees = {}
    for v in sample_vertices(fam, 50):
        k = fam.orbit_of(v)
        d = len(fam.neighbors(v))
        assert degrees.setdefault(k, d) == d


def test_ball_examples():
    z2 = hypercubic(2)
    b1 = ball(z2, (0, 0), 1)
    assert b1.vertex_count() == 5 and b1.edge_count() == 4
    b2 = ball(z2, (0, 0), 2)
    assert b2.vertex_count() == 13 and b2.edge_count() == 16
    b0 = ball(z2, (5, 7), 0)
    assert b0.vertex_count() == 1 and b0.edge_count() == 0


@pytest.mark.parametrize("spec", ["z2", "tree:3", "hex", "squareoct", "heis"])
def test_ball_nesting(spec):
    fam = parse_family(spec)
    prev = ball(fam, fam.origin, 0)
    for r in range(1, 4):
        cur = ball(fam, fam.origin, r)
        assert set(prev.vertices) <= set(cur.vertices)
        assert set(prev.edges) <= set(cur.edges)
        assert all(cur.dist[v] <= r for v in cur.vertices)
        for u, v in cur.edges:
            assert abs(cur.dist[u] - cur.dist[v]) <= 1
        prev = cur


def test_ball_budget():
    z2 = hypercubic(2)
    with pytest.raises(ResourceBudgetError):
        ball(z2, (0, 0), 50, max_vertices=100)


@pytest.mark.parametrize("spec", ALL_SPECS)
def test_orbit_soundness_radius3_balls(spec):
    fam = parse_family(spec)
    groups = {}
    for v in sample_vertices(fam, 12):
        groups.setdefault(fam.orbit_of(v), []).append(v)
    for orbit, vs in groups.items():
        base = ball(fam, vs[0], 3)
        for v in vs[1:4]:
            assert ball_isomorphic(base, ball(fam, v, 3)), (orbit, vs[0], v)


def test_malformed_labels_rejected():
    z2 = hypercubic(2)
    for bad in [(0,), (0, 0, 0), ("a", 0), (0.5, 1), None]:
        with pytest.raises((MalformedLabelError, TypeError)):
            z2.neighbors(bad)
    t3 = regular_tree(3)
    for bad in [(0, (5,)), (-1, ()), (1, (3,)), ((), ())]:
        with pytest.raises(MalformedLabelError):
            t3.neighbors(bad)
    so = square_octagon()
    with pytest.raises(MalformedLabelError):
        so.neighbors((0, 0, 7))


def test_parse_family_errors():
    with pytest.raises(UsageError):
        parse_family("z9")
    with pytest.raises(UsageError):
        parse_family("tree:2")
    with pytest.raises(UsageError):
        parse_family("nosuch")


@given(st.tuples(st.integers(-20, 20), st.integers(-20, 20)))
def test_hex_degree_everywhere(v):
    hx = parse_family("hex")
    nbrs = hx.neighbors(v)
    assert len(nbrs) == 3
    for u in nbrs:
        assert v in hx.neighbors(u)
