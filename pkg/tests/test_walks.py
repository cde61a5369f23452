"""SAW engine: exact counts, streaming enumeration, bridge decomposition."""

import pytest
from hypothesis import given, strategies as st

from sawlab.errors import ResourceBudgetError, UsageError
from sawlab.families import hypercubic, parse_family, regular_tree
from sawlab.heights import HeightFunction, default_height
from sawlab.walks import (
    Walk,
    count_bridges,
    count_halfspace,
    count_saws,
    decompose,
    enumerate_walks,
    is_bridge,
    is_halfspace,
    is_reversed_bridge,
    make_walk,
    span,
    subwalks,
)
from z2_oracle import z2_bridge_count, z2_halfspace_count, z2_saw_counts

Z2 = hypercubic(2)
HZ2 = default_height(Z2)


def test_z2_saw_counts_against_oracle():
    assert count_saws(Z2, (0, 0), 7) == z2_saw_counts(7)
    assert count_saws(Z2, (0, 0), 4) == [1, 4, 12, 36, 100]


def test_tree_counts_closed_form():
    t3 = regular_tree(3)
    counts = count_saws(t3, t3.origin, 8)
    assert counts == [1] + [3 * 2 ** (n - 1) for n in range(1, 9)]
    ht = default_height(t3)
    c = count_halfspace(t3, ht, t3.origin, 6)
    b, _ = count_bridges(t3, ht, t3.origin, 6)
    assert c == [2 ** n for n in range(7)]
    assert b == [2 ** n for n in range(7)]


def test_hex_counts_tree_like_up_to_girth():
    hx = parse_family("hex")
    assert count_saws(hx, (0, 0), 5) == [1, 3, 6, 12, 24, 48]


def test_halfspace_and_bridge_examples():
    assert count_halfspace(Z2, HZ2, (0, 0), 3) == [1, 1, 3, 7]
    b, spans = count_bridges(Z2, HZ2, (0, 0), 3)
    assert b == [1, 1, 3, 7]
    assert spans[2] == {1: 2, 2: 1}
    assert all(sum(t.values()) == b[n] for n, t in enumerate(spans))


def test_counts_match_independent_oracle_halfspace_bridge():
    for n in range(6):
        assert count_halfspace(Z2, HZ2, (0, 0), 5)[n] == z2_halfspace_count(n)
        assert count_bridges(Z2, HZ2, (0, 0), 5)[0][n] == z2_bridge_count(n)


@pytest.mark.parametrize("spec", ["z2", "tree:3", "hex", "squareoct", "heis", "zcyl:2:0,6"])
def test_enumeration_is_an_independent_oracle(spec):
    fam = parse_family(spec)
    hf = default_height(fam)
    n = 5
    sigma = count_saws(fam, fam.origin, n)
    c = count_halfspace(fam, hf, fam.origin, n)
    b, _ = count_bridges(fam, hf, fam.origin, n)
    for k in range(n + 1):
        assert sigma[k] == sum(1 for _ in enumerate_walks(fam, None, fam.origin, k, "saw"))
        assert c[k] == sum(1 for _ in enumerate_walks(fam, hf, fam.origin, k, "halfspace"))
        assert b[k] == sum(1 for _ in enumerate_walks(fam, hf, fam.origin, k, "bridge"))


def test_enumerate_bridge_length2_exact_set():
    walks = {w.vertices for w in enumerate_walks(Z2, HZ2, (0, 0), 2, "bridge")}
    assert walks == {
        ((0, 0), (1, 0), (2, 0)),
        ((0, 0), (1, 0), (1, 1)),
        ((0, 0), (1, 0), (1, -1)),
    }
    only_empty = list(enumerate_walks(Z2, HZ2, (0, 0), 0, "saw"))
    assert len(only_empty) == 1 and len(only_empty[0]) == 0


def test_walk_validation():
    with pytest.raises(UsageError):
        make_walk(Z2, [(0, 0), (2, 0)])
    with pytest.raises(UsageError):
        make_walk(Z2, [(0, 0), (1, 0), (0, 0)])
    w = make_walk(Z2, [(0, 0), (1, 0), (1, 1)])
    assert len(w) == 2


def test_span_examples():
    w = make_walk(Z2, [(0, 0), (1, 0), (1, 1), (0, 1), (-1, 1)])
    assert span(HZ2, w) == 2
    assert span(HZ2, Walk(((3, 4),))) == 0
    for b in enumerate_walks(Z2, HZ2, (0, 0), 4, "bridge"):
        hs = [HZ2.evaluate(v) for v in b.vertices]
        assert span(HZ2, b) == hs[-1] - hs[0]


def test_decompose_worked_example():
    w = make_walk(Z2, [(0, 0), (1, 0), (2, 0), (2, 1), (1, 1)])
    dec = decompose(HZ2, w)
    assert dec.spans == (2, 1)
    assert dec.breaks == (3, 4)


def test_decompose_monotone_walk():
    z1 = hypercubic(1)
    h = default_height(z1)
    w = make_walk(z1, [(0,), (1,), (2,), (3,)])
    dec = decompose(h, w)
    assert dec.spans == (3,) and dec.breaks == (3,)


def test_decompose_height_sequence_0121():
    # a SAW whose heights run 0,1,2,1 (one-dimensional walks cannot do this
    # self-avoidingly, so realize the sequence with the diagonal height)
    diag = HeightFunction(
        spec="x+y", evaluate=lambda v: v[0] + v[1], declared_d=1, declared_r=0,
        h_orbits=((0, 0),), h_orbit_of=lambda v: 0,
        shift_to_rep=lambda v: ((0, 0), v[0] + v[1]))
    w = make_walk(Z2, [(0, 0), (1, 0), (1, 1), (0, 1)])
    assert [diag.evaluate(v) for v in w.vertices] == [0, 1, 2, 1]
    dec = decompose(diag, w)
    assert dec.spans == (2, 1) and dec.breaks == (2, 3)


def test_decompose_empty_walk():
    dec = decompose(HZ2, Walk(((0, 0),)))
    assert dec.spans == () and dec.breaks == ()
    assert subwalks(Walk(((0, 0),)), dec) == []


def test_decompose_rejects_non_halfspace():
    w = make_walk(Z2, [(0, 0), (0, 1)])
    with pytest.raises(UsageError):
        decompose(HZ2, w)


def test_bridge_decomposes_trivially():
    for b in enumerate_walks(Z2, HZ2, (0, 0), 5, "bridge"):
        if len(b) == 0:
            continue
        dec = decompose(HZ2, b)
        assert dec.order == 1
        assert dec.spans == (span(HZ2, b),)


@pytest.mark.parametrize("spec", ["z2", "squareoct"])
def test_decomposition_soundness_full_enumeration(spec):
    fam = parse_family(spec)
    hf = default_height(fam)
    d = hf.declared_d
    checked = 0
    for n in range(1, 7):
        for w in enumerate_walks(fam, hf, fam.origin, n, "halfspace"):
            dec = decompose(hf, w)
            assert all(a > b for a, b in zip(dec.spans, dec.spans[1:]))
            assert dec.spans[-1] > 0
            assert sum(dec.spans) <= d * n
            assert dec.breaks[-1] == n
            parts = subwalks(w, dec)
            for j, part in enumerate(parts):
                if j % 2 == 0:
                    assert is_bridge(hf, part)
                else:
                    assert is_reversed_bridge(hf, part)
            checked += 1
    assert checked >= 20  # squareoct's origin corner admits few half-space walks


def test_bridge_counts_invariant_under_shifts():
    # translation-invariance of bridge counts under the height's group
    b0, _ = count_bridges(Z2, HZ2, (0, 0), 5)
    b1, _ = count_bridges(Z2, HZ2, (5, -3), 5)
    assert b0 == b1
    so = parse_family("squareoct")
    hso = default_height(so)
    for corner in range(4):
        a, _ = count_bridges(so, hso, (0, 0, corner), 5)
        b, _ = count_bridges(so, hso, (2, -1, corner), 5)
        assert a == b


def test_reversed_bridge_duality_on_lattices():
    for spec in ("z1", "z2"):
        fam = parse_family(spec)
        hf = default_height(fam)
        for n in range(5):
            bridges = sum(1 for _ in enumerate_walks(fam, hf, fam.origin, n, "bridge"))
            reversed_count = sum(
                1 for w in enumerate_walks(fam, None, fam.origin, n, "saw")
                if is_reversed_bridge(hf, w))
            assert bridges == reversed_count


def test_enumeration_budget(monkeypatch):
    monkeypatch.setenv("SAWLAB_BUDGET_ENUM_WALKS", "10")
    with pytest.raises(ResourceBudgetError):
        list(enumerate_walks(Z2, None, (0, 0), 3, "saw"))


def test_budgeted_counts_return_clean_prefix():
    full = count_saws(Z2, (0, 0), 8)
    part = count_saws(Z2, (0, 0), 8, node_budget=300)
    assert 1 <= len(part) < len(full)
    assert part == full[:len(part)]
    fb, fs = count_bridges(Z2, HZ2, (0, 0), 8)
    pb, ps = count_bridges(Z2, HZ2, (0, 0), 8, node_budget=150)
    assert pb == fb[:len(pb)] and ps == fs[:len(ps)]
    pc = count_halfspace(Z2, HZ2, (0, 0), 8, node_budget=150)
    assert pc == count_halfspace(Z2, HZ2, (0, 0), 8)[:len(pc)]


def test_parallel_counts_match_serial():
    sigma1 = count_saws(Z2, (0, 0), 7, jobs=1)
    sigma8 = count_saws(Z2, (0, 0), 7, jobs=4)
    assert sigma1 == sigma8
    b1, s1 = count_bridges(Z2, HZ2, (0, 0), 7, jobs=1)
    b8, s8 = count_bridges(Z2, HZ2, (0, 0), 7, jobs=4)
    assert b1 == b8 and s1 == s8


@given(st.integers(0, 6))
def test_empty_walk_conventions(n):
    sigma = count_saws(Z2, (0, 0), n)
    c = count_halfspace(Z2, HZ2, (0, 0), n)
    b, spans = count_bridges(Z2, HZ2, (0, 0), n)
    assert sigma[0] == c[0] == b[0] == 1
    assert spans[0] == {0: 1}


@given(st.lists(st.sampled_from([(1, 0), (-1, 0), (0, 1), (0, -1)]), min_size=1, max_size=8))
def test_halfspace_predicate_matches_definition(steps):
    path = [(0, 0)]
    for dx, dy in steps:
        path.append((path[-1][0] + dx, path[-1][1] + dy))
    if len(set(path)) != len(path):
        return
    w = make_walk(Z2, path)
    expected = all(v[0] > 0 for v in path[1:])
    assert is_halfspace(HZ2, w) == expected
    if expected:
        dec = decompose(HZ2, w)
        assert sum(dec.spans) <= len(steps)
