"""Certified brackets, rooted-ball similarity, partitions, locality."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from sawlab.bounds import (
    ball_isomorphic,
    bracket,
    check_fekete,
    distinct_partitions,
    eta,
    eval_f,
    locality_report,
    nth_root_lower,
    nth_root_upper,
    similarity_K,
)
from sawlab.errors import UsageError
from sawlab.families import ball, hypercubic, parse_family, regular_tree
from sawlab.heights import default_height
from sawlab.quotient import cylinder
from sawlab.tables import CountTable, build_count_table

Z2 = hypercubic(2)


@given(st.integers(1, 10 ** 12), st.integers(1, 12))
def test_directed_rounding_brackets_true_root(value, n):
    lo = nth_root_lower(value, n)
    hi = nth_root_upper(value, n)
    assert Fraction(lo) ** n <= value <= Fraction(hi) ** n
    assert lo <= hi
    # the bracketing floats are adjacent or equal
    assert math.nextafter(lo, math.inf) >= hi


def test_exact_roots_stay_exact():
    assert nth_root_lower(2 ** 12, 12) == 2.0
    assert nth_root_upper(2 ** 12, 12) == 2.0
    assert nth_root_lower(1, 5) == 1.0


def test_directed_rounding_huge_integers():
    big = 3 ** 200 + 12345
    lo = nth_root_lower(big, 17)
    hi = nth_root_upper(big, 17)
    from fractions import Fraction
    assert Fraction(lo) ** 17 <= big <= Fraction(hi) ** 17
    assert 0 < hi - lo < 1e-6 * hi


def table_for(spec, n_max, jobs=1):
    fam = parse_family(spec)
    return build_count_table(fam, default_height(fam), n_max, jobs=jobs)


def test_tree_bracket_lower_is_exactly_two():
    t = table_for("tree:3", 8)
    rep = bracket(t)
    assert rep.lower_candidates[0] == (1, 2.0)
    assert rep.certified_lower == 2.0
    assert rep.contains(2.0)
    assert rep.certified_upper >= 2.0


def test_z2_bracket_contains_literature_value():
    rep = bracket(table_for("z2", 10))
    assert rep.contains(2.63815853)
    assert rep.certified_lower <= rep.certified_upper


def test_single_step_bracket():
    rep = bracket(table_for("z2", 1))
    assert rep.certified_lower == 1.0  # b_1 = 1
    assert rep.certified_upper == 4.0  # sigma_1 = 4


def test_fekete_checks():
    t = table_for("z2", 7)
    assert check_fekete(t)
    corrupted = CountTable(
        family=t.family, height=t.height, n_max=t.n_max, reps=t.reps,
        sigma_by_rep=t.sigma_by_rep,
        c_by_rep=t.c_by_rep,
        b_by_rep=tuple((row[:2] + (0,) + row[3:],) and (row[:2] + (0,) + row[3:])
                       for row in t.b_by_rep),
        b_spans_by_rep=t.b_spans_by_rep)
    assert not check_fekete(corrupted)
    tiny = table_for("z2", 0)
    assert check_fekete(tiny)


def test_ball_isomorphism_examples():
    assert ball_isomorphic(ball(Z2, (0, 0), 2), ball(Z2, (5, -7), 2))
    cyl5 = cylinder(2, (0, 5))
    assert not ball_isomorphic(ball(Z2, (0, 0), 2), ball(cyl5, (0, 0), 2))
    t4 = regular_tree(4)
    assert ball_isomorphic(ball(Z2, (0, 0), 1), ball(t4, t4.origin, 1))
    assert not ball_isomorphic(ball(Z2, (0, 0), 1), ball(parse_family("hex"), (0, 0), 1))


def test_similarity_K_cylinders():
    expected = {4: 1, 5: 1, 6: 2, 8: 3, 10: 4}
    for m, k in expected.items():
        res = similarity_K(Z2, cylinder(2, (0, m)), cap=6)
        assert res.K == k, (m, res)
        assert not res.capped
        assert res.mismatch_radius == k + 1


def test_similarity_capped_and_symmetric():
    res = similarity_K(Z2, hypercubic(2), cap=4)
    assert res.K == 4 and res.capped
    pairs = [
        (Z2, cylinder(2, (0, 6)), 6),
        (Z2, parse_family("hex"), 4),
        (parse_family("tree:4"), Z2, 4),
        (parse_family("squareoct"), parse_family("hex"), 4),
    ]
    for a, b, cap in pairs:
        assert similarity_K(a, b, cap).K == similarity_K(b, a, cap).K


def test_eta_surrogate_tree_closed_form():
    t = table_for("tree:3", 8)
    val = eta(t, 6)
    assert abs(val - ((3 * 2 ** 5) ** (1 / 6) - 2.0)) < 1e-12
    assert eta(t, 8) <= eta(t, 6) + 1e-15  # non-increasing in k
    with pytest.raises(UsageError):
        eta(t, 9)


def test_eval_f():
    assert abs(eval_f(1.0, 1.0) - math.e) < 1e-12
    assert abs(eval_f(2.0, 4.0) - (2 * 64 * math.exp(4)) ** 0.25) < 1e-12
    # log f = (log B + 3 log x + B sqrt x)/x, so f -> 1 like exp(B/sqrt(x))
    assert abs(eval_f(1.0, 1e6) - 1.0) < 2e-3
    assert abs(eval_f(1.0, 1e9) - 1.0) < 1e-4
    assert eval_f(1.0, 1e6) > eval_f(1.0, 1e9) > 1.0
    with pytest.raises(UsageError):
        eval_f(-1.0, 2.0)


def test_distinct_partitions_examples():
    assert distinct_partitions(6) == (4, 3)
    assert distinct_partitions(1) == (1, 1)
    count, order = distinct_partitions(40)
    assert order * (order + 1) <= 2 * 40
    ratio = math.log(count) / (math.pi * math.sqrt(40 / 3))
    assert 0.5 <= ratio <= 1.1


@given(st.integers(1, 60))
def test_partition_order_bound(n):
    count, order = distinct_partitions(n)
    assert count >= 1
    assert order * (order + 1) <= 2 * n


def test_ball_locality_of_counts():
    """Counting inside the radius-n ball gives the same sigma: enumeration
    never leaves the ball."""
    from sawlab.families import Ball, GraphFamily
    from sawlab.walks import count_bridges, count_halfspace, count_saws

    n = 5
    b = ball(Z2, (0, 0), n)
    inside = set(b.vertices)
    adj = {v: tuple(sorted(u for u in Z2.neighbors(v) if u in inside)) for v in inside}
    restricted = GraphFamily(
        spec="z2-ball", neighbors=lambda v: adj[v], origin=(0, 0),
        declared_orbits=((0, 0),), orbit_of=lambda v: 0, max_degree=4)
    hf = default_height(Z2)
    assert count_saws(restricted, (0, 0), n) == count_saws(Z2, (0, 0), n)
    assert count_halfspace(restricted, hf, (0, 0), n) == count_halfspace(Z2, hf, (0, 0), n)
    assert count_bridges(restricted, hf, (0, 0), n)[0] == count_bridges(Z2, hf, (0, 0), n)[0]


def test_locality_report_agreement_regime():
    cyl = cylinder(2, (0, 10))
    rep = locality_report(Z2, default_height(Z2), cyl, default_height(cyl),
                          n_max=4, cap=6)
    assert rep.similarity.K == 4
    assert rep.slack == 0
    assert rep.tables_should_agree
    assert rep.sigma_divergence_n is None
    assert rep.b_divergence_n is None
    assert rep.cross_ok
    assert rep.gap == 0.0


def test_locality_report_divergence_regime():
    cyl = cylinder(2, (0, 4))
    rep = locality_report(Z2, default_height(Z2), cyl, default_height(cyl),
                          n_max=6, cap=6)
    assert not rep.tables_should_agree
    assert rep.sigma_divergence_n == 4  # wrap walks exist from length 4
    assert rep.cross_ok


def test_identical_families_zero_gap():
    rep = locality_report(Z2, default_height(Z2), hypercubic(2), default_height(Z2),
                          n_max=4, cap=3)
    assert rep.gap == 0.0 and rep.similarity.capped
