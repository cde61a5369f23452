"""Count tables: exact per-length walk counts and their serialization.

A table stores, for one (family, height) pair, the per-length counts from
each height-orbit representative plus the combined tables: sigma is the
max over representatives (supremum definition), b the min (infimum
definition), and c is taken from the origin representative.  Every integer
is serialized as a decimal string so arbitrary precision survives JSON.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .errors import UsageError
from .families import GraphFamily, parse_family
from .heights import HeightFunction, parse_height
from .walks import count_bridges, count_halfspace, count_saws


@dataclass(frozen=True)
class CountTable:
    family: str
    height: str
    n_max: int
    reps: tuple
    sigma_by_rep: tuple[tuple[int, ...], ...]
    c_by_rep: tuple[tuple[int, ...], ...]
    b_by_rep: tuple[tuple[int, ...], ...]
    b_spans_by_rep: tuple[tuple[dict, ...], ...]

    @property
    def sigma(self) -> tuple[int, ...]:
        return tuple(max(col) for col in zip(*self.sigma_by_rep))

    @property
    def c(self) -> tuple[int, ...]:
        return self.c_by_rep[0]

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(min(col) for col in zip(*self.b_by_rep))

    @property
    def b_by_span(self) -> tuple[dict, ...]:
        """Span distribution of the representative attaining the minimum at
        each length (first such representative on ties)."""
        out = []
        for n in range(self.n_max + 1):
            k = min(range(len(self.b_by_rep)), key=lambda i: (self.b_by_rep[i][n], i))
            out.append(dict(self.b_spans_by_rep[k][n]))
        return tuple(out)

    def truncate(self, n_max: int) -> "CountTable":
        if not 0 <= n_max <= self.n_max:
            raise UsageError("truncation length out of range")
        cut = n_max + 1
        return CountTable(
            family=self.family, height=self.height, n_max=n_max, reps=self.reps,
            sigma_by_rep=tuple(r[:cut] for r in self.sigma_by_rep),
            c_by_rep=tuple(r[:cut] for r in self.c_by_rep),
            b_by_rep=tuple(r[:cut] for r in self.b_by_rep),
            b_spans_by_rep=tuple(r[:cut] for r in self.b_spans_by_rep),
        )


def build_count_table(family: GraphFamily, hf: HeightFunction, n_max: int,
                      jobs: int = 1, node_budget: int | None = None) -> CountTable:
    """Count SAWs, half-space walks, and bridges from every height-orbit
    representative.

    Under a node budget the result may stop short of n_max: the returned
    table's n_max is the high-water mark actually completed for every
    representative and kind.
    """
    if n_max < 0:
        raise UsageError("n_max must be >= 0")
    sigma_rows, c_rows, b_rows, span_rows = [], [], [], []
    achieved = n_max
    for rep in hf.h_orbits:
        sigma = count_saws(family, rep, n_max, jobs=jobs, node_budget=node_budget)
        c = count_halfspace(family, hf, rep, n_max, jobs=jobs, node_budget=node_budget)
        b, spans = count_bridges(family, hf, rep, n_max, jobs=jobs, node_budget=node_budget)
        achieved = min(achieved, len(sigma) - 1, len(c) - 1, len(b) - 1)
        if achieved < 0:
            raise UsageError("count budget too small to finish a single level")
        sigma_rows.append(tuple(sigma))
        c_rows.append(tuple(c))
        b_rows.append(tuple(b))
        span_rows.append(tuple(spans))
    cut = achieved + 1
    return CountTable(
        family=family.spec, height=hf.spec, n_max=achieved, reps=tuple(hf.h_orbits),
        sigma_by_rep=tuple(r[:cut] for r in sigma_rows),
        c_by_rep=tuple(r[:cut] for r in c_rows),
        b_by_rep=tuple(r[:cut] for r in b_rows),
        b_spans_by_rep=tuple(r[:cut] for r in span_rows),
    )


def check_table_invariants(t: CountTable) -> list[str]:
    """Structural invariants: conventions at n = 0, span sums, and the
    per-vertex chain bridges <= half-space <= SAWs."""
    problems = []
    for name, rows in (("sigma", t.sigma_by_rep), ("c", t.c_by_rep), ("b", t.b_by_rep)):
        for row in rows:
            if row[0] != 1:
                problems.append(f"{name}[0] = {row[0]} != 1")
            if any(x < 0 for x in row):
                problems.append(f"{name} has a negative count")
    for i in range(len(t.reps)):
        for n in range(t.n_max + 1):
            if not t.b_by_rep[i][n] <= t.c_by_rep[i][n] <= t.sigma_by_rep[i][n]:
                problems.append(f"chain b <= c <= sigma fails at rep {i}, n = {n}")
            if sum(t.b_spans_by_rep[i][n].values()) != t.b_by_rep[i][n]:
                problems.append(f"span sums differ from b at rep {i}, n = {n}")
    return problems


def _enc_counts(row) -> list[str]:
    return [str(x) for x in row]


def table_to_dict(t: CountTable) -> dict:
    return {
        "kind": "count-table",
        "family": t.family,
        "height": t.height,
        "n_max": t.n_max,
        "reps": [list(r) if isinstance(r, tuple) else r for r in t.reps],
        "sigma": _enc_counts(t.sigma),
        "c": _enc_counts(t.c),
        "b": _enc_counts(t.b),
        "sigma_by_rep": [_enc_counts(r) for r in t.sigma_by_rep],
        "c_by_rep": [_enc_counts(r) for r in t.c_by_rep],
        "b_by_rep": [_enc_counts(r) for r in t.b_by_rep],
        "b_spans_by_rep": [[{str(s): str(c) for s, c in table.items()} for table in row]
                           for row in t.b_spans_by_rep],
    }


def _label_from_json(x):
    def conv(y):
        if isinstance(y, list):
            return tuple(conv(z) for z in y)
        return y
    return conv(x)


def table_from_dict(d: dict) -> CountTable:
    if d.get("kind") != "count-table":
        raise UsageError("not a count-table document")
    return CountTable(
        family=d["family"], height=d["height"], n_max=int(d["n_max"]),
        reps=tuple(_label_from_json(r) for r in d["reps"]),
        sigma_by_rep=tuple(tuple(int(x) for x in row) for row in d["sigma_by_rep"]),
        c_by_rep=tuple(tuple(int(x) for x in row) for row in d["c_by_rep"]),
        b_by_rep=tuple(tuple(int(x) for x in row) for row in d["b_by_rep"]),
        b_spans_by_rep=tuple(
            tuple({int(s): int(c) for s, c in table.items()} for table in row)
            for row in d["b_spans_by_rep"]),
    )


def write_table(t: CountTable, path: str) -> None:
    with open(path, "w") as fh:
        json.dump(table_to_dict(t), fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_table(path: str) -> CountTable:
    with open(path) as fh:
        return table_from_dict(json.load(fh))


def table_for_specs(family_spec: str, height_spec: str, n_max: int,
                    jobs: int = 1) -> CountTable:
    family = parse_family(family_spec)
    hf = parse_height(family, height_spec or "default")
    return build_count_table(family, hf, n_max, jobs=jobs)
