import math

import pytest

from latinlab.core import (
    Entry,
    OrderedPartialLatinSquare,
    PartialLatinSquare,
    count_all,
    exact_uniform_sample,
    random_ordered_subset,
    validate_square,
)
from latinlab.errors import OrderTooLargeError, ValidationError
from latinlab.leftover import (
    chernoff_bound,
    codegree,
    completions_count,
    density,
    freedman_bound,
    is_quasirandom,
    is_triangle_typical,
    leftover_graph,
    triangle_count,
)
from latinlab.rng import make_rng


def empty_partial(n):
    return PartialLatinSquare(n, frozenset())


def full_partial(sq):
    return PartialLatinSquare(sq.n, sq.entry_set())


L2 = validate_square([[1, 2], [2, 1]])
ONE_ENTRY = PartialLatinSquare(2, frozenset({Entry(1, 1, 1)}))


class TestLeftoverGraph:
    def test_density_extremes(self):
        assert density(leftover_graph(empty_partial(3))) == 1.0
        assert density(leftover_graph(full_partial(L2))) == 0.0

    def test_density_one_entry(self):
        graph = leftover_graph(ONE_ENTRY)
        assert graph.edge_count() == 9
        assert density(graph) == 0.75

    def test_density_formula(self):
        rng = make_rng(1)
        sq = exact_uniform_sample(4, rng)
        for m in (0, 3, 9, 16):
            sub = PartialLatinSquare(4, frozenset(random_ordered_subset(sq, m, rng).entries))
            assert density(leftover_graph(sub)) == 1 - m / 16

    def test_triangle_counts(self):
        assert triangle_count(leftover_graph(empty_partial(2))) == 8
        assert triangle_count(leftover_graph(ONE_ENTRY)) == 4
        assert triangle_count(leftover_graph(full_partial(L2))) == 0

    def test_triangle_count_equals_addable_entries(self):
        rng = make_rng(2)
        for n in (3, 4):
            sq = exact_uniform_sample(n, rng)
            sub = PartialLatinSquare(n, frozenset(random_ordered_subset(sq, n, rng).entries))
            addable = 0
            for r in range(1, n + 1):
                for c in range(1, n + 1):
                    for s in range(1, n + 1):
                        e = Entry(r, c, s)
                        if e in sub.entries:
                            continue
                        try:
                            sub.with_entries([e])
                        except ValidationError:
                            continue
                        addable += 1
            assert triangle_count(leftover_graph(sub)) == addable

    def test_codegree(self):
        graph = leftover_graph(empty_partial(3))
        assert codegree(graph, ("row", 1), ("col", 2)) == 3
        assert codegree(graph, ("row", 1), ("sym", 2)) == 3
        assert codegree(graph, ("col", 1), ("sym", 2)) == 3
        with pytest.raises(ValidationError):
            codegree(graph, ("row", 1), ("row", 2))


class TestTypicality:
    def test_empty_and_full(self):
        assert is_triangle_typical(empty_partial(3), 0.0) is True
        assert is_triangle_typical(full_partial(L2), 0.0) is True

    def test_ordered_completion_prefix_report(self):
        ordered = OrderedPartialLatinSquare(
            2, (Entry(1, 1, 1), Entry(1, 2, 2), Entry(2, 1, 2), Entry(2, 2, 1))
        )
        verdict_09, report = is_triangle_typical(ordered, 0.9)
        assert report[0]["triangles"] == 4
        assert math.isclose(report[0]["expected"], 8 * (3 / 4) ** 3)
        assert report[0]["typical"] is True
        _, report_01 = is_triangle_typical(ordered, 0.1)
        assert report_01[0]["typical"] is False
        # prefix 2 has 2 triangles against expectation 1, so the ordered
        # square as a whole is not 0.9-typical
        assert report[1]["triangles"] == 2
        assert verdict_09 is False

    def test_quasirandom_extremes(self):
        assert is_quasirandom(empty_partial(3), 0.0) is True
        assert is_quasirandom(full_partial(L2), 5.0) is True

    def test_quasirandom_one_entry(self):
        graph = leftover_graph(ONE_ENTRY)
        target = 2 * 0.75 * 0.75
        deg = codegree(graph, ("row", 1), ("col", 1))
        assert deg == 1
        assert abs(deg - target) <= 0.2 * target
        # other pairs (e.g. row 2 / col 2 with codegree 2) break the bound,
        # so the square as a whole is not 0.2-quasirandom
        assert codegree(graph, ("row", 2), ("col", 2)) == 2
        assert is_quasirandom(ONE_ENTRY, 0.2) is False


class TestCompletions:
    def test_empty_n4(self):
        assert completions_count(empty_partial(4)) == 576 == count_all(4)

    def test_full_square(self):
        assert completions_count(full_partial(L2)) == 1

    def test_stuck_partial(self):
        stuck = PartialLatinSquare(2, frozenset({Entry(1, 1, 1), Entry(2, 2, 2)}))
        assert completions_count(stuck) == 0

    def test_monotone_under_adding_entries(self):
        rng = make_rng(3)
        sq = exact_uniform_sample(4, rng)
        ordered = random_ordered_subset(sq, 8, rng)
        previous = completions_count(empty_partial(4))
        for k in range(1, 9):
            current = completions_count(
                PartialLatinSquare(4, frozenset(ordered.entries[:k]))
            )
            assert current <= previous
            previous = current

    def test_guard(self):
        with pytest.raises(OrderTooLargeError):
            completions_count(empty_partial(7))


class TestBounds:
    def test_freedman_capped_at_one(self):
        assert freedman_bound(0.0, [0.5], [1.0], 1.0) == 1.0

    def test_freedman_raw_example(self):
        value = freedman_bound(1.0, [1.0], [1.0], 1.0, cap=False)
        assert math.isclose(value, 2 * math.exp(-3 / 8), rel_tol=1e-12)

    def test_freedman_monotone_in_t(self):
        rng = make_rng(4)
        for _ in range(50):
            k = rng.randint(1, 6)
            probs = [rng.random() for _ in range(k)]
            lips = [rng.uniform(0, 2) for _ in range(k)]
            kmax = max(lips)
            ts = sorted(rng.uniform(0, 5) for _ in range(4))
            values = [freedman_bound(t, probs, lips, kmax) for t in ts]
            assert all(a >= b for a, b in zip(values, values[1:]))

    def test_freedman_validation(self):
        with pytest.raises(ValidationError):
            freedman_bound(-1.0, [0.5], [1.0], 1.0)
        with pytest.raises(ValidationError):
            freedman_bound(1.0, [0.5], [2.0], 1.0)

    def test_chernoff_in_unit_interval(self):
        rng = make_rng(5)
        for _ in range(50):
            value = chernoff_bound(rng.uniform(0, 50), rng.uniform(0.1, 5), rng.uniform(0, 3))
            assert 0.0 <= value <= 1.0

    def test_chernoff_spot_value(self):
        raw = chernoff_bound(9.0, 1.0, 1.0, cap=False)
        assert math.isclose(raw, 2 * math.exp(-9 / (8 / 3)), rel_tol=1e-12)
