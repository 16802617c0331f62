"""Domain geometry and superposition model storage/range tests."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from isarith.interval import Interval
from isarith.model import (
    Domain,
    OutOfDomain,
    SuperpositionModel,
    init_constant,
    init_variable,
)


def model_from_lists(domain, rows, support=None):
    coeffs = tuple(tuple(Interval(lo, hi) for lo, hi in row) for row in rows)
    if support is None:
        support = frozenset(range(len(rows)))
    return SuperpositionModel(domain, coeffs, frozenset(support))


def brute_range(m):
    """Independent oracle: enumerate all N^n branch tuples of endpoint sums."""
    lows = [[e.lo for e in row] for row in m.coeffs]
    highs = [[e.hi for e in row] for row in m.coeffs]
    n, cap = m.dim, m.branches
    best_lo = math.inf
    best_hi = -math.inf
    for combo in itertools.product(range(cap), repeat=n):
        best_lo = min(best_lo, sum(lows[i][j] for i, j in enumerate(combo)))
        best_hi = max(best_hi, sum(highs[i][j] for i, j in enumerate(combo)))
    return best_lo, best_hi


class TestDomain:
    def test_branch_geometry_unit(self):
        d = Domain.of([(0, 1)], branches=2)
        assert d.branch_interval(0, 0) == Interval(0.0, 0.5)
        assert d.branch_interval(0, 1) == Interval(0.5, 1.0)

    def test_last_branch_hits_box_endpoint(self):
        d = Domain.of([(0, 10), (0, 20)], branches=100)
        b = d.branch_interval(1, 99)
        assert b.hi == 20.0
        assert math.isclose(b.lo, 19.8, rel_tol=0, abs_tol=1e-12)

    def test_bad_indices(self):
        d = Domain.of([(0, 1)], branches=2)
        with pytest.raises(IndexError):
            d.branch_interval(1, 0)
        with pytest.raises(IndexError):
            d.branch_interval(0, 2)

    def test_degenerate_box_rejected(self):
        with pytest.raises(ValueError):
            Domain.of([(1, 1)], branches=2)
        with pytest.raises(ValueError):
            Domain.of([(0, 1)], branches=0)

    def test_branch_index_half_open(self):
        d = Domain.of([(0, 1)], branches=2)
        assert d.branch_index(0, 0.25) == 0
        assert d.branch_index(0, 0.5) == 1  # shared endpoint goes right
        assert d.branch_index(0, 1.0) == 1  # box top goes to the last branch

    def test_branch_index_near_top(self):
        d = Domain.of([(0, 10)], branches=100)
        assert d.branch_index(0, 9.999) == 99

    def test_branch_index_outside(self):
        d = Domain.of([(0, 1)], branches=2)
        with pytest.raises(OutOfDomain):
            d.branch_index(0, 1.5)

    @settings(max_examples=200, deadline=None)
    @given(
        st.floats(-1e6, 1e6),
        st.floats(1e-6, 1e6),
        st.integers(1, 37),
        st.floats(0, 1),
    )
    def test_branch_contains_its_points(self, lo, width, cap, t):
        d = Domain.of([(lo, lo + width)], branches=cap)
        x = min(max(lo + t * width, lo), lo + width)
        j = d.branch_index(0, x)
        assert d.branch_interval(0, j).contains(x)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-100, 100), st.floats(1e-3, 100), st.integers(1, 19))
    def test_branches_tile_the_box(self, lo, width, cap):
        d = Domain.of([(lo, lo + width)], branches=cap)
        pieces = [d.branch_interval(0, j) for j in range(cap)]
        assert pieces[0].lo == lo
        assert pieces[-1].hi == lo + width
        for a, b in zip(pieces, pieces[1:]):
            assert a.hi == b.lo  # adjacent branches share exactly one endpoint


class TestInit:
    def test_variable_rows(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        m = init_variable(d, 0)
        assert m.row(0) == (Interval(0, 0.5), Interval(0.5, 1))
        assert m.row(1) == (Interval(0, 0), Interval(0, 0))
        assert m.support == frozenset({0})

    def test_variable_range_is_exact(self):
        d = Domain.of([(-2, 5), (0, 1)], branches=7)
        rb = init_variable(d, 0).range_bounds()
        assert (rb.lo, rb.hi) == (-2.0, 5.0)

    def test_variable_evaluate_selects_branch(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        m = init_variable(d, 0)
        assert m.evaluate((0.7, 0.1)) == Interval(0.5, 1.0)

    def test_constant(self):
        d = Domain.of([(0, 1), (0, 1)], branches=3)
        m = init_constant(d, 0.0)
        assert all(e == Interval(0, 0) for row in m.coeffs for e in row)
        rb = init_constant(d, 3.5).range_bounds()
        assert (rb.lo, rb.hi) == (3.5, 3.5)
        assert init_constant(d, -1.0).evaluate((0.2, 0.9)) == Interval(-1, -1)
        assert init_constant(d, 2.0).support == frozenset()

    def test_storage_is_2nN_endpoints(self):
        d = Domain.of([(0, 1), (0, 2), (0, 3)], branches=5)
        m = init_variable(d, 1)
        endpoints = [v for row in m.coeffs for e in row for v in (e.lo, e.hi)]
        assert len(endpoints) == 2 * 3 * 5


class TestRange:
    def test_two_row_example(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        m = model_from_lists(d, [[(1, 2), (3, 4)], [(0, 1), (-1, 0)]])
        rb = m.range_bounds()
        assert (rb.lo, rb.hi) == brute_range(m) == (0.0, 5.0)
        assert rb.row_lo == (1.0, -1.0)
        assert rb.row_hi == (4.0, 1.0)

    def test_all_zero(self):
        d = Domain.of([(0, 1)], branches=4)
        rb = init_constant(d, 0.0).range_bounds()
        assert (rb.lo, rb.hi) == (0.0, 0.0)

    def test_matches_brute_force_on_random_models(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(1, 4))
            cap = int(rng.integers(1, 5))
            d = Domain.of([(0, 1)] * n, branches=cap)
            rows = []
            for _ in range(n):
                lo = rng.integers(-5, 5, size=cap)
                w = rng.integers(0, 4, size=cap)
                rows.append([(float(a), float(a + b)) for a, b in zip(lo, w)])
            m = model_from_lists(d, rows)
            rb = m.range_bounds()
            assert (rb.lo, rb.hi) == brute_range(m)  # integer sums are exact


class TestEvaluate:
    def test_selected_minkowski_sum(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        m = model_from_lists(d, [[(1, 2), (3, 4)], [(0, 1), (-1, 0)]])
        # x picks branch 1 on axis 0 and branch 0 on axis 1
        assert m.evaluate((0.9, 0.2)) == Interval(3, 5)

    def test_zero_model(self):
        d = Domain.of([(0, 1)], branches=3)
        assert init_constant(d, 0.0).evaluate((0.5,)) == Interval(0, 0)

    def test_point_arity_checked(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        with pytest.raises(OutOfDomain):
            init_variable(d, 0).evaluate((0.5,))

    def test_always_inside_range(self):
        rng = np.random.default_rng(11)
        d = Domain.of([(0, 2), (-1, 1), (3, 8)], branches=4)
        rows = []
        for _ in range(3):
            lo = rng.uniform(-3, 3, size=4)
            w = rng.uniform(0, 2, size=4)
            rows.append(list(zip(lo, lo + w)))
        m = model_from_lists(d, rows)
        rb = m.range_bounds()
        window = Interval(rb.lo, rb.hi)
        for _ in range(1000):
            x = [rng.uniform(b.lo, b.hi) for b in d.boxes]
            assert window.encloses(m.evaluate(x))


class TestSeparable:
    def test_trivial_models(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        assert init_variable(d, 0).is_separable()
        assert init_variable(d, 1).is_separable()
        assert init_constant(d, 4.2).is_separable()

    def test_two_wide_rows(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        m = model_from_lists(d, [[(1, 2), (3, 4)], [(0, 1), (-1, 0)]])
        assert not m.is_separable()


class TestValidation:
    def test_shape_mismatch(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        with pytest.raises(ValueError):
            model_from_lists(d, [[(0, 1), (0, 1)]])

    def test_rows_outside_support_must_be_constant(self):
        d = Domain.of([(0, 1), (0, 1)], branches=2)
        with pytest.raises(ValueError):
            model_from_lists(d, [[(0, 1), (2, 3)], [(0, 0), (0, 0)]], support={1})
