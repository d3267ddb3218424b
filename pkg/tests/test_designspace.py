"""Design-space generation: feasibility, completeness, and the catalog.

The load-bearing test compares generate_space against verify.oracle_space,
a brute-force enumeration sharing no code with the generation path: for
matched windows the two must agree exactly, region by region, both on the
set of (a, b) pairs and on every constant interval.
"""

import random
from fractions import Fraction

import pytest

from polylut.bounds import make_bound_table
from polylut.designspace import (CoefficientCatalog, GenerationLimitError,
                                 a_interval, b_interval, c_interval,
                                 chord_tables, extremal_chord_search,
                                 generate_space, linear_sufficient,
                                 min_feasible_lookup_bits, min_global_shift,
                                 region_feasible, region_min_shift,
                                 slope_interval)
from polylut.formats import ConfigError, builtin_spec
from polylut.verify import naive_chord_search, oracle_space, triple_valid

from tutil import random_bounds, random_table


def test_extremal_search_equals_naive_reference():
    rng = random.Random(10)
    for _ in range(60):
        n = rng.randrange(2, 18)
        g = [Fraction(rng.randrange(-99, 99), rng.randrange(1, 9))
             for _ in range(n)]
        h = [Fraction(rng.randrange(-99, 99), rng.randrange(1, 9))
             for _ in range(n)]
        for find_max in (True, False):
            want, wx, wy = naive_chord_search(g, h, find_max)
            got, x, y, _ = extremal_chord_search(g, h, find_max)
            assert (got, x, y) == (want, wx, wy)


def test_exact_line_region():
    """l = u = 2x: the only valid triple at shift 0 is (0, 2, 0)."""
    lower = [2 * x for x in range(8)]
    tables = chord_tables(lower, lower)
    assert region_feasible(tables)
    lo, hi = slope_interval(tables)
    assert lo < 0 < hi  # a = 0 strictly inside: linear sufficiency
    assert linear_sufficient(tables)
    assert region_min_shift(lower, lower, 8, 64) == 0
    space = oracle_space(lower, lower, 0, 8)
    assert space == {(0, 2): (0, 1)}
    (a0, a1), _ = a_interval(tables, 0, 8)
    got = {}
    for a in range(a0, a1 + 1):
        (b0, b1), _ = b_interval(tables, a, 0, 8)
        for b in range(b0, b1 + 1):
            c_lo, c_hi = c_interval(lower, lower, a, b, 0, 0, 0)
            if c_lo < c_hi:
                got[(a, b)] = (c_lo, c_hi)
    assert got == space


def test_floor_three_halves_region():
    """l = u = floor(3x/2) needs shift 1; (0, 3, 0) is then valid."""
    lower = [(3 * x) // 2 for x in range(8)]
    assert region_min_shift(lower, lower, 8, 64) == 1
    assert triple_valid(lower, lower, 0, 3, 0, 1)
    assert not any(
        triple_valid(lower, lower, a, b, c, 0)
        for (a, b), (c_lo, c_hi) in oracle_space(lower, lower, 0, 12).items()
        for c in range(c_lo, c_hi))


def test_infeasible_region_at_any_shift():
    """A spike that no quadratic can thread, independent of shift."""
    lower = [0, 0, 5, 0]
    tables = chord_tables(lower, lower)
    assert not region_feasible(tables)
    assert region_min_shift(lower, lower, 20, 256) is None


def test_interval_integerization_strict():
    """Integer a-interval = exactly the integers strictly inside the real one."""
    rng = random.Random(11)
    checked = 0
    for _ in range(100):
        n = rng.randrange(3, 16)
        lower, upper = random_bounds(rng, n, 8)
        tables = chord_tables(lower, upper)
        if not region_feasible(tables):
            continue
        lo, hi = slope_interval(tables)
        for shift in (0, 2):
            (a0, a1), clamped = a_interval(tables, shift, 1 << 12)
            scale = 1 << shift
            ints = [a for a in range(-(1 << 12), (1 << 12) + 1)
                    if lo * scale < a < hi * scale]
            if not clamped:
                assert ([] if a0 > a1 else list(range(a0, a1 + 1))) == ints
                checked += 1
    assert checked > 20


def test_b_and_c_intervals_match_inequalities():
    rng = random.Random(12)
    for _ in range(40):
        n = rng.randrange(2, 12)
        lower, upper = random_bounds(rng, n, 8)
        tables = chord_tables(lower, upper)
        shift = rng.randrange(0, 4)
        a = rng.randrange(-6, 6)
        window = 1 << 10
        (b0, b1), clamped = b_interval(tables, a, shift, window)
        scale = 1 << shift
        # direct check: b valid iff some c exists iff c_lo < c_hi
        direct = [b for b in range(-window, window + 1)
                  if c_interval(lower, upper, a, b, shift, 0, 0)[0]
                  < c_interval(lower, upper, a, b, shift, 0, 0)[1]]
        got = [] if b0 > b1 else list(range(b0, b1 + 1))
        if not clamped:
            assert got == direct, (lower, upper, a, shift)
        for b in got:
            c_lo, c_hi = c_interval(lower, upper, a, b, shift, 0, 0)
            for c in (c_lo, c_hi - 1):
                assert triple_valid(lower, upper, a, b, c, shift)
            assert not triple_valid(lower, upper, a, b, c_lo - 1, shift)
            assert not triple_valid(lower, upper, a, b, c_hi, shift)


def test_generate_space_equals_oracle():
    """Exact space equality against the brute-force oracle, random specs."""
    rng = random.Random(13)
    done = 0
    while done < 15:
        width = rng.randrange(2, 6)
        out_w = rng.randrange(2, 7)
        table = random_table(rng, width, out_w)
        lookup_bits = rng.randrange(0, width + 1)
        shift = rng.randrange(0, 5)
        window = rng.choice((8, 21, 64))
        catalog = generate_space(table, lookup_bits, shift, window=window)
        for region in range(1 << lookup_bits):
            lo, up = table.region_bounds(lookup_bits, region)
            want = oracle_space(lo, up, shift, window)
            got = {(a, b): (c_lo, c_hi)
                   for a, b, c_lo, c_hi in catalog.regions[region].groups}
            assert got == want, (lo, up, shift, window)
        done += 1


def test_region_min_shift_is_minimal():
    """region_min_shift equals the first shift whose oracle space is nonempty."""
    rng = random.Random(14)
    for _ in range(25):
        n = 1 << rng.randrange(1, 4)
        lower, upper = random_bounds(rng, n, 8)
        cap = 10
        window = 64
        got = region_min_shift(lower, upper, cap, window)
        first = None
        for k in range(cap + 1):
            if oracle_space(lower, upper, k, window):
                first = k
                break
        assert got == first, (lower, upper)


def test_min_global_shift_and_monotonicity():
    table = make_bound_table(builtin_spec("recip", 6))
    k3, per3 = min_global_shift(table, 3)
    k4, per4 = min_global_shift(table, 4)
    assert k3 == max(per3) and k4 == max(per4)
    # more lookup bits never needs a larger shift (regions only get easier)
    assert k4 <= k3
    cat = generate_space(table, 3)
    assert cat.shift == k3 and cat.feasible


def test_frozen_builtin_feasibility():
    """Reference lookup sizes for the 8-bit built-ins (frozen values)."""
    want = {"recip": (2, 4, 9), "log2": (1, 3, 12), "exp2": (0, 3, 13)}
    for function, (r_quad, r_lin, shift) in want.items():
        table = make_bound_table(builtin_spec(function, 8))
        assert min_feasible_lookup_bits(table, "quadratic") == r_quad
        assert min_feasible_lookup_bits(table, "linear") == r_lin
        k, _ = min_global_shift(table, r_quad)
        assert k == shift
    with pytest.raises(ConfigError):
        min_feasible_lookup_bits(table, "cubic")


def test_catalog_round_trip_and_counts():
    rng = random.Random(15)
    table = random_table(rng, 4, 5, style="curve")
    catalog = generate_space(table, 2, window=32)
    again = CoefficientCatalog.loads(catalog.dumps())
    assert again == catalog
    # design_count is the product over regions of summed c-range sizes
    want = 1
    for region in catalog.regions:
        want *= sum(c_hi - c_lo for _, _, c_lo, c_hi in region.groups)
    assert catalog.design_count == want
    with pytest.raises(ConfigError):
        CoefficientCatalog.loads("bogus\n" + catalog.dumps())


def test_group_cap_and_bad_args():
    rng = random.Random(16)
    table = random_table(rng, 4, 5, style="curve")
    with pytest.raises(GenerationLimitError):
        # two-point regions leave a unconstrained: the window explodes
        generate_space(table, 3, 0, window=1 << 11, group_cap=50)
    with pytest.raises(ConfigError):
        generate_space(table, 9)
    with pytest.raises(ConfigError):
        generate_space(table, 1, -1)


def test_threads_match_serial():
    table = make_bound_table(builtin_spec("log2", 6))
    serial = generate_space(table, 2, threads=1)
    threaded = generate_space(table, 2, threads=4)
    assert serial == threaded


def test_explicit_infeasible_shift():
    lower = [(3 * x) // 2 for x in range(8)]
    upper = list(lower)
    table_cls = type(make_bound_table(builtin_spec("recip", 3)))
    from polylut.formats import FixedFormat
    table = table_cls(FixedFormat(0, 3), FixedFormat(0, 4), lower, upper)
    catalog = generate_space(table, 0, 0)  # needs shift 1
    assert not catalog.feasible
    assert catalog.design_count == 0
