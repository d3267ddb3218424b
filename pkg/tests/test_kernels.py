"""Kernel backend parity and dispatch guards.

Every kernel must return identical results (including search witnesses and
evaluation counts) from the pure and compiled backends, and the pruned
search must agree with the naive one while never evaluating more pairs.
"""

import random
from fractions import Fraction

import pytest

from polylut import kernels
from polylut.verify import naive_chord_search

compiled = pytest.mark.skipif(not kernels.compiled_available(),
                              reason="compiled backend not built")


def random_instance(rng, count=None):
    count = count or rng.randrange(2, 40)
    g_num = [rng.randrange(-500, 500) for _ in range(count)]
    g_den = [rng.randrange(1, 40) for _ in range(count)]
    h_num = [rng.randrange(-500, 500) for _ in range(count)]
    h_den = [rng.randrange(1, 40) for _ in range(count)]
    return g_num, g_den, h_num, h_den


def random_bounds(rng, count):
    lower = [rng.randrange(0, 200) for _ in range(count)]
    upper = [lo + rng.randrange(0, 5) for lo in lower]
    return lower, upper


def test_chord_tables_reference():
    """Chord entries equal the brute-force extremal secant slopes."""
    rng = random.Random(1)
    for _ in range(50):
        n = rng.randrange(2, 20)
        lower, upper = random_bounds(rng, n)
        fn, fd, cn, cd = kernels.chord_tables(lower, upper, backend="pure")
        assert len(fn) == 2 * n - 3
        for idx in range(2 * n - 3):
            t = idx + 1
            pairs = [(x, t - x) for x in range(n) if x < t - x < n]
            want_f = max(Fraction(lower[y] - upper[x] - 1, y - x)
                         for x, y in pairs)
            want_c = min(Fraction(upper[y] + 1 - lower[x], y - x)
                         for x, y in pairs)
            assert Fraction(fn[idx], fd[idx]) == want_f
            assert Fraction(cn[idx], cd[idx]) == want_c


@compiled
def test_chord_tables_backend_parity():
    rng = random.Random(2)
    for _ in range(200):
        n = rng.randrange(2, 30)
        lower, upper = random_bounds(rng, n)
        pure = kernels.chord_tables(lower, upper, backend="pure")
        comp = kernels.chord_tables(lower, upper, backend="compiled")
        assert tuple(map(list, pure)) == tuple(map(list, comp))


def test_search_skip_equals_naive_pure():
    rng = random.Random(3)
    for _ in range(200):
        inst = random_instance(rng)
        for find_max in (True, False):
            naive = kernels.extremal_search(*inst, find_max, False,
                                            backend="pure")
            skip = kernels.extremal_search(*inst, find_max, True,
                                           backend="pure")
            assert (naive[0], naive[1], naive[2], naive[3]) == \
                   (skip[0], skip[1], skip[2], skip[3])
            assert skip[4] <= naive[4]
            # the naive result equals the double-loop Fraction reference
            g = [Fraction(n, d) for n, d in zip(inst[0], inst[1])]
            h = [Fraction(n, d) for n, d in zip(inst[2], inst[3])]
            ref, rx, ry = naive_chord_search(g, h, find_max)
            assert Fraction(naive[0], naive[1]) == ref
            assert (naive[2], naive[3]) == (rx, ry)


@compiled
def test_search_backend_parity():
    rng = random.Random(4)
    for _ in range(300):
        inst = random_instance(rng)
        for find_max in (True, False):
            for use_skip in (True, False):
                pure = kernels.extremal_search(*inst, find_max, use_skip,
                                               backend="pure")
                comp = kernels.extremal_search(*inst, find_max, use_skip,
                                               backend="compiled")
                assert tuple(pure) == tuple(comp)


def test_search_degenerate():
    assert kernels.extremal_search([1], [1], [1], [1], True, True) is None
    assert kernels.extremal_search([], [], [], [], False, True) is None


@compiled
def test_linear_bound_scan_parity():
    rng = random.Random(5)
    for _ in range(200):
        n = rng.randrange(2, 25)
        lower, upper = random_bounds(rng, n)
        tables = kernels.chord_tables(lower, upper, backend="pure")
        a = rng.randrange(-50, 50)
        shift_pow = 1 << rng.randrange(0, 8)
        pure = kernels.linear_bound_scan(*tables, a, shift_pow,
                                         backend="pure")
        comp = kernels.linear_bound_scan(*tables, a, shift_pow,
                                         backend="compiled")
        assert tuple(pure) == tuple(comp)


@compiled
def test_offset_scans_parity():
    rng = random.Random(6)
    for _ in range(200):
        n = rng.randrange(1, 25)
        lower, upper = random_bounds(rng, n)
        sq = [x * x for x in range(n)]
        lin = list(range(n))
        shift_pow = 1 << rng.randrange(0, 8)
        a_vals = [rng.randrange(-40, 40) for _ in range(6)]
        b_vals = [rng.randrange(-40, 40) for _ in range(6)]
        pure = kernels.refine_offset_intervals(
            lower, upper, sq, lin, a_vals, b_vals, shift_pow, backend="pure")
        comp = kernels.refine_offset_intervals(
            lower, upper, sq, lin, a_vals, b_vals, shift_pow,
            backend="compiled")
        assert pure == (list(comp[0]), list(comp[1]))
        one_p = kernels.offset_interval_scan(
            lower, upper, sq, lin, a_vals[0], b_vals[0], shift_pow,
            backend="pure")
        one_c = kernels.offset_interval_scan(
            lower, upper, sq, lin, a_vals[0], b_vals[0], shift_pow,
            backend="compiled")
        assert one_p == one_c == (pure[0][0], pure[1][0])


def test_dispatch_guards():
    big = 1 << 70
    # auto dispatch silently falls back to pure for oversized values
    out = kernels.chord_tables([0, big], [1, big + 2])
    assert out[0] == [big - 2]  # lower[1] - upper[0] - 1
    with pytest.raises(ValueError):
        kernels.chord_tables([0, big], [1, big], backend="compiled")
    with pytest.raises(ValueError):
        kernels.extremal_search([big], [1], [big], [1], True, True,
                                backend="compiled")
    with pytest.raises(ValueError):
        kernels.chord_tables([0, 1], [1, 2], backend="weird")


def test_force_pure_env(monkeypatch):
    monkeypatch.setenv(kernels.FORCE_PURE_ENV, "1")
    assert kernels.active_backend_name() == "pure"
    monkeypatch.delenv(kernels.FORCE_PURE_ENV)
    expected = "compiled" if kernels.compiled_available() else "pure"
    assert kernels.active_backend_name() == expected
