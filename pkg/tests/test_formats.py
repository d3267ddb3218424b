"""Format, spec and bound-table plumbing."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polylut.formats import (ACCURACY_MODES, TABLE, BoundTable, ConfigError,
                             FixedFormat, ProblemSpec, builtin_spec,
                             concat_input, split_input)


def test_fixed_format_basics():
    f = FixedFormat(1, 10)
    assert f.width == 11
    assert f.count == 2048
    assert str(f) == "1.10"
    with pytest.raises(ConfigError):
        FixedFormat(-1, 3)
    with pytest.raises(ConfigError):
        FixedFormat(0, 0)


@given(st.integers(0, (1 << 12) - 1), st.integers(0, 12))
def test_split_concat_round_trip(z, lookup_bits):
    region, offset = split_input(z, lookup_bits, 12)
    assert concat_input(region, offset, lookup_bits, 12) == z
    assert 0 <= region < (1 << lookup_bits)
    assert 0 <= offset < (1 << (12 - lookup_bits))


def test_split_rejects_bad_args():
    with pytest.raises(ConfigError):
        split_input(0, 9, 8)
    with pytest.raises(ValueError):
        split_input(256, 2, 8)


def test_builtin_conventions():
    r = builtin_spec("recip", 10)
    assert (r.input_fmt, r.output_fmt) == (FixedFormat(0, 10), FixedFormat(0, 11))
    assert r.implicit_msb
    lg = builtin_spec("log2", 10)
    assert lg.output_fmt == FixedFormat(0, 11)
    assert not lg.implicit_msb
    e = builtin_spec("exp2", 10)
    assert e.output_fmt == FixedFormat(1, 10)
    assert e.implicit_msb
    with pytest.raises(ConfigError):
        builtin_spec("sin", 10)


def test_spec_validation():
    fmt = FixedFormat(0, 4)
    for mode in ACCURACY_MODES:
        if mode == TABLE:
            ProblemSpec("custom", fmt, fmt, mode)
        else:
            with pytest.raises(ConfigError):
                ProblemSpec("custom", fmt, fmt, mode)
    with pytest.raises(ConfigError):
        ProblemSpec("recip", fmt, fmt, "exact")


def test_bound_table_validation():
    fmt = FixedFormat(0, 2)
    out = FixedFormat(0, 3)
    BoundTable(fmt, out, [0, 1, 2, 3], [0, 1, 2, 7])
    with pytest.raises(ConfigError):
        BoundTable(fmt, out, [0, 1, 2], [0, 1, 2])  # short arrays
    with pytest.raises(ConfigError):
        BoundTable(fmt, out, [0, 5, 0, 0], [0, 4, 0, 0])  # lo > hi
    with pytest.raises(ConfigError):
        BoundTable(fmt, out, [0, 0, 0, 0], [0, 0, 0, 8])  # above cap


def test_region_bounds_slicing():
    fmt = FixedFormat(0, 3)
    out = FixedFormat(0, 4)
    lower = list(range(8))
    upper = [v + 1 for v in lower]
    t = BoundTable(fmt, out, lower, upper)
    lo, up = t.region_bounds(1, 1)
    assert lo == [4, 5, 6, 7]
    assert up == [5, 6, 7, 8]
    lo, up = t.region_bounds(3, 5)
    assert (lo, up) == ([5], [6])
    lo, up = t.region_bounds(0, 0)
    assert lo == lower
    with pytest.raises(IndexError):
        t.region_bounds(1, 2)


def test_bound_table_text_round_trip():
    fmt = FixedFormat(1, 2)
    out = FixedFormat(0, 5)
    t = BoundTable(fmt, out, list(range(8)), [v + 2 for v in range(8)])
    again = BoundTable.loads(t.dumps())
    assert again == t


def test_bound_table_load_rejects_corruption():
    fmt = FixedFormat(0, 2)
    out = FixedFormat(0, 3)
    t = BoundTable(fmt, out, [0, 1, 2, 3], [1, 2, 3, 4])
    text = t.dumps()
    with pytest.raises(ConfigError):
        BoundTable.loads(text.replace("polylut bounds v1", "nope"))
    with pytest.raises(ConfigError):
        BoundTable.loads(text + "2 0 1\n")  # duplicate record
    with pytest.raises(ConfigError):
        BoundTable.loads("\n".join(text.splitlines()[:-1]))  # missing record
