"""Design evaluation semantics and the design file format."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polylut.design import PolynomialDesign
from polylut.formats import ConfigError, FixedFormat


def make_design(**kw):
    base = dict(
        function="custom", mode="table",
        input_fmt=FixedFormat(0, 4), output_fmt=FixedFormat(0, 6),
        implicit_msb=False, lookup_bits=1, shift=3,
        sq_trunc=1, lin_trunc=0, clamp=False,
        coeffs=((1, 2, 3), (-1, 5, 40)),
    )
    base.update(kw)
    return PolynomialDesign(**base)


def test_evaluate_matches_formula():
    d = make_design()
    for z in range(16):
        region, x = z >> 3, z & 7
        a, b, c = d.coeffs[region]
        xt = x & ~1  # low sq_trunc bits cleared, not shifted away
        want = (a * xt * xt + b * x + c) >> 3
        assert d.evaluate(z) == want


def test_floor_semantics_on_negatives():
    """The output shift is floor division, also for negative accumulators."""
    d = make_design(coeffs=((0, 0, -9), (0, 0, -8)), shift=3,
                    sq_trunc=0)
    assert d.evaluate(0) == -2  # floor(-9/8), not truncate-toward-zero
    assert d.evaluate(8) == -1


def test_clamp():
    d = make_design(coeffs=((0, 0, -9), (0, 200, 513)), shift=0,
                    sq_trunc=0, clamp=True)
    assert d.evaluate(0) == 0
    assert d.evaluate(15) == 63


def test_truncation_clears_bits():
    d = make_design(sq_trunc=2, lin_trunc=1)
    assert d.truncated_operands(7) == (4, 6)
    assert d.truncated_operands(3) == (0, 2)


def test_validation():
    with pytest.raises(ConfigError):
        make_design(lookup_bits=5)
    with pytest.raises(ConfigError):
        make_design(shift=-1)
    with pytest.raises(ConfigError):
        make_design(sq_trunc=4)  # only 3 offset bits
    with pytest.raises(ConfigError):
        make_design(coeffs=((1, 2, 3),))  # one triple for two regions
    with pytest.raises(ConfigError):
        make_design(mode="closest")


coeff = st.integers(min_value=-(1 << 40), max_value=1 << 40)


@given(st.lists(st.tuples(coeff, coeff, coeff), min_size=4, max_size=4),
       st.integers(0, 6), st.integers(0, 2), st.integers(0, 2),
       st.booleans())
def test_file_round_trip(coeffs, shift, sq_trunc, lin_trunc, clamp):
    d = make_design(lookup_bits=2, coeffs=tuple(coeffs), shift=shift,
                    sq_trunc=sq_trunc, lin_trunc=lin_trunc, clamp=clamp)
    assert PolynomialDesign.loads(d.dumps()) == d


def test_load_rejects_corruption(tmp_path):
    d = make_design()
    text = d.dumps()
    with pytest.raises(ConfigError):
        PolynomialDesign.loads(text.replace("polylut design v1", "x"))
    with pytest.raises(ConfigError):
        PolynomialDesign.loads(text + "1 9 9 9\n")  # duplicate region row
    with pytest.raises(ConfigError):
        PolynomialDesign.loads("\n".join(text.splitlines()[:-1]))
    path = tmp_path / "d.design"
    d.save(str(path))
    assert PolynomialDesign.load(str(path)) == d
