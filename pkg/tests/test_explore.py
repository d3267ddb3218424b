"""Refinement passes: truncation, width minimization, selection.

Each pass is checked against an independent brute-force model:
  * minimize_width against trying every shift and scanning every multiple;
  * the truncation passes against interval intersections of oracle_space
    runs at each level (also validating the monotonicity the binary
    search relies on);
  * _first_constant against scanning the constant interval.
"""

import random

import pytest

from polylut.bounds import make_bound_table
from polylut.designspace import CoefficientCatalog, RegionSpace, generate_space
from polylut.explore import (DEFAULT_ORDER, MIXED, NONNEG, NONPOS,
                             CoefficientEncoding, _first_constant,
                             coefficient_width_pass, encodings_from_design,
                             explore, max_linear_truncation,
                             max_square_truncation, minimize_width,
                             select_design)
from polylut.formats import ConfigError, FixedFormat, builtin_spec
from polylut.verify import check_design, oracle_space, triple_valid

from tutil import brute_min_width, random_table, random_width_families


# ------------------------------------------------------- width minimization

def test_minimize_width_equals_brute_force():
    rng = random.Random(20)
    for regions in random_width_families(rng, 150):
        got = minimize_width(regions, 8)
        want = brute_min_width(regions, 8)
        assert got == want, regions


def test_minimize_width_zero_and_errors():
    # every region can store zero: zero bits at the deepest shift
    assert minimize_width([[(0, 5)], [(0, 1)]], 9) == (0, 9)
    assert minimize_width([[(6, 7)]], 8) == (2, 1)  # 6 = 11b << 1
    with pytest.raises(ValueError):
        minimize_width([], 8)
    with pytest.raises(ValueError):
        minimize_width([[]], 8)


# ------------------------------------------------------------- encodings

def test_encoding_round_trip():
    rng = random.Random(21)
    for _ in range(300):
        sign_class = rng.choice((NONNEG, NONPOS, MIXED))
        enc = CoefficientEncoding("a", sign_class, rng.randrange(0, 8),
                                  rng.randrange(0, 4))
        lo, hi = {
            NONNEG: (0, 1 << enc.magnitude_width),
            NONPOS: (-(1 << enc.magnitude_width) + 1, 1),
            MIXED: (-(1 << enc.magnitude_width),
                    1 << enc.magnitude_width),
        }[sign_class]
        for s in range(lo, hi):
            v = s << enc.shift
            assert enc.representable(v)
            raw = enc.encode(v)
            assert 0 <= raw < (1 << max(enc.width, 1)) or enc.width == 0
            assert enc.decode(raw) == v
        # just outside, and off-grid values, are rejected
        assert not enc.representable(hi << enc.shift)
        assert not enc.representable((lo - 1) << enc.shift)
        if enc.shift:
            assert not enc.representable((1 << enc.shift) + 1)


def test_first_constant_is_minimal_representable():
    rng = random.Random(22)
    for _ in range(400):
        enc = CoefficientEncoding("c", rng.choice((NONNEG, NONPOS, MIXED)),
                                  rng.randrange(0, 5), rng.randrange(0, 3))
        c_lo = rng.randrange(-40, 30)
        c_hi = c_lo + rng.randrange(1, 40)
        got = _first_constant(c_lo, c_hi, enc)
        members = [v for v in range(c_lo, c_hi) if enc.representable(v)]
        want = min(members) if members else None
        assert got == want, (c_lo, c_hi, enc)


# ------------------------------------------------------- truncation passes

def _intersect(d1, d2):
    out = {}
    for key in d1.keys() & d2.keys():
        lo = max(d1[key][0], d2[key][0])
        hi = min(d1[key][1], d2[key][1])
        if lo < hi:
            out[key] = (lo, hi)
    return out


def test_truncation_passes_match_oracle_model():
    rng = random.Random(23)
    done = attempts = 0
    while done < 8:
        attempts += 1
        assert attempts < 300, "random tables keep coming out infeasible"
        table = random_table(rng, 4, rng.randrange(3, 6), style="curve")
        lookup_bits = rng.randrange(0, 3)
        window = 24
        try:
            catalog = generate_space(table, lookup_bits, window=window)
        except ConfigError:
            continue  # no feasible shift for this random table
        if not catalog.feasible:
            continue
        top = 4 - lookup_bits
        shift = catalog.shift
        base = []
        for r in range(catalog.num_regions):
            lo, up = table.region_bounds(lookup_bits, r)
            base.append(oracle_space(lo, up, shift, window))

        def level_spaces(sq, lin):
            out = []
            for r in range(catalog.num_regions):
                lo, up = table.region_bounds(lookup_bits, r)
                out.append(oracle_space(lo, up, shift, window, sq, lin))
            return out

        # model of the square pass: intersect with each level's space
        feas = []
        for i in range(top + 1):
            cur = [_intersect(b, s) for b, s in zip(base, level_spaces(i, 0))]
            feas.append(all(cur))
        assert feas[0]
        # survival must be a prefix property (binary-search soundness)
        i_star = max(i for i in range(top + 1) if feas[i])
        assert all(feas[i] for i in range(i_star + 1))
        after_sq = max_square_truncation(catalog, table)
        assert after_sq.sq_trunc == i_star
        model_sq = [_intersect(b, s)
                    for b, s in zip(base, level_spaces(i_star, 0))]
        got_sq = [{(a, b): (cl, ch) for a, b, cl, ch in reg.groups}
                  for reg in after_sq.regions]
        assert got_sq == model_sq

        # model of the linear pass on top of the square result
        feas = []
        for j in range(top + 1):
            cur = [_intersect(m, s)
                   for m, s in zip(model_sq, level_spaces(i_star, j))]
            feas.append(all(cur))
        j_star = max(j for j in range(top + 1) if feas[j])
        assert all(feas[j] for j in range(j_star + 1))
        after_lin = max_linear_truncation(after_sq, table)
        assert after_lin.lin_trunc == j_star
        model_lin = [_intersect(m, s)
                     for m, s in zip(model_sq, level_spaces(i_star, j_star))]
        got_lin = [{(a, b): (cl, ch) for a, b, cl, ch in reg.groups}
                   for reg in after_lin.regions]
        assert got_lin == model_lin
        done += 1


# ------------------------------------------------------------- width pass

def hand_catalog(groups_per_region, offset_bits=2, shift=0, out_width=6):
    lookup_bits = max((len(groups_per_region) - 1).bit_length(), 0)
    assert len(groups_per_region) == 1 << lookup_bits
    regions = tuple(RegionSpace(tuple(g), False, True)
                    for g in groups_per_region)
    return CoefficientCatalog(
        function="custom", mode="table",
        input_fmt=FixedFormat(0, lookup_bits + offset_bits),
        output_fmt=FixedFormat(0, out_width), implicit_msb=False,
        lookup_bits=lookup_bits, shift=shift, sq_trunc=0, lin_trunc=0,
        window=99, regions=regions)


def test_width_pass_prefers_nonneg_on_ties():
    # a can be stored as all-nonneg {1,2} or all-nonpos {-1,-2}: same width
    catalog = hand_catalog([
        [(1, -1, 0, 4), (-1, 1, 0, 4), (2, -2, 0, 4), (-2, 2, 0, 4)],
    ])
    pruned, (enc_a, enc_b, _) = coefficient_width_pass(catalog)
    assert enc_a.sign_class == NONNEG
    assert (enc_a.magnitude_width, enc_a.shift) == (1, 0)  # covers a = 1
    assert all(g[0] >= 0 for g in pruned.regions[0].groups)
    # after pruning a >= 0, remaining b values are all negative
    assert enc_b.sign_class == NONPOS


def test_width_pass_needs_mixed():
    # one region only has a > 0, the other only a < 0: two's complement
    catalog = hand_catalog([
        [(3, 0, 0, 2)],
        [(-3, 0, 0, 2)],
    ])
    _, (enc_a, _, _) = coefficient_width_pass(catalog)
    assert enc_a.sign_class == MIXED
    assert enc_a.width == enc_a.magnitude_width + 1
    assert enc_a.representable(3) and enc_a.representable(-3)


def test_width_pass_keeps_regions_and_representability():
    rng = random.Random(24)
    done = 0
    while done < 10:
        table = random_table(rng, 4, 5, style="curve")
        try:
            catalog = generate_space(table, 1, window=32)
        except ConfigError:
            continue
        if not catalog.feasible:
            continue
        pruned, encs = coefficient_width_pass(catalog)
        enc_a, enc_b, enc_c = encs
        for region in pruned.regions:
            assert region.groups
            for a, b, _, _ in region.groups:
                assert enc_a.representable(a)
                assert enc_b.representable(b)
        design = select_design(pruned, encs)
        for (a, b, c) in design.coeffs:
            assert enc_c.representable(c)
        # the selected design is valid for its bound table
        for r in range(design.num_regions):
            lo, up = table.region_bounds(1, r)
            a, b, c = design.coeffs[r]
            assert triple_valid(lo, up, a, b, c, design.shift)
        done += 1


def test_select_design_first_in_order():
    catalog = hand_catalog([
        [(0, 2, 5, 9), (1, -1, 0, 4)],
        [(-2, 0, -3, 1), (0, 1, 2, 3)],
    ])
    design = select_design(catalog)
    assert design.coeffs == ((0, 2, 5), (-2, 0, -3))


def test_encodings_from_design_cover_choices():
    spec = builtin_spec("log2", 6)
    table = make_bound_table(spec)
    catalog = generate_space(table, 3, function=spec.function,
                             mode=spec.mode)
    design = select_design(catalog)
    for idx, enc in enumerate(encodings_from_design(design)):
        values = [triple[idx] for triple in design.coeffs]
        for v in values:
            assert enc.representable(v)
            assert enc.decode(enc.encode(v)) == v
        if all(v >= 0 for v in values):
            assert enc.sign_class == NONNEG
        elif all(v <= 0 for v in values):
            assert enc.sign_class == NONPOS


def test_explore_end_to_end():
    spec = builtin_spec("log2", 8)
    table = make_bound_table(spec)
    catalog = generate_space(table, 3, function=spec.function,
                             mode=spec.mode, implicit_msb=spec.implicit_msb)
    selected = explore(catalog, table)
    assert selected.design.sq_trunc >= 0
    report = check_design(selected.design, table, mode="exhaustive")
    assert report.passed
    assert selected.word_width == sum(selected.field_widths)
    assert selected.lut_bits == selected.word_width * 8

    # a width-only run also produces a checking design
    only_width = explore(catalog, table, order=("width",))
    assert check_design(only_width.design, table).passed
    with pytest.raises(ConfigError):
        explore(catalog, table, order=("sq", "bogus"))


def test_truncation_rejects_infeasible():
    catalog = hand_catalog([[]])
    with pytest.raises(ConfigError):
        max_square_truncation(
            catalog, make_bound_table(builtin_spec("recip", 2)))
