"""Decision procedure: pick one narrow design out of the catalog.

The pipeline refines a coefficient catalog in a fixed order of priorities:

  1. the catalog is generated at the smallest feasible output shift k
     (designspace.generate_space already handles that);
  2. maximize the square-operand truncation i, keeping at least one valid
     triple in every region (binary search; per-triple validity is an
     interval [0, i_max] once the triple is valid untruncated, because the
     truncated operand shrinks monotonically with i and so the polynomial
     value moves monotonically between two in-bounds endpoints);
  3. maximize the linear-operand truncation j the same way;
  4. minimize stored coefficient widths, a first, then b, then c, using
     the shared-shift width minimizer below; each coefficient indepen-
     dently prefers an all-nonnegative or all-nonpositive encoding
     (magnitude plus fixed sign in the datapath) and falls back to two's
     complement with an extra sign bit when regions disagree on sign;
  5. pick, per region, the first surviving triple in (a, b, c) order.

Width minimization works on half-open magnitude ranges so that constant
coefficients (whole intervals of valid c) are handled exactly without
enumerating them.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import kernels
from .design import PolynomialDesign
from .designspace import CoefficientCatalog, RegionSpace, _map_regions
from .formats import BoundTable, ConfigError
from .intmath import (
    first_multiple_in_range,
    max_trailing_zeros_in_range,
    trailing_zeros,
)

_SURVIVE_BATCH = 1 << 10
_REFINE_BATCH = 1 << 15

NONNEG = "nonneg"
NONPOS = "nonpos"
MIXED = "mixed"

DEFAULT_ORDER = ("sq", "lin", "width")


@dataclass(frozen=True)
class CoefficientEncoding:
    """How one coefficient field is stored in the lookup word.

    Stored value s reconstructs the coefficient as:
      nonneg:  v = s << shift            (s is an unsigned magnitude)
      nonpos:  v = -(s << shift)
      mixed:   v = s << shift            (s is two's complement)
    """

    name: str
    sign_class: str
    magnitude_width: int  # bits of |v| >> shift
    shift: int

    @property
    def width(self) -> int:
        """Total stored field width (adds the sign bit when mixed)."""
        return self.magnitude_width + (1 if self.sign_class == MIXED else 0)

    def representable(self, value: int) -> bool:
        if self.sign_class == NONNEG and value < 0:
            return False
        if self.sign_class == NONPOS and value > 0:
            return False
        mag = -value if value < 0 else value
        if mag & ((1 << self.shift) - 1):
            return False
        stored = value >> self.shift  # exact: value is a multiple
        if self.sign_class == MIXED:
            return -(1 << self.magnitude_width) <= stored < (1 << self.magnitude_width)
        return (mag >> self.shift) < (1 << self.magnitude_width)

    def encode(self, value: int) -> int:
        """Raw unsigned field bits for the coefficient value."""
        if not self.representable(value):
            raise ValueError(f"{value} not representable in {self}")
        stored = value >> self.shift
        if self.sign_class == NONPOS:
            return -stored
        if self.sign_class == MIXED:
            return stored & ((1 << self.width) - 1)
        return stored

    def decode(self, raw: int) -> int:
        if raw < 0 or raw >> self.width:
            raise ValueError(f"raw field {raw} exceeds {self.width} bits")
        if self.sign_class == MIXED:
            sign_bit = 1 << (self.width - 1) if self.width else 0
            stored = raw - (1 << self.width) if sign_bit and raw & sign_bit else raw
            return stored << self.shift
        if self.sign_class == NONPOS:
            return -(raw << self.shift)
        return raw << self.shift


def minimize_width(region_ranges, zero_cap: int):
    """Smallest shared (width, shift) storing one value per region.

    region_ranges: per region, a list of half-open (lo, hi) ranges of
    candidate magnitudes (lo >= 0, lo < hi). Chooses the largest shared
    power-of-two shift t and width P such that every region contains a
    magnitude equal to s << t with s of at most P bits, minimizing P
    first and then preferring the smallest t achieving it. A magnitude of
    zero counts as having zero_cap trailing zeros and zero stored bits.

    Returns (width, shift) with width >= 0.
    """
    if not region_ranges:
        raise ValueError("no regions")
    shared_t = None
    for ranges in region_ranges:
        if not ranges:
            raise ValueError("region with no candidate magnitudes")
        best = max(max_trailing_zeros_in_range(lo, hi, zero_cap)
                   for lo, hi in ranges)
        shared_t = best if shared_t is None else min(shared_t, best)
    best_cost = None
    best_t = None
    for t in range(shared_t + 1):
        worst = None
        for ranges in region_ranges:
            region_min = None
            for lo, hi in ranges:
                fm = first_multiple_in_range(lo, hi, t)
                if fm is None:
                    continue
                cost = fm.bit_length() - t
                if region_min is None or cost < region_min:
                    region_min = cost
            assert region_min is not None, "shift exceeds a region's reach"
            if worst is None or region_min > worst:
                worst = region_min
        if best_cost is None or worst < best_cost:
            best_cost = worst
            best_t = t
    return max(best_cost, 0), best_t


# --------------------------------------------------------------- truncation

def _operands(n: int, sq_trunc: int, lin_trunc: int):
    sq_mask = ~((1 << sq_trunc) - 1)
    lin_mask = ~((1 << lin_trunc) - 1)
    return ([(x & sq_mask) ** 2 for x in range(n)],
            [x & lin_mask for x in range(n)])


def _region_survives(region: RegionSpace, lower, upper, sq_trunc: int,
                     lin_trunc: int, shift: int, backend) -> bool:
    if not region.groups:
        return False
    sq, lin = _operands(len(lower), sq_trunc, lin_trunc)
    shift_pow = 1 << shift
    groups = region.groups
    for start in range(0, len(groups), _SURVIVE_BATCH):
        chunk = groups[start:start + _SURVIVE_BATCH]
        lo_out, hi_out = kernels.refine_offset_intervals(
            list(lower), list(upper), sq, lin,
            [g[0] for g in chunk], [g[1] for g in chunk], shift_pow,
            backend=backend)
        for (a, b, c_lo, c_hi), rl, rh in zip(chunk, lo_out, hi_out):
            if max(c_lo, rl) < min(c_hi, rh):
                return True
    return False


def _refine_region(region: RegionSpace, lower, upper, sq_trunc: int,
                   lin_trunc: int, shift: int, backend) -> RegionSpace:
    sq, lin = _operands(len(lower), sq_trunc, lin_trunc)
    shift_pow = 1 << shift
    groups = region.groups
    refined = []
    for start in range(0, len(groups), _REFINE_BATCH):
        chunk = groups[start:start + _REFINE_BATCH]
        lo_out, hi_out = kernels.refine_offset_intervals(
            list(lower), list(upper), sq, lin,
            [g[0] for g in chunk], [g[1] for g in chunk], shift_pow,
            backend=backend)
        for (a, b, c_lo, c_hi), rl, rh in zip(chunk, lo_out, hi_out):
            nl = max(c_lo, rl)
            nh = min(c_hi, rh)
            if nl < nh:
                refined.append((a, b, nl, nh))
    return RegionSpace(tuple(refined), region.clamped,
                       region.linear_sufficient)


def _truncation_pass(catalog: CoefficientCatalog, table: BoundTable,
                     which: str, backend, threads: int):
    """Shared implementation of the square/linear truncation passes."""
    top = catalog.input_fmt.width - catalog.lookup_bits
    if not catalog.feasible:
        raise ConfigError("catalog has empty regions; nothing to truncate")

    def predicate(level: int) -> bool:
        sq_t = level if which == "sq" else catalog.sq_trunc
        lin_t = level if which == "lin" else catalog.lin_trunc

        def work(r):
            lo, up = table.region_bounds(catalog.lookup_bits, r)
            return _region_survives(catalog.regions[r], lo, up,
                                    sq_t, lin_t, catalog.shift, backend)

        return all(_map_regions(work, catalog.num_regions, threads))

    low = catalog.sq_trunc if which == "sq" else catalog.lin_trunc
    high = top
    assert predicate(low), "catalog invariant: untruncated space is valid"
    while low < high:
        mid = (low + high + 1) // 2
        if predicate(mid):
            low = mid
        else:
            high = mid - 1
    level = low

    sq_t = level if which == "sq" else catalog.sq_trunc
    lin_t = level if which == "lin" else catalog.lin_trunc

    def refine(r):
        lo, up = table.region_bounds(catalog.lookup_bits, r)
        return _refine_region(catalog.regions[r], lo, up,
                              sq_t, lin_t, catalog.shift, backend)

    regions = _map_regions(refine, catalog.num_regions, threads)
    return catalog.replace_regions(regions, sq_trunc=sq_t, lin_trunc=lin_t)


def max_square_truncation(catalog: CoefficientCatalog, table: BoundTable,
                          backend: str | None = None, threads: int = 1):
    """Largest i keeping every region nonempty; returns the refined catalog."""
    return _truncation_pass(catalog, table, "sq", backend, threads)


def max_linear_truncation(catalog: CoefficientCatalog, table: BoundTable,
                          backend: str | None = None, threads: int = 1):
    """Largest j keeping every region nonempty; returns the refined catalog."""
    return _truncation_pass(catalog, table, "lin", backend, threads)


# --------------------------------------------------------------- width pass

def _value_ranges(values):
    """Distinct magnitudes of an explicit value list, as unit ranges."""
    return [(v, v + 1) for v in sorted(values)]


def _interval_magnitude_ranges(c_lo: int, c_hi: int, sign_class: str):
    """Magnitude ranges of [c_lo, c_hi) members with the given sign."""
    out = []
    if sign_class in (NONNEG, MIXED):
        lo = max(c_lo, 0)
        if lo < c_hi:
            out.append((lo, c_hi))
    if sign_class in (NONPOS, MIXED):
        hi = min(c_hi, 1)  # values <= 0 are [c_lo, min(c_hi, 1))
        if c_lo < hi:
            out.append((max(1 - hi, 0), 1 - c_lo))
    return out


def _coefficient_ranges(catalog: CoefficientCatalog, coeff: str,
                        sign_class: str):
    """Per-region magnitude ranges for one coefficient and sign class.

    Returns None when some region has no value of that sign class.
    """
    per_region = []
    for region in catalog.regions:
        if coeff == "c":
            ranges = []
            for _, _, c_lo, c_hi in region.groups:
                ranges.extend(_interval_magnitude_ranges(c_lo, c_hi, sign_class))
        else:
            idx = 0 if coeff == "a" else 1
            if sign_class == NONNEG:
                vals = {g[idx] for g in region.groups if g[idx] >= 0}
            elif sign_class == NONPOS:
                vals = {-g[idx] for g in region.groups if g[idx] <= 0}
            else:
                vals = {abs(g[idx]) for g in region.groups}
            ranges = _value_ranges(vals)
        if not ranges:
            return None
        per_region.append(ranges)
    return per_region


def _choose_encoding(catalog: CoefficientCatalog, coeff: str,
                     zero_cap: int) -> CoefficientEncoding:
    candidates = []
    for sign_class in (NONNEG, NONPOS):
        ranges = _coefficient_ranges(catalog, coeff, sign_class)
        if ranges is not None:
            width, shift = minimize_width(ranges, zero_cap)
            candidates.append((width, sign_class, shift))
    if candidates:
        # smaller width wins; NONNEG wins ties by sort order
        width, sign_class, shift = min(candidates)
        return CoefficientEncoding(coeff, sign_class, width, shift)
    ranges = _coefficient_ranges(catalog, coeff, MIXED)
    width, shift = minimize_width(ranges, zero_cap)
    return CoefficientEncoding(coeff, MIXED, width, shift)


def _prune_catalog(catalog: CoefficientCatalog, coeff: str,
                   enc: CoefficientEncoding) -> CoefficientCatalog:
    if coeff == "c":
        return catalog  # constants stay as intervals; selection filters
    idx = 0 if coeff == "a" else 1
    regions = []
    for region in catalog.regions:
        groups = tuple(g for g in region.groups if enc.representable(g[idx]))
        assert groups, "width choice must leave every region nonempty"
        regions.append(RegionSpace(groups, region.clamped,
                                   region.linear_sufficient))
    return catalog.replace_regions(regions)


def coefficient_width_pass(catalog: CoefficientCatalog,
                           zero_cap: int | None = None):
    """Choose stored encodings for a, then b, then c, pruning in between.

    Returns (pruned_catalog, (enc_a, enc_b, enc_c)).
    """
    if zero_cap is None:
        zero_cap = catalog.output_fmt.width + 8
    if not catalog.feasible:
        raise ConfigError("catalog has empty regions; nothing to encode")
    encodings = []
    for coeff in ("a", "b", "c"):
        enc = _choose_encoding(catalog, coeff, zero_cap)
        catalog = _prune_catalog(catalog, coeff, enc)
        encodings.append(enc)
    return catalog, tuple(encodings)


# ---------------------------------------------------------------- selection

def _first_constant(c_lo: int, c_hi: int, enc: CoefficientEncoding):
    """Smallest representable constant in [c_lo, c_hi), or None."""
    t = enc.shift
    cap = 1 << enc.magnitude_width
    if enc.sign_class in (NONPOS, MIXED):
        # negatives first, most negative first = largest magnitude first
        hi = min(c_hi, 1 if enc.sign_class == NONPOS else 0)
        # for MIXED try strictly negative first; 0 handled on the nonneg side
        if c_lo < hi:
            m_lo = max(1 - hi, 0)
            m_hi = 1 - c_lo
            fm = first_multiple_in_range(m_lo, m_hi, t)
            if fm is not None:
                last = ((m_hi - 1) >> t) << t
                top = cap if enc.sign_class == MIXED else cap - 1
                mag = min(last, top << t)
                if mag >= fm:
                    return -mag
        if enc.sign_class == NONPOS:
            # 0 (magnitude 0) belongs to this class too
            if c_lo <= 0 < c_hi:
                return 0
            return None
    lo = max(c_lo, 0)
    if lo < c_hi:
        fm = first_multiple_in_range(lo, c_hi, t)
        if fm is not None and (fm >> t) < cap:
            return fm
    return None


def select_design(catalog: CoefficientCatalog, encodings=None,
                  clamp: bool = False) -> PolynomialDesign:
    """First surviving triple per region, in ascending (a, b, c) order.

    With encodings given, only triples representable under them qualify
    (the width pass guarantees at least one per region).
    """
    if not catalog.feasible:
        raise ConfigError("catalog has empty regions; no design to select")
    coeffs = []
    for region in catalog.regions:
        chosen = None
        for a, b, c_lo, c_hi in region.groups:  # already (a, b) ascending
            if encodings is None:
                chosen = (a, b, c_lo)
                break
            enc_a, enc_b, enc_c = encodings
            if not enc_a.representable(a) or not enc_b.representable(b):
                continue
            c = _first_constant(c_lo, c_hi, enc_c)
            if c is not None:
                chosen = (a, b, c)
                break
        if chosen is None:
            raise ConfigError(
                "no representable triple in some region; "
                "encodings are inconsistent with the catalog")
        coeffs.append(chosen)
    return PolynomialDesign(
        function=catalog.function, mode=catalog.mode,
        input_fmt=catalog.input_fmt, output_fmt=catalog.output_fmt,
        implicit_msb=catalog.implicit_msb, lookup_bits=catalog.lookup_bits,
        shift=catalog.shift, sq_trunc=catalog.sq_trunc,
        lin_trunc=catalog.lin_trunc, clamp=clamp, coeffs=tuple(coeffs))


def encodings_from_design(design: PolynomialDesign,
                          zero_cap: int | None = None):
    """Tightest encodings covering exactly the design's chosen values."""
    if zero_cap is None:
        zero_cap = design.output_fmt.width + 8
    out = []
    for idx, name in enumerate(("a", "b", "c")):
        values = [triple[idx] for triple in design.coeffs]
        if all(v >= 0 for v in values):
            sign_class = NONNEG
        elif all(v <= 0 for v in values):
            sign_class = NONPOS
        else:
            sign_class = MIXED
        shift = min(trailing_zeros(v, zero_cap) for v in values)
        width = max((abs(v) >> shift).bit_length() for v in values)
        out.append(CoefficientEncoding(name, sign_class, width, shift))
    return tuple(out)


@dataclass(frozen=True)
class SelectedDesign:
    """Final pick plus the refined catalog and field encodings behind it."""

    design: PolynomialDesign
    catalog: CoefficientCatalog
    encodings: tuple

    @property
    def field_widths(self) -> tuple:
        return tuple(enc.width for enc in self.encodings)

    @property
    def word_width(self) -> int:
        return sum(self.field_widths)

    @property
    def lut_bits(self) -> int:
        return self.word_width * self.design.num_regions


def explore(catalog: CoefficientCatalog, table: BoundTable,
            order=DEFAULT_ORDER, clamp: bool = False,
            backend: str | None = None, threads: int = 1) -> SelectedDesign:
    """Run the refinement passes in order and select the final design."""
    allowed = {"sq", "lin", "width"}
    if any(step not in allowed for step in order):
        raise ConfigError(f"unknown pass in order {order!r}")
    encodings = None
    for step in order:
        if step == "sq":
            catalog = max_square_truncation(catalog, table, backend=backend,
                                            threads=threads)
        elif step == "lin":
            catalog = max_linear_truncation(catalog, table, backend=backend,
                                            threads=threads)
        else:
            catalog, encodings = coefficient_width_pass(catalog)
    design = select_design(catalog, encodings, clamp=clamp)
    if encodings is None:
        encodings = encodings_from_design(design)
    return SelectedDesign(design=design, catalog=catalog, encodings=encodings)
