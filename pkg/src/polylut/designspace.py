"""Complete design-space generation for piecewise quadratic approximations.

Per lookup region with bounds l[x] <= out(x) <= u[x], a coefficient triple
(a, b, c) at output shift k is valid when

    l[x] <= floor((a*x^2 + b*x + c) / 2^k) <= u[x]   for every offset x.

The valid set is characterized exactly by nested integer intervals:

  * chord tables: for every index sum t, the largest "floor" secant slope
    M(t) and the smallest "ceiling" secant slope m(t) between bound
    corners (chord_tables);
  * the region is feasible iff M(t) < m(t) for all t and, across pairs
    t < s, max (M(s)-m(t))/(s-t) < min (m(s)-M(t))/(s-t) (region_feasible);
  * a must lie strictly between 2^k times those two cross-pair extrema
    (slope_interval / a_interval);
  * given a, b must lie strictly between max_t(2^k*M(t) - a*t) and
    min_t(2^k*m(t) - a*t) (b_interval);
  * given a and b, valid constants are exactly the integers in
    [max_x(2^k*l[x] - a*x^2 - b*x), min_x(2^k*(u[x]+1) - a*x^2 - b*x)),
    which is nonempty whenever b is strictly inside its open interval
    (c_interval).

Regions with fewer than three points leave a (and for single-point
regions, b) unconstrained; those coefficients are clamped to a window and
the region is flagged. Everything is exact integer/rational arithmetic.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from . import kernels
from .formats import BoundTable, ConfigError, FixedFormat
from .intmath import ceil_div, first_int_above, floor_div, last_int_below

CATALOG_HEADER = "polylut catalog v1"

# Above this many candidate slopes, try a ternary-search shortcut before
# enumerating the whole a-interval during shift-feasibility tests.
_TERNARY_THRESHOLD = 4096

# Batch size for the grouped constant-interval scans.
_REFINE_BATCH = 1 << 15


class GenerationLimitError(RuntimeError):
    """The candidate enumeration exceeded the configured cap."""


@dataclass(frozen=True)
class ChordTables:
    """Extremal secant slopes of one region, indexed by t-1 for t >= 1."""

    floor_num: tuple
    floor_den: tuple
    ceil_num: tuple
    ceil_den: tuple

    @property
    def count(self) -> int:
        return len(self.floor_num)

    @property
    def floor_slopes(self) -> tuple:
        return tuple(Fraction(n, d)
                     for n, d in zip(self.floor_num, self.floor_den))

    @property
    def ceil_slopes(self) -> tuple:
        return tuple(Fraction(n, d)
                     for n, d in zip(self.ceil_num, self.ceil_den))


def chord_tables(lower, upper, backend: str | None = None) -> ChordTables:
    fn, fd, cn, cd = kernels.chord_tables(list(lower), list(upper),
                                          backend=backend)
    return ChordTables(tuple(fn), tuple(fd), tuple(cn), tuple(cd))


def extremal_chord_search(g_values, h_values, find_max: bool,
                          use_skip: bool = True,
                          backend: str | None = None):
    """Extremum of (G[y] - H[x])/(y - x) over x < y.

    Accepts ints or Fractions; returns (Fraction, x, y, evals) or None
    when fewer than two points. The pruned scan returns exactly what the
    naive scan does, including the witness pair.
    """
    g = [Fraction(v) for v in g_values]
    h = [Fraction(v) for v in h_values]
    res = kernels.extremal_search(
        [f.numerator for f in g], [f.denominator for f in g],
        [f.numerator for f in h], [f.denominator for f in h],
        find_max, use_skip, backend=backend)
    if res is None:
        return None
    num, den, x, y, evals = res
    return Fraction(num, den), x, y, evals


def region_feasible(tables: ChordTables, backend: str | None = None) -> bool:
    """Any valid quadratic at some shift? Exact, shift-independent test."""
    for fn, fd, cn, cd in zip(tables.floor_num, tables.floor_den,
                              tables.ceil_num, tables.ceil_den):
        if fn * cd >= cn * fd:  # M(t) >= m(t)
            return False
    lo, hi = slope_interval(tables, backend=backend)
    if lo is None or hi is None:
        return True
    return lo < hi


def slope_interval(tables: ChordTables, backend: str | None = None):
    """Open real interval of admissible unshifted square coefficients.

    Returns (lo, hi) as Fractions; (None, None) when fewer than two chord
    sums exist (the coefficient is then unconstrained).
    """
    if tables.count < 2:
        return None, None
    lo = kernels.extremal_search(
        list(tables.floor_num), list(tables.floor_den),
        list(tables.ceil_num), list(tables.ceil_den),
        True, True, backend=backend)
    hi = kernels.extremal_search(
        list(tables.ceil_num), list(tables.ceil_den),
        list(tables.floor_num), list(tables.floor_den),
        False, True, backend=backend)
    return Fraction(lo[0], lo[1]), Fraction(hi[0], hi[1])


def linear_sufficient(tables: ChordTables, backend: str | None = None) -> bool:
    """True when a = 0 is admissible, i.e. a pure linear segment can meet
    the bounds at some shift. Shift-independent."""
    lo, hi = slope_interval(tables, backend=backend)
    if lo is not None and lo >= 0:
        return False
    if hi is not None and hi <= 0:
        return False
    return all(fn * cd < cn * fd for fn, fd, cn, cd in
               zip(tables.floor_num, tables.floor_den,
                   tables.ceil_num, tables.ceil_den))


def a_interval(tables: ChordTables, shift: int, window: int,
               backend: str | None = None):
    """Inclusive integer range [a0, a1] of square coefficients at 2^shift.

    May be empty (a0 > a1). The window is a hard clamp: coefficients are
    kept within [-window, window] so the enumerated space is exactly the
    valid space intersected with the window box. The second element
    reports whether the window actually cut anything off.
    """
    lo, hi = slope_interval(tables, backend=backend)
    if lo is None:
        a0 = -window
        clamped = True
    else:
        a0 = first_int_above(lo.numerator << shift, lo.denominator)
        clamped = a0 < -window
        a0 = max(a0, -window)
    if hi is None:
        a1 = window
        clamped = True
    else:
        a1 = last_int_below(hi.numerator << shift, hi.denominator)
        clamped = clamped or a1 > window
        a1 = min(a1, window)
    return (a0, a1), clamped


def b_interval(tables: ChordTables, a: int, shift: int, window: int,
               backend: str | None = None):
    """Inclusive integer range [b0, b1] of linear coefficients for a fixed
    square coefficient, hard-clamped to [-window, window] like a_interval.
    No chords at all (fewer than two points) falls back to the full
    window."""
    res = kernels.linear_bound_scan(
        list(tables.floor_num), list(tables.floor_den),
        list(tables.ceil_num), list(tables.ceil_den),
        a, 1 << shift, backend=backend)
    if res is None:
        return (-window, window), True
    lo_num, lo_den, hi_num, hi_den = res
    b0 = first_int_above(lo_num, lo_den)
    b1 = last_int_below(hi_num, hi_den)
    clamped = b0 < -window or b1 > window
    return (max(b0, -window), min(b1, window)), clamped


def c_interval(lower, upper, a: int, b: int, shift: int,
               sq_trunc: int = 0, lin_trunc: int = 0,
               backend: str | None = None):
    """Half-open integer range [c_lo, c_hi) of valid constants."""
    sq, lin = _operands(len(lower), sq_trunc, lin_trunc)
    return kernels.offset_interval_scan(
        list(lower), list(upper), sq, lin, a, b, 1 << shift,
        backend=backend)


def _operands(n: int, sq_trunc: int, lin_trunc: int):
    sq_mask = ~((1 << sq_trunc) - 1)
    lin_mask = ~((1 << lin_trunc) - 1)
    sq = [(x & sq_mask) ** 2 for x in range(n)]
    lin = [x & lin_mask for x in range(n)]
    return sq, lin


def _b_width(tables: ChordTables, a: int, shift: int,
             backend: str | None = None) -> Fraction:
    res = kernels.linear_bound_scan(
        list(tables.floor_num), list(tables.floor_den),
        list(tables.ceil_num), list(tables.ceil_den),
        a, 1 << shift, backend=backend)
    lo_num, lo_den, hi_num, hi_den = res
    return Fraction(hi_num, hi_den) - Fraction(lo_num, lo_den)


def _any_a_admits_b(tables: ChordTables, a0: int, a1: int, shift: int,
                    window: int, backend: str | None = None) -> bool:
    """Does some a in [a0, a1] leave room for an in-window integer b?"""
    if a0 > a1:
        return False
    if a1 - a0 > _TERNARY_THRESHOLD:
        # The open b-interval's width is concave in a (min of affine terms
        # minus max of affine terms), so ternary search finds its maximum;
        # any open interval wider than 1 contains an integer.
        lo, hi = a0, a1
        while hi - lo > 2:
            m1 = lo + (hi - lo) // 3
            m2 = hi - (hi - lo) // 3
            w1 = _b_width(tables, m1, shift, backend)
            w2 = _b_width(tables, m2, shift, backend)
            if w1 < w2:
                lo = m1 + 1
            elif w1 > w2:
                hi = m2 - 1
            else:
                lo, hi = m1, m2
        for a in range(lo, hi + 1):
            if _b_width(tables, a, shift, backend) > 1:
                b0, b1 = b_interval(tables, a, shift, window,
                                    backend=backend)[0]
                if b0 <= b1:
                    return True
                break  # the integer exists but the window cuts it off
        # Maximum width <= 1 (or window interference): exact scan.
    for a in range(a0, a1 + 1):
        (b0, b1), _ = b_interval(tables, a, shift, window, backend=backend)
        if b0 <= b1:
            return True
    return False


def _region_admits(tables: ChordTables, shift: int, window: int,
                   backend: str | None) -> bool:
    """Does the region have any valid in-window (a, b) at this shift?"""
    if tables.count == 0:
        return True  # single point: a = b = 0, c = 2^k * l[0]
    if tables.count == 1:
        # Two points: unwindowed, every a admits a b (the open b-gap has
        # width >= 2 * 2^k). Within the window, the widest placement puts
        # a at the gap's center; if neither rounding of the clamped
        # center works, nothing does.
        res = kernels.linear_bound_scan(
            list(tables.floor_num), list(tables.floor_den),
            list(tables.ceil_num), list(tables.ceil_den),
            0, 1 << shift, backend=backend)
        lo_num, lo_den, hi_num, hi_den = res
        center = (Fraction(lo_num, lo_den) + Fraction(hi_num, hi_den)) / 2
        seen = set()
        for a in (floor_div(center.numerator, center.denominator),
                  ceil_div(center.numerator, center.denominator)):
            a = max(-window, min(window, a))
            if a in seen:
                continue
            seen.add(a)
            (b0, b1), _ = b_interval(tables, a, shift, window,
                                     backend=backend)
            if b0 <= b1:
                return True
        return False
    (a0, a1), _ = a_interval(tables, shift, window, backend=backend)
    if a0 > a1:
        return False
    return _any_a_admits_b(tables, a0, a1, shift, window, backend=backend)


def _min_shift_from_tables(tables: ChordTables, shift_cap: int, window: int,
                           backend: str | None):
    if tables.count == 0:
        return 0
    if not region_feasible(tables, backend=backend):
        return None
    for k in range(shift_cap + 1):
        if _region_admits(tables, k, window, backend):
            return k
    return None


def region_min_shift(lower, upper, shift_cap: int, window: int,
                     backend: str | None = None):
    """Smallest shift k admitting a valid in-window triple, or None when
    no shift up to shift_cap does. Each k is checked directly, so no
    monotonicity assumption is needed."""
    tables = chord_tables(lower, upper, backend=backend)
    return _min_shift_from_tables(tables, shift_cap, window, backend)


def min_global_shift(table: BoundTable, lookup_bits: int,
                     shift_cap: int | None = None,
                     window: int | None = None,
                     backend: str | None = None,
                     threads: int = 1):
    """(k, per_region): smallest shift at which every region has a valid
    in-window triple, plus each region's own minimal shift.

    k is at least max(per_region) but may exceed it: a region's solution
    at its own minimum doubles into one at any larger shift only while
    the doubled coefficients stay inside the window, so the shared shift
    is verified region by region. k is None when no shift up to
    shift_cap works; per_region entries are None for regions that never
    become feasible on their own.
    """
    shift_cap, window = _defaults(table.output_fmt, shift_cap, window)

    def work(region):
        lo, up = table.region_bounds(lookup_bits, region)
        tables = chord_tables(lo, up, backend=backend)
        return tables, _min_shift_from_tables(tables, shift_cap, window,
                                              backend)

    results = _map_regions(work, 1 << lookup_bits, threads)
    per_region = [k for _, k in results]
    if any(k is None for k in per_region):
        return None, per_region
    k = max(per_region)
    while k <= shift_cap:
        if all(kr == k or _region_admits(tables, k, window, backend)
               for tables, kr in results):
            return k, per_region
        k += 1
    return None, per_region


def _defaults(output_fmt: FixedFormat, shift_cap, window):
    if shift_cap is None:
        shift_cap = 2 * output_fmt.width
    if window is None:
        window = 1 << (2 * output_fmt.width)
    if shift_cap < 0:
        raise ConfigError("shift cap must be >= 0")
    if window < 0:
        raise ConfigError("window must be >= 0")
    return shift_cap, window


def _map_regions(work, num_regions, threads: int):
    if threads <= 1:
        return [work(r) for r in range(num_regions)]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(work, range(num_regions)))


@dataclass(frozen=True)
class RegionSpace:
    """All valid coefficient groups of one region at the catalog's shift.

    Each group is (a, b, c_lo, c_hi): every integer c in [c_lo, c_hi)
    completes a valid triple. Groups are sorted by (a, b) and unique.
    """

    groups: tuple
    clamped: bool  # some coefficient range was cut to the window
    linear_sufficient: bool

    @property
    def design_count(self) -> int:
        return sum(c_hi - c_lo for _, _, c_lo, c_hi in self.groups)


@dataclass(frozen=True)
class CoefficientCatalog:
    function: str
    mode: str
    input_fmt: FixedFormat
    output_fmt: FixedFormat
    implicit_msb: bool
    lookup_bits: int
    shift: int
    sq_trunc: int
    lin_trunc: int
    window: int
    regions: tuple  # RegionSpace per lookup region

    @property
    def num_regions(self) -> int:
        return 1 << self.lookup_bits

    @property
    def feasible(self) -> bool:
        return all(len(r.groups) > 0 for r in self.regions)

    @property
    def all_linear_sufficient(self) -> bool:
        return all(r.linear_sufficient for r in self.regions)

    @property
    def design_count(self) -> int:
        total = 1
        for region in self.regions:
            total *= region.design_count
        return total

    def replace_regions(self, regions, sq_trunc=None, lin_trunc=None):
        return CoefficientCatalog(
            function=self.function, mode=self.mode,
            input_fmt=self.input_fmt, output_fmt=self.output_fmt,
            implicit_msb=self.implicit_msb, lookup_bits=self.lookup_bits,
            shift=self.shift,
            sq_trunc=self.sq_trunc if sq_trunc is None else sq_trunc,
            lin_trunc=self.lin_trunc if lin_trunc is None else lin_trunc,
            window=self.window, regions=tuple(regions))

    # ---------------------------------------------------------------- file IO

    def dumps(self) -> str:
        lines = [
            CATALOG_HEADER,
            f"function {self.function}",
            f"mode {self.mode}",
            f"input {self.input_fmt.int_bits}.{self.input_fmt.frac_bits}",
            f"output {self.output_fmt.int_bits}.{self.output_fmt.frac_bits}",
            f"implicit_msb {int(self.implicit_msb)}",
            f"lookup_bits {self.lookup_bits}",
            f"shift {self.shift}",
            f"sq_trunc {self.sq_trunc}",
            f"lin_trunc {self.lin_trunc}",
            f"window {self.window}",
        ]
        for index, region in enumerate(self.regions):
            lines.append(
                f"region {index} groups {len(region.groups)} "
                f"clamped {int(region.clamped)} "
                f"linear {int(region.linear_sufficient)}")
            for a, b, c_lo, c_hi in region.groups:
                lines.append(f"{a} {b} {c_lo} {c_hi}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as handle:
            handle.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "CoefficientCatalog":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != CATALOG_HEADER:
            raise ConfigError(f"missing '{CATALOG_HEADER}' header")
        fields = {}
        idx = 1
        while idx < len(lines) and not lines[idx].startswith("region "):
            key, _, rest = lines[idx].partition(" ")
            fields[key] = rest.strip()
            idx += 1
        try:
            n_bits, m_bits = (int(v) for v in fields["input"].split("."))
            p_bits, q_bits = (int(v) for v in fields["output"].split("."))
            header = dict(
                function=fields["function"],
                mode=fields["mode"],
                input_fmt=FixedFormat(n_bits, m_bits),
                output_fmt=FixedFormat(p_bits, q_bits),
                implicit_msb=bool(int(fields["implicit_msb"])),
                lookup_bits=int(fields["lookup_bits"]),
                shift=int(fields["shift"]),
                sq_trunc=int(fields["sq_trunc"]),
                lin_trunc=int(fields["lin_trunc"]),
                window=int(fields["window"]),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"malformed catalog file: {exc}") from exc
        num_regions = 1 << header["lookup_bits"]
        regions = []
        for expect in range(num_regions):
            if idx >= len(lines):
                raise ConfigError(f"missing region {expect}")
            parts = lines[idx].split()
            if (len(parts) != 8 or parts[0] != "region"
                    or int(parts[1]) != expect):
                raise ConfigError(f"malformed region header {lines[idx]!r}")
            count = int(parts[3])
            clamped = bool(int(parts[5]))
            linear = bool(int(parts[7]))
            idx += 1
            groups = []
            for _ in range(count):
                vals = lines[idx].split()
                if len(vals) != 4:
                    raise ConfigError(f"malformed group row {lines[idx]!r}")
                groups.append(tuple(int(v) for v in vals))
                idx += 1
            regions.append(RegionSpace(tuple(groups), clamped, linear))
        if idx != len(lines):
            raise ConfigError("trailing content after last region")
        return cls(regions=tuple(regions), **header)

    @classmethod
    def load(cls, path) -> "CoefficientCatalog":
        with open(path, "r", encoding="ascii") as handle:
            return cls.loads(handle.read())


def _region_space(lower, upper, shift: int, window: int, group_cap: int,
                  backend: str | None) -> RegionSpace:
    tables = chord_tables(lower, upper, backend=backend)
    lin_ok = (tables.count < 2 or linear_sufficient(tables, backend=backend))
    (a0, a1), clamped = a_interval(tables, shift, window, backend=backend)
    pairs_a = []
    pairs_b = []
    if tables.count > 0:
        for a in range(a0, a1 + 1):
            (b0, b1), b_clamped = b_interval(tables, a, shift, window,
                                             backend=backend)
            clamped = clamped or b_clamped
            if b0 > b1:
                continue
            if len(pairs_a) + (b1 - b0 + 1) > group_cap:
                raise GenerationLimitError(
                    f"region exceeds {group_cap} coefficient groups; "
                    f"lower the shift or window, or raise the cap")
            for b in range(b0, b1 + 1):
                pairs_a.append(a)
                pairs_b.append(b)
    else:
        # Single-point region: neither a nor b is constrained.
        clamped = True
        span = a1 - a0 + 1
        if span * span > group_cap:
            raise GenerationLimitError(
                f"region exceeds {group_cap} coefficient groups; "
                f"lower the window or raise the cap")
        for a in range(a0, a1 + 1):
            for b in range(-window, window + 1):
                pairs_a.append(a)
                pairs_b.append(b)

    sq, lin = _operands(len(lower), 0, 0)
    groups = []
    shift_pow = 1 << shift
    for start in range(0, len(pairs_a), _REFINE_BATCH):
        a_chunk = pairs_a[start:start + _REFINE_BATCH]
        b_chunk = pairs_b[start:start + _REFINE_BATCH]
        lo_out, hi_out = kernels.refine_offset_intervals(
            list(lower), list(upper), sq, lin, a_chunk, b_chunk, shift_pow,
            backend=backend)
        for a, b, c_lo, c_hi in zip(a_chunk, b_chunk, lo_out, hi_out):
            if c_lo < c_hi:
                groups.append((a, b, c_lo, c_hi))
    return RegionSpace(tuple(groups), clamped, lin_ok)


def generate_space(table: BoundTable, lookup_bits: int,
                   shift: int | None = None, *,
                   function: str = "custom", mode: str = "table",
                   implicit_msb: bool = False,
                   window: int | None = None,
                   shift_cap: int | None = None,
                   group_cap: int = 1 << 22,
                   backend: str | None = None,
                   threads: int = 1) -> CoefficientCatalog:
    """Enumerate every valid coefficient group of every region.

    With shift=None the smallest globally feasible shift is used; an
    explicit shift may leave regions empty (catalog.feasible is False
    then). The catalog is complete within the reported window: every
    valid (a, b, c) whose unconstrained coefficients fall inside the
    window appears in exactly one group.
    """
    shift_cap, window = _defaults(table.output_fmt, shift_cap, window)
    if not 0 <= lookup_bits <= table.input_fmt.width:
        raise ConfigError(
            f"lookup_bits {lookup_bits} outside [0, {table.input_fmt.width}]")
    if shift is None:
        shift, per_region = min_global_shift(
            table, lookup_bits, shift_cap=shift_cap, window=window,
            backend=backend, threads=threads)
        if shift is None:
            bad = [i for i, k in enumerate(per_region) if k is None]
            if bad:
                raise ConfigError(
                    f"no feasible shift up to {shift_cap} for regions "
                    f"{bad[:8]}{'...' if len(bad) > 8 else ''}; "
                    f"increase lookup_bits or the shift cap")
            raise ConfigError(
                f"regions have no common feasible shift up to {shift_cap} "
                f"within window {window}; raise the shift cap or window")
    elif shift < 0:
        raise ConfigError("shift must be >= 0")

    def work(region):
        lo, up = table.region_bounds(lookup_bits, region)
        return _region_space(lo, up, shift, window, group_cap, backend)

    regions = _map_regions(work, 1 << lookup_bits, threads)
    return CoefficientCatalog(
        function=function, mode=mode,
        input_fmt=table.input_fmt, output_fmt=table.output_fmt,
        implicit_msb=implicit_msb, lookup_bits=lookup_bits, shift=shift,
        sq_trunc=0, lin_trunc=0, window=window, regions=tuple(regions))


def min_feasible_lookup_bits(table: BoundTable, kind: str = "quadratic",
                             shift_cap: int | None = None,
                             window: int | None = None,
                             backend: str | None = None,
                             threads: int = 1) -> int | None:
    """Smallest lookup_bits making every region workable.

    kind "quadratic": some (a, b, c) exists within the shift cap;
    kind "linear": a = 0 suffices in every region (shift-independent).
    Returns None when even lookup_bits = input width fails.
    """
    if kind not in ("quadratic", "linear"):
        raise ConfigError(f"unknown feasibility kind {kind!r}")
    shift_cap, window = _defaults(table.output_fmt, shift_cap, window)
    for lookup_bits in range(table.input_fmt.width + 1):
        if kind == "linear":
            def work(region):
                lo, up = table.region_bounds(lookup_bits, region)
                tables = chord_tables(lo, up, backend=backend)
                return linear_sufficient(tables, backend=backend)

            if all(_map_regions(work, 1 << lookup_bits, threads)):
                return lookup_bits
        else:
            k, _ = min_global_shift(table, lookup_bits, shift_cap=shift_cap,
                                    window=window, backend=backend,
                                    threads=threads)
            if k is not None:
                return lookup_bits
    return None
