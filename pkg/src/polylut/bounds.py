"""Certified bound-table construction for the built-in functions.

Every table entry derives from floor(F * 2**q) where F is the exact function
value. The floor is never guessed from doubles: reciprocal is evaluated as an
exact integer quotient, and log2/exp2 go through interval arithmetic whose
working precision escalates until the floor is pinned down. Escalation
terminates because scaled log2/exp2 values are provably irrational except at
offset 0, which is handled exactly beforehand.
"""

from __future__ import annotations

from mpmath import iv, mpf

from .formats import FAITHFUL, ONE_ULP, BoundTable, ProblemSpec

_START_PREC = 64
_MAX_PREC = 1 << 20


class SpecificationError(ValueError):
    """The requested function cannot meet the output format, even clamped."""


def _mpf_floor_exact(x) -> int:
    """Exact floor of an mpf endpoint via its (sign, man, exp, bc) tuple."""
    sign, man, exp, _ = mpf(x)._mpf_
    man = int(man)
    if man == 0:
        assert exp == 0, "non-finite interval endpoint"
        return 0
    val = man << exp if exp >= 0 else None
    if val is not None:
        return -val if sign else val
    shift = -exp
    if sign == 0:
        return man >> shift
    return -((man + (1 << shift) - 1) >> shift)


def _certified_floor(build_interval) -> int:
    """floor of an irrational target, escalating precision Ziv-style."""
    prec = _START_PREC
    while prec <= _MAX_PREC:
        old = iv.prec
        try:
            iv.prec = prec
            g = build_interval()
            lo = _mpf_floor_exact(g.a)
            hi = _mpf_floor_exact(g.b)
        finally:
            iv.prec = old
        if lo == hi:
            return lo
        prec *= 2
    raise SpecificationError("interval refinement did not converge; "
                             "is the target value exactly an integer?")


def scaled_floor(function: str, x: int, frac_bits: int, out_frac_bits: int) -> tuple[int, bool]:
    """(floor(F * 2**q), exact) for a built-in at input offset x.

    F is the conventional function value: 1/(1+x*2**-m), log2(1+x*2**-m) or
    2**(x*2**-m). ``exact`` reports that F * 2**q is exactly the integer.
    """
    m, q = frac_bits, out_frac_bits
    if function == "recip":
        num = 1 << (m + q)
        den = (1 << m) + x
        return num // den, num % den == 0
    if function == "log2":
        if x == 0:
            return 0, True
        # log2((2^m+x)/2^m) * 2^q is irrational: 2^m+x is not a power of two.
        def build():
            v = iv.mpf((1 << m) + x) / iv.mpf(1 << m)
            return (iv.log(v) / iv.log(2)) * iv.mpf(1 << q)
        return _certified_floor(build), False
    if function == "exp2":
        if x == 0:
            return 1 << q, True
        # 2^(q + x/2^m) is irrational for 0 < x < 2^m.
        def build():
            theta = iv.mpf(x) / iv.mpf(1 << m)
            return iv.exp(theta * iv.log(2)) * iv.mpf(1 << q)
        return _certified_floor(build), False
    raise ValueError(f"not a built-in function: {function!r}")


def _entry(floor_g: int, exact: bool, mode: str, cap: int) -> tuple[int, int]:
    """One (lower, upper) record from a certified floor(G), G = F * 2**q."""
    if exact:
        lo_raw, hi_raw = (floor_g, floor_g) if mode == FAITHFUL \
            else (floor_g - 1, floor_g + 1)
    else:
        # ceil(G-1) = floor(G), floor(G+1) = floor(G)+1, ceil(G) = floor(G)+1
        lo_raw = floor_g
        hi_raw = floor_g + 1
    lo = max(0, lo_raw)
    hi = min(cap - 1, hi_raw)
    if lo > hi:
        raise SpecificationError(
            f"scaled value {floor_g} unreachable in [0, {cap}) even clamped")
    return lo, hi


def make_bound_table(spec: ProblemSpec) -> BoundTable:
    """Certified bound table for a built-in spec (one-ulp or faithful)."""
    if spec.function == "custom":
        raise ValueError("custom functions load their table from a file")
    if spec.mode not in (ONE_ULP, FAITHFUL):
        raise ValueError(f"mode {spec.mode!r} has no generator")
    m = spec.input_fmt.frac_bits
    q = spec.output_fmt.frac_bits
    cap = spec.output_fmt.count
    lower = []
    upper = []
    for x in range(spec.input_fmt.count):
        floor_g, exact = scaled_floor(spec.function, x, m, q)
        lo, hi = _entry(floor_g, exact, spec.mode, cap)
        lower.append(lo)
        upper.append(hi)
    return BoundTable(spec.input_fmt, spec.output_fmt, lower, upper)


def load_or_make_table(spec: ProblemSpec, table_path: str | None = None) -> BoundTable:
    """Resolve a spec to its bound table (generator or file)."""
    if table_path is not None:
        table = BoundTable.load(table_path)
        if table.input_fmt != spec.input_fmt or table.output_fmt != spec.output_fmt:
            raise SpecificationError(
                f"table formats {table.input_fmt}->{table.output_fmt} do not "
                f"match spec {spec.input_fmt}->{spec.output_fmt}")
        return table
    return make_bound_table(spec)
