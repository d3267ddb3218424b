"""Fixed-point formats, problem specifications and integer bound tables.

An input is an unsigned integer Z in [0, 2**(n+m)) read as Z * 2**-m in an
n.m format. A bound table assigns every input an integer output range
[lower(Z), upper(Z)] in the p.q output format; any implementation whose
output lands inside the range at every input meets the accuracy target.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

ONE_ULP = "one-ulp"
FAITHFUL = "faithful"
TABLE = "table"

ACCURACY_MODES = (ONE_ULP, FAITHFUL, TABLE)
BUILTIN_FUNCTIONS = ("recip", "log2", "exp2")


class ConfigError(ValueError):
    """Invalid format, spec or file-level configuration."""


@dataclass(frozen=True)
class FixedFormat:
    """Unsigned fixed-point format with int_bits.frac_bits layout."""

    int_bits: int
    frac_bits: int

    def __post_init__(self):
        if self.int_bits < 0 or self.frac_bits < 0:
            raise ConfigError("format bit counts must be non-negative")
        if self.int_bits + self.frac_bits < 1:
            raise ConfigError("format must have at least one bit")

    @property
    def width(self) -> int:
        return self.int_bits + self.frac_bits

    @property
    def count(self) -> int:
        """Number of representable values, 2**width."""
        return 1 << self.width

    def __str__(self) -> str:
        return f"{self.int_bits}.{self.frac_bits}"


@dataclass(frozen=True)
class ProblemSpec:
    """Target function plus input/output formats and accuracy mode.

    ``implicit_msb`` marks functions whose output range pins the most
    significant output bit to a constant, letting emission drop it.
    """

    function: str
    input_fmt: FixedFormat
    output_fmt: FixedFormat
    mode: str = ONE_ULP
    implicit_msb: bool = False

    def __post_init__(self):
        if self.mode not in ACCURACY_MODES:
            raise ConfigError(f"unknown accuracy mode {self.mode!r}")
        if self.function not in BUILTIN_FUNCTIONS and self.function != "custom":
            raise ConfigError(f"unknown function {self.function!r}")
        if self.function == "custom" and self.mode != TABLE:
            raise ConfigError("custom functions take bounds from a table file")

    @property
    def label(self) -> str:
        return f"{self.function}_{self.input_fmt.width}b"


def builtin_spec(function: str, frac_bits: int, mode: str = ONE_ULP) -> ProblemSpec:
    """Problem spec for a built-in function at the conventional formats.

    recip : x (m bits) -> 1/(1 + x*2**-m) in (0.5, 1],  out 0.(m+1), MSB const
    log2  : x (m bits) -> log2(1 + x*2**-m) in [0, 1),  out 0.(m+1)
    exp2  : x (m bits) -> 2**(x*2**-m) in [1, 2),       out 1.m, int bit const
    """
    if frac_bits < 1:
        raise ConfigError("built-in functions need at least one input bit")
    inp = FixedFormat(0, frac_bits)
    if function == "recip":
        return ProblemSpec("recip", inp, FixedFormat(0, frac_bits + 1), mode, True)
    if function == "log2":
        return ProblemSpec("log2", inp, FixedFormat(0, frac_bits + 1), mode, False)
    if function == "exp2":
        return ProblemSpec("exp2", inp, FixedFormat(1, frac_bits), mode, True)
    raise ConfigError(f"unknown built-in function {function!r}")


def split_input(z: int, lookup_bits: int, width: int) -> tuple[int, int]:
    """Split a width-bit input into (region index, offset).

    The region index is the top ``lookup_bits`` bits, the offset the rest;
    ``concat_input`` reverses the split.
    """
    if not 0 <= lookup_bits <= width:
        raise ConfigError(f"lookup_bits {lookup_bits} outside [0, {width}]")
    if not 0 <= z < (1 << width):
        raise ValueError(f"input {z} outside [0, 2**{width})")
    low = width - lookup_bits
    return z >> low, z & ((1 << low) - 1)


def concat_input(region: int, offset: int, lookup_bits: int, width: int) -> int:
    low = width - lookup_bits
    assert 0 <= region < (1 << lookup_bits) if lookup_bits else region == 0
    assert 0 <= offset < (1 << low) if low else offset == 0
    return (region << low) | offset


@dataclass
class BoundTable:
    """Per-input inclusive output bounds, indexed by the raw input integer."""

    input_fmt: FixedFormat
    output_fmt: FixedFormat
    lower: list[int] = field(repr=False)
    upper: list[int] = field(repr=False)

    def __post_init__(self):
        n = self.input_fmt.count
        if len(self.lower) != n or len(self.upper) != n:
            raise ConfigError("bound arrays must cover the whole input range")
        cap = self.output_fmt.count
        for z, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            if not 0 <= lo <= hi < cap:
                raise ConfigError(
                    f"bounds at input {z} invalid: [{lo}, {hi}] not within "
                    f"0 <= lo <= hi < {cap}")

    def __len__(self) -> int:
        return self.input_fmt.count

    def region_bounds(self, lookup_bits: int, region: int) -> tuple[list[int], list[int]]:
        """Lower/upper arrays over the offset range of one region."""
        width = self.input_fmt.width
        if not 0 <= lookup_bits <= width:
            raise ConfigError(f"lookup_bits {lookup_bits} outside [0, {width}]")
        if not 0 <= region < (1 << lookup_bits):
            raise IndexError(f"region {region} outside [0, 2**{lookup_bits})")
        size = 1 << (width - lookup_bits)
        base = region * size
        return self.lower[base:base + size], self.upper[base:base + size]

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.dumps())

    def dumps(self) -> str:
        out = io.StringIO()
        out.write("polylut bounds v1\n")
        out.write(f"n {self.input_fmt.int_bits}\n")
        out.write(f"m {self.input_fmt.frac_bits}\n")
        out.write(f"p {self.output_fmt.int_bits}\n")
        out.write(f"q {self.output_fmt.frac_bits}\n")
        for z, (lo, hi) in enumerate(zip(self.lower, self.upper)):
            out.write(f"{z} {lo} {hi}\n")
        return out.getvalue()

    @classmethod
    def load(cls, path: str) -> "BoundTable":
        with open(path) as fh:
            return cls.loads(fh.read())

    @classmethod
    def loads(cls, text: str) -> "BoundTable":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0].strip() != "polylut bounds v1":
            raise ConfigError("not a polylut bounds file (bad header)")
        hdr = {}
        idx = 1
        while idx < len(lines) and lines[idx].split()[0] in ("n", "m", "p", "q"):
            key, val = lines[idx].split()
            hdr[key] = int(val)
            idx += 1
        missing = {"n", "m", "p", "q"} - hdr.keys()
        if missing:
            raise ConfigError(f"bounds header missing {sorted(missing)}")
        in_fmt = FixedFormat(hdr["n"], hdr["m"])
        out_fmt = FixedFormat(hdr["p"], hdr["q"])
        lower = [0] * in_fmt.count
        upper = [0] * in_fmt.count
        seen = [False] * in_fmt.count
        for ln in lines[idx:]:
            parts = ln.split()
            if len(parts) != 3:
                raise ConfigError(f"malformed bounds record: {ln!r}")
            z, lo, hi = (int(p) for p in parts)
            if not 0 <= z < in_fmt.count:
                raise ConfigError(f"input {z} outside the {in_fmt} range")
            if seen[z]:
                raise ConfigError(f"duplicate record for input {z}")
            seen[z] = True
            lower[z], upper[z] = lo, hi
        if not all(seen):
            raise ConfigError(f"missing records for {seen.count(False)} inputs")
        return cls(in_fmt, out_fmt, lower, upper)
