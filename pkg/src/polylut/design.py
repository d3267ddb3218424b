"""Quantized piecewise-polynomial designs and their file format.

A design fixes, for every lookup region, one integer coefficient triple
(a, b, c) plus the global parameters: output shift k, square-operand
truncation i, linear-operand truncation j. Evaluation is exact integer
arithmetic:

    out(Z) = floor((a*xt^2 + b*xj + c) / 2^k)

where Z splits into region r (top bits) and offset x (low bits), xt is x
with the low i bits cleared, and xj is x with the low j bits cleared.
"""

from __future__ import annotations

from dataclasses import dataclass

from .formats import (
    FAITHFUL,
    ONE_ULP,
    TABLE,
    ConfigError,
    FixedFormat,
    split_input,
)

_MODES = (ONE_ULP, FAITHFUL, TABLE)

DESIGN_HEADER = "polylut design v1"


@dataclass(frozen=True)
class PolynomialDesign:
    function: str
    mode: str
    input_fmt: FixedFormat
    output_fmt: FixedFormat
    implicit_msb: bool
    lookup_bits: int
    shift: int
    sq_trunc: int
    lin_trunc: int
    clamp: bool
    coeffs: tuple  # one (a, b, c) triple per region

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ConfigError(f"unknown rounding mode {self.mode!r}")
        width = self.input_fmt.width
        if not 0 <= self.lookup_bits <= width:
            raise ConfigError(
                f"lookup_bits {self.lookup_bits} outside [0, {width}]")
        if self.shift < 0:
            raise ConfigError("shift must be >= 0")
        offset = self.offset_bits
        if not 0 <= self.sq_trunc <= offset:
            raise ConfigError(f"sq_trunc {self.sq_trunc} outside [0, {offset}]")
        if not 0 <= self.lin_trunc <= offset:
            raise ConfigError(f"lin_trunc {self.lin_trunc} outside [0, {offset}]")
        coeffs = tuple((int(a), int(b), int(c)) for a, b, c in self.coeffs)
        object.__setattr__(self, "coeffs", coeffs)
        if len(coeffs) != self.num_regions:
            raise ConfigError(
                f"expected {self.num_regions} coefficient triples, "
                f"got {len(coeffs)}")

    @property
    def num_regions(self) -> int:
        return 1 << self.lookup_bits

    @property
    def offset_bits(self) -> int:
        return self.input_fmt.width - self.lookup_bits

    def truncated_operands(self, x: int) -> tuple:
        """(xt, xj): offset with the low i / low j bits cleared."""
        xt = x & ~((1 << self.sq_trunc) - 1)
        xj = x & ~((1 << self.lin_trunc) - 1)
        return xt, xj

    def evaluate(self, z: int) -> int:
        """Exact integer output for raw input Z (floor division by 2^k)."""
        region, x = split_input(z, self.lookup_bits, self.input_fmt.width)
        a, b, c = self.coeffs[region]
        xt, xj = self.truncated_operands(x)
        out = (a * xt * xt + b * xj + c) >> self.shift
        if self.clamp:
            top = self.output_fmt.count - 1
            if out < 0:
                out = 0
            elif out > top:
                out = top
        return out

    # ---------------------------------------------------------------- file IO

    def dumps(self) -> str:
        lines = [
            DESIGN_HEADER,
            f"function {self.function}",
            f"mode {self.mode}",
            f"input {self.input_fmt.int_bits}.{self.input_fmt.frac_bits}",
            f"output {self.output_fmt.int_bits}.{self.output_fmt.frac_bits}",
            f"implicit_msb {int(self.implicit_msb)}",
            f"lookup_bits {self.lookup_bits}",
            f"shift {self.shift}",
            f"sq_trunc {self.sq_trunc}",
            f"lin_trunc {self.lin_trunc}",
            f"clamp {int(self.clamp)}",
            f"coeffs {self.num_regions}",
        ]
        for region, (a, b, c) in enumerate(self.coeffs):
            lines.append(f"{region} {a} {b} {c}")
        return "\n".join(lines) + "\n"

    def save(self, path) -> None:
        with open(path, "w", encoding="ascii") as handle:
            handle.write(self.dumps())

    @classmethod
    def loads(cls, text: str) -> "PolynomialDesign":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != DESIGN_HEADER:
            raise ConfigError(f"missing '{DESIGN_HEADER}' header")
        fields = {}
        idx = 1
        while idx < len(lines):
            key, _, rest = lines[idx].partition(" ")
            if key == "coeffs":
                break
            fields[key] = rest.strip()
            idx += 1
        else:
            raise ConfigError("missing 'coeffs' section")
        try:
            count = int(lines[idx].split()[1])
            n_bits, m_bits = (int(v) for v in fields["input"].split("."))
            p_bits, q_bits = (int(v) for v in fields["output"].split("."))
            parsed = dict(
                function=fields["function"],
                mode=fields["mode"],
                input_fmt=FixedFormat(n_bits, m_bits),
                output_fmt=FixedFormat(p_bits, q_bits),
                implicit_msb=bool(int(fields["implicit_msb"])),
                lookup_bits=int(fields["lookup_bits"]),
                shift=int(fields["shift"]),
                sq_trunc=int(fields["sq_trunc"]),
                lin_trunc=int(fields["lin_trunc"]),
                clamp=bool(int(fields.get("clamp", "0"))),
            )
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"malformed design file: {exc}") from exc
        rows = lines[idx + 1:]
        if len(rows) != count:
            raise ConfigError(
                f"expected {count} coefficient rows, found {len(rows)}")
        coeffs = [None] * count
        for row in rows:
            parts = row.split()
            if len(parts) != 4:
                raise ConfigError(f"malformed coefficient row {row!r}")
            region, a, b, c = (int(v) for v in parts)
            if not 0 <= region < count:
                raise ConfigError(f"region index {region} out of range")
            if coeffs[region] is not None:
                raise ConfigError(f"duplicate coefficient row for region {region}")
            coeffs[region] = (a, b, c)
        return cls(coeffs=tuple(coeffs), **parsed)

    @classmethod
    def load(cls, path) -> "PolynomialDesign":
        with open(path, "r", encoding="ascii") as handle:
            return cls.loads(handle.read())
