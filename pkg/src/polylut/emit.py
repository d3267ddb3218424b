"""Hardware emission: LUT image, combinational Verilog, design file, report.

The lookup word packs the three coefficient fields a | b | c from MSB to
LSB, skipping width-zero fields. Fixed-sign fields store unsigned
magnitudes (the datapath adds or subtracts accordingly); mixed-sign fields
store two's complement. Stored values are left-shifted by the per-field
shift chosen by the width pass to reconstruct the coefficient.

The generated module is pure combinational logic: slice the region index,
fetch the word from a case-statement ROM, rebuild the coefficients,
evaluate a*xt^2 + b*xj + c, arithmetic-shift right by k, and emit the
output bits. Output MSBs that are constant across all inputs are dropped
from the datapath and reattached as constants. A Python simulation of the
same netlist (see netlist.Netlist.simulate) double-checks widths and
packing against the exact evaluator.
"""

from __future__ import annotations

import os
import random
from dataclasses import dataclass

from .design import PolynomialDesign
from .explore import MIXED, NONPOS, SelectedDesign
from .formats import BoundTable
from .netlist import Netlist
from .verify import CheckReport, check_design

LUT_HEADER = "polylut lut v1"

_EXHAUSTIVE_NETLIST_LIMIT = 1 << 16
_EXHAUSTIVE_PREFIX_LIMIT = 1 << 20
_NETLIST_SAMPLES = 1 << 12


@dataclass(frozen=True)
class FieldLayout:
    name: str
    width: int
    lo: int  # LSB position inside the word

    @property
    def hi(self) -> int:
        return self.lo + self.width - 1


def word_layout(encodings):
    """(fields, word_width) for a | b | c packing, MSB to LSB."""
    widths = [enc.width for enc in encodings]
    total = sum(widths)
    fields = []
    pos = total
    for enc in encodings:
        pos -= enc.width
        if enc.width:
            fields.append(FieldLayout(enc.name, enc.width, pos))
    return tuple(fields), total


def pack_word(triple, encodings) -> int:
    word = 0
    for enc, value in zip(encodings, triple):
        word = (word << enc.width) | enc.encode(value)
    return word


def unpack_word(word: int, encodings):
    values = []
    pos = sum(enc.width for enc in encodings)
    for enc in encodings:
        pos -= enc.width
        raw = (word >> pos) & ((1 << enc.width) - 1)
        values.append(enc.decode(raw))
    return tuple(values)


def pack_lut(design: PolynomialDesign, encodings):
    return [pack_word(triple, encodings) for triple in design.coeffs]


def constant_prefix(pairs, width: int):
    """(drop, prefix): shared constant top bits of every [lo, hi] pair.

    Any value between lo and hi shares their common binary prefix, so this
    is sound for bounds as well as for exact outputs (lo == hi).
    """
    depth = None
    base = None
    for lo, hi in pairs:
        d = width - (lo ^ hi).bit_length()
        if depth is None:
            depth, base = d, lo
        else:
            if d < depth:
                depth = d
            diff = (base ^ lo) >> (width - depth) if depth else 0
            if diff:
                depth -= diff.bit_length()
        if depth <= 0:
            return 0, 0
    if depth is None:
        return 0, 0
    return depth, base >> (width - depth)


def output_prefix(design: PolynomialDesign, table: BoundTable | None = None):
    """Constant top output bits: exact when exhaustive evaluation is cheap,
    else derived from the bound table (sound), else none."""
    count = design.input_fmt.count
    width = design.output_fmt.width
    if count <= _EXHAUSTIVE_PREFIX_LIMIT:
        pairs = []
        top = 1 << width
        for z in range(count):
            out = design.evaluate(z)
            if not 0 <= out < top:
                return 0, 0  # out-of-range design: no constant bits
            pairs.append((out, out))
        return constant_prefix(pairs, width)
    if table is not None:
        return constant_prefix(zip(table.lower, table.upper), width)
    return 0, 0


def build_netlist(design: PolynomialDesign, encodings,
                  module_name: str | None = None,
                  table: BoundTable | None = None) -> Netlist:
    enc_a, enc_b, enc_c = encodings
    in_w = design.input_fmt.width
    out_w = design.output_fmt.width
    lookup = design.lookup_bits
    offset_w = in_w - lookup
    name = module_name or f"polylut_{design.function}"
    nl = Netlist(name)
    z = nl.input("z", in_w)

    fields, word_w = word_layout(encodings)
    word = None
    if word_w > 0 and lookup > 0:
        region = nl.slice("region", z, in_w - 1, offset_w)
        word = nl.rom("word", region, pack_lut(design, encodings), word_w)
    x = nl.slice("x", z, offset_w - 1, 0) if offset_w > 0 else None

    def coeff_value(enc, index):
        if enc.width == 0:
            return None  # the stored value is always zero
        if word is not None:
            layout = next(f for f in fields if f.name == enc.name)
            raw = nl.slice(f"{enc.name}_raw", word, layout.hi, layout.lo)
        else:
            raw = nl.const(f"{enc.name}_raw",
                           enc.encode(design.coeffs[0][index]), enc.width)
        if enc.sign_class == MIXED:
            signed = nl.to_signed(f"{enc.name}_signed", raw)
        else:
            ext = nl.zext(f"{enc.name}_ext", raw, enc.width + 1)
            signed = nl.to_signed(f"{enc.name}_signed", ext)
        if enc.shift:
            return nl.sshl(f"{enc.name}_val", signed, enc.shift)
        return signed

    def masked_operand(label, trunc):
        if x is None or trunc >= offset_w:
            return None  # structurally zero
        if trunc == 0:
            return x
        kept = nl.slice(f"{label}_keep", x, offset_w - 1, trunc)
        pad = nl.const(f"{label}_pad", 0, trunc)
        return nl.concat(label, [kept, pad])

    def signed_operand(label, src):
        ext = nl.zext(f"{label}_ext", src, nl.nets[src].width + 1)
        return nl.to_signed(f"{label}_signed", ext)

    terms = []  # (net, subtract?)
    c_val = coeff_value(enc_c, 2)
    if c_val is not None:
        terms.append((c_val, enc_c.sign_class == NONPOS))
    a_val = coeff_value(enc_a, 0)
    xt = masked_operand("xt", design.sq_trunc)
    if a_val is not None and xt is not None:
        xt_s = signed_operand("xt", xt)
        square = nl.mul("xt_sq", xt_s, xt_s)
        terms.append((nl.mul("a_term", a_val, square),
                      enc_a.sign_class == NONPOS))
    b_val = coeff_value(enc_b, 1)
    xj = masked_operand("xj", design.lin_trunc)
    if b_val is not None and xj is not None:
        xj_s = signed_operand("xj", xj)
        terms.append((nl.mul("b_term", b_val, xj_s),
                      enc_b.sign_class == NONPOS))

    zero = nl.to_signed("zero", nl.const("zero_u", 0, 1))
    acc = None
    for step, (val, subtract) in enumerate(terms):
        if acc is None:
            acc = nl.sub(f"acc{step}", zero, val) if subtract else val
        elif subtract:
            acc = nl.sub(f"acc{step}", acc, val)
        else:
            acc = nl.add(f"acc{step}", acc, val)
    if acc is None:
        acc = zero
    shifted = nl.sshr("shifted", acc, design.shift) if design.shift else acc

    if design.clamp:
        top = design.output_fmt.count - 1
        top_s = nl.to_signed("top_s", nl.const("top_u", top, out_w + 1))
        is_neg = nl.lt("is_neg", shifted, zero)
        is_ovf = nl.lt("is_ovf", top_s, shifted)
        low_clip = nl.mux("low_clip", is_neg, zero, shifted)
        shifted = nl.mux("clipped", is_ovf, top_s, low_clip)

    drop, prefix = output_prefix(design, table)
    core_w = out_w - drop
    if core_w <= 0:
        out = nl.const("out_bits", prefix, out_w)
    else:
        full = nl.narrow("out_full", shifted, out_w)
        if drop:
            core = nl.slice("out_core", full, core_w - 1, 0)
            pre = nl.const("out_prefix", prefix, drop)
            out = nl.concat("out_bits", [pre, core])
        else:
            out = full
    nl.output("out", out)
    return nl


def netlist_selfcheck(design: PolynomialDesign, nl: Netlist,
                      seed: int = 0) -> int:
    """Compare netlist simulation against the exact evaluator.

    Exhaustive for small inputs, sampled otherwise. Returns the number of
    inputs checked; raises AssertionError on any mismatch.
    """
    count = design.input_fmt.count
    if count <= _EXHAUSTIVE_NETLIST_LIMIT:
        inputs = range(count)
    else:
        rng = random.Random(seed)
        inputs = [rng.randrange(count) for _ in range(_NETLIST_SAMPLES)]
    checked = 0
    for z in inputs:
        want = design.evaluate(z)
        got = nl.run({"z": z})["out"]
        assert got == want, f"netlist mismatch at Z={z}: {got} != {want}"
        checked += 1
    return checked


def lut_image_text(design: PolynomialDesign, encodings) -> str:
    fields, word_w = word_layout(encodings)
    fmt = design.input_fmt
    out = design.output_fmt
    lines = [
        f"// {LUT_HEADER}",
        f"// function {design.function} mode {design.mode} "
        f"input {fmt.int_bits}.{fmt.frac_bits} "
        f"output {out.int_bits}.{out.frac_bits}",
        f"// lookup_bits {design.lookup_bits} shift {design.shift} "
        f"sq_trunc {design.sq_trunc} lin_trunc {design.lin_trunc}",
    ]
    if word_w:
        parts = []
        for enc in encodings:
            if enc.width == 0:
                parts.append(f"{enc.name}: absent (always 0)")
            else:
                layout = next(f for f in fields if f.name == enc.name)
                parts.append(
                    f"{enc.name}[{layout.hi}:{layout.lo}] {enc.sign_class} "
                    f"shl {enc.shift}")
        lines.append("// fields " + " | ".join(parts))
        digits = (word_w + 3) // 4
        for word in pack_lut(design, encodings):
            lines.append(f"{word:0{digits}x}")
    else:
        lines.append("// all coefficient fields are empty (word width 0)")
    return "\n".join(lines) + "\n"


def report_text(selected: SelectedDesign, check: CheckReport | None,
                drop: int, prefix: int, netlist_checked: int | None) -> str:
    design = selected.design
    cat = selected.catalog
    fmt = design.input_fmt
    out = design.output_fmt
    widths = ",".join(str(w) for w in selected.field_widths)
    space_digits = len(str(cat.design_count))
    lines = [
        "polylut design report",
        f"function   {design.function}",
        f"mode       {design.mode}",
        f"input      {fmt.int_bits}.{fmt.frac_bits} ({fmt.width} bits)",
        f"output     {out.int_bits}.{out.frac_bits} ({out.width} bits)",
        f"lookup     {design.lookup_bits} bits -> {design.num_regions} regions",
        f"shift      {design.shift}",
        f"sq_trunc   {design.sq_trunc}",
        f"lin_trunc  {design.lin_trunc}",
        f"clamp      {int(design.clamp)}",
    ]
    for enc in selected.encodings:
        lines.append(
            f"coeff {enc.name}    {enc.sign_class} width {enc.width} "
            f"shl {enc.shift}")
    lines.append(
        f"LUT [{widths}] = {selected.word_width} bits/word x "
        f"{design.num_regions} words = {selected.lut_bits} bits")
    lines.append(
        f"surviving space ~10^{space_digits - 1} designs "
        f"(after truncation/width passes)")
    if drop:
        lines.append(
            f"output msbs dropped {drop} (constant "
            f"{prefix:0{drop}b})")
    else:
        lines.append("output msbs dropped 0")
    if check is not None:
        lines.append(
            f"bound check {check.mode} "
            f"{'PASS' if check.passed else 'FAIL'} "
            f"({check.checked} inputs, worst slack {check.worst_slack})")
    if netlist_checked is not None:
        lines.append(f"netlist sim matches evaluator on "
                     f"{netlist_checked} inputs")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class EmitResult:
    design_path: str
    lut_path: str
    verilog_path: str
    report_path: str
    check: CheckReport | None
    netlist: Netlist
    dropped_msbs: int


def emit_design(selected: SelectedDesign, table: BoundTable | None,
                outdir: str, base: str | None = None,
                check_mode: str = "auto") -> EmitResult:
    """Write <base>.design/.memh/.v/.report.txt into outdir."""
    design = selected.design
    os.makedirs(outdir, exist_ok=True)
    base = base or design.function
    paths = {ext: os.path.join(outdir, f"{base}.{ext}")
             for ext in ("design", "memh", "v", "report.txt")}

    check = None
    if table is not None:
        check = check_design(design, table, mode=check_mode)

    nl = build_netlist(design, selected.encodings, table=table)
    netlist_checked = None
    if check is None or check.passed or design.clamp:
        netlist_checked = netlist_selfcheck(design, nl)

    drop, prefix = output_prefix(design, table)
    design.save(paths["design"])
    with open(paths["memh"], "w", encoding="ascii") as handle:
        handle.write(lut_image_text(design, selected.encodings))
    with open(paths["v"], "w", encoding="ascii") as handle:
        handle.write(nl.to_verilog())
    with open(paths["report.txt"], "w", encoding="ascii") as handle:
        handle.write(report_text(selected, check, drop, prefix,
                                 netlist_checked))
    return EmitResult(
        design_path=paths["design"], lut_path=paths["memh"],
        verilog_path=paths["v"], report_path=paths["report.txt"],
        check=check, netlist=nl, dropped_msbs=drop)
