"""Small combinational netlist IR with a simulator and a Verilog writer.

Every net carries a declared width, signedness, and an exact integer value
range from interval analysis; the builder picks widths from the ranges, so
"the declared width always holds the value" is a provable property. The
Python simulator executes the same ops bit-accurately and asserts every
intermediate stays in its declared range, which makes it an independent
check of the rendered Verilog's width and packing choices (Verilog context
rules extend operands to the assignment width, and all assignment widths
here cover the exact result range, so expression semantics match).
"""

from __future__ import annotations

from dataclasses import dataclass, field


def signed_width(lo: int, hi: int) -> int:
    """Bits of a two's-complement signal holding every value in [lo, hi]."""
    assert lo <= hi
    width = 1
    while not (-(1 << (width - 1)) <= lo and hi <= (1 << (width - 1)) - 1):
        width += 1
    return width


@dataclass(frozen=True)
class Net:
    name: str
    width: int
    signed: bool
    lo: int
    hi: int


@dataclass
class Netlist:
    name: str
    nets: dict = field(default_factory=dict)
    ops: list = field(default_factory=list)  # (kind, out, srcs, params)
    inputs: list = field(default_factory=list)
    outputs: list = field(default_factory=list)  # (port, src net name)

    # ------------------------------------------------------------- plumbing

    def _add(self, net: Net) -> str:
        if net.name in self.nets:
            raise ValueError(f"duplicate net {net.name}")
        if net.width <= 0:
            raise ValueError(f"net {net.name} needs positive width")
        self.nets[net.name] = net
        return net.name

    def _op(self, kind: str, out: Net, srcs=(), **params) -> str:
        self._add(out)
        self.ops.append((kind, out.name, tuple(srcs), params))
        return out.name

    # ------------------------------------------------------------ builders

    def input(self, name: str, width: int) -> str:
        self._add(Net(name, width, False, 0, (1 << width) - 1))
        self.inputs.append(name)
        return name

    def output(self, port: str, src: str) -> None:
        self.outputs.append((port, src))

    def const(self, name: str, value: int, width: int | None = None) -> str:
        if value < 0:
            raise ValueError("constants are unsigned")
        if width is None:
            width = max(value.bit_length(), 1)
        assert value < (1 << width)
        return self._op("const", Net(name, width, False, value, value),
                        value=value)

    def slice(self, name: str, src: str, hi: int, lo: int) -> str:
        s = self.nets[src]
        assert 0 <= lo <= hi < s.width
        width = hi - lo + 1
        return self._op("slice", Net(name, width, False, 0, (1 << width) - 1),
                        [src], hi=hi, lo=lo)

    def concat(self, name: str, parts) -> str:
        """parts MSB-first; result unsigned."""
        nets = [self.nets[p] for p in parts]
        assert nets and all(not n.signed for n in nets)
        width = sum(n.width for n in nets)
        # The range is exact when every part below the MSB part spans its
        # full width; otherwise fall back to the full unsigned span.
        if all(n.lo == 0 and n.hi == (1 << n.width) - 1 for n in nets[1:]):
            lo, hi = nets[0].lo, nets[0].hi
            for n in nets[1:]:
                lo <<= n.width
                hi = (hi << n.width) | ((1 << n.width) - 1)
        else:
            lo, hi = 0, (1 << width) - 1
        return self._op("concat", Net(name, width, False, lo, hi), list(parts))

    def zext(self, name: str, src: str, width: int) -> str:
        s = self.nets[src]
        assert not s.signed and width >= s.width
        return self._op("zext", Net(name, width, False, s.lo, s.hi), [src])

    def to_signed(self, name: str, src: str) -> str:
        """Reinterpret an unsigned net's bits as two's complement."""
        s = self.nets[src]
        assert not s.signed
        half = 1 << (s.width - 1)
        full = 1 << s.width
        if s.hi < half:
            lo, hi = s.lo, s.hi  # sign bit never set
        elif s.lo >= half:
            lo, hi = s.lo - full, s.hi - full
        else:
            lo, hi = -half, half - 1
        return self._op("tosigned", Net(name, s.width, True, lo, hi), [src])

    def _arith(self, kind: str, name: str, a: str, b: str, fn) -> str:
        na, nb = self.nets[a], self.nets[b]
        assert na.signed and nb.signed, "arithmetic nets must be signed"
        corners = [fn(x, y) for x in (na.lo, na.hi) for y in (nb.lo, nb.hi)]
        lo, hi = min(corners), max(corners)
        return self._op(kind, Net(name, signed_width(lo, hi), True, lo, hi),
                        [a, b])

    def mul(self, name: str, a: str, b: str) -> str:
        return self._arith("mul", name, a, b, lambda x, y: x * y)

    def add(self, name: str, a: str, b: str) -> str:
        return self._arith("add", name, a, b, lambda x, y: x + y)

    def sub(self, name: str, a: str, b: str) -> str:
        return self._arith("sub", name, a, b, lambda x, y: x - y)

    def sshr(self, name: str, src: str, amount: int) -> str:
        s = self.nets[src]
        assert s.signed and amount >= 0
        lo, hi = s.lo >> amount, s.hi >> amount
        return self._op("sshr", Net(name, signed_width(lo, hi), True, lo, hi),
                        [src], amount=amount)

    def sshl(self, name: str, src: str, amount: int) -> str:
        s = self.nets[src]
        assert s.signed and amount >= 0
        lo, hi = s.lo << amount, s.hi << amount
        return self._op("sshl", Net(name, signed_width(lo, hi), True, lo, hi),
                        [src], amount=amount)

    def narrow(self, name: str, src: str, width: int) -> str:
        """Keep the low `width` bits as unsigned.

        Contract node: the source value must lie in [0, 2^width) whenever
        the surrounding design's validity argument holds; the simulator
        asserts it.
        """
        s = self.nets[src]
        assert width <= s.width
        return self._op("narrow", Net(name, width, False, 0, (1 << width) - 1),
                        [src])

    def rom(self, name: str, addr: str, words, width: int) -> str:
        a = self.nets[addr]
        assert not a.signed and len(words) == (1 << a.width)
        assert all(0 <= w < (1 << width) for w in words)
        return self._op("rom", Net(name, width, False, min(words), max(words)),
                        [addr], words=tuple(words))

    def lt(self, name: str, a: str, b: str) -> str:
        na, nb = self.nets[a], self.nets[b]
        assert na.signed == nb.signed
        return self._op("lt", Net(name, 1, False, 0, 1), [a, b])

    def mux(self, name: str, sel: str, if_true: str, if_false: str) -> str:
        nt, nf = self.nets[if_true], self.nets[if_false]
        assert self.nets[sel].width == 1
        assert nt.signed == nf.signed
        # Verilog context rules extend the narrower branch to the wider one
        # ((sign-)extension preserves the value, so ranges stay exact).
        lo, hi = min(nt.lo, nf.lo), max(nt.hi, nf.hi)
        return self._op("mux", Net(name, max(nt.width, nf.width), nt.signed,
                                   lo, hi), [sel, if_true, if_false])

    # ------------------------------------------------------------ simulator

    def simulate(self, values: dict) -> dict:
        """Evaluate all nets from input values; asserts declared ranges."""
        env = {}
        for name in self.inputs:
            net = self.nets[name]
            v = values[name]
            assert 0 <= v < (1 << net.width), f"input {name}={v} out of range"
            env[name] = v

        def raw(name):
            net = self.nets[name]
            return env[name] & ((1 << net.width) - 1)

        for kind, out, srcs, params in self.ops:
            net = self.nets[out]
            if kind == "const":
                v = params["value"]
            elif kind == "slice":
                v = (raw(srcs[0]) >> params["lo"]) & (
                    (1 << (params["hi"] - params["lo"] + 1)) - 1)
            elif kind == "concat":
                v = 0
                for s in srcs:
                    v = (v << self.nets[s].width) | raw(s)
            elif kind == "zext":
                v = env[srcs[0]]
            elif kind == "tosigned":
                v = raw(srcs[0])
                if v >> (net.width - 1):
                    v -= 1 << net.width
            elif kind == "mul":
                v = env[srcs[0]] * env[srcs[1]]
            elif kind == "add":
                v = env[srcs[0]] + env[srcs[1]]
            elif kind == "sub":
                v = env[srcs[0]] - env[srcs[1]]
            elif kind == "sshr":
                v = env[srcs[0]] >> params["amount"]
            elif kind == "sshl":
                v = env[srcs[0]] << params["amount"]
            elif kind == "narrow":
                v = env[srcs[0]]
                assert 0 <= v < (1 << net.width), (
                    f"narrow {out}: value {v} breaks the contract")
            elif kind == "rom":
                v = params["words"][env[srcs[0]]]
            elif kind == "lt":
                v = int(env[srcs[0]] < env[srcs[1]])
            elif kind == "mux":
                v = env[srcs[1]] if env[srcs[0]] else env[srcs[2]]
            else:  # pragma: no cover
                raise AssertionError(f"unknown op {kind}")
            assert net.lo <= v <= net.hi, (
                f"net {out}: value {v} outside [{net.lo}, {net.hi}]")
            env[out] = v
        return env

    def run(self, values: dict) -> dict:
        """Input values -> output port values."""
        env = self.simulate(values)
        return {port: env[src] for port, src in self.outputs}

    # ------------------------------------------------------------- verilog

    def to_verilog(self) -> str:
        lines = [f"module {self.name} ("]
        ports = []
        for name in self.inputs:
            net = self.nets[name]
            ports.append(f"    input  wire [{net.width - 1}:0] {name}")
        for port, src in self.outputs:
            net = self.nets[src]
            ports.append(f"    output wire [{net.width - 1}:0] {port}")
        lines.append(",\n".join(ports))
        lines.append(");")
        lines.append("")

        def decl(net: Net) -> str:
            sign = "signed " if net.signed else ""
            return f"wire {sign}[{net.width - 1}:0] {net.name}"

        for kind, out, srcs, params in self.ops:
            net = self.nets[out]
            if kind == "const":
                lines.append(
                    f"  {decl(net)} = {net.width}'d{params['value']};")
            elif kind == "slice":
                hi, lo = params["hi"], params["lo"]
                idx = f"[{hi}:{lo}]" if hi != lo else f"[{lo}]"
                lines.append(f"  {decl(net)} = {srcs[0]}{idx};")
            elif kind == "concat":
                body = ", ".join(srcs)
                lines.append(f"  {decl(net)} = {{{body}}};")
            elif kind == "zext":
                pad = net.width - self.nets[srcs[0]].width
                if pad:
                    lines.append(
                        f"  {decl(net)} = {{{{{pad}{{1'b0}}}}, {srcs[0]}}};")
                else:
                    lines.append(f"  {decl(net)} = {srcs[0]};")
            elif kind == "tosigned":
                lines.append(f"  {decl(net)} = $signed({srcs[0]});")
            elif kind in ("mul", "add", "sub"):
                sym = {"mul": "*", "add": "+", "sub": "-"}[kind]
                lines.append(
                    f"  {decl(net)} = {srcs[0]} {sym} {srcs[1]};")
            elif kind == "sshr":
                lines.append(
                    f"  {decl(net)} = {srcs[0]} >>> {params['amount']};")
            elif kind == "sshl":
                lines.append(
                    f"  {decl(net)} = {srcs[0]} <<< {params['amount']};")
            elif kind == "narrow":
                lines.append(
                    f"  {decl(net)} = {srcs[0]}[{net.width - 1}:0];")
            elif kind == "rom":
                addr = srcs[0]
                addr_w = self.nets[addr].width
                digits = (net.width + 3) // 4
                lines.append(f"  reg [{net.width - 1}:0] {out};")
                lines.append(f"  always @* begin")
                lines.append(f"    case ({addr})")
                for index, word in enumerate(params["words"]):
                    lines.append(
                        f"      {addr_w}'d{index}: {out} = "
                        f"{net.width}'h{word:0{digits}x};")
                lines.append(f"      default: {out} = {net.width}'d0;")
                lines.append(f"    endcase")
                lines.append(f"  end")
            elif kind == "lt":
                lines.append(f"  {decl(net)} = {srcs[0]} < {srcs[1]};")
            elif kind == "mux":
                lines.append(
                    f"  {decl(net)} = {srcs[0]} ? {srcs[1]} : {srcs[2]};")
            else:  # pragma: no cover
                raise AssertionError(f"unknown op {kind}")
        lines.append("")
        for port, src in self.outputs:
            lines.append(f"  assign {port} = {src};")
        lines.append("endmodule")
        return "\n".join(lines) + "\n"
