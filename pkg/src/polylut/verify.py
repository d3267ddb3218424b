"""Bit-exact verification and brute-force oracles.

Everything here favours obviousness over speed: direct double loops,
Fraction arithmetic, and per-input evaluation. The fast paths elsewhere in
the package are tested against these.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .design import PolynomialDesign
from .formats import BoundTable

_HIST_TOP = 8  # slacks >= this all land in the final histogram bucket

_ORACLE_MAX_POINTS = 1 << 8
_ORACLE_MAX_WINDOW = 1 << 7


def evaluate(design: PolynomialDesign, z: int) -> int:
    """Exact integer output of the design for raw input Z."""
    return design.evaluate(z)


@dataclass
class CheckReport:
    passed: bool
    mode: str
    checked: int
    failures: int
    first_counterexample: tuple | None  # (z, out, lower, upper)
    worst_slack: int | None  # min(out - lower, upper - out) over checked inputs
    slack_hist: dict = field(default_factory=dict)

    def as_text(self) -> str:
        lines = [
            f"result     {'PASS' if self.passed else 'FAIL'}",
            f"mode       {self.mode}",
            f"checked    {self.checked}",
            f"failures   {self.failures}",
        ]
        if self.worst_slack is not None:
            lines.append(f"worst slack {self.worst_slack}")
        if self.first_counterexample is not None:
            z, out, lo, hi = self.first_counterexample
            lines.append(
                f"first counterexample Z={z} out={out} bounds=[{lo},{hi}]")
        if self.slack_hist:
            parts = []
            for key in sorted(self.slack_hist, key=_hist_order):
                parts.append(f"{key}:{self.slack_hist[key]}")
            lines.append("slack hist " + " ".join(parts))
        return "\n".join(lines) + "\n"

    def as_json(self) -> str:
        payload = {
            "passed": self.passed,
            "mode": self.mode,
            "checked": self.checked,
            "failures": self.failures,
            "first_counterexample": (
                None if self.first_counterexample is None
                else list(self.first_counterexample)),
            "worst_slack": self.worst_slack,
            "slack_hist": self.slack_hist,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _hist_order(key: str) -> int:
    return _HIST_TOP if key.endswith("+") else int(key)


def check_design(design: PolynomialDesign, table: BoundTable,
                 mode: str = "auto", samples: int = 1 << 16,
                 seed: int = 0) -> CheckReport:
    """Compare design outputs against the bound table.

    mode "exhaustive" walks every input; "sampled" draws `samples` inputs
    (without replacement semantics not needed; duplicates are harmless);
    "auto" picks exhaustive up to 2^20 inputs.
    """
    if design.input_fmt != table.input_fmt:
        raise ValueError("design and bound table input formats differ")
    if design.output_fmt != table.output_fmt:
        raise ValueError("design and bound table output formats differ")
    count = design.input_fmt.count
    if mode == "auto":
        mode = "exhaustive" if count <= (1 << 20) else "sampled"
    if mode == "exhaustive":
        inputs = range(count)
    elif mode == "sampled":
        rng = random.Random(seed)
        inputs = [rng.randrange(count) for _ in range(min(samples, count))]
    else:
        raise ValueError(f"unknown check mode {mode!r}")

    failures = 0
    checked = 0
    first = None
    worst = None
    hist = {}
    lower = table.lower
    upper = table.upper
    for z in inputs:
        out = design.evaluate(z)
        lo = lower[z]
        hi = upper[z]
        slack = min(out - lo, hi - out)
        checked += 1
        if worst is None or slack < worst:
            worst = slack
        if slack < 0:
            failures += 1
            if first is None:
                first = (z, out, lo, hi)
        else:
            key = f"{_HIST_TOP}+" if slack >= _HIST_TOP else str(slack)
            hist[key] = hist.get(key, 0) + 1
    return CheckReport(
        passed=failures == 0,
        mode=mode,
        checked=checked,
        failures=failures,
        first_counterexample=first,
        worst_slack=worst,
        slack_hist=hist,
    )


def naive_chord_search(g_values, h_values, find_max: bool):
    """Reference extremum of (G[y] - H[x])/(y - x) over x < y.

    Plain double loop over Fractions; first strictly-better pair wins, so
    the witness is the lexicographically smallest (x, y) attaining the
    extremum. Returns (Fraction, x, y) or None for fewer than 2 points.
    """
    count = len(g_values)
    if count < 2:
        return None
    best = None
    best_x = best_y = -1
    for x in range(count - 1):
        hx = h_values[x]
        for y in range(x + 1, count):
            d = Fraction(g_values[y] - hx, y - x)
            if best is None or (find_max and d > best) or (not find_max and d < best):
                best = d
                best_x, best_y = x, y
    return best, best_x, best_y


def truncated_operands(x: int, sq_trunc: int, lin_trunc: int) -> tuple:
    xt = x & ~((1 << sq_trunc) - 1)
    xj = x & ~((1 << lin_trunc) - 1)
    return xt, xj


def triple_valid(lower, upper, a: int, b: int, c: int, shift: int,
                 sq_trunc: int = 0, lin_trunc: int = 0) -> bool:
    """Ground truth: does floor((a*xt^2 + b*xj + c)/2^k) stay in bounds?"""
    for x in range(len(lower)):
        xt, xj = truncated_operands(x, sq_trunc, lin_trunc)
        out = (a * xt * xt + b * xj + c) >> shift
        if out < lower[x] or out > upper[x]:
            return False
    return True


def oracle_space(lower, upper, shift: int, window: int,
                 sq_trunc: int = 0, lin_trunc: int = 0) -> dict:
    """Brute-force region design space over a, b in [-window, window].

    Returns {(a, b): (c_lo, c_hi)} for every pair admitting at least one
    valid constant, where valid constants are exactly [c_lo, c_hi). Derived
    directly from the per-input inequalities
        2^k * l[x] <= a*xt^2 + b*xj + c <= 2^k * (u[x] + 1) - 1,
    with no shared code with the generation path.
    """
    n = len(lower)
    if n > _ORACLE_MAX_POINTS:
        raise ValueError(
            f"oracle limited to {_ORACLE_MAX_POINTS} points per region, got {n}")
    if window > _ORACLE_MAX_WINDOW:
        raise ValueError(
            f"oracle limited to window {_ORACLE_MAX_WINDOW}, got {window}")
    shift_pow = 1 << shift
    sq = []
    lin = []
    for x in range(n):
        xt, xj = truncated_operands(x, sq_trunc, lin_trunc)
        sq.append(xt * xt)
        lin.append(xj)
    out = {}
    for a in range(-window, window + 1):
        for b in range(-window, window + 1):
            c_lo = None
            c_hi = None
            for x in range(n):
                poly = a * sq[x] + b * lin[x]
                lo = shift_pow * lower[x] - poly
                hi = shift_pow * (upper[x] + 1) - poly
                if c_lo is None or lo > c_lo:
                    c_lo = lo
                if c_hi is None or hi < c_hi:
                    c_hi = hi
            if c_lo < c_hi:
                out[(a, b)] = (c_lo, c_hi)
    return out
