"""Backend dispatch for the search kernels.

Two interchangeable implementations exist: a compiled extension
(polylut._kernels, int64 data with 128-bit compares) and a pure-Python
module (polylut._kernels_py, unbounded ints). This module picks between
them per call:

  * the POLYLUT_PURE environment variable (any non-empty value) forces the
    pure backend for the whole process;
  * an explicit backend= argument ("pure" or "compiled") overrides the
    automatic choice, raising if the compiled backend is requested but
    unavailable or unsafe for the given magnitudes;
  * otherwise the compiled backend is used whenever it is importable and
    the conservative magnitude guards below prove that every intermediate
    fits the extension's integer widths.

Guard reasoning, with L(v) = bit_length(|v|):
  chord_tables      stores lower[y]-upper[x]-1 and upper[y]+1-lower[x]
                    (< 2 bits over the raw bounds); compares multiply a
                    stored value by a gap < N, so int64 storage suffices
                    when the stored values stay under 62 bits.
  extremal_search   stores D numerators (< Ln+Ld+1 bits) and denominators
                    (< 2*Ld+LK bits); all compares are products of one
                    numerator and one denominator, kept in 128 bits, so
                    both stored sizes must stay under 62 bits.
  linear_bound_scan stores shift_pow*num - a*t*den; bounded by
                    max(Ls+Ln, La+LK+Ld) + 1 bits.
  offset scans      store shift_pow*(u+1) - a*sq - b*lin; bounded by the
                    largest term plus 2 bits for the three-way sum.
All bounds carry one extra bit of margin below.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py as _pure

try:
    from . import _kernels as _compiled
except ImportError:  # extension not built; pure Python handles everything
    _compiled = None

_INT64_SAFE_BITS = 61  # one bit of margin under the 62 usable magnitude bits

FORCE_PURE_ENV = "POLYLUT_PURE"


def compiled_available() -> bool:
    return _compiled is not None


def active_backend_name() -> str:
    """Name of the backend auto-dispatch prefers (guards permitting)."""
    if _compiled is None or os.environ.get(FORCE_PURE_ENV):
        return "pure"
    return "compiled"


def _bits(values) -> int:
    top = 0
    for v in values:
        b = (-v if v < 0 else v).bit_length()
        if b > top:
            top = b
    return top


def _arr(values):
    return np.asarray(values, dtype=np.int64)


def _resolve(backend: str | None, safe: bool):
    """Return True to run compiled, False for pure."""
    if backend == "pure":
        return False
    if backend == "compiled":
        if _compiled is None:
            raise RuntimeError("compiled kernel backend is not available")
        if not safe:
            raise ValueError(
                "input magnitudes exceed the compiled backend's guards")
        return True
    if backend is not None:
        raise ValueError(f"unknown backend {backend!r}")
    if _compiled is None or os.environ.get(FORCE_PURE_ENV):
        return False
    return safe


def chord_tables(lower, upper, backend: str | None = None):
    safe = _bits(lower) + 2 <= _INT64_SAFE_BITS and _bits(upper) + 2 <= _INT64_SAFE_BITS
    if _resolve(backend, safe):
        out = _compiled.chord_tables(_arr(lower), _arr(upper))
        return tuple(a.tolist() if not isinstance(a, list) else a for a in out)
    return _pure.chord_tables(lower, upper)


def extremal_search(g_num, g_den, h_num, h_den, find_max, use_skip,
                    backend: str | None = None):
    ln = max(_bits(g_num), _bits(h_num))
    ld = max(_bits(g_den), _bits(h_den))
    lk = max(len(g_num), 1).bit_length()
    safe = (ln + ld + 1 <= _INT64_SAFE_BITS
            and 2 * ld + lk <= _INT64_SAFE_BITS)
    if _resolve(backend, safe):
        return _compiled.extremal_search(
            _arr(g_num), _arr(g_den), _arr(h_num), _arr(h_den),
            bool(find_max), bool(use_skip))
    return _pure.extremal_search(g_num, g_den, h_num, h_den, find_max, use_skip)


def linear_bound_scan(floor_num, floor_den, ceil_num, ceil_den, a, shift_pow,
                      backend: str | None = None):
    ln = max(_bits(floor_num), _bits(ceil_num))
    ld = max(_bits(floor_den), _bits(ceil_den))
    lk = max(len(floor_num) + 1, 1).bit_length()
    ls = shift_pow.bit_length()
    la = _bits((a,))
    safe = max(ls + ln, la + lk + ld) + 2 <= _INT64_SAFE_BITS
    if _resolve(backend, safe):
        return _compiled.linear_bound_scan(
            _arr(floor_num), _arr(floor_den), _arr(ceil_num), _arr(ceil_den),
            int(a), int(shift_pow))
    return _pure.linear_bound_scan(
        floor_num, floor_den, ceil_num, ceil_den, a, shift_pow)


def _offset_safe(lower, upper, sq_operand, lin_operand, a_bits, b_bits, shift_pow):
    lb = max(_bits(lower), _bits(upper)) + 1
    ls = shift_pow.bit_length()
    term = max(ls + lb,
               a_bits + _bits(sq_operand),
               b_bits + _bits(lin_operand))
    return term + 2 <= _INT64_SAFE_BITS


def offset_interval_scan(lower, upper, sq_operand, lin_operand, a, b, shift_pow,
                         backend: str | None = None):
    safe = _offset_safe(lower, upper, sq_operand, lin_operand,
                        _bits((a,)), _bits((b,)), shift_pow)
    if _resolve(backend, safe):
        lo, hi = _compiled.offset_interval_scan(
            _arr(lower), _arr(upper), _arr(sq_operand), _arr(lin_operand),
            int(a), int(b), int(shift_pow))
        return (None if lo is None else int(lo),
                None if hi is None else int(hi))
    return _pure.offset_interval_scan(
        lower, upper, sq_operand, lin_operand, a, b, shift_pow)


def refine_offset_intervals(lower, upper, sq_operand, lin_operand,
                            a_vals, b_vals, shift_pow,
                            backend: str | None = None):
    safe = _offset_safe(lower, upper, sq_operand, lin_operand,
                        _bits(a_vals), _bits(b_vals), shift_pow)
    if _resolve(backend, safe):
        lo, hi = _compiled.refine_offset_intervals(
            _arr(lower), _arr(upper), _arr(sq_operand), _arr(lin_operand),
            _arr(a_vals), _arr(b_vals), int(shift_pow))
        return lo.tolist(), hi.tolist()
    return _pure.refine_offset_intervals(
        lower, upper, sq_operand, lin_operand, a_vals, b_vals, shift_pow)
