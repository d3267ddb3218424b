"""Pure-Python kernels: exact big-integer reference implementation.

Same contracts as the compiled extension in _kernels.pyx; the dispatcher in
kernels.py picks between them. All rationals are (numerator, denominator)
pairs with denominator > 0, compared by cross-multiplication; no floats.
"""

from __future__ import annotations


def chord_tables(lower, upper):
    """Extremal secant slopes between bound corners, grouped by index sum.

    For every t in [1, 2N-3] (returned at list index t-1):
      floor chord: max over x<y, x+y=t of (lower[y] - upper[x] - 1)/(y - x)
      ceil  chord: min over x<y, x+y=t of (upper[y] + 1 - lower[x])/(y - x)
    Returns (floor_num, floor_den, ceil_num, ceil_den); empty lists when N < 2.
    """
    n = len(lower)
    if n < 2:
        return [], [], [], []
    count = 2 * n - 3
    floor_num = [0] * count
    floor_den = [0] * count
    ceil_num = [0] * count
    ceil_den = [0] * count
    for x in range(n - 1):
        ux1 = upper[x] + 1
        lx = lower[x]
        for y in range(x + 1, n):
            idx = x + y - 1
            dy = y - x
            fn = lower[y] - ux1
            cn = upper[y] + 1 - lx
            fd = floor_den[idx]
            if fd == 0:
                floor_num[idx] = fn
                floor_den[idx] = dy
                ceil_num[idx] = cn
                ceil_den[idx] = dy
            else:
                if fn * fd > floor_num[idx] * dy:
                    floor_num[idx] = fn
                    floor_den[idx] = dy
                if cn * ceil_den[idx] < ceil_num[idx] * dy:
                    ceil_num[idx] = cn
                    ceil_den[idx] = dy
    return floor_num, floor_den, ceil_num, ceil_den


def extremal_search(g_num, g_den, h_num, h_den, find_max, use_skip):
    """Extremum of D(x, y) = (G[y] - H[x])/(y - x) over index pairs x < y.

    Returns (num, den, x, y, evals) with den > 0; evals counts D evaluations.
    The witness is the lexicographically first (x, y) attaining the extremum,
    in both skip and naive modes. Returns None when fewer than 2 indices.
    """
    count = len(g_num)
    if count < 2:
        return None
    best_num = best_den = 0
    best_x = best_y = -1
    evals = 0
    have = False
    for x in range(count - 1):
        if have and use_skip:
            # Prune: if the best slope does not beat the H-chord from the
            # best witness to x, no y past x can improve on it.
            s_num = h_num[x] * h_den[best_x] - h_num[best_x] * h_den[x]
            s_den = h_den[x] * h_den[best_x] * (x - best_x)
            lhs = best_num * s_den
            rhs = s_num * best_den
            if (find_max and lhs <= rhs) or (not find_max and lhs >= rhs):
                continue
        hx_num = h_num[x]
        hx_den = h_den[x]
        for y in range(x + 1, count):
            d_num = g_num[y] * hx_den - hx_num * g_den[y]
            d_den = g_den[y] * hx_den * (y - x)
            evals += 1
            if not have:
                better = True
            elif find_max:
                better = d_num * best_den > best_num * d_den
            else:
                better = d_num * best_den < best_num * d_den
            if better:
                best_num, best_den = d_num, d_den
                best_x, best_y = x, y
                have = True
    return best_num, best_den, best_x, best_y, evals


def linear_bound_scan(floor_num, floor_den, ceil_num, ceil_den, a, shift_pow):
    """Extrema of the shifted chord tables after removing the square term.

    Over index i (chord sum t = i + 1):
      lo = max_t (shift_pow * floorchord(t) - a*t)   (rational)
      hi = min_t (shift_pow * ceilchord(t)  - a*t)
    Returns (lo_num, lo_den, hi_num, hi_den); None when the tables are empty.
    """
    count = len(floor_num)
    if count == 0:
        return None
    lo_num = lo_den = hi_num = hi_den = 0
    for i in range(count):
        t = i + 1
        fd = floor_den[i]
        fn = shift_pow * floor_num[i] - a * t * fd
        cd = ceil_den[i]
        cn = shift_pow * ceil_num[i] - a * t * cd
        if i == 0:
            lo_num, lo_den = fn, fd
            hi_num, hi_den = cn, cd
        else:
            if fn * lo_den > lo_num * fd:
                lo_num, lo_den = fn, fd
            if cn * hi_den < hi_num * cd:
                hi_num, hi_den = cn, cd
    return lo_num, lo_den, hi_num, hi_den


def offset_interval_scan(lower, upper, sq_operand, lin_operand, a, b, shift_pow):
    """Half-open range of constant terms keeping a*sq + b*lin + c in bounds.

    c_lo = max_x (shift_pow*lower[x] - a*sq_operand[x] - b*lin_operand[x])
    c_hi = min_x (shift_pow*(upper[x]+1) - a*sq_operand[x] - b*lin_operand[x])
    Valid constants are [c_lo, c_hi), possibly empty.
    """
    n = len(lower)
    c_lo = None
    c_hi = None
    for x in range(n):
        poly = a * sq_operand[x] + b * lin_operand[x]
        lo = shift_pow * lower[x] - poly
        hi = shift_pow * (upper[x] + 1) - poly
        if c_lo is None or lo > c_lo:
            c_lo = lo
        if c_hi is None or hi < c_hi:
            c_hi = hi
    return c_lo, c_hi


def refine_offset_intervals(lower, upper, sq_operand, lin_operand, a_vals, b_vals, shift_pow):
    """offset_interval_scan for many (a, b) pairs; returns (lo_list, hi_list)."""
    lo_out = []
    hi_out = []
    for a, b in zip(a_vals, b_vals):
        lo, hi = offset_interval_scan(
            lower, upper, sq_operand, lin_operand, a, b, shift_pow)
        lo_out.append(lo)
        hi_out.append(hi)
    return lo_out, hi_out
