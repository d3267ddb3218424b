# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: int64 data with 128-bit cross-multiplication compares.

Mirrors _kernels_py on any input that satisfies the magnitude guards in
kernels.py; the dispatcher routes larger inputs to the pure module. All
stored quantities fit in int64 by those guards, so only the transient
cross-multiplication products need 128 bits.
"""

import numpy as np

ctypedef long long i64

cdef extern from *:
    ctypedef long long i128 "__int128"


def chord_tables(i64[::1] lower, i64[::1] upper):
    cdef Py_ssize_t n = lower.shape[0]
    if n < 2:
        return [], [], [], []
    cdef Py_ssize_t count = 2 * n - 3
    floor_num_arr = np.zeros(count, dtype=np.int64)
    floor_den_arr = np.zeros(count, dtype=np.int64)
    ceil_num_arr = np.zeros(count, dtype=np.int64)
    ceil_den_arr = np.zeros(count, dtype=np.int64)
    cdef i64[::1] floor_num = floor_num_arr
    cdef i64[::1] floor_den = floor_den_arr
    cdef i64[::1] ceil_num = ceil_num_arr
    cdef i64[::1] ceil_den = ceil_den_arr
    cdef Py_ssize_t x, y, idx
    cdef i64 ux1, lx, fn, cn, dy, fd
    with nogil:
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
                    if <i128>fn * fd > <i128>floor_num[idx] * dy:
                        floor_num[idx] = fn
                        floor_den[idx] = dy
                    if <i128>cn * ceil_den[idx] < <i128>ceil_num[idx] * dy:
                        ceil_num[idx] = cn
                        ceil_den[idx] = dy
    return (floor_num_arr, floor_den_arr, ceil_num_arr, ceil_den_arr)


def extremal_search(i64[::1] g_num, i64[::1] g_den,
                    i64[::1] h_num, i64[::1] h_den,
                    bint find_max, bint use_skip):
    cdef Py_ssize_t count = g_num.shape[0]
    if count < 2:
        return None
    cdef i64 best_num = 0, best_den = 0
    cdef Py_ssize_t best_x = -1, best_y = -1
    cdef long long evals = 0
    cdef bint have = False
    cdef Py_ssize_t x, y
    cdef i64 hx_num, hx_den, d_num, d_den
    cdef i128 s_num, s_den, lhs, rhs
    cdef bint better, skip
    with nogil:
        for x in range(count - 1):
            if have and use_skip:
                s_num = <i128>h_num[x] * h_den[best_x] - <i128>h_num[best_x] * h_den[x]
                s_den = (<i128>h_den[x] * h_den[best_x]) * (x - best_x)
                lhs = best_num * s_den
                rhs = s_num * best_den
                if find_max:
                    skip = lhs <= rhs
                else:
                    skip = lhs >= rhs
                if skip:
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
                    better = <i128>d_num * best_den > <i128>best_num * d_den
                else:
                    better = <i128>d_num * best_den < <i128>best_num * d_den
                if better:
                    best_num = d_num
                    best_den = d_den
                    best_x = x
                    best_y = y
                    have = True
    return best_num, best_den, best_x, best_y, evals


def linear_bound_scan(i64[::1] floor_num, i64[::1] floor_den,
                      i64[::1] ceil_num, i64[::1] ceil_den,
                      i64 a, i64 shift_pow):
    cdef Py_ssize_t count = floor_num.shape[0]
    if count == 0:
        return None
    cdef i64 lo_num = 0, lo_den = 0, hi_num = 0, hi_den = 0
    cdef Py_ssize_t i
    cdef i64 t, fd, cd, fn, cn
    with nogil:
        for i in range(count):
            t = i + 1
            fd = floor_den[i]
            fn = shift_pow * floor_num[i] - a * t * fd
            cd = ceil_den[i]
            cn = shift_pow * ceil_num[i] - a * t * cd
            if i == 0:
                lo_num = fn
                lo_den = fd
                hi_num = cn
                hi_den = cd
            else:
                if <i128>fn * lo_den > <i128>lo_num * fd:
                    lo_num = fn
                    lo_den = fd
                if <i128>cn * hi_den < <i128>hi_num * cd:
                    hi_num = cn
                    hi_den = cd
    return lo_num, lo_den, hi_num, hi_den


def offset_interval_scan(i64[::1] lower, i64[::1] upper,
                         i64[::1] sq_operand, i64[::1] lin_operand,
                         i64 a, i64 b, i64 shift_pow):
    cdef Py_ssize_t n = lower.shape[0]
    if n == 0:
        return None, None
    cdef i64 c_lo = 0, c_hi = 0, poly, lo, hi
    cdef Py_ssize_t x
    with nogil:
        for x in range(n):
            poly = a * sq_operand[x] + b * lin_operand[x]
            lo = shift_pow * lower[x] - poly
            hi = shift_pow * (upper[x] + 1) - poly
            if x == 0:
                c_lo = lo
                c_hi = hi
            else:
                if lo > c_lo:
                    c_lo = lo
                if hi < c_hi:
                    c_hi = hi
    return c_lo, c_hi


def refine_offset_intervals(i64[::1] lower, i64[::1] upper,
                            i64[::1] sq_operand, i64[::1] lin_operand,
                            i64[::1] a_vals, i64[::1] b_vals,
                            i64 shift_pow):
    cdef Py_ssize_t n = lower.shape[0]
    cdef Py_ssize_t groups = a_vals.shape[0]
    lo_arr = np.zeros(groups, dtype=np.int64)
    hi_arr = np.zeros(groups, dtype=np.int64)
    cdef i64[::1] lo_out = lo_arr
    cdef i64[::1] hi_out = hi_arr
    cdef Py_ssize_t g, x
    cdef i64 a, b, c_lo, c_hi, poly, lo, hi
    if n == 0:
        return lo_arr, hi_arr
    with nogil:
        for g in range(groups):
            a = a_vals[g]
            b = b_vals[g]
            c_lo = 0
            c_hi = 0
            for x in range(n):
                poly = a * sq_operand[x] + b * lin_operand[x]
                lo = shift_pow * lower[x] - poly
                hi = shift_pow * (upper[x] + 1) - poly
                if x == 0:
                    c_lo = lo
                    c_hi = hi
                else:
                    if lo > c_lo:
                        c_lo = lo
                    if hi < c_hi:
                        c_hi = hi
            lo_out[g] = c_lo
            hi_out[g] = c_hi
    return lo_arr, hi_arr
