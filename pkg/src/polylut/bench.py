"""Benchmarks: pruned vs naive searches, backends, and generation scaling.

All workloads are real pipeline pieces (chord tables and cross-pair
extremal searches of actual bound tables), so the numbers reflect what
generation does, not a synthetic microbenchmark.
"""

from __future__ import annotations

import math
import time

from . import kernels
from .designspace import chord_tables, generate_space
from .formats import BoundTable


def _region_tables(table: BoundTable, lookup_bits: int, backend=None):
    out = []
    for region in range(1 << lookup_bits):
        lo, up = table.region_bounds(lookup_bits, region)
        out.append(chord_tables(lo, up, backend=backend))
    return out


def _search_all(tables, use_skip: bool, backend=None):
    """Run both cross-pair searches on every region; returns eval count."""
    evals = 0
    for ct in tables:
        if ct.count < 2:
            continue
        res = kernels.extremal_search(
            list(ct.floor_num), list(ct.floor_den),
            list(ct.ceil_num), list(ct.ceil_den),
            True, use_skip, backend=backend)
        evals += res[4]
        res = kernels.extremal_search(
            list(ct.ceil_num), list(ct.ceil_den),
            list(ct.floor_num), list(ct.floor_den),
            False, use_skip, backend=backend)
        evals += res[4]
    return evals


def bench_skip_vs_naive(table: BoundTable, lookup_bits: int,
                        backend: str | None = None, repeat: int = 3) -> dict:
    """Time the cross-pair slope searches with and without pruning."""
    tables = _region_tables(table, lookup_bits, backend=backend)
    results = {}
    for label, use_skip in (("naive", False), ("skip", True)):
        best = None
        evals = 0
        for _ in range(repeat):
            start = time.perf_counter()
            evals = _search_all(tables, use_skip, backend=backend)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        results[f"{label}_seconds"] = best
        results[f"{label}_evals"] = evals
    results["regions"] = len(tables)
    results["time_ratio"] = results["skip_seconds"] / results["naive_seconds"]
    results["eval_ratio"] = results["skip_evals"] / max(results["naive_evals"], 1)
    return results


def bench_backends(table: BoundTable, lookup_bits: int,
                   repeat: int = 3) -> dict:
    """Same pruned-search workload on the pure and compiled backends."""
    out = {"compiled_available": kernels.compiled_available()}
    backends = ["pure"]
    if kernels.compiled_available():
        backends.append("compiled")
    for backend in backends:
        tables = _region_tables(table, lookup_bits, backend=backend)
        best = None
        for _ in range(repeat):
            start = time.perf_counter()
            _search_all(tables, True, backend=backend)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        out[f"{backend}_seconds"] = best
    if "compiled_seconds" in out:
        out["speedup"] = out["pure_seconds"] / out["compiled_seconds"]
    return out


def bench_generation_sweep(table: BoundTable, lookup_bits_list,
                           backend: str | None = None,
                           threads: int = 1, repeat: int = 1) -> dict:
    """Time full space generation per lookup size; fit log-log slopes.

    slope_vs_lookup regresses log2(seconds) on log2(lookup bits) — the
    power-law trend of generation time in the lookup size. slope_vs_region
    regresses on log2(region size) (input width minus lookup bits), which
    reports how time scales with the number of points per region.
    """
    points = []
    for lookup_bits in lookup_bits_list:
        best = None
        for _ in range(repeat):
            start = time.perf_counter()
            generate_space(table, lookup_bits, backend=backend,
                           threads=threads)
            elapsed = time.perf_counter() - start
            best = elapsed if best is None else min(best, elapsed)
        points.append((lookup_bits, best))
    ys = [math.log2(max(t, 1e-9)) for _, t in points]
    return {
        "points": points,
        "slope_vs_lookup": _fit_slope(
            [math.log2(r) for r, _ in points], ys),
        "slope_vs_region": _fit_slope(
            [table.input_fmt.width - r for r, _ in points], ys),
    }


def _fit_slope(xs, ys) -> float:
    n = len(xs)
    if n < 2:
        return float("nan")
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = sum((x - mx) ** 2 for x in xs)
    return num / den if den else float("nan")
