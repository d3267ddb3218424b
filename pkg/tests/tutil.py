"""Shared test helpers: random bound tables and bound arrays."""

from __future__ import annotations

from polylut.formats import BoundTable, FixedFormat

STYLES = ("curve", "jitter", "tight")


def brute_min_width(region_ranges, zero_cap):
    """Reference width minimization: scan every shift and every multiple."""
    results = []
    for t in range(zero_cap + 1):
        per_t = []
        for ranges in region_ranges:
            best = None
            for lo, hi in ranges:
                for v in range(lo, hi):
                    if v % (1 << t) == 0:
                        cost = (v.bit_length() - t) if v else -t
                        best = cost if best is None else min(best, cost)
            if best is None:
                break
            per_t.append(best)
        else:
            results.append((max(per_t), t))
    width = min(w for w, _ in results)
    shift = min(t for w, t in results if w == width)
    return max(width, 0), shift


def random_width_families(rng, trials):
    """Random per-region magnitude-range families for width minimization."""
    for _ in range(trials):
        regions = []
        for _ in range(rng.randrange(1, 6)):
            ranges = []
            for _ in range(rng.randrange(1, 5)):
                lo = rng.randrange(0, 40)
                hi = lo + rng.randrange(1, 10)
                ranges.append((lo, hi))
            regions.append(ranges)
        yield regions


def random_bounds(rng, count: int, out_width: int, style: str | None = None):
    """Random (lower, upper) arrays with 0 <= l <= u < 2**out_width."""
    cap = (1 << out_width) - 1
    style = style or rng.choice(STYLES)
    if style == "curve":
        # noisy walk: resembles a sampled function with slack
        val = rng.randrange(cap + 1)
        base = []
        for _ in range(count):
            base.append(val)
            val = min(cap, max(0, val + rng.randrange(-2, 4)))
        lower = [max(0, v - rng.randrange(0, 2)) for v in base]
        upper = [min(cap, v + rng.randrange(0, 3)) for v in base]
    elif style == "jitter":
        lower = [rng.randrange(cap + 1) for _ in range(count)]
        upper = [min(cap, lo + rng.randrange(0, 4)) for lo in lower]
    else:
        lower = [rng.randrange(cap + 1) for _ in range(count)]
        upper = list(lower)
    return lower, upper


def random_table(rng, width: int, out_width: int,
                 style: str | None = None) -> BoundTable:
    lower, upper = random_bounds(rng, 1 << width, out_width, style)
    return BoundTable(FixedFormat(0, width), FixedFormat(0, out_width),
                      lower, upper)
