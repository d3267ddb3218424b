"""Command-line interface.

Subcommands
    bounds    write a certified bound table for a built-in function
    feasible  smallest workable lookup size, or per-size feasibility detail
    generate  enumerate the complete coefficient space into a catalog file
    build     full pipeline: bounds -> space -> refinement -> RTL + report
    verify    check a design file against its bounds, bit-exactly
    bench     pruning, backend and scaling measurements

Every option can also come from a JSON config file (``--config``); explicit
flags override config values. Exit codes: 0 success, 1 result violates the
requested property (bounds check failed, nothing feasible), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import bench as bench_mod
from . import kernels
from .bounds import SpecificationError, load_or_make_table, make_bound_table
from .design import PolynomialDesign
from .designspace import (GenerationLimitError, chord_tables, generate_space,
                          linear_sufficient, min_feasible_lookup_bits,
                          min_global_shift)
from .emit import emit_design
from .explore import DEFAULT_ORDER, explore
from .formats import (FAITHFUL, ONE_ULP, TABLE, BoundTable, ConfigError,
                      ProblemSpec, builtin_spec)
from .verify import check_design

_USAGE_ERRORS = (ConfigError, SpecificationError, GenerationLimitError,
                 OSError, ValueError)


# ------------------------------------------------------------ option groups

def _spec_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("problem")
    g.add_argument("--config", metavar="FILE",
                   help="JSON object of option defaults; flags override")
    g.add_argument("--function", choices=("recip", "log2", "exp2", "custom"),
                   help="target function (custom takes bounds from --table)")
    g.add_argument("--bits", type=int, metavar="M",
                   help="input fraction bits of a built-in function")
    g.add_argument("--mode", choices=(ONE_ULP, FAITHFUL),
                   help="accuracy target for built-ins (default one-ulp)")
    g.add_argument("--table", metavar="FILE",
                   help="bound-table file; required for custom functions")
    g.add_argument("--bounds-out", metavar="FILE",
                   help="also write the resolved bound table here")
    g.add_argument("--backend", choices=("auto", "pure", "compiled"),
                   help="kernel backend (default auto)")
    g.add_argument("--threads", type=int, metavar="T",
                   help="worker threads for per-region work "
                        "(default: all cpus)")


def _space_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("design space")
    g.add_argument("--lookup-bits", type=int, metavar="R",
                   help="region index width in bits")
    g.add_argument("--shift", type=int, metavar="K",
                   help="output shift; default: smallest feasible")
    g.add_argument("--shift-cap", type=int, metavar="K",
                   help="largest shift tried (default 2x output width)")
    g.add_argument("--window", type=int, metavar="W",
                   help="clamp for coefficient sides the bounds leave open")
    g.add_argument("--group-cap", type=int, metavar="N",
                   help="abort if one region exceeds N coefficient groups")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polylut",
        description="Certified piecewise-polynomial LUT interpolators: "
                    "complete design-space generation, refinement, RTL "
                    "emission and bit-exact verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="write a certified bound table")
    _spec_options(p)
    p.add_argument("--out", metavar="FILE", required=True,
                   help="bound-table output path")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("feasible",
                       help="smallest workable lookup size / feasibility "
                            "detail per size")
    _spec_options(p)
    _space_options(p)
    p.add_argument("--sweep", metavar="LO:HI",
                   help="report one line per lookup size in the range "
                        "(or a comma list)")
    p.set_defaults(func=cmd_feasible)

    p = sub.add_parser("generate",
                       help="enumerate the complete coefficient space")
    _spec_options(p)
    _space_options(p)
    p.add_argument("--out", metavar="FILE", help="catalog output path")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("build", help="bounds to RTL in one run")
    _spec_options(p)
    _space_options(p)
    p.add_argument("--outdir", metavar="DIR",
                   help="output directory (default out)")
    p.add_argument("--base", metavar="NAME",
                   help="basename for emitted files (default function_bits)")
    p.add_argument("--order", metavar="P1,P2,..",
                   help="refinement passes in order, from sq, lin, width "
                        "(default sq,lin,width)")
    p.add_argument("--clamp", action=argparse.BooleanOptionalAction,
                   help="add output saturation to the datapath")
    p.add_argument("--check", choices=("auto", "exhaustive", "sampled"),
                   help="bound-check mode for the report (default auto)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("verify", help="check a design file against bounds")
    _spec_options(p)
    p.add_argument("--design", metavar="FILE", required=True,
                   help="design file to check")
    p.add_argument("--check", choices=("auto", "exhaustive", "sampled"),
                   help="check mode (default auto)")
    p.add_argument("--samples", type=int, metavar="N",
                   help="inputs drawn in sampled mode (default 65536)")
    p.add_argument("--seed", type=int, help="sample seed (default 0)")
    p.add_argument("--json", metavar="FILE",
                   help="write a JSON report here ('-' for stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("bench", help="performance measurements")
    _spec_options(p)
    p.add_argument("--kind", choices=("search", "backends", "sweep"),
                   help="search: pruned vs naive; backends: compiled vs "
                        "pure; sweep: generation time vs lookup size "
                        "(default search)")
    p.add_argument("--lookup-bits", type=int, metavar="R",
                   help="lookup size for search/backends (default 8)")
    p.add_argument("--sweep", metavar="LO:HI",
                   help="lookup sizes for the sweep (default 6:10)")
    p.add_argument("--repeat", type=int, metavar="N",
                   help="timing repetitions, best-of (default 3)")
    p.set_defaults(func=cmd_bench)

    return parser


# -------------------------------------------------------------- config file

def _merge_config(args: argparse.Namespace) -> None:
    """Fill unset options from the JSON config file, if one was given."""
    if getattr(args, "config", None) is None:
        return
    with open(args.config) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ConfigError("config file must hold a JSON object")
    for key, val in data.items():
        attr = str(key).replace("-", "_")
        if attr in ("config", "command", "func"):
            raise ConfigError(f"config key {key!r} is not allowed")
        if not hasattr(args, attr):
            raise ConfigError(
                f"config key {key!r} is not an option of this command")
        if getattr(args, attr) is None:
            setattr(args, attr, val)


def _fill(args: argparse.Namespace, **defaults) -> None:
    for key, val in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)


def _default_threads() -> int:
    return os.cpu_count() or 1


# ------------------------------------------------------- shared resolution

def _resolve_problem(args) -> tuple[ProblemSpec, BoundTable]:
    """Build (spec, bound table) from the problem options."""
    function = args.function
    if function is None and args.table:
        function = "custom"
    if function is None:
        raise ConfigError("--function is required "
                          "(or --table for custom bounds)")
    if function == "custom":
        if not args.table:
            raise ConfigError("custom functions need --table FILE")
        table = BoundTable.load(args.table)
        spec = ProblemSpec("custom", table.input_fmt, table.output_fmt, TABLE)
    else:
        if args.bits is None:
            raise ConfigError(f"--bits is required for {function}")
        if args.table:
            if args.mode is not None:
                raise ConfigError(
                    "--table supplies the bounds; drop --mode")
            spec = builtin_spec(function, args.bits, TABLE)
        else:
            spec = builtin_spec(function, args.bits, args.mode or ONE_ULP)
        table = load_or_make_table(spec, args.table)
    if getattr(args, "bounds_out", None):
        table.save(args.bounds_out)
    return spec, table


def _backend(args) -> str | None:
    name = getattr(args, "backend", None)
    if name in (None, "auto"):
        return None
    if name == "compiled" and not kernels.compiled_available():
        raise ConfigError("compiled backend requested but not available")
    return name


def _parse_sizes(text: str) -> list[int]:
    """'6:10' (inclusive) or '6,8,10'."""
    text = str(text)
    if ":" in text:
        lo_s, _, hi_s = text.partition(":")
        lo, hi = int(lo_s), int(hi_s)
        if lo > hi:
            raise ConfigError(f"empty sweep range {text!r}")
        return list(range(lo, hi + 1))
    return [int(t) for t in text.split(",") if t.strip()]


def _count_text(count: int) -> str:
    if count < 10 ** 6:
        return str(count)
    return f"~10^{len(str(count)) - 1}"


def _spec_line(spec: ProblemSpec, table: BoundTable) -> str:
    return (f"{spec.function} {table.input_fmt} -> {table.output_fmt} "
            f"({spec.mode}, {len(table)} inputs)")


# ----------------------------------------------------------------- commands

def cmd_bounds(args) -> int:
    _fill(args, threads=_default_threads())
    spec, table = _resolve_problem(args)
    table.save(args.out)
    print(_spec_line(spec, table))
    print(f"wrote {args.out}")
    return 0


def _feasible_line(table, lookup_bits, args, backend) -> tuple[str, bool]:
    regions = 1 << lookup_bits
    shift, _ = min_global_shift(
        table, lookup_bits, shift_cap=args.shift_cap, window=args.window,
        backend=backend, threads=args.threads)
    linear = 0
    for region in range(regions):
        lo, up = table.region_bounds(lookup_bits, region)
        if linear_sufficient(chord_tables(lo, up, backend=backend),
                             backend=backend):
            linear += 1
    quad = shift is not None
    line = (f"R={lookup_bits} regions={regions} "
            f"quadratic={'yes' if quad else 'no'} "
            f"min_shift={shift if quad else '-'} "
            f"linear={linear}/{regions}")
    return line, quad


def cmd_feasible(args) -> int:
    _fill(args, threads=_default_threads())
    spec, table = _resolve_problem(args)
    backend = _backend(args)
    print(_spec_line(spec, table))

    if args.sweep is None and args.lookup_bits is None:
        found = False
        for kind in ("quadratic", "linear"):
            r = min_feasible_lookup_bits(
                table, kind, shift_cap=args.shift_cap, window=args.window,
                backend=backend, threads=args.threads)
            print(f"minimal lookup bits ({kind}): "
                  f"{r if r is not None else 'none'}")
            found = found or r is not None
        return 0 if found else 1

    sizes = (_parse_sizes(args.sweep) if args.sweep is not None
             else [args.lookup_bits])
    any_quad = False
    for lookup_bits in sizes:
        line, quad = _feasible_line(table, lookup_bits, args, backend)
        print(line)
        any_quad = any_quad or quad
    return 0 if any_quad else 1


def cmd_generate(args) -> int:
    _fill(args, threads=_default_threads())
    spec, table = _resolve_problem(args)
    if args.lookup_bits is None:
        raise ConfigError("generate needs --lookup-bits")
    catalog = generate_space(
        table, args.lookup_bits, args.shift,
        function=spec.function, mode=spec.mode,
        implicit_msb=spec.implicit_msb, window=args.window,
        shift_cap=args.shift_cap,
        **({"group_cap": args.group_cap} if args.group_cap else {}),
        backend=_backend(args), threads=args.threads)

    print(_spec_line(spec, table))
    counts = [len(r.groups) for r in catalog.regions]
    print(f"lookup_bits {catalog.lookup_bits}  regions {catalog.num_regions}"
          f"  shift {catalog.shift}")
    print(f"groups per region min={min(counts)} max={max(counts)} "
          f"total={sum(counts)}")
    print(f"designs {_count_text(catalog.design_count)}")
    linear = sum(r.linear_sufficient for r in catalog.regions)
    print(f"linear-sufficient regions {linear}/{catalog.num_regions}")
    if args.out:
        catalog.save(args.out)
        print(f"wrote {args.out}")
    if not catalog.feasible:
        empty = sum(1 for r in catalog.regions if not r.groups)
        print(f"infeasible: {empty} empty regions at shift {catalog.shift}",
              file=sys.stderr)
        return 1
    return 0


def _parse_order(text) -> tuple:
    if text is None:
        return DEFAULT_ORDER
    if isinstance(text, (list, tuple)):
        parts = [str(p) for p in text]
    else:
        parts = [p.strip() for p in str(text).split(",") if p.strip()]
    for p in parts:
        if p not in ("sq", "lin", "width"):
            raise ConfigError(f"unknown refinement pass {p!r}")
    return tuple(parts)


def cmd_build(args) -> int:
    _fill(args, threads=_default_threads(), outdir="out")
    spec, table = _resolve_problem(args)
    backend = _backend(args)
    lookup_bits = args.lookup_bits
    if lookup_bits is None:
        lookup_bits = min_feasible_lookup_bits(
            table, "quadratic", shift_cap=args.shift_cap,
            window=args.window, backend=backend, threads=args.threads)
        if lookup_bits is None:
            raise ConfigError("no lookup size is feasible; check the bounds")
        print(f"auto lookup_bits {lookup_bits}")

    catalog = generate_space(
        table, lookup_bits, args.shift,
        function=spec.function, mode=spec.mode,
        implicit_msb=spec.implicit_msb, window=args.window,
        shift_cap=args.shift_cap,
        **({"group_cap": args.group_cap} if args.group_cap else {}),
        backend=backend, threads=args.threads)
    if not catalog.feasible:
        print(f"infeasible at shift {catalog.shift}; raise --shift or drop "
              f"it for the minimal one", file=sys.stderr)
        return 1

    selected = explore(catalog, table, order=_parse_order(args.order),
                       clamp=bool(args.clamp), backend=backend,
                       threads=args.threads)
    result = emit_design(selected, table, args.outdir,
                         base=args.base or spec.label,
                         check_mode=args.check or "auto")
    with open(result.report_path) as fh:
        sys.stdout.write(fh.read())
    for path in (result.design_path, result.lut_path, result.verilog_path,
                 result.report_path):
        print(f"wrote {path}")
    return 0 if result.check.passed else 1


def cmd_verify(args) -> int:
    design = PolynomialDesign.load(args.design)
    if args.table:
        table = BoundTable.load(args.table)
        if (table.input_fmt != design.input_fmt
                or table.output_fmt != design.output_fmt):
            raise ConfigError(
                f"table formats {table.input_fmt}->{table.output_fmt} do "
                f"not match design {design.input_fmt}->{design.output_fmt}")
    elif design.mode == TABLE:
        raise ConfigError("design was built from a table file; pass --table")
    else:
        spec = ProblemSpec(design.function, design.input_fmt,
                           design.output_fmt, design.mode,
                           design.implicit_msb)
        table = make_bound_table(spec)
    report = check_design(design, table, mode=args.check or "auto",
                          samples=args.samples or 1 << 16,
                          seed=args.seed or 0)
    if args.json == "-":
        sys.stdout.write(report.as_json())
    else:
        if args.json:
            with open(args.json, "w") as fh:
                fh.write(report.as_json())
        sys.stdout.write(report.as_text())
    return 0 if report.passed else 1


def cmd_bench(args) -> int:
    _fill(args, threads=_default_threads(), kind="search", function="recip",
          repeat=3)
    if args.function != "custom" and args.bits is None:
        args.bits = 16
    spec, table = _resolve_problem(args)
    backend = _backend(args)
    print(_spec_line(spec, table))
    print(f"active backend: {backend or kernels.active_backend_name()}")

    if args.kind == "search":
        _fill(args, lookup_bits=8)
        res = bench_mod.bench_skip_vs_naive(
            table, args.lookup_bits, backend=backend, repeat=args.repeat)
        print(f"lookup_bits {args.lookup_bits} ({res['regions']} regions)")
        print(f"naive  {res['naive_seconds']:.4f}s  "
              f"{res['naive_evals']} evaluations")
        print(f"pruned {res['skip_seconds']:.4f}s  "
              f"{res['skip_evals']} evaluations")
        print(f"time ratio {res['time_ratio']:.3f}  "
              f"eval ratio {res['eval_ratio']:.3f}")
    elif args.kind == "backends":
        _fill(args, lookup_bits=8)
        res = bench_mod.bench_backends(table, args.lookup_bits,
                                       repeat=args.repeat)
        print(f"pure     {res['pure_seconds']:.4f}s")
        if res["compiled_available"]:
            print(f"compiled {res['compiled_seconds']:.4f}s")
            print(f"speedup  {res['speedup']:.2f}x")
        else:
            print("compiled backend unavailable")
    else:
        sizes = _parse_sizes(args.sweep or "6:10")
        res = bench_mod.bench_generation_sweep(
            table, sizes, backend=backend, threads=args.threads,
            repeat=args.repeat)
        for lookup_bits, seconds in res["points"]:
            print(f"R={lookup_bits} generation {seconds:.3f}s")
        print(f"log-log slope vs lookup bits: {res['slope_vs_lookup']:.2f}")
        print(f"log-log slope vs region size: {res['slope_vs_region']:.2f}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _merge_config(args)
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
