"""Certified piecewise-polynomial LUT interpolators for fixed-point functions.

The pipeline: certified integer bound tables (``bounds``), complete
enumeration of every valid integer coefficient group per region
(``designspace``), refinement passes that shrink operand and storage
widths while keeping the space exactly characterized (``explore``),
RTL/LUT emission (``emit``) and bit-exact verification (``verify``).
Exact-rational hot loops run on a compiled kernel when available, with a
pure-Python fallback (``kernels``).
"""

from .bounds import SpecificationError, load_or_make_table, make_bound_table
from .design import PolynomialDesign
from .designspace import (CoefficientCatalog, GenerationLimitError,
                          chord_tables, generate_space,
                          min_feasible_lookup_bits, min_global_shift)
from .emit import EmitResult, emit_design
from .explore import (SelectedDesign, coefficient_width_pass, explore,
                      max_linear_truncation, max_square_truncation,
                      minimize_width, select_design)
from .formats import (ACCURACY_MODES, BUILTIN_FUNCTIONS, FAITHFUL, ONE_ULP,
                      TABLE, BoundTable, ConfigError, FixedFormat,
                      ProblemSpec, builtin_spec)
from .verify import CheckReport, check_design

__version__ = "0.1.0"

__all__ = [
    "ACCURACY_MODES",
    "BUILTIN_FUNCTIONS",
    "BoundTable",
    "CheckReport",
    "CoefficientCatalog",
    "ConfigError",
    "EmitResult",
    "FAITHFUL",
    "FixedFormat",
    "GenerationLimitError",
    "ONE_ULP",
    "PolynomialDesign",
    "ProblemSpec",
    "SelectedDesign",
    "SpecificationError",
    "TABLE",
    "builtin_spec",
    "check_design",
    "chord_tables",
    "coefficient_width_pass",
    "emit_design",
    "explore",
    "generate_space",
    "load_or_make_table",
    "make_bound_table",
    "max_linear_truncation",
    "max_square_truncation",
    "min_feasible_lookup_bits",
    "min_global_shift",
    "minimize_width",
    "select_design",
    "__version__",
]
