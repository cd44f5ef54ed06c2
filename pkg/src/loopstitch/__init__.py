"""loopstitch: synthesis of recursive string programs from examples.

Solves each input-output constraint independently through a black-box
PBE solver, detects repeated one-hole contexts ("unrolled loops") in the
per-example solutions, synthesizes an integer loop-count function, and
stitches a verified recursive solution.
"""

from .pipeline import (
    DirectSolution,
    PipelineConfig,
    PipelineStats,
    SynthesisResult,
    baseline_direct_solve,
    run,
    split,
)
from .semantics import (
    DEFAULT_FUEL,
    Defs,
    EvalError,
    FuelCounter,
    FuelExhausted,
    FunctionDef,
    SortError,
    UnboundVariable,
    evaluate,
    infer_sort,
)
from .solver import (
    BUILTIN,
    ExternalSolverError,
    Infeasible,
    SolveBudget,
    SolveTimeout,
    SolverChoice,
    SolverFailure,
    builtin_enumerate,
    external_solve,
    solve_pbe,
)
from .stitch import (
    RecursiveSolution,
    VerifyReport,
    build_recursive_solution,
    solution_size,
    unroll_equivalence_check,
    verify,
)
from .sygus import (
    ConstraintExample,
    FunctionSignature,
    Grammar,
    SygusError,
    SygusProblem,
    parse_definitions,
    parse_problem,
    parse_solver_output,
    print_problem,
    print_solution,
)
from .terms import (
    App,
    BOOL,
    HOLE,
    Hole,
    INT,
    Lit,
    STRING,
    Var,
    app,
    apply_context,
    ast_size,
    compose,
    lit,
    normalize,
    print_term,
    var,
)
from .unroll import Category, CategoryKey, CategoryRegistry, Decomposition, category_key, decompose
from .loopcount import CountExample, build_count_examples, derive_int_grammar, synthesize_loop_count

__version__ = "0.1.0"
