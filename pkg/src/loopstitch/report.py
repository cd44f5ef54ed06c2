"""Benchmark harness: run the pipeline and the direct baseline over a
directory of .sl files and render the comparison as a text table, a CSV
file, and matplotlib bar charts.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from .pipeline import PipelineConfig, baseline_direct_solve, run
from .solver import Infeasible, SolveTimeout, SolverFailure
from .stitch import solution_size
from .sygus import parse_problem

TIMED_OUT = "TO"


@dataclass
class BenchRow:
    name: str
    pipeline_outcome: str  # "recursive" | "direct" | failure reason
    pipeline_time: float
    pipeline_size: int | None
    baseline_outcome: str  # "ok" | "TO" | "infeasible" | "error"
    baseline_time: float
    baseline_size: int | None
    timeout: float

    @property
    def pipeline_ok(self) -> bool:
        return self.pipeline_outcome in ("recursive", "direct")

    @property
    def baseline_ok(self) -> bool:
        return self.baseline_outcome == "ok"


def run_benchmark_file(path, config: PipelineConfig) -> BenchRow:
    problem = parse_problem(Path(path).read_text())

    start = time.monotonic()
    result = run(problem, config)
    pipeline_time = time.monotonic() - start
    if result.ok:
        pipeline_outcome = result.kind
        pipeline_size = result.stats.solution_size
    else:
        pipeline_outcome = result.failure
        pipeline_size = None

    start = time.monotonic()
    try:
        term = baseline_direct_solve(problem, config)
        baseline_outcome, baseline_size = "ok", solution_size(term)
    except SolveTimeout:
        baseline_outcome, baseline_size = TIMED_OUT, None
    except Infeasible:
        baseline_outcome, baseline_size = "infeasible", None
    except SolverFailure:
        baseline_outcome, baseline_size = "error", None
    baseline_time = time.monotonic() - start

    return BenchRow(
        Path(path).name,
        pipeline_outcome,
        pipeline_time,
        pipeline_size,
        baseline_outcome,
        baseline_time,
        baseline_size,
        config.timeout,
    )


def run_bench_dir(directory, config: PipelineConfig) -> list:
    files = sorted(Path(directory).glob("*.sl"))
    return [run_benchmark_file(f, config) for f in files]


def _cell_time(seconds: float, ok: bool) -> str:
    return f"{seconds:.3f}s" if ok else TIMED_OUT


def _cell_size(size) -> str:
    return str(size) if size is not None else "-"


def render_table(rows) -> str:
    header = ("benchmark", "pipe time", "pipe |AST|", "base time", "base |AST|")
    body = [
        (
            r.name,
            _cell_time(r.pipeline_time, r.pipeline_ok),
            _cell_size(r.pipeline_size),
            _cell_time(r.baseline_time, r.baseline_ok),
            _cell_size(r.baseline_size),
        )
        for r in rows
    ]
    widths = [max(len(h), *(len(b[i]) for b in body)) if body else len(h) for i, h in enumerate(header)]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(header, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for b in body:
        lines.append("  ".join(c.ljust(w) for c, w in zip(b, widths)))
    return "\n".join(lines)


def write_csv(rows, path) -> Path:
    path = Path(path)
    with path.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(
            [
                "benchmark",
                "pipeline_outcome",
                "pipeline_time_s",
                "pipeline_ast_size",
                "baseline_outcome",
                "baseline_time_s",
                "baseline_ast_size",
                "timeout_s",
            ]
        )
        for r in rows:
            writer.writerow(
                [
                    r.name,
                    r.pipeline_outcome,
                    f"{r.pipeline_time:.3f}",
                    r.pipeline_size if r.pipeline_size is not None else "",
                    r.baseline_outcome,
                    f"{r.baseline_time:.3f}",
                    r.baseline_size if r.baseline_size is not None else "",
                    r.timeout,
                ]
            )
    return path


def _grouped_bars(ax, rows, pipeline_values, baseline_values, ylabel):
    import numpy as np

    x = np.arange(len(rows))
    width = 0.38
    pipe = [v if v is not None else 0 for v in pipeline_values]
    base = [v if v is not None else 0 for v in baseline_values]
    bars_p = ax.bar(x - width / 2, pipe, width, label="pipeline")
    bars_b = ax.bar(x + width / 2, base, width, label="baseline", hatch="//")
    for bars, values in ((bars_p, pipeline_values), (bars_b, baseline_values)):
        for bar, v in zip(bars, values):
            if v is None:
                bar.set_alpha(0.25)
                ax.annotate(
                    TIMED_OUT,
                    (bar.get_x() + bar.get_width() / 2, 0),
                    ha="center",
                    va="bottom",
                    fontsize=8,
                )
    ax.set_xticks(x)
    ax.set_xticklabels([r.name for r in rows], rotation=20, ha="right")
    ax.set_ylabel(ylabel)
    ax.legend()


def write_figures(rows, directory) -> list:
    """Render time and size comparison charts; returns the written paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    times_p = [r.pipeline_time if r.pipeline_ok else None for r in rows]
    times_b = [r.baseline_time if r.baseline_ok else None for r in rows]
    _grouped_bars(ax, rows, times_p, times_b, "wall time (s)")
    ax.set_title("Synthesis time: pipeline vs direct solve")
    fig.tight_layout()
    path = directory / "bench_times.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    _grouped_bars(
        ax,
        rows,
        [r.pipeline_size for r in rows],
        [r.baseline_size for r in rows],
        "solution size (nodes)",
    )
    ax.set_title("Solution size: pipeline vs direct solve")
    fig.tight_layout()
    path = directory / "bench_sizes.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)
    return written


def write_report(rows, directory) -> dict:
    """Write CSV and figures into ``directory``; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    csv_path = write_csv(rows, directory / "bench_results.csv")
    figure_paths = write_figures(rows, directory)
    return {"csv": csv_path, "figures": figure_paths}
