"""Experiment runner: the full simulate-search-score protocol.

A condition is (graph size, sample size, disturbance, connection) run
``run_count`` times. Each run draws a fresh random DAG, parameterizes and
simulates it once, and feeds the same data to every algorithm; "-L"
variants consume the covariance of the rank-Gaussianized data, "-S"
variants the raw covariance. Per-run metrics against the true pattern are
averaged per algorithm.

Seeds derive from a stable hash of (master seed, condition label, run
index), so adding or removing algorithms never perturbs the simulated data
stream and any two columns of a table describe the same runs.
"""

from __future__ import annotations

import hashlib
import multiprocessing
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyResultError, NpnSearchError
from .gauss import CovarianceSummary, ScoreConfig, covariance
from .ges import GesConfig, ges_search, pc_ges_search
from .graph import dag_to_cpdag, random_dag
from .metrics import MetricsReport, aggregate, compute_metrics
from .npn import npn_transform
from .pc import PcConfig, pc_search
from .semsim import CONNECTION_KINDS, DISTURBANCE_KINDS, parameterize, simulate

STATISTIC_ROWS = ("Adj FPR", "Adj RR", "Arrow FPR", "Arrow RR")

FAMILIES = ("PC", "GES", "PC-GES")
TRANSFORMS = ("S", "L")


@dataclass(frozen=True)
class AlgorithmSpec:
    """One algorithm column: family, input transform, and its knobs."""

    family: str
    transform: str
    score: ScoreConfig | None = None
    pc: PcConfig | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.transform not in TRANSFORMS:
            raise ValueError(f"transform must be 'S' or 'L', not {self.transform!r}")
        if self.family in ("GES", "PC-GES") and self.score is None:
            raise ValueError(f"{self.family} requires a score config")
        if self.family in ("PC", "PC-GES") and self.pc is None:
            raise ValueError(f"{self.family} requires a PC config")

    @property
    def name(self) -> str:
        if self.family == "GES":
            return f"GES-{self.score.kind}-{self.transform}"
        return f"{self.family}-{self.transform}"


def algorithm_from_name(
    name: str,
    alpha: float = 0.001,
    penalty_discount: float = 1.0,
    max_conditioning_size: int | None = None,
) -> AlgorithmSpec:
    """Parse a column name like ``PC-S``, ``GES-BIC-L`` or ``PC-GES-S``."""
    pc_config = PcConfig(alpha=alpha, max_conditioning_size=max_conditioning_size)
    parts = name.strip().split("-")
    if len(parts) == 2 and parts[0] == "PC" and parts[1] in TRANSFORMS:
        return AlgorithmSpec("PC", parts[1], pc=pc_config)
    if len(parts) == 3 and parts[0] == "GES" and parts[1] in ("AIC", "BIC") and parts[2] in TRANSFORMS:
        return AlgorithmSpec("GES", parts[2], score=ScoreConfig(parts[1], penalty_discount))
    if len(parts) == 3 and parts[0] == "PC" and parts[1] == "GES" and parts[2] in TRANSFORMS:
        return AlgorithmSpec(
            "PC-GES", parts[2], score=ScoreConfig("BIC", penalty_discount), pc=pc_config
        )
    raise ValueError(f"unrecognized algorithm name {name!r}")


@dataclass(frozen=True)
class ExperimentSpec:
    node_count: int
    edge_count: int
    case_count: int
    run_count: int
    disturbance: str
    connection: str
    algorithms: tuple[AlgorithmSpec, ...]
    master_seed: int = 0

    def __post_init__(self):
        if min(self.node_count, self.case_count, self.run_count) < 1 or self.edge_count < 0:
            raise ValueError("counts must be positive (edge_count nonnegative)")
        if self.disturbance not in DISTURBANCE_KINDS:
            raise ValueError(f"unknown disturbance {self.disturbance!r}")
        if self.connection not in CONNECTION_KINDS:
            raise ValueError(f"unknown connection {self.connection!r}")
        names = [a.name for a in self.algorithms]
        if len(set(names)) != len(names):
            raise ValueError("duplicate algorithm names")
        object.__setattr__(self, "algorithms", tuple(self.algorithms))

    @property
    def condition_label(self) -> str:
        # deliberately excludes the algorithm list and run count
        return (
            f"{self.disturbance}/{self.connection}/"
            f"v{self.node_count}/e{self.edge_count}/n{self.case_count}"
        )


def derive_seed(master_seed: int, *parts) -> int:
    """Stable 64-bit seed from the master seed and labeling parts."""
    text = "|".join([str(master_seed), *(str(p) for p in parts)])
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass
class RunRecord:
    run_index: int
    data_hash: str
    reports: dict[str, MetricsReport] = field(default_factory=dict)
    errors: dict[str, str] = field(default_factory=dict)


@dataclass
class ConditionResult:
    spec: ExperimentSpec
    runs: list[RunRecord]
    table: dict[str, MetricsReport]
    aborted_cells: list[tuple[int, str, str]]


def _search_cell(algorithm: AlgorithmSpec, cov: CovarianceSummary):
    if algorithm.family == "PC":
        return pc_search(cov, algorithm.pc)
    if algorithm.family == "GES":
        return ges_search(cov, GesConfig(score=algorithm.score))
    return pc_ges_search(cov, algorithm.pc, algorithm.score)


def _run_cell(algorithm, cov, timeout):
    if timeout is None:
        return _search_cell(algorithm, cov)
    with multiprocessing.get_context().Pool(1) as pool:
        handle = pool.apply_async(_search_cell, (algorithm, cov))
        try:
            return handle.get(timeout)
        except multiprocessing.TimeoutError:
            pool.terminate()
            raise NpnSearchError(f"cell timed out after {timeout} s") from None


def run_condition(spec: ExperimentSpec, cell_timeout: float | None = None) -> ConditionResult:
    """Execute every run and algorithm cell of one condition.

    A failing cell (simulation overflow, degenerate data, timeout) is
    recorded and skipped; the per-algorithm averages cover the surviving
    runs. Deterministic for a fixed spec.
    """
    label = spec.condition_label
    needs_l = any(a.transform == "L" for a in spec.algorithms)
    needs_s = any(a.transform == "S" for a in spec.algorithms)
    runs: list[RunRecord] = []
    aborted: list[tuple[int, str, str]] = []

    for r in range(spec.run_count):
        run_seed = derive_seed(spec.master_seed, label, r)
        dag = random_dag(spec.node_count, spec.edge_count, derive_seed(run_seed, "dag"))
        truth = dag_to_cpdag(dag)
        model = parameterize(dag, spec.disturbance, spec.connection, derive_seed(run_seed, "sem"))
        record = RunRecord(run_index=r, data_hash="")
        try:
            data = simulate(model, spec.case_count, derive_seed(run_seed, "data"))
            record.data_hash = hashlib.sha256(np.ascontiguousarray(data).tobytes()).hexdigest()
            cov_s = covariance(data) if needs_s else None
            cov_l = covariance(npn_transform(data)) if needs_l else None
        except NpnSearchError as exc:
            for algorithm in spec.algorithms:
                record.errors[algorithm.name] = str(exc)
                aborted.append((r, algorithm.name, str(exc)))
            runs.append(record)
            continue

        for algorithm in spec.algorithms:
            cov = cov_s if algorithm.transform == "S" else cov_l
            try:
                estimate = _run_cell(algorithm, cov, cell_timeout)
                record.reports[algorithm.name] = compute_metrics(estimate, truth)
            except NpnSearchError as exc:
                record.errors[algorithm.name] = str(exc)
                aborted.append((r, algorithm.name, str(exc)))
        runs.append(record)

    table: dict[str, MetricsReport] = {}
    for algorithm in spec.algorithms:
        reports = [rec.reports[algorithm.name] for rec in runs if algorithm.name in rec.reports]
        if reports:
            table[algorithm.name] = aggregate(reports)
    return ConditionResult(spec=spec, runs=runs, table=table, aborted_cells=aborted)


# -- table rendering -----------------------------------------------------------


def _report_rows(report: MetricsReport) -> tuple[float, float, float, float]:
    return (report.adj_fpr, report.adj_rr, report.arrow_fpr, report.arrow_rr)


def render_table(results: dict[str, MetricsReport], fmt: str = "csv") -> str:
    """Render the four statistic rows by algorithm columns.

    CSV keeps full float precision (values round-trip exactly); markdown
    rounds to two decimals.
    """
    if not results:
        raise EmptyResultError("no algorithm results to render")
    names = list(results)
    columns = [_report_rows(results[name]) for name in names]
    if fmt == "csv":
        lines = ["statistic," + ",".join(names)]
        for i, row_name in enumerate(STATISTIC_ROWS):
            lines.append(row_name + "," + ",".join(repr(float(col[i])) for col in columns))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        header = "| statistic | " + " | ".join(names) + " |"
        rule = "|---" * (len(names) + 1) + "|"
        lines = [header, rule]
        for i, row_name in enumerate(STATISTIC_ROWS):
            cells = " | ".join(f"{col[i]:.2f}" for col in columns)
            lines.append(f"| {row_name} | {cells} |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def parse_table_csv(text: str) -> dict[str, MetricsReport]:
    """Inverse of ``render_table(..., 'csv')``."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if len(lines) != 1 + len(STATISTIC_ROWS):
        raise ValueError("malformed table CSV")
    names = lines[0].split(",")[1:]
    values = []
    for ln, expected in zip(lines[1:], STATISTIC_ROWS):
        cells = ln.split(",")
        if cells[0] != expected:
            raise ValueError(f"expected row {expected!r}, found {cells[0]!r}")
        values.append([float(v) for v in cells[1:]])
    out = {}
    for j, name in enumerate(names):
        out[name] = MetricsReport(
            adj_fpr=values[0][j], adj_rr=values[1][j],
            arrow_fpr=values[2][j], arrow_rr=values[3][j],
        )
    return out


# -- published-table presets -----------------------------------------------------

_CONDITION_GRID = {
    1: ("L", "G"), 2: ("L", "NG1"), 3: ("L", "NG2"),
    4: ("NL1", "G"), 5: ("NL1", "NG1"), 6: ("NL1", "NG2"),
    7: ("NL2", "G"), 8: ("NL2", "NG1"), 9: ("NL2", "NG2"),
}

SMALL_ALGORITHMS = (
    "PC-S", "PC-L", "GES-AIC-S", "GES-AIC-L",
    "GES-BIC-S", "GES-BIC-L", "PC-GES-S", "PC-GES-L",
)
LARGE_ALGORITHMS = ("PC-S", "PC-L", "GES-BIC-S", "GES-BIC-L", "PC-GES-S", "PC-GES-L")


def table_spec(which: int, master_seed: int = 0) -> ExperimentSpec:
    """Preset for published table 1..18.

    Tables 1-9: 50 nodes and edges, 1000 cases, all eight algorithms,
    unit penalty. Tables 10-18: 500 nodes and edges, 250 cases, AIC
    columns dropped, penalty discount 2.
    """
    if not 1 <= which <= 18:
        raise ValueError("table number must be in 1..18")
    if which <= 9:
        connection, disturbance = _CONDITION_GRID[which]
        names, discount = SMALL_ALGORITHMS, 1.0
        nodes, edges, cases = 50, 50, 1000
    else:
        connection, disturbance = _CONDITION_GRID[which - 9]
        names, discount = LARGE_ALGORITHMS, 2.0
        nodes, edges, cases = 500, 500, 250
    algorithms = tuple(algorithm_from_name(n, penalty_discount=discount) for n in names)
    return ExperimentSpec(
        node_count=nodes, edge_count=edges, case_count=cases, run_count=10,
        disturbance=disturbance, connection=connection,
        algorithms=algorithms, master_seed=master_seed,
    )
