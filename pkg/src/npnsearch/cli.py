"""The ``bench`` command line interface.

Subcommands:
    run           one condition, chosen algorithms, table to stdout or a file
    paper-tables  regenerate published benchmark tables 1..18 as CSV files
    gen-data      dump simulated datasets with their ground-truth graphs

Flags may also be given in a flat key=value config file via --config;
explicit flags override file values.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bench import (
    ExperimentSpec,
    algorithm_from_name,
    derive_seed,
    render_table,
    run_condition,
    table_spec,
)
from .graph import graph_to_text, random_dag
from .semsim import dataset_to_text, parameterize, simulate

_DEFAULTS = {
    "vars": 50,
    "edges": 50,
    "samples": 1000,
    "runs": 10,
    "dist": "G",
    "func": "L",
    "algos": "PC-S,PC-L,GES-BIC-S,GES-BIC-L,PC-GES-S,PC-GES-L",
    "alpha": 0.001,
    "penalty_discount": 1.0,
    "seed": 0,
    "format": "csv",
    "out": None,
    "which": "1..18",
    "max_cond": None,
    "cell_timeout": None,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bench",
        description="Structure-search benchmark harness.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_algos):
        p.add_argument("--config", help="flat key=value file; flags override it")
        p.add_argument("--vars", type=int, help="number of variables")
        p.add_argument("--edges", type=int, help="number of true edges")
        p.add_argument("--samples", type=int, help="cases per run")
        p.add_argument("--runs", type=int, help="number of runs to average")
        p.add_argument("--dist", choices=("G", "NG1", "NG2"), help="disturbance family")
        p.add_argument("--func", choices=("L", "NL1", "NL2"), help="connection function")
        p.add_argument("--seed", type=int, help="master seed")
        if with_algos:
            p.add_argument("--algos", help="comma-separated algorithm names")
            p.add_argument("--alpha", type=float, help="PC significance level")
            p.add_argument("--penalty-discount", dest="penalty_discount", type=float,
                           help="score penalty multiplier")
            p.add_argument("--max-cond", dest="max_cond", type=int,
                           help="cap on PC conditioning set size")
            p.add_argument("--cell-timeout", dest="cell_timeout", type=float,
                           help="per-cell timeout in seconds")

    p_run = sub.add_parser("run", help="run one condition and render its table")
    common(p_run, with_algos=True)
    p_run.add_argument("--format", choices=("csv", "markdown"), help="table format")
    p_run.add_argument("--out", help="output path (default: stdout)")

    p_tab = sub.add_parser("paper-tables", help="regenerate published tables as CSV")
    p_tab.add_argument("--config", help="flat key=value file; flags override it")
    p_tab.add_argument("--which", help="table numbers, e.g. 1, 4..6, or 1..18")
    p_tab.add_argument("--seed", type=int, help="master seed")
    p_tab.add_argument("--out", help="output directory", )
    p_tab.add_argument("--cell-timeout", dest="cell_timeout", type=float,
                       help="per-cell timeout in seconds")

    p_gen = sub.add_parser("gen-data", help="dump simulated datasets and truth graphs")
    common(p_gen, with_algos=False)
    p_gen.add_argument("--out", help="output directory")
    return parser


def _load_config_file(path: str) -> dict[str, str]:
    values = {}
    for line in Path(path).read_text().splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {line!r}")
        key, value = line.split("=", 1)
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _coerce(key: str, raw: str):
    default = _DEFAULTS.get(key)
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float):
        return float(raw)
    if key in ("max_cond",):
        return int(raw)
    if key in ("cell_timeout", "alpha", "penalty_discount"):
        return float(raw)
    return raw


def _setting(args, file_values, key):
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in file_values:
        return _coerce(key, file_values[key])
    return _DEFAULTS.get(key)


def _parse_which(text: str) -> list[int]:
    out = []
    for chunk in str(text).split(","):
        chunk = chunk.strip()
        if ".." in chunk:
            lo, hi = chunk.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif chunk:
            out.append(int(chunk))
    if not out or any(not 1 <= t <= 18 for t in out):
        raise ValueError(f"table selection {text!r} must stay within 1..18")
    return out


def _build_run_spec(args, file_values) -> ExperimentSpec:
    get = lambda key: _setting(args, file_values, key)
    algorithms = tuple(
        algorithm_from_name(
            name.strip(),
            alpha=get("alpha"),
            penalty_discount=get("penalty_discount"),
            max_conditioning_size=get("max_cond"),
        )
        for name in str(get("algos")).split(",")
        if name.strip()
    )
    return ExperimentSpec(
        node_count=get("vars"),
        edge_count=get("edges"),
        case_count=get("samples"),
        run_count=get("runs"),
        disturbance=get("dist"),
        connection=get("func"),
        algorithms=algorithms,
        master_seed=get("seed"),
    )


def _report_aborts(result) -> int:
    for run, name, message in result.aborted_cells:
        print(f"aborted: run {run}, {name}: {message}", file=sys.stderr)
    return 1 if result.aborted_cells else 0


def _cmd_run(args) -> int:
    file_values = _load_config_file(args.config) if args.config else {}
    spec = _build_run_spec(args, file_values)
    result = run_condition(spec, cell_timeout=_setting(args, file_values, "cell_timeout"))
    status = _report_aborts(result)
    if not result.table:
        print("error: no cell survived", file=sys.stderr)
        return 1
    text = render_table(result.table, _setting(args, file_values, "format"))
    out = _setting(args, file_values, "out")
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)
    return status


def _cmd_paper_tables(args) -> int:
    file_values = _load_config_file(args.config) if args.config else {}
    which = _parse_which(_setting(args, file_values, "which"))
    out_dir = _setting(args, file_values, "out")
    if not out_dir:
        print("error: paper-tables requires --out DIR", file=sys.stderr)
        return 2
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    seed = _setting(args, file_values, "seed")
    timeout = _setting(args, file_values, "cell_timeout")
    status = 0
    for table in which:
        spec = table_spec(table, master_seed=seed)
        print(f"table {table}: {spec.condition_label}", file=sys.stderr)
        result = run_condition(spec, cell_timeout=timeout)
        status |= _report_aborts(result)
        if not result.table:
            print(f"error: table {table} has no surviving cells", file=sys.stderr)
            status = 1
            continue
        (out_path / f"table_{table:02d}.csv").write_text(render_table(result.table, "csv"))
    return status


def _cmd_gen_data(args) -> int:
    file_values = _load_config_file(args.config) if args.config else {}
    get = lambda key: _setting(args, file_values, key)
    out_dir = get("out")
    if not out_dir:
        print("error: gen-data requires --out DIR", file=sys.stderr)
        return 2
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    nodes, edges, cases = get("vars"), get("edges"), get("samples")
    disturbance, connection = get("dist"), get("func")
    label = f"{disturbance}/{connection}/v{nodes}/e{edges}/n{cases}"
    for r in range(get("runs")):
        run_seed = derive_seed(get("seed"), label, r)
        dag = random_dag(nodes, edges, derive_seed(run_seed, "dag"))
        model = parameterize(dag, disturbance, connection, derive_seed(run_seed, "sem"))
        data = simulate(model, cases, derive_seed(run_seed, "data"))
        (out_path / f"run{r + 1:02d}_data.tsv").write_text(dataset_to_text(data))
        (out_path / f"run{r + 1:02d}_graph.txt").write_text(graph_to_text(dag))
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "paper-tables":
            return _cmd_paper_tables(args)
        return _cmd_gen_data(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
