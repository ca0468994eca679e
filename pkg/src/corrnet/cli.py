"""Command-line driver: ``corrnet static`` and ``corrnet rolling``.

Both subcommands read a ``date,symbol,close`` price file, keep the dates on
which every selected symbol traded, and write one CSV per observable into
the output directory.  All numbers are written with 12 significant digits.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .correlation import (
    correlation_matrix,
    correlation_variance,
    mean_correlation,
    window_ends,
)
from .errors import DataError, NumericalError
from .netstruct import (
    NodeTable,
    SpanningTree,
    betweenness_count,
    distance_matrix,
    mean_occupation_layer,
    mst_prim,
    node_table,
    strengths,
)
from .spectral import (
    eigendecompose,
    fraction_outside_rmt,
    normalized_largest_eigenvalue,
    rmt_bounds,
)
from .timeseries import ReturnMatrix, align_common_dates, log_returns, parse_prices

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3
GRAPH_FORMATS = ("dot", "edgelist")


class UsageError(Exception):
    pass


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.12g}"


@dataclass(frozen=True)
class AnalysisConfig:
    input: Path
    out: Path
    symbols: tuple[str, ...] | None = None
    date_from: str | None = None
    date_to: str | None = None
    window: int | None = None
    step: int = 1
    shift: int = 7
    graph_format: str = "dot"
    branches: Path | None = None

    DEFAULT_WINDOW = 1000

    def __post_init__(self):
        if self.window is not None and self.window < 2:
            raise UsageError("--window must be at least 2")
        if self.step < 1:
            raise UsageError("--step must be at least 1")
        if self.shift < 0:
            raise UsageError("--shift must be non-negative")
        if self.graph_format not in GRAPH_FORMATS:
            raise UsageError(f"unknown graph format {self.graph_format!r}")

    @property
    def window_length(self) -> int:
        return self.DEFAULT_WINDOW if self.window is None else self.window


# ---------------------------------------------------------------- serialisation


def _csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_tree(
    tree: SpanningTree,
    nodes: NodeTable,
    format: str = "dot",
    branches: Mapping[str, str] | None = None,
) -> str:
    """Serialise a spanning tree with its node annotations.

    ``dot`` gives an undirected Graphviz graph whose nodes carry ``degree``,
    ``strength``, ``betweenness`` (and ``branch`` when known) and whose edges
    carry ``weight``.  ``edgelist`` gives a ``source,target,weight`` CSV.
    Edges are written sorted by node index, so equal trees give equal bytes.
    """
    if format not in GRAPH_FORMATS:
        raise UsageError(f"unknown graph format {format!r}")
    if tuple(nodes.symbols) != tree.symbols:
        raise DataError("node annotations do not match the tree's symbols")
    edges = sorted(tree.edges)
    sym = tree.symbols
    if format == "edgelist":
        return _csv_text(("source", "target", "weight"), ((sym[i], sym[j], w) for i, j, w in edges))
    branches = branches or {}
    lines = ["graph mst {"]
    for k, s in enumerate(sym):
        attrs = [
            f"degree={fmt(nodes.degree[k])}",
            f"strength={fmt(nodes.strength[k])}",
            f"betweenness={fmt(nodes.betweenness[k])}",
        ]
        if s in branches:
            attrs.append(f"branch={_quote(branches[s])}")
        lines.append(f"  {_quote(s)} [{', '.join(attrs)}];")
    for i, j, w in edges:
        lines.append(f"  {_quote(sym[i])} -- {_quote(sym[j])} [weight={fmt(w)}, label={_quote(fmt(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def parse_edgelist(text: str) -> list[tuple[str, str, float]]:
    """Read back the ``edgelist`` export."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != ["source", "target", "weight"]:
        raise DataError("edge list must start with 'source,target,weight'")
    out = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 3:
            raise DataError(f"line {lineno}: expected 3 fields")
        try:
            out.append((row[0], row[1], float(row[2])))
        except ValueError:
            raise DataError(f"line {lineno}: bad weight {row[2]!r}") from None
    return out


def read_branches(path: Path) -> dict[str, str]:
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or row[0].startswith("#"):
                continue
            if lineno == 1 and [c.strip().lower() for c in row] == ["symbol", "branch"]:
                continue
            if len(row) != 2:
                raise DataError(f"{path}:{lineno}: expected 'symbol,branch'")
            out[row[0].strip()] = row[1].strip()
    return out


def _node_rows(tree: SpanningTree, nodes: NodeTable, branches: Mapping[str, str]):
    for k, s in enumerate(tree.symbols):
        yield (
            s,
            nodes.degree[k],
            nodes.strength[k],
            nodes.betweenness[k],
            betweenness_count(tree, k),
            branches.get(s, ""),
        )


NODE_HEADER = ("symbol", "degree", "strength", "betweenness", "betweenness_pairs", "branch")


def _matrix_text(symbols: Sequence[str], values: np.ndarray) -> str:
    return _csv_text(("symbol", *symbols), ([s, *row] for s, row in zip(symbols, values)))


def _tree_files(prefix: str, tree, nodes, config: AnalysisConfig, branches) -> dict[str, str]:
    files = {
        f"{prefix}mst_edges.csv": export_tree(tree, nodes, "edgelist"),
        f"{prefix}nodes.csv": _csv_text(NODE_HEADER, _node_rows(tree, nodes, branches)),
    }
    if config.graph_format == "dot":
        files[f"{prefix}mst.dot"] = export_tree(tree, nodes, "dot", branches)
    return files


# ---------------------------------------------------------------- pipelines


def load_returns(config: AnalysisConfig) -> ReturnMatrix:
    try:
        with open(config.input, encoding="utf-8") as fh:
            table = parse_prices(fh)
    except OSError as e:
        raise DataError(f"cannot read {config.input}: {e.strerror}") from None
    table = align_common_dates(table, config.symbols)
    if config.date_from or config.date_to:
        table = table.restrict_dates(config.date_from, config.date_to)
    return log_returns(table)


def _write_all(out: Path, files: Mapping[str, str]) -> None:
    for name in sorted(files):
        path = out / name
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(files[name], encoding="utf-8", newline="\n")


def static_files(returns: ReturnMatrix, config: AnalysisConfig, branches: Mapping[str, str]) -> dict[str, str]:
    """All outputs of one full-window analysis, keyed by relative file name."""
    if config.window is not None and config.window > returns.t:
        raise DataError(f"window exceeds data: {config.window} > {returns.t} records")
    start = 0 if config.window is None else returns.t - config.window
    c = correlation_matrix(returns, (start, returns.t))
    eig = eigendecompose(c)
    bounds = rmt_bounds(c.window_length, c.n)
    dist = distance_matrix(c)
    tree = mst_prim(dist)
    nodes = node_table(dist, tree)
    w = eig.eigenvalues
    files = {
        "correlation.csv": _matrix_text(c.symbols, c.values),
        "eigenvalues.csv": _csv_text(
            ("rank", "eigenvalue", "outside_rmt"),
            ((k + 1, w[k], int(not bounds.contains(w[k]))) for k in range(len(w))),
        ),
        "rmt.csv": _csv_text(
            ("records", "series", "q", "lambda_min", "lambda_max", "fraction_outside"),
            [(c.window_length, c.n, bounds.q, bounds.lambda_min, bounds.lambda_max, fraction_outside_rmt(eig, bounds))],
        ),
        "eigenvectors.csv": _csv_text(
            ("symbol", "v1", "v2"),
            ((s, eig.eigenvectors[0, k], eig.eigenvectors[1, k] if eig.n > 1 else 0.0) for k, s in enumerate(c.symbols)),
        ),
        "distance.csv": _matrix_text(dist.symbols, dist.values),
        "window.csv": _csv_text(
            ("first_date", "last_date", "records"),
            [(returns.dates[start], returns.dates[-1], c.window_length)],
        ),
    }
    files.update(_tree_files("", tree, nodes, config, branches))
    return files


def subperiods(t_len: int, parts: int = 3) -> list[tuple[int, int]]:
    """Equal contiguous thirds of ``range(t_len)``; the remainder goes to the last part."""
    size = t_len // parts
    if size < 2:
        raise DataError(f"{t_len} records are too few to split into {parts} subperiods")
    bounds = [k * size for k in range(parts)] + [t_len]
    return list(zip(bounds[:-1], bounds[1:]))


def rolling_files(returns: ReturnMatrix, config: AnalysisConfig, branches: Mapping[str, str]) -> dict[str, str]:
    """All outputs of the moving-window analysis, keyed by relative file name."""
    dt, shift = config.window_length, config.shift
    ends = window_ends(returns.t, dt, config.step)
    sym = returns.symbols

    strength_cache: dict[int, np.ndarray] = {}

    def strength_at(end: int) -> np.ndarray:
        if end not in strength_cache:
            strength_cache[end] = strengths(distance_matrix(correlation_matrix(returns, (end - dt, end))))
        return strength_cache[end]

    mean_rows, strength_rows, layer_rows, eig_rows, vec_rows = [], [], [], [], []
    for end in ends:
        date = returns.dates[end - 1]
        c = correlation_matrix(returns, (end - dt, end))
        dist = distance_matrix(c)
        tree = mst_prim(dist)
        eig = eigendecompose(c)
        mid = strengths(dist)
        strength_cache[end] = mid
        shiftable = end - dt - shift >= 0 and end + shift <= returns.t
        if shiftable:
            band = np.vstack([strength_at(end - shift), mid, strength_at(end + shift)])
            low, high = band.min(axis=0), band.max(axis=0)
        central, layer = mean_occupation_layer(tree)

        mean_rows.append((date, mean_correlation(c), correlation_variance(c)))
        for k, s in enumerate(sym):
            strength_rows.append(
                (date, s, mid[k], fmt(low[k]) if shiftable else "", fmt(high[k]) if shiftable else "")
            )
        layer_rows.append((date, sym[central], layer))
        eig_rows.append((date, eig.eigenvalues[0], normalized_largest_eigenvalue(eig)))
        vec_rows.append((date, *eig.eigenvectors[0]))

    files = {
        "mean_correlation.csv": _csv_text(("date", "mean_correlation", "variance"), mean_rows),
        "strength.csv": _csv_text(("date", "symbol", "strength", "low", "high"), strength_rows),
        "occupation_layer.csv": _csv_text(("date", "central", "mean_occupation_layer"), layer_rows),
        "largest_eigenvalue.csv": _csv_text(("date", "largest_eigenvalue", "normalized"), eig_rows),
        "leading_eigenvector.csv": _csv_text(("date", *sym), vec_rows),
    }

    period_rows = []
    for k, (a, b) in enumerate(subperiods(returns.t), start=1):
        c = correlation_matrix(returns, (a, b))
        dist = distance_matrix(c)
        tree = mst_prim(dist)
        nodes = node_table(dist, tree)
        central, layer = mean_occupation_layer(tree)
        period_rows.append((k, returns.dates[a], returns.dates[b - 1], b - a, mean_correlation(c), sym[central], layer))
        files.update(_tree_files(f"subperiod_{k}/", tree, nodes, config, branches))
    files["subperiods.csv"] = _csv_text(
        ("period", "first_date", "last_date", "records", "mean_correlation", "central", "mean_occupation_layer"),
        period_rows,
    )
    return files


def _branches(config: AnalysisConfig) -> dict[str, str]:
    if config.branches is None:
        return {}
    try:
        return read_branches(config.branches)
    except OSError as e:
        raise DataError(f"cannot read {config.branches}: {e.strerror}") from None


def run_static(config: AnalysisConfig) -> int:
    returns = load_returns(config)
    files = static_files(returns, config, _branches(config))
    _write_all(config.out, files)
    return EXIT_OK


def run_rolling(config: AnalysisConfig) -> int:
    returns = load_returns(config)
    files = rolling_files(returns, config, _branches(config))
    _write_all(config.out, files)
    return EXIT_OK


# ---------------------------------------------------------------- entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="corrnet", description="Correlation-network analysis of daily closing prices.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, help_ in (("static", "full-period analysis"), ("rolling", "moving-window analysis")):
        p = sub.add_parser(name, help=help_)
        p.add_argument("--input", required=True, type=Path, help="price file (date,symbol,close)")
        p.add_argument("--out", required=True, type=Path, help="output directory")
        p.add_argument("--symbols", help="comma-separated symbols to keep")
        p.add_argument("--from", dest="date_from", metavar="DATE", help="first date (inclusive)")
        p.add_argument("--to", dest="date_to", metavar="DATE", help="last date (inclusive)")
        p.add_argument(
            "--window",
            type=int,
            help="window length in records (rolling default 1000; static: analyse the last N records)",
        )
        p.add_argument("--step", type=int, default=1, help="records between window ends")
        p.add_argument("--shift", type=int, default=7, help="strength errorbar shift in records")
        p.add_argument("--graph-format", choices=GRAPH_FORMATS, default="dot")
        p.add_argument("--branches", type=Path, help="CSV of symbol,branch labels")
    return parser


def config_from_args(args: argparse.Namespace) -> AnalysisConfig:
    symbols = None
    if args.symbols:
        symbols = tuple(s.strip() for s in args.symbols.split(",") if s.strip())
        if not symbols:
            raise UsageError("--symbols is empty")
    return AnalysisConfig(
        input=args.input,
        out=args.out,
        symbols=symbols,
        date_from=args.date_from,
        date_to=args.date_to,
        window=args.window,
        step=args.step,
        shift=args.shift,
        graph_format=args.graph_format,
        branches=args.branches,
    )


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = config_from_args(args)
        run = run_static if args.command == "static" else run_rolling
        return run(config)
    except UsageError as e:
        print(f"corrnet: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as e:
        print(f"corrnet: data error: {e}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as e:
        print(f"corrnet: numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
