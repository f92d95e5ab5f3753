#!/usr/bin/env python3
# -*- coding: utf-8 -*-

"""Command-line front end.

사용 예:
  python cli_report.py fit --link logit data/karate.txt
  python cli_report.py table data/manifest.txt --out table.csv
  python cli_report.py figure --link log --link logit graph.txt --out figure.csv
  python cli_report.py sample --n 2000 --mean-degree 6 --link log --seed 7 --out graph.txt

종료 코드: 0 정상, 1 입력/설정 오류, 2 MLE 없음.
"""

from __future__ import annotations

import argparse
import csv
import io
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import orjson
from pydantic import BaseModel, ConfigDict

from certificates import certificate, check_bounds, error_report
from config import CSV_SIGNIFICANT_DIGITS, DEFAULT_TABLE_JOBS, LINK_NAMES
from data_store import FIT_SETTINGS_FILE, load_fit_settings, load_manifest, write_alpha_file
from errors import MleDivergedError, NullModelError
from estimation import calibrate_alpha, fit_mle, plugin_estimate, sample_graph
from graph_core import load_edge_list, serialize_edge_list, sparsity_stats, strip_isolated
from link_family import link_by_name
from model import FitOptions, Graph

logger = logging.getLogger(__name__)

Report = Dict[str, Dict[str, object]]


# =============================
# Rows
# =============================
class TableRow(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dataset: str
    n: int
    x_plus_plus: int
    max_degree: int
    link: str
    valid_pct: float
    scaled_l2: float
    scaled_sup: float
    converged: bool
    iterations: int


class FigurePoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    node: str
    degree: int
    link: str
    scaled_error: float


TABLE_COLUMNS = list(TableRow.model_fields)
FIGURE_COLUMNS = list(FigurePoint.model_fields)


def _fmt(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return "nan"
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.{CSV_SIGNIFICANT_DIGITS}g}"
    if isinstance(value, list):
        return ",".join(str(v) for v in value) or "-"
    return str(value)


def _csv_text(columns: Sequence[str], rows: Sequence[BaseModel]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        data = row.model_dump()
        writer.writerow([_fmt(data[c]) for c in columns])
    return buf.getvalue()


# =============================
# fit
# =============================
def build_report(name: str, g: Graph, link_name: str, opts: FitOptions, removed: Sequence[str] = ()) -> Tuple[Report, bool]:
    """Sections of the single-dataset report and whether the fit converged.

    MleDivergedError propagates to the caller.
    """
    link = link_by_name(link_name)
    stats = sparsity_stats(g)
    plug = plugin_estimate(g)
    report: Report = {
        "graph": {
            "name": name,
            "n": g.n,
            "x_plus_plus": g.total_degree,
            "edges": g.edge_count,
            "max_degree": stats.max_degree,
            "min_degree": stats.min_degree,
            "eps0": stats.eps0,
            "removed_isolated": list(removed),
        },
        "plugin": {"max_p_tilde": plug.max_p_tilde, "ll_tilde": plug.ll_tilde},
    }
    fit = fit_mle(g, link, opts)
    report["fit"] = {
        "link": link.name,
        "solver": fit.solver.value,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "score_norm": fit.final_score_norm,
        "ll_hat": fit.ll_hat,
        "start_shift": fit.start_shift,
    }
    cert = certificate(g, link)
    report["certificate"] = cert.model_dump(exclude={"lemma_constants"})
    if fit.converged:
        rep = error_report(g, link, fit, plug)
        report["errors"] = {
            "sup_err": rep.sup_err,
            "l2_err": rep.l2_err,
            "scaled_sup": rep.scaled_sup,
            "scaled_l2": rep.scaled_l2,
            "p_rel_max": rep.p_rel_max,
            "ll_rel": rep.ll_rel,
        }
        report["bounds"] = check_bounds(cert, rep).model_dump()
    return report, fit.converged


def render_report_text(report: Report) -> str:
    lines: List[str] = []
    for section, values in report.items():
        lines.append(f"[{section}]")
        for key, value in values.items():
            lines.append(f"{key} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def _load_graph(path: str, strip: bool) -> Tuple[Graph, List[str]]:
    g = load_edge_list(path)
    if strip:
        return strip_isolated(g)
    return g, []


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_fit(args: argparse.Namespace, opts: FitOptions) -> int:
    g, removed = _load_graph(args.path, args.strip_isolated)
    report, converged = build_report(Path(args.path).stem, g, args.link, opts, removed)
    if args.json:
        text = orjson.dumps(report, option=orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY).decode("utf-8") + "\n"
    else:
        text = render_report_text(report)
    _emit(text, args.out)
    if not converged:
        print(f"fit did not converge in {opts.max_iterations} iterations", file=sys.stderr)
        return 1
    return 0


# =============================
# table
# =============================
def _failed_row(dataset: str, link: str, g: Optional[Graph] = None) -> TableRow:
    nan = float("nan")
    return TableRow(
        dataset=dataset,
        n=g.n if g is not None else 0,
        x_plus_plus=g.total_degree if g is not None else 0,
        max_degree=int(g.degrees.max()) if g is not None else 0,
        link=link,
        valid_pct=nan,
        scaled_l2=nan,
        scaled_sup=nan,
        converged=False,
        iterations=0,
    )


def table_rows(dataset: str, path: Path, opts: FitOptions) -> List[TableRow]:
    try:
        g, _ = strip_isolated(load_edge_list(path))
    except (NullModelError, OSError) as exc:
        logger.warning("%s: %s", dataset, exc)
        return [_failed_row(dataset, name) for name in LINK_NAMES]

    stats = sparsity_stats(g)
    plug = plugin_estimate(g)
    rows: List[TableRow] = []
    for name in LINK_NAMES:
        link = link_by_name(name)
        row = _failed_row(dataset, name, g)
        row.valid_pct = 100.0 * stats.valid_fraction(link.c0)
        try:
            fit = fit_mle(g, link, opts)
        except NullModelError as exc:
            logger.warning("%s/%s: %s", dataset, name, exc)
            rows.append(row)
            continue
        row.converged = fit.converged
        row.iterations = fit.iterations
        if fit.converged:
            rep = error_report(g, link, fit, plug)
            row.scaled_l2 = rep.scaled_l2
            row.scaled_sup = rep.scaled_sup
        rows.append(row)
    return rows


def render_table_text(rows: Sequence[TableRow]) -> str:
    cells = [TABLE_COLUMNS] + [[_fmt(getattr(r, c)) for c in TABLE_COLUMNS] for r in rows]
    widths = [max(len(line[k]) for line in cells) for k in range(len(TABLE_COLUMNS))]
    return "".join("  ".join(v.ljust(w) for v, w in zip(line, widths)).rstrip() + "\n" for line in cells)


def run_table(manifest: Path, opts: FitOptions, jobs: int = DEFAULT_TABLE_JOBS) -> List[TableRow]:
    entries = load_manifest(manifest)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
        per_dataset = list(pool.map(lambda e: table_rows(e[0], e[1], opts), entries))
    return [row for rows in per_dataset for row in rows]


def cmd_table(args: argparse.Namespace, opts: FitOptions) -> int:
    rows = run_table(Path(args.manifest), opts, args.jobs)
    sys.stdout.write(render_table_text(rows))
    if args.out:
        Path(args.out).write_text(_csv_text(TABLE_COLUMNS, rows), encoding="utf-8")
    return 0


# =============================
# figure
# =============================
def figure_points(g: Graph, link_names: Sequence[str], opts: FitOptions) -> List[FigurePoint]:
    plug = plugin_estimate(g)
    points: List[FigurePoint] = []
    for name in link_names:
        link = link_by_name(name)
        fit = fit_mle(g, link, opts)
        rep = error_report(g, link, fit, plug)
        for i, value in enumerate(rep.per_node_scaled.tolist()):
            points.append(FigurePoint(node=g.labels[i], degree=int(rep.degrees[i]), link=name, scaled_error=value))
    return points


def cmd_figure(args: argparse.Namespace, opts: FitOptions) -> int:
    g, _ = _load_graph(args.path, args.strip_isolated)
    points = figure_points(g, args.link or list(LINK_NAMES), opts)
    _emit(_csv_text(FIGURE_COLUMNS, points), args.out)
    return 0


# =============================
# sample
# =============================
def cmd_sample(args: argparse.Namespace) -> int:
    link = link_by_name(args.link)
    alpha = calibrate_alpha(args.n, args.mean_degree, link)
    g = sample_graph(alpha, link, args.seed)
    out = Path(args.out)
    out.write_text(serialize_edge_list(g), encoding="utf-8")
    write_alpha_file(
        out.with_name(out.name + ".alpha.json"),
        {
            "link": link.name,
            "seed": args.seed,
            "n": args.n,
            "mean_degree": args.mean_degree,
            "labels": list(g.labels),
            "alpha": alpha.tolist(),
        },
    )
    logger.info("sampled %d edges on %d nodes (mean degree %.3f)", g.edge_count, g.n, g.total_degree / g.n)
    return 0


# =============================
# Arguments
# =============================
def _add_fit_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=None, help="stop when |D^-1 grad|_inf <= tol")
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--solver", choices=["exact", "precond"], default=None)
    p.add_argument("--dense-cap", type=int, default=None)
    p.add_argument("--settings", default=str(FIT_SETTINGS_FILE), help="fit settings json")


def _parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    parser = argparse.ArgumentParser(description="Degree-based null models: fit, certify, report.")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_fit = sub.add_parser("fit", help="fit one edge list and print a report")
    p_fit.add_argument("path")
    p_fit.add_argument("--link", choices=LINK_NAMES, default="logit")
    p_fit.add_argument("--out", default=None)
    p_fit.add_argument("--json", action="store_true")
    p_fit.add_argument("--strip-isolated", action="store_true")
    _add_fit_flags(p_fit)

    p_table = sub.add_parser("table", help="one row per dataset and link")
    p_table.add_argument("manifest")
    p_table.add_argument("--out", default=None, help="CSV output path")
    p_table.add_argument("--jobs", type=int, default=DEFAULT_TABLE_JOBS)
    _add_fit_flags(p_table)

    p_fig = sub.add_parser("figure", help="per-node scaled errors as CSV")
    p_fig.add_argument("path")
    p_fig.add_argument("--link", choices=LINK_NAMES, action="append")
    p_fig.add_argument("--out", default=None)
    p_fig.add_argument("--strip-isolated", action="store_true")
    _add_fit_flags(p_fig)

    p_sample = sub.add_parser("sample", help="draw a heterogeneous Bernoulli graph")
    p_sample.add_argument("--n", type=int, required=True)
    p_sample.add_argument("--mean-degree", type=float, required=True)
    p_sample.add_argument("--link", choices=LINK_NAMES, default="log")
    p_sample.add_argument("--seed", type=int, default=0)
    p_sample.add_argument("--out", required=True)

    return parser.parse_args(argv)


def _fit_options(args: argparse.Namespace) -> FitOptions:
    base = load_fit_settings(Path(args.settings))
    overrides = {
        "tolerance": args.tol,
        "max_iterations": args.max_iter,
        "solver": args.solver,
        "dense_cap": args.dense_cap,
    }
    update = {k: v for k, v in overrides.items() if v is not None}
    return FitOptions.model_validate({**base.model_dump(), **update})


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


HANDLERS = {"fit": cmd_fit, "table": cmd_table, "figure": cmd_figure}


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parse_args(argv)
    _configure_logging(args.verbose)
    try:
        if args.command == "sample":
            return cmd_sample(args)
        return HANDLERS[args.command](args, _fit_options(args))
    except MleDivergedError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (NullModelError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
