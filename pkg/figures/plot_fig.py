"""Render the scaling and frontier figures from bench CSVs.

The CSVs are the only interface to the numerics: everything drawn here is
a verbatim column value or a median/mean/extremum of one. Usage:

    plot_fig.py --kind {fig1|fig2} --in bench/fig1.csv --out fig1.png
"""
import argparse
import csv
import statistics
import sys
from collections import Counter, defaultdict
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)

EXPECTED_COLUMNS = ["sigma", "draw_index", "method", "highest_k", "K",
                    "log10_abs_C", "log10_max_summand", "region", "flag"]
REGION_COLORS = {"green": "#2a9d3a", "yellow": "#e0a800", "red": "#cc2222"}


@dataclass(frozen=True)
class PlotSpec:
    input_csv: str
    output_image: str
    kind: str           # "fig1" | "fig2"
    aggregation: str    # "median" | "mean"


class SchemaError(Exception):
    pass


def read_rows(path):
    """Rows as dicts, after checking the header is exactly the bench schema."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError("empty file: no header row")
        if header != EXPECTED_COLUMNS:
            missing = [c for c in EXPECTED_COLUMNS if c not in header]
            unknown = [c for c in header if c not in EXPECTED_COLUMNS]
            raise SchemaError(
                f"header does not match the bench schema: "
                f"missing {missing}, unknown {unknown}")
        rows = [dict(zip(header, r)) for r in reader]
    if not rows:
        raise SchemaError("no data rows, refusing to draw an empty figure")
    return rows


def band_regions(rows):
    """Majority region per K, for the vertical shading."""
    votes = defaultdict(Counter)
    for r in rows:
        if r["region"]:
            votes[int(r["K"])][r["region"]] += 1
    return {k: c.most_common(1)[0][0] for k, c in votes.items()}


def render_fig1(rows):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    ks_c, cs, ks_m, ms = [], [], [], []
    for r in rows:
        if r["log10_abs_C"]:
            ks_c.append(int(r["K"]))
            cs.append(float(r["log10_abs_C"]))
        if r["log10_max_summand"]:
            ks_m.append(int(r["K"]))
            ms.append(float(r["log10_max_summand"]))
    ax.scatter(ks_m, ms, s=12, color="#444444", label="log10 max |summand|")
    ax.scatter(ks_c, cs, s=12, color="#1f77b4", label="log10 |C|")
    for k, region in sorted(band_regions(rows).items()):
        ax.axvspan(k - 0.5, k + 0.5, color=REGION_COLORS[region],
                   alpha=0.15, linewidth=0)
    ax.set_xlabel("K")
    ax.set_ylabel("order of magnitude")
    ax.set_title("normalizing constant vs its summands "
                 "(bands: <8, 8-16, >16 orders lost)")
    ax.legend(loc="lower left")
    fig.tight_layout()
    return fig


def frontier_series(rows, agg):
    """Per method: sigma -> (aggregate, min, max) of highest_k over draws."""
    cells = defaultdict(list)
    for r in rows:
        cells[(r["method"], float(r["sigma"]))].append(int(r["highest_k"]))
    stat = statistics.median if agg == "median" else statistics.mean
    series = defaultdict(dict)
    for (method, sigma), ks in cells.items():
        series[method][sigma] = (stat(ks), min(ks), max(ks))
    return series


def render_fig2(rows, agg):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for method, by_sigma in sorted(frontier_series(rows, agg).items()):
        sigmas = sorted(by_sigma)
        mid = [by_sigma[s][0] for s in sigmas]
        lo = [by_sigma[s][0] - by_sigma[s][1] for s in sigmas]
        hi = [by_sigma[s][2] - by_sigma[s][0] for s in sigmas]
        ax.errorbar(sigmas, mid, yerr=[lo, hi], marker="o", capsize=3,
                    label=method)
    ax.set_xscale("log")
    ax.set_xlabel("parameter spread sigma")
    ax.set_ylabel(f"highest K matching the oracle ({agg} over draws)")
    ax.set_title("agreement frontier by method")
    ax.legend(loc="best")
    fig.tight_layout()
    return fig


def render(spec: PlotSpec):
    rows = read_rows(spec.input_csv)
    if spec.kind == "fig1":
        return render_fig1(rows)
    return render_fig2(rows, spec.aggregation)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="draw the scaling (fig1) or frontier (fig2) figure "
                    "from a bench CSV")
    parser.add_argument("--kind", required=True, choices=("fig1", "fig2"))
    parser.add_argument("--in", dest="input_csv", required=True,
                        metavar="CSV")
    parser.add_argument("--out", dest="output_image", required=True,
                        metavar="IMG")
    parser.add_argument("--agg", default="median",
                        choices=("median", "mean"))
    args = parser.parse_args(argv)
    spec = PlotSpec(input_csv=args.input_csv, output_image=args.output_image,
                    kind=args.kind, aggregation=args.agg)
    try:
        fig = render(spec)
        fig.savefig(spec.output_image)
        plt.close(fig)
    except (SchemaError, OSError, ValueError) as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
