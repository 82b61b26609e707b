"""Command line wrapper: divergence-decay figure from a curve CSV."""

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from .figures import PlotSpec, kinf_figure, save_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_kinf.py",
        description=(
            "Scatter mean log kinf against log log n with a dashed "
            "least-squares fit and the slope written on the figure."
        ),
    )
    parser.add_argument("--in", dest="source", required=True, metavar="CSV",
                        help="curve written by the simulator's kinf command")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image; the suffix picks the format, svg default")
    parser.add_argument("--ref", type=float, default=None,
                        help="in-family kinf value, drawn as a dotted horizontal "
                             "line at its log")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.ref is not None and args.ref <= 0:
        print("error: --ref must be positive", file=sys.stderr)
        return 2
    spec = PlotSpec(
        source=Path(args.source),
        out=Path(args.out),
        title=args.title,
        y_label="mean log kinf",
        reference=args.ref,
    )
    try:
        fig = kinf_figure(spec)
        try:
            save_figure(fig, spec.out)
        finally:
            plt.close(fig)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {spec.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
