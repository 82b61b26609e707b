"""Command line wrapper: regret-curve figure from a benchmark CSV."""

import argparse
import sys
from pathlib import Path

import matplotlib.pyplot as plt

from .figures import PlotSpec, regret_figure, save_figure


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plot_regret.py",
        description="Render mean regret curves with dashed 5/95 quantile bands.",
    )
    parser.add_argument("--in", dest="source", required=True, metavar="CSV",
                        help="summary written by the simulator's run command")
    parser.add_argument("--out", required=True, metavar="IMG",
                        help="output image; the suffix picks the format, svg default")
    parser.add_argument("--log-y", action="store_true", help="log-scale regret axis")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = PlotSpec(
        source=Path(args.source),
        out=Path(args.out),
        title=args.title,
        log_y=args.log_y,
    )
    try:
        fig = regret_figure(spec)
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
