"""snl-plot: chart a sweep CSV.

Exit codes mirror the producing CLI: 0 success, 2 invalid input (including
schema violations), 3 I/O errors.
"""

from __future__ import annotations

import argparse
import sys

from .render import PlotSpec, render
from .schema import MODES, SchemaError

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="snl-plot",
        description="Render success-rate vs density curves from a sweep CSV.",
    )
    parser.add_argument("--csv", required=True, help="input sweep CSV")
    parser.add_argument("--mode", choices=MODES, default="recovery")
    parser.add_argument("--out", required=True, help="output image path")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        result = render(PlotSpec(csv_path=args.csv, out_path=args.out, mode=args.mode))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote {result.out_path} ({len(result.cells)} cells)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
