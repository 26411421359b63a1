"""`render <kind> <input.csv> <output.png>` entry point."""

from __future__ import annotations

import argparse
import sys

from .figures import KINDS, render
from .schemas import SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="render",
        description="Render simulator CSV outputs as figures",
    )
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("input", help="input CSV path")
    parser.add_argument("output", help="output PNG path")
    parser.add_argument("--fits", default=None,
                        help="fit-parameters CSV for distribution overlays "
                             "(default: fits.csv next to the input)")
    parser.add_argument("--column", default=None,
                        help="phase column to plot (phase_map: default mu; "
                             "gini_scan: default gini_snapshot)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        meta = render(args.kind, args.input, args.output,
                      fits=args.fits, column=args.column)
    except (SchemaError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"wrote {args.output} ({meta['points']} plotted points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
