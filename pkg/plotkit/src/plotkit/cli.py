"""plotkit <kind> <csv> -o <img>: render simulator CSVs to figures."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .render import FigureSpec, render
from .schema import SCHEMAS, SchemaError


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="plotkit", description=__doc__)
    parser.add_argument("kind", choices=sorted(SCHEMAS))
    parser.add_argument("csv", help="input result table")
    parser.add_argument("-o", "--out", required=True, help="output image (.png/.svg/.pdf)")
    parser.add_argument("--title", default=None)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    csv_path = Path(args.csv)
    if not csv_path.exists():
        print(f"input not found: {csv_path}", file=sys.stderr)
        return 2
    spec = FigureSpec(csv_path=csv_path, kind=args.kind, out_path=Path(args.out), title=args.title)
    try:
        out = render(spec)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    print(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
