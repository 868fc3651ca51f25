"""Command line: render figures from spec files.

    sidplots plot --spec figure.json --out output-dir/

The spec file names the kind, the input CSV, grouping, and annotation
switches; the image lands in the output directory as ``<kind>.png``.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FigureSpec, render


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sidplots", description="experiment figure rendering")
    sub = parser.add_subparsers(dest="command", required=True)
    p_plot = sub.add_parser("plot", help="render one figure from a spec file")
    p_plot.add_argument("--spec", required=True, help="figure spec JSON")
    p_plot.add_argument("--out", required=True, help="output directory")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    spec = FigureSpec.from_file(args.spec)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = render(spec, out_dir / f"{spec.kind}.png")
    print(f"wrote {result.path} ({len(result.groups)} group(s))")
    return 0


if __name__ == "__main__":
    sys.exit(main())
