"""Standalone figure command: plotkit --csv ... --kind ... --out ..."""

from __future__ import annotations

import argparse
import sys

from . import PlotSpec, render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="plotkit", description="render anisomhd CSV artifacts")
    parser.add_argument("--csv", required=True, help="input CSV path")
    parser.add_argument("--kind", required=True, choices=("decay", "sweep"))
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--ref-slope", type=float, default=None,
                        help="reference-slope overlay (sweep only)")
    args = parser.parse_args(argv)
    try:
        result = render(PlotSpec(args.csv, args.kind, args.out,
                                 ref_slope=args.ref_slope))
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_path} ({result.n_points} points)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
