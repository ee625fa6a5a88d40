#!/usr/bin/env python3
"""Measure assumption-node vs layered e-graph sizes over nesting depth.

Runs the nested-conditional family under both encodings and prints one row
per depth: canonical node counts and their ratio. The ratio growing with
depth is the point: explicit assumption nodes multiply with every enclosing
context, layered equivalences do not.
"""

import argparse
import json
import time

from ctxsat.assume import assume_encode, nested_conditional_program
from ctxsat.dsl import parse_program


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--max-depth", type=int, default=3)
    parser.add_argument("--json", dest="json_path")
    args = parser.parse_args()

    rows = []
    print(f"{'depth':>5}  {'assume':>7}  {'layered':>8}  {'ratio':>6}  {'secs':>6}")
    for k in range(1, args.max_depth + 1):
        t0 = time.monotonic()
        cmp = assume_encode(parse_program(nested_conditional_program(k)))
        elapsed = time.monotonic() - t0
        ratio = cmp.assume_nodes / cmp.layered_nodes
        rows.append(
            {
                "depth": k,
                "assume_nodes": cmp.assume_nodes,
                "layered_nodes": cmp.layered_nodes,
                "ratio": round(ratio, 4),
            }
        )
        print(
            f"{k:>5}  {cmp.assume_nodes:>7}  {cmp.layered_nodes:>8}  "
            f"{ratio:>6.3f}  {elapsed:>6.2f}"
        )
    if args.json_path:
        with open(args.json_path, "w") as fh:
            json.dump(rows, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
