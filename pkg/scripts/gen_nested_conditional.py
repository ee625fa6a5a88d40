#!/usr/bin/env python3
"""Regenerate the nested-conditional corpus family.

    python scripts/gen_nested_conditional.py --depth 4        # print one
    python scripts/gen_nested_conditional.py --write 1 2 3    # refresh shipped
"""

import argparse
from pathlib import Path

from ctxsat.assume import nested_conditional_program

CORPORA_DIR = Path(__file__).resolve().parent.parent / "src" / "ctxsat" / "corpora"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--depth", type=int, help="print one program to stdout")
    parser.add_argument(
        "--write", type=int, nargs="+", metavar="K",
        help="write nested-conditional-K.ctx files into the package corpora",
    )
    args = parser.parse_args()
    if args.depth:
        print(nested_conditional_program(args.depth), end="")
    if args.write:
        for k in args.write:
            path = CORPORA_DIR / f"nested-conditional-{k}.ctx"
            path.write_text(nested_conditional_program(k))
            print(f"wrote {path}")
    if not args.depth and not args.write:
        parser.error("nothing to do: pass --depth or --write")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
