#!/usr/bin/env python3
"""Run every shipped corpus and summarize checks, extractions, and sizes."""

import time

from ctxsat.corpus import CORPUS_NAMES, corpus_source
from ctxsat.dsl import run_source
from ctxsat.lattice import BOTTOM


def main() -> int:
    failures = 0
    for name in CORPUS_NAMES:
        t0 = time.monotonic()
        out = run_source(corpus_source(name))
        elapsed = time.monotonic() - t0
        report = out.reports[-1]
        eg = out.engine.eg
        classes, nodes = eg.stats(BOTTOM)
        ok = sum(c.ok for c in out.checks)
        print(
            f"{name:24s} checks {ok}/{len(out.checks)}"
            f"  iters {report.iterations}{'*' if not report.saturated else ''}"
            f"  classes {classes}  nodes {nodes}  contexts {len(eg.lattice)}"
            f"  {elapsed:.2f}s"
        )
        for check in out.checks:
            if not check.ok:
                failures += 1
                print(f"    FAIL {check.name}")
        for ex in out.extracts:
            print(f"    extract {ex.term}  cost={ex.cost:g}")
    return 1 if failures else 0


if __name__ == "__main__":
    raise SystemExit(main())
