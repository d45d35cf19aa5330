#!/usr/bin/env python3
"""Run every verification suite against a list of groups and summarise.

Usage::

    python3 scripts/run_all_suites.py [--groups heisenberg:1 quaternionic]
                                      [--seed 7] [--out-dir reports]

Writes one JSON report per (group, suite) pair into ``--out-dir`` and
prints a one-line summary per run plus a final verdict.  Exit status is
0 iff every suite passed on every group.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from tsmkit.suites import SUITES, SuiteConfig, resolve_group, run_suite


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--groups",
        nargs="+",
        default=["heisenberg:1", "quaternionic"],
        help="group specs (name, name:n, or path to a JSON file)",
    )
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--out-dir", default="reports")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    all_ok = True
    for spec in args.groups:
        group = resolve_group(spec)
        tag = spec.replace(":", "").replace("/", "_").replace(".json", "")
        for suite in SUITES:
            config = SuiteConfig(suite=suite, group=group, seed=args.seed)
            report = run_suite(config)
            path = out / f"{tag}_{suite}.json"
            report.write(path, fmt="json")
            verdict = "PASS" if report.passed else "FAIL"
            print(
                f"{spec:>16s}  {suite:<10s} {verdict}  "
                f"({len(report.cases)} cases, digest {report.digest()})"
            )
            all_ok = all_ok and report.passed
    print("all suites passed" if all_ok else "SOME SUITES FAILED")
    return 0 if all_ok else 1


if __name__ == "__main__":
    raise SystemExit(main())
