#!/usr/bin/env python3
"""Regenerate the reference group files under groups/.

Usage::

    python3 scripts/make_groups.py [--out-dir groups]

Each file is the JSON form accepted by ``tsmkit.load_group`` and by the
CLI's ``--group`` option.  The script also validates every group it
writes and refuses to emit a file whose structure checks fail.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from tsmkit import (
    canonical_group,
    heisenberg_group,
    quaternionic_group,
    save_group,
    validate_group,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="groups", help="output directory")
    args = parser.parse_args(argv)

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    groups = {
        "heis1.json": heisenberg_group(1),
        "heis2.json": heisenberg_group(2),
        "quat.json": quaternionic_group(),
        "canon_1_3.json": canonical_group([1.0, 3.0]),
    }
    for name, group in groups.items():
        report = validate_group(group.U, group.n, group.m, mode=group.mode)
        if not report.passed:
            raise SystemExit(f"{name}: structure validation failed\n{report}")
        path = out / name
        save_group(group, path)
        print(f"wrote {path}  (n={group.n}, m={group.m}, mode={group.mode}, "
              f"digest={group.digest()})")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
