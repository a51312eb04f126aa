#!/usr/bin/env python3
"""Run the default verification battery and write JSONL + CSV reports.

Usage: python scripts/run_battery.py [--seed N] [--out DIR]
"""

import argparse
import pathlib
import sys
import time

from plval.verify import default_battery, reports_to_jsonl, summarize_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=pathlib.Path, default=pathlib.Path("battery_out"))
    args = ap.parse_args()

    args.out.mkdir(parents=True, exist_ok=True)
    all_reports = []
    for name, thunk in default_battery(args.seed):
        t0 = time.perf_counter()
        reports = thunk()
        took = time.perf_counter() - t0
        fails = sum(1 for r in reports if r.status == "fail")
        print("%-24s %3d cases  %d failed  %.1fs" % (name, len(reports), fails, took))
        all_reports.extend(reports)

    (args.out / "reports.jsonl").write_text(reports_to_jsonl(all_reports))
    (args.out / "summary.csv").write_text(summarize_csv(all_reports))
    print(summarize_csv(all_reports))
    failures = sum(1 for r in all_reports if r.status == "fail")
    print("total: %d cases, %d failed" % (len(all_reports), failures))
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
