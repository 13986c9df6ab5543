#!/usr/bin/env python3
"""Run the seeded acceptance suite and print one line per criterion."""
import argparse
import sys

from modal_lab.verify import run_all


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=42)
    args = ap.parse_args()
    results = run_all(args.seed)
    for r in results:
        print(f"{r.line()}  [{r.seconds:.2f}s]")
    print(f"{sum(r.passed for r in results)}/{len(results)} pass, "
          f"{sum(r.seconds for r in results):.1f}s total")
    return 0 if all(r.passed for r in results) else 1


if __name__ == "__main__":
    sys.exit(main())
