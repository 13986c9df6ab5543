#!/usr/bin/env python3
"""Run every scenario with its default inputs and print the claims."""
import argparse
import sys

from modal_lab.scenarios import SCENARIOS

DEFAULTS = {
    "measurement": {"coefficients": [0.5, 0.3, 0.2]},
    "triviality": {"n": 3, "samples": 20, "seed": 0},
}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(SCENARIOS))
    args = ap.parse_args()
    ok = True
    for name in args.names:
        rep = SCENARIOS[name](**DEFAULTS.get(name, {}))
        print(f"== {name}: {rep.n_passed}/{len(rep.claims)} claims pass")
        for c in rep.claims:
            ev = ", ".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}" for k, v in c.evidence.items())
            print(f"  [{'PASS' if c.passed else 'FAIL'}] {c.description} ({ev})")
        for note in rep.notes:
            print(f"  note: {note}")
        ok &= rep.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
