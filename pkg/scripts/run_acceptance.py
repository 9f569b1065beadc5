"""Run the acceptance criteria and print one PASS/FAIL line per criterion.

    python scripts/run_acceptance.py            # full scale
    python scripts/run_acceptance.py --fast 1 3 # reduced sizes, criteria 1 and 3
"""
import argparse
import sys

from slebubbles import acceptance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("numbers", nargs="*", type=int, help="criterion numbers (default: all)")
    ap.add_argument("--fast", action="store_true", help="Monte Carlo sizes / 10")
    args = ap.parse_args(argv)
    results = acceptance.run_all(fast=args.fast, only=args.numbers or None)
    failed = [r.number for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} passed" + (f", failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
