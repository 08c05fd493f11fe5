"""Run every study with its default parameters and print timings.

    python3 scripts/run_all.py --out-dir results [--suite all] [--samples 1000000]
"""
import argparse
import time
from pathlib import Path

from zetanls import experiments as ex


def main() -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out-dir", default="results")
    p.add_argument("--suite", default="all", choices=ex.SUITES)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=int, default=42)
    args = p.parse_args()

    out = Path(args.out_dir)
    t0 = time.perf_counter()
    reports = ex.suite_reports(args.suite, seed=args.seed, samples=args.samples)
    for r in reports:
        r.write(out)
        for line in r.lines():
            print(line)
    doc = ex.summary(reports, args.suite, {"seed": args.seed, "samples": args.samples})
    (out / "summary.json").write_text(ex.dumps(doc))
    print(f"{'PASSED' if doc['passed'] else 'FAILED'} in {time.perf_counter() - t0:.1f}s -> {out}")
    return 0 if doc["passed"] else 1


if __name__ == "__main__":
    raise SystemExit(main())
