"""Run every experiment in configs/ through the command-line harness.

    python3 scripts/run_all.py                 # all configs, results under results/
    python3 scripts/run_all.py --only sweep_fdl check_speed --workers 8
"""

import argparse
import pathlib
import sys
import time

from fdlab.harness import main

ROOT = pathlib.Path(__file__).resolve().parent.parent


def verb_for(path: pathlib.Path) -> str:
    return path.stem.replace("_", "-")


def cli() -> int:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--configs", default=str(ROOT / "configs"))
    ap.add_argument("--out-root", default=str(ROOT / "results"))
    ap.add_argument("--only", nargs="*", help="config stems to run")
    ap.add_argument("--workers", type=int)
    args = ap.parse_args()

    paths = sorted(pathlib.Path(args.configs).glob("*.yaml"))
    if args.only:
        paths = [p for p in paths if p.stem in args.only]
    worst = 0
    for p in paths:
        argv = [verb_for(p), "--config", str(p), "--out", str(pathlib.Path(args.out_root) / p.stem)]
        if args.workers:
            argv += ["--workers", str(args.workers)]
        t0 = time.perf_counter()
        status = main(argv)
        print(f"{p.stem}: exit {status} in {time.perf_counter() - t0:.1f}s", file=sys.stderr)
        worst = max(worst, status)
    return worst


if __name__ == "__main__":
    sys.exit(cli())
