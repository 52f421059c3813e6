"""Write the CSV data for every figure (or a chosen subset) into one directory."""

import argparse
import time

from catgrav.config import load_config
from catgrav.figures import FIGURE_IDS, run_figure, write_figure


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="figure_data")
    parser.add_argument("--config", default=None)
    parser.add_argument("--jobs", type=int, default=None)
    parser.add_argument("ids", nargs="*", help="figure ids (default: all)")
    args = parser.parse_args()
    unknown = sorted(set(args.ids) - set(FIGURE_IDS))
    if unknown:
        parser.error(f"unknown figure id(s) {unknown}; choose from {', '.join(FIGURE_IDS)}")
    cfg = load_config(args.config)
    for fid in args.ids or FIGURE_IDS:
        start = time.perf_counter()
        paths = write_figure(run_figure(fid, cfg, jobs=args.jobs), args.out)
        print(f"{fid}: {len(paths)} files in {time.perf_counter() - start:.1f} s")


if __name__ == "__main__":
    main()
