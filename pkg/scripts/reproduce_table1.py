"""Print the sensitivity comparison table at the reference operating point."""

import argparse

from catgrav.config import load_config
from catgrav.figures import run_table1


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--config", default=None, help="TOML config (default: reference point)")
    args = parser.parse_args()
    rows, text = run_table1(load_config(args.config))
    print(text)


if __name__ == "__main__":
    main()
