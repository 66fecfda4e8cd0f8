#!/usr/bin/env python3
"""Command-line entry point.

Run from the repo root, for example:

    python main_randomize.py certify --d 2 --ensemble haar --n 4800 --eps 0.5 --seed 7 --method net
    python main_randomize.py coupon --d 64 --trials 200 --seed 3 --out data/coupon.csv --format csv

See ``python main_randomize.py <subcommand> --help`` for every flag.
"""
from __future__ import annotations

from pathlib import Path
import sys


# Ensure project root is on sys.path so that local packages (e.g. "cli")
# are importable when this file is executed as a script.
ROOT = Path(__file__).resolve().parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from cli.commands import main


if __name__ == "__main__":
    main()
