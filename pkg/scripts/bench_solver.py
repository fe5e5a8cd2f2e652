#!/usr/bin/env python3
"""Cold- vs warm-start solve timings over a range of cut-relaxation sizes.

Usage: python scripts/bench_solver.py [--sizes 10,20,40] [--seed S]
"""

import sys

from sdpxlab.cli import main

if __name__ == "__main__":
    sys.exit(main(["bench", *sys.argv[1:]]))
