#!/usr/bin/env python3
"""Run the full verification harness and write a JSON report.

Usage: python scripts/run_verify.py [--seed S] [--json report.json]
"""

import sys

from sdpxlab.cli import main

if __name__ == "__main__":
    sys.exit(main(["verify", *sys.argv[1:]]))
