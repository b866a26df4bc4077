#!/usr/bin/env python3
"""Sweep hbar for a chosen state and emit mvqp vs linear bound as CSV.

Example: python scripts/hbar_sweep.py --state squeezed --a 2 --t 1.0
"""

import sys

from mvqp.cli import main

if __name__ == "__main__":
    sys.exit(main(["sweep"] + sys.argv[1:]))
