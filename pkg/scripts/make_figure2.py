#!/usr/bin/env python3
"""Emit the sech-well mean-QP vs linear-bound difference curve as CSV.

Columns: mu, mvqp, linear_bound, difference, in units hbar^2/2m = 1.
The difference is positive and decreases monotonically with mu.
"""

import sys

from mvqp.cli import main

if __name__ == "__main__":
    args = ["figure2"] + sys.argv[1:]
    if not any(a.startswith("--mu") for a in sys.argv[1:]):
        args += ["--mu", "40"]
    sys.exit(main(args))
