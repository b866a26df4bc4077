#!/usr/bin/env python3
"""Emit the sech-well tanh^n bound-family curves as CSV.

Columns: mu, n, bound value in units hbar^2/2m = 1.  The n = 1 column
coincides with the mean quantum potential of the lambda = mu eigenstate;
even n give an identically zero bound.
"""

import sys

from mvqp.cli import main

if __name__ == "__main__":
    args = ["figure1"] + sys.argv[1:]
    if not any(a.startswith("--mu") for a in sys.argv[1:]):
        args += ["--mu", "40"]
    sys.exit(main(args))
