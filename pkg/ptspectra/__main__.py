"""
ptspectra CLI.

Usage:
    ptspectra scan-h3 --eps 0:0.5:0.05 --levels 5 --trunc 128
    ptspectra matrix2x2 gain --e1 0 --e2 2 --eps 0:2:0.01
    ptspectra rspe two-level --e1 0 --e2 2 --order 40
    ptspectra threshold gain --e1 0 --e2 2 --real-end 0.5 --complex-end 1.5

Can also be invoked as:
    python -m ptspectra scan-h3 ...
"""

from __future__ import annotations

import sys

from ptspectra.cli import main

if __name__ == "__main__":
    sys.exit(main())
