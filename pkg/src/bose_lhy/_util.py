from __future__ import annotations

import os


def max_workers() -> int:
    """Thread cap from ``BOSE_LHY_THREADS`` (default 1)."""
    raw = os.environ.get("BOSE_LHY_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
