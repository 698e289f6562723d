from __future__ import annotations

import math


def log_binom(n: float, k: float) -> float:
    """ln C(n, k) through lgamma; the oracle for entropy-rate asymptotics."""
    return math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
