import os

import numpy as np

from germforge.formal import VectorFieldParams, antiholomorphic_normal_form
from germforge.series import ANTIHOLOMORPHIC, HOLOMORPHIC, TruncatedSeries

# jet orders at which the normal-form jets are accurate enough for the
# Fatou machinery (truncation errors in the far petals scale like |z|^N)
NF_ORDER = {1: 30, 2: 40, 3: 60}


def seed() -> int:
    return int(os.environ.get("GERMFORGE_SEED", "20240611"))


def nf(k: int, b: float, order: int | None = None) -> TruncatedSeries:
    return antiholomorphic_normal_form(VectorFieldParams(k, b), order or NF_ORDER[k])


def anti(*coeffs, order=None) -> TruncatedSeries:
    c = np.zeros(order or len(coeffs), complex)
    c[: len(coeffs)] = coeffs
    return TruncatedSeries(c, ANTIHOLOMORPHIC)


def holo(*coeffs, order=None) -> TruncatedSeries:
    c = np.zeros(order or len(coeffs), complex)
    c[: len(coeffs)] = coeffs
    return TruncatedSeries(c, HOLOMORPHIC)


def random_h(rng, degree: int = 5, size: float = 0.1) -> TruncatedSeries:
    """Polynomial change of coordinates tangent to the identity."""
    c = np.zeros(degree, complex)
    c[0] = 1
    c[1:] = size * (rng.uniform(-1, 1, degree - 1) + 1j * rng.uniform(-1, 1, degree - 1)) / np.sqrt(2)
    return TruncatedSeries(c, HOLOMORPHIC)


# ----------------------------------------------------------------------
# acceptance bookkeeping: one PASS/FAIL line per criterion, printed by conftest
# ----------------------------------------------------------------------

ACCEPTANCE: dict[int, dict] = {}


class criterion:
    """Context manager recording the outcome of acceptance criterion ``n``."""

    def __init__(self, n: int, title: str):
        self.rec = ACCEPTANCE.setdefault(n, {"title": title, "status": "FAIL", "detail": ""})

    def __enter__(self) -> dict:
        return self.rec

    def __exit__(self, exc_type, exc, tb):
        self.rec["status"] = "PASS" if exc_type is None else "FAIL"
        if exc_type is not None and not self.rec["detail"]:
            self.rec["detail"] = f"{exc_type.__name__}: {exc}".splitlines()[0][:160]
        return False
