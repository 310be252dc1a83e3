"""Shared fixtures and dataset builders for the test suite."""

from __future__ import annotations

import pytest

from covadj import Dataset, RngStream


def make_dataset(rows):
    return Dataset([(int(t), float(x), float(y)) for t, x, y in rows])


def random_dataset(stream: int, t: int = 2, n_per: int = 10,
                   slopes=None, intercepts=None, noise: float = 1.0,
                   x_lo: float = 0.0, x_hi: float = 10.0) -> Dataset:
    """Random two-or-more treatment dataset from the package's own RNG."""
    rng = RngStream(777, stream)
    slopes = slopes or [2.0] * t
    intercepts = intercepts or [1.0] * t
    rows = []
    for tid in range(1, t + 1):
        for _ in range(n_per):
            x = rng.uniform(x_lo, x_hi)
            y = intercepts[tid - 1] + slopes[tid - 1] * x + noise * rng.normal()
            rows.append((tid, x, y))
    return Dataset(rows)


@pytest.fixture
def kw_branch3_dataset() -> Dataset:
    """Six points whose overall fit is exactly y = 1 + 2x.

    Residuals are (-2.5, -0.5, -1.5) and (1.5, 2.5, 0.5), i.e. ranks
    {1,2,3} vs {4,5,6}, and the slope gates land in the
    all-four-methods branch.
    """
    return make_dataset([
        (1, 1.0, 0.5), (1, 3.0, 6.5), (1, 5.0, 9.5),
        (2, 1.0, 4.5), (2, 3.0, 9.5), (2, 5.0, 11.5),
    ])
