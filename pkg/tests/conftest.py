import pytest

from collections import Counter

from latinlab.core import enumerate_all, parity_counts, f_of_n


@pytest.fixture(scope="session")
def n5_scan():
    """Full parity scan of all order-5 squares (shared by several criteria)."""
    import time

    start = time.time()
    nrow = Counter()
    cells = Counter()
    total = 0
    violations = 0
    for sq in enumerate_all(5):
        pt = parity_counts(sq)
        nrow[pt.n_row] += 1
        cells[pt.mod2_cell()] += 1
        if pt.total_parity() != f_of_n(5):
            violations += 1
        total += 1
    return {
        "nrow": dict(nrow),
        "cells": dict(cells),
        "total": total,
        "violations": violations,
        "elapsed": time.time() - start,
    }


@pytest.fixture(scope="session")
def n4_squares():
    return list(enumerate_all(4))
