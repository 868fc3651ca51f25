"""Factorization counting.

The identification pipeline is closed form: it performs a bounded,
input-independent number of matrix factorizations and no iteration to
convergence.  To make that claim testable, the linear-algebra kernels report
each factorization here; :func:`count_factorizations` collects them.

Counting is thread-local and costs one attribute lookup when inactive.
"""

from __future__ import annotations

import threading
from collections import Counter
from contextlib import contextmanager
from typing import Iterator

_active = threading.local()


def record(kind: str) -> None:
    """Record one factorization of the given kind, if a counter is active."""
    counter = getattr(_active, "counter", None)
    if counter is not None:
        counter[kind] += 1


@contextmanager
def count_factorizations() -> Iterator[Counter]:
    """Count factorizations performed inside the ``with`` block.

    Yields a ``Counter`` mapping factorization kind (``"eigh"``, ``"svd"``,
    ``"eig"``, ``"schur"``, ``"cholesky"``, ``"sylvester"``, ``"lu"``) to the
    number of calls.  Nesting restores the previous counter on exit.
    """
    counter: Counter = Counter()
    previous = getattr(_active, "counter", None)
    _active.counter = counter
    try:
        yield counter
    finally:
        _active.counter = previous
