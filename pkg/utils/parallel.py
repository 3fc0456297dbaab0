"""
Ordered Parallel Map
Per-sample fan-out for sweeps and barrier checks; results keep input order
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from utils.errors import DomainError

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_threads(threads: Optional[int] = None) -> int:
    """
    Worker count: explicit value, else FRACPLAP_THREADS, else 0 (= cpu count).
    """
    if threads is None:
        raw = os.getenv('FRACPLAP_THREADS', '0')
        try:
            threads = int(raw)
        except ValueError:
            raise DomainError(f"FRACPLAP_THREADS must be an integer, got: {raw!r}")
    if threads < 0:
        raise DomainError(f"threads must be >= 0, got: {threads}")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def ordered_map(fn: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None,
                label: Optional[str] = None) -> List[R]:
    """
    Map fn over items, optionally on a thread pool.

    Args:
        fn: Pure function of one item
        items: Inputs
        threads: Worker cap (None reads FRACPLAP_THREADS, 1 runs serially)
        label: Name used in progress logs

    Returns:
        fn(item) for each item, in input order
    """
    items = list(items)
    total = len(items)
    workers = min(resolve_threads(threads), max(total, 1))
    if label:
        logger.info(f"Starting {label}: {total} items on {workers} worker(s)")

    if workers == 1:
        results = []
        for idx, item in enumerate(items, 1):
            results.append(fn(item))
            if label and idx % 10 == 0:
                logger.info(f"Progress: {idx}/{total} ({(idx/total)*100:.1f}%)")
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(fn, items))

    if label:
        logger.info(f"{label} complete: {total} items processed")
    return results
