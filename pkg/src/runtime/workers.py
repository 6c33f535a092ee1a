#!/usr/bin/env python3
"""
Worker-thread count shared by the hybrid sweep and the Monte-Carlo oracle
"""

import logging
import os
from typing import Optional

logger = logging.getLogger(__name__)

THREADS_ENV = "HESTON_THREADS"


def default_workers() -> int:
    """Worker count from HESTON_THREADS, else the CPU count"""
    value = os.environ.get(THREADS_ENV)
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            logger.warning(f"Ignoring invalid {THREADS_ENV}={value!r}")
    return os.cpu_count() or 1


def resolve_workers(workers: Optional[int]) -> int:
    """An explicit count wins; None falls back to default_workers()"""
    return workers if workers else default_workers()
