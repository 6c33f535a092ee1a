"""Thread-count resolution"""

from .workers import THREADS_ENV, default_workers, resolve_workers

__all__ = ['THREADS_ENV', 'default_workers', 'resolve_workers']
