from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from loguru import logger

from ..core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], max_workers: Optional[int] = None) -> List[R]:
    """Map fn over items on a thread pool; results come back in input order"""
    work = list(items)
    workers = min(max_workers or settings.worker_count(), max(1, len(work)))
    if workers <= 1 or len(work) <= 1:
        return [fn(item) for item in work]
    logger.debug(f"Dispatching {len(work)} tasks to {workers} worker threads")
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, work))
