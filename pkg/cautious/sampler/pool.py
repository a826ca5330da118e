"""Runs independent jobs (chains, sweep configurations, enumeration ranges) in worker threads."""

import asyncio
import logging
import os
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


def default_workers() -> int:
    return max(1, min(4, os.cpu_count() or 1))


async def gather_in_chunks(jobs: Sequence[Callable[[], T]], chunk_size: int, label: str = "jobs") -> List[T]:
    """Awaits the jobs chunk by chunk; results keep the order of `jobs`."""
    results: List[T] = []
    for i in range(0, len(jobs), chunk_size):
        chunk = jobs[i : i + chunk_size]
        results.extend(await asyncio.gather(*(asyncio.to_thread(job) for job in chunk)))
        logger.debug("%s: finished %d/%d", label, len(results), len(jobs))
    return results


def run_jobs(jobs: Sequence[Callable[[], T]], workers: int | None = None, label: str = "jobs") -> List[T]:
    """Synchronous entry point; a single worker runs inline without an event loop."""
    workers = workers or default_workers()
    if workers <= 1 or len(jobs) <= 1:
        return [job() for job in jobs]
    return asyncio.run(gather_in_chunks(jobs, workers, label))
