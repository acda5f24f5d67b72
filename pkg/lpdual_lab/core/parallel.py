"""
Concurrent execution of independent solves (multi-starts, sweeps, chains).
"""
import asyncio
from typing import Any, Callable, Dict, Optional, Tuple

from .logger import get_logger

logger = get_logger(__name__)

Job = Callable[[], Any]


async def _run_single_job(name: str, job: Job) -> Tuple[str, Any, Optional[Exception]]:
    """
    Run one synchronous job in the default executor.

    Returns:
        Tuple of (name, result, error)
    """
    try:
        loop = asyncio.get_running_loop()
        result = await loop.run_in_executor(None, job)
        return name, result, None
    except Exception as e:
        logger.error(f"Job {name} failed: {e}")
        return name, None, e


async def run_jobs_parallel_with_errors(
    jobs: Dict[str, Job],
) -> Tuple[Dict[str, Any], Dict[str, Exception]]:
    """
    Run jobs concurrently and return both results and errors.

    Results are keyed by job name in submission order, so downstream
    reductions are independent of completion order.

    Returns:
        (results, errors)
        - results maps name -> result (only for successful jobs)
        - errors maps name -> exception (only for failed jobs)
    """
    if not jobs:
        return {}, {}

    tasks = [_run_single_job(name, job) for name, job in jobs.items()]
    gathered = await asyncio.gather(*tasks, return_exceptions=True)

    results: Dict[str, Any] = {}
    errors: Dict[str, Exception] = {}
    for item in gathered:
        if isinstance(item, Exception):
            logger.error(f"Task failed with exception: {item}")
            continue
        name, result, error = item
        if error is not None:
            errors[name] = error
        else:
            results[name] = result
    ordered = {name: results[name] for name in jobs if name in results}
    return ordered, errors


def run_jobs(jobs: Dict[str, Job]) -> Tuple[Dict[str, Any], Dict[str, Exception]]:
    """Synchronous entry point for run_jobs_parallel_with_errors."""
    return asyncio.run(run_jobs_parallel_with_errors(jobs))
