import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from app.config import settings

logger = logging.getLogger(__name__)

Task = TypeVar("Task")
Result = TypeVar("Result")


def fan_out(fn: Callable[[Task], Result], tasks: Sequence[Task], workers: Optional[int] = None) -> List[Result]:
    """
    Run fn over tasks and return results in task order.

    With one worker everything runs in-process; otherwise a process pool maps
    the tasks, and `fn` must be a module-level function so it can be pickled.
    """
    workers = workers or settings.WORKERS
    if workers <= 1 or len(tasks) <= 1:
        return [fn(task) for task in tasks]
    logger.info("Dispatching %d tasks to %d worker processes", len(tasks), workers)
    chunk = max(1, len(tasks) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=chunk))
