import logging
import multiprocessing
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Iterable, List, Optional

import django
from django.conf import settings

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    """ Result of one pooled call: either ``value`` or the raised ``error`` """
    item: Any
    value: Any = None
    error: Optional[BaseException] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _call(fn: Callable, item: Any) -> Outcome:
    try:
        return Outcome(item=item, value=fn(item))
    except Exception as e:
        logger.error(f'Pooled call failed for {item!r}: {e}')
        return Outcome(item=item, error=e)


def _setup_worker():
    django.setup()


def _executor(jobs: int, processes: bool) -> Executor:
    if not processes:
        return ThreadPoolExecutor(max_workers=jobs)
    context = multiprocessing.get_context(settings.SWEEP_START_METHOD)
    return ProcessPoolExecutor(max_workers=jobs, mp_context=context, initializer=_setup_worker)


def map_ordered(fn: Callable, items: Iterable, jobs: int = None, processes: bool = None) -> List[Outcome]:
    """
    Apply ``fn`` to every item and return the outcomes in input order.
    Exceptions are captured per item so one failing point does not abort a sweep.

    With ``processes`` (default ``SWEEP_PROCESSES``) the items go to worker
    processes, so ``fn`` and the items must pickle: pass a module-level
    function, bound with ``functools.partial`` if it needs context.
    """
    items = list(items)
    jobs = settings.SWEEP_JOBS if jobs is None else jobs
    processes = settings.SWEEP_PROCESSES if processes is None else processes
    if jobs <= 1 or len(items) <= 1:
        return [_call(fn, item) for item in items]

    logger.debug(f'Dispatching {len(items)} items to {jobs} {"processes" if processes else "threads"}')
    with _executor(jobs, processes) as executor:
        futures = [executor.submit(_call, fn, item) for item in items]
        return [future.result() for future in futures]
