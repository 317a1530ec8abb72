"""Utilities for running independent computations in parallel."""

import logging
from collections.abc import Callable, Iterable
from typing import Any, TypeVar

from joblib import Parallel, delayed
from tqdm.auto import tqdm

log = logging.getLogger(__name__)

T = TypeVar("T")


def run_parallel(
    func: Callable[..., T],
    items: Iterable[Any],
    n_jobs: int = 1,
    *args: Any,
    progress: str | None = None,
    **kwargs: Any,
) -> list[T]:
    """Call ``func(item, *args, **kwargs)`` for every item.

    Results are returned in the order of ``items`` whatever the number of
    workers, so reductions over them are reproducible. With ``progress`` set,
    a bar with that description advances as results come back.
    """
    items = list(items)
    with tqdm(total=len(items), desc=progress, disable=None if progress else True) as bar:
        if n_jobs == 1:
            results = (func(item, *args, **kwargs) for item in items)
            return [_tick(bar, r) for r in results]
        log.debug("Dispatching %d tasks on %d workers", len(items), n_jobs)
        with Parallel(n_jobs=n_jobs, return_as="generator") as parallel:
            results = parallel(delayed(func)(item, *args, **kwargs) for item in items)
            return [_tick(bar, r) for r in results]


def _tick(bar: tqdm, result: T) -> T:
    bar.update()
    return result
