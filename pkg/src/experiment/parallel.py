# src/experiment/parallel.py

import os
from functools import partial

import dask
from tqdm import tqdm


def default_threads() -> int:
    return os.cpu_count() or 1


def run_tasks(fn, task_args, threads: int = 1, desc: str = "tasks"):
    """
    Applies fn to every argument tuple. Results come back in submission
    order, so output does not depend on the thread count.
    """

    task_args = list(task_args)

    if threads <= 1 or len(task_args) <= 1:
        return [fn(*args) for args in tqdm(task_args, desc=desc)]

    # bind through partial so dask does not rebuild dataclass arguments
    delayed = [dask.delayed(partial(fn, *args))() for args in task_args]
    return list(dask.compute(*delayed, scheduler="threads", num_workers=int(threads)))
