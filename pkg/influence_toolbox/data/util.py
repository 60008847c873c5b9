import logging
import os
import shutil
import tempfile
from contextlib import contextmanager
from typing import Iterator, Optional, TextIO, Union

import numpy as np

logger = logging.getLogger(__name__)

# every float written to json or csv is rounded to this many decimals
RESULT_PRECISION = 6
WORKERS_ENVIRONMENT_VARIABLE = 'INFLUENCE_TOOLBOX_WORKERS'


def round_result(value: float, precision: int = RESULT_PRECISION) -> float:
    """
    >>> round_result(4.336906993)
    4.336907
    >>> round_result(1 / 3, precision=2)
    0.33
    """
    return round(float(value), precision)


def derive_seed(master_seed: int, *keys: int) -> int:
    """
    derive an independent 64-bit seed from a master seed and a tuple of indices, so any
    cell of an experiment can be recomputed on its own.
    >>> derive_seed(7, 1, 2) == derive_seed(7, 1, 2)
    True
    >>> derive_seed(7, 1, 2) == derive_seed(7, 2, 1)
    False
    """
    if master_seed < 0 or any(key < 0 for key in keys):
        raise ValueError('seeds and seed keys must be non-negative integers')
    sequence = np.random.SeedSequence([int(master_seed), *[int(key) for key in keys]])
    return int(sequence.generate_state(1, dtype=np.uint64)[0])


def resolve_workers(workers: Optional[int] = None) -> int:
    """
    an explicit worker count wins; otherwise fall back to the environment variable, then to 1
    """
    if workers is None:
        from_environment = os.environ.get(WORKERS_ENVIRONMENT_VARIABLE)
        if from_environment is None or not from_environment.strip():
            return 1
        try:
            workers = int(from_environment)
        except ValueError:
            raise ValueError(f'{WORKERS_ENVIRONMENT_VARIABLE} must be an integer, got {from_environment!r}')
    if workers < 1:
        raise ValueError('the number of workers must be at least 1')
    return workers


@contextmanager
def atomic_write(path: Union[str, os.PathLike], mode: str = 'w') -> Iterator[TextIO]:
    """
    write to a temporary file next to path and rename it into place only if the block succeeds,
    so a failure never leaves a partial output file behind
    """
    directory = os.path.dirname(os.path.abspath(path))
    handle = tempfile.NamedTemporaryFile(mode=mode, dir=directory, delete=False,
                                         prefix='.tmp-', encoding=None if 'b' in mode else 'utf-8',
                                         newline=None if 'b' in mode else '')
    try:
        with handle:
            yield handle
        os.replace(handle.name, path)
    except BaseException:
        if os.path.exists(handle.name):
            os.remove(handle.name)
        raise


@contextmanager
def staged_directory(target: Union[str, os.PathLike]) -> Iterator[str]:
    """
    yield a scratch directory inside target; files written there are moved into target
    once the block succeeds, and discarded otherwise
    """
    os.makedirs(target, exist_ok=True)
    scratch = tempfile.mkdtemp(prefix='.staging-', dir=target)
    try:
        yield scratch
        for name in sorted(os.listdir(scratch)):
            os.replace(os.path.join(scratch, name), os.path.join(target, name))
    finally:
        shutil.rmtree(scratch, ignore_errors=True)
