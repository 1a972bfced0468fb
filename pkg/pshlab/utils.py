"""This module contains utility functions for logging, parallel evaluation and
report serialization."""
# pylint:disable=unspecified-encoding
import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from time import perf_counter
from typing import Any, Callable, Iterable, List, Sequence, TypeVar

import numpy as np

from . import defaults

T = TypeVar("T")

### LOGGING ###
# region
def create_logger(
    name: str,
    handlers: Iterable[logging.Handler],
    level: int = logging.DEBUG,
    message_format: str = "{asctime} {levelname} {module}/{funcName}: {message}",
) -> logging.Logger:
    """Sets up a logger instance with the provided settings.

    The given level and format will be set to all passed handlers.
    It will be ensured that all handlers are removed before the handlers are added,
    so calling this function twice (e.g. from tests and the cli) does not duplicate
    the output.

    Args:
        name (str): The name of the logger.
        handlers (Iterable[logging.Handler]): A list of handlers to connect to the logger.
        level (int, optional): The handler level. Defaults to logging.DEBUG.
        message_format (str, optional): The format string for the handlers.
            Defaults to "{asctime} {levelname} {module}/{funcName}: {message}".

    Returns:
        logging.Logger: The configured logger instance.
    """
    logger = logging.getLogger(name)

    # logger always at lowest level, only the handler levels are set by level
    logger.setLevel(logging.DEBUG)

    if logger.hasHandlers():
        logger.handlers.clear()

    formatter = logging.Formatter(message_format, style="{")

    for handler in handlers:
        handler.setFormatter(formatter)
        handler.setLevel(level)
        logger.addHandler(handler)

    return logger


class AnnotatedTimer:
    def __init__(self, logger: logging.Logger, message: Callable[[float], str]):
        """Context manager which logs the elapsed time on exit.

        Args:
            logger (logging.Logger): The logger to write to (at INFO level).
            message (Callable[[float], str]): Builds the message from the elapsed seconds.
        """
        self.logger = logger
        self.message = message
        self.start = None
        self.elapsed = None

    def __enter__(self):
        self.start = perf_counter()
        return self

    def __exit__(self, *exc_info):
        self.elapsed = perf_counter() - self.start
        self.logger.info(self.message(self.elapsed))
        return False


# endregion

### PARALLEL EVALUATION ###
# region
def chunked(items: Sequence[T], size: int) -> List[Sequence[T]]:
    return [items[i : i + size] for i in range(0, len(items), size)]


def parallel_map(
    function: Callable[[Any], T], chunks: Sequence[Any], threads: int = None
) -> List[T]:
    """Applies the function to every chunk, possibly in a thread pool.

    The results are returned in the order of the chunks regardless of the order
    in which the workers finish.

    Args:
        function (Callable): The function to apply.
        chunks (Sequence): The inputs.
        threads (int, optional): Worker count. Defaults to PSHLAB_THREADS.

    Returns:
        List: The results in input order.
    """
    threads = defaults.eval_threads(threads)
    if threads == 1 or len(chunks) <= 1:
        return [function(chunk) for chunk in chunks]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, chunks))


def map_points(
    function: Callable[[np.ndarray], np.ndarray],
    points: np.ndarray,
    chunk_size: int = 2048,
    threads: int = None,
) -> np.ndarray:
    """Evaluates a vectorized function on point chunks and concatenates the results."""
    if len(points) <= chunk_size:
        return function(points)
    parts = parallel_map(function, chunked(points, chunk_size), threads)
    return np.concatenate(parts, axis=0)


# endregion

### SERIALIZATION ###
# region
SCHEMA = "pshlab-report/1"


def _prepare(obj: Any) -> Any:
    if isinstance(obj, dict):
        return {str(k): _prepare(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_prepare(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_prepare(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, complex):
        return {"re": _prepare(obj.real), "im": _prepare(obj.imag)}
    return obj


def _encode(obj: Any, indent: str) -> str:
    if obj is None or isinstance(obj, (bool, int, str)):
        return json.dumps(obj, ensure_ascii=True)
    if isinstance(obj, float):
        return format(obj, ".17g")
    inner = indent + "  "
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(k, ensure_ascii=True)}: {_encode(v, inner)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + indent + "}"
    if isinstance(obj, list):
        if not obj:
            return "[]"
        return "[\n" + ",\n".join(inner + _encode(v, inner) for v in obj) + "\n" + indent + "]"
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable.")


def to_json(report: dict) -> str:
    """Serializes a report deterministically.

    Keys are sorted, the layout is that of json.dumps with indent=2 and floats are
    written with 17 significant digits, so identical inputs give byte-identical text.
    """
    return _encode(_prepare(report), "") + "\n"



def write_text(path: Path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n") as f:
        f.write(text)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    """Writes a table, floats with 17 significant digits."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [format(float(c), ".17g") if isinstance(c, (float, np.floating)) else c for c in row]
            )


def get_json_from_file(path: Path) -> dict:
    with open(path) as f:
        return json.load(f)


# endregion
