"""@log_call decorator: one call record per public operation."""

from __future__ import annotations

import functools
import time
import traceback as tb_mod
from typing import Any, Callable, Optional, TypeVar, overload

from ptspectra.logger import Logger, get_default_logger
from ptspectra.models import DEFAULT_MAX_REPR_LENGTH, CallRecord, summarize

F = TypeVar("F", bound=Callable[..., Any])


def _module_of(func: Callable) -> str:
    return getattr(func, "__module__", "") or ""


def _build_record(
    fn: Callable,
    level: str,
    args: tuple,
    kwargs: dict,
    max_repr_length: Optional[int],
    start: float,
) -> CallRecord:
    return CallRecord(
        timestamp=CallRecord.now(),
        level=level,
        function_name=fn.__qualname__,
        module=_module_of(fn),
        args=[summarize(a, max_repr_length) for a in args],
        kwargs={k: summarize(v, max_repr_length) for k, v in kwargs.items()},
        duration_ms=round((time.perf_counter() - start) * 1000, 3),
    )


@overload
def log_call(func: F) -> F: ...


@overload
def log_call(
    *,
    level: str = "DEBUG",
    logger: Optional[Logger] = None,
    max_repr_length: Optional[int] = DEFAULT_MAX_REPR_LENGTH,
) -> Callable[[F], F]: ...


def log_call(
    func: Optional[F] = None,
    *,
    level: str = "DEBUG",
    logger: Optional[Logger] = None,
    max_repr_length: Optional[int] = DEFAULT_MAX_REPR_LENGTH,
) -> Any:
    """
    Decorator that records each call of a numerical operation.

    Can be used bare (``@log_call``) or with parameters
    (``@log_call(level="INFO")``).

    Records the qualified name, summaries of arguments and return value
    (arrays appear as shape, dtype and norm, never their contents) and the
    wall-clock duration. Records below the logger's level are not even
    built. Failures are always recorded at ``ERROR`` with the traceback,
    then re-raised unchanged.
    """

    def decorator(fn: F) -> F:
        @functools.wraps(fn)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            _logger = logger or get_default_logger()
            start = time.perf_counter()
            try:
                result = fn(*args, **kwargs)
            except Exception as exc:
                record = _build_record(fn, "ERROR", args, kwargs, max_repr_length, start)
                record.exception = str(exc)
                record.exception_type = type(exc).__name__
                record.traceback = tb_mod.format_exc()
                _logger.emit(record)
                raise
            if _logger.enabled_for(level):
                record = _build_record(fn, level.upper(), args, kwargs, max_repr_length, start)
                record.return_summary = summarize(result, max_repr_length)
                _logger.emit(record)
            return result

        return wrapper  # type: ignore[return-value]

    if func is not None:
        return decorator(func)
    return decorator
