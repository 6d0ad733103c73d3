"""A fixed-size pool of `AsyncWorker`s that fans synchronous messages out and gathers the
replies back in submission order.
"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
import asyncio
from collections.abc import Callable, Sequence
from types import TracebackType
from typing import Any, Generic, TypeVar, final, override

# Project dependencies
from cat_teleport.async_core.mixins import LoggingMixin
from cat_teleport.async_core.worker import AsyncWorker
from cat_teleport.errors import InvalidParameter


Message = TypeVar("Message")


@final
class WorkerPool(Generic[Message], LoggingMixin):
    """Runs `size` workers built by `factory` as tasks on the running event loop. Use it as an
    async context manager so the workers are always shut down:

        async with WorkerPool(factory, size=4) as pool:
            replies = await pool.map(messages)
    """

    def __init__(self, factory: Callable[[int], AsyncWorker[Message]], size: int = 1) -> None:
        if size < 1:
            raise InvalidParameter(f"worker pool size must be >= 1, got {size}")
        self.__factory = factory
        self.__size = size
        self.__workers: list[AsyncWorker[Message]] = []
        self.__tasks: list[asyncio.Task[None]] = []

    @override  # for LoggingMixin
    def log_name(self) -> str:
        return f"<WorkerPool: {self.__size} workers>"

    @property
    def size(self) -> int:
        """Number of workers in the pool"""
        return self.__size

    async def start(self) -> None:
        """Create the workers and start their `run` loops"""
        self.__workers = [self.__factory(index) for index in range(self.__size)]
        self.__tasks = [
            asyncio.create_task(worker.run(), name=f"worker {index}")
            for index, worker in enumerate(self.__workers)
        ]
        self.log_debug("Started")

    async def stop(self) -> None:
        """Ask every worker to stop and wait for the `run` loops to finish"""
        for worker in self.__workers:
            worker.schedule_shutdown()
        await asyncio.gather(*self.__tasks)
        self.log_debug("Stopped")

    async def map(self, messages: Sequence[Message]) -> list[Any]:
        """Send each message synchronously to a worker, round robin, and return the replies in
        the same order as `messages`. The first failure is raised after all replies arrive.
        """
        if not self.__workers:
            raise RuntimeError("WorkerPool.map called before start")
        calls = [
            self.__workers[index % self.__size].send_synchronous(message)
            for index, message in enumerate(messages)
        ]
        replies = await asyncio.gather(*calls, return_exceptions=True)
        for reply in replies:
            if isinstance(reply, BaseException):
                raise reply
        self.log_debug(f"Gathered {len(replies)} replies")
        return list(replies)

    async def __aenter__(self) -> WorkerPool[Message]:
        await self.start()
        return self

    async def __aexit__(
        self,
        exc_type: type[BaseException] | None,
        exc: BaseException | None,
        traceback: TracebackType | None,
    ) -> None:
        await self.stop()
