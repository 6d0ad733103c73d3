"""Provides a generic worker class to be used inside an `asyncio` event loop.
The worker class manages initialization, running, and shutting down of whatever
it is that the worker computes.
"""

# Core dependencies
from abc import ABC, abstractmethod
from typing import Any, Generic, TypeVar, final, override

# Project dependencies
from cat_teleport.async_core.messaging import AsyncInbox, ReplyChannel
from cat_teleport.async_core.mixins import LoggingMixin


Message = TypeVar("Message")


@final
class _Stop:
    """Sentinel put on a worker's inbox to end its `run` loop"""

    def __repr__(self) -> str:
        return "<Stop>"


STOP = _Stop()


class AsyncWorker(Generic[Message], LoggingMixin, ABC):
    """A generic worker that owns an inbox of the specific generic type. Other tasks send it
    messages via `send` or `send_synchronous`; the worker processes them one at a time in
    its `run` loop. Concrete workers decide what initializing, shutting down and handling a
    message means.
    """

    def __init__(self, name: str = ""):
        self.__name = name
        self.__inbox = AsyncInbox[Message | _Stop](name=name)
        self.__is_initialized = False
        self.__is_shutdown = False
        self.__handled = 0

    @override  # for LoggingMixin
    def log_name(self) -> str:
        if self.__name:
            return f"<AsyncWorker: {self.__name}>"
        else:
            return f"{self}"

    @property
    def is_initialized(self) -> bool:
        """Indicates whether the worker has been initialized or not"""
        return self.__is_initialized

    @property
    def is_shutdown(self) -> bool:
        """Indicates whether the worker has been shutdown or not"""
        return self.__is_shutdown

    @property
    def handled(self) -> int:
        """Number of messages handled so far"""
        return self.__handled

    @abstractmethod
    async def _initialize(self) -> None:
        """Acquire whatever the worker needs before handling messages. If there is nothing
        to acquire, place `pass` in the implementation.
        """
        ...

    @abstractmethod
    async def _shutdown(self) -> None:
        """Release whatever `_initialize` acquired. Always called when `run` ends."""
        ...

    @abstractmethod
    async def _receive_message(self, message: Message) -> None:
        """Handle a fire-and-forget message"""
        ...

    @abstractmethod
    async def _receive_synchronous_message(
        self, message: Message, reply_channel: ReplyChannel[Any]
    ) -> None:
        """Handle a message whose sender waits for an answer. The override must answer
        through `reply_channel.reply`. Exceptions it raises are forwarded to the sender.
        """
        ...

    @final
    async def run(self) -> None:
        """Listen for messages until `schedule_shutdown` is called. A failure while handling
        a synchronous message is sent back to its sender and the loop keeps going; a failure
        in a fire-and-forget handler ends the loop.
        """
        try:
            await self._initialize()
            self.__is_initialized = True
            self.log_debug("Initialized")

            while True:
                message, reply_channel = await self.__inbox.read()
                if isinstance(message, _Stop):
                    break

                self.log_debug(f"Received message {message!r}")
                if reply_channel is not None:
                    try:
                        await self._receive_synchronous_message(message, reply_channel)
                    except Exception as exception:  # pylint: disable=broad-exception-caught
                        self.log_debug(f"Exception: {exception!r}")
                        reply_channel.fail(exception)
                else:
                    await self._receive_message(message)
                self.__handled += 1

        except Exception as exception:  # pylint: disable=broad-exception-caught
            self.log_debug(f"Exception: {exception!r}")
        finally:
            await self._shutdown()
            self.__is_shutdown = True
            self.log_debug("Shutdown")

    @final
    def schedule_shutdown(self) -> None:
        """Queue a stop request. Messages already in the inbox are handled first, then the
        `run` loop ends and `_shutdown` is called.
        """
        self.__inbox.send(STOP)

    @final
    def send(self, message: Message) -> None:
        """Send a fire-and-forget message to the worker"""
        self.__inbox.send(message)

    @final
    async def send_synchronous(self, message: Message) -> Any:
        """Send a message and wait for the worker's reply. It is up to the sender to know
        what type to expect back.
        """
        return await self.__inbox.send_synchronous(message)
