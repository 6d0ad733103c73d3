"""Provides a typed inbox for passing work between `asyncio` tasks"""

# Core dependencies
# The `__future__` import must be listed first. Otherwise, a `SyntaxError` is emitted.
from __future__ import annotations
import asyncio
from typing import Any, Generic, NamedTuple, TypeVar, final, override

# Project dependencies
from cat_teleport.async_core.mixins import LoggingMixin


Message = TypeVar("Message")
Reply = TypeVar("Reply")


class Envelope(NamedTuple, Generic[Message]):
    """What `AsyncInbox.read` hands back: the message plus, for synchronous sends, the
    channel the reader must answer on. `reply_channel` is `None` for fire-and-forget sends.
    """

    message: Message
    reply_channel: ReplyChannel[Any] | None


@final
class AsyncInbox(Generic[Message], LoggingMixin):
    """A typed inbox for `async` tasks. Reading blocks until a message arrives, so the
    `read` coroutine should be awaited from a task that owns the inbox.

    Messages are wrapped in an `Envelope` on the way in, which keeps synchronous sends
    unambiguous even when the message itself is a tuple.
    """

    def __init__(self, name: str = "", maxsize: int = 0) -> None:
        """The `AsyncInbox` is a wrapper over `asyncio.Queue`"""
        self.__name = name
        self.__queue: asyncio.Queue[Envelope[Message]] = asyncio.Queue(maxsize)

    @override  # for LoggingMixin
    def log_name(self) -> str:
        if self.__name:
            return f"<AsyncInbox: {self.__name}>"
        else:
            return f"{self}"

    @property
    def pending(self) -> int:
        """Number of messages waiting to be read"""
        return self.__queue.qsize()

    def send(self, message: Message) -> None:
        """Send a message immediately to the inbox without waiting for a reply"""
        self.__queue.put_nowait(Envelope(message, None))
        self.log_debug(f"<Message: {message!r}> was sent to inbox")

    async def send_synchronous(self, message: Message) -> Any:
        """Send a message and wait for the reader to answer it. If the reader answers
        with `ReplyChannel.fail`, the exception is raised here.
        """
        reply_channel = ReplyChannel[Any]()
        self.__queue.put_nowait(Envelope(message, reply_channel))
        return await reply_channel.read_reply()

    async def read(self) -> Envelope[Message]:
        """Block on the inbox until a message is received and then return it"""
        self.log_debug("Waiting for a message")
        envelope = await self.__queue.get()
        self.log_debug(f"<Message: {envelope.message!r}> was read from inbox")
        return envelope


@final
class ReplyChannel(Generic[Reply]):
    """A one-shot channel the reader of a synchronous message answers on"""

    def __init__(self) -> None:
        # Only one reply is ever put on the queue, so a maximum size of 1 is enough.
        self.__queue: asyncio.Queue[tuple[bool, Reply | BaseException]] = asyncio.Queue(1)

    def reply(self, message: Reply) -> None:
        """Reply with the message"""
        self.__queue.put_nowait((True, message))

    def fail(self, exception: BaseException) -> None:
        """Reply with an exception that the sender will re-raise"""
        self.__queue.put_nowait((False, exception))

    async def read_reply(self) -> Reply:
        """Wait for the reply. Raises the exception if the reader failed."""
        ok, payload = await self.__queue.get()
        if not ok:
            assert isinstance(payload, BaseException)
            raise payload
        return payload  # type: ignore[return-value]
