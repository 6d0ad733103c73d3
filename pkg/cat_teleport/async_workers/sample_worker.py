# Core dependencies
import asyncio
from typing import Any, final, override

# Project dependencies
from cat_teleport.async_core.messaging import ReplyChannel
from cat_teleport.async_core.worker import AsyncWorker
from cat_teleport.sample_batch import SampleBatch, evaluate_batch


@final
class SampleWorker(AsyncWorker[SampleBatch]):
    """Evaluates Monte Carlo batches on a thread so the event loop stays free. Batches must be
    sent synchronously; the `BatchResult` is the reply. A fire-and-forget batch has nobody to
    answer and is dropped.
    """

    def __init__(self, index: int = 0) -> None:
        super().__init__(name=f"SampleWorker {index}")

    @override
    async def _initialize(self) -> None:
        pass

    @override
    async def _shutdown(self) -> None:
        pass

    @override
    async def _receive_message(self, message: SampleBatch) -> None:
        self.log_debug(f"Dropped batch {message.start}..{message.stop}: no reply channel")

    @override
    async def _receive_synchronous_message(
        self, message: SampleBatch, reply_channel: ReplyChannel[Any]
    ) -> None:
        reply_channel.reply(await asyncio.to_thread(evaluate_batch, message))
