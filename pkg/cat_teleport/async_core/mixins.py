"""Mixin classes shared by the workers and the worker pool"""

# Core dependencies
from abc import ABC, abstractmethod
import logging
from typing import final


class LoggingMixin(ABC):
    """A mixin to provide name-prefixed logging. Override `log_name` and then call
    `log_debug` to use.
    """

    @abstractmethod
    def log_name(self) -> str:
        """The logging name that the concrete implementation should override. The name
        is used in the logging message as `<log_name>: <log_message>`.
        """
        ...

    @final
    def log_debug(self, log_message: str) -> None:
        """Logs at DEBUG level to the `cat_teleport.async` logger. Coroutines and worker
        threads share this logger.
        """
        logging.getLogger("cat_teleport.async").debug(f"{self.log_name()}: {log_message}")
