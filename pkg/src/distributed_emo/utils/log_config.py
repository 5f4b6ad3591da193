"""Logging setup for solver runs.

This module configures application-wide logging once and provides a
formatter that renders numpy arrays compactly, so diagnostics that pass
state vectors as log arguments never flood the output.
"""

import logging
import sys
from typing import Any

import numpy as np

# Elements shown before an array is elided
ARRAY_EDGE_ITEMS = 3
ARRAY_PRECISION = 6


def format_array(value: Any) -> Any:
    """Render numpy arrays and scalars as short strings.

    :param value: Any log argument
    :return: A compact string for numpy values, the value itself otherwise
    """
    if isinstance(value, np.ndarray):
        return np.array2string(
            value,
            precision=ARRAY_PRECISION,
            threshold=2 * ARRAY_EDGE_ITEMS,
            edgeitems=ARRAY_EDGE_ITEMS,
            separator=", ",
        )
    if isinstance(value, np.generic):
        return value.item()
    return value


class ArrayFormatter(logging.Formatter):
    """Formatter that compacts numpy arguments before formatting.

    :param record: Log record to format
    :type record: logging.LogRecord
    :return: Formatted log message
    :rtype: str
    """

    def format(self, record: logging.LogRecord) -> str:
        """Format log record with numpy arguments rendered compactly.

        :param record: Log record to format
        :type record: logging.LogRecord
        :return: Formatted log message
        :rtype: str
        """
        if isinstance(record.args, tuple) and record.args:
            record.args = tuple(format_array(arg) for arg in record.args)
        elif isinstance(record.args, dict):
            record.args = {
                key: format_array(arg) for key, arg in record.args.items()
            }
        try:
            record.msg = record.msg % record.args if record.args else record.msg
            record.args = None
        except (TypeError, ValueError):
            # Leave the record untouched; the base formatter reports the error
            pass
        return super().format(record)


# Global flag to track if logging has been set up
_LOGGING_CONFIGURED = False


def setup_logging(level: str = "INFO") -> None:
    """Set up application logging.

    Uses a singleton guard so repeated CLI invocations in one process
    (tests) do not stack handlers.

    :param level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
    :type level: str
    """
    global _LOGGING_CONFIGURED

    if _LOGGING_CONFIGURED:
        logging.getLogger("distributed_emo").setLevel(level.upper())
        return

    handler = logging.StreamHandler(sys.stdout)
    handler.setFormatter(
        ArrayFormatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
    )
    logging.basicConfig(
        level=getattr(logging, level.upper()),
        handlers=[handler],
        force=True,
    )
    logging.getLogger("distributed_emo").setLevel(level.upper())

    _LOGGING_CONFIGURED = True
