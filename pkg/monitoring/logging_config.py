"""
Structured Logging
JSON log lines for the CLI and the experiment harness. Library modules log
through logging.getLogger(__name__); only the entry point installs handlers.
"""

import logging
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from opentelemetry import trace
from pythonjsonlogger import jsonlogger

LOG_FORMAT = "%(timestamp)s %(level)s %(service)s %(logger)s %(message)s"


class ToolkitJsonFormatter(jsonlogger.JsonFormatter):
    """Adds run context and the active span to every record"""

    def __init__(self, service_name):
        super().__init__(LOG_FORMAT)
        self.service_name = service_name
        self.environment = os.getenv("ENVIRONMENT", "development")

    def add_fields(self, log_record, record, message_dict):
        super().add_fields(log_record, record, message_dict)
        log_record["timestamp"] = datetime.fromtimestamp(record.created, timezone.utc).isoformat(
            timespec="milliseconds"
        )
        log_record["level"] = record.levelname
        log_record["service"] = self.service_name
        log_record["logger"] = record.name
        log_record["source"] = f"{record.module}:{record.lineno}"
        log_record["environment"] = self.environment

        span_context = trace.get_current_span().get_span_context()
        if span_context.is_valid:
            log_record["trace_id"] = trace.format_trace_id(span_context.trace_id)
            log_record["span_id"] = trace.format_span_id(span_context.span_id)


class StructuredLogger:
    """Routes every toolkit logger to JSON handlers for one run"""

    def __init__(self, service_name, log_level=None, stream=None):
        """
        Install JSON handlers on the root logger

        Args:
            service_name: Reported as `service` on every line
            log_level: Level name (default: LOG_LEVEL env, else INFO)
            stream: Console stream (default: stderr; stdout carries CLI output)
        """
        self.service_name = service_name
        level = logging.getLevelName((log_level or os.getenv("LOG_LEVEL", "INFO")).upper())
        self.level = level if isinstance(level, int) else logging.INFO
        self.handlers = self._handlers(stream or sys.stderr)

        root = logging.getLogger()
        root.setLevel(self.level)
        root.handlers = list(self.handlers)

    def _handlers(self, stream):
        handlers = [logging.StreamHandler(stream)]
        if os.getenv("LOG_TO_FILE", "false").lower() == "true":
            log_dir = Path(os.getenv("LOG_DIR", "logs"))
            log_dir.mkdir(parents=True, exist_ok=True)
            handlers.append(logging.FileHandler(log_dir / f"{self.service_name}.log"))

        formatter = ToolkitJsonFormatter(self.service_name)
        for handler in handlers:
            handler.setLevel(self.level)
            handler.setFormatter(formatter)
        return handlers


def log_stage(logger, stage, record_id, duration=None, details=None):
    """
    One pipeline stage finished for a record

    Args:
        logger: Logger instance
        stage: synthesize, denoise, evaluate or export
        record_id: Record name or output stem
        duration: Seconds spent in the stage
        details: Extra fields
    """
    logger.info(
        f"{stage} finished for {record_id}",
        extra={"event": "stage", "stage": stage, "record_id": record_id,
               "duration_seconds": duration, "details": details or {}},
    )


def log_work_unit(logger, unit, status, duration=None):
    """Outcome of one harness work unit; `unit` holds its cell coordinates"""
    logger.info(
        f"Work unit {status}",
        extra={"event": "work_unit", "status": status, "unit": dict(unit), "duration_seconds": duration},
    )


def log_experiment_event(logger, event_type, details=None):
    logger.info(
        event_type.replace("_", " ").capitalize(),
        extra={"event": "experiment", "event_type": event_type, "details": details or {}},
    )


def log_error(logger, error, context=None):
    """
    Log a caught exception with its traceback

    Args:
        logger: Logger instance
        error: The exception
        context: Where it happened (command, work unit, file)
    """
    logger.error(
        f"{type(error).__name__}: {error}",
        exc_info=error,
        extra={"event": "error", "error_type": type(error).__name__,
               "error_message": str(error), "context": context or {}},
    )
