import io
import json
import logging

import pytest

from monitoring.logging_config import ToolkitJsonFormatter, StructuredLogger, log_error, log_work_unit
from monitoring.metrics import MetricsManager
from monitoring.tracing import TracingManager, trace_function


@pytest.fixture
def restore_logging():
    root = logging.getLogger()
    level = root.level
    yield
    root.handlers = [handler for handler in root.handlers if not isinstance(handler.formatter, ToolkitJsonFormatter)]
    root.setLevel(level)


class TestStructuredLogger:
    def test_json_lines(self, restore_logging):
        stream = io.StringIO()
        StructuredLogger("pli-test", log_level="DEBUG", stream=stream)
        log_work_unit(logging.getLogger("harness.runner"), {"method": "notch-fixed", "trial": 0}, "ok", 0.25)

        entry = json.loads(stream.getvalue().splitlines()[-1])
        assert entry["service"] == "pli-test"
        assert entry["level"] == "INFO"
        assert entry["logger"] == "harness.runner"
        assert entry["event"] == "work_unit"
        assert entry["unit"] == {"method": "notch-fixed", "trial": 0}

    def test_errors_carry_their_type(self, restore_logging):
        stream = io.StringIO()
        StructuredLogger("pli-test", stream=stream)
        try:
            raise KeyError("missing")
        except KeyError as e:
            log_error(logging.getLogger("cli"), e, {"command": "bench"})

        entry = json.loads(stream.getvalue().splitlines()[-1])
        assert entry["level"] == "ERROR"
        assert entry["error_type"] == "KeyError"
        assert entry["context"] == {"command": "bench"}

    def test_level_filter(self, restore_logging):
        stream = io.StringIO()
        StructuredLogger("pli-test", log_level="WARNING", stream=stream)
        logging.getLogger("quiet").info("not shown")
        assert stream.getvalue() == ""


class TestMetrics:
    def test_exposition(self):
        metrics = MetricsManager("plan")
        metrics.record_work_unit("proposed-hybrid", "common", "ok", 0.2)
        metrics.record_records("synthetic", 3)
        metrics.record_error("SignalError")

        text = metrics.get_metrics().decode()
        assert 'work_units_total{method="proposed-hybrid",scenario="common",status="ok"} 1.0' in text
        assert 'records_generated_total{kind="synthetic"} 3.0' in text
        assert 'errors_total{error_type="SignalError"} 1.0' in text
        assert 'run_info{' in text

    def test_managers_do_not_share_state(self):
        first, second = MetricsManager("a"), MetricsManager("b")
        first.record_error("DataError")
        assert b"DataError" not in second.get_metrics()

    def test_textfile(self, tmp_path):
        metrics = MetricsManager("plan")
        metrics.record_work_unit("notch-fixed", "freq-dev", "error", 0.01)
        path = tmp_path / "run.prom"
        metrics.write_textfile(path)
        assert 'status="error"' in path.read_text()


class TestTracing:
    def test_disabled_spans(self):
        tracing = TracingManager("pli-test", exporter_type="none")
        with tracing.create_span("unit", {"method": "notch-fixed"}):
            pass
        tracing.shutdown()

    def test_traced_function(self):
        @trace_function
        def double(value):
            """Twice the value"""
            return 2 * value

        assert double(4) == 8
        assert double.__name__ == "double"
        assert double.__doc__ == "Twice the value"

    def test_traced_function_reraises(self):
        @trace_function
        def broken():
            raise RuntimeError("boom")

        with pytest.raises(RuntimeError, match="boom"):
            broken()
