"""
Tracing
OpenTelemetry spans around CLI commands and the pipeline entry points.
Spans are no-ops until a TracingManager installs a provider.
"""

import functools
import logging
import os

from opentelemetry import trace
from opentelemetry.sdk.resources import SERVICE_NAME, SERVICE_VERSION, Resource
from opentelemetry.sdk.trace import TracerProvider
from opentelemetry.sdk.trace.export import BatchSpanProcessor, ConsoleSpanExporter

logger = logging.getLogger(__name__)

EXPORTERS = ("none", "console", "otlp")


def _span_exporter(kind):
    if kind == "console":
        return ConsoleSpanExporter()
    # optional dependency, only needed when spans leave the process
    from opentelemetry.exporter.otlp.proto.grpc.trace_exporter import OTLPSpanExporter
    return OTLPSpanExporter(endpoint=os.getenv("OTLP_ENDPOINT", "http://localhost:4317"), insecure=True)


class TracingManager:
    """Tracer for one CLI invocation; exporter chosen by TRACE_EXPORTER"""

    def __init__(self, service_name, service_version="1.0.0", exporter_type=None):
        """
        Args:
            service_name: Resource service name
            service_version: Resource service version
            exporter_type: none, console or otlp (default: TRACE_EXPORTER env, else none)
        """
        self.service_name = service_name
        self.exporter_type = (exporter_type or os.getenv("TRACE_EXPORTER", "none")).lower()
        if self.exporter_type not in EXPORTERS:
            logger.warning(f"Unknown TRACE_EXPORTER {self.exporter_type!r}; tracing disabled")
            self.exporter_type = "none"

        self.provider = None
        if self.exporter_type != "none":
            self.provider = TracerProvider(resource=Resource.create({
                SERVICE_NAME: service_name,
                SERVICE_VERSION: service_version,
                "deployment.environment": os.getenv("ENVIRONMENT", "development"),
            }))
            self.provider.add_span_processor(BatchSpanProcessor(_span_exporter(self.exporter_type)))
            trace.set_tracer_provider(self.provider)
            logger.info(f"Tracing {service_name} to {self.exporter_type}")
        self.tracer = trace.get_tracer(service_name)

    def create_span(self, name, attributes=None):
        return self.tracer.start_as_current_span(name, attributes=attributes or {})

    def shutdown(self):
        """Flush buffered spans"""
        if self.provider is not None:
            self.provider.shutdown()


def trace_function(func):
    """
    Run the wrapped function inside a span named after it

    Exceptions are recorded on the span and re-raised.
    """
    tracer = trace.get_tracer(func.__module__)

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        with tracer.start_as_current_span(func.__qualname__):
            return func(*args, **kwargs)
    return wrapper
