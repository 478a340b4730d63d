"""
Run Metrics
Prometheus counters for one harness run, exported as a textfile because a
batch run has no endpoint to scrape
"""

import logging
import os

from prometheus_client import (
    CollectorRegistry, Counter, Histogram, Info, generate_latest, write_to_textfile
)

logger = logging.getLogger(__name__)

DURATION_BUCKETS = (0.01, 0.05, 0.1, 0.25, 0.5, 1.0, 2.5, 5.0, 10.0, 30.0)


class MetricsManager:
    """Per-run registry: work units, their durations, records and failures"""

    def __init__(self, run_name):
        self.run_name = run_name
        self.registry = CollectorRegistry()

        Info("run", "Experiment run", registry=self.registry).info({
            "plan": run_name,
            "version": os.getenv("SERVICE_VERSION", "1.0.0"),
            "environment": os.getenv("ENVIRONMENT", "development"),
        })
        self.work_units = Counter(
            "work_units_total", "Work units evaluated",
            ["method", "scenario", "status"], registry=self.registry,
        )
        self.work_unit_seconds = Histogram(
            "work_unit_duration_seconds", "Synthesize + denoise + evaluate time per work unit",
            ["method"], buckets=DURATION_BUCKETS, registry=self.registry,
        )
        self.records = Counter(
            "records_generated_total", "Records synthesized or ingested",
            ["kind"], registry=self.registry,
        )
        self.errors = Counter(
            "errors_total", "Failed work units by exception type",
            ["error_type"], registry=self.registry,
        )

    def record_work_unit(self, method, scenario, status, duration):
        self.work_units.labels(method=method, scenario=scenario, status=status).inc()
        self.work_unit_seconds.labels(method=method).observe(duration)

    def record_records(self, kind, count=1):
        self.records.labels(kind=kind).inc(count)

    def record_error(self, error_type):
        self.errors.labels(error_type=error_type).inc()

    def get_metrics(self):
        """Exposition-format bytes"""
        return generate_latest(self.registry)

    def write_textfile(self, path):
        """
        Write the registry for the node-exporter textfile collector

        Args:
            path: Destination .prom file (written atomically)
        """
        write_to_textfile(str(path), self.registry)
        logger.info(f"Metrics for {self.run_name} written to {path}")
