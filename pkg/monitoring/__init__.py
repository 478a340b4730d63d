"""Structured JSON logging, Prometheus run metrics and OpenTelemetry tracing for the CLI and harness"""
