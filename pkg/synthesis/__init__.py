"""Seeded generators for synthetic AF ECG and power-line interference"""
