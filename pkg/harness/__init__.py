"""Experiment plans, the work-unit runner, results export and the command-line surface"""
