"""Boundary-behaviour experiments built on the estimators.

Each experiment returns a plain dataclass holding its samples and the
outcome of its checks; ``bergman_probe.report`` turns those into rows and
``bergman_probe.cli`` into exit codes.
"""
