"""Loader for bergman-defaults.yaml."""

from __future__ import annotations

import functools
import os

import yaml


_REPO_ROOT = os.path.abspath(os.path.join(os.path.dirname(__file__), "..", ".."))
_DEFAULTS_PATH = os.path.join(_REPO_ROOT, "bergman-defaults.yaml")


def load_defaults() -> dict:
    """Load the consolidated defaults YAML and return it as a dict.

    Raises ValueError when the file is empty, malformed, or does not parse
    to a mapping, so a broken defaults file fails at the first call instead
    of as a TypeError deep inside a computation.
    """
    with open(_DEFAULTS_PATH, "r") as f:
        data = yaml.safe_load(f)
    if not isinstance(data, dict):
        raise ValueError(
            f"{_DEFAULTS_PATH}: expected a YAML mapping at the top level, "
            f"got {type(data).__name__}"
        )
    return data


@functools.lru_cache(maxsize=1)
def settings() -> dict:
    """Cached view of load_defaults(). Call settings.cache_clear() after patching."""
    return load_defaults()


def _section(name: str) -> dict:
    data = settings()
    if name not in data:
        known = ", ".join(sorted(data))
        raise KeyError(f"unknown defaults section: {name!r} (known: {known})")
    return data[name]


def _lookup(section: str, key: str):
    values = _section(section)
    if key not in values:
        known = ", ".join(sorted(values))
        raise KeyError(f"unknown {section} key: {key!r} (known: {known})")
    return values[key]


def geometry(key: str):
    return _lookup("geometry", key)


def quadrature(key: str):
    return _lookup("quadrature", key)


def numeric(key: str):
    return _lookup("numeric", key)


def harness(key: str):
    return _lookup("harness", key)


def cli(key: str):
    return _lookup("cli", key)


def degree_cap(n: int) -> int:
    """Largest total degree allowed for a monomial basis in dimension n."""
    caps = _lookup("quadrature", "degree_caps")
    if n not in caps:
        raise KeyError(f"no degree cap for dimension {n} (known: {sorted(caps)})")
    return int(caps[n])
