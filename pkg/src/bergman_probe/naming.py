"""Names shared by the harness, the reports and the CLI.

``ExperimentKind`` and ``Classification`` are the string values written
into reports, so renaming a member changes the report format.
``complex_columns`` and ``vector_label`` fix how complex data is flattened
into CSV columns and summary keys.
"""

from __future__ import annotations

from enum import Enum

import numpy as np


PROJECT = "bergman-probe"


class ExperimentKind(str, Enum):
    PATH = "path"
    CONE = "cone"
    LOCALIZATION = "localization"
    PEAK = "peak"
    IDENTITIES = "identities"


class Classification(str, Enum):
    BLOW_UP = "blow-up"
    BOUNDED = "bounded"
    INCONCLUSIVE = "inconclusive"


class Membership(str, Enum):
    INTERIOR = "interior"
    BOUNDARY = "boundary"
    EXTERIOR = "exterior"


class Source(str, Enum):
    CLOSED_FORM = "closed-form"
    COMPOSED = "composed"
    NUMERIC = "numeric"


def complex_columns(prefix: str, n: int) -> list[str]:
    """CSV column names for an n-vector: ``z1_re, z1_im, z2_re, ...``."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    cols: list[str] = []
    for k in range(1, n + 1):
        cols.append(f"{prefix}{k}_re")
        cols.append(f"{prefix}{k}_im")
    return cols


def flatten_complex(values) -> list[float]:
    """Interleave re/im parts in the order of ``complex_columns``."""
    out: list[float] = []
    for v in np.asarray(values, dtype=complex).ravel():
        out.append(float(v.real))
        out.append(float(v.imag))
    return out


def _fmt(x: float) -> str:
    return format(x, "g")


def vector_label(values) -> str:
    """Stable summary key for a probe vector, e.g. ``(1,0)`` or ``(0.7071,0.7071j)``.

    Real-only coordinates print as plain numbers; any coordinate with an
    imaginary part prints as ``re+imj``.
    """
    parts = []
    for v in np.asarray(values, dtype=complex).ravel():
        # + 0.0 folds -0.0 into 0.0
        re, im = round(float(v.real), 4) + 0.0, round(float(v.imag), 4) + 0.0
        if im == 0.0:
            parts.append(_fmt(re))
        elif re == 0.0:
            parts.append(f"{_fmt(im)}j")
        else:
            sign = "+" if im >= 0 else "-"
            parts.append(f"{_fmt(re)}{sign}{_fmt(abs(im))}j")
    return "(" + ",".join(parts) + ")"
