"""JSON domain-spec files.

Complex numbers are ``[re, im]`` pairs everywhere. Recognised ``type``
values and their fields:

    disc          center, radius
    polydisc      centers, radii
    ball          center, radius
    halfplane     normal, offset             {Re(conj(a) z) < b}
    polytope      constraints: [{normal, offset}, ...]   {Re<a, z> + c < 0}
    box           center, half_re, [half_im]  (sugar for an axis-aligned polytope)
    product       left, right
    affine        base, matrix (rows of [re, im] pairs), shift
    intersection  left, right
    section       base, origin, frame (rows of [re, im] pairs)

Errors carry a dotted path to the offending field, e.g.
``domain.left.radius: expected a number``.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from bergman_probe.domains import (
    AffineImage,
    Ball,
    Disc,
    Domain,
    HalfPlane,
    Intersection,
    Polydisc,
    Polytope,
    Product,
    Section,
    box,
)
from bergman_probe.errors import BergmanError, DomainFormatError


def _complex(value, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise DomainFormatError(f"{where}: expected an [re, im] pair, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _vector(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise DomainFormatError(f"{where}: expected a non-empty list of [re, im] pairs")
    return np.array([_complex(v, f"{where}[{k}]") for k, v in enumerate(value)])


def _matrix(value, where: str) -> np.ndarray:
    if not isinstance(value, list) or not value:
        raise DomainFormatError(f"{where}: expected a list of rows")
    return np.array([_vector(row, f"{where}[{k}]") for k, row in enumerate(value)])


def _real(value, where: str) -> float:
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DomainFormatError(f"{where}: expected a number, got {value!r}")
    return float(value)


def _reals(value, where: str) -> np.ndarray:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return np.array([float(value)])
    if not isinstance(value, list) or not value:
        raise DomainFormatError(f"{where}: expected a number or a list of numbers")
    return np.array([_real(v, f"{where}[{k}]") for k, v in enumerate(value)])


def _field(data: dict, key: str, where: str):
    if key not in data:
        raise DomainFormatError(f"{where}: missing field {key!r}")
    return data[key]


def parse_domain(data, where: str = "domain") -> Domain:
    """Build a domain from the decoded JSON object."""
    if not isinstance(data, dict):
        raise DomainFormatError(f"{where}: expected an object, got {type(data).__name__}")
    kind = _field(data, "type", where)

    def f(key):
        return _field(data, key, where), f"{where}.{key}"

    try:
        if kind == "disc":
            return Disc(_complex(*f("center")), _real(*f("radius")))
        if kind == "polydisc":
            return Polydisc(_vector(*f("centers")), _reals(*f("radii")))
        if kind == "ball":
            return Ball(_vector(*f("center")), _real(*f("radius")))
        if kind == "halfplane":
            return HalfPlane(_complex(*f("normal")), _real(*f("offset")))
        if kind == "polytope":
            rows, here = f("constraints")
            if not isinstance(rows, list) or not rows:
                raise DomainFormatError(f"{here}: expected a non-empty list")
            pairs = []
            for k, row in enumerate(rows):
                item = f"{here}[{k}]"
                if not isinstance(row, dict):
                    raise DomainFormatError(f"{item}: expected an object")
                pairs.append((
                    _vector(_field(row, "normal", item), f"{item}.normal"),
                    _real(_field(row, "offset", item), f"{item}.offset"),
                ))
            return Polytope.from_constraints(pairs)
        if kind == "box":
            center = _vector(*f("center"))
            half_re = _reals(*f("half_re"))
            half_im = _reals(data["half_im"], f"{where}.half_im") if "half_im" in data else None
            return box(center, half_re, half_im)
        if kind in ("product", "intersection"):
            left = parse_domain(_field(data, "left", where), f"{where}.left")
            right = parse_domain(_field(data, "right", where), f"{where}.right")
            return Product(left, right) if kind == "product" else Intersection(left, right)
        if kind == "affine":
            base = parse_domain(_field(data, "base", where), f"{where}.base")
            return AffineImage(base, _matrix(*f("matrix")), _vector(*f("shift")))
        if kind == "section":
            base = parse_domain(_field(data, "base", where), f"{where}.base")
            return Section(base, _vector(*f("origin")), _matrix(*f("frame")))
    except BergmanError:
        raise
    except ValueError as exc:
        raise DomainFormatError(f"{where}: {exc}") from exc
    raise DomainFormatError(f"{where}: unknown domain type {kind!r}")


def load_domain(path: str) -> Domain:
    """Read and parse a domain file; OSError propagates for missing files."""
    with open(path, "r") as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise DomainFormatError(f"{path}: not valid JSON ({exc})") from exc
    return parse_domain(data)


def _pair(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def _pairs(v) -> list[list[float]]:
    return [_pair(z) for z in np.asarray(v).ravel()]


def dump_domain(domain: Domain) -> dict:
    """Inverse of parse_domain (boxes come back as general polytopes)."""
    if isinstance(domain, Disc):
        return {"type": "disc", "center": _pair(domain.center), "radius": domain.radius}
    if isinstance(domain, Polydisc):
        return {"type": "polydisc", "centers": _pairs(domain.centers),
                "radii": [float(r) for r in domain.radii]}
    if isinstance(domain, Ball):
        return {"type": "ball", "center": _pairs(domain.center), "radius": domain.radius}
    if isinstance(domain, HalfPlane):
        return {"type": "halfplane", "normal": _pair(domain.normal), "offset": domain.offset}
    if isinstance(domain, Polytope):
        return {"type": "polytope", "constraints": [
            {"normal": _pairs(a), "offset": float(c)}
            for a, c in zip(domain.normals, domain.offsets)
        ]}
    if isinstance(domain, (Product, Intersection)):
        kind = "product" if isinstance(domain, Product) else "intersection"
        return {"type": kind, "left": dump_domain(domain.left), "right": dump_domain(domain.right)}
    if isinstance(domain, AffineImage):
        return {"type": "affine", "base": dump_domain(domain.base),
                "matrix": [_pairs(row) for row in domain.matrix], "shift": _pairs(domain.shift)}
    if isinstance(domain, Section):
        return {"type": "section", "base": dump_domain(domain.base),
                "origin": _pairs(domain.origin), "frame": [_pairs(row) for row in domain.frame]}
    raise DomainFormatError(f"cannot serialize {type(domain).__name__}")


def domain_hash(domain: Domain) -> str:
    """Stable content hash of a domain (sha256 of its canonical JSON)."""
    text = json.dumps(dump_domain(domain), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
