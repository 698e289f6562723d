"""Isometric embeddings of triangles, simplices and finite sets into semicrosses and batons.

Every constructor re-checks its output by realizing the points and comparing
pairwise distances, so a returned spec is always an exact embedding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import CertificationError, DomainError, UnsupportedError, UsageError

DIST_TOL = 1e-12
RIGHT_TOL = 1e-9


@dataclass(frozen=True)
class SemicrossSpec:
    """Scaled semicross ``{0, l_1 e_1, ..., l_k e_k}``."""

    scalings: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.scalings or any(not s > 0 for s in self.scalings):
            raise DomainError(f"semicross scalings must be a nonempty list of positives: {self.scalings}")

    @property
    def k(self) -> int:
        return len(self.scalings)

    def points(self) -> list[tuple[float, ...]]:
        k = self.k
        pts = [tuple(0.0 for _ in range(k))]
        for i, lam in enumerate(self.scalings):
            pts.append(tuple(lam if j == i else 0.0 for j in range(k)))
        return pts


@dataclass(frozen=True)
class BatonSpec:
    """Collinear points ``0, l_1, l_1 + l_2, ...``; empty scalings is a single point."""

    scalings: tuple[float, ...]

    def __post_init__(self) -> None:
        if any(not s > 0 for s in self.scalings):
            raise DomainError(f"baton gaps must be positive: {self.scalings}")

    @property
    def k(self) -> int:
        return len(self.scalings)

    def points(self) -> list[tuple[float, ...]]:
        return [(x,) for x in itertools.accumulate(self.scalings, initial=0.0)]

    def box_points(self) -> list[tuple[float, ...]]:
        """The baton inside the k-box with sides ``l_i``: ``(l_1, ..., l_j, 0, ..., 0)``."""
        k = self.k
        return [
            tuple(self.scalings[i] if i < j else 0.0 for i in range(k)) for j in range(k + 1)
        ]


def distance(x: Sequence[float], y: Sequence[float], norm: str) -> float:
    if len(x) != len(y):
        raise UsageError(f"dimension mismatch: {len(x)} vs {len(y)}")
    if norm == "euclidean":
        return math.sqrt(sum((a - b) ** 2 for a, b in zip(x, y)))
    if norm == "manhattan":
        return sum(abs(a - b) for a, b in zip(x, y))
    raise UsageError(f"unknown norm {norm!r}")


def distance_matrix(points: Sequence[Sequence[float]], norm: str) -> list[list[float]]:
    return [[distance(p, q, norm) for q in points] for p in points]


def _check_triangle(a: float, b: float, c: float) -> None:
    if min(a, b, c) <= 0:
        raise DomainError(f"side lengths must be positive: {(a, b, c)}")
    if a + b <= c or b + c <= a or c + a <= b:
        raise DomainError(f"degenerate triangle: {(a, b, c)} violates the strict triangle inequality")


def classify_triangle(a: float, b: float, c: float) -> str:
    """One of ``right``, ``acute``, ``obtuse`` by the squared-side test."""
    _check_triangle(a, b, c)
    x, y, z = sorted((a * a, b * b, c * c))
    scale = max(z, 1.0)
    if abs(x + y - z) <= RIGHT_TOL * scale:
        return "right"
    return "acute" if x + y > z else "obtuse"


def triangle_distance_matrix(a: float, b: float, c: float) -> list[list[float]]:
    # scaled basis points P0, P1, P2 with |P0P1| = b, |P1P2| = c, |P2P0| = a
    return [[0.0, b, a], [b, 0.0, c], [a, c, 0.0]]


def euclidean_triangle_to_semicross(a: float, b: float, c: float) -> SemicrossSpec:
    """Right triangles become SC^2 of their catheti; acute ones a scaled SC^3.

    For the acute case the three non-origin points ``l_i e_i`` realize the
    sides, with ``l_i^2 + l_j^2`` equal to the corresponding squared side.
    """
    kind = classify_triangle(a, b, c)
    if kind == "obtuse":
        raise UnsupportedError(
            f"obtuse triangle {(a, b, c)}: embedding it needs additional technical propositions "
            "from Frankl and Rodl (1987) and is not supported"
        )
    if kind == "right":
        legs = sorted((a, b, c))[:2]
        spec = SemicrossSpec(tuple(legs))
        hyp = math.hypot(*legs)
        target = [[0.0, legs[0], legs[1]], [legs[0], 0.0, hyp], [legs[1], hyp, 0.0]]
        _require(validate_embedding(spec, target, "euclidean"), spec, (a, b, c))
        return spec
    spec = SemicrossSpec(
        (
            math.sqrt((a * a + b * b - c * c) / 2),
            math.sqrt((b * b + c * c - a * a) / 2),
            math.sqrt((c * c + a * a - b * b) / 2),
        )
    )
    _require(validate_embedding(spec, triangle_distance_matrix(a, b, c), "euclidean"), spec, (a, b, c))
    return spec


def manhattan_triangle_to_semicross(a: float, b: float, c: float) -> SemicrossSpec:
    """Any triangle embeds l1-isometrically into SC^3 with half-perimeter defects as scalings."""
    _check_triangle(a, b, c)
    # l0 + l1 = b, l1 + l2 = c, l2 + l0 = a
    spec = SemicrossSpec(((a + b - c) / 2, (b + c - a) / 2, (c + a - b) / 2))
    _require(validate_embedding(spec, triangle_distance_matrix(a, b, c), "manhattan"), spec, (a, b, c))
    return spec


def simplex_to_semicross(k: int, norm: str = "euclidean") -> tuple[SemicrossSpec, float]:
    """Regular k-simplex inside the (k+1)-semicross.

    Returns the semicross and the side length of the simplex formed by its
    non-origin points: ``sqrt 2`` for the Euclidean unit semicross, 1 for the
    Manhattan semicross with scalings 1/2. Dividing the Euclidean scalings by
    ``sqrt 2`` gives the unit-side simplex.
    """
    if k < 1:
        raise DomainError(f"simplex dimension must be >= 1, got {k}")
    if norm == "euclidean":
        spec, side = SemicrossSpec((1.0,) * (k + 1)), math.sqrt(2)
    elif norm == "manhattan":
        spec, side = SemicrossSpec((0.5,) * (k + 1)), 1.0
    else:
        raise UsageError(f"unknown norm {norm!r}")
    target = [[0.0 if i == j else side for j in range(k + 1)] for i in range(k + 1)]
    _require(validate_embedding(spec, target, norm), spec, ("simplex", k))
    return spec, side


def finite_set_to_grid(points: Sequence[Sequence[float]]) -> list[BatonSpec]:
    """Per coordinate, the baton through the sorted distinct coordinate values.

    The point set is then a subset of the Cartesian product of these batons
    (each baton translated to start at the smallest coordinate value).
    """
    if not points:
        raise DomainError("need at least one point")
    d = len(points[0])
    if any(len(p) != d for p in points):
        raise UsageError("points have inconsistent dimensions")
    batons, offsets = [], []
    for i in range(d):
        values = sorted({float(p[i]) for p in points})
        offsets.append(values[0])
        batons.append(BatonSpec(tuple(b - a for a, b in zip(values, values[1:]))))
    grids = [{offsets[i] + x for (x,) in batons[i].points()} for i in range(d)]
    for p in points:
        if not all(any(abs(p[i] - g) <= DIST_TOL * max(1.0, abs(g)) for g in grids[i]) for i in range(d)):
            raise CertificationError(f"point {p} is not on the computed grid")
    return batons


def validate_embedding(
    spec: SemicrossSpec | BatonSpec,
    expected: Sequence[Sequence[float]],
    norm: str,
    tol: float = DIST_TOL,
) -> bool:
    """True iff the realized points reproduce ``expected`` pairwise distances.

    For a semicross, ``expected`` may be ``(k+1) x (k+1)`` (origin included,
    origin first) or ``k x k`` (only the scaled basis points). Batons need the
    full ``(k+1) x (k+1)`` matrix. Comparison is relative to the largest
    expected distance.
    """
    pts = spec.points()
    m = len(expected)
    if any(len(row) != m for row in expected):
        raise UsageError("expected distance matrix must be square")
    if isinstance(spec, SemicrossSpec) and m == spec.k:
        pts = pts[1:]
    elif m != len(pts):
        raise UsageError(f"expected a {len(pts)}x{len(pts)} matrix, got {m}x{m}")
    scale = max(1.0, max((abs(x) for row in expected for x in row), default=0.0))
    realized = distance_matrix(pts, norm)
    return all(
        abs(realized[i][j] - expected[i][j]) <= tol * scale for i in range(m) for j in range(m)
    )


def _require(ok: bool, spec, source) -> None:
    if not ok:
        raise CertificationError(f"embedding {spec} does not reproduce {source}")
