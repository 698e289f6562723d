"""Named growth constants and the chromatic-number / sunflower bound dispatch."""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field

from . import embeddings
from .errors import DomainError, UnsupportedError, UsageError
from .rates import GrowthRate, delta

INV_PHI = (math.sqrt(5) - 1) / 2

NORMS = ("euclidean", "manhattan")
KINDS = (
    "two_point",
    "simplex",
    "semicross",
    "right_triangle",
    "acute_triangle",
    "general_triangle_manhattan",
    "baton",
    "simplex_manhattan",
)

TAGS = {
    "psi": "Theorem 1.3",
    "psi1": "Theorem 3.1",
    "psi2": "Theorem 1.1",
}


def raigorodskii_ratio(x: float) -> float:
    """``(1 + x + x^3) / (1 + x^2 + x^4)``, maximized over [0, 1] to give psi2."""
    return (1 + x + x**3) / (1 + x**2 + x**4)


def golden_section_max(f, a: float, b: float, xtol: float = 1e-9) -> tuple[float, float]:
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(argmax, max)``."""
    c = b - INV_PHI * (b - a)
    d = a + INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > xtol:
        if fc > fd:
            b, d, fd = d, c, fc
            c = b - INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + INV_PHI * (b - a)
            fd = f(d)
    x = (a + b) / 2
    return x, f(x)


def _parabolic_refine(f, x: float, h: float) -> float:
    # vertex of the parabola through (x-h, x, x+h); kept only if it does not lose
    f0, f1, f2 = f(x - h), f(x), f(x + h)
    denom = f0 - 2 * f1 + f2
    if denom >= 0:
        return x
    x_new = x + h * (f0 - f2) / (2 * denom)
    return x_new if abs(x_new - x) <= h and f(x_new) >= f1 else x


@functools.lru_cache(maxsize=None)
def psi2_argmax() -> tuple[float, float]:
    """Locate the supremum defining psi2; returns ``(argmax, psi2)``.

    Cached process-wide. ``lru_cache`` may run the search twice under a
    concurrent first call, but the result is deterministic so either value is
    the same.
    """
    x, _ = golden_section_max(raigorodskii_ratio, 0.0, 1.0, xtol=1e-10)
    x = min(max(_parabolic_refine(raigorodskii_ratio, x, 1e-5), 0.0), 1.0)
    return x, raigorodskii_ratio(x)


def named_constant(name: str) -> GrowthRate:
    """``psi`` = (1+sqrt 2)/2, ``psi1`` = (1+sqrt 3)/2, ``psi2`` = sup of the ratio above."""
    if name == "psi":
        return GrowthRate(math.log((1 + math.sqrt(2)) / 2), TAGS[name])
    if name == "psi1":
        return GrowthRate(math.log((1 + math.sqrt(3)) / 2), TAGS[name])
    if name == "psi2":
        return GrowthRate(math.log(psi2_argmax()[1]), TAGS[name])
    raise UsageError(f"unknown constant {name!r}; expected one of psi, psi1, psi2")


@dataclass(frozen=True)
class ForbiddenConfig:
    """A forbidden point configuration.

    ``k`` is the simplex dimension for ``simplex``/``simplex_manhattan`` and the
    number of scalings for ``semicross``/``baton`` (taken from ``scalings`` when
    given). Triangles carry their side lengths in ``sides``: two catheti for
    ``right_triangle``, three sides otherwise.
    """

    kind: str
    norm: str = "euclidean"
    k: int | None = None
    scalings: tuple[float, ...] = ()
    sides: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise UsageError(f"unknown configuration kind {self.kind!r}")
        if self.norm not in NORMS:
            raise UsageError(f"unknown norm {self.norm!r}")
        if self.kind == "simplex_manhattan":
            object.__setattr__(self, "norm", "manhattan")
        if self.kind == "general_triangle_manhattan":
            object.__setattr__(self, "norm", "manhattan")
        if any(not s > 0 for s in self.scalings) or any(not s > 0 for s in self.sides):
            raise DomainError("scalings and side lengths must be strictly positive")
        if self.kind in ("semicross", "baton") and self.scalings:
            if self.k is not None and self.k != len(self.scalings):
                raise UsageError(f"k={self.k} disagrees with {len(self.scalings)} scalings")
            object.__setattr__(self, "k", len(self.scalings))
        if self.kind in ("simplex", "simplex_manhattan", "semicross", "baton"):
            if self.k is None or self.k < 1:
                raise DomainError(f"{self.kind} needs k >= 1, got {self.k!r}")


def chromatic_base(config: ForbiddenConfig) -> GrowthRate:
    """Best exponential lower-bound base for ``chi(R^n, config)`` proven for this shape.

    No attempt is made to combine results; each configuration maps to exactly
    one proven bound, whose theorem tag travels with the returned rate.
    """
    kind, norm, k = config.kind, config.norm, config.k
    if norm == "euclidean":
        psi2 = named_constant("psi2")
        if kind == "two_point":
            return psi2
        if kind == "simplex":
            return psi2.power(1 / (k + 1), "Theorem 1.4")
        if kind == "semicross":
            return psi2.power(1 / k, "Theorem 1.4")
        if kind == "right_triangle":
            if len(config.sides) not in (0, 2, 3):
                raise UsageError("right_triangle takes two catheti (or three sides)")
            if len(config.sides) == 3:
                spec = embeddings.euclidean_triangle_to_semicross(*config.sides)
                if spec.k != 2:
                    raise DomainError(f"sides {config.sides} do not form a right triangle")
            return psi2.power(1 / 2, "Theorem 1.5")
        if kind == "acute_triangle":
            if config.sides:
                if len(config.sides) != 3:
                    raise UsageError("acute_triangle takes three sides")
                spec = embeddings.euclidean_triangle_to_semicross(*config.sides)
                if spec.k == 2:
                    return psi2.power(1 / 2, "Theorem 1.5")
            return psi2.power(1 / 3, "Theorem 1.5")
        raise UnsupportedError(f"no Euclidean bound for {kind!r}")

    psi1 = named_constant("psi1")
    if kind == "two_point":
        return psi1
    if kind in ("baton", "semicross"):
        return psi1.power(1 / k, "Theorem 3.2")
    if kind in ("simplex", "simplex_manhattan"):
        return psi1.power(1 / (k + 1), "Theorem 3.2")
    if kind in ("general_triangle_manhattan", "right_triangle", "acute_triangle"):
        if config.sides:
            if len(config.sides) != 3:
                raise UsageError("Manhattan triangles take three sides")
            embeddings.manhattan_triangle_to_semicross(*config.sides)
        return psi1.power(1 / 3, "Theorem 3.2")
    raise UnsupportedError(f"no Manhattan bound for {kind!r}")


def sunflower_base(k: int) -> GrowthRate:
    """Upper-bound base ``2 psi^(-1/k)`` for families without weak k-sunflowers."""
    if k < 3:
        raise DomainError(f"weak sunflowers need k >= 3, got {k}")
    psi = named_constant("psi")
    return GrowthRate(math.log(2) - psi.log_base / k, "Theorem 1.3")


def semicross_chromatic_log(n: int, k: int) -> float:
    """``n ln psi2 - ln k``: log of the finite-n semicross bound with o(1) dropped."""
    if n < 1 or k < 1:
        raise DomainError(f"need n >= 1 and k >= 1, got n={n}, k={k}")
    return n * named_constant("psi2").log_base - math.log(k)


def simplex_dimension_threshold(n: int, epsilon: float) -> int:
    """``floor((ln psi2 - epsilon) n / ln n)``: simplex dimensions still forcing chi -> inf."""
    log_psi2 = named_constant("psi2").log_base
    if n < 3:
        raise DomainError(f"need n >= 3, got {n}")
    if not (0 < epsilon < log_psi2):
        raise DomainError(f"epsilon must lie in (0, ln psi2 = {log_psi2:.6f}), got {epsilon!r}")
    return math.floor((log_psi2 - epsilon) * n / math.log(n))


def psi_from_delta() -> float:
    """psi recomputed as ``1 / delta(1/2, sqrt(2)/4)``, independent of the closed form."""
    return 1.0 / delta(0.5, math.sqrt(2) / 4)


@dataclass
class ConstantRecord:
    name: str
    rate: GrowthRate
    note: str = ""
    extra: dict = field(default_factory=dict)


def theorem_table() -> list[ConstantRecord]:
    """Every headline constant, in presentation order."""
    E, M = "euclidean", "manhattan"
    rows = [
        ConstantRecord("psi2", named_constant("psi2")),
        ConstantRecord("psi1", named_constant("psi1")),
        ConstantRecord("psi", named_constant("psi")),
        ConstantRecord("simplex k=2", chromatic_base(ForbiddenConfig("simplex", E, k=2))),
        ConstantRecord("simplex k=3", chromatic_base(ForbiddenConfig("simplex", E, k=3))),
        ConstantRecord("right triangle", chromatic_base(ForbiddenConfig("right_triangle", E))),
        ConstantRecord("acute triangle", chromatic_base(ForbiddenConfig("acute_triangle", E))),
        ConstantRecord(
            "manhattan triangle", chromatic_base(ForbiddenConfig("general_triangle_manhattan", M))
        ),
        ConstantRecord("manhattan simplex k=3", chromatic_base(ForbiddenConfig("simplex", M, k=3))),
        ConstantRecord("weak sunflower k=3", sunflower_base(3), note="upper bound"),
    ]
    return rows
