"""Counting applications on top of the CM torus class numbers.

CM points with level structure, connected components of complex unitary
Shimura varieties, and polarized abelian varieties in an isogeny class
with commutative endomorphism algebra.  Everything is exact arithmetic on
the class numbers h(T^{K,Q}) and h(T^K_1).
"""

from __future__ import annotations

from dataclasses import dataclass

from .torus import CMAlgebraSpec, ClassNumberReport, Overrides, class_number

__all__ = [
    "LevelData",
    "ShimuraInput",
    "IsogenyClassCounts",
    "LevelDataError",
    "NoncompactnessNotAsserted",
    "double_coset_cardinality",
    "cm_point_count",
    "shimura_components",
    "isogeny_class_counts",
]

MAXIMAL = None  # sentinel documented below; LevelData() is maximal level


class LevelDataError(ValueError):
    """Level indices incompatible with an integral double-coset count."""


class NoncompactnessNotAsserted(ValueError):
    """The component-count theorem needs G^der(R) noncompact, and the caller
    did not assert it."""


@dataclass(frozen=True)
class LevelData:
    """Indices attached to an open compact U: [T(Z^): U] and [mu_K : mu_K ∩ U].

    Defaults encode maximal level.  Index computations for non-maximal
    endomorphism orders are out of scope; callers supply them.
    """

    index_U: int = 1
    mu_index: int = 1

    def __post_init__(self) -> None:
        if self.index_U < 1 or self.mu_index < 1:
            raise ValueError("level indices must be positive")


def double_coset_cardinality(h_T: int, level: LevelData) -> int:
    """h_T * [T(Z^):U] / [mu_K : mu_K ∩ U], asserted integral."""
    if h_T < 1:
        raise ValueError("class number must be positive")
    num = h_T * level.index_U
    q, r = divmod(num, level.mu_index)
    if r:
        raise LevelDataError(
            f"inconsistent level data: {h_T} * {level.index_U} / {level.mu_index} "
            "is not an integer"
        )
    return q


def _check_mu(level: LevelData, mu_order: int) -> None:
    if mu_order % level.mu_index:
        raise LevelDataError(
            f"mu_index {level.mu_index} does not divide the torsion order {mu_order}"
        )


def _scale(value: int | tuple[int, int], level: LevelData) -> int | tuple[int, int]:
    if isinstance(value, tuple):
        return (
            double_coset_cardinality(value[0], level),
            double_coset_cardinality(value[1], level),
        )
    return double_coset_cardinality(value, level)


def cm_point_count(
    spec: CMAlgebraSpec,
    level: LevelData = LevelData(),
    overrides: Overrides | None = None,
) -> int | tuple[int, int]:
    """Number of CM points of type (K, level): the level factor times
    h(T^{K,Q}).  Intervals propagate when the class number is inexact."""
    report = class_number(spec, overrides)
    _check_mu(level, report.mu_order)
    return _scale(report.h_T, level)


@dataclass(frozen=True)
class ShimuraInput:
    """A unitary Shimura datum over a single CM field of rank n >= 2."""

    field: CMAlgebraSpec
    n: int
    level: LevelData = LevelData()
    noncompact_assertion: bool = False

    def __post_init__(self) -> None:
        if self.field.r != 1:
            raise ValueError("the Shimura component count needs a single CM field")
        if self.n < 2:
            raise ValueError("the Hermitian space must have rank >= 2")


def shimura_components(
    inp: ShimuraInput, overrides: Overrides | None = None
) -> int | tuple[int, int]:
    """|pi_0| of the complex unitary Shimura variety.

    The quotient torus is T^{K,Q} for odd n and T^{K,1} x G_m for even n,
    so the count is the level factor times h(T^{K,Q}) resp. h(T^K_1).
    """
    if not inp.noncompact_assertion:
        raise NoncompactnessNotAsserted(
            "hypothesis not asserted: G^der(R) is not compact"
        )
    report = class_number(inp.field, overrides)
    _check_mu(inp.level, report.mu_order)
    if inp.n % 2 == 0:
        return _scale(report.h_T1, inp.level)
    return _scale(report.h_T, inp.level)


@dataclass(frozen=True)
class IsogenyClassCounts:
    lambda_count: int | tuple[int, int]
    similitude_count: int | tuple[int, int]


def isogeny_class_counts(
    spec: CMAlgebraSpec,
    level_lambda: LevelData = LevelData(),
    level_similitude: LevelData = LevelData(),
    overrides: Overrides | None = None,
) -> IsogenyClassCounts:
    """Counts in an isogeny class of polarized abelian varieties whose
    endomorphism algebra is the CM algebra K: everywhere-locally-isomorphic
    classes (via h(T^K_1)) and similitude classes (via h(T^{K,Q}))."""
    report = class_number(spec, overrides)
    _check_mu(level_lambda, report.mu_order)
    _check_mu(level_similitude, report.mu_order)
    return IsogenyClassCounts(
        lambda_count=_scale(report.h_T1, level_lambda),
        similitude_count=_scale(report.h_T, level_similitude),
    )
