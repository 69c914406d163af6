"""Factoring objectives over odd-integer bit encodings.

The factors are written as ``x = 1 + 2*x1 + 4*x2 + ...`` and
``y = 1 + 2*y1 + 4*y2 + ...`` so only odd candidates are representable.
Four objective variants are provided:

* ``EQ1``: ``N^2 (N - xy)^2 + x (x - y)^2``
* ``EQ2``: ``[N^2 (N - xy)^2 - N^2 + 2N^3 - N^4 + x (x - y)^2] / 4``
* ``SIMPLIFIED_NO_N2``: ``(N - xy)^2 - (N - 1)^2 + x (x - y)^2``
* ``SIMPLIFIED_PLAIN``: ``(N - xy)^2``
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Tuple, Union

from .boolpoly import Assignment, MultilinearPoly, VarId, VarKind


class DivisibilityViolation(ArithmeticError):
    """An EQ2 numerator coefficient was not a multiple of 4."""


class Role(enum.Enum):
    X = "x"
    Y = "y"


class Variant(str, enum.Enum):
    EQ1 = "EQ1"
    EQ2 = "EQ2"
    SIMPLIFIED_NO_N2 = "SIMPLIFIED_NO_N2"
    SIMPLIFIED_PLAIN = "SIMPLIFIED_PLAIN"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class OddEncoding:
    """``value = 1 + sum(2**i * bit_i for i in 1..num_bits)``."""

    role: Role
    num_bits: int

    def __post_init__(self):
        if self.num_bits < 1:
            raise ValueError("num_bits must be positive")

    @property
    def kind(self) -> VarKind:
        return VarKind.X if self.role is Role.X else VarKind.Y

    @property
    def variables(self) -> Tuple[VarId, ...]:
        return tuple(VarId(self.kind, i) for i in range(1, self.num_bits + 1))

    @property
    def max_value(self) -> int:
        return 2 ** (self.num_bits + 1) - 1

    def poly(self) -> MultilinearPoly:
        terms = {(): 1}
        terms.update({(v,): 2 ** v.index for v in self.variables})
        return MultilinearPoly(terms)

    def encode(self, value: int) -> Dict[VarId, int]:
        if value % 2 == 0 or not 1 <= value <= self.max_value:
            raise ValueError(
                f"{value} is not an odd integer in [1, {self.max_value}]"
            )
        return {v: (value >> v.index) & 1 for v in self.variables}

    def decode(self, assignment: Assignment) -> int:
        value = 1
        for v in self.variables:
            try:
                bit = assignment[v]
            except KeyError:
                raise KeyError(f"assignment has no value for {v}") from None
            value += int(bit) << v.index
        return value


@dataclass(frozen=True)
class ProblemSpec:
    n: int
    x_bits: int = 4
    y_bits: int = 4
    variant: Variant = Variant.EQ2

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant(self.variant))
        if self.n < 3 or self.n % 2 == 0:
            raise ValueError(f"n must be an odd integer >= 3, got {self.n}")
        if self.x_bits < 1 or self.y_bits < 1:
            raise ValueError("bit widths must be positive")

    @property
    def x_encoding(self) -> OddEncoding:
        return OddEncoding(Role.X, self.x_bits)

    @property
    def y_encoding(self) -> OddEncoding:
        return OddEncoding(Role.Y, self.y_bits)

    @property
    def variables(self) -> Tuple[VarId, ...]:
        return self.x_encoding.variables + self.y_encoding.variables

    def encode(self, x: int, y: int) -> Dict[VarId, int]:
        bits = self.x_encoding.encode(x)
        bits.update(self.y_encoding.encode(y))
        return bits

    def to_config(self) -> Dict[str, str]:
        return {
            "n": str(self.n),
            "x_bits": str(self.x_bits),
            "y_bits": str(self.y_bits),
            "variant": self.variant.value,
        }

    @classmethod
    def from_config(cls, cfg: Mapping[str, str]) -> "ProblemSpec":
        return cls(
            n=int(cfg["n"]),
            x_bits=int(cfg.get("x_bits", 4)),
            y_bits=int(cfg.get("y_bits", 4)),
            variant=Variant(cfg.get("variant", "EQ2")),
        )


def preset_3x4(n: int, variant: Variant = Variant.EQ2) -> ProblemSpec:
    """Three x bits and four y bits, the small configuration that factors 15 and 35."""
    return ProblemSpec(n, x_bits=3, y_bits=4, variant=variant)


def eq2_numerator(spec: ProblemSpec) -> MultilinearPoly:
    """``N^2 (N - xy)^2 - N^2 + 2N^3 - N^4 + x (x - y)^2`` before division by 4."""
    n = spec.n
    x = spec.x_encoding.poly()
    y = spec.y_encoding.poly()
    return n * n * (n - x * y) ** 2 + (-n**2 + 2 * n**3 - n**4) + x * (x - y) ** 2


def build_objective(spec: ProblemSpec) -> MultilinearPoly:
    """Expand the chosen objective variant into a multilinear polynomial."""
    n = spec.n
    x = spec.x_encoding.poly()
    y = spec.y_encoding.poly()
    residual_sq = (n - x * y) ** 2
    if spec.variant is Variant.EQ1:
        return n * n * residual_sq + x * (x - y) ** 2
    if spec.variant is Variant.EQ2:
        try:
            return eq2_numerator(spec).exact_div(4)
        except ArithmeticError as exc:
            raise DivisibilityViolation(str(exc)) from None
    if spec.variant is Variant.SIMPLIFIED_NO_N2:
        return residual_sq - (n - 1) ** 2 + x * (x - y) ** 2
    if spec.variant is Variant.SIMPLIFIED_PLAIN:
        return residual_sq
    raise ValueError(f"unknown variant {spec.variant!r}")


def decode_xy(spec: ProblemSpec, assignment: Assignment) -> Tuple[int, int]:
    """Odd integers ``(x, y)`` encoded by an assignment; other variables are ignored."""
    return spec.x_encoding.decode(assignment), spec.y_encoding.decode(assignment)


class Table1Row(NamedTuple):
    term_a: int
    term_b: int
    term_c: int
    sum: Union[int, Fraction]

    @property
    def integral(self) -> bool:
        return isinstance(self.sum, int)


def table1_decomposition(n: int, x: int, y: int) -> Table1Row:
    """Split the EQ2 objective at ``(x, y)`` into its three parts and their quarter-sum.

    ``sum`` is an int when the numerator is divisible by 4 and a
    :class:`~fractions.Fraction` otherwise (check ``row.integral``).
    """
    term_a = n * n * (n - x * y) ** 2
    term_b = -(n**2) + 2 * n**3 - n**4
    term_c = x * (x - y) ** 2
    total = term_a + term_b + term_c
    s: Union[int, Fraction] = total // 4 if total % 4 == 0 else Fraction(total, 4)
    return Table1Row(term_a, term_b, term_c, s)


def objective_terms_by_source(spec: ProblemSpec) -> List[Tuple[str, MultilinearPoly]]:
    """The EQ1/EQ2 objective split into the residual part and the tie-break part.

    Used by diagnostics to tell which coefficients come from
    ``x (x - y)^2``.  Only meaningful for EQ1 and EQ2.
    """
    n = spec.n
    x = spec.x_encoding.poly()
    y = spec.y_encoding.poly()
    residual = n * n * (n - x * y) ** 2
    tiebreak = x * (x - y) ** 2
    if spec.variant is Variant.EQ2:
        residual = residual + (-n**2 + 2 * n**3 - n**4)
    return [("residual", residual), ("tiebreak", tiebreak)]
