"""Exact multilinear polynomials over named Boolean variables.

Every variable takes values in {0, 1}, so ``v * v == v`` and any polynomial
has a unique multilinear normal form: a map from monomials (sorted,
duplicate-free tuples of variables) to nonzero integer coefficients.
Coefficients are Python ints, so arithmetic is exact at any magnitude.
"""
from __future__ import annotations

import enum
import re
from typing import Dict, Iterable, Iterator, Mapping, NamedTuple, Tuple, Union


class VarKind(enum.IntEnum):
    X = 0
    Y = 1
    ANCILLA = 2


_PREFIX = {VarKind.X: "x", VarKind.Y: "y", VarKind.ANCILLA: "a"}
_KIND_OF_PREFIX = {v: k for k, v in _PREFIX.items()}
_NAME_RE = re.compile(r"^([xya])(\d+)$")


class VarId(NamedTuple):
    """A Boolean variable: an x bit, a y bit or a quadratization ancilla."""

    kind: VarKind
    index: int

    def __str__(self) -> str:
        return f"{_PREFIX[self.kind]}{self.index}"

    @classmethod
    def parse(cls, name: str) -> "VarId":
        m = _NAME_RE.match(name.strip())
        if m is None:
            raise ValueError(f"not a variable name: {name!r}")
        return cls(_KIND_OF_PREFIX[m.group(1)], int(m.group(2)))


def xbit(i: int) -> VarId:
    return VarId(VarKind.X, i)


def ybit(i: int) -> VarId:
    return VarId(VarKind.Y, i)


def ancilla(i: int) -> VarId:
    return VarId(VarKind.ANCILLA, i)


Monomial = Tuple[VarId, ...]
Assignment = Mapping[VarId, int]

ONE: Monomial = ()


def monomial(vars: Iterable[VarId]) -> Monomial:
    """Normal form of a product of variables (idempotence applied)."""
    return tuple(sorted(set(vars)))


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    return tuple(sorted(set(a).union(b)))


def grlex_key(m: Monomial):
    return (len(m), m)


class MultilinearPoly:
    """Immutable multilinear polynomial with exact integer coefficients.

    Supports ``+``, ``-``, ``*`` with other polynomials and with ints.
    Equality is structural, which is also semantic because the
    representation is canonical.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Monomial, int] | None = None):
        clean: Dict[Monomial, int] = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, int):
                    raise TypeError(f"coefficients must be int, got {type(c).__name__}")
                m = monomial(m)
                c = clean.get(m, 0) + c
                if c:
                    clean[m] = c
                else:
                    clean.pop(m, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: Dict[Monomial, int]) -> "MultilinearPoly":
        # caller guarantees canonical monomials and no zero coefficients
        p = cls.__new__(cls)
        p._terms = terms
        p._hash = None
        return p

    @classmethod
    def const(cls, c: int) -> "MultilinearPoly":
        return cls._raw({ONE: c} if c else {})

    @classmethod
    def var(cls, v: VarId) -> "MultilinearPoly":
        return cls._raw({(v,): 1})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[Monomial, int]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, int]]:
        return iter(self._terms.items())

    def coefficient(self, m: Iterable[VarId]) -> int:
        return self._terms.get(monomial(m), 0)

    @property
    def constant(self) -> int:
        return self._terms.get(ONE, 0)

    def variables(self) -> Tuple[VarId, ...]:
        seen = set()
        for m in self._terms:
            seen.update(m)
        return tuple(sorted(seen))

    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    def __len__(self) -> int:
        return len(self._terms)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def _coerce(other) -> "MultilinearPoly":
        if isinstance(other, MultilinearPoly):
            return other
        if isinstance(other, int):
            return MultilinearPoly.const(other)
        if isinstance(other, VarId):
            return MultilinearPoly.var(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for m, c in other._terms.items():
            c = out.get(m, 0) + c
            if c:
                out[m] = c
            else:
                del out[m]
        return MultilinearPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return MultilinearPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Monomial, int] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                m = _mono_mul(ma, mb)
                c = out.get(m, 0) + ca * cb
                if c:
                    out[m] = c
                else:
                    out.pop(m, None)
        return MultilinearPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = MultilinearPoly.const(1)
        for _ in range(k):
            result = result * self
        return result

    def exact_div(self, d: int) -> "MultilinearPoly":
        """Divide every coefficient by ``d``; raises if any is not a multiple."""
        bad = [m for m, c in self._terms.items() if c % d]
        if bad:
            raise ArithmeticError(f"{len(bad)} coefficient(s) not divisible by {d}")
        return MultilinearPoly._raw({m: c // d for m, c in self._terms.items()})

    # -- evaluation -------------------------------------------------------

    def __call__(self, assignment: Assignment) -> int:
        return poly_eval(self, assignment)

    # -- comparison / hashing --------------------------------------------

    def __eq__(self, other):
        if isinstance(other, int):
            other = MultilinearPoly.const(other)
        if not isinstance(other, MultilinearPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        if not self._terms:
            return "MultilinearPoly(0)"
        parts = []
        for m in sorted(self._terms, key=grlex_key, reverse=True):
            c = self._terms[m]
            name = "*".join(map(str, m))
            parts.append(f"{c}*{name}" if name else str(c))
        return "MultilinearPoly(" + " + ".join(parts) + ")"

    # -- text format ------------------------------------------------------

    def to_text(self) -> str:
        """One term per line, ``<coefficient> <var> <var> ...``, graded-lex order."""
        lines = []
        for m in sorted(self._terms, key=grlex_key):
            lines.append(" ".join([str(self._terms[m])] + [str(v) for v in m]))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_text(cls, text: str) -> "MultilinearPoly":
        terms: Dict[Monomial, int] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                c = int(fields[0])
                m = monomial(VarId.parse(f) for f in fields[1:])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
            if m in terms:
                raise ValueError(f"line {lineno}: duplicate monomial")
            terms[m] = c
        return cls(terms)


PolyLike = Union[MultilinearPoly, int, VarId]


def poly_add(a: PolyLike, b: PolyLike) -> MultilinearPoly:
    return MultilinearPoly._coerce(a) + b


def poly_mul(a: PolyLike, b: PolyLike) -> MultilinearPoly:
    return MultilinearPoly._coerce(a) * b


def poly_degree(p: MultilinearPoly) -> int:
    return p.degree()


def poly_eval(p: MultilinearPoly, assignment: Assignment) -> int:
    """Exact value of ``p`` at a 0/1 assignment.

    Raises:
        KeyError: if a variable of ``p`` is missing from ``assignment``.
    """
    missing = [v for v in p.variables() if v not in assignment]
    if missing:
        raise KeyError(f"assignment has no value for {', '.join(map(str, missing))}")
    total = 0
    for m, c in p.items():
        if all(assignment[v] for v in m):
            total += c
    return total
