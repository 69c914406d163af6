"""Reduce higher-order pseudo-Boolean polynomials to QUBOs.

A pair of variables ``(a, b)`` occurring together in cubic or higher
monomials is replaced by a fresh ancilla ``z`` and the penalty
``S * (3z + ab - 2za - 2zb)`` is added.  The penalty vanishes exactly when
``z == a*b`` and is at least ``S`` otherwise, so with ``S`` above
:func:`safe_penalty_bound` minimising over the ancillas recovers the
original polynomial.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Mapping, Tuple, TypeVar, Union

from .boolpoly import MultilinearPoly, Monomial, VarId, VarKind, ancilla

Number = Union[int, float]
V = TypeVar("V", bound=Hashable)


@dataclass(frozen=True)
class Qubo:
    """``offset + sum(linear[v] * v) + sum(quadratic[(u, v)] * u * v)``.

    Keys of ``quadratic`` are ordered pairs ``(u, v)`` with ``u < v``.
    Coefficients are ints for exact QUBOs and floats after hardware
    degradation.
    """

    linear: Mapping = field(default_factory=dict)
    quadratic: Mapping = field(default_factory=dict)
    offset: Number = 0
    ancilla_defs: Tuple[Tuple[VarId, VarId, VarId], ...] = ()

    def __post_init__(self):
        quad = {}
        for (u, v), c in self.quadratic.items():
            if u == v:
                raise ValueError(f"self-pair {u} in quadratic terms")
            key = (u, v) if u < v else (v, u)
            quad[key] = quad.get(key, 0) + c
        object.__setattr__(self, "linear", {k: c for k, c in self.linear.items() if c})
        object.__setattr__(self, "quadratic", {k: c for k, c in quad.items() if c})
        object.__setattr__(self, "ancilla_defs", tuple(self.ancilla_defs))

    def variables(self) -> Tuple:
        vs = set(self.linear)
        for u, v in self.quadratic:
            vs.add(u)
            vs.add(v)
        for z, a, b in self.ancilla_defs:
            vs.update((z, a, b))
        return tuple(sorted(vs))

    def coefficients(self) -> List[Number]:
        """Linear and quadratic coefficients (offset excluded)."""
        return list(self.linear.values()) + list(self.quadratic.values())

    def energy(self, assignment: Mapping) -> Number:
        return qubo_energy(self, assignment)

    def to_poly(self) -> MultilinearPoly:
        terms: Dict[Monomial, int] = {(): self.offset}
        for v, c in self.linear.items():
            terms[(v,)] = c
        for (u, v), c in self.quadratic.items():
            terms[(u, v)] = c
        return MultilinearPoly(terms)

    def to_text(self) -> str:
        """Serialize: ``c <offset>``, ``<var> <coeff>``, ``<var> <var> <coeff>``."""
        lines = [f"c {self.offset}"]
        for v in sorted(self.linear):
            lines.append(f"{v} {self.linear[v]}")
        for u, v in sorted(self.quadratic):
            lines.append(f"{u} {v} {self.quadratic[(u, v)]}")
        for z, a, b in self.ancilla_defs:
            lines.append(f"# def {z} = {a} {b}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Qubo":
        linear: Dict[VarId, Number] = {}
        quadratic: Dict[Tuple[VarId, VarId], Number] = {}
        offset: Number = 0
        defs = []
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if line.startswith("# def "):
                z, _, a, b = line[len("# def "):].split()
                defs.append((VarId.parse(z), VarId.parse(a), VarId.parse(b)))
                continue
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            try:
                coeff = _parse_number(fields[-1])
                if fields[0] == "c" and len(fields) == 2:
                    offset += coeff
                elif len(fields) == 2:
                    v = VarId.parse(fields[0])
                    linear[v] = linear.get(v, 0) + coeff
                elif len(fields) == 3:
                    u, v = VarId.parse(fields[0]), VarId.parse(fields[1])
                    key = (u, v) if u < v else (v, u)
                    quadratic[key] = quadratic.get(key, 0) + coeff
                else:
                    raise ValueError("expected 2 or 3 fields")
            except ValueError as exc:
                raise ValueError(f"line {lineno}: {exc}") from None
        return cls(linear, quadratic, offset, tuple(defs))


def _parse_number(s: str) -> Number:
    try:
        return int(s)
    except ValueError:
        return float(s)


def qubo_energy(q: Qubo, assignment: Mapping) -> Number:
    """Exact energy including the offset.

    Raises:
        KeyError: if a variable of ``q`` has no value in ``assignment``.
    """
    missing = [v for v in q.variables() if v not in assignment]
    if missing:
        raise KeyError(f"assignment has no value for {', '.join(map(str, missing))}")
    e = q.offset
    for v, c in q.linear.items():
        if assignment[v]:
            e += c
    for (u, v), c in q.quadratic.items():
        if assignment[u] and assignment[v]:
            e += c
    return e


def safe_penalty_bound(p: MultilinearPoly) -> int:
    """``1 + sum(|c|)`` over monomials of degree three or more."""
    return 1 + sum(abs(c) for m, c in p.items() if len(m) >= 3)


def _pick_pair(high: Iterable[Monomial]) -> Tuple[VarId, VarId]:
    counts: Counter = Counter()
    for m in high:
        for i in range(len(m)):
            for j in range(i + 1, len(m)):
                counts[(m[i], m[j])] += 1
    same_kind = {pair: c for pair, c in counts.items() if pair[0].kind == pair[1].kind}
    if same_kind:
        counts = same_kind
    best = max(counts.values())
    return min(pair for pair, c in counts.items() if c == best)


def quadratize(p: MultilinearPoly, s: int) -> Qubo:
    """Rosenberg substitution until every monomial has degree at most two.

    Pairs of the same variable kind (two x bits, two y bits) are preferred;
    among the candidates the pair occurring in the most monomials of
    degree >= 3 is substituted first, ties going to the lexicographically
    smallest pair.  Only monomials of degree >= 3 are rewritten, which
    keeps the penalty bound sound.
    """
    if not isinstance(s, int) or s < 1:
        raise ValueError(f"penalty weight must be a positive int, got {s!r}")
    terms: Dict[Monomial, int] = dict(p.items())
    next_anc = 1 + max(
        (v.index for v in p.variables() if v.kind is VarKind.ANCILLA), default=-1
    )
    defs: List[Tuple[VarId, VarId, VarId]] = []
    penalty: Dict[Monomial, int] = {}

    while True:
        high = [m for m in terms if len(m) >= 3]
        if not high:
            break
        a, b = _pick_pair(high)
        z = ancilla(next_anc)
        next_anc += 1
        defs.append((z, a, b))
        for m in high:
            if a in m and b in m:
                c = terms.pop(m)
                new = tuple(sorted([v for v in m if v != a and v != b] + [z]))
                c += terms.get(new, 0)
                if c:
                    terms[new] = c
                else:
                    terms.pop(new, None)
        for mono, c in (((z,), 3 * s), ((a, b), s), ((a, z), -2 * s), ((b, z), -2 * s)):
            mono = tuple(sorted(mono))
            penalty[mono] = penalty.get(mono, 0) + c

    for m, c in penalty.items():
        terms[m] = terms.get(m, 0) + c

    offset = terms.pop((), 0)
    linear = {m[0]: c for m, c in terms.items() if len(m) == 1}
    quadratic = {m: c for m, c in terms.items() if len(m) == 2}
    return Qubo(linear, quadratic, offset, tuple(defs))


def consistent_ancillas(q: Qubo, assignment: Mapping[VarId, int]) -> Dict[VarId, int]:
    """Extend ``assignment`` with every ancilla set to the product it stands for."""
    out = dict(assignment)
    for z, a, b in q.ancilla_defs:
        out[z] = out[a] & out[b]
    return out
