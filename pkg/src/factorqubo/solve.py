"""Ground-state search over exact or degraded QUBOs.

Two solvers share one result type:

* :func:`solve_exact` enumerates every assignment (vectorized, blocked)
  and returns all ground states.
* :func:`solve_sa` runs seeded single-flip Metropolis annealing, one
  independent run per sample; sample ``i`` uses seed ``seed + i`` so
  results do not depend on batching.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .hardware import DegradedQubo, Spin, decode_chains
from .objective import ProblemSpec, decode_xy
from .quadratize import Qubo, qubo_energy

Solvable = Union[Qubo, DegradedQubo]

DEFAULT_MAX_VARS = 26
_LOW_BLOCK = 20
_INT64_SAFE = 2**62


class VariableCountExceeded(RuntimeError):
    """Exhaustive enumeration was asked for more variables than the cap."""


@dataclass(frozen=True)
class Sample:
    assignment: Dict
    energy: Union[int, float]
    x: int
    y: int
    valid: bool
    intact: bool
    break_count: int
    broken: FrozenSet = frozenset()

    @property
    def logical_x(self) -> int:
        return self.x

    @property
    def logical_y(self) -> int:
        return self.y


@dataclass
class SolveResult:
    samples: List[Sample]
    distinct_count: int
    valid_count: int
    best_energy: Union[int, float]
    ground_states: List[Dict] = field(default_factory=list)

    @property
    def best(self) -> Optional[Sample]:
        if not self.samples:
            return None
        return min(self.samples, key=lambda s: s.energy)

    @property
    def mean_break_count(self) -> float:
        if not self.samples:
            return 0.0
        return sum(s.break_count for s in self.samples) / len(self.samples)

    def to_csv_rows(self) -> List[Tuple]:
        return [
            (i, s.energy, s.x, s.y, s.valid, s.intact, s.break_count)
            for i, s in enumerate(self.samples)
        ]


CSV_HEADER = ("sample_index", "energy", "x", "y", "valid", "intact", "break_count")


@dataclass(frozen=True)
class AnnealSchedule:
    """Geometric inverse-temperature ramp; ``None`` betas are derived from the QUBO."""

    sweeps: int = 2000
    beta_start: Optional[float] = None
    beta_end: Optional[float] = None
    restarts: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.sweeps < 1 or self.restarts < 1:
            raise ValueError("sweeps and restarts must be positive")
        if self.beta_start is not None and self.beta_end is not None:
            if not 0 < self.beta_start < self.beta_end:
                raise ValueError("need 0 < beta_start < beta_end")

    def betas(self, coeffs: Sequence[float]) -> np.ndarray:
        mags = [abs(c) for c in coeffs if c]
        hi = max(mags, default=1.0)
        lo = min(mags, default=1.0)
        b0 = self.beta_start if self.beta_start is not None else 0.01 / hi
        b1 = self.beta_end if self.beta_end is not None else 10.0 / lo
        if b1 <= b0:
            b1 = b0 * 1000.0
        return np.geomspace(b0, b1, self.sweeps)


class _Dense:
    """Index-based view of a QUBO: variable order, fields and couplings."""

    def __init__(self, q: Solvable, spec: ProblemSpec):
        self.degraded = isinstance(q, DegradedQubo)
        if self.degraded:
            self.qubo = q.base
            # problem bits absent from the QUBO get one free spin each
            self.free = [Spin(v, 0) for v in spec.variables if v not in q.chain_map]
            self.vars = list(q.physical_variables) + self.free
        else:
            self.qubo = q
            self.vars = sorted(set(q.variables()) | set(spec.variables))
        self.source = q
        self.spec = spec
        self.index = {v: i for i, v in enumerate(self.vars)}
        n = len(self.vars)
        self.n = n
        coeffs = self.qubo.coefficients() + [self.qubo.offset]
        self.is_int = all(isinstance(c, (int, np.integer)) for c in coeffs)
        self.abs_sum = sum(abs(c) for c in coeffs)
        self.offset = self.qubo.offset
        self.h = [0] * n
        for v, c in self.qubo.linear.items():
            self.h[self.index[v]] += c
        self.pairs: List[Tuple[int, int, Union[int, float]]] = []
        for (u, v), c in self.qubo.quadratic.items():
            i, j = self.index[u], self.index[v]
            self.pairs.append((min(i, j), max(i, j), c))

    def assignment(self, bits: Sequence[int]) -> Dict:
        return {v: int(b) for v, b in zip(self.vars, bits)}

    def make_sample(self, bits: Sequence[int]) -> Sample:
        a = self.assignment(bits)
        energy = qubo_energy(self.qubo, a)
        if self.degraded:
            logical, intact, breaks, broken = decode_chains(self.source, a)
            logical.update((s.var, a[s]) for s in self.free)
        else:
            logical, intact, breaks, broken = a, True, 0, frozenset()
        x, y = decode_xy(self.spec, logical)
        valid = intact and x * y == self.spec.n
        return Sample(a, energy, x, y, valid, intact, breaks, broken)


def _doubling(weights: Sequence, dtype) -> np.ndarray:
    """``out[l] = sum(weights[j] for j where bit j of l is set)``."""
    out = np.zeros(1, dtype=dtype)
    for w in weights:
        out = np.concatenate([out, out + w])
    return out


def _low_energies(h, pairs, m, dtype) -> np.ndarray:
    cols: List[List[Tuple[int, object]]] = [[] for _ in range(m)]
    for i, j, c in pairs:
        if j < m:
            cols[j].append((i, c))
    e = np.zeros(1, dtype=dtype)
    for k in range(m):
        col = [0] * k
        for i, c in cols[k]:
            col[i] += c
        f = _doubling(col, dtype) if k else np.zeros(1, dtype=dtype)
        e = np.concatenate([e, e + h[k] + f])
    return e


def count_distinct(samples: Sequence[Sample]) -> int:
    """Classes of samples that agree on which chains broke and on ``(x, y)``."""
    return len({(s.broken, (s.x, s.y)) for s in samples})


def _result(dense: _Dense, samples: List[Sample], ground=None) -> SolveResult:
    best = min((s.energy for s in samples), default=math.inf)
    return SolveResult(
        samples=samples,
        distinct_count=count_distinct(samples),
        valid_count=sum(s.valid for s in samples),
        best_energy=best,
        ground_states=ground or [],
    )


def solve_exact(
    q: Solvable,
    spec: ProblemSpec,
    max_vars: int = DEFAULT_MAX_VARS,
    atol: Optional[float] = None,
) -> SolveResult:
    """Enumerate all ``2**n`` assignments and return every ground state.

    Integer QUBOs are compared exactly.  For float QUBOs, energies within
    ``atol`` of the minimum count as ties; the default is a few ulps of the
    total coefficient mass.

    Raises:
        VariableCountExceeded: if the QUBO has more than ``max_vars`` variables.
    """
    dense = _Dense(q, spec)
    n = dense.n
    if n > max_vars:
        raise VariableCountExceeded(f"{n} variables exceeds the cap of {max_vars}")
    if dense.is_int:
        dtype = np.int64 if dense.abs_sum < _INT64_SAFE else object
        tol = 0
    else:
        dtype = np.float64
        tol = atol if atol is not None else 64 * np.finfo(float).eps * max(dense.abs_sum, 1.0)

    m = min(n, _LOW_BLOCK)
    hi_n = n - m
    h = dense.h
    e_low = _low_energies(h, dense.pairs, m, dtype)
    cross: List[List[Tuple[int, object]]] = [[] for _ in range(hi_n)]
    high_pairs = []
    for i, j, c in dense.pairs:
        if j >= m and i < m:
            cross[j - m].append((i, c))
        elif i >= m:
            high_pairs.append((i - m, j - m, c))

    best = None
    hits: List[int] = []
    for p in range(2**hi_n):
        pbits = [(p >> t) & 1 for t in range(hi_n)]
        const = dense.offset + sum(h[m + t] for t in range(hi_n) if pbits[t])
        const += sum(c for i, j, c in high_pairs if pbits[i] and pbits[j])
        w = [0] * m
        for t in range(hi_n):
            if pbits[t]:
                for i, c in cross[t]:
                    w[i] += c
        energies = e_low + const
        if any(w):
            energies = energies + _doubling(w, dtype)
        block_min = energies.min()
        if best is None or block_min < best - tol:
            best = block_min
            hits = []
        if block_min <= best + tol:
            idx = np.nonzero(energies <= best + tol)[0]
            hits.extend(int(l) + (p << m) for l in idx)

    samples = []
    ground = []
    for state in hits:
        bits = [(state >> t) & 1 for t in range(n)]
        sample = dense.make_sample(bits)
        samples.append(sample)
        ground.append(sample.assignment)
    if not dense.is_int and samples:
        # a later block may have lowered the minimum within tolerance
        lo = min(s.energy for s in samples)
        keep = [i for i, s in enumerate(samples) if s.energy <= lo + tol]
        samples = [samples[i] for i in keep]
        ground = [ground[i] for i in keep]
    return _result(dense, samples, ground)


def _anneal(dense: _Dense, sched: AnnealSchedule, num_samples: int):
    n = dense.n
    S = num_samples
    h = np.array([float(c) for c in dense.h])
    J = np.zeros((n, n))
    for i, j, c in dense.pairs:
        J[i, j] += float(c)
        J[j, i] += float(c)
    betas = sched.betas(dense.qubo.coefficients())
    rngs = [np.random.default_rng(sched.seed + i) for i in range(S)]
    chunk = 64

    best_state = np.zeros((S, n), dtype=np.int8)
    best_energy = np.full(S, np.inf)
    for _ in range(sched.restarts):
        s = np.stack([r.integers(0, 2, size=n) for r in rngs]).astype(np.float64)
        field = h[None, :] + s @ J
        energy = s @ h + 0.5 * np.einsum("si,ij,sj->s", s, J, s)
        for start in range(0, len(betas), chunk):
            block = betas[start:start + chunk]
            u = np.stack([r.random((len(block), n)) for r in rngs])
            for b, beta in enumerate(block):
                for k in range(n):
                    sign = 1.0 - 2.0 * s[:, k]
                    delta = sign * field[:, k]
                    accept = (delta <= 0) | (u[:, b, k] < np.exp(-beta * np.maximum(delta, 0.0)))
                    if not accept.any():
                        continue
                    step = np.where(accept, sign, 0.0)
                    s[:, k] += step
                    energy += np.where(accept, delta, 0.0)
                    field += step[:, None] * J[k][None, :]
        better = energy < best_energy
        best_energy = np.where(better, energy, best_energy)
        best_state[better] = s[better].astype(np.int8)
    return best_state, best_energy


def solve_sa(
    q: Solvable,
    spec: ProblemSpec,
    sched: AnnealSchedule = AnnealSchedule(),
    num_samples: int = 1000,
) -> SolveResult:
    """Simulated annealing, ``num_samples`` independent seeded runs.

    Each returned energy is recomputed from scratch and checked against the
    value tracked during annealing.
    """
    if num_samples < 1:
        raise ValueError("num_samples must be positive")
    dense = _Dense(q, spec)
    states, tracked = _anneal(dense, sched, num_samples)
    tol = 0.0 if dense.is_int else 1e-9 * max(dense.abs_sum, 1.0)
    samples = []
    for bits, e_inc in zip(states, tracked):
        sample = dense.make_sample(bits)
        e = sample.energy - dense.offset
        if abs(e - e_inc) > tol:
            raise RuntimeError(
                f"incremental energy {e_inc!r} disagrees with recomputed {e!r}"
            )
        samples.append(sample)
    return _result(dense, samples)
