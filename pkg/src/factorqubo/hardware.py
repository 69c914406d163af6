"""A software model of what analog annealing hardware does to a QUBO.

:func:`degrade` applies, in order:

1. the constant offset is dropped;
2. every logical variable becomes a path of ``chain_length`` physical
   spins.  Its linear bias is split evenly across the chain (remainder on
   the first spin), quadratic terms attach to the first spin of each chain
   and consecutive spins are tied by ``param_chain * (s + t - 2 s t)``,
   i.e. a coupling of ``-2 * param_chain`` plus ``param_chain`` on each end;
3. all coefficients are multiplied by ``coeff_range / max|coefficient|``;
4. each coefficient is rounded half away from zero to the grid with step
   ``coeff_range / 2**(precision_bits - 1)``;
5. seeded Gaussian noise is added to every coefficient that did not round
   to zero.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Dict, Mapping, NamedTuple, Tuple

import numpy as np

from .boolpoly import VarId
from .quadratize import Qubo


class Spin(NamedTuple):
    """Physical spin ``replica`` of the chain for logical variable ``var``."""

    var: VarId
    replica: int

    def __str__(self) -> str:
        return f"{self.var}_{self.replica}"


@dataclass(frozen=True)
class HardwareModel:
    coeff_range: float = 1.0
    precision_bits: int = 5
    noise_sigma: float = 0.0
    chain_length: int = 1
    param_chain: int = 0

    def __post_init__(self):
        if not self.coeff_range > 0:
            raise ValueError("coeff_range must be positive")
        if self.precision_bits < 1:
            raise ValueError("precision_bits must be >= 1")
        if self.chain_length < 1:
            raise ValueError("chain_length must be >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if self.param_chain < 0:
            raise ValueError("param_chain must be nonnegative")

    @property
    def grid_step(self) -> float:
        return self.coeff_range / 2 ** (self.precision_bits - 1)

    def with_param_chain(self, param_chain: int) -> "HardwareModel":
        return replace(self, param_chain=param_chain)

    def to_config(self, seed: int | None = None) -> Dict[str, str]:
        cfg = {
            "coeff_range": repr(float(self.coeff_range)),
            "precision_bits": str(self.precision_bits),
            "noise_sigma": repr(float(self.noise_sigma)),
            "chain_length": str(self.chain_length),
            "param_chain": str(self.param_chain),
        }
        if seed is not None:
            cfg["seed"] = str(seed)
        return cfg

    @classmethod
    def from_config(cls, cfg: Mapping[str, str]) -> "HardwareModel":
        d = cls()
        return cls(
            coeff_range=float(cfg.get("coeff_range", d.coeff_range)),
            precision_bits=int(cfg.get("precision_bits", d.precision_bits)),
            noise_sigma=float(cfg.get("noise_sigma", d.noise_sigma)),
            chain_length=int(cfg.get("chain_length", d.chain_length)),
            param_chain=int(cfg.get("param_chain", d.param_chain)),
        )


UNDEGRADED = HardwareModel(precision_bits=60)


@dataclass(frozen=True)
class DegradedQubo:
    base: Qubo
    scale_factor: float
    chain_map: Mapping[VarId, Tuple[Spin, ...]]
    hw: HardwareModel
    # largest pre-scaling magnitudes of the problem terms and the chain terms
    problem_max: float = 0.0
    chain_max: float = 0.0

    @property
    def saturated(self) -> bool:
        """True when the chain terms set the scale, so raising param_chain only
        shrinks the problem coefficients further."""
        return self.chain_max > 0 and self.chain_max >= self.problem_max

    @property
    def physical_variables(self) -> Tuple[Spin, ...]:
        return tuple(s for v in sorted(self.chain_map) for s in self.chain_map[v])

    def energy(self, physical: Mapping[Spin, int]) -> float:
        return self.base.energy(physical)

    def embed(self, logical: Mapping[VarId, int]) -> Dict[Spin, int]:
        """Physical assignment with every chain set unanimously to its logical value."""
        return {s: logical[v] for v, chain in self.chain_map.items() for s in chain}


def quantize(values, step: float):
    """Round half away from zero to multiples of ``step``."""
    v = np.asarray(values, dtype=float)
    return np.sign(v) * np.floor(np.abs(v) / step + 0.5) * step


def _expand_chains(q: Qubo, hw: HardwareModel):
    L = hw.chain_length
    P = hw.param_chain
    chain_map = {v: tuple(Spin(v, k) for k in range(L)) for v in q.variables()}
    linear: Dict[Spin, int] = {}
    quadratic: Dict[Tuple[Spin, Spin], int] = {}
    for v, c in q.linear.items():
        share, rem = divmod(c, L)
        for k, s in enumerate(chain_map[v]):
            linear[s] = share + (rem if k == 0 else 0)
    for (u, v), c in q.quadratic.items():
        quadratic[(chain_map[u][0], chain_map[v][0])] = c
    chain_linear: Dict[Spin, int] = {}
    chain_quad: Dict[Tuple[Spin, Spin], int] = {}
    if L > 1:
        for chain in chain_map.values():
            for s, t in zip(chain, chain[1:]):
                chain_quad[(s, t)] = -2 * P
                chain_linear[s] = chain_linear.get(s, 0) + P
                chain_linear[t] = chain_linear.get(t, 0) + P
    return chain_map, linear, quadratic, chain_linear, chain_quad


def degrade(q: Qubo, hw: HardwareModel, seed: int = 0) -> DegradedQubo:
    """Apply the hardware model to ``q``; deterministic in ``(q, hw, seed)``."""
    chain_map, linear, quadratic, chain_linear, chain_quad = _expand_chains(q, hw)
    problem_max = max((abs(c) for c in list(linear.values()) + list(quadratic.values())), default=0)
    for s, c in chain_linear.items():
        linear[s] = linear.get(s, 0) + c
    for k, c in chain_quad.items():
        quadratic[k] = quadratic.get(k, 0) + c

    lin_keys = sorted(linear)
    quad_keys = sorted(quadratic)
    raw = [linear[k] for k in lin_keys] + [quadratic[k] for k in quad_keys]
    if not raw or not any(raw):
        raise ValueError("cannot degrade a QUBO with no nonzero coefficients")
    max_abs = max(abs(c) for c in raw)
    chain_max = max((abs(c) for c in list(chain_quad.values()) + list(chain_linear.values())), default=0)
    scale = hw.coeff_range / max_abs

    # dividing first makes the largest magnitude exactly coeff_range
    scaled = np.array([float(c) / float(max_abs) for c in raw]) * hw.coeff_range
    coeffs = quantize(scaled, hw.grid_step)
    if hw.noise_sigma > 0:
        rng = np.random.default_rng(seed)
        noise = rng.normal(0.0, hw.noise_sigma, size=coeffs.shape)
        coeffs = np.where(coeffs != 0, coeffs + noise, coeffs)

    n_lin = len(lin_keys)
    new_lin = {k: float(c) for k, c in zip(lin_keys, coeffs[:n_lin])}
    new_quad = {k: float(c) for k, c in zip(quad_keys, coeffs[n_lin:])}
    return DegradedQubo(
        base=Qubo(new_lin, new_quad, 0.0),
        scale_factor=scale,
        chain_map=chain_map,
        hw=hw,
        problem_max=float(problem_max),
        chain_max=float(chain_max),
    )


def dynamic_range(q: Qubo) -> Tuple[float, float, float]:
    """``(max |c|, min nonzero |c|, max/min)`` over linear and quadratic terms."""
    mags = [abs(c) for c in q.coefficients() if c]
    if not mags:
        raise ValueError("QUBO has no nonzero coefficients")
    hi, lo = max(mags), min(mags)
    return hi, lo, hi / lo


class ChainDecode(NamedTuple):
    logical: Dict[VarId, int]
    intact: bool
    break_count: int
    broken: frozenset


def decode_chains(d: DegradedQubo, physical: Mapping[Spin, int]) -> ChainDecode:
    """Majority vote per chain, ties resolved to 1."""
    logical: Dict[VarId, int] = {}
    broken = set()
    for v, chain in d.chain_map.items():
        try:
            ones = sum(1 for s in chain if physical[s])
        except KeyError as exc:
            raise KeyError(f"assignment has no value for {exc.args[0]}") from None
        logical[v] = 1 if 2 * ones >= len(chain) else 0
        if 0 < ones < len(chain):
            broken.add(v)
    return ChainDecode(logical, not broken, len(broken), frozenset(broken))
