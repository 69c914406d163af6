"""Experiment drivers: the energy decomposition table, parameter sweeps over
``(param_chain, S)``, the small 3x4-bit preset and report serialization."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, replace
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .config import parse_config
from .hardware import UNDEGRADED, HardwareModel, degrade, dynamic_range
from .objective import (
    ProblemSpec,
    Table1Row,
    Variant,
    build_objective,
    preset_3x4,
    table1_decomposition,
)
from .quadratize import quadratize, safe_penalty_bound
from .solve import DEFAULT_MAX_VARS, AnnealSchedule, SolveResult, solve_exact, solve_sa

FORMAT_VERSION = 1
CSV_COLUMNS = (
    "param_chain", "s", "scale_factor", "range_ratio", "distinct", "valid",
    "best_energy", "x", "y",
)


class Grid(NamedTuple):
    start: int
    stop: int  # inclusive
    step: int

    def points(self) -> List[int]:
        if self.step <= 0 or self.stop < self.start:
            raise ValueError(f"bad grid {self}")
        return list(range(self.start, self.stop + 1, self.step))

    def __str__(self) -> str:
        return f"{self.start}:{self.stop}:{self.step}"

    @classmethod
    def parse(cls, text: str) -> "Grid":
        start, stop, step = (int(t) for t in text.strip().split(":"))
        return cls(start, stop, step)


# param_chain grids used on the hardware runs for each N
PUBLISHED_GRIDS: Dict[int, Tuple[Grid, ...]] = {
    15: (Grid(10, 100, 10), Grid(120, 300, 20), Grid(400, 11400, 100)),
    91: (Grid(300, 11400, 150),),
    899: (Grid(300, 9900, 300),),
}

# known factor pairs for the three semiprimes run on hardware
KNOWN_FACTORS = {15: (3, 5), 91: (7, 13), 899: (29, 31)}


def grid_points(grids: Sequence[Grid]) -> List[int]:
    """All grid values in order; overlapping grids are rejected."""
    out: List[int] = []
    for g in grids:
        pts = g.points()
        if out and pts[0] <= out[-1]:
            raise ValueError(f"grid {g} overlaps the previous one")
        out.extend(pts)
    return out


class SRule(NamedTuple):
    """How the ancilla penalty S is chosen at each grid point."""

    kind: str  # "third" | "fixed" | "safe"
    value: Optional[int] = None

    def penalty(self, param_chain: int, safe: int) -> int:
        if self.kind == "third":
            return max(param_chain // 3, 1)
        if self.kind == "fixed":
            return int(self.value)
        if self.kind == "safe":
            return safe
        raise ValueError(f"unknown S rule {self.kind!r}")

    def __str__(self) -> str:
        return f"fixed:{self.value}" if self.kind == "fixed" else self.kind

    @classmethod
    def parse(cls, text: str) -> "SRule":
        text = text.strip().lower()
        if text in ("third", "safe"):
            return cls(text)
        if text.startswith("fixed:"):
            return cls("fixed", int(text.split(":", 1)[1]))
        raise ValueError(f"S rule must be third, safe or fixed:<int>, got {text!r}")


THIRD_OF_PARAM_CHAIN = SRule("third")
SAFE_BOUND = SRule("safe")


@dataclass(frozen=True)
class SweepConfig:
    spec: ProblemSpec
    grids: Tuple[Grid, ...]
    s_rule: SRule = THIRD_OF_PARAM_CHAIN
    samples_per_run: int = 200
    hw: HardwareModel = HardwareModel()
    solver: str = "auto"  # auto | exact | sa
    sched: AnnealSchedule = AnnealSchedule()

    def __post_init__(self):
        object.__setattr__(self, "grids", tuple(Grid(*g) for g in self.grids))
        if self.solver not in ("auto", "exact", "sa"):
            raise ValueError(f"solver must be auto, exact or sa, got {self.solver!r}")
        if self.samples_per_run < 1:
            raise ValueError("samples_per_run must be positive")
        grid_points(self.grids)

    def points(self) -> List[int]:
        return grid_points(self.grids)

    def to_config(self) -> Dict[str, str]:
        cfg = self.spec.to_config()
        cfg["grids"] = ", ".join(str(g) for g in self.grids)
        cfg["s_rule"] = str(self.s_rule)
        cfg["samples_per_run"] = str(self.samples_per_run)
        cfg["solver"] = self.solver
        cfg.update(self.hw.to_config())
        cfg["sweeps"] = str(self.sched.sweeps)
        cfg["restarts"] = str(self.sched.restarts)
        if self.sched.beta_start is not None:
            cfg["beta_start"] = repr(self.sched.beta_start)
        if self.sched.beta_end is not None:
            cfg["beta_end"] = repr(self.sched.beta_end)
        return cfg

    @classmethod
    def from_config(cls, cfg: Mapping[str, str]) -> "SweepConfig":
        spec = ProblemSpec.from_config(cfg)
        grid_text = cfg.get("grids", "published").strip()
        if grid_text == "published":
            if spec.n not in PUBLISHED_GRIDS:
                raise ValueError(f"no published grid for n={spec.n}")
            grids = PUBLISHED_GRIDS[spec.n]
        else:
            grids = tuple(Grid.parse(t) for t in grid_text.split(",") if t.strip())
        opt = lambda k: float(cfg[k]) if cfg.get(k, "").strip() else None  # noqa: E731
        sched = AnnealSchedule(
            sweeps=int(cfg.get("sweeps", 2000)),
            restarts=int(cfg.get("restarts", 1)),
            beta_start=opt("beta_start"),
            beta_end=opt("beta_end"),
        )
        return cls(
            spec=spec,
            grids=grids,
            s_rule=SRule.parse(cfg.get("s_rule", "third")),
            samples_per_run=int(cfg.get("samples_per_run", 200)),
            hw=HardwareModel.from_config(cfg),
            solver=cfg.get("solver", "auto").strip().lower(),
            sched=sched,
        )

    @classmethod
    def from_text(cls, text: str) -> "SweepConfig":
        return cls.from_config(parse_config(text))


@dataclass
class RunRecord:
    param_chain: int
    s: int
    seed: int
    solver: str
    scale_factor: float
    max_abs: Union[int, float]
    min_abs: Union[int, float]
    range_ratio: float
    distinct: int
    valid: int
    samples: int
    best_energy: float
    x: int
    y: int
    mean_break_count: float
    saturated: bool


@dataclass
class RunReport:
    config: Dict[str, str]
    master_seed: int
    runs: List[RunRecord] = field(default_factory=list)
    format_version: int = FORMAT_VERSION
    generated_at: Optional[str] = None

    @property
    def summary(self) -> Dict:
        first = next((r for r in self.runs if r.valid > 0), None)
        return {
            "total_runs": len(self.runs),
            "total_valid": sum(r.valid for r in self.runs),
            "first_success": (
                None if first is None else {"param_chain": first.param_chain, "s": first.s}
            ),
            "saturated_runs": sum(r.saturated for r in self.runs),
        }

    def to_dict(self) -> Dict:
        return {
            "format_version": self.format_version,
            "generated_at": self.generated_at,
            "master_seed": self.master_seed,
            "config": dict(self.config),
            "runs": [asdict(r) for r in self.runs],
            "summary": self.summary,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "RunReport":
        if d.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported report format {d.get('format_version')!r}")
        return cls(
            config=dict(d["config"]),
            master_seed=d["master_seed"],
            runs=[RunRecord(**r) for r in d["runs"]],
            format_version=d["format_version"],
            generated_at=d.get("generated_at"),
        )


def _finite(v: float):
    # JSON has no infinity; an empty run reports null
    return v if isinstance(v, int) or math.isfinite(v) else None


def emit_report(report: RunReport, fmt: str = "json") -> bytes:
    """Serialize a report as the full JSON document or the flat per-run CSV."""
    fmt = fmt.lower()
    if fmt == "json":
        d = report.to_dict()
        for r in d["runs"]:
            r["best_energy"] = _finite(r["best_energy"])
        return (json.dumps(d, indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in report.runs:
            w.writerow([
                r.param_chain, r.s, repr(r.scale_factor), repr(r.range_ratio),
                r.distinct, r.valid, r.best_energy, r.x, r.y,
            ])
        return buf.getvalue().encode()
    raise ValueError(f"unknown report format {fmt!r}")


def parse_report(data: Union[bytes, str]) -> RunReport:
    if isinstance(data, bytes):
        data = data.decode()
    d = json.loads(data)
    for r in d["runs"]:
        if r["best_energy"] is None:
            r["best_energy"] = math.inf
    return RunReport.from_dict(d)


# -- experiments -------------------------------------------------------------


def run_table1(entries: Iterable[Tuple[int, int, int]]) -> List[Tuple[int, int, int, Table1Row]]:
    """``(n, x, y)`` triples to ``(n, x, y, decomposition)`` rows."""
    return [(n, x, y, table1_decomposition(n, x, y)) for n, x, y in entries]


def _choose_solver(solver: str, n_vars: int) -> str:
    if solver != "auto":
        return solver
    return "exact" if n_vars <= DEFAULT_MAX_VARS else "sa"


def run_point(
    spec: ProblemSpec,
    s: int,
    hw: HardwareModel,
    seed: int,
    solver: str = "auto",
    sched: AnnealSchedule = AnnealSchedule(),
    samples: int = 200,
    poly=None,
) -> Tuple[RunRecord, SolveResult]:
    """Objective -> QUBO at penalty ``s`` -> degraded QUBO -> solve, for one grid point."""
    poly = build_objective(spec) if poly is None else poly
    q = quadratize(poly, s)
    d = degrade(q, hw, seed)
    hi, lo, ratio = dynamic_range(q)
    kind = _choose_solver(solver, len(d.physical_variables))
    if kind == "exact":
        res = solve_exact(d, spec)
    else:
        res = solve_sa(d, spec, replace(sched, seed=seed), samples)
    best = res.best
    rec = RunRecord(
        param_chain=hw.param_chain,
        s=s,
        seed=seed,
        solver=kind,
        scale_factor=d.scale_factor,
        max_abs=hi,
        min_abs=lo,
        range_ratio=ratio,
        distinct=res.distinct_count,
        valid=res.valid_count,
        samples=len(res.samples),
        best_energy=float(res.best_energy),
        x=best.x if best else 0,
        y=best.y if best else 0,
        mean_break_count=res.mean_break_count,
        saturated=d.saturated,
    )
    return rec, res


def run_seeds(master_seed: int, count: int) -> List[int]:
    """Independent per-run seeds derived from the master seed."""
    return [int(s) for s in np.random.SeedSequence(master_seed).generate_state(count)]


def run_sweep(cfg: SweepConfig, master_seed: int) -> RunReport:
    """Solve once per grid point; deterministic given ``(cfg, master_seed)``."""
    poly = build_objective(cfg.spec)
    safe = safe_penalty_bound(poly)
    points = cfg.points()
    report = RunReport(config=cfg.to_config(), master_seed=master_seed)
    for pc, seed in zip(points, run_seeds(master_seed, len(points))):
        rec, _ = run_point(
            cfg.spec,
            cfg.s_rule.penalty(pc, safe),
            cfg.hw.with_param_chain(pc),
            seed,
            cfg.solver,
            cfg.sched,
            cfg.samples_per_run,
            poly,
        )
        report.runs.append(rec)
    return report


def run_preset_3x4(
    n: int,
    hw: Optional[HardwareModel] = None,
    s: Union[int, str] = 150,
    param_chain: int = 450,
    seed: int = 0,
    solver: str = "exact",
) -> RunReport:
    """The 3x4-bit configuration at ``param_chain = 450, S = 150``.

    ``hw=None`` solves the undegraded QUBO.  ``s="safe"`` swaps the fixed
    penalty for the certified bound.  The report carries one run record.
    """
    if n not in (15, 35):
        raise ValueError("the 3x4 preset is defined for n = 15 and n = 35")
    spec = preset_3x4(n, Variant.EQ2)
    poly = build_objective(spec)
    s_val = safe_penalty_bound(poly) if s == "safe" else int(s)
    hw = (hw or UNDEGRADED).with_param_chain(param_chain)
    rec, _ = run_point(spec, s_val, hw, seed, solver, poly=poly)
    cfg = spec.to_config()
    cfg.update(hw.to_config(seed))
    cfg["s"] = str(s_val)
    cfg["solver"] = solver
    return RunReport(config=cfg, master_seed=seed, runs=[rec])


def published_sweep_config(n: int, paper_scale: bool = False, **overrides) -> SweepConfig:
    """Sweep over the hardware-run grid for ``n`` with ``S = param_chain // 3``."""
    kw = dict(
        spec=ProblemSpec(n),
        grids=PUBLISHED_GRIDS[n],
        s_rule=THIRD_OF_PARAM_CHAIN,
        samples_per_run=1000 if paper_scale else 200,
    )
    kw.update(overrides)
    return SweepConfig(**kw)


# -- diagnostics -------------------------------------------------------------


def log10_histogram(values: Iterable[float]) -> Dict[int, int]:
    """Counts of nonzero magnitudes by decade (``floor(log10 |v|)``)."""
    hist: Dict[int, int] = {}
    for v in values:
        if v:
            k = math.floor(math.log10(abs(v)))
            hist[k] = hist.get(k, 0) + 1
    return dict(sorted(hist.items()))


def tiebreak_quantized_share(spec: ProblemSpec, scale_factor: float, hw: HardwareModel) -> Tuple[int, int]:
    """How many coefficients of the ``x (x - y)^2`` part vanish on the hardware grid.

    Returns ``(zeroed, total)``.  EQ2 divides the term by 4 before scaling.
    """
    from .objective import objective_terms_by_source

    tiebreak = dict(objective_terms_by_source(spec))["tiebreak"]
    div = 4 if spec.variant is Variant.EQ2 else 1
    half = hw.grid_step / 2
    coeffs = [c for m, c in tiebreak.items() if m]
    zeroed = sum(1 for c in coeffs if abs(c) / div * scale_factor < half)
    return zeroed, len(coeffs)


def diagnose(spec: ProblemSpec, s: Union[int, str] = "safe", hw: HardwareModel = HardwareModel(), seed: int = 0) -> Dict:
    """Coefficient statistics for one instance, as a JSON-friendly dict."""
    poly = build_objective(spec)
    safe = safe_penalty_bound(poly)
    s_val = safe if s == "safe" else int(s)
    q = quadratize(poly, s_val)
    d = degrade(q, hw, seed)
    hi, lo, ratio = dynamic_range(q)
    zeroed_qubo = sum(1 for c in q.coefficients() if abs(c) * d.scale_factor < hw.grid_step / 2)
    tb_zero, tb_total = (
        tiebreak_quantized_share(spec, d.scale_factor, hw)
        if spec.variant in (Variant.EQ1, Variant.EQ2)
        else (0, 0)
    )
    return {
        "problem": spec.to_config(),
        "s": s_val,
        "safe_penalty_bound": safe,
        "degree": poly.degree(),
        "ancillas": len(q.ancilla_defs),
        "logical_variables": len(q.variables()),
        "physical_variables": len(d.physical_variables),
        "max_abs": hi,
        "min_abs": lo,
        "range_ratio": ratio,
        "scale_factor": d.scale_factor,
        "grid_step": hw.grid_step,
        "coefficients_zeroed_by_quantization": zeroed_qubo,
        "tiebreak_coefficients_zeroed": [tb_zero, tb_total],
        "qubo_log10_histogram": log10_histogram(q.coefficients()),
        "objective_log10_histogram": log10_histogram(c for m, c in poly.items() if m),
    }
