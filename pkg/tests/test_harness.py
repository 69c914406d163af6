import csv
import io
import json
import math

import pytest

from factorqubo.config import format_config, parse_config
from factorqubo.hardware import UNDEGRADED, HardwareModel, degrade
from factorqubo.harness import (
    CSV_COLUMNS,
    FORMAT_VERSION,
    PUBLISHED_GRIDS,
    SAFE_BOUND,
    THIRD_OF_PARAM_CHAIN,
    Grid,
    RunReport,
    SRule,
    SweepConfig,
    diagnose,
    emit_report,
    grid_points,
    log10_histogram,
    published_sweep_config,
    parse_report,
    run_point,
    run_preset_3x4,
    run_seeds,
    run_sweep,
    run_table1,
)
from factorqubo.objective import ProblemSpec, build_objective
from factorqubo.quadratize import quadratize, safe_penalty_bound
from factorqubo.solve import AnnealSchedule

N15_GRID = list(range(10, 101, 10)) + list(range(120, 301, 20)) + list(range(400, 11401, 100))


def test_run_table1_rows():
    rows = run_table1([(15, 3, 5), (91, 7, 13)])
    assert [tuple(r) for *_, r in rows] == [(0, -44_100, 12, -11_022), (0, -67_076_100, 252, -16_768_962)]
    assert rows[0][:3] == (15, 3, 5)


def test_n15_grid_values():
    pts = grid_points(PUBLISHED_GRIDS[15])
    assert pts == N15_GRID
    assert len(pts) == 10 + 10 + 111
    assert pts[:3] == [10, 20, 30] and pts[-1] == 11_400


def test_other_published_grids():
    assert grid_points(PUBLISHED_GRIDS[91]) == list(range(300, 11401, 150))
    assert len(grid_points(PUBLISHED_GRIDS[91])) == 75
    assert grid_points(PUBLISHED_GRIDS[899]) == list(range(300, 9901, 300))


def test_grid_validation():
    with pytest.raises(ValueError):
        grid_points([Grid(10, 100, 10), Grid(100, 200, 50)])
    with pytest.raises(ValueError):
        Grid(5, 1, 1).points()
    with pytest.raises(ValueError):
        Grid(1, 5, 0).points()
    assert Grid.parse(" 1:9:4 ") == Grid(1, 9, 4)
    assert str(Grid(1, 9, 4)) == "1:9:4"


def test_s_rules():
    assert [THIRD_OF_PARAM_CHAIN.penalty(pc, 99) for pc in (10, 20, 300, 11_400, 1, 2)] == [3, 6, 100, 3800, 1, 1]
    assert SAFE_BOUND.penalty(10, 99) == 99
    assert SRule.parse("fixed:150").penalty(10, 99) == 150
    assert SRule.parse("Third") == THIRD_OF_PARAM_CHAIN
    with pytest.raises(ValueError):
        SRule.parse("double")


def test_sweep_records_follow_grid_and_s_rule():
    cfg = published_sweep_config(15, grids=(Grid(10, 100, 10), Grid(120, 300, 20)), solver="exact")
    report = run_sweep(cfg, 3)
    assert [r.param_chain for r in report.runs] == N15_GRID[:20]
    assert all(r.s == r.param_chain // 3 for r in report.runs)
    assert all(r.solver == "exact" for r in report.runs)


def test_run_seeds_are_independent_and_reproducible():
    a = run_seeds(5, 10)
    assert a == run_seeds(5, 10)
    assert len(set(a)) == 10
    assert run_seeds(6, 10) != a


def small_sweep_config(**kw):
    base = dict(
        spec=ProblemSpec(15, 3, 4),
        grids=(Grid(0, 20, 10), Grid(100, 100, 1)),
        s_rule=SRule("fixed", 150),
        samples_per_run=20,
        hw=HardwareModel(precision_bits=8, noise_sigma=0.01, chain_length=2),
        solver="sa",
        sched=AnnealSchedule(sweeps=100),
    )
    base.update(kw)
    return SweepConfig(**base)


def test_sweep_is_deterministic():
    cfg = small_sweep_config()
    a, b = run_sweep(cfg, 42), run_sweep(cfg, 42)
    b.generated_at = "2000-01-01T00:00:00+00:00"
    da, db = (json.loads(emit_report(r)) for r in (a, b))
    da.pop("generated_at")
    db.pop("generated_at")
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)
    assert emit_report(a, "csv") == emit_report(b, "csv")
    assert emit_report(run_sweep(cfg, 43), "csv") != emit_report(a, "csv")


def test_undegraded_exact_point_factors_15():
    cfg = published_sweep_config(15, grids=(Grid(10, 30, 10),), hw=UNDEGRADED, s_rule=SAFE_BOUND, solver="exact")
    report = run_sweep(cfg, 0)
    poly = build_objective(ProblemSpec(15))
    q = quadratize(poly, safe_penalty_bound(poly))
    for r in report.runs:
        assert r.valid >= 1 and (r.x, r.y) == (3, 5)
        # records carry the scaled, offset-free hardware energy
        assert r.best_energy == pytest.approx(r.scale_factor * (-11_022 - q.offset), rel=1e-9)
    assert report.summary["first_success"] == {"param_chain": 10, "s": report.runs[0].s}


def test_undegraded_low_s_lets_ancillas_cheat():
    # S = pc // 3 is far below the safe bound; the penalty no longer pins z = ab
    rec, res = run_point(ProblemSpec(15), 3, UNDEGRADED.with_param_chain(10), 0, "exact")
    assert rec.valid == 0
    q = quadratize(build_objective(ProblemSpec(15)), 3)
    assert res.best_energy < rec.scale_factor * (-11_022 - q.offset)


@pytest.mark.parametrize("n", [91, 899])
def test_degraded_published_sweep_has_no_valid_samples(n):
    report = run_sweep(published_sweep_config(n, solver="exact"), 0)
    assert report.summary["total_valid"] == 0
    assert report.summary["first_success"] is None
    assert len(report.runs) == len(grid_points(PUBLISHED_GRIDS[n]))


def test_degraded_15_low_s_admits_valid_ground_states():
    # recorded behaviour: at S = pc // 3 the penalties vanish on the grid and
    # (3, 5) ties with many cheating assignments
    rec, _ = run_point(ProblemSpec(15), 3, HardwareModel(param_chain=10), 0, "exact")
    assert rec.valid > 0 and rec.distinct > 1


def test_preset_3x4():
    low = run_preset_3x4(15)
    assert low.runs[0].s == 150 and low.runs[0].param_chain == 450
    assert low.runs[0].valid == 0  # S = 150 is below the safe bound
    for n, xy in ((15, (3, 5)), (35, (5, 7))):
        r = run_preset_3x4(n, s="safe").runs[0]
        assert r.valid >= 1 and (r.x, r.y) == xy
    with pytest.raises(ValueError):
        run_preset_3x4(91)


def test_3x4_range_smaller_than_4x4():
    small = diagnose(ProblemSpec(15, 3, 4))
    big = diagnose(ProblemSpec(15, 4, 4))
    assert small["range_ratio"] < big["range_ratio"]


def test_monotone_chain_integrity_and_saturation():
    pcs = (0, 10**4, 10**5, 3 * 10**5, 10**6, 10**8)
    cfg = small_sweep_config(grids=tuple(Grid(v, v, 1) for v in pcs), samples_per_run=50, sched=AnnealSchedule(sweeps=200))
    report = run_sweep(cfg, 1)
    unsat = [r for r in report.runs if not r.saturated]
    breaks = [r.mean_break_count for r in unsat]
    assert breaks == sorted(breaks, reverse=True)
    assert breaks[0] > 0 and breaks[-1] == 0
    assert [r.saturated for r in report.runs] == [False] * 4 + [True] * 2
    assert report.summary["saturated_runs"] == 2


def test_report_roundtrip_json():
    report = run_sweep(small_sweep_config(), 7)
    report.generated_at = "2026-01-01T00:00:00+00:00"
    back = parse_report(emit_report(report))
    assert back == report
    d = json.loads(emit_report(report))
    assert d["format_version"] == FORMAT_VERSION
    assert d["summary"]["total_runs"] == 4
    assert set(d) == {"format_version", "generated_at", "master_seed", "config", "runs", "summary"}


def test_report_rejects_other_versions():
    d = json.loads(emit_report(RunReport({}, 0)))
    d["format_version"] = 2
    with pytest.raises(ValueError):
        parse_report(json.dumps(d))


def test_empty_report():
    r = RunReport({"n": "15"}, 0)
    assert r.summary == {"total_runs": 0, "total_valid": 0, "first_success": None, "saturated_runs": 0}
    assert parse_report(emit_report(r)) == r
    assert emit_report(r, "csv").decode() == ",".join(CSV_COLUMNS) + "\n"
    with pytest.raises(ValueError):
        emit_report(r, "xml")


def test_csv_report():
    report = run_sweep(small_sweep_config(), 7)
    rows = list(csv.reader(io.StringIO(emit_report(report, "csv").decode())))
    assert rows[0] == ["param_chain", "s", "scale_factor", "range_ratio", "distinct", "valid", "best_energy", "x", "y"]
    assert len(rows) == 1 + len(report.runs)
    assert [int(r[0]) for r in rows[1:]] == [0, 10, 20, 100]
    assert float(rows[1][2]) == report.runs[0].scale_factor


def test_infinite_energy_serializes_as_null():
    report = run_sweep(small_sweep_config(grids=(Grid(0, 0, 1),)), 0)
    report.runs[0].best_energy = math.inf
    assert json.loads(emit_report(report))["runs"][0]["best_energy"] is None
    assert parse_report(emit_report(report)).runs[0].best_energy == math.inf


def test_sweep_config_roundtrip():
    cfg = small_sweep_config(sched=AnnealSchedule(sweeps=123, beta_start=0.5, beta_end=4.0))
    text = format_config(cfg.to_config())
    assert SweepConfig.from_text(text) == cfg
    pub = SweepConfig.from_text("n = 899\ngrids = published\n# comment\ns_rule = third\n")
    assert pub.points() == list(range(300, 9901, 300))
    assert pub.s_rule == THIRD_OF_PARAM_CHAIN
    with pytest.raises(ValueError):
        SweepConfig.from_text("n = 35\ngrids = published\n")
    with pytest.raises(ValueError):
        SweepConfig.from_text("n = 15\ngrids = 1:10:1\nsolver = qpu\n")


def test_paper_scale_config():
    assert published_sweep_config(15).samples_per_run == 200
    assert published_sweep_config(15, paper_scale=True).samples_per_run == 1000


def test_diagnose_899():
    info = diagnose(ProblemSpec(899))
    assert info["range_ratio"] >= 1e9
    assert info["ancillas"] == 12 and info["physical_variables"] == 20
    zeroed, total = info["tiebreak_coefficients_zeroed"]
    assert zeroed == total > 0
    assert info["coefficients_zeroed_by_quantization"] > 0
    poly = build_objective(ProblemSpec(899))
    q = quadratize(poly, safe_penalty_bound(poly))
    assert sum(info["qubo_log10_histogram"].values()) == len(q.coefficients())
    json.dumps(info, default=str)


def test_log10_histogram():
    assert log10_histogram([0, 5, -50, 999, 1000, 0.02]) == {-2: 1, 0: 1, 1: 1, 2: 1, 3: 1}


def test_config_parse_errors():
    for bad in ("n = 15\nn = 17\n", "[section]\nn = 1\n[section]\n", "just words\n"):
        with pytest.raises(ValueError):
            parse_config(bad)


def test_precision_sweep_exception_at_8_bits_for_899():
    # recorded behaviour: 8-bit grids leave (29, 31) among six tied ground states
    from factorqubo.solve import solve_exact

    spec = ProblemSpec(899)
    poly = build_objective(spec)
    q = quadratize(poly, safe_penalty_bound(poly))
    res = solve_exact(degrade(q, HardwareModel(precision_bits=8)), spec)
    assert len(res.samples) == 6
    assert {(s.x, s.y) for s in res.samples if s.valid} == {(29, 31), (31, 29)}
