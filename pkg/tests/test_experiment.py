import csv
import logging
import math

import numpy as np
import pytest

from conftest import SMALL
from mecoffload.baselines import SchemeId, run_scheme
from mecoffload.experiment import (
    CSV_HEADER,
    ExperimentSpec,
    ResultRow,
    Sweep,
    apply_sweep,
    ci95,
    emit_csv,
    fig6_gap,
    preset,
    read_csv,
    relative_gap,
    run,
    scenario_digest,
)
from mecoffload.scenario import ScenarioConfig, derive_seed, generate


def naive_ci(xs):
    n = len(xs)
    mean = sum(xs) / n
    var = sum((x - mean) ** 2 for x in xs) / (n - 1)
    return 1.96 * math.sqrt(var) / math.sqrt(n)


def test_ci95_against_two_pass():
    rng = np.random.default_rng(0)
    for n in (2, 5, 100):
        xs = list(rng.normal(3, 2, n))
        assert ci95(xs) == pytest.approx(naive_ci(xs), rel=1e-12)
    assert ci95([4.2]) == 0.0


def test_single_drop_single_scheme():
    rows = run(ExperimentSpec(SMALL, (SchemeId.HJTORA,), drops=1))
    assert len(rows) == 1
    r = rows[0]
    assert r.scheme == "hJTORA" and r.drops == 1 and r.ci95_halfwidth == 0.0
    assert math.isnan(r.sweep_value) and r.mean_runtime_ms > 0


def test_rows_match_direct_evaluation():
    spec = ExperimentSpec(SMALL, (SchemeId.GOJRA, SchemeId.HJTORA), drops=4, master_seed=9)
    rows = run(spec)
    for row in rows:
        vals, delays = [], []
        for i in range(4):
            seed = derive_seed(9, i)
            scen = generate(SMALL, seed)
            rep = run_scheme(row.scheme, scen, seed).report(scen, "exact")
            vals.append(rep.system_utility)
            delays.append(np.mean(list(rep.per_user_delay.values())))
        assert row.mean_utility == pytest.approx(np.mean(vals), rel=1e-12)
        assert row.ci95_halfwidth == pytest.approx(naive_ci(vals), rel=1e-9)
        assert row.mean_user_delay == pytest.approx(np.mean(delays), rel=1e-12)


def test_deterministic_csv(tmp_path):
    spec = ExperimentSpec(SMALL, drops=3, measure_runtime=False)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(run(spec), a)
    emit_csv(run(spec), b)
    assert a.read_bytes() == b.read_bytes()


def test_timed_runs_agree_except_runtime():
    spec = ExperimentSpec(SMALL, drops=2)
    strip = [r.astuple()[:6] for r in run(spec)]
    assert strip == [r.astuple()[:6] for r in run(spec)]


def test_workers_do_not_change_results():
    spec = ExperimentSpec(SMALL, drops=4, measure_runtime=False,
                          sweep=Sweep("c_u", (1000.0, 2000.0)))
    assert run(spec, workers=2) == run(spec, workers=1)


def test_paired_drops_share_scenarios(caplog):
    spec = ExperimentSpec(SMALL, (SchemeId.GOJRA, SchemeId.IOJRA), drops=2)
    with caplog.at_level(logging.DEBUG, logger="mecoffload.experiment"):
        run(spec)
    logged = [m for m in caplog.messages if "scenario" in m]
    expect = [scenario_digest(generate(SMALL, derive_seed(0, i))) for i in range(2)]
    assert [m.split()[-1] for m in logged] == expect


def test_sweep_rows_in_order():
    spec = ExperimentSpec(SMALL, (SchemeId.IOJRA, SchemeId.GOJRA), drops=2,
                          sweep=Sweep("beta_t", (0.2, 0.8)))
    rows = run(spec)
    assert [(r.sweep_value, r.scheme) for r in rows] == [
        (0.2, "IOJRA"), (0.2, "GOJRA"), (0.8, "IOJRA"), (0.8, "GOJRA")]


def test_apply_sweep():
    assert apply_sweep(SMALL, "users_per_cell", 3).subbands == 3
    assert apply_sweep(SMALL, "users_per_cell", 3).total_users == 12
    assert apply_sweep(SMALL, "c_u", 2500).workload_megacycles == 2500
    assert apply_sweep(SMALL, "d_u", 100).input_kb == 100
    assert apply_sweep(SMALL, "P_u_dbm", 30).max_power_dbm == 30
    with pytest.raises(ValueError):
        apply_sweep(SMALL, "bandwidth", 1)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(SMALL, drops=0)
    with pytest.raises(ValueError):
        Sweep("c_u", ())
    with pytest.raises(ValueError):
        ExperimentSpec(SMALL, interference_mode="fast")


def test_exhaustive_guard_gives_warning_row(caplog):
    big = ScenarioConfig(num_cells=7, users_per_cell=4)
    spec = ExperimentSpec(big, (SchemeId.GOJRA, SchemeId.EXHAUSTIVE), drops=1)
    with caplog.at_level(logging.WARNING):
        rows = run(spec)
    ex = [r for r in rows if r.scheme == "Exhaustive"][0]
    assert ex.drops == 0 and math.isnan(ex.mean_utility)
    assert any("Exhaustive skipped" in m for m in caplog.messages)


def test_both_modes_label_rows():
    spec = ExperimentSpec(SMALL, (SchemeId.HJTORA,), drops=2, interference_mode="both")
    assert [r.scheme for r in run(spec)] == ["hJTORA[approx]", "hJTORA[exact]"]


def test_csv_format(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv([], path)
    assert path.read_text() == ",".join(CSV_HEADER) + "\n"
    rows = [ResultRow(1.0, "hJTORA", 1 / 3, 0.1, 2.0, 3.0, 0.5, 7),
            ResultRow(math.nan, "GOJRA", -2.5e-7, 0.0, 1e10, 1.0, 12.25, 1)]
    path = tmp_path / "r.csv"
    emit_csv(rows, path)
    lines = list(csv.reader(path.open()))
    assert all(len(line) == 8 for line in lines)
    assert lines[1][2] == "0.333333333"
    back = read_csv(path)
    assert back[0].astuple() == pytest.approx(
        tuple(float("%.9g" % x) if isinstance(x, float) else x for x in rows[0].astuple()))
    assert back[1].scheme == "GOJRA" and math.isnan(back[1].sweep_value)
    with pytest.raises(OSError, match="cannot write"):
        emit_csv(rows, tmp_path / "missing" / "x.csv")


def test_fig6_gap_single_user_is_zero():
    cfg = ScenarioConfig(num_cells=1, users_per_cell=1)
    spec = ExperimentSpec(cfg, (SchemeId.HJTORA,), drops=3,
                          sweep=Sweep("P_u_dbm", (10.0, 20.0, 35.0)))
    for p, a, e in fig6_gap(spec):
        assert relative_gap(a, e) == 0.0
    with pytest.raises(ValueError):
        fig6_gap(ExperimentSpec(cfg, drops=1))


def test_presets():
    assert preset("fig2", "b").scenario.workload_megacycles == 2000
    assert preset("fig3").sweep.values == tuple(range(1, 11))
    assert preset("fig3", "b").scenario.cell_workload_megacycles[2] == 2000
    assert preset("fig4", "b").sweep.name == "d_u"
    assert preset("fig5", "b").scenario.total_users == 21
    assert preset("fig6").interference_mode == "both"
    assert [s.value for s in preset("table1").schemes] == [
        "IOJRA", "GOJRA", "DORA", "hJTORA", "Exhaustive"]
    with pytest.raises(ValueError):
        preset("fig9")
