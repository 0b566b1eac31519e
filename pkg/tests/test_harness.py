import json

import numpy as np
import pytest
from click.testing import CliRunner
from hypothesis import given, strategies as st

from kinklab import config as C
from kinklab.cli import main
from kinklab.harness import file_hash, observed_orders, run, sweep

SMALL = """
[run]
scenario = boosted-kink
out = {out}
[grid]
L = 60.0
N = 256
[solver]
T = 2.0
[physics]
ell0 = 0.3
amplitude = 0.02
"""


def small(tmp_path, name="run", **over):
    cfg = C.loads(SMALL.format(out=tmp_path / name))
    return cfg.replace(**over) if over else cfg


configs = st.builds(
    lambda L, logN, T, f, integ, sp, ell, fam, amp, w, c, seed, scen: C.ExperimentConfig(
        scenario=scen, seed=seed, out="runs/x",
        grid=C.GridSection(L, 2 ** logN),
        solver=C.SolverSection(T=T, dt_factor=f, integrator=integ, sponge=sp),
        physics=C.PhysicsSection(ell0=ell, family=fam, amplitude=amp, width=w, center=c)),
    st.floats(10, 1000), st.integers(4, 14), st.floats(0, 500), st.floats(0.01, 0.5),
    st.sampled_from(C.INTEGRATORS), st.booleans(), st.floats(-0.99, 0.99),
    st.sampled_from(C.FAMILIES), st.floats(0, 1), st.floats(0.1, 5), st.floats(-2, 2),
    st.integers(0, 2 ** 32), st.sampled_from(C.SCENARIOS))


@given(cfg=configs)
def test_config_round_trip(cfg):
    once = C.loads(C.dumps(cfg))
    assert once == cfg
    assert C.loads(C.dumps(once)) == once


def test_defaults_are_flagship():
    cfg = C.ExperimentConfig().validate()
    assert (cfg.grid.L, cfg.grid.N, cfg.solver.T) == (640.0, 8192, 200.0)
    assert (cfg.physics.ell0, cfg.physics.amplitude) == (0.2, 0.05)


@pytest.mark.parametrize("text, field", [
    ("[grid]\nN = 1000\n", "grid.N"),
    ("[physics]\nell0 = 1.5\n", "physics.ell0"),
    ("[physics]\nfamily = square\n", "physics.family"),
    ("[solver]\nintegrator = euler\n", "solver.integrator"),
    ("[run]\nscenario = nothing\n", "run.scenario"),
])
def test_validation_names_field(text, field):
    with pytest.raises(C.ConfigError) as e:
        C.loads(text).validate()
    assert e.value.field == field


def test_unknown_keys_rejected():
    with pytest.raises(C.ConfigError):
        C.loads("[grid]\nM = 3\n")
    with pytest.raises(C.ConfigError):
        C.loads("[extra]\na = 1\n")
    with pytest.raises(C.ConfigError):
        C.loads("[grid]\nN = many\n")


def test_run_writes_artifacts(tmp_path):
    status, man = run(small(tmp_path))
    out = tmp_path / "run"
    assert status == 0
    for f in ("timeseries.csv", "summary.json", "manifest.json", "config.ini"):
        assert (out / f).exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["decay_fits"] == "skipped"
    assert man.checks["orthogonality defects"]
    row = (out / "timeseries.csv").read_text().splitlines()[1].split(",")
    assert len(row) == 14
    assert C.loads((out / "config.ini").read_text()) == small(tmp_path)


def test_run_is_deterministic(tmp_path):
    run(small(tmp_path, "a", **{"physics.family": "dft-band", "seed": 3}))
    run(small(tmp_path, "b", **{"physics.family": "dft-band", "seed": 3}))
    run(small(tmp_path, "c", **{"physics.family": "dft-band", "seed": 4}))
    h = lambda d: file_hash(tmp_path / d / "timeseries.csv")
    assert h("a") == h("b")
    assert h("a") != h("c")


def test_dft_band_initial_data_is_orthogonal(tmp_path):
    from kinklab.harness import initial_state
    cfg = small(tmp_path, **{"physics.family": "dft-band", "physics.amplitude": 0.05})
    u, p = initial_state(cfg)
    assert abs(p.ell - 0.3) < 1e-8
    assert u.sup() > 1e-3


def test_failing_stage_recorded(tmp_path):
    status, man = run(small(tmp_path, **{"physics.amplitude": 5.0}))
    assert status == 1
    assert man.failed_stage == "initial-data"
    assert json.loads((tmp_path / "run" / "manifest.json").read_text())["failed_stage"]


def test_energy_sweep(tmp_path):
    cfg = small(tmp_path, "sweep", **{"physics.amplitude": 0.0, "solver.T": 1.0})
    spec = C.loads_sweep("[sweep]\nphysics.ell0 = -0.5, 0, 0.5\n")
    status, summary = sweep(cfg, spec, tmp_path / "sweep", threads=2)
    assert status == 0 and summary["failed"] == 0
    lines = (tmp_path / "sweep" / "sweep.csv").read_text().splitlines()
    col = lines[0].split(",").index("E_over_gamma")
    import csv
    rows = list(csv.reader(lines[1:]))
    assert len(rows) == 3
    for r in rows:
        assert abs(float(r[col]) - 8.0) < 1e-8


def test_sweep_records_failures_and_continues(tmp_path):
    cfg = small(tmp_path, "sweep", **{"solver.T": 0.5})
    spec = C.loads_sweep("[sweep]\nphysics.amplitude = 0.01, 9.0\n")
    status, summary = sweep(cfg, spec, tmp_path / "sweep")
    assert status == 0
    assert summary == {"mode": "grid", "runs": 2, "failed": 1}


def test_empty_sweep(tmp_path):
    status, summary = sweep(small(tmp_path), C.loads_sweep("[sweep]\n"), tmp_path / "e")
    assert status == 0 and summary["runs"] == 0
    assert (tmp_path / "e" / "sweep.csv").read_text().count("\n") == 1


def test_convergence_order(tmp_path):
    cfg = C.loads("""
[run]
scenario = stationary-kink
[grid]
L = 40.0
N = 128
[solver]
T = 4.0
dt = 0.1
monitor_every = 4.0
[physics]
ell0 = 0.0
amplitude = 0.1
""")
    status, summary = sweep(cfg, C.loads_sweep("[sweep]\nmode = convergence\nlevels = 4\n"),
                            tmp_path / "conv", threads=2)
    assert all(abs(p - 4.0) < 0.2 for p in summary["observed_orders"])


def test_observed_orders_synthetic():
    base = np.linspace(0, 1, 8)
    finals = [np.repeat(base + 16.0 ** -k, 2 ** k) for k in range(4)]
    errs, orders = observed_orders(finals)
    np.testing.assert_allclose(orders, 4.0)


def test_cli_config_error_exit_code(tmp_path):
    p = tmp_path / "bad.ini"
    p.write_text("[grid]\nN = 1000\n")
    r = CliRunner().invoke(main, ["run", str(p)])
    assert r.exit_code == 2
    assert "grid.N" in r.output


def test_cli_run_and_overrides(tmp_path):
    p = tmp_path / "ok.ini"
    p.write_text(C.dumps(small(tmp_path)))
    r = CliRunner().invoke(main, ["run", str(p), "--out", str(tmp_path / "cli"), "--seed", "7"])
    assert r.exit_code == 0, r.output
    assert "PASS" in r.output
    echoed = C.loads((tmp_path / "cli" / "config.ini").read_text())
    assert echoed.seed == 7


def test_cli_empty_sweep(tmp_path):
    p, g = tmp_path / "ok.ini", tmp_path / "grid.ini"
    p.write_text(C.dumps(small(tmp_path)))
    g.write_text("[sweep]\n")
    r = CliRunner().invoke(main, ["sweep", str(p), str(g), "--out", str(tmp_path / "s"),
                                  "--threads", "2"])
    assert r.exit_code == 0
    assert "0 runs" in r.output
