"""Scenario pipelines, artifact emission and parameter sweeps."""

from __future__ import annotations

import csv
import hashlib
import json
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from . import asymptotics as A
from . import distributions as D
from .config import ConfigError, ExperimentConfig, SweepSpec, dumps
from .dft import DistortedBasis, SpectralFunction, japanese
from .grid import FieldPair, Grid
from .kink import KinkParams, moving_kink
from .modulation import fit
from .solver import SolverConfig, evolve_moving_frame

TIMESERIES_COLUMNS = ("t", "ell", "q", "qdot", "elldot", "defect1", "defect2", "E", "P", "M",
                      "sup_u1", "sup_u2", "sup_du1", "boundary_mass")
DIAGNOSTICS_COLUMNS = ("t", "xi", "abs_g", "arg_g", "Lambda", "theta")
SPECTRUM_COLUMNS = ("xi", "re_g", "im_g")
PROFILE_EVERY = 10.0


class StageError(RuntimeError):
    """A pipeline stage failed; ``stage`` names it for the manifest."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class RunManifest:
    config: str
    version: str
    wall_time: float = 0.0
    checks: dict = field(default_factory=dict)
    files: list = field(default_factory=list)
    failed_stage: str | None = None
    error: str | None = None

    def write(self, path) -> None:
        _atomic_write(path, json.dumps(self.__dict__, indent=2, sort_keys=True) + "\n")


def _atomic_write(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        fh.write(text)
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path, columns, rows) -> None:
    """CSV with floats at 17 significant digits."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    with os.fdopen(fd, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    os.chmod(tmp, 0o644)
    os.replace(tmp, path)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o).__name__)


def write_json(path, data) -> None:
    _atomic_write(path, json.dumps(data, indent=2, sort_keys=True, default=_json_default) + "\n")


def file_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# Identity verification

def verify_identities(pairing: bool = True) -> dict:
    """Run the transform and distribution oracles; each entry carries a verdict."""
    out = {"transforms": [r.as_dict() for r in D.transform_oracle()]}
    out["static_factorizations"] = [{k: v for k, v in r.as_dict().items() if k != "points"}
                         for r in D.static_oracle()]
    null = []
    for ell in (0.0, 0.4):
        nd = D.NullFactorData(ell)
        vals = [abs(nd.source_transform(x)) for x in nd.resonant_frequencies()]
        null.append({"ell": ell, "max_abs": max(vals),
                     "verdict": "pass" if max(vals) < 1e-10 else "fail"})
    out["null_resonance"] = null
    grid = np.linspace(-2.0, 2.0, 9)
    errs = []
    for ell in (0.0, 0.3):
        for a in grid:
            for b in grid:
                c = complex(D.quad_dist("+-", ell, a, b))
                q = D.quad_dist("+-", ell, a, b, method="quadrature")
                errs.append(D._rel_err(c, q))
    out["mu_plus_minus"] = {"max_rel_err": max(errs),
                            "verdict": "pass" if max(errs) < 1e-8 else "fail"}
    diag = []
    for ell in (0.0, 0.3):
        for x in np.linspace(-2.0, 2.0, 5):
            d0 = complex(D.cubic_coeff("+-+", "delta", ell, x, x, x, x))
            pv = complex(D.cubic_coeff("+-+", "pv", ell, x, x, x, x))
            diag.append(max(abs(d0 - 1 / (2 * np.pi)), abs(pv)))
    out["cubic_diagonal"] = {"max_abs_err": max(diag),
                             "verdict": "pass" if max(diag) < 1e-12 else "fail"}
    if pairing:
        tests = (D.Gaussian(1.0, 0.2), D.Gaussian(1.4, 0.2), D.Gaussian(0.9, 0.2))
        rows = []
        for pat in D.CUBIC_PATTERNS:
            r = D.mollified_pairing(pat, 0.3, 1.0, tests)
            rows.append({"pattern": pat, "rel_err": r.rel_err,
                         "verdict": "pass" if r.rel_err < 1e-8 else "fail"})
        out["cubic_pairing"] = rows
    return out


def _identity_checks(report: dict) -> dict:
    checks = {}
    for r in report["transforms"]:
        checks[f"transform {r['identity']} ({r['form']})"] = r["verdict"] == "pass"
    for r in report["static_factorizations"]:
        checks[f"factorization {r['identity']} ({r['form']})"] = r["verdict"] == "pass"
    for r in report["null_resonance"]:
        checks[f"resonant null at ell={r['ell']}"] = r["verdict"] == "pass"
    checks["mu+- closed form"] = report["mu_plus_minus"]["verdict"] == "pass"
    checks["cubic diagonal"] = report["cubic_diagonal"]["verdict"] == "pass"
    for r in report.get("cubic_pairing", []):
        checks[f"cubic pairing {r['pattern']}"] = r["verdict"] == "pass"
    return checks


# ---------------------------------------------------------------------------
# Initial data

def initial_state(cfg: ExperimentConfig):
    """(moving-frame radiation, (ell, q)) after fitting the modulation parameters."""
    grid = Grid(cfg.grid.L, cfg.grid.N)
    p = cfg.physics
    params = KinkParams(p.ell0, p.x0)
    if p.family == "dft-band":
        rng = np.random.default_rng(cfg.seed)
        b = DistortedBasis(grid, p.ell0)
        xi = b.xi
        s = np.clip((np.abs(xi) - p.band_lo) / (p.band_hi - p.band_lo), 0.0, 1.0)
        bump = np.where((s > 0) & (s < 1), np.exp(-1.0 / np.maximum(s * (1 - s), 1e-300) + 4), 0.0)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi))
        h = SpectralFunction(xi, p.amplitude * phase * bump)
        u = b.invert_physical(h)
        shift = np.exp(1j * grid.k * p.x0)
        u = FieldPair(grid, np.fft.ifft(np.fft.fft(u.first) / shift).real,
                      np.fft.ifft(np.fft.fft(u.second) / shift).real)
        k = moving_kink(grid, params)
        phi = FieldPair(grid, k.first + u.first, k.second + u.second)
    else:
        k = moving_kink(grid, params)
        z = (grid.x - p.center) / p.width
        bump = np.exp(-z * z)
        if p.family == "odd-bump":
            bump = z * bump
        phi = FieldPair(grid, k.first + p.amplitude * bump, k.second)
    d = fit(phi, params)
    return d.u, d.params


def solver_config(cfg: ExperimentConfig) -> SolverConfig:
    s = cfg.solver
    grid = Grid(cfg.grid.L, cfg.grid.N)
    dt = s.dt if s.dt > 0 else s.dt_factor * grid.h
    return SolverConfig(T=s.T, dt=dt, integrator=s.integrator, monitor_every=s.monitor_every,
                        sponge=s.sponge, sponge_strength=s.sponge_strength,
                        sponge_fraction=s.sponge_fraction)


# ---------------------------------------------------------------------------
# Dynamics pipeline

@dataclass
class RunResult:
    record: dict
    summary: dict
    checks: dict
    profile_rows: list = field(default_factory=list)
    spectrum_rows: list = field(default_factory=list)
    final_u1: np.ndarray | None = None


def simulate(cfg: ExperimentConfig, diagnostics: bool = True) -> RunResult:
    """Fit, evolve and analyse one kink scenario."""
    stage = "initial-data"
    try:
        u0, params0 = initial_state(cfg)
        stage = "evolve"
        traj = evolve_moving_frame(u0, params0, solver_config(cfg))
        stage = "diagnostics"
        return _analyse(cfg, traj, diagnostics)
    except Exception as exc:
        raise StageError(stage, exc) from exc


def _analyse(cfg: ExperimentConfig, traj, diagnostics: bool) -> RunResult:
    rec = {k: traj.record[k] for k in TIMESERIES_COLUMNS}
    t = rec["t"]
    d = cfg.diagnostics
    summary = {"T": float(t[-1]), "ell_final": float(rec["ell"][-1]),
               "q_final": float(rec["q"][-1])}
    checks = {}
    m = t <= d.conservation_until
    drifts = {k: float(np.abs(rec[k][m] / rec[k][0] - 1).max()) if rec[k][0] != 0
              else float(np.abs(rec[k][m]).max()) for k in ("E", "P", "M")}
    summary["conservation_drift"] = drifts
    for k, v in drifts.items():
        checks[f"conservation {k}"] = v < d.conservation_tol
    gamma = 1.0 / np.sqrt(1 - rec["ell"][0] ** 2)
    summary["E_over_gamma"] = float(rec["E"][0] / gamma)
    defect = float(max(np.abs(rec["defect1"]).max(), np.abs(rec["defect2"]).max()))
    summary["max_defect"] = defect
    checks["orthogonality defects"] = defect < 1e-7
    window = (d.window_start, d.window_end)
    fits_possible = (cfg.physics.amplitude > 0 and diagnostics and d.decay
                     and t[-1] >= d.window_end)
    result = RunResult(rec, summary, checks, final_u1=traj.snapshots[-1].first
                       if traj.snapshots else None)
    if not fits_possible:
        summary["decay_fits"] = "skipped"
        return result
    decay = A.fit_decay(t, rec["sup_u1"], window)
    mod = A.fit_modulation_convergence(t, rec["ell"], rec["qdot"], window)
    summary["decay_exponent_u1"] = decay.exponent
    summary["decay_exponent_stderr"] = decay.stderr
    summary["modulation_exponent_qdot"] = mod.qdot.exponent
    summary["modulation_exponent_ell"] = mod.ell.exponent
    checks["decay exponent"] = abs(decay.exponent + 0.5) <= 0.1
    checks["modulation exponent"] = abs(mod.qdot.exponent + 1.0) <= 0.3
    if not d.phase:
        return result
    ell_bar = float(rec["ell"][-1])
    series = A.effective_profile(traj.snapshots, t, ell_bar)
    band = (d.band_lo, d.band_hi)
    pd = A.phase_diagnostics(series, t, rec["q"], window, band)
    var = A.band_sup_variation(series, window, band)
    summary["band_sup_variation"] = var
    summary["drift_uncorrected"] = pd.drift_uncorrected
    summary["drift_corrected"] = pd.drift_corrected
    summary["drift_ratio"] = pd.drift_ratio
    checks["profile band variation"] = var < 0.25
    checks["phase correction drift ratio"] = pd.drift_ratio >= 2.0
    xi = series.xi
    idx = np.flatnonzero(pd.band)
    idx = idx[np.argsort(xi[idx])]
    g = series.values
    targets = np.arange(0.0, t[-1] + 0.5 * PROFILE_EVERY, PROFILE_EVERY)
    for n in np.unique([int(np.argmin(np.abs(t - s))) for s in targets]):
        tn = t[n]
        for k in idx:
            result.profile_rows.append((tn, xi[k], abs(g[n, k]), np.angle(g[n, k]),
                                        pd.Lambda[n, k], pd.theta[n]))
    # asymptotic profile estimate: corrected profile at the final snapshot
    g_inf = pd.corrected[-1] / japanese(xi) ** 1.5
    for k in np.argsort(xi):
        result.spectrum_rows.append((xi[k], g_inf[k].real, g_inf[k].imag))
    return result


# ---------------------------------------------------------------------------
# Entry points

def run(cfg: ExperimentConfig, out=None) -> tuple[int, RunManifest]:
    """Execute one scenario and write its artifacts; returns (exit status, manifest)."""
    cfg.validate()
    out = Path(out if out is not None else cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config.ini").write_text(dumps(cfg))
    man = RunManifest(dumps(cfg), __version__, files=["config.ini"])
    start = time.perf_counter()
    status = 0
    try:
        if cfg.scenario == "verify-identities":
            try:
                report = verify_identities()
            except Exception as exc:
                raise StageError("verify-identities", exc) from exc
            write_json(out / "identities.json", report)
            man.files.append("identities.json")
            man.checks = _identity_checks(report)
            write_json(out / "summary.json", {"scenario": cfg.scenario, "checks": man.checks})
            man.files.append("summary.json")
        else:
            res = simulate(cfg)
            rows = zip(*(res.record[k] for k in TIMESERIES_COLUMNS))
            write_csv(out / "timeseries.csv", TIMESERIES_COLUMNS, rows)
            man.files.append("timeseries.csv")
            if res.profile_rows:
                write_csv(out / "diagnostics.csv", DIAGNOSTICS_COLUMNS, res.profile_rows)
                write_csv(out / "spectrum.csv", SPECTRUM_COLUMNS, res.spectrum_rows)
                man.files += ["diagnostics.csv", "spectrum.csv"]
            man.checks = res.checks
            write_json(out / "summary.json", {"scenario": cfg.scenario, **res.summary,
                                              "checks": res.checks})
            man.files.append("summary.json")
    except StageError as exc:
        man.failed_stage, man.error = exc.stage, str(exc)
        status = 1
    man.wall_time = time.perf_counter() - start
    man.write(out / "manifest.json")
    return status, man


SWEEP_COLUMNS = ("run", "params", "status", "N", "dt", "ell0", "amplitude", "E", "P", "M",
                 "E_over_gamma", "ell_final", "q_final", "max_defect", "error")


def _sweep_point(args):
    i, cfg_dict, overrides = args
    cfg = ExperimentConfig.from_dict(cfg_dict)
    try:
        cfg = cfg.replace(**overrides).validate()
        res = simulate(cfg, diagnostics=False)
    except (ConfigError, StageError) as exc:
        return {"run": i, "params": overrides, "status": "failed", "error": str(exc)}
    r, s = res.record, res.summary
    return {"run": i, "params": overrides, "status": "ok", "N": cfg.grid.N,
            "dt": solver_config(cfg).dt, "ell0": cfg.physics.ell0,
            "amplitude": cfg.physics.amplitude, "E": r["E"][-1], "P": r["P"][-1],
            "M": r["M"][-1], "E_over_gamma": s["E_over_gamma"], "ell_final": s["ell_final"],
            "q_final": s["q_final"], "max_defect": s["max_defect"], "error": "",
            "_u1": res.final_u1}


def _run_points(tasks, threads: int):
    if threads <= 1 or len(tasks) <= 1:
        return [_sweep_point(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(_sweep_point, tasks))


def convergence_overrides(cfg: ExperimentConfig, levels: int) -> list:
    """Level k doubles N k times and halves dt k times."""
    rows = []
    for k in range(levels):
        o = {"grid.N": cfg.grid.N * 2 ** k}
        if cfg.solver.dt > 0:
            o["solver.dt"] = cfg.solver.dt / 2 ** k
        rows.append(o)
    return rows


def observed_orders(finals: list):
    """Successive differences on the coarsest grid points and log2 of their ratios."""
    coarse = len(finals[0])
    sub = [f[:: len(f) // coarse] for f in finals]
    errs = [float(np.abs(a - b).max()) for a, b in zip(sub[:-1], sub[1:])]
    orders = [float(np.log2(e0 / e1)) if e1 > 0 else float("nan")
              for e0, e1 in zip(errs[:-1], errs[1:])]
    return errs, orders


def sweep(cfg: ExperimentConfig, spec: SweepSpec, out, threads: int = 1) -> tuple[int, dict]:
    """Independent runs over a parameter grid; one aggregate CSV row per run."""
    cfg.validate()
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    if spec.mode == "convergence":
        overrides = convergence_overrides(cfg, spec.levels)
    else:
        overrides = spec.points
    tasks = [(i, cfg.to_dict(), o) for i, o in enumerate(overrides)]
    rows = _run_points(tasks, threads)
    table = []
    for r in rows:
        table.append([json.dumps(r["params"], sort_keys=True) if c == "params" else r.get(c, "")
                      for c in SWEEP_COLUMNS])
    write_csv(out / "sweep.csv", SWEEP_COLUMNS, table)
    summary = {"mode": spec.mode, "runs": len(rows),
               "failed": sum(r["status"] != "ok" for r in rows)}
    if spec.mode == "convergence" and summary["failed"] == 0 and len(rows) >= 3:
        errs, orders = observed_orders([r["_u1"] for r in rows])
        summary["errors"] = errs
        summary["observed_orders"] = orders
        write_csv(out / "convergence.csv", ("level", "N", "dt", "error", "observed_order"),
                  [(k, rows[k]["N"], rows[k]["dt"], errs[k] if k < len(errs) else "",
                    orders[k - 1] if 0 < k <= len(orders) else "") for k in range(len(rows))])
    write_json(out / "sweep_summary.json", summary)
    return 0, summary
