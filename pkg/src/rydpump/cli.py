"""Scenario runner: every capability behind one subcommand with JSON configs,
deterministic seeds and CSV/JSON outputs.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.  Floats
are printed with 17 significant digits so outputs can be pinned byte-for-
byte; the manifest additionally records wall time, which is the one field
allowed to differ between repeat runs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .darkstate import DARK_XI, family_sizes, scaling_scan
from .dissipation import DressingConfig, fit_decay_rate, integrate_bloch
from .dynamics import (EvolutionProblem, build_effective_problem, build_full_problem,
                       evolve_master, evolve_trajectories, steady_state,
                       trace_distance)
from .entanglement import (boundary_curve, bound_table, build_w_basis, concurrence,
                           fidelity, witness)
from .hamiltonians import (DriveConfig, build_effective_model, prepare,
                           rydberg_spectrum)
from .lattice import LatticeSpec
from .states import QuantumState, make_w_state, partial_trace

SCENARIOS = (
    "spectrum", "effective", "evolve", "trajectory", "steady", "witness",
    "darkscan", "scaling", "bloch", "fig2a", "fig2b", "fig3", "fig4",
)


class ConfigError(ValueError):
    def __init__(self, errors: list[dict]):
        super().__init__("; ".join(e["field"] + ": " + e["message"] for e in errors))
        self.errors = errors


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

_DEFAULTS: dict[str, dict] = {
    "spectrum": {"lattice": {"n_sites": 6, "a0": 0.26, "xi": DARK_XI}},
    "effective": {"lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI}},
    "evolve": {
        "lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI},
        "dynamics": {"t_final": 200.0, "samples": 81},
    },
    "trajectory": {
        "lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI},
        "dynamics": {"t_final": 100.0, "samples": 51, "n_traj": 200},
    },
    "steady": {"lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI}},
    "witness": {"lattice": {"n_sites": 6, "a0": 0.285, "xi": 1.1996}},
    "darkscan": {"lattice": {"n_sites": 16, "a0": 0.26, "xi": DARK_XI}},
    "scaling": {"scan": {"n_max": 126, "include": [128], "rules": ["edges", "pattern_zeros"]}},
    "bloch": {"dressing": {"omega_d": 1000.0, "delta_d": 0.0, "gamma_e": 1e4},
              "t_final": None, "dt": None},
    "fig2a": {
        "lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI},
        "grid": {"xi_min": 1.12, "xi_max": 1.28, "xi_points": 9,
                 "a0_min": 0.2, "a0_max": 0.4, "a0_points": 9},
    },
    "fig2b": {
        "lattice": {"n_sites": 4, "a0": 0.26, "xi": DARK_XI},
        "dynamics": {"t_final": 200.0, "samples": 81},
    },
    "fig3": {
        "lattice": {"n_sites": 6, "a0": 0.285, "xi": 1.1996},
        "dynamics": {"t_final": 300.0, "samples": 121, "n_traj": 500},
    },
    "fig4": {"scan": {"n_max": 126, "include": [128], "rules": ["edges", "pattern_zeros"]}},
}

_LATTICE_KEYS = {"n_sites", "a0", "xi", "p"}
_DRIVE_KEYS = {"omega", "gamma_r", "delta", "reservoir"}
_DYNAMICS_KEYS = {"tier", "truncation", "t_final", "samples", "n_traj", "seed", "dt"}
_TOP_KEYS = {"scenario", "lattice", "drive", "dynamics", "dressing", "grid",
             "scan", "t_final", "dt", "output", "seed", "workers"}


@dataclass
class ScenarioConfig:
    scenario: str
    raw: dict
    lattice: LatticeSpec | None = None
    drive: DriveConfig | None = None
    tier: str = "effective"
    truncation: str = "full"
    t_final: float = 100.0
    samples: int = 51
    n_traj: int = 500
    seed: int = 1
    workers: int | None = None
    output: Path = field(default_factory=lambda: Path("out"))

    def normalized(self) -> dict:
        doc = dict(self.raw)
        doc["scenario"] = self.scenario
        if self.lattice is not None:
            resolved_drive = self.drive or DriveConfig(omega=1000.0)
            cal, delta = prepare(self.lattice, resolved_drive)
            doc["lattice"] = {
                "n_sites": cal.n_sites, "a0": cal.a0, "xi": cal.xi, "p": cal.p,
            }
            doc["drive"] = {
                "omega": resolved_drive.omega,
                "gamma_r": resolved_drive.gamma_r,
                "delta": delta,
                "reservoir": list(resolved_drive.reservoir_sites(cal.n_sites)),
            }
        doc.setdefault("dynamics", {})
        if self.scenario in ("evolve", "trajectory", "fig2b", "fig3"):
            doc["dynamics"] = {
                "tier": self.tier, "truncation": self.truncation,
                "t_final": self.t_final, "samples": self.samples,
                "n_traj": self.n_traj, "seed": self.seed,
            }
        doc["output"] = str(self.output)
        return doc


def _merge(base: dict, extra: dict) -> dict:
    out = dict(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = value
    return out


def validate_config(doc: dict, scenario: str) -> ScenarioConfig:
    errors: list[dict] = []
    for key in doc:
        if key not in _TOP_KEYS:
            errors.append({"field": key, "message": "unknown key"})
    merged = _merge(_DEFAULTS.get(scenario, {}), doc)

    lattice = None
    drive = None
    if "lattice" in merged:
        lat = merged["lattice"]
        for key in lat:
            if key not in _LATTICE_KEYS:
                errors.append({"field": f"lattice.{key}", "message": "unknown key"})
        try:
            lattice = LatticeSpec(
                n_sites=int(lat.get("n_sites", 0)),
                a0=float(lat.get("a0", 0.0)),
                xi=float(lat.get("xi", 0.0)),
                p=int(lat.get("p", 6)),
            )
        except (ValueError, TypeError) as exc:
            errors.append({"field": "lattice", "message": str(exc)})

    drv = merged.get("drive", {})
    for key in drv:
        if key not in _DRIVE_KEYS:
            errors.append({"field": f"drive.{key}", "message": "unknown key"})
    if "omega" not in drv and scenario not in ("bloch", "scaling", "fig4"):
        if "drive" in doc:
            errors.append({"field": "drive.omega", "message": "required"})
    try:
        drive = DriveConfig(
            omega=float(drv.get("omega", 1000.0)),
            gamma_r=float(drv.get("gamma_r", 1e-4)),
            delta=None if drv.get("delta") is None else float(drv["delta"]),
            reservoir=None if drv.get("reservoir") is None else tuple(drv["reservoir"]),
        )
        if lattice is not None:
            drive.reservoir_sites(lattice.n_sites)
    except (ValueError, TypeError) as exc:
        errors.append({"field": "drive", "message": str(exc)})

    dyn = merged.get("dynamics", {})
    for key in dyn:
        if key not in _DYNAMICS_KEYS:
            errors.append({"field": f"dynamics.{key}", "message": "unknown key"})
    tier = dyn.get("tier", "effective")
    if tier not in ("full", "effective"):
        errors.append({"field": "dynamics.tier", "message": f"bad tier {tier!r}"})
    truncation = dyn.get("truncation", "full")
    if truncation not in ("full", "next_nearest"):
        errors.append({"field": "dynamics.truncation",
                       "message": f"bad truncation {truncation!r}"})
    if float(dyn.get("t_final", 100.0)) <= 0:
        errors.append({"field": "dynamics.t_final", "message": "must be positive"})
    if int(dyn.get("samples", 51)) < 2:
        errors.append({"field": "dynamics.samples", "message": "need at least 2"})
    if int(dyn.get("n_traj", 500)) < 1:
        errors.append({"field": "dynamics.n_traj", "message": "need at least 1"})
    for section, allowed in (("grid", {"xi_min", "xi_max", "xi_points",
                                       "a0_min", "a0_max", "a0_points"}),
                             ("scan", {"n_max", "include", "rules",
                                       "pumping_fit", "pumping_sizes"})):
        for key in merged.get(section, {}):
            if key not in allowed:
                errors.append({"field": f"{section}.{key}", "message": "unknown key"})
    if errors:
        raise ConfigError(errors)

    return ScenarioConfig(
        scenario=scenario,
        raw=merged,
        lattice=lattice,
        drive=drive,
        tier=tier,
        truncation=truncation,
        t_final=float(dyn.get("t_final", 100.0)),
        samples=int(dyn.get("samples", 51)),
        n_traj=int(dyn.get("n_traj", 500)),
        seed=int(merged.get("seed", dyn.get("seed", 1))),
        workers=merged.get("workers"),
        output=Path(merged.get("output", "out")),
    )


def load_config(path: str | None, scenario: str, overrides: dict) -> ScenarioConfig:
    doc: dict = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigError([{"field": "config", "message": f"no such file: {path}"}])
        try:
            doc = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError([{"field": "config", "message": f"invalid JSON: {exc}"}])
    doc = _merge(doc, {k: v for k, v in overrides.items() if v is not None})
    return validate_config(doc, scenario)


# ---------------------------------------------------------------------------
# Observables
# ---------------------------------------------------------------------------


def _system_sites(n_sites: int, reservoir: tuple[int, ...]) -> list[int]:
    return [s for s in range(n_sites) if s not in reservoir]


def _dynamics_columns(cfg: ScenarioConfig, problem: EvolutionProblem,
                      rhos: np.ndarray) -> tuple[list[str], list[list]]:
    n = cfg.lattice.n_sites
    reservoir = cfg.drive.reservoir_sites(n)
    system = _system_sites(n, reservoir)
    target = make_w_state(len(system), range(len(system)))
    basis = build_w_basis(max(1, (len(system) - 1).bit_length()))
    fcol = f"f{len(system)}"
    header = ["t", fcol, "delta", "y_c", "p0", "p1", "p_ge2"]
    want_conc = len(system) == 2
    if want_conc:
        header.append("concurrence")
    rows = []
    for t, rho in zip(problem.sample_times, rhos):
        full = problem.basis.embed_matrix(rho) if problem.basis is not None \
            else QuantumState.mixed(rho, n)
        reduced = partial_trace(full, system)
        rep = witness(reduced, basis, certify=False)
        row = [float(t), fidelity(reduced, target), rep.delta,
               rep.y_c if rep.y_c_defined else float("nan"),
               rep.p0, rep.p1, rep.p_ge2]
        if want_conc:
            row.append(concurrence(reduced.data))
        rows.append(row)
    return header, rows


def _boundary_rows(n_a: int, y_grid: np.ndarray) -> tuple[list[str], list[list]]:
    basis = build_w_basis(max(1, (n_a - 1).bit_length()))
    bounds, flags = bound_table(basis)
    header = ["k_minus_1", "delta_b_zero", "ambiguous"] + [
        f"delta_b_yc_{i}" for i in range(len(y_grid))
    ]
    rows = []
    for k in range(1, basis.n_m + 1):
        curve = boundary_curve(k, basis, y_grid, n_a)
        rows.append([k, float(bounds[k - 1]), int(flags[k - 1])] + [float(v) for v in curve])
    return header, rows


def _crossings(rows: list[list], n_a: int) -> dict:
    """Entry time into the permanently certified region per tier.

    A sample counts as certified when y_c is defined and delta sits below
    the tier curve at that contamination; the crossing time is the first
    certified sample after the last non-certified one (None when the run
    never settles into certification).
    """
    basis = build_w_basis(max(1, (n_a - 1).bit_length()))
    out = {}
    ts = np.array([r[0] for r in rows])
    deltas = np.array([r[2] for r in rows])
    ycs = np.array([r[3] for r in rows])
    for tier in range(1, n_a):
        certified = np.zeros(len(ts), dtype=bool)
        for i, (d, y) in enumerate(zip(deltas, ycs)):
            if np.isfinite(y):
                certified[i] = d < boundary_curve(tier, basis, np.array([y]), n_a)[0]
        t_cross = None
        if certified[-1]:
            last_bad = int(np.nonzero(~certified)[0].max(initial=-1))
            if last_bad + 1 < len(ts):
                t_cross = float(ts[last_bad + 1])
        out[f"t_cross_depth_{tier + 1}"] = t_cross
    return out


# ---------------------------------------------------------------------------
# Scenario implementations
# ---------------------------------------------------------------------------


def _build_problem(cfg: ScenarioConfig, t_final: float, ts: np.ndarray) -> EvolutionProblem:
    if cfg.tier == "full":
        return build_full_problem(cfg.lattice, cfg.drive, t_final, ts)
    return build_effective_problem(cfg.lattice, cfg.drive, t_final, ts,
                                   truncation=cfg.truncation)


def _initial_state(cfg: ScenarioConfig, problem: EvolutionProblem) -> np.ndarray:
    vec = np.zeros(problem.dim, dtype=complex)
    vec[0] = 1.0  # all atoms in the ground level
    return vec


def _steady_reduced(cfg: ScenarioConfig):
    ts = np.array([0.0, 1.0])
    problem = _build_problem(cfg, 1.0, ts)
    rho = steady_state(problem)
    n = cfg.lattice.n_sites
    full = problem.basis.embed_matrix(rho) if problem.basis is not None \
        else QuantumState.mixed(rho, n)
    system = _system_sites(n, cfg.drive.reservoir_sites(n))
    return problem, rho, partial_trace(full, system), system


def run_spectrum(cfg: ScenarioConfig, out: Path) -> None:
    spec = rydberg_spectrum(cfg.lattice, cfg.drive)
    rows = [[n, float(spec.v[n])] for n in range(len(spec.v))]
    _write_csv(out / "spectrum.csv", ["n", "v_n"], rows)
    rows = []
    for n in range(len(spec.anharmonicity)):
        rows.append([
            n, float(spec.anharmonicity[n]), float(spec.delta2[n]),
            float(spec.omega2[n]), float(spec.w2[n]), int(spec.blockaded[n]),
        ])
    _write_csv(out / "anharmonicity.csv",
               ["n", "delta_v", "delta2", "omega2", "w2", "blockaded"], rows)


def run_effective(cfg: ScenarioConfig, out: Path) -> None:
    model = build_effective_model(cfg.lattice, cfg.drive, cfg.truncation)
    (out / "effective_model.json").write_text(model.to_json() + "\n")


def run_evolve(cfg: ScenarioConfig, out: Path, name: str = "evolution.csv") -> None:
    ts = np.linspace(0.0, cfg.t_final, cfg.samples)
    problem = _build_problem(cfg, cfg.t_final, ts)
    rhos = evolve_master(problem, np.outer(_initial_state(cfg, problem),
                                           _initial_state(cfg, problem).conj()))
    header, rows = _dynamics_columns(cfg, problem, rhos)
    _write_csv(out / name, header, rows)


def run_trajectory(cfg: ScenarioConfig, out: Path, name: str = "trajectory.csv") -> None:
    ts = np.linspace(0.0, cfg.t_final, cfg.samples)
    problem = _build_problem(cfg, cfg.t_final, ts)
    ens = evolve_trajectories(problem, _initial_state(cfg, problem),
                              n_traj=cfg.n_traj, seed=cfg.seed, workers=cfg.workers)
    header, rows = _dynamics_columns(cfg, problem, ens.mean_rho)
    _write_csv(out / name, header, rows)
    meta = {"seed": cfg.seed, "n_traj": cfg.n_traj, "tier": cfg.tier,
            "truncation": cfg.truncation, "t_final": cfg.t_final,
            "tolerances": {"master_tol": 1e-8, "jump_resolution_levels": 24}}
    (out / "ensemble.json").write_text(json.dumps(meta, indent=2) + "\n")


def run_steady(cfg: ScenarioConfig, out: Path) -> None:
    from .states import state_to_json

    problem, rho, reduced, system = _steady_reduced(cfg)
    target = make_w_state(len(system), range(len(system)))
    rep = witness(reduced)
    doc = {
        "fidelity": fidelity(reduced, target),
        "witness": rep.to_json_dict(),
        "system_sites": system,
        "reduced_state": state_to_json(reduced),
    }
    if len(system) == 2:
        doc["concurrence"] = concurrence(reduced.data)
    (out / "steady.json").write_text(json.dumps(doc, indent=2) + "\n")


def run_witness(cfg: ScenarioConfig, out: Path) -> None:
    _, _, reduced, system = _steady_reduced(cfg)
    rep = witness(reduced)
    (out / "witness.json").write_text(json.dumps(rep.to_json_dict(), indent=2) + "\n")
    y_grid = np.logspace(-6, 1, 57)
    header, rows = _boundary_rows(len(system), y_grid)
    _write_csv(out / "boundaries.csv", header, rows)
    _write_csv(out / "boundary_grid.csv", ["y_c"], [[float(y)] for y in y_grid])


def run_darkscan(cfg: ScenarioConfig, out: Path) -> None:
    from .darkstate import find_dark_states, hxy_matrix_n1

    model = build_effective_model(cfg.lattice, cfg.drive, "next_nearest")
    mat = hxy_matrix_n1(model)
    reservoir = cfg.drive.reservoir_sites(cfg.lattice.n_sites)
    result = find_dark_states(mat, list(reservoir))
    rows = []
    for i, lam in enumerate(result.eigenvalues):
        rows.append([i, float(lam), float(result.boundary_residuals[i]),
                     int(i in result.dark_indices)])
    _write_csv(out / "darkscan.csv",
               ["index", "eigenvalue", "boundary_residual", "dark"], rows)
    doc = {"dark_indices": result.dark_indices,
           "pattern_match": {str(k): bool(v) for k, v in result.pattern_match.items()},
           "dark_vectors": [list(map(float, np.real(v))) for v in result.dark_vectors]}
    (out / "darkstates.json").write_text(json.dumps(doc, indent=2) + "\n")


def run_scaling(cfg: ScenarioConfig, out: Path, name: str = "scaling.csv") -> None:
    scan = cfg.raw.get("scan", {})
    n_max = int(scan.get("n_max", 126))
    include = [int(v) for v in scan.get("include", [])]
    rules = list(scan.get("rules", ["edges"]))
    sizes = sorted(set(n for _, n, _ in family_sizes(n_max)) | set(include))
    rows_out = []
    largest_k = 2
    for rule in rules:
        for row in scaling_scan(sizes, reservoir_rule=rule):
            largest_k = max(largest_k, row.k)
            rows_out.append([
                row.n_sites, float(row.xi), row.family, row.n_dark, row.k,
                float(row.delta), row.k_min, int(row.pattern_match),
                row.reservoir_rule,
            ])
    _write_csv(out / name,
               ["n", "xi", "family", "n_dark", "k", "delta", "k_min",
                "pattern_match", "reservoir_rule"], rows_out)
    # tier table of the witness register covering the deepest state, for
    # the scaling-plot overlays
    basis = build_w_basis(max(1, (largest_k - 1).bit_length()))
    bounds, flags = bound_table(basis)
    tier_rows = [[k + 1, float(bounds[k]), int(flags[k])]
                 for k in range(basis.n_m)]
    stem = name.rsplit(".", 1)[0]
    _write_csv(out / f"{stem}_boundaries.csv",
               ["k_minus_1", "delta_b_zero", "ambiguous"], tier_rows)
    if scan.get("pumping_fit"):
        from .darkstate import pumping_time_scan

        fit = pumping_time_scan(tuple(scan.get("pumping_sizes", (4, 6, 10))))
        (out / f"{stem}_pumping.json").write_text(json.dumps(fit, indent=2) + "\n")


def run_bloch(cfg: ScenarioConfig, out: Path) -> None:
    dressing = cfg.raw.get("dressing", {})
    dcfg = DressingConfig(
        omega_d=float(dressing.get("omega_d", 1000.0)),
        delta_d=float(dressing.get("delta_d", 0.0)),
        gamma_e=float(dressing.get("gamma_e", 1e4)),
    )
    from .dissipation import effective_decay_rate

    gamma = effective_decay_rate(dcfg)
    t_final = cfg.raw.get("t_final") or 5.0 / gamma
    dt = cfg.raw.get("dt") or 0.05 / max(dcfg.gamma_e / 2.0, dcfg.omega_d, 0.5)
    series = integrate_bloch(dcfg, float(t_final), float(dt))
    stride = max(1, len(series["t"]) // 2000)
    rows = []
    for i in range(0, len(series["t"]), stride):
        rows.append([
            float(series["t"][i]),
            float(series["sigma_ge"][i].real), float(series["sigma_ge"][i].imag),
            float(series["sigma_gr"][i].real), float(series["sigma_gr"][i].imag),
            float(series["population"][i]),
        ])
    _write_csv(out / "bloch.csv",
               ["t", "re_sigma_ge", "im_sigma_ge", "re_sigma_gr", "im_sigma_gr",
                "population"], rows)
    fit = fit_decay_rate(series["t"], series["population"])
    doc = {"fitted_rate": fit, "closed_form": gamma, "ratio": fit / gamma}
    (out / "bloch_fit.json").write_text(json.dumps(doc, indent=2) + "\n")


def run_fig2a(cfg: ScenarioConfig, out: Path) -> None:
    grid = cfg.raw.get("grid", {})
    xis = np.linspace(float(grid.get("xi_min", 1.12)), float(grid.get("xi_max", 1.28)),
                      int(grid.get("xi_points", 9)))
    a0s = np.linspace(float(grid.get("a0_min", 0.2)), float(grid.get("a0_max", 0.4)),
                      int(grid.get("a0_points", 9)))
    n = cfg.lattice.n_sites
    rows = []
    for xi in xis:
        for a0 in a0s:
            spec = LatticeSpec(n_sites=n, a0=float(a0), xi=float(xi), p=cfg.lattice.p)
            sub = ScenarioConfig(scenario="steady", raw=cfg.raw, lattice=spec,
                                 drive=cfg.drive, tier=cfg.tier,
                                 truncation=cfg.truncation)
            _, _, reduced, system = _steady_reduced(sub)
            target = make_w_state(len(system), range(len(system)))
            rows.append([float(xi), float(a0), fidelity(reduced, target)])
    _write_csv(out / "fig2a.csv", ["xi", "a0_over_db", f"f{n - 2}"], rows)


def run_fig2b(cfg: ScenarioConfig, out: Path) -> None:
    run_evolve(cfg, out, name="fig2b.csv")


def run_fig3(cfg: ScenarioConfig, out: Path) -> None:
    ts = np.linspace(0.0, cfg.t_final, cfg.samples)
    # refined grid resolves the early certification crossings
    refined = np.unique(np.concatenate(
        [[0.0], np.logspace(-1, np.log10(cfg.t_final), 61), ts]
    ))
    problem_ref = _build_problem(cfg, cfg.t_final, refined)
    psi0 = _initial_state(cfg, problem_ref)
    rhos_ref = evolve_master(problem_ref, np.outer(psi0, psi0.conj()))
    header, rows = _dynamics_columns(cfg, problem_ref, rhos_ref)
    _write_csv(out / "fig3_master.csv", header, rows)

    problem = _build_problem(cfg, cfg.t_final, ts)
    rhos = evolve_master(problem, np.outer(psi0, psi0.conj()))

    ens = evolve_trajectories(problem, psi0, n_traj=cfg.n_traj, seed=cfg.seed,
                              workers=cfg.workers)
    header_t, rows_t = _dynamics_columns(cfg, problem, ens.mean_rho)
    _write_csv(out / "fig3_trajectory.csv", header_t, rows_t)

    tds = [trace_distance(ens.mean_rho[i], rhos[i]) for i in range(len(ts))]
    n = cfg.lattice.n_sites
    system = _system_sites(n, cfg.drive.reservoir_sites(n))
    y_grid = np.logspace(-6, 1, 57)
    header_b, rows_b = _boundary_rows(len(system), y_grid)
    _write_csv(out / "fig3_boundaries.csv", header_b, rows_b)
    _write_csv(out / "fig3_boundary_grid.csv", ["y_c"], [[float(y)] for y in y_grid])
    doc = _crossings(rows, len(system))
    doc["max_trace_distance"] = float(max(tds))
    doc["n_traj"] = cfg.n_traj
    (out / "fig3_crossings.json").write_text(json.dumps(doc, indent=2) + "\n")


def run_fig4(cfg: ScenarioConfig, out: Path) -> None:
    run_scaling(cfg, out, name="fig4.csv")


_RUNNERS = {
    "spectrum": run_spectrum,
    "effective": run_effective,
    "evolve": run_evolve,
    "trajectory": run_trajectory,
    "steady": run_steady,
    "witness": run_witness,
    "darkscan": run_darkscan,
    "scaling": run_scaling,
    "bloch": run_bloch,
    "fig2a": run_fig2a,
    "fig2b": run_fig2b,
    "fig3": run_fig3,
    "fig4": run_fig4,
}


def run_scenario(cfg: ScenarioConfig) -> int:
    out = cfg.output
    out.mkdir(parents=True, exist_ok=True)
    started = time.time()
    _RUNNERS[cfg.scenario](cfg, out)
    normalized = cfg.normalized()
    blob = json.dumps(normalized, sort_keys=True).encode()
    manifest = {
        "scenario": cfg.scenario,
        "config": normalized,
        "config_sha256": hashlib.sha256(blob).hexdigest(),
        "version": __version__,
        "seed": cfg.seed,
        "wall_time_s": time.time() - started,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rydpump",
        description="Driven-dissipative Rydberg chain scenarios",
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--tier", choices=("full", "effective"), default=None)
    args = parser.parse_args(argv)

    workers = args.workers
    if workers is None and os.environ.get("RYD_WORKERS"):
        try:
            workers = int(os.environ["RYD_WORKERS"])
        except ValueError:
            print(json.dumps({"errors": [{"field": "RYD_WORKERS",
                                          "message": "not an integer"}]}))
            return 2
    overrides: dict = {}
    if args.out is not None:
        overrides["output"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if workers is not None:
        overrides["workers"] = workers
    if args.tier is not None:
        overrides["dynamics"] = {"tier": args.tier}

    try:
        cfg = load_config(args.config, args.scenario, overrides)
    except ConfigError as exc:
        print(json.dumps({"errors": exc.errors}, indent=2))
        return 2
    try:
        code = run_scenario(cfg)
    except ConfigError as exc:
        print(json.dumps({"errors": exc.errors}, indent=2))
        return 2
    except Exception as exc:  # numerical failures propagate as exit 3
        print(json.dumps({"errors": [{"field": "runtime", "message": str(exc)}]}))
        return 3
    print(json.dumps({"status": "ok", "scenario": cfg.scenario,
                      "output": str(cfg.output)}))
    return code


if __name__ == "__main__":
    sys.exit(main())
