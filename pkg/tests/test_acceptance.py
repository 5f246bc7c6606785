"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
status lines.  Criteria 1-3 evolve the truncated-register model (the tier
the long-horizon scenarios use); criterion 8 re-checks every density matrix
those runs produced.
"""

import numpy as np
import pytest

from rydpump.darkstate import (DARK_XI, family_pattern, family_sizes,
                               find_dark_states, hxy_matrix_n1, scaling_scan)
from rydpump.dissipation import DressingConfig, effective_decay_rate, fit_decay_rate, integrate_bloch
from rydpump.dynamics import (build_effective_problem, evolve_master,
                              evolve_trajectories, liouvillian_spectrum,
                              steady_state, trace_distance)
from rydpump.entanglement import (boundary_curve, build_w_basis, concurrence,
                                  fidelity, variance_bound, witness)
from rydpump.hamiltonians import (DriveConfig, build_effective_model, effective_j,
                                  effective_light_shift, methods_exchange,
                                  methods_light_shift, prepare)
from rydpump.lattice import LatticeSpec, pair_shift
from rydpump.states import QuantumState, make_w_state, partial_trace

SEED = 20260810


def report(criterion: int, ok: bool, detail: str) -> None:
    status = "PASS" if ok else "FAIL"
    print(f"[ACCEPTANCE] criterion {criterion}: {status} - {detail}")
    assert ok, f"criterion {criterion}: {detail}"


@pytest.fixture(scope="module")
def n4_run():
    spec = LatticeSpec(n_sites=4, a0=0.26, xi=DARK_XI)
    drive = DriveConfig(omega=1000.0, gamma_r=1e-4)
    ts = np.linspace(0.0, 200.0, 81)
    problem = build_effective_problem(spec, drive, 200.0, ts)
    rho0 = np.zeros((8, 8), dtype=complex)
    rho0[0, 0] = 1.0
    rhos = evolve_master(problem, rho0)
    rho_ss = steady_state(problem)
    return {"spec": spec, "drive": drive, "problem": problem, "ts": ts,
            "rhos": rhos, "rho_ss": rho_ss}


@pytest.fixture(scope="module")
def n6_run():
    spec = LatticeSpec(n_sites=6, a0=0.285, xi=1.1996)
    drive = DriveConfig(omega=1000.0, gamma_r=1e-4)
    ts = np.linspace(0.0, 300.0, 121)
    refined = np.unique(np.concatenate([[0.0], np.logspace(-1, np.log10(300.0), 61), ts]))
    problem = build_effective_problem(spec, drive, 300.0, ts)
    problem_ref = build_effective_problem(spec, drive, 300.0, refined)
    rho0 = np.zeros((12, 12), dtype=complex)
    rho0[0, 0] = 1.0
    rhos = evolve_master(problem, rho0)
    rhos_ref = evolve_master(problem_ref, rho0)
    psi0 = np.zeros(12, dtype=complex)
    psi0[0] = 1.0
    ensemble = evolve_trajectories(problem, psi0, n_traj=640, seed=SEED)
    rho_ss = steady_state(problem)
    return {"spec": spec, "drive": drive, "problem": problem, "ts": ts,
            "refined": refined, "rhos": rhos, "rhos_ref": rhos_ref,
            "ensemble": ensemble, "rho_ss": rho_ss}


def reduced_system_state(problem, rho, system):
    full = problem.basis.embed_matrix(rho)
    return partial_trace(full, system)


def test_criterion_1_steady_bipartite_fidelity(n4_run):
    red = reduced_system_state(n4_run["problem"], n4_run["rho_ss"], [1, 2])
    f2 = fidelity(red, make_w_state(2, [0, 1]))
    ok = f2 >= 0.99 and abs(f2 - 0.9982) <= 0.01
    report(1, ok, f"steady F2 = {f2:.5f} (target >= 0.99, 0.9982 +/- 0.01)")


def test_criterion_2_pumping_dynamics(n4_run):
    ts = n4_run["ts"]
    target = make_w_state(2, [0, 1])
    f2s, cs = [], []
    for rho in n4_run["rhos"]:
        red = reduced_system_state(n4_run["problem"], rho, [1, 2])
        f2s.append(fidelity(red, target))
        cs.append(concurrence(red.data))
    f2s = np.asarray(f2s)
    cs = np.asarray(cs)
    late = ts >= 10.0
    monotone = bool(np.all(np.diff(cs[late]) > -1e-6))
    ok = f2s[-1] >= 0.99 and cs[-1] >= 0.98 and cs[0] < 0.01 and monotone
    report(2, ok, (f"F2(t=200) = {f2s[-1]:.5f}, C(t=200) = {cs[-1]:.5f}, "
                   f"C monotone after t=10: {monotone}"))


def test_criterion_3_six_site_quadripartite(n6_run):
    problem = n6_run["problem"]
    system = [1, 2, 3, 4]
    psi4 = make_w_state(4, [0, 1, 2, 3])
    red_ss = reduced_system_state(problem, n6_run["rho_ss"], system)
    f4 = fidelity(red_ss, psi4)
    rep_ss = witness(red_ss)

    tds = [trace_distance(n6_run["ensemble"].mean_rho[i], n6_run["rhos"][i])
           for i in range(len(n6_run["ts"]))]
    max_td = max(tds)

    # certification crossings on the refined master run
    basis = build_w_basis(2)
    crossings = {}
    for tier in (1, 2, 3):
        certified = []
        for t, rho in zip(n6_run["refined"], n6_run["rhos_ref"]):
            red = reduced_system_state(problem, rho, system)
            rep = witness(red, basis, certify=False)
            if rep.y_c_defined:
                curve = boundary_curve(tier, basis, np.array([rep.y_c]), 4)[0]
                certified.append(rep.delta < curve)
            else:
                certified.append(False)
        certified = np.asarray(certified)
        t_cross = None
        if certified[-1]:
            last_bad = int(np.nonzero(~certified)[0].max(initial=-1))
            if last_bad + 1 < len(certified):
                t_cross = float(n6_run["refined"][last_bad + 1])
        crossings[tier] = t_cross

    t2, t3, t4 = crossings[1], crossings[2], crossings[3]
    ordered = (t2 is not None and t3 is not None and t4 is not None
               and t2 < t3 < t4)
    ok = (f4 >= 0.98
          and max_td < 0.05
          and ordered and 30.0 <= t4 <= 300.0
          and rep_ss.delta <= 3e-2 and rep_ss.y_c <= 1e-3
          and rep_ss.k_min == 4)
    report(3, ok, (f"F4 = {f4:.5f}, max TD = {max_td:.4f}, crossings "
                   f"t2={t2}, t3={t3}, t4={t4}, steady delta = {rep_ss.delta:.4e}, "
                   f"y_c = {rep_ss.y_c:.3e}, k_min = {rep_ss.k_min}"))


def test_criterion_4_dark_state_families():
    drive = DriveConfig(omega=1000.0, gamma_r=1e-4)
    overlap = {16, 46, 76, 106}
    checked = 0
    for fam, n, _k in family_sizes(126):
        spec = LatticeSpec(n_sites=n, a0=0.26, xi=DARK_XI)
        model = build_effective_model(spec, drive, "next_nearest")
        result = find_dark_states(hxy_matrix_n1(model), [0, n - 1])
        pats = dict(family_pattern(n))
        assert result.pattern_match[fam], f"pattern missing for family {fam}, N={n}"
        for i in result.dark_indices:
            assert result.boundary_residuals[i] < 1e-10
        # sizes in a single family host exactly one dark state; the four
        # sizes shared by both families host one per family
        expected_dark = 2 if n in overlap else 1
        assert len(result.dark_indices) == expected_dark, f"N={n}"
        assert pats[fam][0] == 0 and pats[fam][-1] == 0
        checked += 1
    report(4, True, f"{checked} family members verified "
                    f"(sizes in both families: {sorted(overlap)} host one dark "
                    f"state per family)")


def test_criterion_5_scaling_certifies_hectapartite():
    sizes = sorted(set(n for _f, n, _k in family_sizes(126)))
    rows = scaling_scan(sizes)
    k_expected = {(f, n): k for f, n, k in family_sizes(126)}
    for row in rows:
        assert row.k == k_expected[(row.family, row.n_sites)], row
    by = {(r.n_sites, r.family): r for r in rows}
    hecta = by[(126, 2)]
    # the chain of 128 sites belongs to neither family; report it under both
    # reservoir rules rather than asserting a dark state exists
    absent = {rule: scaling_scan([128], reservoir_rule=rule)[0]
              for rule in ("edges", "pattern_zeros")}
    absent_ok = all(r.n_dark == 0 and r.k == 0 for r in absent.values())
    ok = hecta.k == 100 and hecta.k_min == 100 and absent_ok
    report(5, ok, (f"N=126 certifies k_min = {hecta.k_min} (k = {hecta.k}, "
                   f"delta = {hecta.delta:.5f}); N=128 hosts no dark state under "
                   f"either reservoir rule (documented open question)"))


def test_criterion_6_engineered_decay():
    results = []
    for omega_d in (10.0, 100.0, 1000.0):
        cfg = DressingConfig(omega_d=omega_d, delta_d=0.0, gamma_e=1e4)
        gamma = effective_decay_rate(cfg)
        dt = 0.08 / max(cfg.gamma_e / 2.0, cfg.omega_d)
        series = integrate_bloch(cfg, t_final=5.0 / gamma, dt=dt)
        fitted = fit_decay_rate(series["t"], series["population"])
        results.append((omega_d, fitted, gamma, abs(fitted - gamma) / gamma))
    ok = all(rel <= 0.10 for _, _, _, rel in results)
    detail = ", ".join(f"Od={od:g}: fit/formula = {fit / g:.4f}"
                       for od, fit, g, _ in results)
    report(6, ok, detail)


def test_criterion_7_formula_consistency():
    drive = DriveConfig(omega=1000.0, gamma_r=1e-4)
    worst = 0.0
    for xi in (0.36, 1.1996, DARK_XI):
        for n in (4, 12, 20):
            spec = LatticeSpec(n_sites=n, a0=0.26, xi=xi)
            cal, _ = prepare(spec, drive)
            for i in range(n):
                for j in range(i + 1, n):
                    direct = effective_j(cal, drive, i, j)
                    via_f = methods_exchange(cal, drive, i, j)
                    scale = max(abs(direct), abs(via_f), 1e-30)
                    worst = max(worst, abs(direct - via_f) / scale)
    table_worst = 0.0
    for n in range(4, 21):
        spec = LatticeSpec(n_sites=n, a0=0.26, xi=DARK_XI)
        cal, _ = prepare(spec, drive)
        j_unit = 4 * drive.omega**2 / pair_shift(cal, 0, 1)
        for i in range(n):
            general = effective_light_shift(cal, drive, i, "next_nearest")
            table = methods_light_shift(DARK_XI, n, i, j_unit)
            table_worst = max(table_worst, abs(general - table) / j_unit)
    spec4 = LatticeSpec(n_sites=4, a0=0.26, xi=DARK_XI)
    model = build_effective_model(spec4, drive, "next_nearest")
    expected = model.j_unit * np.array(
        [[-1, 1, -1, 0], [1, 0, 1, -1], [-1, 1, 0, 1], [0, -1, 1, -1]], dtype=float
    )
    matrix_defect = float(np.max(np.abs(hxy_matrix_n1(model) - expected))) / model.j_unit
    ok = worst < 1e-12 and table_worst < 1e-12 and matrix_defect < 1e-12
    report(7, ok, (f"exchange-form agreement {worst:.2e}, light-shift table "
                   f"{table_worst:.2e}, four-site matrix defect {matrix_defect:.2e}"))


def test_criterion_8_physicality(n4_run, n6_run):
    worst_tr = worst_herm = worst_eig = 0.0
    for run in (n4_run, n6_run):
        stacks = [run["rhos"], [run["rho_ss"]]]
        if "rhos_ref" in run:
            stacks.append(run["rhos_ref"])
            stacks.append(run["ensemble"].mean_rho)
        for rhos in stacks:
            for rho in rhos:
                worst_tr = max(worst_tr, abs(np.trace(rho) - 1.0))
                worst_herm = max(worst_herm, float(np.max(np.abs(rho - rho.conj().T))))
                worst_eig = max(worst_eig, float(-np.linalg.eigvalsh(
                    0.5 * (rho + rho.conj().T)).min()))
    spec_max = float(np.max(np.real(liouvillian_spectrum(n4_run["problem"]))))
    ok = (worst_tr < 1e-9 and worst_herm < 1e-9 and worst_eig < 1e-7
          and spec_max <= 1e-10)
    report(8, ok, (f"|tr-1| <= {worst_tr:.2e}, herm defect <= {worst_herm:.2e}, "
                   f"min eig >= {-worst_eig:.2e}, max Re(Liouvillian eig) = "
                   f"{spec_max:.2e}"))


def test_criterion_9_witness_identities():
    # ideal W
    rep = witness(make_w_state(4, range(4)))
    ideal_ok = rep.delta < 1e-12 and rep.y_c < 1e-12
    # projector completeness on the 4-site register
    basis = build_w_basis(2)
    labels = [1 << k for k in range(4)]
    total = np.zeros((16, 16))
    for row in basis.vectors:
        vec = np.zeros(16)
        vec[labels] = row
        total += np.outer(vec, vec)
    expected = np.zeros((16, 16))
    for b in labels:
        expected[b, b] = 1.0
    projector_ok = float(np.max(np.abs(total - expected))) < 1e-12
    # coherence-form bound on 10^3 random phase-aligned n <= 1 states (the
    # family the symmetric drive produces; adversarial sign patterns evade
    # the magnitude-averaged coherence and are excluded by construction)
    rng = np.random.default_rng(5)
    bound_ok = True
    for _ in range(1000):
        n = int(rng.choice([4, 8]))
        lab = [0] + [1 << k for k in range(n)]
        d = len(lab)
        small = np.zeros((d, d))
        for _ in range(int(rng.integers(1, 4))):
            v = rng.uniform(size=d)
            v /= np.linalg.norm(v)
            small += rng.uniform() * np.outer(v, v)
        small /= np.trace(small)
        rho = np.zeros((1 << n, 1 << n), dtype=complex)
        rho[np.ix_(lab, lab)] = small
        res = variance_bound(QuantumState.mixed(rho, n))
        if res["delta"] > res["coherence_form"] + 1e-9:
            bound_ok = False
            break
    ok = ideal_ok and projector_ok and bound_ok
    report(9, ok, (f"ideal W gives ({rep.delta:.1e}, {rep.y_c:.1e}); projector "
                   f"sum exact: {projector_ok}; delta <= coherence bound on 1000 "
                   f"states: {bound_ok}"))
