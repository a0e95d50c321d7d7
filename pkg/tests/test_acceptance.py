"""Acceptance suite: one test per certification criterion, fixed tolerances.

Run `pytest tests/test_acceptance.py -v -s` to see one PASS/FAIL line per
criterion.  Each criterion also carries a wall-clock budget.
"""

import time

import numpy as np

import bjsystem.flux as fx
import bjsystem.fronttrack as ft
import bjsystem.interactions as ia
import bjsystem.wavecurves as wc
from bjsystem.flux import ModelParams
from bjsystem.riemann import solve_riemann

P0 = ModelParams(0.0)


def report(index, passed, detail, elapsed, budget):
    status = "PASS" if passed else "FAIL"
    print(f"ACCEPTANCE {index}: {status} - {detail} ({elapsed:.2f}s / budget {budget:.0f}s)")
    assert passed, f"criterion {index}: {detail}"
    assert elapsed < budget, f"criterion {index} exceeded runtime budget"


def test_criterion_1_closed_form_hugoniot_vs_rh_residual():
    t0 = time.perf_counter()
    corners = [(-0.5, -0.5), (-0.5, 0.5), (0.5, -0.5), (0.5, 0.5),
               (-0.5, 0.0), (0.5, 0.0), (0.0, -0.5), (0.0, 0.5)]
    worst = 0.0
    for vbar in np.arange(-0.4, 0.4001, 0.05):
        for s in np.arange(-0.25, -0.0099, 0.01):
            gamma = 2.0 * vbar + s
            for ub, wb in corners:
                base = np.array([ub, vbar, wb])
                state = wc.hugoniot2_closed_form(base, float(s)).state
                res = np.linalg.norm(
                    fx.flux(state, P0) - fx.flux(base, P0) - gamma * (state - base)
                )
                worst = max(worst, float(res))
    elapsed = time.perf_counter() - t0
    report(1, worst <= 1e-12, f"max RH residual of closed form {worst:.2e} <= 1e-12",
           elapsed, 1.0)


def test_criterion_2_eigenstructure_at_eta0():
    t0 = time.perf_counter()
    # characteristic-polynomial oracle first: det(lam I - J) vanishes at
    # -4, 2v and 4, and LAPACK roots agree
    rng_states = fx.sample_ball(50, 0.9, seed=5)
    oracle_ok = True
    for U in rng_states:
        J = fx.jacobian(U, P0)
        for lam in (-4.0, 2.0 * U[1], 4.0):
            oracle_ok &= abs(np.linalg.det(lam * np.eye(3) - J)) <= 1e-10
        lapack = np.sort(np.linalg.eigvals(J).real)
        oracle_ok &= bool(np.allclose(lapack, [-4.0, 2.0 * U[1], 4.0], atol=1e-10))

    U = fx.sample_ball(10000, 0.9, seed=0)
    lam, ok = fx.eigenvalues_batch(U, P0)
    lam_err = max(
        float(np.max(np.abs(lam[:, 0] + 4.0))),
        float(np.max(np.abs(lam[:, 1] - 2.0 * U[:, 1]))),
        float(np.max(np.abs(lam[:, 2] - 4.0))),
    )
    # eigen-residuals with the returned eigenvectors
    J = fx.jacobian(U, P0)
    n = len(U)
    r1 = np.column_stack([np.ones(n), np.zeros(n), U[:, 1]])
    r3 = np.column_stack([np.ones(n), np.zeros(n), U[:, 1] - 2.0])
    ru, rw = fx._r2_uw(J, lam[:, 1])
    r2 = np.column_stack([ru, np.ones(n), rw])
    res = 0.0
    for lam_i, r in ((lam[:, 0], r1), (lam[:, 1], r2), (lam[:, 2], r3)):
        res = max(res, float(np.max(np.abs(np.einsum("nij,nj->ni", J, r) - lam_i[:, None] * r))))
    elapsed = time.perf_counter() - t0
    passed = oracle_ok and bool(np.all(ok)) and lam_err <= 1e-12 and res <= 1e-10
    report(2, passed,
           f"lambda=(-4,2v,4) err {lam_err:.2e} <= 1e-12, eigen residual {res:.2e} <= 1e-10",
           elapsed, 1.0)


def test_criterion_3_hyperbolicity_and_nonlinearity_for_positive_eta():
    t0 = time.perf_counter()
    passed = True
    details = []
    for eta in (0.01, 0.1, 0.2):
        params = ModelParams(eta)
        hyp = fx.check_strict_hyperbolicity(params, radius=0.9, n_samples=10000, seed=1)
        gnl = fx.check_genuine_nonlinearity(params, radius=0.89, n_samples=10000, seed=1)
        passed = passed and hyp.passed and gnl.passed
        details.append(
            f"eta={eta}: gaps ({hyp.min_gap_12:.2f},{hyp.min_gap_23:.2f}), "
            f"gnl f1>={gnl.family1[0]:.3f} f3<={gnl.family3[1]:.3f}"
        )
    elapsed = time.perf_counter() - t0
    report(3, passed, "; ".join(details), elapsed, 5.0)


def test_criterion_4_closed_form_12_reproduction():
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    worst_rel = 0.0
    brackets_ok = True
    for _ in range(500):
        direction = rng.normal(size=3)
        direction /= np.linalg.norm(direction)
        Ul = 0.499 * rng.uniform(0.0, 1.0) ** (1.0 / 3.0) * direction
        s = -rng.uniform(1e-4, 0.2499)
        sigma = -rng.uniform(1e-4, 0.2499)
        cf = ia.closed_form_12_eta0(Ul, s, sigma)
        Um = wc.wave_fan_curve(2, Ul, s, P0).state
        Ur = wc.wave_fan_curve(1, Um, sigma, P0).state
        fan = solve_riemann(Ul, Ur, P0)
        worst_rel = max(
            worst_rel,
            abs(fan.strengths[0] - cf.sigma_prime) / abs(cf.sigma_prime),
            abs(fan.strengths[2] - cf.tau_prime) / abs(cf.tau_prime),
        )
        brackets_ok = brackets_ok and 2.0 / 3.0 < cf.sigma_ratio < 1.0
        brackets_ok = brackets_ok and 1.0 / 21.0 < cf.tau_ratio < 4.0
    elapsed = time.perf_counter() - t0
    passed = worst_rel <= 1e-9 and brackets_ok
    report(4, passed,
           f"500 scenarios: solver vs closed form rel err {worst_rel:.2e} <= 1e-9, "
           f"bracketing ratios hold", elapsed, 5.0)


def test_criterion_5_taylor_coefficients():
    t0 = time.perf_counter()
    fit = ia.taylor_fit_22(a=0.25, eta=0.0)
    rel_s = abs(fit.c_sigma - fit.c_sigma_target) / fit.c_sigma_target
    rel_t = abs(fit.c_tau - fit.c_tau_target) / abs(fit.c_tau_target)
    g_rel = float(np.max(np.abs(fit.g_cubic - ia.G_CUBIC_TARGET) / np.abs(ia.G_CUBIC_TARGET)))
    elapsed = time.perf_counter() - t0
    passed = rel_s <= 0.02 and rel_t <= 0.02 and g_rel <= 0.02
    report(5, passed,
           f"C_sigma={fit.c_sigma:.7f} (target {fit.c_sigma_target:.7f}, rel {rel_s:.1e}), "
           f"C_tau={fit.c_tau:.7f}, G entries rel {g_rel:.1e}, all <= 2%",
           elapsed, 30.0)


def test_criterion_6_22_pattern_certification():
    t0 = time.perf_counter()
    n_sss = 0
    mid_exact = True
    worst_mid = 0.0
    scenarios = ia.sample_scenarios_22(1000, a=0.25, eps=1e-2, seed=11)
    for sc in scenarios:
        rep = ia.interact_22(sc)
        if rep.pattern == "SSS" and rep.outgoing[0] < 0.0 < rep.outgoing[2]:
            n_sss += 1
        mid_exact = mid_exact and rep.outgoing[1] == sc.s1 + sc.s2
        worst_mid = max(worst_mid, rep.mid_discrepancy)
    elapsed = time.perf_counter() - t0
    passed = n_sss == 1000 and mid_exact and worst_mid <= 1e-16
    report(6, passed,
           f"{n_sss}/1000 scenarios SSS, middle strength exact "
           f"(solver bookkeeping gap {worst_mid:.1e})", elapsed, 30.0)


def test_criterion_7_12_bounds_certification():
    t0 = time.perf_counter()
    records = ia.verify_bounds_12(1000, eta=1e-3, seed=7)
    n_pass = sum(1 for r in records if r.passed)
    worst_agree = max(r.oracle_agreement for r in records)
    worst_ratio = max(r.contraction.contraction_ratio for r in records)
    elapsed = time.perf_counter() - t0
    passed = n_pass == 1000 and worst_agree <= 1e-9 and worst_ratio <= 0.5
    report(7, passed,
           f"{n_pass}/1000 scenarios within bounds, solver agreement {worst_agree:.1e} <= 1e-9, "
           f"contraction ratio {worst_ratio:.1e} <= 1/2", elapsed, 60.0)


def _five_jump_scenario(params):
    a = 0.25
    U0 = np.array([a, 0.008, -a])
    cur = U0
    jumps = []
    for x, s in zip([-0.30, -0.22, -0.12, -0.05], [-2.0e-3, -2.5e-3, -2.2e-3, -2.8e-3]):
        cur = wc.wave_fan_curve(2, cur, s, params).state
        jumps.append((x, cur))
    cur = wc.wave_fan_curve(1, cur, -3.0e-3, params).state
    jumps.append((0.4, cur))
    return jumps, U0


def test_criterion_8_fronttrack_conservation_and_decoupling():
    t0 = time.perf_counter()
    params = ModelParams(1e-4)
    jumps, U0 = _five_jump_scenario(params)
    st = ft.init_from_piecewise(jumps, U0, params)
    st, series = ft.run(st, 1e5, max_events=20)
    assert len(st.event_log) == 20

    base = np.array(series[0].balance)
    drift = max(float(np.max(np.abs(np.array(r.balance) - base))) for r in series)

    v_jumps = []
    cur_v = U0[1]
    for x, U in jumps:
        if U[1] != cur_v:
            v_jumps.append((x, U[1]))
            cur_v = U[1]
    oracle = ft.burgers_oracle(U0[1], v_jumps, st.time + 1.0)
    worst_v = 0.0
    for rec in series[1:]:
        t = rec.time
        system = sorted(
            (f.position(t), f.left[1], f.right[1])
            for f in st.dead_fronts + st.fronts
            if f.birth_t <= t
            and (f.death_t is None or f.death_t > t)
            and f.right[1] != f.left[1]
        )
        reference = oracle.fronts_at(t)
        if len(system) != len(reference):
            worst_v = float("inf")
            break
        for (xa, la, ra), (xb, lb, rb) in zip(system, reference):
            worst_v = max(worst_v, abs(xa - xb), abs(la - lb), abs(ra - rb))
    elapsed = time.perf_counter() - t0
    passed = drift <= 1e-10 and worst_v <= 1e-10
    report(8, passed,
           f"20 events: conserved-balance drift {drift:.1e} <= 1e-10, "
           f"v-front mismatch vs scalar oracle {worst_v:.1e} <= 1e-10", elapsed, 5.0)


def test_criterion_9_bounded_horizon_growth_substitute():
    # The infinite-amplitude and infinitely-many-shock constructions are
    # asymptotic and not reproducible at desk scale; the declared substitute
    # is a truncated cascade with monotone growth and a shock-only event log.
    t0 = time.perf_counter()
    params = ModelParams(1e-4)
    U0 = np.array([-0.35, 0.01, 0.45])
    cur = U0
    jumps = []
    for x, fam, s in [
        (-0.30, 2, -0.035),
        (-0.18, 2, -0.030),
        (-0.08, 2, -0.040),
        (0.30, 1, -0.05),
    ]:
        cur = wc.wave_fan_curve(fam, cur, s, params).state
        jumps.append((x, cur))
    st = ft.init_from_piecewise(jumps, U0, params)
    st, series = ft.run(st, 1e5, max_events=40)

    shock_only = all(
        kind == "shock" for e in st.event_log for _, _, kind, _ in e.outgoing
    )
    maxes = [r.max_state_norm for r in series]
    counts = [r.n_fronts for r in series]
    max_monotone = all(b >= a - 1e-12 for a, b in zip(maxes, maxes[1:]))
    count_monotone = all(b >= a for a, b in zip(counts, counts[1:]))
    grew = maxes[-1] > maxes[0] + 1e-4 and counts[-1] > counts[0]
    elapsed = time.perf_counter() - t0
    passed = (
        len(st.event_log) == 40 and shock_only and max_monotone and count_monotone and grew
    )
    print(
        "ACCEPTANCE 9: declared not desk-reproducible: unbounded amplitude blow-up and "
        "the generic infinite-shock pattern; substitute cascade asserted instead."
    )
    report(9, passed,
           f"40 events shock-only, max|U| {maxes[0]:.4f}->{maxes[-1]:.4f} monotone, "
           f"fronts {counts[0]}->{counts[-1]} monotone", elapsed, 30.0)
