"""Acceptance criteria, one test per criterion.

Each criterion prints a single ``[Cn] PASS|FAIL: ...`` line; the lines are
also repeated in the pytest terminal summary. Run directly with
``python tests/test_acceptance.py`` to get only the summary lines.
"""

import math
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.stats import spearmanr

from tilted_ising.chaostats import analyze_spacings, ks_statistic
from tilted_ising.cli import dip_and_peak, entropy_curve, linear_fit
from tilted_ising.dynamics import EvolutionPlan, bell_seed_state, evolve, quench_time
from tilted_ising.entanglement import half_chain_entropies, measure_all
from tilted_ising.hamiltonian import build_hamiltonian, build_sectors, cross_block_norm
from tilted_ising.spectra import crossing_profile, find_avoided_crossings, spectrum, sweep_spectrum
from tilted_ising.state import ChainParams

sys.path.insert(0, str(Path(__file__).parent))

RESULTS: dict[str, str] = {}


def report(cid, ok, detail):
    line = f"[{cid}] {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS[cid] = line
    print(line)
    return ok


# ---------------------------------------------------------------- criteria


def c1_small_spectra():
    e0 = np.linalg.eigvalsh(build_hamiltonian(ChainParams(2, theta=0.0)).dense())
    e1 = np.linalg.eigvalsh(build_hamiltonian(ChainParams(2, theta=math.pi / 2)).dense())
    d0 = np.max(np.abs(e0 - [-1, -1, -1, 3]))
    d1 = np.max(np.abs(e1 - [-math.sqrt(5), -1, 1, math.sqrt(5)]))
    return d0 < 1e-12 and d1 < 1e-12, f"L=2 max deviation theta=0: {d0:.1e}, theta=pi/2: {d1:.1e} (tol 1e-12)"


def c2_duality():
    rng = np.random.default_rng(2)
    worst = 0.0
    for _ in range(20):
        J, B, theta = rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, math.pi)
        a = spectrum(ChainParams(8, J=J, B=B, theta=theta), want_vectors=False).eigenvalues
        b = spectrum(ChainParams(8, J=-J, B=B, theta=theta), want_vectors=False).eigenvalues
        worst = max(worst, np.max(np.abs(a + b[::-1])))
    return worst < 1e-10, f"20 draws at L=8, max |E(J) + reversed E(-J)| = {worst:.1e} (tol 1e-10)"


def c3_sectors():
    dims = {L: tuple(s.dim for s in build_sectors(L)) for L in (8, 13)}
    norms = {L: cross_block_norm(build_hamiltonian(ChainParams(L, theta=7 * math.pi / 16))) for L in (8, 13)}
    ok = dims == {8: (136, 120), 13: (4160, 4032)} and max(norms.values()) < 1e-12
    return ok, f"dims {dims}, off-diagonal block norms {max(norms.values()):.1e} (tol 1e-12)"


def c4_nnsd_transition():
    grid = math.pi * np.arange(1, 17) / 32
    rows = []
    for theta in grid:
        res = spectrum(ChainParams(12, theta=theta), "even")
        a = analyze_spacings(res.eigenvalues)
        rows.append((theta, a, float(np.mean(half_chain_entropies(res.eigenvectors)))))
    by_theta = {round(t / math.pi * 32): (a, s) for t, a, s in rows}
    chaotic_ok = all(by_theta[k][0].ks.D_wigner < by_theta[k][0].ks.D_poisson for k in (14, 15))
    small = by_theta[1][0]
    reversed_ok = small.ks is None or small.ks.D_wigner > small.ks.D_poisson
    usable = [(a.ks.D_wigner, s) for _, a, s in rows if a.ks is not None]
    rho = spearmanr([s for _, s in usable], [-d for d, _ in usable])[0]
    ok = chaotic_ok and reversed_ok and rho > 0.5
    dw = {k: round(by_theta[k][0].ks.D_wigner, 3) for k in (14, 15)}
    dp = {k: round(by_theta[k][0].ks.D_poisson, 3) for k in (14, 15)}
    tail = "degenerate" if small.ks is None else f"D_W={small.ks.D_wigner:.3f} D_P={small.ks.D_poisson:.3f}"
    return ok, (f"L=12 even: D_W {dw} < D_P {dp} (keys theta/(pi/32)); theta=pi/32 {tail}; "
                f"Spearman(mean S_half, -D_W) = {rho:.3f} (> 0.5)")


def c5_avoided_crossing():
    params = ChainParams(8)
    track = sweep_spectrum(params, np.linspace(0.35, 0.75, 81), "even")
    crossings = [ac for k in range(44, 49) for ac in find_avoided_crossings(track, (k, k + 1))]
    crossings.sort(key=lambda ac: ac.min_gap)
    for ac in crossings:
        prof = crossing_profile(params, "even", ac)
        ratio, q_peak = dip_and_peak(prof)
        i_min = int(np.argmin(prof.avg_tangle))
        interior = 0 < i_min < len(prof.theta) - 1
        if ratio < 0.25 and interior and q_peak:
            return True, (f"L=8 even, levels {ac.level_pair} at theta*={ac.theta_star:.4f} (gap {ac.min_gap:.1e}): "
                          f"tangle min/edge = {ratio:.3f} (< 0.25), Q max at window index "
                          f"{int(np.argmax(prof.avg_Q))}/{len(prof.theta) - 1}")
    return False, f"none of {len(crossings)} detected crossings shows a tangle dip with a Q peak"


def c6_subsystem_entropy():
    fits = {}
    for name, theta in (("7pi/16", 7 * math.pi / 16), ("pi/2", math.pi / 2)):
        vecs = spectrum(ChainParams(12, theta=theta), "even").eigenvectors
        S = entropy_curve(vecs, 100)
        l = np.arange(1, 12)
        sel = (l >= 2) & (l <= 6)
        fits[name] = linear_fit(l[sel], S[sel])
    slope, _, r2 = fits["7pi/16"]
    slope_int = fits["pi/2"][0]
    ok = r2 > 0.98 and 0.7 <= slope <= 1.0 and slope_int <= 0.6 * slope
    return ok, (f"L=12 even, central 100 states, l=2..6: theta=7pi/16 slope {slope:.4f} (in [0.7, 1.0]), "
                f"R^2 {r2:.5f} (> 0.98); theta=pi/2 slope {slope_int:.4f} = "
                f"{slope_int / slope:.2f} x nonintegrable (<= 0.6)")


def c7_dynamics():
    L = 10
    psi0 = bell_seed_state(L)
    times = np.arange(1001) * 0.04
    m0 = measure_all(psi0)
    t0_ok = abs(m0.concurrence_matrix[0, 1] - 1) < 1e-12 and abs(m0.Q - 0.2) < 1e-12
    tq, q_ok_detail, q_ok = {}, "", False
    for name, theta in (("pi/3", math.pi / 3), ("pi/2", math.pi / 2), ("pi/6", math.pi / 6)):
        s = evolve(EvolutionPlan(ChainParams(L, theta=theta), psi0, times))
        avg = s.avg_nn_concurrence
        tq[name] = quench_time(times, avg, 0.05, 5.0)
        t0_ok = t0_ok and abs(s.nn_concurrence[0, 0] - 1) < 1e-12 and abs(s.Q[0] - 0.2) < 1e-12
        if name == "pi/3":
            above = np.flatnonzero(s.Q > 0.5)
            t_rise = times[above[0]] if len(above) else math.inf
            q_after = s.Q[above[0]:].min() if len(above) else 0.0
            late = avg[times >= 20].mean()
            q_ok = t_rise <= 5.0 and q_after > 0.5 and late < 0.5 * avg[0]
            q_ok_detail = (f"Q>0.5 from t={t_rise:.2f}, min afterwards {q_after:.4f}; "
                           f"mean avg-NN-C over t>=20 {late:.4f} vs {avg[0]:.4f} at t=0")
    order_ok = tq["pi/3"] < tq["pi/2"] and tq["pi/3"] < tq["pi/6"]
    ok = t0_ok and q_ok and order_ok
    fmt = ", ".join(f"{k}: {v:.2f}" for k, v in tq.items())
    return ok, f"L=10: t=0 C12=1, Q=0.2 {'ok' if t0_ok else 'WRONG'}; theta=pi/3 {q_ok_detail}; quench times {fmt}"


def _q_tangle_bound(rng):
    from tilted_ising.state import random_state

    for k in range(300):
        L = 2 + k % 7
        m = measure_all(random_state(L, rng))
        assert m.Q >= 2 / L * m.total_tangle - 1e-10


def c8_property_suites():
    import test_dynamics as td
    import test_entanglement as te
    import test_state as ts

    rng = np.random.default_rng(8)
    checks = {
        "monogamy (10^3 states, L<=8)": lambda: te.test_monogamy_thousand_states(rng),
        "Q-tangle bound": lambda: _q_tangle_bound(np.random.default_rng(9)),
        "local-unitary invariance": te.test_local_unitary_invariance,
        "partial-trace oracle (L<=5)": lambda: [ts.test_partial_trace_matches_dense_oracle(L, rng) for L in range(1, 6)],
        "Runge-Kutta oracle (L<=6)": lambda: [td.test_matches_runge_kutta(L, rng) for L in (2, 4, 6)],
        "norm/energy conservation": lambda: td.test_norm_and_energy_conservation(rng),
        "time reversal": lambda: td.test_time_reversal(rng),
    }
    failed = []
    for name, fn in checks.items():
        try:
            fn()
        except AssertionError:
            failed.append(name)
    return not failed, ("all of " + "; ".join(checks)) if not failed else "failed: " + "; ".join(failed)


def c9_statistical_oracles():
    from test_chaostats import goe_pooled_spacings

    d_exp = ks_statistic(np.random.default_rng(3).exponential(size=10_000)).D_poisson
    d_goe = ks_statistic(goe_pooled_spacings(np.random.default_rng(5))).D_wigner
    return d_exp < 0.02 and d_goe < 0.05, (f"exponential n=10^4 D_P = {d_exp:.4f} (< 0.02); "
                                           f"pooled GOE 50x50 D_W = {d_goe:.4f} (< 0.05)")


CRITERIA = {
    "C1": c1_small_spectra,
    "C2": c2_duality,
    "C3": c3_sectors,
    "C4": c4_nnsd_transition,
    "C5": c5_avoided_crossing,
    "C6": c6_subsystem_entropy,
    "C7": c7_dynamics,
    "C8": c8_property_suites,
    "C9": c9_statistical_oracles,
}


@pytest.mark.slow
@pytest.mark.parametrize("cid", list(CRITERIA))
def test_criterion(cid):
    ok, detail = CRITERIA[cid]()
    assert report(cid, ok, detail), RESULTS[cid]


if __name__ == "__main__":
    n_fail = 0
    for cid, fn in CRITERIA.items():
        n_fail += not report(cid, *fn())
    sys.exit(1 if n_fail else 0)
