"""Command-line front end.

Each subcommand writes CSV tables (with a ``# key=value`` metadata block) and
an SVG figure into ``--out``. Exit codes: 0 success, 2 usage error,
3 numerical failure, 4 resource limit.
"""

from __future__ import annotations

import argparse
import csv
import math
import re
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import chaostats as cs
from . import entanglement as ent
from . import spectra as sp
from .dynamics import (
    EvolutionPlan,
    ResourceLimitError,
    bell_seed_state,
    check_size,
    evolve,
    quench_time,
)
from .state import ChainParams

EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


class UsageError(Exception):
    pass


_ANGLE = re.compile(
    r"^\s*([+-])?\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)?"
    r"\s*(\*?\s*pi)?\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$"
)


def parse_angle(text: str) -> float:
    """Angle literal in radians: ``0.3``, ``pi``, ``7pi/16``, ``-pi/4``, ``3*pi/8``."""
    m = _ANGLE.match(text)
    if not m or (m.group(2) is None and m.group(3) is None):
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}")
    sign, num, has_pi, den = m.groups()
    value = float(num) if num is not None else 1.0
    if has_pi:
        value *= math.pi
    if den is not None:
        if float(den) == 0:
            raise argparse.ArgumentTypeError(f"division by zero in angle {text!r}")
        value /= float(den)
    return -value if sign == "-" else value


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` (inclusive ends) or a single angle."""
    parts = text.split(":")
    if len(parts) == 1:
        return np.array([parse_angle(parts[0])])
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must be start:stop:count, got {text!r}")
    try:
        count = int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid count must be an integer, got {parts[2]!r}") from None
    if count < 1:
        raise argparse.ArgumentTypeError("grid count must be at least 1")
    start, stop = parse_angle(parts[0]), parse_angle(parts[1])
    if stop < start:
        raise argparse.ArgumentTypeError("grid must be ascending")
    return np.linspace(start, stop, count)


def parse_levels(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"levels must be comma-separated integers, got {text!r}") from None


# ---------------------------------------------------------------- output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return "" if x is None else str(x)


def _meta_value(v) -> str:
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return "[" + ",".join(_meta_value(x) for x in v) + "]"
    return str(v)


def run_metadata(args: argparse.Namespace) -> dict:
    meta = {"tool": "tilted-ising", "version": __version__}
    for k, v in sorted(vars(args).items()):
        if k != "func":
            meta[k] = v
    return meta


def write_csv(path: Path, header: list[str], rows, meta: dict) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        for k, v in meta.items():
            fh.write(f"# {k}={_meta_value(v)}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) for x in row])


def _params(args, theta=0.0) -> ChainParams:
    return ChainParams(args.L, J=args.J, B=args.B, theta=theta)


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _label(theta: float) -> str:
    return f"theta/pi = {theta / math.pi:.4g}"


# ---------------------------------------------------------------- commands


def cmd_spectrum(args) -> int:
    from .plotting import levels_plot

    grid = args.theta_grid
    track = sp.sweep_spectrum(_params(args), grid, args.sector, workers=args.workers)
    levels = range(track.n_levels) if args.levels is None else args.levels
    for k in levels:
        if not 0 <= k < track.n_levels:
            raise UsageError(f"level {k} out of range 0..{track.n_levels - 1}")
    out = _outdir(args)
    rows = ((t, k, track.levels[i, k]) for k in levels for i, t in enumerate(grid))
    write_csv(out / "levels.csv", ["theta", "level_index", "energy"], rows, run_metadata(args))
    levels_plot(out / "levels.svg", grid, track.levels[:, list(levels)],
                f"L={args.L}, {args.sector} sector")
    return 0


def _spacing_rows(theta, a: cs.SpacingAnalysis, extra=()):
    ks = a.ks
    return [theta, a.degeneracy,
            0 if ks is None else ks.n,
            None if a.unfolded is None else a.unfolded.mean_spacing,
            None if ks is None else ks.D_poisson,
            None if ks is None else ks.D_wigner, *extra, a.note]


def cmd_nnsd(args) -> int:
    from .plotting import nnsd_plot

    out = _outdir(args)
    meta = run_metadata(args)
    hist_rows, summary, panels = [], [], []
    for theta in args.theta:
        res = sp.spectrum(_params(args, theta), args.sector, want_vectors=False)
        a = cs.analyze_spacings(res.eigenvalues, args.fit_degree, args.trim)
        if a.ks is None:
            print(f"theta={theta:.6g}: {a.note}", file=sys.stderr)
            panels.append((_label(theta), np.zeros(0), np.zeros(0)))
        else:
            s = a.unfolded.spacings
            centers, dens = cs.nnsd_histogram(s[s >= cs.DEGENERACY_TOL], args.bin_width)
            wig, poi = cs.wigner_pdf(centers), cs.poisson_pdf(centers)
            hist_rows += [(theta, c, d, w, p) for c, d, w, p in zip(centers, dens, wig, poi)]
            panels.append((_label(theta), centers, dens))
        summary.append(_spacing_rows(theta, a))
    write_csv(out / "nnsd.csv", ["theta", "bin_center", "density", "wigner", "poisson"], hist_rows, meta)
    write_csv(out / "nnsd_summary.csv",
              ["theta", "degeneracy_fraction", "n_spacings", "mean_spacing", "D_poisson", "D_wigner", "note"],
              summary, meta)
    nnsd_plot(out / "nnsd.svg", panels)
    return 0


def cmd_ks(args) -> int:
    from .plotting import ks_plot

    out = _outdir(args)
    rows = []
    for theta in args.theta_grid:
        res = sp.spectrum(_params(args, theta), args.sector, want_vectors=True)
        mean_s = float(np.mean(ent.half_chain_entropies(res.eigenvectors)))
        a = cs.analyze_spacings(res.eigenvalues, args.fit_degree, args.trim)
        if a.ks is None:
            print(f"theta={theta:.6g}: {a.note}", file=sys.stderr)
        rows.append(_spacing_rows(theta, a, (mean_s,)))
    write_csv(out / "ks.csv",
              ["theta", "degeneracy_fraction", "n_spacings", "mean_spacing", "D_poisson", "D_wigner",
               "mean_S_half", "note"],
              rows, run_metadata(args))
    nan = float("nan")
    ks_plot(out / "ks.svg", args.theta_grid, [r[6] for r in rows],
            [nan if r[4] is None else r[4] for r in rows], [nan if r[5] is None else r[5] for r in rows])
    return 0


def central_indices(n: int, count: int) -> np.ndarray:
    """Indices of the ``count`` middle levels of an n-level spectrum."""
    count = min(count, n)
    start = (n - count) // 2
    return np.arange(start, start + count)


def entropy_curve(vectors: np.ndarray, count: int = 100) -> np.ndarray:
    """S_l (bits, l = 1..L-1) averaged over the central ``count`` columns."""
    idx = central_indices(vectors.shape[1], count)
    return np.mean([ent.entropy_profile(vectors[:, k]) for k in idx], axis=0)


def linear_fit(x, y) -> tuple[float, float, float]:
    """(slope, intercept, R^2) of an ordinary least-squares line."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 - np.sum(resid ** 2) / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)


def cmd_eigent(args) -> int:
    from .plotting import eigent_plot, sl_plot

    out = _outdir(args)
    meta = run_metadata(args)
    table, panels, sl_rows, fit_rows, curves = [], [], [], [], []
    lo, hi = args.sl_fit_range
    for theta in args.theta:
        res = sp.spectrum(_params(args, theta), args.sector)
        report = sp.eigenstate_report(res, workers=args.workers)
        table += [(theta, k, r.energy, r.log_PR, r.S_sh, r.Q, r.S_half) for k, r in enumerate(report)]
        panels.append((_label(theta), *(np.array([getattr(r, f) for r in report])
                                        for f in ("energy", "log_PR", "Q", "S_sh", "S_half"))))
        if args.sl_curve:
            S = entropy_curve(res.eigenvectors, args.n_central)
            l = np.arange(1, args.L)
            sl_rows += [(theta, li, si) for li, si in zip(l, S)]
            curves.append((_label(theta), l, S))
            sel = (l >= lo) & (l <= hi)
            if sel.sum() >= 2:
                fit_rows.append((theta, lo, min(hi, args.L - 1), *linear_fit(l[sel], S[sel])))
    write_csv(out / "eigent.csv", ["theta", "index", "energy", "log_PR", "S_sh", "Q", "S_half"], table, meta)
    eigent_plot(out / "eigent.svg", panels)
    if args.sl_curve:
        write_csv(out / "sl.csv", ["theta", "l", "S_l"], sl_rows, meta)
        write_csv(out / "sl_fit.csv", ["theta", "l_min", "l_max", "slope", "intercept", "r_squared"], fit_rows, meta)
        sl_plot(out / "sl.svg", curves)
    return 0


def dip_and_peak(profile: sp.CrossingProfile) -> tuple[float, bool]:
    """(min pair-averaged tangle / smaller edge value, whether Q peaks inside the window)."""
    tau = profile.avg_tangle
    q = profile.avg_Q
    edge = min(tau[0], tau[-1])
    ratio = float(tau.min() / edge) if edge > 0 else float("nan")
    iq = int(np.argmax(q))
    return ratio, bool(0 < iq < len(q) - 1)


def cmd_avoided(args) -> int:
    from .plotting import avoided_plot, crossing_plot

    out = _outdir(args)
    meta = run_metadata(args)
    grid = args.theta_grid
    if len(grid) < 3:
        raise UsageError("avoided-crossing search needs a grid of at least 3 angles")

    if args.two_level is not None:
        theta0, g = args.two_level
        track = sp.synthetic_track(sp.two_level_matrix_fn(theta0, g), grid)
        acs = sp.find_avoided_crossings(track, (0, 1), args.refine_tol)
        write_csv(out / "avoided_levels.csv", ["theta", "level_index", "energy"],
                  ((t, k, track.levels[i, k]) for k in (0, 1) for i, t in enumerate(grid)), meta)
        write_csv(out / "crossings.csv", ["level_lo", "level_hi", "theta_star", "min_gap", "degenerate"],
                  ((*ac.level_pair, ac.theta_star, ac.min_gap, ac.degenerate) for ac in acs), meta)
        return 0

    params = _params(args)
    n = sp.spectrum(params, args.sector, want_vectors=False).n_levels
    levels = args.levels
    if levels is None:
        levels = list(central_indices(n, 3))
    levels = sorted(set(levels))
    for k in levels:
        if not 0 <= k < n:
            raise UsageError(f"level {k} out of range 0..{n - 1} for the {args.sector} sector")

    track = sp.sweep_spectrum(params, grid, args.sector, levels=levels, measures=True, workers=args.workers)
    rows = ((t, k, track.levels[i, c], track.measures["Q"][i, c], track.measures["total_tangle"][i, c],
             track.measures["S_half"][i, c])
            for c, k in enumerate(levels) for i, t in enumerate(grid))
    write_csv(out / "avoided_levels.csv", ["theta", "level_index", "energy", "Q", "total_tangle", "S_half"],
              rows, meta)
    avoided_plot(out / "avoided.svg", grid, track.levels, track.measures["Q"], track.measures["total_tangle"],
                 track.measures["S_half"], [f"level {k}" for k in levels])

    crossing_rows, profile_rows, profiles = [], [], []
    for c in range(len(levels) - 1):
        if levels[c + 1] != levels[c] + 1:
            continue
        for ac in sp.find_avoided_crossings(track, (c, c + 1), args.refine_tol, workers=args.workers):
            prof = sp.crossing_profile(params, args.sector, ac, widths=args.widths,
                                       n_points=args.profile_points, workers=args.workers)
            ratio, q_peak = dip_and_peak(prof)
            cid = len(crossing_rows)
            half = 0.5 * (prof.theta[-1] - prof.theta[0])
            crossing_rows.append((cid, *ac.level_pair, ac.theta_star, ac.min_gap, half / args.widths,
                                  ac.degenerate, ratio, q_peak))
            profile_rows += [(cid, t, q, tau, s) for t, q, tau, s in
                             zip(prof.theta, prof.avg_Q, prof.avg_tangle, prof.avg_S_half)]
            profiles.append((f"levels {ac.level_pair[0]}-{ac.level_pair[1]} @ {ac.theta_star:.4f}",
                             prof.theta, prof.avg_Q, prof.avg_tangle))
    write_csv(out / "crossings.csv",
              ["crossing", "level_lo", "level_hi", "theta_star", "min_gap", "width", "degenerate",
               "tangle_dip_ratio", "q_peak_inside"],
              crossing_rows, meta)
    write_csv(out / "ac_profile.csv", ["crossing", "theta", "avg_Q", "avg_tangle", "avg_S_half"],
              profile_rows, meta)
    if profiles:
        crossing_plot(out / "ac_profile.svg", profiles)
    return 0


def cmd_evolve(args) -> int:
    from .plotting import concurrence_heatmap, time_series_plot

    out = _outdir(args)
    meta = run_metadata(args)
    steps = int(round(args.tmax / args.dt))
    times = np.arange(steps + 1) * args.dt
    try:
        psi0 = bell_seed_state(args.L, tuple(args.pair), args.filler)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    nn_rows, q_rows, tau_rows, quench_rows = [], [], [], []
    heat, q_series, c_series = [], [], []
    n_pairs = args.L * (args.L - 1) / 2
    for theta in args.theta:
        series = evolve(EvolutionPlan(_params(args, theta), psi0, times), workers=args.workers)
        avg = series.avg_nn_concurrence
        for i, t in enumerate(times):
            nn_rows += [(theta, t, l + 1, c) for l, c in enumerate(series.nn_concurrence[i])]
        q_rows += list(zip([theta] * len(times), times, series.Q))
        tau_rows += [(theta, t, a, tau, tau / n_pairs) for t, a, tau in zip(times, avg, series.total_tangle)]
        tq = quench_time(times, avg, args.threshold, args.window)
        quench_rows.append((theta, tq if math.isfinite(tq) else "not_quenched", args.threshold, args.window))
        heat.append((_label(theta), times, series.nn_concurrence))
        q_series.append((_label(theta), times, series.Q))
        c_series.append((_label(theta), times, avg))
    write_csv(out / "nn_concurrence.csv", ["theta", "time", "pair_index", "concurrence"], nn_rows, meta)
    write_csv(out / "q.csv", ["theta", "time", "Q"], q_rows, meta)
    write_csv(out / "avg_tangle.csv", ["theta", "time", "avg_nn_concurrence", "total_tangle", "avg_tangle"],
              tau_rows, meta)
    write_csv(out / "quench.csv", ["theta", "quench_time", "threshold", "window"], quench_rows, meta)
    concurrence_heatmap(out / "nn_concurrence.svg", heat)
    time_series_plot(out / "q.svg", q_series, "Q")
    time_series_plot(out / "avg_tangle.svg", c_series, "average NN concurrence")
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--L", type=int, required=True, help="number of spins")
    common.add_argument("--J", type=float, default=1.0, help="Ising coupling")
    common.add_argument("--B", type=float, default=1.0, help="field magnitude")
    common.add_argument("--out", default=".", help="output directory")
    common.add_argument("--workers", type=int, default=1, help="worker threads")
    common.add_argument("--seed", type=int, default=0, help="recorded for reproducibility")

    def sector_arg(p, default):
        p.add_argument("--sector", choices=sp_sectors, default=default)

    def unfold_args(p):
        p.add_argument("--fit-degree", type=int, default=cs.DEFAULT_FIT_DEGREE)
        p.add_argument("--trim", type=float, default=cs.DEFAULT_TRIM, help="fraction trimmed per spectral edge")

    sp_sectors = ("even", "odd", "full")
    parser = argparse.ArgumentParser(prog="tilted-ising", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common], help="level dynamics E_k(theta)")
    sector_arg(p, "even")
    p.add_argument("--theta-grid", "--grid", dest="theta_grid", type=parse_grid, default=parse_grid("0:pi/2:200"))
    p.add_argument("--levels", type=parse_levels, default=None, help="subset of level indices to emit")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("nnsd", parents=[common], help="nearest-neighbour spacing distribution")
    sector_arg(p, "even")
    p.add_argument("--theta", type=parse_angle, nargs="+", default=[parse_angle("7pi/16")])
    unfold_args(p)
    p.add_argument("--bin-width", type=float, default=0.1)
    p.set_defaults(func=cmd_nnsd)

    p = sub.add_parser("ks", parents=[common], help="KS distances and mean S_{L/2} over a theta sweep")
    sector_arg(p, "even")
    p.add_argument("--theta-grid", "--grid", dest="theta_grid", type=parse_grid, default=parse_grid("pi/32:pi/2:16"))
    unfold_args(p)
    p.set_defaults(func=cmd_ks)

    p = sub.add_parser("eigent", parents=[common], help="entanglement of all eigenstates")
    sector_arg(p, "full")
    p.add_argument("--theta", type=parse_angle, nargs="+", default=[parse_angle("pi/2"), parse_angle("7pi/16")])
    p.add_argument("--sl-curve", action="store_true", help="also average S_l over the central eigenstates")
    p.add_argument("--n-central", type=int, default=100)
    p.add_argument("--sl-fit-range", type=int, nargs=2, default=[2, 6], metavar=("LMIN", "LMAX"))
    p.set_defaults(func=cmd_eigent)

    p = sub.add_parser("avoided", parents=[common], help="avoided crossings and entanglement exchange")
    sector_arg(p, "even")
    p.add_argument("--theta-grid", "--grid", dest="theta_grid", type=parse_grid, default=parse_grid("0:pi/2:200"))
    p.add_argument("--levels", type=parse_levels, default=None, help="sector level indices, e.g. 44,45,46")
    p.add_argument("--refine-tol", type=float, default=1e-6)
    p.add_argument("--widths", type=float, default=5.0, help="profile half-window in crossing widths")
    p.add_argument("--profile-points", type=int, default=41)
    p.add_argument("--two-level", type=float, nargs=2, default=None, metavar=("THETA0", "G"),
                   help="replace the chain by the synthetic 2x2 model [[t-t0, g], [g, t0-t]]")
    p.set_defaults(func=cmd_avoided)

    p = sub.add_parser("evolve", parents=[common], help="entanglement dynamics from a Bell-pair seed")
    p.add_argument("--theta", type=parse_angle, nargs="+",
                   default=[parse_angle(x) for x in ("pi/2", "5pi/12", "pi/3", "pi/6")])
    p.add_argument("--dt", type=float, default=0.04)
    p.add_argument("--tmax", type=float, default=40.0)
    p.add_argument("--pair", type=int, nargs=2, default=[1, 2], metavar=("I", "J"))
    p.add_argument("--filler", type=int, choices=(0, 1), default=1, help="bit of the spectator spins")
    p.add_argument("--threshold", type=float, default=0.05)
    p.add_argument("--window", type=float, default=5.0)
    p.set_defaults(func=cmd_evolve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.L < 1:
        parser.error("--L must be at least 1")
    if args.workers < 1:
        parser.error("--workers must be at least 1")
    try:
        check_size(args.L)
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))
    except cs.UnfoldingError as exc:
        print(f"error: unfolding failed: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ResourceLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as exc:
        parser.error(str(exc))


if __name__ == "__main__":
    sys.exit(main())
