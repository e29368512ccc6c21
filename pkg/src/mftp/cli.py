"""Command-line front end.

Subcommands: simulate (one (L, p) cell), sweep (grid from a config
file), bound / threshold / estimate (analytics, JSON to stdout), fit
(decay rates from a results CSV), cool-demo (cooling snapshots as
PGM/CSV grids).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import analytics, digital_cooling, harness, rpgm_cooler
from .lattice import Boundary, build_lattice
from .pauli_frame import PauliFrame, compute_syndrome, inject_errors


def _parse_schedule(text: str) -> list:
    """beta:sweeps pairs, comma separated, e.g. '0.1:250,0.5:250,2.3:500'."""
    stages = []
    for part in text.split(","):
        beta, sweeps = part.split(":")
        stages.append((float(beta), int(sweeps)))
    return stages


def _add_sim_flags(sp):
    sp.add_argument("--alpha", type=float, default=1.0)
    sp.add_argument("--cycles", type=int, default=100)
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--sweeps", type=int, default=2000)
    sp.add_argument("--cooler", default="metropolis",
                    choices=["metropolis", "digital", "oracle"])
    sp.add_argument("--seed", type=int, default=42)
    sp.add_argument("--out", default=None)
    sp.add_argument("--workers", type=int, default=1)
    sp.add_argument("--boundary", default="toric", choices=["toric", "planar"])
    sp.add_argument("--decoder", default="exact", choices=["exact", "greedy"])
    sp.add_argument("--h", type=float, default=1.0)
    sp.add_argument("--J", type=float, default=None,
                    help="fix the plaquette coupling instead of alpha*ln(L) scaling")
    sp.add_argument("--beta", type=float, default=None,
                    help="override the Nishimori target temperature")
    sp.add_argument("--schedule", type=_parse_schedule, default=None)


def _config_from_args(args, L_list, p_list) -> harness.ExperimentConfig:
    return harness.ExperimentConfig(
        L_list=L_list, p_list=p_list, alpha=args.alpha, boundary=args.boundary,
        cooler=args.cooler, cycles=args.cycles, trials=args.trials,
        sweeps=args.sweeps, base_seed=args.seed, out=args.out,
        workers=args.workers, h=args.h, J=args.J, beta=args.beta,
        schedule=args.schedule, decoder=args.decoder)


def read_config_file(path: str) -> dict:
    """Flat key-value config: 'key = value' lines, '#' comments,
    comma-separated lists for L and p."""
    values: dict = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw.rstrip()}")
            key, val = (part.strip() for part in line.split("=", 1))
            values[key] = val
    return values


def _sweep_config(values: dict) -> harness.ExperimentConfig:
    kw: dict = {}
    kw["L_list"] = [int(x) for x in values.pop("L", "8").split(",")]
    kw["p_list"] = [float(x) for x in values.pop("p", "0.02").split(",")]
    casts = {"alpha": float, "cycles": int, "trials": int, "sweeps": int,
             "seed": int, "workers": int, "h": float, "J": float,
             "beta": float, "decoder_cap": int}
    renames = {"seed": "base_seed"}
    for key, val in values.items():
        if key == "schedule":
            kw["schedule"] = _parse_schedule(val)
        elif key in casts:
            kw[renames.get(key, key)] = casts[key](val)
        elif key in ("boundary", "cooler", "out", "decoder"):
            kw[key] = val
        else:
            raise ValueError(f"unknown config key {key!r}")
    return harness.ExperimentConfig(**kw)


def _emit(obj) -> None:
    print(json.dumps(obj, indent=2))


def cmd_simulate(args) -> int:
    config = _config_from_args(args, [args.L], [args.p])
    _, summary = harness.run_sweep(config)
    _emit(summary)
    return 0


def cmd_sweep(args) -> int:
    config = _sweep_config(read_config_file(args.config))
    if args.out:
        config.out = args.out
    _, summary = harness.run_sweep(config)
    _emit(summary)
    return 0


def cmd_bound(args) -> int:
    inputs = analytics.BoundInputs(p=args.p, L=args.L, alpha=args.alpha)
    _emit({"p": args.p, "L": args.L, "alpha": args.alpha, "r_cor": inputs.r_cor,
           "logical_error_bound": analytics.logical_error_bound(inputs),
           "saw_chain_bound": analytics.saw_chain_bound(args.p, max(1.0, inputs.r_cor))})
    return 0


def cmd_threshold(args) -> int:
    _emit({"alpha": args.alpha, "p_th": analytics.analytic_threshold(args.alpha)})
    return 0


def cmd_fit(args) -> int:
    cells = []
    for (L, p), series in sorted(harness.load_series_csv(args.infile).items()):
        fit = analytics.fit_gamma_eff(series)
        cells.append({"L": L, "p": p, "gamma_eff": fit.gamma_eff,
                      "residual": fit.residual, "flag": fit.flag,
                      "trials": int(series.n_trials[0])})
    _emit({"cells": cells})
    return 0


def cmd_estimate(args) -> int:
    gamma = 1.0
    Gamma = args.gamma_ratio * gamma
    kappa = Gamma / args.kappa_ratio
    params = analytics.ResourceParams(
        gamma=gamma, kappa=kappa, Gamma=Gamma,
        J_over_gamma=args.J_ratio, h_over_gamma=args.h_ratio,
        trotter_product_J=args.trotter_product,
        trotter_product_h=args.trotter_product,
        mc_steps=args.mc_steps)
    result = analytics.resource_estimate(params)
    result["units"] = "times in 1/gamma"
    _emit(result)
    return 0


def _edge_grid(geom, u) -> np.ndarray:
    """Render edge spins on a (2L+1)^2 grid: 255 background, 200 up, 0 down."""
    L = geom.L
    grid = np.full((2 * L + 1, 2 * L + 1), 255, dtype=np.uint8)

    def put(row, col, val):
        grid[row % (2 * L + 1), col % (2 * L + 1)] = val

    for e in range(geom.edge_count):
        if geom.boundary is Boundary.TORIC:
            r, c = divmod(e % (L * L), L)
            row, col = (2 * r, 2 * c + 1) if e < L * L else (2 * r + 1, 2 * c)
        else:
            if e < L * L:
                r, c = divmod(e, L)
                row, col = 2 * r, 2 * c + 1
            else:
                r, c = divmod(e - L * L, L - 1)
                row, col = 2 * r + 1, 2 * c + 2
        put(row, col, 0 if u[e] < 0 else 200)
    return grid


def _write_pgm(path: str, grid: np.ndarray) -> None:
    with open(path, "w") as fh:
        fh.write(f"P2\n{grid.shape[1]} {grid.shape[0]}\n255\n")
        for row in grid:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def _write_grid_csv(path: str, grid: np.ndarray) -> None:
    np.savetxt(path, grid, fmt="%d", delimiter=",")


def cmd_cool_demo(args) -> int:
    """Cooling snapshots on one error sample, dumped as PGM and CSV."""
    geom = build_lattice(args.L, args.boundary)
    rng = np.random.Generator(np.random.Philox(key=[args.seed, 0x64656D6F]))
    frame = inject_errors(PauliFrame(geom.edge_count), args.p, rng)
    syn = compute_syndrome(frame, geom)
    os.makedirs(args.out_dir, exist_ok=True)

    beta_target = rpgm_cooler.nishimori_beta(args.p, args.h) if args.beta is None else args.beta
    schedule = args.schedule or [(bh / args.h, args.sweeps // 4)
                                 for bh in (0.1, 0.5, 0.8, 2.3)]
    params = rpgm_cooler.CoolingParams(h=args.h, J=args.J or 1.0, alpha=args.alpha,
                                       beta_target=beta_target,
                                       mode="fixed" if args.J else "log",
                                       sweeps_total=args.sweeps)
    written = []
    if args.engine == "metropolis":
        tables = rpgm_cooler.sector_tables(geom, "vertex")
        u = np.ones(geom.edge_count, dtype=np.int8)
        sat = tables.initial_sat(syn.b)
        from ._kernels import coerce_seed, metropolis_kernel
        state = coerce_seed(args.seed)
        for i, (beta, sweeps) in enumerate(schedule):
            if args.independent:
                u = np.ones(geom.edge_count, dtype=np.int8)
                sat = tables.initial_sat(syn.b)
            state, _, _, _ = metropolis_kernel(u, sat, tables.edge_plaq,
                                               params.coupling(geom.L), args.h,
                                               np.array([beta]),
                                               np.array([sweeps], dtype=np.int64),
                                               state)
            state = np.uint64(state)
            written.append(_dump_snapshot(args.out_dir, f"{i}_beta_{beta:g}", geom, u))
    else:
        dparams = digital_cooling.DigitalCoolingParams(
            tau=0.25, m=args.sweeps, beta=beta_target,
            J=params.coupling(geom.L), h=args.h)
        u = digital_cooling.trotter_cool(syn, dparams, geom, args.seed)
        written.append(_dump_snapshot(args.out_dir, f"final_beta_{beta_target:g}", geom, u))

    residual = frame.z_errors ^ rpgm_cooler.correction_from_spins(u)
    written.append(_dump_snapshot(args.out_dir, "residual", geom, 1 - 2 * residual.astype(np.int8)))
    _emit({"engine": args.engine, "L": args.L, "p": args.p,
           "snapshots": written, "residual_weight": int(residual.sum())})
    return 0


def _dump_snapshot(out_dir, name, geom, u) -> str:
    grid = _edge_grid(geom, u)
    base = os.path.join(out_dir, f"snapshot_{name}")
    _write_pgm(base + ".pgm", grid)
    _write_grid_csv(base + ".csv", grid)
    return base + ".pgm"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mftp")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="run one (L, p) cell")
    sp.add_argument("--L", type=int, required=True)
    sp.add_argument("--p", type=float, required=True)
    _add_sim_flags(sp)
    sp.set_defaults(fn=cmd_simulate)

    sp = sub.add_parser("sweep", help="run a grid from a key=value config file")
    sp.add_argument("--config", required=True)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=cmd_sweep)

    sp = sub.add_parser("bound", help="analytic logical-error bound")
    sp.add_argument("--alpha", type=float, required=True)
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--L", type=int, required=True)
    sp.set_defaults(fn=cmd_bound)

    sp = sub.add_parser("threshold", help="analytic threshold for a scaling constant")
    sp.add_argument("--alpha", type=float, required=True)
    sp.set_defaults(fn=cmd_threshold)

    sp = sub.add_parser("fit", help="fit decay rates from a results CSV")
    sp.add_argument("--in", dest="infile", required=True)
    sp.set_defaults(fn=cmd_fit)

    sp = sub.add_parser("estimate", help="physical parameter budget")
    sp.add_argument("--gamma-ratio", type=float, required=True,
                    help="decoherence over dissipation rate, Gamma/gamma")
    sp.add_argument("--kappa-ratio", type=float, required=True,
                    help="decoherence over coupling rate, Gamma/kappa")
    sp.add_argument("--J-ratio", type=float, default=10.0, dest="J_ratio")
    sp.add_argument("--h-ratio", type=float, default=10.0, dest="h_ratio")
    sp.add_argument("--trotter-product", type=float, default=0.1)
    sp.add_argument("--mc-steps", type=float, default=100.0)
    sp.set_defaults(fn=cmd_estimate)

    sp = sub.add_parser("cool-demo", help="dump cooling snapshots as PGM/CSV grids")
    sp.add_argument("--engine", default="metropolis", choices=["metropolis", "digital"])
    sp.add_argument("--L", type=int, default=16)
    sp.add_argument("--p", type=float, default=0.05)
    sp.add_argument("--out-dir", default="cool_demo")
    sp.add_argument("--independent", action="store_true",
                    help="equilibrate each snapshot temperature from scratch")
    _add_sim_flags(sp)
    sp.set_defaults(fn=cmd_cool_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
