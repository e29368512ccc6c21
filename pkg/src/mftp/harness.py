"""Trial harness: full correction cycles over seeded ensembles.

One cycle corrects Z then X errors: extract the syndrome, cool the
feedback spin layer against it, and push the down-spin indicator back
into the frame as a transversal correction (the X sub-cycle is the
same machinery on the dual face sector).  Trials run cycle by cycle,
classifying the residual homology against the reference decoder after
every cycle on a cloned frame.

Determinism contract
--------------------
Every trial's randomness derives from its 64-bit seed

    s = mix64(mix64(mix64(mix64(base_seed) ^ L) ^ bits(p)) ^ trial)

with mix64 the splitmix64 finalizer and bits(p) the IEEE-754 pattern of
p.  Noise injection uses a counter-based Philox stream keyed
(s, "nois"); each cooling call is keyed (s, "cool", cycle, sector).
Results are therefore byte-identical across runs and worker counts.

CSV schema (one row per trial and cycle, bit-exact):

    trial,seed,L,p,cycle,class,failed

``class`` is the residual logical class (I/X/Z/Y) after that cycle and
``failed`` is 1 when it is not I.  The summary JSON carries the fitted
decay rate, a bootstrap confidence interval and the trial count per
(L, p) cell.
"""

from __future__ import annotations

import concurrent.futures
import json
import math
import struct
from dataclasses import dataclass, field

import numpy as np

from . import decoder_ref, digital_cooling, rpgm_cooler
from ._kernels import mix64
from .analytics import FailureSeries, fit_gamma_eff
from .lattice import LatticeGeometry, build_lattice
from .pauli_frame import (LogicalClass, PauliFrame, compute_syndrome,
                          homology_class, inject_errors)
from .rpgm_cooler import CoolingParams, correction_from_spins, nishimori_beta

_NOISE_TAG = 0x73696F6E   # "nois"
_COOL_TAG = 0x6C6F6F63    # "cool"

_GEOM_CACHE: dict = {}


def cached_lattice(L: int, boundary: str) -> LatticeGeometry:
    key = (L, boundary)
    if key not in _GEOM_CACHE:
        _GEOM_CACHE[key] = build_lattice(L, boundary)
    return _GEOM_CACHE[key]


def derive_trial_seed(base_seed: int, L: int, p: float, trial: int) -> int:
    s = mix64(base_seed)
    s = mix64(s ^ L)
    s = mix64(s ^ struct.unpack("<Q", struct.pack("<d", p))[0])
    return mix64(s ^ trial)


def _cool_seed(trial_seed: int, cycle: int, sector_id: int) -> np.uint64:
    return np.uint64(mix64(mix64(trial_seed ^ _COOL_TAG) ^ (cycle << 1 | sector_id)))


@dataclass
class ExperimentConfig:
    L_list: list = field(default_factory=lambda: [8])
    p_list: list = field(default_factory=lambda: [0.02])
    alpha: float = 1.0
    boundary: str = "toric"
    cooler: str = "metropolis"        # metropolis | digital | oracle
    cycles: int = 100
    trials: int = 100
    sweeps: int = 2000
    base_seed: int = 42
    out: str | None = None
    workers: int = 1
    h: float = 1.0
    J: float | None = None            # fixes the coupling instead of alpha*ln(L)
    beta: float | None = None         # overrides the Nishimori temperature
    schedule: list | None = None
    decoder: str = "exact"            # exact | greedy
    decoder_cap: int = decoder_ref.EXACT_DEFECT_CAP
    digital_tau: float = 0.25
    digital_m: int | None = None      # default: 2 * sweeps

    def __post_init__(self):
        if self.cycles < 1 or self.trials < 1:
            raise ValueError("cycles and trials must be >= 1")

    def beta_for(self, p: float) -> float:
        if self.beta is not None:
            return self.beta
        if p <= 0.0:
            return 2.3 / self.h
        if p >= 0.5:
            return 0.0
        return nishimori_beta(p, self.h)

    def cooling_params(self, p: float) -> CoolingParams:
        mode = rpgm_cooler.CouplingMode.LOG_SCALED_J
        J = 1.0
        if self.J is not None:
            mode, J = rpgm_cooler.CouplingMode.FIXED_J, self.J
        return CoolingParams(h=self.h, J=J, alpha=self.alpha,
                             beta_target=self.beta_for(p),
                             schedule=self.schedule,
                             sweeps_total=self.sweeps, mode=mode)


@dataclass
class TrialRecord:
    """Per-cycle outcome of one seeded trial.

    ``failed`` flags the cycles whose residual class is not I (the
    fraction fitted by the decay-rate model); ``failed_any`` is its
    running OR, monotone by construction, with ``first_failure`` the
    first failing cycle (-1 if none).
    """

    trial: int
    seed: int
    L: int
    p: float
    classes: list
    failed: np.ndarray
    failed_any: np.ndarray
    first_failure: int


class MetropolisCooler:
    def __init__(self, params: CoolingParams, geom: LatticeGeometry):
        self.J = params.coupling(geom.L)
        self.h = params.h
        self.betas, self.sweeps = params.resolved_schedule()
        self.tables = {s: rpgm_cooler.sector_tables(geom, s) for s in ("vertex", "face")}

    def feedback(self, frame, syn, sector, seed) -> np.ndarray:
        signs = rpgm_cooler.sector_signs(syn, sector)
        u = rpgm_cooler.cool_with_tables(signs, self.tables[sector], self.J, self.h,
                                         self.betas, self.sweeps, seed)
        return correction_from_spins(u)


class DigitalCooler:
    def __init__(self, params: digital_cooling.DigitalCoolingParams, geom: LatticeGeometry):
        self.params = params
        self.tables = {s: rpgm_cooler.sector_tables(geom, s) for s in ("vertex", "face")}

    def feedback(self, frame, syn, sector, seed) -> np.ndarray:
        signs = rpgm_cooler.sector_signs(syn, sector)
        u = digital_cooling.cool_with_tables(signs, self.tables[sector], self.params, seed)
        return correction_from_spins(u)


class OracleExactCooler:
    """Feeds back the exact error indicator (perfect-cooling limit)."""

    def feedback(self, frame, syn, sector, seed) -> np.ndarray:
        bits = frame.z_errors if sector == "vertex" else frame.x_errors
        return bits.copy()


def make_cooler(config: ExperimentConfig, geom: LatticeGeometry, p: float):
    name = config.cooler.lower()
    if name == "metropolis":
        return MetropolisCooler(config.cooling_params(p), geom)
    if name == "digital":
        params = config.cooling_params(p)
        m = config.digital_m if config.digital_m is not None else 2 * config.sweeps
        dparams = digital_cooling.DigitalCoolingParams(
            tau=config.digital_tau, m=m, beta=config.beta_for(p),
            J=params.coupling(geom.L), h=config.h,
            rate_mode=digital_cooling.RateMode.DETAILED_BALANCE)
        return DigitalCooler(dparams, geom)
    if name in ("oracle", "oracleexact", "oracle-exact"):
        return OracleExactCooler()
    raise ValueError(f"unknown cooler {config.cooler!r}")


def mftp_cycle(frame: PauliFrame, geom: LatticeGeometry, cooler,
               trial_seed: int, cycle: int) -> PauliFrame:
    """One Z-then-X correction cycle (noise injection is the caller's)."""
    syn = compute_syndrome(frame, geom)
    z_corr = cooler.feedback(frame, syn, "vertex", _cool_seed(trial_seed, cycle, 0))
    frame.z_errors ^= z_corr
    x_corr = cooler.feedback(frame, syn, "face", _cool_seed(trial_seed, cycle, 1))
    frame.x_errors ^= x_corr
    return frame


def run_trial(config: ExperimentConfig, L: int, p: float, trial: int,
              geom: LatticeGeometry | None = None, cooler=None) -> TrialRecord:
    """One seeded trial: T cycles of inject / correct / classify."""
    if geom is None:
        geom = cached_lattice(L, config.boundary)
    if cooler is None:
        cooler = make_cooler(config, geom, p)
    seed = derive_trial_seed(config.base_seed, L, p, trial)
    noise_rng = np.random.Generator(np.random.Philox(key=[seed, _NOISE_TAG]))
    greedy = config.decoder == "greedy"

    def decoder(f, g):
        return decoder_ref.match_and_correct(f, g, cap=config.decoder_cap,
                                             force_greedy=greedy)

    frame = PauliFrame(geom.edge_count)
    classes = []
    failed = np.zeros(config.cycles, dtype=np.uint8)
    for t in range(1, config.cycles + 1):
        inject_errors(frame, p, noise_rng)
        mftp_cycle(frame, geom, cooler, seed, t)
        cls = homology_class(frame, geom, decoder)
        classes.append(cls)
        failed[t - 1] = cls is not LogicalClass.I
    failed_any = np.maximum.accumulate(failed)
    hits = np.flatnonzero(failed)
    first = int(hits[0] + 1) if hits.size else -1
    return TrialRecord(trial, seed, L, p, classes, failed, failed_any, first)


def _trial_task(args):
    config, L, p, trial = args
    return run_trial(config, L, p, trial)


def run_cell(config: ExperimentConfig, L: int, p: float) -> list:
    """All trials of one (L, p) cell, optionally on a worker pool.

    Trials are independent and own their state; ordering and content
    are seed-determined, so the worker count never changes the output.
    """
    if config.workers > 1:
        tasks = [(config, L, p, t) for t in range(config.trials)]
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            records = list(pool.map(_trial_task, tasks, chunksize=4))
    else:
        geom = cached_lattice(L, config.boundary)
        cooler = make_cooler(config, geom, p)
        records = [run_trial(config, L, p, t, geom, cooler) for t in range(config.trials)]
    records.sort(key=lambda r: r.trial)
    return records


def aggregate_series(records: list, mode: str = "instantaneous") -> FailureSeries:
    """Failure fractions per cycle over an ensemble of trials.

    ``instantaneous`` counts trials whose class is not I at each cycle
    (saturates at 3/4, the quantity fitted by the decay model);
    ``first_failure`` counts trials that have failed by each cycle.
    """
    if not records:
        raise ValueError("no records to aggregate")
    cycles = records[0].failed.shape[0]
    mat = np.stack([r.failed if mode == "instantaneous" else r.failed_any
                    for r in records])
    return FailureSeries(np.arange(1, cycles + 1),
                         mat.mean(axis=0),
                         np.full(cycles, len(records), dtype=np.int64))


def bootstrap_gamma(records: list, n_boot: int = 300, level: float = 0.90,
                    seed: int = 0, mode: str = "instantaneous") -> tuple:
    """Percentile bootstrap interval for the fitted decay rate,
    resampling whole trials."""
    mat = np.stack([r.failed if mode == "instantaneous" else r.failed_any
                    for r in records]).astype(np.float64)
    n, cycles = mat.shape
    t = np.arange(1, cycles + 1)
    rng = np.random.Generator(np.random.Philox(key=[seed, 0x626F6F74]))
    gammas = np.empty(n_boot)
    for i in range(n_boot):
        pick = rng.integers(0, n, size=n)
        series = FailureSeries(t, mat[pick].mean(axis=0),
                               np.full(cycles, n, dtype=np.int64))
        gammas[i] = fit_gamma_eff(series).gamma_eff
    lo, hi = np.quantile(gammas, [(1 - level) / 2, (1 + level) / 2])
    return float(lo), float(hi)


def run_sweep(config: ExperimentConfig):
    """Cartesian (L, p) sweep: records, per-cell fits, optional CSV/JSON.

    Failures inside a cell are reported in its summary entry and do not
    abort the rest of the sweep.
    """
    all_records = []
    cells = []
    for L in config.L_list:
        for p in config.p_list:
            entry = {"L": L, "p": p, "trials": config.trials}
            try:
                records = run_cell(config, L, p)
                all_records.extend(records)
                series = aggregate_series(records)
                fit = fit_gamma_eff(series)
                lo, hi = bootstrap_gamma(records, seed=config.base_seed)
                entry.update(gamma_eff=fit.gamma_eff, residual=fit.residual,
                             flag=fit.flag, ci90=[lo, hi])
            except Exception as exc:   # noqa: BLE001 - per-cell fault isolation
                entry["error"] = f"{type(exc).__name__}: {exc}"
            cells.append(entry)
    summary = {"config": _config_dict(config), "cells": cells}
    fits = {(c["L"], c["p"]): c["gamma_eff"] for c in cells if "gamma_eff" in c}
    if len({L for L, _ in fits}) >= 2 and len({p for _, p in fits}) >= 3:
        est = estimate_threshold(fits)
        summary["threshold"] = {"interval": est.interval, "flag": est.flag,
                                "crossings": est.crossings}
    if config.out:
        write_csv(config.out, all_records)
        with open(_summary_path(config.out), "w") as fh:
            json.dump(summary, fh, indent=2)
    return all_records, summary


@dataclass
class ThresholdEstimate:
    interval: tuple | None
    crossings: list
    flag: str    # "ok" | "no_crossing"


def estimate_threshold(fits: dict) -> ThresholdEstimate:
    """Crossing points of the decay-rate curves of adjacent sizes.

    ``fits`` maps (L, p) to a fitted rate.  For each adjacent size pair
    the difference of log rates is interpolated log-linearly in p; the
    interval spanned by all crossings is returned, or a ``no_crossing``
    flag when the curves never cross inside the grid.
    """
    sizes = sorted({L for L, _ in fits})
    ps = sorted({p for _, p in fits})
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    if len(ps) < 3:
        raise ValueError("need at least three error rates")
    crossings = []
    for L1, L2 in zip(sizes, sizes[1:]):
        lp, delta = [], []
        for p in ps:
            g1, g2 = fits.get((L1, p)), fits.get((L2, p))
            if not g1 or not g2 or g1 <= 0 or g2 <= 0:
                continue
            lp.append(math.log(p))
            delta.append(math.log(g2) - math.log(g1))
        for i in range(1, len(delta)):
            if delta[i - 1] == 0:
                crossings.append(math.exp(lp[i - 1]))
            elif delta[i - 1] * delta[i] < 0:
                w = delta[i - 1] / (delta[i - 1] - delta[i])
                crossings.append(math.exp(lp[i - 1] + w * (lp[i] - lp[i - 1])))
    if not crossings:
        return ThresholdEstimate(None, [], "no_crossing")
    return ThresholdEstimate((min(crossings), max(crossings)), crossings, "ok")


def write_csv(path: str, records: list) -> None:
    """Documented bit-exact dump: trial,seed,L,p,cycle,class,failed."""
    records = sorted(records, key=lambda r: (r.L, r.p, r.trial))
    with open(path, "w") as fh:
        fh.write("trial,seed,L,p,cycle,class,failed\n")
        for r in records:
            p_str = repr(r.p)
            for t in range(len(r.classes)):
                fh.write(f"{r.trial},{r.seed},{r.L},{p_str},{t + 1},"
                         f"{r.classes[t].name},{int(r.failed[t])}\n")


def load_series_csv(path: str) -> dict:
    """Group a results CSV back into FailureSeries keyed by (L, p)."""
    counts: dict = {}
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        idx = {name: i for i, name in enumerate(header)}
        for line in fh:
            row = line.strip().split(",")
            key = (int(row[idx["L"]]), float(row[idx["p"]]))
            cyc = int(row[idx["cycle"]])
            fails, trials = counts.setdefault(key, ({}, {}))
            fails[cyc] = fails.get(cyc, 0) + int(row[idx["failed"]])
            trials[cyc] = trials.get(cyc, 0) + 1
    out = {}
    for key, (fails, trials) in counts.items():
        t = np.array(sorted(trials), dtype=np.int64)
        n = np.array([trials[i] for i in t], dtype=np.int64)
        f = np.array([fails[i] for i in t], dtype=np.float64) / n
        out[key] = FailureSeries(t, f, n)
    return out


def _summary_path(out: str) -> str:
    stem = out[:-4] if out.endswith(".csv") else out
    return stem + ".summary.json"


def _config_dict(config: ExperimentConfig) -> dict:
    d = dict(config.__dict__)
    d.pop("schedule", None)
    return d
