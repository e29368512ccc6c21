"""Metropolis cooling of the classical feedback spin layer.

The ancilla spins ``u_i = +-1`` live on edges and feel the syndrome-
dependent random-plaquette-gauge-model energy

    E(u) = -J * sum_v sign_v * prod_{i in E_v} u_i  -  h * sum_i u_i,

where ``sign_v`` is the copied stabilizer eigenvalue of plaquette ``v``
(vertex stars for the Z sector, faces for the X sector).  Satisfied
plaquette terms pin error chains' endpoints to the defects; the field
term keeps chains short.  Cooling to a low temperature leaves the down
spins marking the inferred error locations.

Couplings can be fixed, scaled as 4J/(2h) = alpha * ln(L) (natural
log), or pushed to the strong-coupling regime 4J/(2h) = L.  The
default annealing schedule is a geometric ladder of 8 stages from
beta*h = 0.1 down to the target temperature with the sweep budget
split evenly; a schedule may also be given explicitly, so both one
annealing trajectory and independent per-temperature equilibrations
are expressible.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .lattice import LatticeGeometry
from .pauli_frame import SyndromeField


class CouplingMode(enum.Enum):
    FIXED_J = "fixed"
    LOG_SCALED_J = "log"
    LARGE_J = "large"


@dataclass
class CoolingParams:
    """Couplings, target temperature and annealing schedule.

    ``schedule`` is a list of (beta, sweep count) stages; when omitted
    it is derived from ``beta_target``, ``sweeps_total``,
    ``anneal_stages`` and ``anneal_start_beta_h``.
    """

    h: float = 1.0
    J: float = 1.0
    alpha: float = 1.0
    beta_target: float | None = None
    schedule: list | None = None
    sweeps_total: int = 2000
    mode: CouplingMode = CouplingMode.LOG_SCALED_J
    anneal_stages: int = 8
    anneal_start_beta_h: float = 0.1

    def __post_init__(self):
        if self.J <= 0 or self.h <= 0:
            raise ValueError("couplings J and h must be positive")
        if isinstance(self.mode, str):
            self.mode = CouplingMode(self.mode)

    def coupling(self, L: int) -> float:
        """Concrete plaquette coupling for lattice size L."""
        if self.mode is CouplingMode.FIXED_J:
            return self.J
        if self.mode is CouplingMode.LOG_SCALED_J:
            return self.alpha * self.h * math.log(L) / 2.0   # 4J/(2h) = alpha ln L
        return self.h * L / 2.0                              # 4J/(2h) = L

    def r_cor(self, L: int) -> float:
        """Maximum chain length the coupling sustains: 4J/(2h)."""
        return 2.0 * self.coupling(L) / self.h

    def resolved_schedule(self) -> tuple[np.ndarray, np.ndarray]:
        """(betas, sweeps per stage), validated nondecreasing."""
        if self.schedule is not None:
            stages = list(self.schedule)
        else:
            if self.beta_target is None:
                raise ValueError("need beta_target or an explicit schedule")
            beta0 = self.anneal_start_beta_h / self.h
            k = self.anneal_stages
            if self.beta_target <= beta0 or k == 1:
                betas = [self.beta_target]
            else:
                ratio = (self.beta_target / beta0) ** (1.0 / (k - 1))
                betas = [beta0 * ratio**i for i in range(k)]
                betas[-1] = self.beta_target
            per = self.sweeps_total // len(betas)
            sweeps = [per] * len(betas)
            sweeps[-1] += self.sweeps_total - per * len(betas)
            stages = list(zip(betas, sweeps))
        if not stages:
            raise ValueError("empty annealing schedule")
        betas = np.array([b for b, _ in stages], dtype=np.float64)
        sweeps = np.array([s for _, s in stages], dtype=np.int64)
        if (betas < 0).any() or (np.diff(betas) < 0).any():
            raise ValueError("schedule betas must be nonnegative and nondecreasing")
        if (sweeps < 0).any():
            raise ValueError("negative sweep count in schedule")
        return betas, sweeps


@dataclass
class SectorTables:
    """Kernel-ready incidence arrays for one plaquette sector.

    ``edge_plaq`` is padded with the dummy plaquette index ``n_plaq``
    whose satisfaction slot stays 0, so toric and planar lattices run
    through identical kernels.
    """

    n_plaq: int
    plaq_edges: np.ndarray   # (P, 4) int64, -1 padded
    plaq_deg: np.ndarray     # (P,) int64
    edge_plaq: np.ndarray    # (E, 2) int64, dummy padded

    def initial_sat(self, signs: np.ndarray) -> np.ndarray:
        """Satisfaction array for the all-up configuration (+ dummy 0)."""
        sat = np.zeros(self.n_plaq + 1, dtype=np.int8)
        sat[:self.n_plaq] = signs
        return sat

    def sat_of(self, u: np.ndarray, signs: np.ndarray) -> np.ndarray:
        sat = np.zeros(self.n_plaq + 1, dtype=np.int8)
        for v in range(self.n_plaq):
            prod = 1
            for e in self.plaq_edges[v, :self.plaq_deg[v]]:
                prod *= int(u[e])
            sat[v] = signs[v] * prod
        return sat


def sector_tables(geom: LatticeGeometry, sector: str = "vertex") -> SectorTables:
    if sector == "vertex":
        plaq_edges, plaq_deg, edge_plaq = geom.vertex_edges, geom.vertex_degree, geom.edge_vertices
    elif sector == "face":
        plaq_edges, plaq_deg, edge_plaq = geom.face_edges, geom.face_degree, geom.edge_faces
    else:
        raise ValueError(f"sector must be 'vertex' or 'face', got {sector!r}")
    n = plaq_deg.shape[0]
    padded = edge_plaq.copy()
    padded[padded < 0] = n
    return SectorTables(n, np.ascontiguousarray(plaq_edges),
                        np.ascontiguousarray(plaq_deg),
                        np.ascontiguousarray(padded))


def sector_signs(syn: SyndromeField, sector: str) -> np.ndarray:
    return syn.b if sector == "vertex" else syn.a


def energy(u: np.ndarray, syn: SyndromeField, J: float, h: float,
           geom: LatticeGeometry, sector: str = "vertex") -> float:
    """Full spin-system energy for the given syndrome sector."""
    u = np.asarray(u)
    if u.shape != (geom.edge_count,):
        raise ValueError("spin configuration does not match geometry")
    signs = sector_signs(syn, sector)
    tables = sector_tables(geom, sector)
    if signs.shape != (tables.n_plaq,):
        raise ValueError("syndrome does not match geometry")
    total = -h * float(u.sum())
    for v in range(tables.n_plaq):
        prod = 1
        for e in tables.plaq_edges[v, :tables.plaq_deg[v]]:
            prod *= int(u[e])
        total -= J * int(signs[v]) * prod
    return total


def local_field_delta(u: np.ndarray, syn: SyndromeField, edge: int, J: float,
                      h: float, geom: LatticeGeometry, sector: str = "vertex") -> float:
    """Energy change of flipping one edge spin.

    Equals 2*u_e*(J * sum over adjacent plaquettes of sign_v * product
    of the other members + h); checked in tests against a from-scratch
    energy difference.
    """
    if not 0 <= edge < geom.edge_count:
        raise IndexError(f"edge index {edge} out of range")
    signs = sector_signs(syn, sector)
    tables = sector_tables(geom, sector)
    acc = 0.0
    for v in tables.edge_plaq[edge]:
        if v >= tables.n_plaq:
            continue
        prod = 1
        for e in tables.plaq_edges[v, :tables.plaq_deg[v]]:
            if e != edge:
                prod *= int(u[e])
        acc += float(signs[v]) * prod
    return 2.0 * float(u[edge]) * (J * acc + h)


def metropolis_sweep(u: np.ndarray, syn: SyndromeField, beta: float,
                     params: CoolingParams, geom: LatticeGeometry, rng,
                     sector: str = "vertex") -> np.ndarray:
    """One raster-order pass over all edges; returns the new configuration.

    Each site proposes a flip with probability 1/2 (symmetric proposal,
    keeping the chain ergodic down to beta = 0) and accepts it with
    min(1, exp(-beta dE)).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    tables = sector_tables(geom, sector)
    signs = sector_signs(syn, sector)
    u2 = np.asarray(u, dtype=np.int8).copy()
    sat = tables.sat_of(u2, signs)
    J = params.coupling(geom.L)
    _kernels.metropolis_kernel(u2, sat, tables.edge_plaq, J, params.h,
                               np.array([beta]), np.array([1], dtype=np.int64),
                               _kernels.coerce_seed(rng))
    return u2


def anneal(syn: SyndromeField, params: CoolingParams, geom: LatticeGeometry,
           rng, sector: str = "vertex") -> np.ndarray:
    """Cool from the all-up state through the schedule; returns final spins."""
    betas, sweeps = params.resolved_schedule()
    tables = sector_tables(geom, sector)
    signs = sector_signs(syn, sector)
    return cool_with_tables(signs, tables, params.coupling(geom.L), params.h,
                            betas, sweeps, _kernels.coerce_seed(rng))


def cool_with_tables(signs: np.ndarray, tables: SectorTables, J: float, h: float,
                     betas: np.ndarray, sweeps: np.ndarray, seed: np.uint64) -> np.ndarray:
    """Kernel entry point used by the trial harness (tables prebuilt)."""
    E = tables.edge_plaq.shape[0]
    u = np.ones(E, dtype=np.int8)
    sat = tables.initial_sat(signs)
    _kernels.metropolis_kernel(u, sat, tables.edge_plaq, J, h, betas, sweeps, seed)
    return u


def nishimori_beta(p: float, h: float) -> float:
    """Inverse temperature balancing thermal fluctuation against the
    physical error rate: exp(-2*beta*h) = p/(1-p)."""
    if not 0.0 < p < 0.5:
        raise ValueError(f"error probability must lie in (0, 1/2), got {p}")
    return -math.log(p / (1.0 - p)) / (2.0 * h)


def correction_from_spins(u: np.ndarray) -> np.ndarray:
    """Feedback bit-field: bit set exactly where the spin points down."""
    return (np.asarray(u) < 0).astype(np.uint8)


def enumerate_energies(signs: np.ndarray, tables: SectorTables, J: float, h: float) -> np.ndarray:
    """Energies of all 2^E spin states (bit e set means u_e = -1)."""
    E = tables.edge_plaq.shape[0]
    if E > 18:
        raise ValueError(f"state space 2^{E} too large to enumerate")
    n = 1 << E
    states = np.arange(n, dtype=np.uint32)
    byte_pop = np.array([bin(i).count("1") for i in range(256)], dtype=np.int64)

    def popcount(x):
        return byte_pop[x.view(np.uint8).reshape(n, 4)].sum(axis=1)

    downs = popcount(states)
    energies = -h * (E - 2 * downs).astype(np.float64)
    for v in range(tables.n_plaq):
        mask = np.uint32(0)
        for e in tables.plaq_edges[v, :tables.plaq_deg[v]]:
            mask |= np.uint32(1 << int(e))
        parity = popcount(states & mask) & 1
        energies -= J * float(signs[v]) * (1 - 2 * parity)
    return energies


def exact_gibbs(geom: LatticeGeometry, syn: SyndromeField, beta: float,
                J: float, h: float, sector: str = "vertex") -> np.ndarray:
    """Exact Boltzmann distribution over all spin states (small lattices).

    The state index packs the down-spin indicator little-first, matching
    the sampling kernels.
    """
    tables = sector_tables(geom, sector)
    energies = enumerate_energies(sector_signs(syn, sector), tables, J, h)
    w = np.exp(-beta * (energies - energies.min()))
    return w / w.sum()
