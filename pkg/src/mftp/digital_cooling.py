"""Digitalized cooling: Trotterized alternation of dissipative channels.

The cooling of the feedback spins is split into short steps of duration
``tau``.  Each step applies the plaquette-pumping channel (an excited
plaquette term flips one uniformly random member spin, realized
physically by stabilizer pumping: CNOT conjugation turns the many-body
jump operator into a single-spin decay) followed by the field channel
(independent single-spin decay/excitation).  Everything is simulated as
a classical stochastic process on bits, which is exact here: every
operator involved is a composition of X flips and Z-diagonal
projectors, so no superpositions ever arise from the all-up initial
state.

Two rate modes are provided.  ``PAPER_RATIO`` uses fixed per-channel
rates with decay/excitation ratio exp(-2*beta*gap)/(1 + exp(-2*beta*gap)).
That ratio does not satisfy detailed balance for the energy an edge
flip actually changes (one flip toggles two plaquette terms plus the
field), so ``DETAILED_BALANCE`` instead applies a Glauber factor on the
true energy change of each proposed flip; with it the Gibbs state of
the full spin energy is exactly stationary, and it is the mode used
wherever agreement with the Metropolis cooler is asserted.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .lattice import LatticeGeometry
from .pauli_frame import SyndromeField
from .rpgm_cooler import SectorTables, sector_signs, sector_tables


class RateMode(enum.Enum):
    PAPER_RATIO = "paper"
    DETAILED_BALANCE = "detailed-balance"


def rate_pair(beta: float, gap: float, mode: RateMode) -> tuple[float, float]:
    """(decay rate, excitation rate) for a two-level splitting 2*gap.

    PAPER_RATIO: gamma_-/gamma_+ = e^(-2 beta gap) / (1 + e^(-2 beta gap)),
    normalized so the larger rate is 1.  DETAILED_BALANCE: the Glauber
    pair with gamma_+/gamma_- = e^(-2 beta gap).
    """
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if gap <= 0:
        raise ValueError("energy gap must be positive")
    if isinstance(mode, str):
        mode = RateMode(mode)
    x = math.exp(-2.0 * beta * gap)
    if mode is RateMode.PAPER_RATIO:
        return x / (1.0 + x), 1.0
    return 1.0 / (1.0 + x), x / (1.0 + x)


def glauber_rate(beta: float, delta_e: float) -> float:
    """Flip rate 1/(1 + e^(beta dE)); satisfies rate(dE)/rate(-dE) = e^(-beta dE)."""
    return 1.0 / (1.0 + math.exp(beta * delta_e))


@dataclass
class DigitalCoolingParams:
    """Step duration, step count, channel rates and rate mode.

    ``beta``, ``J`` and ``h`` define the spin energy; the channel rates
    are derived from them via :func:`rate_pair` unless given explicitly.
    """

    tau: float = 0.25
    m: int = 2000
    beta: float = 1.0
    J: float = 1.0
    h: float = 1.0
    rate_mode: RateMode = RateMode.DETAILED_BALANCE
    gamma_minus: float | None = None
    gamma_plus: float | None = None
    gammap_minus: float | None = None
    gammap_plus: float | None = None

    def __post_init__(self):
        if isinstance(self.rate_mode, str):
            self.rate_mode = RateMode(self.rate_mode)
        if self.gamma_minus is None or self.gamma_plus is None:
            self.gamma_minus, self.gamma_plus = rate_pair(self.beta, self.J, self.rate_mode)
        if self.gammap_minus is None or self.gammap_plus is None:
            self.gammap_minus, self.gammap_plus = rate_pair(self.beta, self.h, self.rate_mode)
        if self.tau < 0 or self.m < 0:
            raise ValueError("tau and m must be nonnegative")
        for g in (self.gamma_minus, self.gamma_plus, self.gammap_minus, self.gammap_plus):
            if g < 0:
                raise ValueError("rates must be nonnegative")
            if 2.0 * g * self.tau > 1.0 + 1e-12:
                raise ValueError("per-step flip probability 2*rate*tau exceeds 1")
        if 2.0 * self.tau > 1.0 + 1e-12 and self.rate_mode is RateMode.DETAILED_BALANCE:
            raise ValueError("detailed-balance mode needs tau <= 1/2")

    @property
    def t_cool(self) -> float:
        return self.m * self.tau


@dataclass
class AncillaState:
    """Feedback spins ``u`` (edges) plus syndrome copies ``s`` (plaquettes)."""

    u: np.ndarray   # int8 (E,), +-1
    s: np.ndarray   # int8 (P,), +-1

    def clone(self) -> "AncillaState":
        return AncillaState(self.u.copy(), self.s.copy())


def initial_state(signs: np.ndarray, tables: SectorTables) -> AncillaState:
    """All spins up, syndrome copied onto the s layer."""
    u = np.ones(tables.edge_plaq.shape[0], dtype=np.int8)
    return AncillaState(u, np.asarray(signs, dtype=np.int8).copy())


def _run(state: AncillaState, params: DigitalCoolingParams, tables: SectorTables,
         rng, m: int, channels: int) -> AncillaState:
    out = state.clone()
    sat = tables.sat_of(out.u, out.s)
    mode = (_kernels.RATE_MODE_PAPER if params.rate_mode is RateMode.PAPER_RATIO
            else _kernels.RATE_MODE_DETAILED_BALANCE)
    _kernels.digital_kernel(out.u, sat, tables.plaq_edges, tables.plaq_deg,
                            tables.edge_plaq, params.tau,
                            params.gamma_minus, params.gamma_plus,
                            params.gammap_minus, params.gammap_plus,
                            params.beta, params.J, params.h,
                            mode, m, channels, _kernels.coerce_seed(rng))
    return out


def plaquette_pump_step(state: AncillaState, params: DigitalCoolingParams,
                        geom: LatticeGeometry, rng, sector: str = "vertex") -> AncillaState:
    """One pass of the plaquette channel over all plaquettes in raster order."""
    return _run(state, params, sector_tables(geom, sector), rng, 1, channels=1)


def field_pump_step(state: AncillaState, params: DigitalCoolingParams,
                    geom: LatticeGeometry, rng, sector: str = "vertex") -> AncillaState:
    """One pass of the single-spin field channel over all edges."""
    return _run(state, params, sector_tables(geom, sector), rng, 1, channels=2)


def trotter_cool(syn: SyndromeField, params: DigitalCoolingParams,
                 geom: LatticeGeometry, rng, sector: str = "vertex") -> np.ndarray:
    """Full digital cooling: copy the syndrome, alternate the two
    channels m times, return the final edge spins."""
    tables = sector_tables(geom, sector)
    signs = sector_signs(syn, sector)
    state = initial_state(signs, tables)
    state = _run(state, params, tables, rng, params.m, channels=3)
    return state.u


def cool_with_tables(signs: np.ndarray, tables: SectorTables,
                     params: DigitalCoolingParams, seed: np.uint64) -> np.ndarray:
    """Harness entry point with prebuilt tables (same contract as the
    Metropolis cooler's)."""
    state = initial_state(signs, tables)
    state = _run(state, params, tables, seed, params.m, channels=3)
    return state.u


def plaquette_parities(state: AncillaState, tables: SectorTables) -> np.ndarray:
    """Current parity s_v * prod(u over the plaquette) for every plaquette."""
    return tables.sat_of(state.u, state.s)[:tables.n_plaq]


# ---------------------------------------------------------------------------
# Stabilizer-pumping operator identities on one plaquette (4 edge spins +
# 1 vertex spin, a 32-dimensional space), verified with exact matrices.

def _op_on(op2: np.ndarray, k: int, n: int = 5) -> np.ndarray:
    out = np.eye(1)
    for i in range(n):
        out = np.kron(out, op2 if i == k else np.eye(2))
    return out


def _cnot(control: int, target: int, n: int = 5) -> np.ndarray:
    dim = 1 << n
    m = np.zeros((dim, dim))
    for b in range(dim):
        # qubit k is bit (n-1-k) of the basis index (kron order)
        if (b >> (n - 1 - control)) & 1:
            m[b ^ (1 << (n - 1 - target)), b] = 1.0
        else:
            m[b, b] = 1.0
    return m


def verify_pumping_identity(drop_cnot: int | None = None, verbose: bool = False) -> bool:
    """Check the stabilizer-pumping identities exactly on the 32-state
    plaquette space.

    Verifies (i) that conjugating the vertex-flip jump operator
    X_v (I - Z_v prod Z_i)/2 by the CNOT ladder U = prod_i CNOT(i -> v)
    yields the bare single-spin lowering operator on the vertex, and
    (ii) that routing the vertex flip through the random-CNOT parity
    channel reproduces the random-member-edge flip in distribution, for
    every basis state.  ``drop_cnot`` removes one CNOT from U (negative
    control: the identity must then fail).  Returns False with the
    first counterexample (printed when ``verbose``) instead of raising.
    """
    n = 5
    vertex = 4
    dim = 1 << n
    X = np.array([[0.0, 1.0], [1.0, 0.0]])
    Z = np.array([[1.0, 0.0], [0.0, -1.0]])

    zprod = np.eye(dim)
    for k in range(n):
        zprod = zprod @ _op_on(Z, k)
    proj_odd = (np.eye(dim) - zprod) / 2.0     # parity projector of Z_v prod Z_i
    xi = _op_on(X, vertex) @ proj_odd          # flips the syndrome copy if excited

    U = np.eye(dim)
    for k in range(4):
        if k == drop_cnot:
            continue
        U = U @ _cnot(k, vertex)

    sigma_minus = _op_on(X, vertex) @ (np.eye(dim) - _op_on(Z, vertex)) / 2.0
    if not np.array_equal(U @ xi @ U, sigma_minus):
        if verbose:
            diff = np.argwhere(U @ xi @ U != sigma_minus)
            print(f"conjugation identity fails first at matrix entry {tuple(diff[0])}")
        return False

    # Parity-flip channel: after the vertex flip is exposed by comparing
    # against the stored syndrome copy, a CNOT onto one of the four
    # uniformly chosen edges must act, in distribution over the edge
    # register, exactly like the direct random-member-edge jump.
    for b in range(dim):
        excited = bin(b).count("1") % 2 == 1
        direct = {}
        routed = {}
        if excited:
            for k in range(4):
                flipped = b ^ (1 << (n - 1 - k))
                direct[flipped & ~(1 << (n - 1 - vertex))] = direct.get(
                    flipped & ~(1 << (n - 1 - vertex)), 0.0) + 0.25
            b_xi = b ^ (1 << (n - 1 - vertex))
            indicator = (b_xi ^ b) >> (n - 1 - vertex) & 1
            for k in range(4):
                flipped = b_xi ^ (indicator << (n - 1 - k))
                routed[flipped & ~(1 << (n - 1 - vertex))] = routed.get(
                    flipped & ~(1 << (n - 1 - vertex)), 0.0) + 0.25
                if indicator and bin(flipped ^ b_xi).count("1") != 1:
                    if verbose:
                        print(f"parity channel flipped more than one edge bit on state {b}")
                    return False
        if direct != routed:
            if verbose:
                print(f"channel distributions differ on basis state {b}")
            return False
    return True
