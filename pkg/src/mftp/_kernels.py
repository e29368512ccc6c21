"""JIT inner loops for the spin coolers.

Single-flip dynamics is inherently sequential (raster order is part of
the contract), so the hot loops are compiled with numba.  All kernel
randomness comes from an explicit splitmix64 counter passed in and
returned, which makes every trajectory reproducible from a 64-bit seed
and lets a run be split and resumed at any step.

Plaquette incidence arrays are padded so the same kernels serve the
torus and the planar patch: ``edge_plaq`` entries for missing
neighbours point at a dummy slot whose satisfaction value is pinned to
0 (contributes nothing and stays 0 when toggled).
"""

from __future__ import annotations

import numpy as np
from numba import njit

U64 = np.uint64
GOLDEN = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV_2_53 = 1.0 / 9007199254740992.0
MASK64 = 0xFFFFFFFFFFFFFFFF


def mix64(x: int) -> int:
    """Pure-python splitmix64 finalizer (seed derivation)."""
    x &= MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return (x ^ (x >> 31)) & MASK64


@njit(cache=True, inline="always")
def _rand_u64(state):
    state += GOLDEN
    z = state
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return state, z


@njit(cache=True, inline="always")
def _uniform(state):
    state, z = _rand_u64(state)
    return state, (z >> U64(11)) * _INV_2_53


@njit(cache=True, inline="always")
def _metropolis_site(u, sat, edge_plaq, J, h, beta, e, state):
    """One site update: propose a flip with probability 1/2 (symmetric
    random proposal, so the chain stays ergodic even at beta = 0), then
    accept with min(1, exp(-beta dE)).
    Returns (state, proposed, accepted, dE)."""
    state, r = _uniform(state)
    if r >= 0.5:
        return state, 0, 0, 0.0
    dE = 2.0 * J * (sat[edge_plaq[e, 0]] + sat[edge_plaq[e, 1]]) + 2.0 * h * u[e]
    if dE > 0.0:
        state, r = _uniform(state)
        if r >= np.exp(-beta * dE):
            return state, 1, 0, 0.0
    u[e] = -u[e]
    sat[edge_plaq[e, 0]] = -sat[edge_plaq[e, 0]]
    sat[edge_plaq[e, 1]] = -sat[edge_plaq[e, 1]]
    return state, 1, 1, dE


@njit(cache=True)
def metropolis_kernel(u, sat, edge_plaq, J, h, betas, stage_sweeps, state):
    """Raster-order single-flip Metropolis through a beta schedule.

    ``u`` (+-1 per edge) and ``sat`` (+-1 plaquette satisfaction,
    sat[v] = sign_v * prod of u over the plaquette; dummy slot last)
    are updated in place.  Returns (rng state, proposed flips,
    accepted flips, accumulated energy change).
    """
    E = u.shape[0]
    proposed = 0
    accepted = 0
    delta_e = 0.0
    for stage in range(betas.shape[0]):
        beta = betas[stage]
        for _ in range(stage_sweeps[stage]):
            for e in range(E):
                state, prop, acc, dE = _metropolis_site(u, sat, edge_plaq, J, h, beta, e, state)
                proposed += prop
                accepted += acc
                delta_e += dE
    return state, proposed, accepted, delta_e


@njit(cache=True)
def gibbs_sample_kernel(u, sat, edge_plaq, J, h, beta, burn_in, n_samples, thin, state, counts):
    """Sample spin-state indices at fixed beta into ``counts``.

    State index packs the down-spin indicator little-first (bit e set
    when u[e] == -1); only usable for small edge counts.
    """
    E = u.shape[0]
    for _ in range(burn_in):
        for e in range(E):
            state, _, _, _ = _metropolis_site(u, sat, edge_plaq, J, h, beta, e, state)
    for _ in range(n_samples):
        for _ in range(thin):
            for e in range(E):
                state, _, _, _ = _metropolis_site(u, sat, edge_plaq, J, h, beta, e, state)
        idx = 0
        for e in range(E):
            if u[e] < 0:
                idx |= 1 << e
        counts[idx] += 1
    return state


RATE_MODE_PAPER = 0
RATE_MODE_DETAILED_BALANCE = 1


@njit(cache=True)
def digital_kernel(u, sat, plaq_edges, plaq_deg, edge_plaq, tau,
                   gm, gp, gpm, gpp, beta, J, h, mode, m, channels, state):
    """m digitalized cooling steps: plaquette channel then field channel.

    Paper-ratio mode: an excited plaquette flips one uniformly random
    member edge with probability 2*gm*tau, a satisfied one with
    2*gp*tau; each edge then decays up with 2*gpm*tau or is excited
    down with 2*gpp*tau.  Detailed-balance mode replaces the fixed
    rates with a Glauber factor on the true energy change of the
    proposed flip, which makes the Gibbs state exactly stationary.
    ``channels`` selects the plaquette pass (bit 0), the field pass
    (bit 1), or both.
    """
    P = plaq_deg.shape[0]
    E = u.shape[0]
    for _ in range(m):
        # plaquette channel
        for v in range(P if channels & 1 else 0):
            deg = plaq_deg[v]
            if deg == 0:
                continue
            if mode == RATE_MODE_PAPER:
                prob = 2.0 * gm * tau if sat[v] < 0 else 2.0 * gp * tau
                state, r = _uniform(state)
                if r < prob:
                    state, rk = _uniform(state)
                    k = int(rk * deg)
                    if k >= deg:
                        k = deg - 1
                    e = plaq_edges[v, k]
                    u[e] = -u[e]
                    sat[edge_plaq[e, 0]] = -sat[edge_plaq[e, 0]]
                    sat[edge_plaq[e, 1]] = -sat[edge_plaq[e, 1]]
            else:
                state, rk = _uniform(state)
                k = int(rk * deg)
                if k >= deg:
                    k = deg - 1
                e = plaq_edges[v, k]
                dE = 2.0 * J * (sat[edge_plaq[e, 0]] + sat[edge_plaq[e, 1]]) + 2.0 * h * u[e]
                prob = 2.0 * tau / (1.0 + np.exp(beta * dE))
                state, r = _uniform(state)
                if r < prob:
                    u[e] = -u[e]
                    sat[edge_plaq[e, 0]] = -sat[edge_plaq[e, 0]]
                    sat[edge_plaq[e, 1]] = -sat[edge_plaq[e, 1]]
        # field channel
        for e in range(E if channels & 2 else 0):
            if mode == RATE_MODE_PAPER:
                prob = 2.0 * gpm * tau if u[e] < 0 else 2.0 * gpp * tau
            else:
                dE = 2.0 * J * (sat[edge_plaq[e, 0]] + sat[edge_plaq[e, 1]]) + 2.0 * h * u[e]
                prob = 2.0 * tau / (1.0 + np.exp(beta * dE))
            state, r = _uniform(state)
            if r < prob:
                u[e] = -u[e]
                sat[edge_plaq[e, 0]] = -sat[edge_plaq[e, 0]]
                sat[edge_plaq[e, 1]] = -sat[edge_plaq[e, 1]]
    return state


def as_state(x) -> np.uint64:
    """Wrap a kernel-returned stream position for threading back in."""
    return np.uint64(int(x) & MASK64)


def coerce_seed(rng) -> np.uint64:
    """Turn an int seed, numpy Generator, or uint64 into a kernel seed.

    Ints are passed through the splitmix64 finalizer so that nearby
    seeds give unrelated streams; Generators are consumed for one
    uint64 draw.
    """
    if isinstance(rng, np.uint64):
        return rng                       # already a stream position
    if isinstance(rng, (int, np.integer)):
        return U64(mix64(int(rng)))
    if isinstance(rng, np.random.Generator):
        return U64(int(rng.integers(0, 2**64, dtype=np.uint64)))
    raise TypeError(f"cannot derive a kernel seed from {type(rng)!r}")
