import numpy as np
import pytest

import mftp._kernels as kernels
from chain_oracle import stationary_distribution, trotter_step_matrix
from mftp.digital_cooling import (DigitalCoolingParams, RateMode,
                                  field_pump_step, initial_state,
                                  plaquette_pump_step, plaquette_parities,
                                  rate_pair, trotter_cool,
                                  verify_pumping_identity)
from mftp.lattice import build_lattice
from mftp.pauli_frame import PauliFrame, compute_syndrome
from mftp.rpgm_cooler import (CoolingParams, anneal, enumerate_energies,
                              exact_gibbs, sector_tables)


@pytest.fixture(scope="module")
def g2():
    return build_lattice(2, "toric")


@pytest.fixture(scope="module")
def g4():
    return build_lattice(4, "toric")


def syndrome_with_z(geom, edges):
    f = PauliFrame(geom.edge_count)
    f.z_errors[list(edges)] = 1
    return compute_syndrome(f, geom)


def test_rate_pair_paper_beta_zero():
    gm, gp = rate_pair(0.0, 1.0, RateMode.PAPER_RATIO)
    assert gm / gp == pytest.approx(0.5)


def test_rate_pair_paper_matches_printed_ratio():
    for beta in (0.3, 1.0, 2.0):
        for gap in (0.5, 1.0, 2.0):
            gm, gp = rate_pair(beta, gap, RateMode.PAPER_RATIO)
            x = np.exp(-2 * beta * gap)
            assert gm / gp == pytest.approx(x / (1 + x), rel=1e-14)


def test_rate_pair_detailed_balance_limits():
    gm, gp = rate_pair(50.0, 1.0, RateMode.DETAILED_BALANCE)
    assert gp == pytest.approx(0.0, abs=1e-40)
    for beta in (0.2, 1.5):
        gm, gp = rate_pair(beta, 1.0, RateMode.DETAILED_BALANCE)
        assert gp / gm == pytest.approx(np.exp(-2 * beta), rel=1e-14)


def test_rate_pair_rejects_bad_inputs():
    with pytest.raises(ValueError):
        rate_pair(-1.0, 1.0, RateMode.PAPER_RATIO)
    with pytest.raises(ValueError):
        rate_pair(1.0, 0.0, RateMode.PAPER_RATIO)


def test_params_validation():
    with pytest.raises(ValueError):
        DigitalCoolingParams(tau=0.8, gamma_minus=1.0, gamma_plus=1.0,
                             gammap_minus=1.0, gammap_plus=1.0)
    with pytest.raises(ValueError):
        DigitalCoolingParams(tau=-0.1)
    p = DigitalCoolingParams(tau=0.25, m=100, beta=1.0)
    assert p.t_cool == pytest.approx(25.0)


def test_initial_state_copies_syndrome(g4):
    syn = syndrome_with_z(g4, [0])
    state = initial_state(syn.b, sector_tables(g4, "vertex"))
    assert (state.u == 1).all()
    assert np.array_equal(state.s, syn.b)


def test_pump_steps_tau_zero_identity(g4):
    syn = syndrome_with_z(g4, [3])
    params = DigitalCoolingParams(tau=0.0, m=1, beta=1.0)
    state = initial_state(syn.b, sector_tables(g4, "vertex"))
    state.u[5] = -1
    for step in (plaquette_pump_step, field_pump_step):
        out = step(state, params, g4, 0)
        assert np.array_equal(out.u, state.u)


def test_plaquette_channel_monotone_when_no_excitation(g4):
    # gamma_+ = 0: a flip toggles two plaquettes, so the excited count
    # never increases (it moves or annihilates in pairs)
    tables = sector_tables(g4, "vertex")
    signs = np.ones(g4.vertex_count, dtype=np.int8)
    signs[5] = -1                      # one excited plaquette marker
    params = DigitalCoolingParams(tau=0.25, m=1, beta=1.0,
                                  gamma_minus=1.0, gamma_plus=0.0,
                                  gammap_minus=0.0, gammap_plus=0.0,
                                  rate_mode=RateMode.PAPER_RATIO)
    state = initial_state(signs, tables)
    excited = (plaquette_parities(state, tables) < 0).sum()
    rng_seed = 0
    for step in range(300):
        state = plaquette_pump_step(state, params, g4, rng_seed + step)
        now = (plaquette_parities(state, tables) < 0).sum()
        assert now <= excited
        excited = now


def test_plaquette_channel_symmetric_rates_stay_uniform(g4):
    # gamma_- = gamma_+: flip probability is parity-blind, so a uniform
    # random state stays uniform; the mean excited fraction sits at 1/2
    tables = sector_tables(g4, "vertex")
    signs = np.ones(g4.vertex_count, dtype=np.int8)
    rng = np.random.default_rng(1)
    state = initial_state(signs, tables)
    state.u[:] = np.where(rng.random(g4.edge_count) < 0.5, -1, 1).astype(np.int8)
    sat = tables.sat_of(state.u, state.s)
    rs = kernels.coerce_seed(17)
    fractions = []
    for k in range(100_000):
        rs = kernels.as_state(kernels.digital_kernel(
            state.u, sat, tables.plaq_edges, tables.plaq_deg, tables.edge_plaq,
            0.25, 0.5, 0.5, 0.0, 0.0, 0.0, 1.0, 1.0,
            kernels.RATE_MODE_PAPER, 1, 1, rs))
        if k % 20 == 0:
            fractions.append((sat[:tables.n_plaq] < 0).mean())
    assert abs(np.mean(fractions) - 0.5) < 0.02


def test_field_channel_absorbing_all_up(g4):
    tables = sector_tables(g4, "vertex")
    signs = np.ones(g4.vertex_count, dtype=np.int8)
    params = DigitalCoolingParams(tau=0.25, m=1, beta=1.0,
                                  gamma_minus=0.0, gamma_plus=0.0,
                                  gammap_minus=1.0, gammap_plus=0.0,
                                  rate_mode=RateMode.PAPER_RATIO)
    rng = np.random.default_rng(2)
    state = initial_state(signs, tables)
    state.u[:] = np.where(rng.random(g4.edge_count) < 0.5, -1, 1).astype(np.int8)
    for k in range(200):
        state = field_pump_step(state, params, g4, k)
    assert (state.u == 1).all()


def test_field_channel_stationary_fraction(g4):
    # two-state chain: stationary down fraction gammap_+/(gammap_+ + gammap_-)
    tables = sector_tables(g4, "vertex")
    signs = np.ones(g4.vertex_count, dtype=np.int8)
    gm, gp = 1.0, 0.3
    state = initial_state(signs, tables)
    sat = tables.sat_of(state.u, state.s)
    rs = kernels.coerce_seed(5)
    downs = []
    for k in range(4000):
        rs = kernels.as_state(kernels.digital_kernel(
            state.u, sat, tables.plaq_edges, tables.plaq_deg, tables.edge_plaq,
            0.25, 0.0, 0.0, gm, gp, 0.0, 1.0, 1.0,
            kernels.RATE_MODE_PAPER, 1, 2, rs))
        if k >= 1000:
            downs.append((state.u < 0).mean())
    expect = gp / (gp + gm)
    assert np.mean(downs) == pytest.approx(expect, abs=0.01)


def test_trotter_m_zero_returns_all_up(g4):
    syn = syndrome_with_z(g4, [0, 5])
    params = DigitalCoolingParams(tau=0.25, m=0, beta=1.0)
    assert (trotter_cool(syn, params, g4, 0) == 1).all()


def test_trotter_connects_adjacent_defects(g4):
    syn = syndrome_with_z(g4, [1])
    params = DigitalCoolingParams(tau=0.25, m=3000, beta=3.0, J=1.5, h=1.0)
    hits = 0
    for seed in range(60):
        u = trotter_cool(syn, params, g4, seed)
        hits += (u < 0).sum() == 1 and u[1] < 0
    assert hits / 60 >= 0.85


def test_trotter_matches_metropolis_density(g4):
    # trivial syndrome, detailed balance: down-spin density within 3 sigma
    syn = compute_syndrome(PauliFrame(g4.edge_count), g4)
    beta = 1.2
    dparams = DigitalCoolingParams(tau=0.25, m=2500, beta=beta, J=1.0, h=1.0)
    mparams = CoolingParams(h=1.0, J=1.0, mode="fixed", beta_target=beta,
                            schedule=[(beta, 1200)])
    dig = np.array([(trotter_cool(syn, dparams, g4, s) < 0).mean() for s in range(80)])
    met = np.array([(anneal(syn, mparams, g4, 1000 + s) < 0).mean() for s in range(80)])
    se = np.sqrt(dig.var(ddof=1) / 80 + met.var(ddof=1) / 80)
    assert abs(dig.mean() - met.mean()) <= 3 * se


def test_seed_splicing_markov_determinism(g4):
    syn = syndrome_with_z(g4, [0])
    tables = sector_tables(g4, "vertex")
    params = DigitalCoolingParams(tau=0.25, m=1, beta=1.5, J=1.0, h=1.0)

    def run(chunks, seed=9):
        state = initial_state(syn.b, tables)
        sat = tables.sat_of(state.u, state.s)
        rs = kernels.coerce_seed(seed)
        for m in chunks:
            rs = kernels.as_state(kernels.digital_kernel(
                state.u, sat, tables.plaq_edges, tables.plaq_deg, tables.edge_plaq,
                params.tau, params.gamma_minus, params.gamma_plus,
                params.gammap_minus, params.gammap_plus, params.beta,
                params.J, params.h, kernels.RATE_MODE_DETAILED_BALANCE, m, 3, rs))
        return state.u.copy()

    assert np.array_equal(run([80]), run([50, 30]))
    assert np.array_equal(run([80]), run([20, 20, 40]))


def test_pumping_identity_and_negative_controls():
    assert verify_pumping_identity() is True
    for k in range(4):
        assert verify_pumping_identity(drop_cnot=k) is False


def test_db_stationary_is_gibbs_exact_chain(g2):
    # exact transition-matrix oracle: detailed balance pins the Boltzmann
    # distribution for any step size
    syn = syndrome_with_z(g2, [0])
    tables = sector_tables(g2, "vertex")
    gibbs = exact_gibbs(g2, syn, 1.0, 1.0, 1.0)
    for tau in (0.4, 0.2):
        p = DigitalCoolingParams(tau=tau, m=1, beta=1.0, J=1.0, h=1.0,
                                 rate_mode=RateMode.DETAILED_BALANCE)
        pi = stationary_distribution(trotter_step_matrix(syn.b, tables, p))
        assert 0.5 * np.abs(pi - gibbs).sum() < 1e-8


def test_db_sampled_stationary_within_tv(g2):
    # the jit kernel itself, statistically: TV < 0.03 against exact Gibbs
    syn = syndrome_with_z(g2, [0])
    tables = sector_tables(g2, "vertex")
    beta = 1.0
    gibbs = exact_gibbs(g2, syn, beta, 1.0, 1.0)
    p = DigitalCoolingParams(tau=0.25, m=1, beta=beta, J=1.0, h=1.0)
    state = initial_state(syn.b, tables)
    sat = tables.sat_of(state.u, state.s)
    rs = kernels.coerce_seed(11)
    rs = kernels.as_state(kernels.digital_kernel(
        state.u, sat, tables.plaq_edges, tables.plaq_deg, tables.edge_plaq,
        p.tau, p.gamma_minus, p.gamma_plus, p.gammap_minus, p.gammap_plus,
        beta, 1.0, 1.0, kernels.RATE_MODE_DETAILED_BALANCE, 2000, 3, rs))
    counts = np.zeros(256, dtype=np.int64)
    weights = 1 << np.arange(8)
    for _ in range(200_000):
        rs = kernels.as_state(kernels.digital_kernel(
            state.u, sat, tables.plaq_edges, tables.plaq_deg, tables.edge_plaq,
            p.tau, p.gamma_minus, p.gamma_plus, p.gammap_minus, p.gammap_plus,
            beta, 1.0, 1.0, kernels.RATE_MODE_DETAILED_BALANCE, 1, 3, rs))
        counts[int(((state.u < 0) * weights).sum())] += 1
    emp = counts / counts.sum()
    assert 0.5 * np.abs(emp - gibbs).sum() < 0.03


def test_trotter_error_linear_in_tau(g2):
    # paper-ratio stationary observables drift linearly in the step size:
    # successive differences halve when tau halves (exact-chain oracle)
    syn = syndrome_with_z(g2, [0])
    tables = sector_tables(g2, "vertex")
    energies = enumerate_energies(syn.b, tables, 1.0, 1.0)
    obs = {}
    for tau in (0.05, 0.025, 0.0125):
        p = DigitalCoolingParams(tau=tau, m=1, beta=1.0, J=1.0, h=1.0,
                                 rate_mode=RateMode.PAPER_RATIO)
        pi = stationary_distribution(trotter_step_matrix(syn.b, tables, p),
                                     squarings=50)
        obs[tau] = float(pi @ energies)
    d1 = obs[0.05] - obs[0.025]
    d2 = obs[0.025] - obs[0.0125]
    assert abs(d1) > abs(d2)
    assert d1 / d2 == pytest.approx(2.0, abs=0.7)
