"""Analytic failure bounds, threshold, decay-rate fitting and the
physical-parameter budget.

The bound machinery counts connected error+matching chains: a chain of
length l occurs with probability at most 2^l p^(l/2), the number of
self-avoiding walks of length l is overestimated by 3*4^(l-1), and only
chains at least as long as the sustained correlation length
r_cor = 4J/(2h) can defeat the plaquette couplings.  Geometric closed
forms are used, summed from ceil(r_cor) (chain lengths are integers),
and a divergence flag (inf) is returned when the geometric ratio
reaches 1.  Two constants appear in the source analysis: the raw
self-avoiding-walk form (8 sqrt(p) ratio) and the final combined bound
((8/3) 6^l p^(l/2) plus the boundary-mismatch term); both are exposed
as printed rather than reconciled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


@dataclass
class BoundInputs:
    """Inputs of the logical-error bound; ``r_cor`` defaults to alpha*ln L."""

    p: float
    L: int
    alpha: float = 1.0
    r_cor: float | None = None

    def __post_init__(self):
        if not 0.0 < self.p < 0.5:
            raise ValueError("p must lie in (0, 1/2)")
        if self.r_cor is None:
            self.r_cor = self.alpha * math.log(self.L)
        if self.r_cor <= 0:
            raise ValueError("r_cor must be positive")


def saw_chain_bound(p: float, r_cor: float) -> float:
    """Self-avoiding-walk chain bound: sum_{l >= ceil(r_cor)} 3*4^(l-1)*2^l*p^(l/2).

    Closed geometric form with ratio 8*sqrt(p); returns inf when the
    ratio reaches 1 (p >= 1/64).
    """
    if not 0.0 < p < 0.5:
        raise ValueError("p must lie in (0, 1/2)")
    if r_cor < 1:
        raise ValueError("r_cor must be at least 1")
    x = 8.0 * math.sqrt(p)
    if x >= 1.0:
        return math.inf
    l0 = math.ceil(r_cor)
    return 0.75 * x**l0 / (1.0 - x)


def logical_error_bound(inputs: BoundInputs) -> float:
    """Per-step logical error bound
    L^2 * ( sum_{l >= ceil(r_cor)} (8/3) 6^l p^(l/2)  +  (p/(1-p))^(r_cor/2) ).

    The first term covers chains that defeat the energy landscape or
    arise from field excitations on the balanced-temperature line; the
    second covers thermally activated boundary mismatches.  Diverges
    (inf) when 6*sqrt(p) >= 1.
    """
    p, r_cor = inputs.p, inputs.r_cor
    x = 6.0 * math.sqrt(p)
    if x >= 1.0:
        return math.inf
    l0 = math.ceil(r_cor)
    chain_term = (8.0 / 3.0) * x**l0 / (1.0 - x)
    mismatch_term = (p / (1.0 - p)) ** (r_cor / 2.0)
    return inputs.L**2 * (chain_term + mismatch_term)


def analytic_threshold(alpha: float) -> float:
    """Largest p with vanishing bound: solves p/(1-p) = e^(-4/alpha)/36."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    q = math.exp(-4.0 / alpha) / 36.0
    return q / (1.0 + q)


@dataclass
class FailureSeries:
    """Empirical logical-failure fractions per cycle."""

    t: np.ndarray         # (n,) int, strictly increasing
    p_fail: np.ndarray    # (n,) float in [0, 1]
    n_trials: np.ndarray  # (n,) int

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=np.float64)
        self.p_fail = np.asarray(self.p_fail, dtype=np.float64)
        self.n_trials = np.asarray(self.n_trials, dtype=np.int64)
        if not (self.t.shape == self.p_fail.shape == self.n_trials.shape):
            raise ValueError("series fields must have equal length")
        if (np.diff(self.t) <= 0).any():
            raise ValueError("cycle indices must be strictly increasing")
        if ((self.p_fail < 0) | (self.p_fail > 1)).any():
            raise ValueError("failure fractions must lie in [0, 1]")


@dataclass
class FitResult:
    gamma_eff: float
    residual: float
    flag: str = "ok"      # "ok" | "all_zero" | "saturated"

    def __iter__(self):
        return iter((self.gamma_eff, self.residual))


# Golden-section bracket for the dimensionless rate gamma * t_max / 100;
# at the canonical 100-cycle horizon this is gamma in [1e-8, 10].  Using
# the scaled variable makes the fit exactly covariant under rescaling t.
_BRACKET_LO = 1e-8
_BRACKET_HI = 10.0
_SATURATION = 0.75


def _saturating_exp(rate: float, tau: np.ndarray) -> np.ndarray:
    return _SATURATION * -np.expm1(-rate * tau)


def _golden_min(fun, lo: float, hi: float, iters: int = 90) -> float:
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = math.log(lo), math.log(hi)
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = fun(math.exp(c)), fun(math.exp(d))
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = fun(math.exp(c))
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = fun(math.exp(d))
    return math.exp((a + b) / 2.0)


def fit_gamma_eff(series: FailureSeries) -> FitResult:
    """Fit p_fail(t) = (3/4)(1 - e^(-gamma t)) by weighted least squares.

    Binomial weighting, frozen after a first unweighted pass; 1-D
    golden-section minimization on log gamma.  Degenerate series are
    flagged: an all-zero series returns gamma 0, a fully saturated one
    returns the bracket top as a lower bound.
    """
    if series.t.shape[0] < 3:
        raise ValueError("need at least 3 points to fit")
    t_max = float(series.t.max())
    tau = 100.0 * series.t / t_max
    p_hat = series.p_fail
    n = series.n_trials.astype(np.float64)

    if not p_hat.any():
        return FitResult(0.0, 0.0, "all_zero")
    if (p_hat >= _SATURATION * (1.0 - 1e-9)).all():
        gamma = _BRACKET_HI * 100.0 / t_max
        return FitResult(gamma, float(((p_hat - _SATURATION) ** 2).sum()), "saturated")

    def sse(rate, weights):
        r = p_hat - _saturating_exp(rate, tau)
        return float((weights * r * r).sum())

    rate0 = _golden_min(lambda r: sse(r, 1.0), _BRACKET_LO, _BRACKET_HI)
    f0 = _saturating_exp(rate0, tau)
    fc = np.clip(f0, 1.0 / (2.0 * n), _SATURATION * (1.0 - 1.0 / (2.0 * n)))
    weights = n / (fc * (1.0 - fc))
    rate = _golden_min(lambda r: sse(r, weights), _BRACKET_LO, _BRACKET_HI)
    return FitResult(rate * 100.0 / t_max, sse(rate, weights), "ok")


@dataclass
class ResourceParams:
    """Physical rates and dimensionless targets for the cycle-time budget.

    ``gamma`` is the ancilla dissipation rate, ``kappa`` the two-qubit
    coupling (gate time 1/kappa), ``Gamma`` the data-qubit decoherence
    rate.  ``mc_steps`` is the cooling length in Monte Carlo sweeps,
    each costing a relaxation time 1/gamma.
    """

    gamma: float = 1.0
    kappa: float = 1e4
    Gamma: float = 1e-4
    J_over_gamma: float = 10.0
    h_over_gamma: float = 10.0
    trotter_product_J: float = 0.1
    trotter_product_h: float = 0.1
    mc_steps: float = 100.0

    def __post_init__(self):
        for name in ("gamma", "kappa", "Gamma", "J_over_gamma", "h_over_gamma",
                     "trotter_product_J", "trotter_product_h", "mc_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


def resource_estimate(params: ResourceParams) -> dict:
    """Arithmetic chain from rates to the per-cycle error probability.

    tau = sqrt(target / (J/gamma)) / gamma (h likewise, minimum taken),
    t_cool = mc_steps / gamma, m = t_cool / tau, t_cycle = t_cool +
    m / kappa, p_cycle = 1 - exp(-Gamma t_cycle).  Constraint
    violations are reported as warnings, not errors.
    """
    warnings = []
    if params.J_over_gamma <= 1 or params.h_over_gamma <= 1:
        warnings.append("Markov approximation needs J, h >> gamma")
    if params.trotter_product_J >= 1 or params.trotter_product_h >= 1:
        warnings.append("Trotter split needs J*gamma*tau^2, h*gamma*tau^2 << 1")
    tau_J = math.sqrt(params.trotter_product_J / params.J_over_gamma) / params.gamma
    tau_h = math.sqrt(params.trotter_product_h / params.h_over_gamma) / params.gamma
    tau = min(tau_J, tau_h)
    t_cool = params.mc_steps / params.gamma
    m = round(t_cool / tau)
    t_cycle = t_cool + m / params.kappa
    p_cycle = -math.expm1(-params.Gamma * t_cycle)
    if p_cycle > 0.05:
        warnings.append("per-cycle error probability exceeds the ~1e-2 working point")
    return {"tau": tau, "m": m, "t_cool": t_cool, "t_cycle": t_cycle,
            "p_cycle": p_cycle, "warnings": warnings}
