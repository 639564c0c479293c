"""NOMA power splitting and achievable rates for one time slot.

Each slot superimposes the wired user's stream (power fraction beta of
P_max) on the scheduled wireless user's stream (fraction 1 - beta). The
wired user is the strong receiver: it decodes and cancels the wireless
stream first, then its own; the wireless user decodes its own stream
treating the wired stream as interference. This requires
gain_wired >= gain_wireless and beta <= 0.5 (the weak user gets at least
half the power).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleError
from .params import SystemParams

BETA_FLOOR = 1e-12  # numerical stand-in for the open lower end of (0, 0.5]


@dataclass(frozen=True)
class SlotSolution:
    """Power split and resulting per-slot rates."""

    beta: float            # wired user's power fraction, in (0, 0.5]
    p_wired: float         # beta * P_max [W]
    p_wireless: float      # (1 - beta) * P_max [W]
    rate_wired: float      # [bit/s/Hz]
    rate_wireless: float   # [bit/s/Hz]
    sic_feasible: bool     # gain_wired >= gain_wireless


def snr_scales(gain_wired: float, gain_wireless: float, params: SystemParams):
    """Full-power SNR scales (m, z) = (gain_wired, gain_wireless) * P/sigma2."""
    budget = params.P_max / params.sigma2
    return gain_wired * budget, gain_wireless * budget


def pair_rates(z, m, beta):
    """Rates (wired, wireless) given SNR scales and the wired fraction beta.

    Vectorized; all arguments broadcast.
    """
    rate_wired = np.log2(1.0 + m * beta)
    rate_wireless = np.log2(1.0 + z * (1.0 - beta) / (z * beta + 1.0))
    return rate_wired, rate_wireless


def slot_rates(
    gain_wired: float,
    gain_wireless: float,
    beta: float,
    params: SystemParams,
) -> SlotSolution:
    """Evaluate one slot at a given power split."""
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta}")
    m, z = snr_scales(gain_wired, gain_wireless, params)
    rate_wired, rate_wireless = pair_rates(z, m, beta)
    p_wired = beta * params.P_max
    return SlotSolution(
        beta=beta,
        p_wired=p_wired,
        p_wireless=params.P_max - p_wired,
        rate_wired=float(rate_wired),
        rate_wireless=float(rate_wireless),
        sic_feasible=bool(gain_wired >= gain_wireless),
    )


def beta_bounds_arrays(z, m, params: SystemParams):
    """Vectorized QoS bounds on beta; no feasibility check, caller masks.

    beta_min meets the wired floor R0_min; beta_max meets the wireless floor
    R1_min. Either may leave the empty interval when the slot is infeasible.
    """
    need_wired = 2.0 ** params.R0_min - 1.0
    need_wireless = 2.0 ** params.R1_min - 1.0
    with np.errstate(divide="ignore", invalid="ignore"):
        beta_min = need_wired / np.asarray(m, dtype=float)
        zz = np.asarray(z, dtype=float)
        beta_max = (zz - need_wireless) / (zz * 2.0 ** params.R1_min)
    return beta_min, beta_max


def beta_bounds(
    gain_wired: float,
    gain_wireless: float,
    params: SystemParams,
) -> tuple[float, float]:
    """QoS bounds on beta for one slot; raises if the interval is empty."""
    if gain_wired <= 0 or gain_wireless <= 0:
        raise ValueError("channel gains must be positive")
    m, z = snr_scales(gain_wired, gain_wireless, params)
    beta_min, beta_max = beta_bounds_arrays(z, m, params)
    beta_min, beta_max = float(beta_min), float(beta_max)
    if beta_min > min(beta_max, 0.5):
        raise InfeasibleError(
            "power-split",
            f"no beta in [{beta_min:.3e}, min({beta_max:.3e}, 0.5)] meets both "
            f"rate floors (R0_min={params.R0_min}, R1_min={params.R1_min})",
        )
    return beta_min, beta_max


def optimal_beta(
    gain_wired: float,
    gain_wireless: float,
    params: SystemParams,
) -> float:
    """Sum-rate-optimal wired fraction: min(beta_max, 0.5).

    The slot sum rate log2((z+1)(1+m*beta)/(z*beta+1)) is monotone
    increasing in beta whenever m >= z, so the optimum sits at the upper end
    of the feasible interval.
    """
    if gain_wired < gain_wireless:
        raise InfeasibleError(
            "sic-order",
            f"gain_wired={gain_wired:.3e} < gain_wireless={gain_wireless:.3e}; "
            "the wired user must be the strong receiver",
        )
    beta_min, beta_max = beta_bounds(gain_wired, gain_wireless, params)
    beta = max(min(beta_max, 0.5), BETA_FLOOR)
    if beta < beta_min:
        raise InfeasibleError(
            "power-split",
            f"optimal beta {beta:.3e} falls below beta_min {beta_min:.3e}",
        )
    return beta


def weighted_beta_arrays(z, m, params: SystemParams):
    """Vectorized argmax of w0*rate_wired + w_k*rate_wireless over beta.

    The utility's derivative sign is linear in beta, so the argmax is a
    closed form: the upper end min(beta_max, 0.5) when w0 >= w_k (the
    unweighted case), otherwise the stationary point
    (w0*m - w_k*z) / (m*z*(w_k - w0)) clamped to the feasible interval.
    Returns NaN where the interval is empty.
    """
    z = np.asarray(z, dtype=float)
    m = np.asarray(m, dtype=float)
    beta_min, beta_max = beta_bounds_arrays(z, m, params)
    cap = np.minimum(beta_max, 0.5)
    w0, wk = params.w0, params.w_k
    if wk <= w0:
        beta = cap.copy() if isinstance(cap, np.ndarray) else cap
    else:
        numer = w0 * m - wk * z
        with np.errstate(divide="ignore", invalid="ignore"):
            stationary = numer / (m * z * (wk - w0))
        beta = np.where(numer <= 0, beta_min, stationary)
        beta = np.clip(beta, beta_min, cap)
    beta = np.maximum(beta, BETA_FLOOR)
    feasible = beta_min <= cap
    return np.where(feasible, beta, np.nan)


def weighted_optimal_beta(
    gain_wired: float,
    gain_wireless: float,
    params: SystemParams,
) -> float:
    """Scalar weighted power split; raises when the slot is infeasible."""
    if gain_wired < gain_wireless:
        raise InfeasibleError(
            "sic-order",
            f"gain_wired={gain_wired:.3e} < gain_wireless={gain_wireless:.3e}; "
            "the wired user must be the strong receiver",
        )
    m, z = snr_scales(gain_wired, gain_wireless, params)
    beta = float(weighted_beta_arrays(z, m, params))
    if math.isnan(beta):
        raise InfeasibleError(
            "power-split",
            "no beta meets both rate floors for this slot",
        )
    return beta


def noma_pair_rates(
    gain_first: float,
    gain_second: float,
    p_first: float,
    p_second: float,
    sigma2: float,
) -> tuple[float, float, bool]:
    """Rates under an arbitrary decoding order for a two-user superposition.

    The user decoded first treats the other stream as interference; the user
    decoded second cancels the first stream before decoding its own. Returns
    (rate_first, rate_second, sic_ok) where sic_ok verifies that the second
    user can actually decode the first user's message (its cross-SINR for
    that message is at least the first user's own SINR).
    """
    sinr_first = gain_first * p_first / (gain_first * p_second + sigma2)
    sinr_second = gain_second * p_second / sigma2
    sinr_cross = gain_second * p_first / (gain_second * p_second + sigma2)
    return (
        math.log2(1.0 + sinr_first),
        math.log2(1.0 + sinr_second),
        sinr_cross >= sinr_first,
    )
