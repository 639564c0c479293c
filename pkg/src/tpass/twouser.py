"""Closed-form design for one wireless user plus the wired user (N = 1).

With a single pinching antenna the radiated gain is
    A1(psi, delta) = eta * delta * e^(-2*alpha*(psi - psi0)) / D_v(psi)^2
and the wired gain is
    A0(delta) = kappa_c^2 * (1 - delta) * e^(-2*alpha*D_x),
so the design decomposes: place the antenna (psi), split the guided power
(delta), then split the transmit power (beta). Each step is closed-form or a
1D grid.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import channel, rates
from .errors import InfeasibleError
from .params import DerivedConstants, SystemParams, derive_constants

DELTA_FLOOR = 1e-9  # numerical stand-in for the open lower end of (0, 1]


class SicOrder(enum.Enum):
    WIRED_STRONG = "wired-strong"        # wired user decodes last (cancels wireless)
    WIRELESS_STRONG = "wireless-strong"  # only if the radiated link dominates


@dataclass(frozen=True)
class GainRatioReport:
    """Radiated-vs-wired gain ratio diagnostics at a given delta."""

    delta: float
    ratio_best_case: float   # radiated gain at its geometric optimum / wired gain
    ratio_average: float     # antenna position averaged uniformly over the span
    delta_threshold: float   # smallest delta where ratio_best_case reaches 1


@dataclass(frozen=True)
class TwoUserSolution:
    """Joint placement, radiation split, and power split for one UE pair."""

    psi: float             # antenna position [m]
    delta: float           # radiated fraction of the guided power
    beta: float            # wired user's share of the transmit power
    p_wired: float         # [W]
    p_wireless: float      # [W]
    rate_wired: float      # [bit/s/Hz]
    rate_wireless: float   # [bit/s/Hz]
    sum_rate: float        # [bit/s/Hz]
    gain_wired: float
    gain_wireless: float
    sic_order: SicOrder
    feasible: bool


def _geometry(ue_pos, params: SystemParams):
    """(u_x, c_y) with c_y = u_y^2 + d^2; accepts 2D or 3D positions."""
    ue = np.asarray(ue_pos, dtype=float).ravel()
    u_x, u_y = float(ue[0]), float(ue[1])
    return u_x, u_y**2 + params.d**2


def _radiated_gain_shape(psi, u_x, c_y, psi0: float, alpha: float):
    """Radiated gain at delta = 1 up to the constant eta (vectorized)."""
    span_pos = np.asarray(psi, dtype=float)
    return np.exp(-2.0 * alpha * (span_pos - psi0)) / ((span_pos - u_x) ** 2 + c_y)


def optimal_pa_position(
    ue_pos,
    params: SystemParams,
    consts: DerivedConstants | None = None,
) -> float:
    """Global maximizer of the radiated gain over the waveguide span.

    The gain's log-derivative vanishes where alpha*t^2 + t + alpha*c_y = 0
    with t = psi - u_x, so the only interior local maximum is
    t = (-1 + sqrt(1 - 4*alpha^2*c_y)) / (2*alpha); the feed point is the
    other candidate (the right end of the span is never one: the gain is
    falling there whenever the interior maximum exists to its left). With
    alpha = 0 the gain is maximized directly below the user.
    """
    consts = consts or derive_constants(params)
    u_x, c_y = _geometry(ue_pos, params)
    lo = params.psi0_x
    hi = params.psi0_x + params.D_x
    alpha = consts.alpha
    if alpha == 0.0:
        return min(max(u_x, lo), hi)
    candidates = [lo]
    disc = 1.0 - 4.0 * alpha**2 * c_y
    if disc >= 0.0:
        interior = u_x + (-1.0 + math.sqrt(disc)) / (2.0 * alpha)
        if lo < interior:
            candidates.append(min(interior, hi))
    values = _radiated_gain_shape(np.array(candidates), u_x, c_y, lo, alpha)
    return float(candidates[int(np.argmax(values))])


def gain_ratios(
    delta: float,
    params: SystemParams,
    consts: DerivedConstants | None = None,
) -> GainRatioReport:
    """Best-case and span-averaged radiated/wired gain ratios at one delta.

    Best case puts the antenna directly above the user at the feed (vertical
    distance d, no guide loss); the average places it uniformly over the
    span, which replaces e^(2*alpha*D_x) by (e^(2*alpha*D_x) - 1) /
    (2*alpha*D_x).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1) for a finite ratio, got {delta}")
    consts = consts or derive_constants(params)
    x = 2.0 * consts.alpha * params.D_x
    scale = (consts.lam / params.d) ** 2 / (16.0 * math.pi**2 * params.kappa_c**2)
    g_best = scale * math.exp(x)
    # (1 - e^-x)/x -> 1 as x -> 0; expm1 keeps precision for small loss
    span_factor = -math.expm1(-x) / x if x > 0 else 1.0
    odds = delta / (1.0 - delta)
    return GainRatioReport(
        delta=delta,
        ratio_best_case=odds * g_best,
        ratio_average=odds * g_best * span_factor,
        delta_threshold=1.0 / (1.0 + g_best),
    )


def decide_sic_order(report: GainRatioReport) -> SicOrder:
    """Decoding order from the conservative best-case ratio (tie: wired strong)."""
    if report.ratio_best_case <= 1.0:
        return SicOrder.WIRED_STRONG
    return SicOrder.WIRELESS_STRONG


def delta_upper_bound(
    ue_pos,
    psi: float,
    params: SystemParams,
    consts: DerivedConstants | None = None,
) -> float:
    """Largest delta keeping the wired link at least as strong as the radiated one.

    Solves A1(psi, delta) = A0(delta) for the actual geometry: delta^ =
    1 / (1 + eta*e^(-2*alpha*D_i) / (D_v^2 * kappa_c^2 * e^(-2*alpha*D_x))).
    """
    consts = consts or derive_constants(params)
    u_x, c_y = _geometry(ue_pos, params)
    d_i = psi - params.psi0_x
    d_v2 = (psi - u_x) ** 2 + c_y
    radiated = consts.eta * math.exp(-2.0 * consts.alpha * d_i) / d_v2
    wired = params.kappa_c**2 * math.exp(-2.0 * consts.alpha * params.D_x)
    return 1.0 / (1.0 + radiated / wired)


def _gain_scales(ue_pos, psi, params, consts):
    """(radiated gain per unit delta, wired gain per unit (1 - delta))."""
    u_x, c_y = _geometry(ue_pos, params)
    d_i = psi - params.psi0_x
    d_v2 = (psi - u_x) ** 2 + c_y
    base_wireless = consts.eta * math.exp(-2.0 * consts.alpha * d_i) / d_v2
    base_wired = params.kappa_c**2 * math.exp(-2.0 * consts.alpha * params.D_x)
    return base_wireless, base_wired


def optimize_delta(
    ue_pos,
    psi: float,
    params: SystemParams,
    consts: DerivedConstants | None = None,
) -> tuple[float, float]:
    """Grid argmax of the slot sum rate over delta in (0, delta^].

    At each grid point the power split collapses to the closed form
    beta = min(beta_max, 0.5), so the sum rate reduces to
    log2((z+1)(1+m*beta)/(z*beta+1)). Ties go to the smaller delta;
    infeasible grid points are skipped.
    """
    consts = consts or derive_constants(params)
    base_wireless, base_wired = _gain_scales(ue_pos, psi, params, consts)
    hi = delta_upper_bound(ue_pos, psi, params, consts)
    lo = min(DELTA_FLOOR, hi / 2.0)
    grid = np.linspace(lo, hi, params.Q_grid)
    budget = params.P_max / params.sigma2
    z = base_wireless * grid * budget
    m = base_wired * (1.0 - grid) * budget
    beta_min, beta_max = rates.beta_bounds_arrays(z, m, params)
    beta = np.maximum(np.minimum(beta_max, 0.5), rates.BETA_FLOOR)
    feasible = beta >= beta_min
    if not np.any(feasible):
        raise InfeasibleError(
            "power-split",
            "no delta on the grid admits a power split meeting both rate floors",
        )
    objective = (z + 1.0) * (1.0 + m * beta) / (z * beta + 1.0)
    objective[~feasible] = -np.inf
    best = int(np.argmax(objective))
    return float(grid[best]), float(beta[best])


def solve_two_user(
    ue_pos,
    params: SystemParams,
    delta: float | None = None,
) -> TwoUserSolution:
    """Joint two-user design: position, radiation split, power split.

    Pass `delta` to pin the radiation split (e.g. comparing against a fixed
    0.7) instead of optimizing it; the position and power split are still
    optimized. Weights play no role here: both users carry unit priority,
    and the reported objective is the plain sum rate.
    """
    consts = derive_constants(params)
    psi = optimal_pa_position(ue_pos, params, consts)
    if delta is None:
        delta_star, _ = optimize_delta(ue_pos, psi, params, consts)
    else:
        hi = delta_upper_bound(ue_pos, psi, params, consts)
        if not 0.0 < delta <= hi:
            raise InfeasibleError(
                "sic-order",
                f"delta={delta} exceeds the SIC-preserving bound {hi:.9g}",
            )
        delta_star = delta

    pa = channel.PaConfig(
        positions=np.array([psi]), radiation=np.array([delta_star])
    )
    gain_wireless = channel.effective_wireless(ue_pos, pa, params, consts).gain
    gain_wired = channel.effective_wired(pa, params, consts).gain
    # beta is re-derived from the channel-module gains so the reported rates
    # and the feasibility check share one source of truth
    beta_star = rates.optimal_beta(gain_wired, gain_wireless, params)
    slot = rates.slot_rates(gain_wired, gain_wireless, beta_star, params)
    order = decide_sic_order(gain_ratios(min(delta_star, 1.0 - 1e-15), params, consts))
    return TwoUserSolution(
        psi=psi,
        delta=delta_star,
        beta=beta_star,
        p_wired=slot.p_wired,
        p_wireless=slot.p_wireless,
        rate_wired=slot.rate_wired,
        rate_wireless=slot.rate_wireless,
        sum_rate=slot.rate_wired + slot.rate_wireless,
        gain_wired=gain_wired,
        gain_wireless=gain_wireless,
        sic_order=order,
        feasible=True,
    )


def wireless_only_rate(
    ue_pos,
    delta: float,
    params: SystemParams,
    consts: DerivedConstants | None = None,
) -> float:
    """Single-user baseline: no wired stream, full power to the wireless user.

    The antenna still radiates only a fraction delta of the guided power;
    the residual is absorbed at the termination instead of being served.
    """
    consts = consts or derive_constants(params)
    psi = optimal_pa_position(ue_pos, params, consts)
    base_wireless, _ = _gain_scales(ue_pos, psi, params, consts)
    snr = base_wireless * delta * params.P_max / params.sigma2
    return math.log2(1.0 + snr)
