"""Brute-force reference solvers for validating the closed-form paths.

Everything here works by dense grid enumeration straight from the channel
model and the rate definitions. None of it calls the closed-form argmax
logic in `twouser` or `multiuser`, so agreement between the two is evidence,
not tautology. These run in tests and sanity scripts, not in the hot path.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import channel, rates
from .errors import InfeasibleError
from .params import DerivedConstants, SystemParams, derive_constants


@dataclass(frozen=True)
class GridSpec:
    """A uniform search grid: `points` samples over [lo, hi] in `dims` axes."""

    lo: float
    hi: float
    points: int
    dims: int = 1

    def axis(self) -> np.ndarray:
        if self.points < 2:
            raise ValueError(f"grid needs at least 2 points, got {self.points}")
        if not self.hi > self.lo:
            raise ValueError(f"empty grid: [{self.lo}, {self.hi}]")
        return np.linspace(self.lo, self.hi, self.points)


def grid_argmax_1d(objective, spec: GridSpec) -> tuple[float, float]:
    """Sample `objective` on the grid and return (x_best, f_best).

    `objective` must accept a vector. Ties resolve to the smallest x.
    """
    xs = spec.axis()
    values = np.asarray(objective(xs), dtype=float)
    best = int(np.argmax(values))
    return float(xs[best]), float(values[best])


@dataclass(frozen=True)
class BruteForceSolution:
    psi: float
    delta: float
    beta: float
    rate_wired: float
    rate_wireless: float
    sum_rate: float


def two_user_brute_force(
    ue_pos,
    params: SystemParams,
    resolution: int = 200,
    consts: DerivedConstants | None = None,
) -> BruteForceSolution:
    """Exhaustive (psi, delta, beta) search for the single-antenna pair design.

    Gains come from evaluating the channel module at every grid position, so
    this checks the solver's algebra as well as its argmax choices. All
    constraints are enforced literally: both rate floors, the decode-order
    requirement gain_wired >= gain_wireless, beta <= 0.5, delta in (0, 1].
    Raises InfeasibleError when no grid point satisfies them all.
    """
    consts = consts or derive_constants(params)
    lo = params.psi0_x
    psis = np.linspace(lo, lo + params.D_x, resolution)
    deltas = np.linspace(1e-9, 1.0, resolution)
    betas = np.linspace(rates.BETA_FLOOR, 0.5, resolution)

    # per-position radiated gain at delta = 1, straight from the model
    pts = channel.pa_points(psis, params)
    fo = channel.freespace_coeff(channel.ue_point(ue_pos), pts, consts)
    fi = channel.waveguide_coeff(lo, psis, params, consts)
    shape = np.abs(fo * fi) ** 2                       # (P,)
    wired_base = params.kappa_c**2 * np.abs(
        channel.waveguide_coeff(lo, lo + params.D_x, params, consts)
    ) ** 2

    budget = params.P_max / params.sigma2
    z = shape[:, None] * deltas[None, :] * budget       # (P, D)
    m = wired_base * (1.0 - deltas)[None, :] * budget   # broadcast to (P, D)
    m = np.broadcast_to(m, z.shape)

    r_wired, r_wireless = rates.pair_rates(
        z[:, :, None], m[:, :, None], betas[None, None, :]
    )                                                   # (P, D, B)
    ok = (
        (r_wired >= params.R0_min - 1e-12)
        & (r_wireless >= params.R1_min - 1e-12)
        & (m >= z)[:, :, None]
    )
    total = np.where(ok, r_wired + r_wireless, -np.inf)
    flat = int(np.argmax(total))
    if not np.isfinite(total.flat[flat]):
        raise InfeasibleError(
            "power-split", "no grid point satisfies both rate floors"
        )
    ip, idl, ib = np.unravel_index(flat, total.shape)
    return BruteForceSolution(
        psi=float(psis[ip]),
        delta=float(deltas[idl]),
        beta=float(betas[ib]),
        rate_wired=float(r_wired[ip, idl, ib]),
        rate_wireless=float(r_wireless[ip, idl, ib]),
        sum_rate=float(total[ip, idl, ib]),
    )


def simplex_grid_time(
    rate_wired,
    rate_wireless,
    params: SystemParams,
    resolution: int = 60,
) -> tuple[np.ndarray, float]:
    """Grid search over slot durations on the unit simplex (K <= 4).

    Enumerates the first K-1 durations on uniform grids and sets the last to
    close the budget. Enforces the per-slot wireless floors and the
    long-term wired floor; returns (tau, weighted sum rate). Ties break
    toward the lexicographically smallest tau.
    """
    r0 = np.asarray(rate_wired, dtype=float)
    r1 = np.asarray(rate_wireless, dtype=float)
    k = r0.size
    if k > 4:
        raise ValueError("grid oracle supports at most 4 slots")
    if np.any(r1 <= 0.0):
        raise InfeasibleError("time-budget", "a slot has zero wireless rate")
    tau_min = params.R1_min / r1
    utility = params.w0 * r0 + params.w_k * r1

    # same two feasibility gates as the closed-form allocator
    if tau_min.sum() > 1.0 + 1e-12:
        raise InfeasibleError("time-budget", "minimum slot durations exceed the budget")
    if (tau_min * r0).sum() < params.R0_min - 1e-12:
        raise InfeasibleError("wired-qos", "wired floor unreachable at minimum durations")

    if k == 1:
        return np.array([1.0]), float(utility[0])

    axes = [np.linspace(tau_min[i], 1.0, resolution) for i in range(k - 1)]
    best_wsr = -np.inf
    best_tau = None
    for combo in itertools.product(*axes):
        head = np.array(combo)
        last = 1.0 - head.sum()
        if last < tau_min[-1] - 1e-12:
            continue
        tau = np.append(head, last)
        if (tau * r0).sum() < params.R0_min - 1e-12:
            continue
        wsr = float((tau * utility).sum())
        if wsr > best_wsr + 1e-15:
            best_wsr = wsr
            best_tau = tau
    if best_tau is None:
        raise InfeasibleError(
            "time-budget", "no grid point on the simplex meets all floors"
        )
    return best_tau, best_wsr
