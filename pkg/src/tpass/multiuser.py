"""Multiuser scheduling over one waveguide: slots, protocols, and the BCD solver.

K wireless users take turns in TDMA slots; the wired user rides along in
every slot as the strong NOMA stream. Four reconfiguration protocols differ
in which antenna variables may change between slots:

    FRFP  radiation shared,   positions shared   (one static configuration)
    FRAP  radiation shared,   positions per-slot
    ARFP  radiation per-slot, positions shared
    ARAP  radiation per-slot, positions per-slot

Shared variables are optimized by element-wise 1D grid searches inside a
block-coordinate descent; per-slot positions come from a clustered placement
around the single-antenna optimum for the scheduled user. Slot durations
then follow a closed-form water-pour of the leftover budget onto the slot
with the best weighted utility.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import channel, rates, twouser
from .errors import InfeasibleError
from .params import DerivedConstants, SystemParams, derive_constants

_REL_TOL = 1e-9        # slack on the two time-allocation feasibility gates
_DELTA_FLOOR = 1e-9    # open lower end of the radiation interval


class ProtocolKind(enum.Enum):
    FRFP = "FRFP"
    FRAP = "FRAP"
    ARFP = "ARFP"
    ARAP = "ARAP"


@dataclass(frozen=True)
class ProtocolStructure:
    """Which antenna variables are shared across slots vs. free per slot."""

    radiation_shared: bool
    positions_shared: bool


_STRUCTURES = {
    ProtocolKind.FRFP: ProtocolStructure(radiation_shared=True, positions_shared=True),
    ProtocolKind.FRAP: ProtocolStructure(radiation_shared=True, positions_shared=False),
    ProtocolKind.ARFP: ProtocolStructure(radiation_shared=False, positions_shared=True),
    ProtocolKind.ARAP: ProtocolStructure(radiation_shared=False, positions_shared=False),
}


def protocol_structure(kind: ProtocolKind) -> ProtocolStructure:
    return _STRUCTURES[ProtocolKind(kind)]


@dataclass
class ProtocolSolution:
    kind: ProtocolKind
    pa_per_slot: list[channel.PaConfig]   # one configuration per slot
    slots: list[rates.SlotSolution]       # per-slot power split and rates
    tau: np.ndarray                       # slot durations, sums to 1
    wsr: float                            # weighted sum rate [bit/s/Hz]
    feasible: bool
    iterations: int                       # completed BCD sweeps
    wsr_trace: np.ndarray                 # objective before/after each sweep


def time_allocation(rate_wired, rate_wireless, params: SystemParams) -> np.ndarray:
    """Slot durations: minima from the wireless floors, all slack to one slot.

    Each slot k needs tau_k >= R1_min / r_wireless_k to clear the scheduled
    user's floor. Feasibility requires those minima to fit the unit budget
    and to already satisfy the wired user's long-term floor. The leftover
    budget goes entirely to the slot with the largest weighted utility
    w0*r_wired + w_k*r_wireless (ties: lowest index). The result sums to
    1.0 exactly.
    """
    r0 = np.atleast_1d(np.asarray(rate_wired, dtype=float))
    r1 = np.atleast_1d(np.asarray(rate_wireless, dtype=float))
    if r0.shape != r1.shape:
        raise ValueError("rate arrays must have matching shapes")
    if params.R1_min > 0.0:
        if np.any(r1 <= 0.0):
            raise InfeasibleError(
                "time-budget", "a slot has zero wireless rate but a positive floor"
            )
        tau_min = params.R1_min / r1
    else:
        tau_min = np.zeros_like(r1)
    total_min = float(tau_min.sum())
    if total_min > 1.0 + _REL_TOL:
        raise InfeasibleError(
            "time-budget", f"minimum slot durations sum to {total_min:.6g} > 1"
        )
    wired_long = float((tau_min * r0).sum())
    if wired_long < params.R0_min - _REL_TOL * max(1.0, params.R0_min):
        raise InfeasibleError(
            "wired-qos",
            f"wired long-term rate {wired_long:.6g} below floor {params.R0_min:.6g}",
        )
    utility = params.w0 * r0 + params.w_k * r1
    k_star = int(np.argmax(utility))
    tau = tau_min.copy()
    tau[k_star] += max(1.0 - total_min, 0.0)
    # nudge the slack slot until the float sum closes the budget exactly
    for _ in range(4):
        gap = 1.0 - float(np.sum(tau))
        if gap == 0.0:
            return tau
        tau[k_star] += gap
    # rounding can resist whole-gap nudges when the slack slot's spacing
    # matches the sum's; walk single ulps instead, finest slots first, and
    # move on to the next slot if the gap flips sign without landing on zero
    for j in np.argsort(tau):
        last_gap = 0.0
        for _ in range(32):
            gap = 1.0 - float(np.sum(tau))
            if gap == 0.0:
                return tau
            if last_gap * gap < 0.0:
                break
            last_gap = gap
            tau[int(j)] = np.nextafter(tau[int(j)], math.copysign(math.inf, gap))
    return tau


def _weights_rows(rad: np.ndarray) -> np.ndarray:
    """Amplitude weight sqrt(delta_n * prod_{m<n}(1 - delta_m)) along the last axis."""
    keep = np.cumprod(1.0 - rad, axis=-1)
    keep = np.concatenate([np.ones_like(rad[..., :1]), keep[..., :-1]], axis=-1)
    return np.sqrt(rad * keep)


def _pa_terms(ue_xyz, positions, params: SystemParams, consts: DerivedConstants):
    """Complex per-antenna factor (guide propagation * free-space) for one user."""
    pts = channel.pa_points(positions, params)
    fo = channel.freespace_coeff(ue_xyz, pts, consts)
    fi = channel.waveguide_coeff(params.psi0_x, positions, params, consts)
    return fo * fi


_SCORE_OFFSET = 1e6  # puts every feasible score above every infeasible one
_BIG = 1e6           # finite stand-in for unbounded constraint residuals


@dataclass
class _WsrParts:
    wsr: np.ndarray      # -inf where infeasible
    score: np.ndarray    # wsr + offset where feasible, else -violation
    beta: np.ndarray
    rate_wired: np.ndarray
    rate_wireless: np.ndarray
    tau_min: np.ndarray
    utility: np.ndarray
    slot_ok: np.ndarray


def _wsr_core(gain_wired, gain_wireless, params: SystemParams) -> _WsrParts:
    """Weighted sum rate of a candidate configuration, vectorized over (..., K).

    `wsr` is -inf wherever any slot fails the decode order or power split, or
    the time-allocation gates fail. `score` is what block updates compare:
    feasible candidates rank by their objective (shifted above everything
    else), infeasible ones by the negated total constraint violation, so a
    descent that starts infeasible still has a slope to follow toward the
    feasible set. The violation is zero exactly on the feasible set, which
    makes the two orderings consistent. This is the single scoring function
    used by every BCD block, so accepted moves and the final report always
    agree.
    """
    scale = params.P_max / params.sigma2
    gain_wired = np.asarray(gain_wired, dtype=float)
    gain_wireless = np.asarray(gain_wireless, dtype=float)
    m = gain_wired * scale
    z = gain_wireless * scale
    need_wired = 2.0 ** params.R0_min - 1.0
    with np.errstate(all="ignore"):
        beta = rates.weighted_beta_arrays(z, m, params)
        r0, r1 = rates.pair_rates(z, m, beta)
        if params.R1_min > 0.0:
            tau_min = np.where(r1 > 0.0, params.R1_min / np.where(r1 > 0.0, r1, 1.0), np.inf)
        else:
            tau_min = np.zeros_like(r1)
        slot_ok = (gain_wired >= gain_wireless) & np.isfinite(beta)
        total_min = tau_min.sum(axis=-1)
        wired_long = (tau_min * r0).sum(axis=-1)
        utility = params.w0 * r0 + params.w_k * r1
        wsr = (tau_min * utility).sum(axis=-1) + (1.0 - total_min) * np.max(utility, axis=-1)
        ok = (
            slot_ok.all(axis=-1)
            & (total_min <= 1.0 + _REL_TOL)
            & (wired_long >= params.R0_min - _REL_TOL * max(1.0, params.R0_min))
        )
        wsr = np.where(ok, wsr, -np.inf)

        # finite violation surrogate; clips replace the infinities that show
        # up when a slot's gain cannot support its floor at all
        beta_lo = np.minimum(need_wired / np.maximum(m, 1e-300), _BIG)
        cap = np.where(
            z > 0.0,
            (z - (2.0 ** params.R1_min - 1.0))
            / np.maximum(z * 2.0 ** params.R1_min, 1e-300),
            -_BIG,
        )
        cap = np.minimum(cap, 0.5)
        split_gap = np.maximum(beta_lo - cap, 0.0)
        sic_gap = np.minimum(
            np.maximum((gain_wireless - gain_wired) / (gain_wired + 1e-300), 0.0), _BIG
        )
        # surrogate power split: equals the real one on feasible slots
        beta_t = np.clip(
            np.nan_to_num(beta, nan=0.5),
            np.clip(beta_lo, rates.BETA_FLOOR, 0.5),
            np.clip(cap, rates.BETA_FLOOR, 0.5),
        )
        r0_t, r1_t = rates.pair_rates(z, m, beta_t)
        if params.R1_min > 0.0:
            tau_t = np.minimum(params.R1_min / np.maximum(r1_t, 1e-9), _BIG)
        else:
            tau_t = np.zeros_like(r1_t)
        time_gap = np.maximum(tau_t.sum(axis=-1) - 1.0, 0.0)
        wired_gap = np.maximum(
            (params.R0_min - (tau_t * r0_t).sum(axis=-1)) / max(1.0, params.R0_min),
            0.0,
        )
        violation = split_gap.sum(axis=-1) + sic_gap.sum(axis=-1) + time_gap + wired_gap
        score = np.where(ok, _SCORE_OFFSET + wsr, -violation)
    return _WsrParts(wsr, score, beta, r0, r1, tau_min, utility, slot_ok)


def refine_positions_per_slot(
    ue_pos,
    radiation,
    params: SystemParams,
    consts: DerivedConstants | None = None,
    q: int | None = None,
) -> np.ndarray:
    """Cluster the antennas around the scheduled user's single-antenna optimum.

    Spacing is the smallest integer multiple of the guided wavelength at or
    above the configured floor, so the guide phases of neighboring antennas
    align and the radiated fields add constructively near boresight. Each
    position then gets an element-wise 1D grid polish (holding the others
    fixed, staying within one spacing of its cluster slot) until a full
    sweep improves the slot gain by < 1e-6 relative. Candidates that would
    let the radiated link overtake the wired one are pruned so the decode
    order survives.
    """
    consts = consts or derive_constants(params)
    rad = np.asarray(radiation, dtype=float)
    n = rad.size
    floor = params.spacing_floor()
    if n * floor > params.D_x:
        raise InfeasibleError(
            "spacing", f"{n} antennas at spacing {floor:.4g} m exceed the {params.D_x} m span"
        )
    span_lo = params.psi0_x
    span_hi = params.psi0_x + params.D_x
    center = twouser.optimal_pa_position(ue_pos, params, consts)
    if n == 1:
        return np.array([center])

    step = consts.lam_g * max(1, math.ceil(floor / consts.lam_g - 1e-12))
    if (n - 1) * step > params.D_x:
        step = floor  # phase alignment will not fit; fall back to the bare floor
    pos = center + (np.arange(n) - 0.5 * (n - 1)) * step
    pos += max(0.0, span_lo - pos[0])
    pos -= max(0.0, pos[-1] - span_hi)
    home = pos.copy()  # polish stays within one spacing of the cluster slots

    q = q or params.Q_grid
    ue = channel.ue_point(ue_pos)
    w = _weights_rows(rad)
    gain_wired = params.kappa_c**2 * math.exp(-2.0 * consts.alpha * params.D_x)
    gain_wired *= float(np.prod(1.0 - rad))
    g = _pa_terms(ue, pos, params, consts)
    best = float(np.abs(np.dot(g, w)) ** 2)
    for _ in range(20):
        previous = best
        for j in range(n):
            lo = max(span_lo if j == 0 else pos[j - 1] + floor, home[j] - step)
            hi = min(span_hi if j == n - 1 else pos[j + 1] - floor, home[j] + step)
            if hi < lo:
                continue
            xs = np.append(np.linspace(lo, hi, q), pos[j])
            gj = _pa_terms(ue, xs, params, consts)
            coeff = (np.dot(g, w) - g[j] * w[j]) + w[j] * gj
            gains = np.abs(coeff) ** 2
            gains[gains > gain_wired] = -np.inf
            pick = int(np.argmax(gains))
            if gains[pick] > gains[-1]:
                pos[j] = xs[pick]
                g[j] = gj[pick]
                best = float(gains[pick])
        if best - previous <= 1e-6 * max(previous, 1e-300):
            break
    return pos


class _BcdState:
    """Positions, radiation, and cached channel terms for every slot.

    Everything is stored as (K, N) arrays even for shared variables (rows
    simply stay equal); block updates write one row or all rows. `g` caches
    the per-antenna complex factors so candidate sweeps only recompute the
    touched column.
    """

    def __init__(self, kind, ue_xyz, params, consts, q):
        self.struct = protocol_structure(kind)
        self.params = params
        self.consts = consts
        self.q = q
        self.ue = ue_xyz
        self.n_slots = ue_xyz.shape[0]
        self.n_pas = params.N
        self.span_lo = params.psi0_x
        self.span_hi = params.psi0_x + params.D_x
        self.floor = params.spacing_floor()
        self.base_wired = params.kappa_c**2 * math.exp(-2.0 * consts.alpha * params.D_x)

        init_rad = np.minimum(1.0 / (params.N - np.arange(params.N)), 0.5)
        self.rad = np.tile(init_rad, (self.n_slots, 1))
        if self.struct.positions_shared:
            shared = np.linspace(self.span_lo, self.span_hi, params.N)
            self.pos = np.tile(shared, (self.n_slots, 1))
        else:
            self.pos = np.vstack(
                [
                    refine_positions_per_slot(ue_xyz[k], init_rad, params, consts, q=q)
                    for k in range(self.n_slots)
                ]
            )
        self.g = np.vstack(
            [_pa_terms(ue_xyz[k], self.pos[k], params, consts) for k in range(self.n_slots)]
        )
        # radiation each slot's positions were last clustered for; lets the
        # refine block skip slots whose split has not drifted since
        self._refined_rad = self.rad.copy()

    def gains(self):
        w = _weights_rows(self.rad)
        gain_wireless = np.abs((self.g * w).sum(axis=1)) ** 2
        gain_wired = self.base_wired * np.prod(1.0 - self.rad, axis=1)
        return gain_wired, gain_wireless

    def evaluate(self) -> _WsrParts:
        gain_wired, gain_wireless = self.gains()
        return _wsr_core(gain_wired, gain_wireless, self.params)

    def update_position(self, j: int) -> bool:
        """1D grid move of shared position j inside its order-preserving window."""
        ref = self.pos[0]
        lo = self.span_lo if j == 0 else ref[j - 1] + self.floor
        hi = self.span_hi if j == self.n_pas - 1 else ref[j + 1] - self.floor
        if hi < lo:
            return False
        xs = np.append(np.linspace(lo, hi, self.q), ref[j])
        pts = channel.pa_points(xs, self.params)
        fo = channel.freespace_coeff(self.ue[:, None, :], pts[None, :, :], self.consts)
        fi = channel.waveguide_coeff(self.params.psi0_x, xs, self.params, self.consts)
        gj = fo * fi                                     # (K, Q+1)

        w = _weights_rows(self.rad)
        coeff_now = (self.g * w).sum(axis=1)             # (K,)
        cand = (coeff_now - self.g[:, j] * w[:, j])[:, None] + w[:, j][:, None] * gj
        gain_wireless = (np.abs(cand) ** 2).T            # (Q+1, K)
        gain_wired = self.base_wired * np.prod(1.0 - self.rad, axis=1)
        parts = _wsr_core(gain_wired[None, :], gain_wireless, self.params)
        pick = int(np.argmax(parts.score))
        if parts.score[pick] > parts.score[-1]:
            self.pos[:, j] = xs[pick]
            self.g[:, j] = gj[:, pick]
            return True
        return False

    def update_refine(self, slot: int) -> bool:
        """Re-cluster one slot's antennas for its current radiation split.

        The cluster placement depends on the split (it sets both the target
        gain and the decode-order ceiling), so slots whose radiation moved
        since the last clustering get fresh candidate positions. Candidates
        are kept only when the full objective improves, which preserves the
        monotone trace.
        """
        if float(np.max(np.abs(self.rad[slot] - self._refined_rad[slot]))) < 1e-3:
            return False
        self._refined_rad[slot] = self.rad[slot].copy()
        cand_pos = refine_positions_per_slot(
            self.ue[slot], self.rad[slot], self.params, self.consts, q=self.q
        )
        cand_g = _pa_terms(self.ue[slot], cand_pos, self.params, self.consts)
        gain_wired, gain_wireless = self.gains()
        w = _weights_rows(self.rad[slot])
        cand_wireless = gain_wireless.copy()
        cand_wireless[slot] = float(np.abs(np.dot(cand_g, w)) ** 2)
        now = _wsr_core(gain_wired, gain_wireless, self.params)
        cand = _wsr_core(gain_wired, cand_wireless, self.params)
        if float(cand.score) > float(now.score):
            self.pos[slot] = cand_pos
            self.g[slot] = cand_g
            return True
        return False

    def update_radiation(self, j: int, slot: int | None = None) -> bool:
        """1D grid move of radiation j, either shared (all slots) or for one slot.

        The slot coefficient is affine in sqrt(delta_j) and sqrt(1 - delta_j)
        once the other splits are held fixed, so all candidates evaluate in
        one vectorized pass.
        """
        sel = list(range(self.n_slots)) if slot is None else [slot]
        ds = np.append(np.linspace(_DELTA_FLOOR, 1.0, self.q), self.rad[sel[0], j])

        rad_zero = self.rad.copy()
        rad_zero[:, j] = 0.0
        w_excl = _weights_rows(rad_zero)                 # antenna j silenced
        rad_one = self.rad.copy()
        rad_one[:, j] = 1.0
        w_full = _weights_rows(rad_one)                  # antenna j takes the residue

        ahead = (self.g[:, :j] * w_excl[:, :j]).sum(axis=1)
        behind = (self.g[:, j + 1 :] * w_excl[:, j + 1 :]).sum(axis=1)
        own = self.g[:, j] * w_full[:, j]
        prod_excl = np.prod(1.0 - rad_zero, axis=1)

        w = _weights_rows(self.rad)
        fixed_wireless = np.abs((self.g * w).sum(axis=1)) ** 2
        fixed_wired = self.base_wired * np.prod(1.0 - self.rad, axis=1)
        gain_wireless = np.broadcast_to(fixed_wireless, (ds.size, self.n_slots)).copy()
        gain_wired = np.broadcast_to(fixed_wired, (ds.size, self.n_slots)).copy()

        root_on = np.sqrt(ds)
        root_off = np.sqrt(1.0 - ds)
        cand = (
            ahead[sel][:, None]
            + own[sel][:, None] * root_on[None, :]
            + behind[sel][:, None] * root_off[None, :]
        )
        gain_wireless[:, sel] = (np.abs(cand) ** 2).T
        gain_wired[:, sel] = (self.base_wired * prod_excl[sel])[None, :] * (1.0 - ds)[:, None]

        parts = _wsr_core(gain_wired, gain_wireless, self.params)
        pick = int(np.argmax(parts.score))
        if parts.score[pick] > parts.score[-1]:
            for r in sel:
                self.rad[r, j] = ds[pick]
            return True
        return False

    def diagnose(self) -> str:
        """Name the binding constraint of the current (infeasible) state."""
        gain_wired, gain_wireless = self.gains()
        parts = _wsr_core(gain_wired, gain_wireless, self.params)
        if np.any(gain_wired < gain_wireless):
            return "sic-order"
        if np.any(~np.isfinite(parts.beta)):
            return "power-split"
        if parts.tau_min.sum() > 1.0 + _REL_TOL:
            return "time-budget"
        return "wired-qos"


def bcd_optimize(
    kind: ProtocolKind | str,
    ue_positions,
    params: SystemParams,
    *,
    block_order: str = "positions-first",
    tol: float = 1e-6,
    max_iter: int = 50,
    q_grid: int | None = None,
) -> ProtocolSolution:
    """Block-coordinate ascent of the weighted sum rate for one protocol.

    Free scalars are swept one at a time with 1D grid searches (positions
    over their order-preserving windows, radiation over (0, 1]); per-slot
    positions come from `refine_positions_per_slot` instead, re-clustered
    whenever the slot's radiation drifts from the split they were placed
    for. Every candidate is scored by the full objective including the
    power split, decode-order pruning, and the time-allocation gates, so
    the trace is monotone by construction. A sweep that cannot reach a
    feasible configuration raises with the binding constraint's name.
    """
    kind = ProtocolKind(kind) if not isinstance(kind, ProtocolKind) else kind
    consts = derive_constants(params)
    ue = np.atleast_2d(np.asarray(ue_positions, dtype=float))
    if ue.shape[1] == 2:
        ue = np.hstack([ue, np.zeros((ue.shape[0], 1))])
    if ue.ndim != 2 or ue.shape[1] != 3 or ue.shape[0] < 1:
        raise ValueError(f"ue_positions must be (K, 2) or (K, 3), got {ue.shape}")
    if block_order not in ("positions-first", "radiation-first"):
        raise ValueError(f"unknown block_order {block_order!r}")

    q = q_grid or params.Q_grid
    state = _BcdState(kind, ue, params, consts, q)
    struct = state.struct
    pos_blocks = (
        [("pos", j, None) for j in range(params.N)]
        if struct.positions_shared
        else [("refine", 0, k) for k in range(state.n_slots)]
    )
    if struct.radiation_shared:
        rad_blocks = [("rad", j, None) for j in range(params.N)]
    else:
        rad_blocks = [
            ("rad", j, k) for k in range(state.n_slots) for j in range(params.N)
        ]
    if block_order == "positions-first":
        blocks = pos_blocks + rad_blocks
    else:
        blocks = rad_blocks + pos_blocks

    trace = [float(state.evaluate().wsr)]
    iterations = 0
    for sweep in range(max_iter):
        any_move = False
        for what, j, slot in blocks:
            if what == "pos":
                any_move |= state.update_position(j)
            elif what == "refine":
                any_move |= state.update_refine(slot)
            else:
                any_move |= state.update_radiation(j, slot)
        wsr = float(state.evaluate().wsr)
        trace.append(wsr)
        iterations = sweep + 1
        if not np.isfinite(wsr):
            if not any_move:
                break  # infeasible fixed point: nothing left to repair
            continue
        if np.isfinite(trace[-2]) and wsr - trace[-2] <= tol * max(abs(trace[-2]), 1e-12):
            break

    parts = state.evaluate()
    if not np.isfinite(float(parts.wsr)):
        raise InfeasibleError(
            state.diagnose(), f"{kind.value}: no feasible configuration reached"
        )
    gain_wired, gain_wireless = state.gains()
    slots = [
        rates.slot_rates(
            float(gain_wired[k]), float(gain_wireless[k]), float(parts.beta[k]), params
        )
        for k in range(state.n_slots)
    ]
    tau = time_allocation(parts.rate_wired, parts.rate_wireless, params)
    pa_per_slot = []
    for k in range(state.n_slots):
        pa = channel.PaConfig(
            positions=state.pos[k].copy(), radiation=state.rad[k].copy()
        )
        pa.validate(params)
        pa_per_slot.append(pa)
    return ProtocolSolution(
        kind=kind,
        pa_per_slot=pa_per_slot,
        slots=slots,
        tau=tau,
        wsr=float(parts.wsr),
        feasible=True,
        iterations=iterations,
        wsr_trace=np.array(trace),
    )
