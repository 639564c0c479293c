"""Propagation model for a pinched waveguide with a coupled termination.

Geometry: the waveguide runs along x at height `d` (y = 0, z = d), fed at
x = psi0_x and terminated at x = psi0_x + D_x where a coupler hands the
residual guided signal to the wired user. Pinching antennas (PAs) sit on the
guide at configurable x positions; each one radiates a fraction delta_n of
the power still guided when the signal reaches it. Wireless users live on
the ground plane z = 0.

Amplitude conventions:
  * in-waveguide segment of length L: magnitude 10^(-kappa*L/20)
    (= e^(-alpha*L)), phase -2*pi/lam_g * L;
  * free-space line-of-sight link of length r: magnitude sqrt(eta)/r,
    phase -k0*r.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometryError, InvalidParamsError
from .params import DerivedConstants, SystemParams

MIN_DISTANCE = 1e-9  # [m] free-space links shorter than this are rejected

# spacing checks allow this much slack so grid-rounded layouts still validate
_SPACING_TOL = 1e-9


@dataclass(frozen=True)
class PaConfig:
    """Positions (x coordinates, ascending) and radiation fractions of the PAs."""

    positions: np.ndarray  # shape (N,), strictly increasing, inside the span
    radiation: np.ndarray  # shape (N,), each in [0, 1]

    def n_antennas(self) -> int:
        return len(self.positions)

    def validate(self, params: SystemParams) -> None:
        """Raise InvalidParamsError naming the violated layout constraint."""
        pos = np.asarray(self.positions, dtype=float)
        rad = np.asarray(self.radiation, dtype=float)
        if pos.ndim != 1 or rad.shape != pos.shape:
            raise InvalidParamsError(
                "positions and radiation must be 1D arrays of equal length"
            )
        lo, hi = params.psi0_x, params.psi0_x + params.D_x
        if np.any(pos < lo - _SPACING_TOL) or np.any(pos > hi + _SPACING_TOL):
            raise InvalidParamsError(
                f"PA positions must lie within [{lo:.6g}, {hi:.6g}]"
            )
        if len(pos) > 1:
            gaps = np.diff(pos)
            if np.any(gaps <= 0):
                raise InvalidParamsError("PA positions must be strictly increasing")
            floor = params.spacing_floor()
            if np.any(gaps < floor - _SPACING_TOL):
                raise InvalidParamsError(
                    f"adjacent PA spacing {gaps.min():.6g} m is below the "
                    f"floor {floor:.6g} m"
                )
        if np.any(rad < 0.0) or np.any(rad > 1.0):
            raise InvalidParamsError("radiation fractions must lie in [0, 1]")


@dataclass(frozen=True)
class EffectiveChannel:
    """End-to-end complex coefficient and its power gain."""

    coeff: complex
    gain: float


def waveguide_coeff(x_from, x_to, params: SystemParams, consts: DerivedConstants):
    """In-waveguide amplitude coefficient for travel from x_from to x_to.

    Accepts scalars or broadcastable arrays; x_to must be >= x_from.
    """
    dist = np.asarray(x_to, dtype=float) - np.asarray(x_from, dtype=float)
    if np.any(dist < 0):
        raise ValueError("waveguide travel distance must be nonnegative")
    mag = np.exp(-consts.alpha * dist)
    phase = -(2.0 * np.pi / consts.lam_g) * dist
    out = mag * np.exp(1j * phase)
    return out if out.ndim else complex(out)


def freespace_coeff(ue_pos, pa_pos, consts: DerivedConstants):
    """Line-of-sight amplitude coefficient between two 3D points.

    Accepts (..., 3)-shaped arrays on either side; broadcasts.
    """
    diff = np.asarray(ue_pos, dtype=float) - np.asarray(pa_pos, dtype=float)
    dist = np.sqrt(np.sum(diff * diff, axis=-1))
    if np.any(dist < MIN_DISTANCE):
        raise DegenerateGeometryError(
            f"free-space distance {np.min(dist):.3e} m is below "
            f"{MIN_DISTANCE:.0e} m"
        )
    out = (np.sqrt(consts.eta) / dist) * np.exp(-1j * consts.k0 * dist)
    return out if out.ndim else complex(out)


def ue_point(ue_pos) -> np.ndarray:
    """Normalize a user position to a 3D point; 2D inputs sit on the ground."""
    ue = np.asarray(ue_pos, dtype=float).ravel()
    if ue.size == 2:
        return np.append(ue, 0.0)
    if ue.size == 3:
        return ue
    raise InvalidParamsError(f"user position needs 2 or 3 coordinates, got {ue.size}")


def pa_points(positions, params: SystemParams) -> np.ndarray:
    """Lift PA x coordinates to 3D points on the guide (y = 0, z = d)."""
    pos = np.atleast_1d(np.asarray(positions, dtype=float))
    pts = np.zeros(pos.shape + (3,))
    pts[..., 0] = pos
    pts[..., 2] = params.d
    return pts


def radiation_weights(radiation) -> np.ndarray:
    """Per-PA amplitude weights sqrt(delta_n * prod_{m<n}(1 - delta_m)).

    The cascade: PA n radiates a fraction delta_n of the power still guided
    after the n-1 upstream PAs took their shares.
    """
    rad = np.asarray(radiation, dtype=float)
    residual_before = np.concatenate(([1.0], np.cumprod(1.0 - rad)[:-1]))
    return np.sqrt(rad * residual_before)


def effective_wireless(
    ue_pos,
    pa: PaConfig,
    params: SystemParams,
    consts: DerivedConstants,
) -> EffectiveChannel:
    """Effective channel from the feed to a wireless user via all PAs.

    Coherent sum over antennas of (free-space link) * (guided segment from
    the feed) * (amplitude weight of the radiation cascade).
    """
    ue = ue_point(ue_pos)
    guided = waveguide_coeff(params.psi0_x, pa.positions, params, consts)
    radiated = freespace_coeff(ue, pa_points(pa.positions, params), consts)
    coeff = complex(np.sum(radiated * guided * radiation_weights(pa.radiation)))
    return EffectiveChannel(coeff=coeff, gain=abs(coeff) ** 2)


def effective_wired(
    pa: PaConfig,
    params: SystemParams,
    consts: DerivedConstants,
) -> EffectiveChannel:
    """Effective channel from the feed to the wired user at the termination.

    The guided signal crosses the full span D_x, loses sqrt(1 - delta_n) in
    amplitude at each PA, and couples out with efficiency kappa_c. Only the
    span length matters; the wired drop's own geometry does not enter.
    """
    guided = waveguide_coeff(params.psi0_x, params.psi0_x + params.D_x, params, consts)
    residual = float(np.sqrt(np.prod(1.0 - np.asarray(pa.radiation, dtype=float))))
    coeff = params.kappa_c * guided * residual
    return EffectiveChannel(coeff=complex(coeff), gain=abs(coeff) ** 2)
