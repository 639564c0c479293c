"""System parameters, derived constants, and config-file handling.

All powers are linear watts internally; dBm appears only at the config-file
boundary via an explicit unit suffix. Rates everywhere are spectral
efficiencies in bit/s/Hz; the bandwidth field is carried as metadata only.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

from .errors import ConfigError, InvalidParamsError

SPEED_OF_LIGHT = 299792458.0  # [m/s]


def dbm_to_watts(p_dbm: float) -> float:
    """Convert a power level from dBm to linear watts."""
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_watts: float) -> float:
    """Convert a power level from linear watts to dBm."""
    if p_watts <= 0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_watts) + 30.0


@dataclass(frozen=True)
class SystemParams:
    """Static description of one deployment.

    Defaults reproduce the reference multiuser setup: a 100 m waveguide at
    3 m height over a 100 x 100 m service region, 28 GHz carrier, N=8
    pinching antennas, K=4 wireless users plus the wired user at the
    termination. Two-user studies override N=K=1 and equal weights (see
    `two_user_defaults`).
    """

    f_c: float = 28e9        # carrier frequency [Hz]
    kappa: float = 0.08      # in-waveguide attenuation [dB/m]
    n_eff: float = 1.4       # effective refractive index of the guide
    kappa_c: float = 0.84    # amplitude coupling efficiency of the termination coupler
    P_max: float = 0.1       # transmit power budget [W] (20 dBm)
    sigma2: float = 1e-12    # receiver noise power [W] (-90 dBm)
    d: float = 3.0           # waveguide height above the user plane [m]
    D_x: float = 100.0       # waveguide span along x [m]
    D_y: float = 100.0       # service-region depth along y [m]
    psi0_x: float = 0.0      # feed-point x coordinate [m]
    N: int = 8               # number of pinching antennas
    K: int = 4               # number of wireless users (one TDMA slot each)
    w0: float = 5.0 / 12.0   # rate weight of the wired user
    w_k: float = 7.0 / 12.0  # rate weight of each wireless user
    R0_min: float = 1.0      # wired QoS floor [bit/s/Hz]
    R1_min: float = 1.0      # wireless QoS floor [bit/s/Hz]
    Q_grid: int = 10_000     # points per 1D search grid
    delta_min_spacing: float | None = None  # PA spacing floor [m]; None -> lambda/2
    bandwidth: float = 180e6  # system bandwidth [Hz]; metadata only
    n_trials: int = 100      # Monte Carlo trials per sweep point
    rng_seed: int = 20260814  # master seed for scenario generation

    def spacing_floor(self) -> float:
        """Minimum allowed spacing between adjacent antennas [m]."""
        if self.delta_min_spacing is not None:
            return self.delta_min_spacing
        return SPEED_OF_LIGHT / self.f_c / 2.0

    def validate(self) -> None:
        """Raise InvalidParamsError naming every field out of range."""
        problems: list[str] = []
        if not self.f_c > 0:
            problems.append(f"f_c must be > 0 (got {self.f_c})")
        if self.kappa < 0:
            problems.append(f"kappa must be >= 0 (got {self.kappa})")
        if self.n_eff < 1:
            problems.append(f"n_eff must be >= 1 (got {self.n_eff})")
        if not 0 < self.kappa_c <= 1:
            problems.append(f"kappa_c must be in (0, 1] (got {self.kappa_c})")
        if not self.P_max > 0:
            problems.append(f"P_max must be > 0 (got {self.P_max})")
        if not self.sigma2 > 0:
            problems.append(f"sigma2 must be > 0 (got {self.sigma2})")
        if not self.d >= 0:
            problems.append(f"d must be >= 0 (got {self.d})")
        if not self.D_x > 0:
            problems.append(f"D_x must be > 0 (got {self.D_x})")
        if not self.D_y > 0:
            problems.append(f"D_y must be > 0 (got {self.D_y})")
        if self.N < 1:
            problems.append(f"N must be >= 1 (got {self.N})")
        if self.K < 1:
            problems.append(f"K must be >= 1 (got {self.K})")
        if self.w0 < 0 or self.w_k < 0:
            problems.append(f"w0 and w_k must be >= 0 (got {self.w0}, {self.w_k})")
        if self.w0 == 0 and self.w_k == 0:
            problems.append("w0 and w_k must not both be zero")
        if self.R0_min < 0:
            problems.append(f"R0_min must be >= 0 (got {self.R0_min})")
        if self.R1_min < 0:
            problems.append(f"R1_min must be >= 0 (got {self.R1_min})")
        if self.Q_grid < 2:
            problems.append(f"Q_grid must be >= 2 (got {self.Q_grid})")
        if self.n_trials < 1:
            problems.append(f"n_trials must be >= 1 (got {self.n_trials})")
        if self.delta_min_spacing is not None and self.delta_min_spacing < 0:
            problems.append(
                f"delta_min_spacing must be >= 0 (got {self.delta_min_spacing})"
            )
        if self.f_c > 0 and self.D_x > 0 and self.N >= 1:
            # spacing constraint only checkable once the floor is resolvable
            floor = self.spacing_floor()
            if (self.N - 1) * floor > self.D_x:
                problems.append(
                    f"(N-1)*delta_min_spacing = {(self.N - 1) * floor:.6g} exceeds "
                    f"D_x = {self.D_x:.6g}; fewer antennas or a shorter floor needed"
                )
        if problems:
            raise InvalidParamsError("; ".join(problems))


@dataclass(frozen=True)
class DerivedConstants:
    """Quantities computed once from SystemParams and reused everywhere."""

    lam: float     # free-space wavelength [m]
    lam_g: float   # guided wavelength [m]
    alpha: float   # amplitude attenuation constant [1/m], kappa*ln(10)/20
    eta: float     # free-space path-gain scale [m^2], c^2/(16*pi^2*f_c^2)
    k0: float      # free-space wavenumber [rad/m]


def derive_constants(params: SystemParams) -> DerivedConstants:
    """Validate params and compute the derived constants."""
    params.validate()
    lam = SPEED_OF_LIGHT / params.f_c
    return DerivedConstants(
        lam=lam,
        lam_g=lam / params.n_eff,
        alpha=params.kappa * math.log(10.0) / 20.0,
        eta=SPEED_OF_LIGHT**2 / (16.0 * math.pi**2 * params.f_c**2),
        k0=2.0 * math.pi / lam,
    )


def two_user_defaults() -> SystemParams:
    """Reference single-antenna setup: one wireless user, equal weights."""
    return replace(SystemParams(), N=1, K=1, w0=1.0, w_k=1.0)


# ---------------------------------------------------------------------------
# Config files: plain "key = value" lines, '#' comments. Power fields accept
# an explicit dBm suffix ("P_max = 20 dBm"); all other values are plain
# numbers in SI units. Unknown keys are rejected by name.
# ---------------------------------------------------------------------------

_INT_FIELDS = {"N", "K", "Q_grid", "n_trials", "rng_seed"}
_DBM_FIELDS = {"P_max", "sigma2"}
_FIELD_NAMES = {f.name for f in fields(SystemParams)}


def _parse_value(key: str, raw: str) -> float | int | None:
    text = raw.strip()
    parts = text.split()
    if len(parts) == 2 and parts[1].lower() == "dbm":
        if key not in _DBM_FIELDS:
            raise ConfigError(f"field '{key}' does not accept a dBm value")
        try:
            return dbm_to_watts(float(parts[0]))
        except ValueError as exc:
            raise ConfigError(f"bad dBm value for '{key}': {raw!r}") from exc
    if len(parts) != 1:
        raise ConfigError(f"bad value for '{key}': {raw!r}")
    if text.lower() == "none":
        return None
    try:
        if key in _INT_FIELDS:
            return int(text)
        return float(text)
    except ValueError as exc:
        raise ConfigError(f"bad value for '{key}': {raw!r}") from exc


def load_config(path: str, base: SystemParams | None = None) -> SystemParams:
    """Read a key-value config file and overlay it on `base` (or defaults)."""
    overrides: dict[str, float | int | None] = {}
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    for lineno, line in enumerate(lines, start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_NAMES:
            raise ConfigError(f"{path}:{lineno}: unknown parameter '{key}'")
        overrides[key] = _parse_value(key, raw)
    params = replace(base if base is not None else SystemParams(), **overrides)
    params.validate()
    return params


def config_snapshot(params: SystemParams) -> dict:
    """Plain-dict view of the params, suitable for JSON run manifests."""
    return asdict(params)
