"""Linearized red-sideband optomechanics: two cavities sharing one mirror.

Modes are ordered A (cavity 1), B (cavity 2), C (mechanics). Both cavities
are driven on the red sideband (effective detuning ``-omega_m``) in the
resolved-sideband regime and fed by the two arms of a broadband two-mode
squeezed field. Under the rotating-wave approximation the fluctuations obey
``dU/dt = K U + noise`` and the stationary covariance matrix solves
``K sigma + sigma K^T + N = 0``.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import constants as const
from .errors import ParseError, Unphysical
from .linalg import (
    CovarianceMatrix,
    eigenvalues,
    physicality_margin,
    solve_lyapunov,
)

TWO_PI = 2.0 * math.pi
DEFAULT_N_BAR = 1e-4


class NoiseConvention(enum.Enum):
    """Which optical diffusion blocks to use.

    ``PHYSICAL`` puts ``cosh 2r`` on the diagonal and ``sinh 2r`` on the
    cavity-cavity cross block, which reduces to vacuum noise at ``r = 0``.
    ``PAPER_LITERAL`` swaps the two. That is not a valid diffusion matrix
    for small ``r`` and is kept only for comparison.
    """

    PHYSICAL = "physical"
    PAPER_LITERAL = "paper-literal"

    @classmethod
    def parse(cls, text: str) -> "NoiseConvention":
        key = text.strip().lower().replace("_", "-")
        aliases = {"physical": cls.PHYSICAL, "paper-literal": cls.PAPER_LITERAL,
                   "paperliteral": cls.PAPER_LITERAL}
        try:
            return aliases[key]
        except KeyError:
            raise ValueError(f"unknown noise convention {text!r}") from None


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory inputs, SI units (angular frequencies in rad/s).

    The default mirror mass is 145e-9 kg. The README explains why this is
    used instead of the literal 145 ng.
    """

    l: float = 25e-3
    kappa: float = TWO_PI * 215e3
    omega_c: float = TWO_PI * 5.26e14
    omega_L: float = TWO_PI * 2.82e14
    power_1: float = 0.4
    power_2: float = 0.004
    mu: float = 145e-9
    omega_m: float = TWO_PI * 947e3
    alpha: float = 0.05
    n_bar: float | None = None
    temperature: float | None = None
    r: float = 0.0

    def __post_init__(self):
        for name in ("l", "kappa", "omega_c", "omega_L", "mu", "omega_m", "alpha"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be finite and positive, got {v}")
        for name in ("power_1", "power_2", "r"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v}")
        if self.n_bar is not None and not (math.isfinite(self.n_bar) and self.n_bar >= 0):
            raise ValueError(f"n_bar must be non-negative, got {self.n_bar}")
        if self.temperature is not None and not (
            math.isfinite(self.temperature) and self.temperature >= 0
        ):
            raise ValueError(f"temperature must be non-negative, got {self.temperature}")

    @property
    def thermal_occupation(self) -> float:
        """Mean phonon number; an explicit ``n_bar`` overrides ``temperature``."""
        if self.n_bar is not None:
            if self.temperature is not None:
                warnings.warn("both n_bar and temperature given; using n_bar", stacklevel=2)
            return self.n_bar
        if self.temperature is not None:
            if self.temperature == 0:
                return 0.0
            x = const.HBAR * self.omega_m / (const.K_B * self.temperature)
            return 1.0 / math.expm1(x)
        return DEFAULT_N_BAR

    @property
    def resolved_sideband(self) -> bool:
        return self.kappa / self.omega_m < 1.0

    def with_r(self, r: float) -> "PhysicalParams":
        return replace(self, r=r)


@dataclass(frozen=True)
class DerivedParams:
    eps_1: float
    eps_2: float
    chi: float
    amp_1: float
    amp_2: float
    chibar_1: float
    chibar_2: float
    coop_1: float
    coop_2: float
    gamma_m: float
    quality: float


@dataclass(frozen=True)
class StabilityReport:
    stable: bool
    max_real_part: float


def derive_params(p: PhysicalParams) -> DerivedParams:
    """Drive strengths, couplings and cooperativities at ``Delta' = -omega_m``."""
    if not p.resolved_sideband:
        warnings.warn(
            f"kappa/omega_m = {p.kappa / p.omega_m:.3g} >= 1: "
            "outside the resolved-sideband regime, RWA model not valid",
            stacklevel=2,
        )
    hbar = const.HBAR
    gamma_m = p.alpha * p.kappa
    chi = (p.omega_c / p.l) * math.sqrt(hbar / (p.mu * p.omega_m))
    detuning_norm = math.sqrt(4.0 * p.omega_m**2 + p.kappa**2)
    vals = {}
    for j, power in ((1, p.power_1), (2, p.power_2)):
        eps = math.sqrt(2.0 * p.kappa * power / (hbar * p.omega_L))
        amp = 2.0 * eps / detuning_norm
        chibar = chi * amp
        vals[j] = (eps, amp, chibar, 4.0 * chibar**2 / (gamma_m * p.kappa))
    return DerivedParams(
        eps_1=vals[1][0], eps_2=vals[2][0],
        chi=chi,
        amp_1=vals[1][1], amp_2=vals[2][1],
        chibar_1=vals[1][2], chibar_2=vals[2][2],
        coop_1=vals[1][3], coop_2=vals[2][3],
        gamma_m=gamma_m,
        quality=p.omega_m / gamma_m,
    )


def cooperativity_closed_form(p: PhysicalParams, power: float) -> float:
    """Cooperativity written directly in terms of the laboratory inputs."""
    gamma_m = p.alpha * p.kappa
    num = 8.0 * p.omega_c**2 * power
    den = (gamma_m * p.mu * p.omega_m * p.omega_L * p.l**2
           * ((p.kappa / 2.0) ** 2 + p.omega_m**2))
    return num / den


def build_drift(d: DerivedParams, kappa: float, alpha: float) -> np.ndarray:
    """6x6 drift matrix in the (x_A, y_A, x_B, y_B, x_C, y_C) ordering."""
    if d.coop_1 < 0 or d.coop_2 < 0:
        raise ValueError("cooperativities must be non-negative")
    k = np.zeros((6, 6))
    k[:4, :4] = -0.5 * kappa * np.eye(4)
    k[4:, 4:] = -0.5 * alpha * kappa * np.eye(2)
    g1 = 0.5 * kappa * math.sqrt(alpha * d.coop_1)
    g2 = 0.5 * kappa * math.sqrt(alpha * d.coop_2)
    for q in (0, 1):
        # mirror is pushed by cavity 1 with -g1 and by cavity 2 with +g2
        k[4 + q, 0 + q] = -g1
        k[4 + q, 2 + q] = g2
        k[0 + q, 4 + q] = g1
        k[2 + q, 4 + q] = -g2
    return k


def build_noise(r: float, n_bar: float, kappa: float, alpha: float,
                convention: NoiseConvention = NoiseConvention.PHYSICAL) -> np.ndarray:
    """6x6 diffusion matrix for squeezed optical inputs and a thermal mirror."""
    if r < 0 or n_bar < 0:
        raise ValueError("r and n_bar must be non-negative")
    diag, cross = math.cosh(2 * r), math.sinh(2 * r)
    if convention is NoiseConvention.PAPER_LITERAL:
        diag, cross = cross, diag
    n = np.zeros((6, 6))
    n[0:2, 0:2] = n[2:4, 2:4] = 0.5 * kappa * diag * np.eye(2)
    n[0:2, 2:4] = n[2:4, 0:2] = 0.5 * kappa * cross * np.diag([1.0, -1.0])
    n[4:, 4:] = 0.5 * alpha * kappa * (2 * n_bar + 1) * np.eye(2)
    return n


def build_system(p: PhysicalParams,
                 convention: NoiseConvention = NoiseConvention.PHYSICAL):
    """Return ``(K, N)`` for the given parameters."""
    d = derive_params(p)
    k = build_drift(d, p.kappa, p.alpha)
    n = build_noise(p.r, p.thermal_occupation, p.kappa, p.alpha, convention)
    return k, n


def check_stability(k) -> StabilityReport:
    top = float(np.max(eigenvalues(k).real))
    return StabilityReport(stable=top < 0, max_real_part=top)


def steady_state_cm(p: PhysicalParams,
                    convention: NoiseConvention = NoiseConvention.PHYSICAL,
                    check_physical: bool | None = None) -> CovarianceMatrix:
    """Stationary covariance matrix (``vacuum=I/2``) of modes A, B, C.

    The uncertainty-relation check runs by default only for the physical
    noise convention.

    Raises:
        NotStable: the drift matrix has an eigenvalue with Re >= 0.
        Unphysical: the solution violates ``sigma + i Omega / 2 >= 0``.
    """
    k, n = build_system(p, convention)
    cm = CovarianceMatrix(solve_lyapunov(k, n))
    if check_physical is None:
        check_physical = convention is NoiseConvention.PHYSICAL
    if check_physical:
        margin = physicality_margin(cm)
        if margin < -const.PHYSICALITY_TOL:
            raise Unphysical(f"min eig(sigma + i Omega/2) = {margin:.3g}")
    return cm


# --------------------------------------------------------------------------
# config files
# --------------------------------------------------------------------------

_CONFIG_KEYS = {
    "l": "l", "kappa": "kappa", "omega_c": "omega_c", "omega_L": "omega_L",
    "power_1": "power_1", "power_2": "power_2", "mu": "mu", "omega_m": "omega_m",
    "alpha": "alpha", "n_bar": "n_bar", "T": "temperature", "r": "r",
}


@dataclass(frozen=True)
class Config:
    params: PhysicalParams = field(default_factory=PhysicalParams)
    noise_convention: NoiseConvention = NoiseConvention.PHYSICAL


def parse_config(text: str, path=None) -> Config:
    """Parse flat ``key = value`` text; unspecified keys keep their defaults."""
    values = {}
    convention = NoiseConvention.PHYSICAL
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", path, lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key == "noise_convention":
            try:
                convention = NoiseConvention.parse(value)
            except ValueError as exc:
                raise ParseError(str(exc), path, lineno)
            continue
        if key not in _CONFIG_KEYS:
            raise ParseError(f"unknown key {key!r}", path, lineno)
        try:
            values[_CONFIG_KEYS[key]] = float(value)
        except ValueError:
            raise ParseError(f"{key}: not a number: {value!r}", path, lineno)
    try:
        params = PhysicalParams(**values)
    except ValueError as exc:
        raise ParseError(str(exc), path)
    return Config(params, convention)


def read_config(path) -> Config:
    return parse_config(Path(path).read_text(), path=path)


def format_config(cfg: Config) -> str:
    inverse = {v: k for k, v in _CONFIG_KEYS.items()}
    lines = []
    for f in fields(PhysicalParams):
        v = getattr(cfg.params, f.name)
        if v is not None:
            lines.append(f"{inverse[f.name]} = {v!r}")
    lines.append(f"noise_convention = {cfg.noise_convention.value}")
    return "\n".join(lines) + "\n"
