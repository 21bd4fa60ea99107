"""Gaussian EPR steering between parties of a multimode Gaussian state.

The steerability of party Y by party X is

    G(X -> Y) = max(0, -sum_{nu_j < 1} ln nu_j)

where ``nu_j`` are the symplectic eigenvalues of the Schur complement of the
X block, in units where the vacuum covariance is the identity. Values are in
nats.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .constants import EPS_ZERO, PHYSICALITY_TOL
from .errors import Unphysical
from .linalg import (
    VACUUM_HALF,
    CovarianceMatrix,
    physicality_margin,
    schur_steered,
    symplectic_eigenvalues,
)

MODE_LETTERS = "abc"


@dataclass(frozen=True)
class Partition:
    """Steering party X (``steering_modes``) and steered party Y."""

    steering_modes: tuple
    steered_modes: tuple

    def __post_init__(self):
        x = tuple(int(m) for m in self.steering_modes)
        y = tuple(int(m) for m in self.steered_modes)
        if not x or not y:
            raise ValueError("both parties must be non-empty")
        if len(set(x)) != len(x) or len(set(y)) != len(y):
            raise ValueError("repeated mode index in a party")
        if set(x) & set(y):
            raise ValueError(f"parties overlap: {sorted(set(x) & set(y))}")
        if min(x + y) < 0:
            raise ValueError("mode indices must be non-negative")
        object.__setattr__(self, "steering_modes", x)
        object.__setattr__(self, "steered_modes", y)

    def validate(self, n_modes: int):
        bad = [m for m in self.steering_modes + self.steered_modes if m >= n_modes]
        if bad:
            raise ValueError(f"mode indices {bad} out of range for {n_modes} modes")

    def swapped(self) -> "Partition":
        return Partition(self.steered_modes, self.steering_modes)

    @property
    def name(self) -> str:
        """Lower-case label such as ``ab_c`` (valid for up to 26 modes)."""
        letters = "abcdefghijklmnopqrstuvwxyz"
        return ("".join(letters[m] for m in self.steering_modes) + "_"
                + "".join(letters[m] for m in self.steered_modes))

    @classmethod
    def from_name(cls, name: str) -> "Partition":
        """Inverse of :attr:`name`, e.g. ``"ab_c"`` -> ``Partition((0, 1), (2,))``."""
        try:
            x, y = name.lower().split("_")
        except ValueError:
            raise ValueError(f"bad partition name {name!r}") from None
        idx = lambda s: tuple(ord(ch) - ord("a") for ch in s)  # noqa: E731
        return cls(idx(x), idx(y))


@dataclass(frozen=True)
class SteeringValue:
    value: float
    direction: Partition
    nu_bar: tuple

    @staticmethod
    def from_spectrum(nu_bar) -> float:
        return max(0.0, -sum(math.log(v) for v in nu_bar if v < 1.0))


class SteeringClass(enum.Enum):
    TWO_WAY = "TwoWay"
    ONE_WAY_X_TO_Y = "OneWayXtoY"
    ONE_WAY_Y_TO_X = "OneWayYtoX"
    NO_WAY = "NoWay"

    @property
    def is_one_way(self) -> bool:
        return self in (SteeringClass.ONE_WAY_X_TO_Y, SteeringClass.ONE_WAY_Y_TO_X)


def _as_cm(sigma) -> CovarianceMatrix:
    if isinstance(sigma, CovarianceMatrix):
        return sigma
    return CovarianceMatrix(np.asarray(sigma, dtype=float), VACUUM_HALF)


def gaussian_steering(sigma, part: Partition, check_physical: bool = True) -> SteeringValue:
    """Steerability of ``part.steered_modes`` by ``part.steering_modes``.

    ``sigma`` is a :class:`CovarianceMatrix` or a bare array in the
    ``vacuum=I/2`` convention. Modes in neither party are traced out.
    """
    cm = _as_cm(sigma)
    part.validate(cm.n_modes)
    if check_physical:
        sub = cm.reduced(part.steering_modes + part.steered_modes)
        margin = physicality_margin(sub) * (0.5 / cm.vacuum_variance)
        if margin < -PHYSICALITY_TOL:
            raise Unphysical(f"min eig(sigma + i Omega/2) = {margin:.3g}")
    m = schur_steered(cm.normalized(), part)
    nu = symplectic_eigenvalues(m, len(part.steered_modes))
    if np.any(nu <= 0):
        raise Unphysical("zero symplectic eigenvalue in the steered Schur complement")
    nu_bar = tuple(float(v) for v in nu)
    return SteeringValue(SteeringValue.from_spectrum(nu_bar), part, nu_bar)


def one_vs_one_partitions(n_modes: int = 3):
    return [Partition((i,), (j,)) for i in range(n_modes) for j in range(n_modes) if i != j]


def directed_partitions():
    """The twelve tripartite directions, in sweep-column order."""
    names = ["a_b", "b_a", "a_c", "c_a", "b_c", "c_b",
             "ab_c", "c_ab", "ac_b", "b_ac", "bc_a", "a_bc"]
    return {name: Partition.from_name(name) for name in names}


def steering_matrix(sigma, check_physical: bool = True) -> dict:
    """All twelve directed steering values of a three-mode state, keyed by
    partition name (``"a_b"``, ``"ab_c"``, ...)."""
    cm = _as_cm(sigma)
    if cm.n_modes != 3:
        raise ValueError(f"expected a 3-mode state, got {cm.n_modes} modes")
    return {name: gaussian_steering(cm, part, check_physical).value
            for name, part in directed_partitions().items()}


@dataclass(frozen=True)
class MonogamyReport:
    values: dict
    residual_collective_to: dict
    residual_to_collective: dict
    genuine_tripartite: bool

    @property
    def violations(self) -> list:
        out = [f"({k})" for k, v in self.residual_collective_to.items() if v < -EPS_ZERO]
        out += [f"{k}->" for k, v in self.residual_to_collective.items() if v < -EPS_ZERO]
        return out


def residuals_from_values(g: dict):
    """Signed monogamy residuals for each single-mode party ``k``.

    ``G((ij)->k) - G(i->k) - G(j->k)`` and ``G(k->(ij)) - G(k->i) - G(k->j)``,
    evaluated left to right so they can be recomputed bit-for-bit.
    """
    col, dist = {}, {}
    for k in MODE_LETTERS:
        i, j = (m for m in MODE_LETTERS if m != k)
        col[k] = g[f"{i}{j}_{k}"] - g[f"{i}_{k}"] - g[f"{j}_{k}"]
        dist[k] = g[f"{k}_{i}{j}"] - g[f"{k}_{i}"] - g[f"{k}_{j}"]
    return col, dist


def genuine_from_values(g: dict) -> bool:
    """All six collective values (two modes vs. the third) are positive."""
    collective = ["bc_a", "a_bc", "ac_b", "b_ac", "ab_c", "c_ab"]
    return all(g[name] > EPS_ZERO for name in collective)


def monogamy_report(sigma, check_physical: bool = True) -> MonogamyReport:
    g = steering_matrix(sigma, check_physical)
    col, dist = residuals_from_values(g)
    return MonogamyReport(g, col, dist, genuine_from_values(g))


def monogamy_residuals(sigma, check_physical: bool = True):
    """Residuals of both monogamy inequalities for an ``m``-mode state in
    which every party is one mode. Returns two lists indexed by mode."""
    cm = _as_cm(sigma)
    m = cm.n_modes
    if m < 2:
        raise ValueError("need at least two modes")

    def g(x, y):
        return gaussian_steering(cm, Partition(x, y), check_physical).value

    to_k, from_k = [], []
    for k in range(m):
        rest = tuple(j for j in range(m) if j != k)
        to_k.append(g(rest, (k,)) - sum(g((j,), (k,)) for j in rest))
        from_k.append(g((k,), rest) - sum(g((k,), (j,)) for j in rest))
    return to_k, from_k


def joint_exclusion_check(sigma, check_physical: bool = True) -> dict:
    """For each mode ``k``: True iff at most one other single mode steers it.

    Keys are mode letters for three modes and indices otherwise.
    """
    cm = _as_cm(sigma)
    m = cm.n_modes
    out = {}
    for k in range(m):
        vals = [gaussian_steering(cm, Partition((j,), (k,)), check_physical).value
                for j in range(m) if j != k]
        ok = all(min(a, b) <= EPS_ZERO for a, b in combinations(vals, 2))
        out[MODE_LETTERS[k] if m == 3 else k] = ok
    return out


def classify_values(g_xy: float, g_yx: float) -> SteeringClass:
    fwd, back = g_xy > EPS_ZERO, g_yx > EPS_ZERO
    if fwd and back:
        return SteeringClass.TWO_WAY
    if fwd:
        return SteeringClass.ONE_WAY_X_TO_Y
    if back:
        return SteeringClass.ONE_WAY_Y_TO_X
    return SteeringClass.NO_WAY


def classify(sigma, part: Partition, check_physical: bool = True) -> SteeringClass:
    g_xy = gaussian_steering(sigma, part, check_physical).value
    g_yx = gaussian_steering(sigma, part.swapped(), check_physical).value
    return classify_values(g_xy, g_yx)
