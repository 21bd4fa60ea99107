"""Dense real-matrix kernel for small Gaussian-state problems.

Quadratures are ordered ``(x_1, y_1, ..., x_n, y_n)`` throughout, so the
symplectic form is the direct sum of ``[[0, 1], [-1, 0]]`` blocks.

All functions are pure and operate on ``numpy`` arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import constants as tol
from .errors import (
    NoConvergence,
    NotHermitian,
    NotPSD,
    NotStable,
    NotSymmetric,
    ParseError,
    SingularSystem,
    SingularXBlock,
    SpectrumNotReal,
    StepTooLarge,
)

VACUUM_HALF = "vacuum=I/2"
VACUUM_UNIT = "vacuum=I"
_VACUUM_VARIANCE = {VACUUM_HALF: 0.5, VACUUM_UNIT: 1.0}


def as_matrix(m, square=True) -> np.ndarray:
    """Validate ``m`` as a finite real 2-D array and return a float copy."""
    a = np.array(m, dtype=float)
    if a.ndim != 2 or a.size == 0:
        raise ValueError(f"expected a non-empty 2-D matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return the ``2n x 2n`` block-diagonal symplectic form."""
    if n_modes < 1:
        raise ValueError("n_modes must be positive")
    return np.kron(np.eye(n_modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def mode_indices(modes) -> list[int]:
    """Quadrature indices ``[2m, 2m+1, ...]`` for the given mode list."""
    return [2 * m + q for m in modes for q in (0, 1)]


@dataclass(frozen=True)
class CovarianceMatrix:
    """A ``2n x 2n`` covariance matrix together with its vacuum normalization.

    ``convention`` is either ``"vacuum=I/2"`` (hbar = 1, the vacuum has
    unit-half variances) or ``"vacuum=I"``.
    """

    matrix: np.ndarray
    convention: str = VACUUM_HALF

    def __post_init__(self):
        a = as_matrix(self.matrix)
        if a.shape[0] % 2:
            raise ValueError("covariance matrix dimension must be even")
        if self.convention not in _VACUUM_VARIANCE:
            raise ValueError(f"unknown convention {self.convention!r}")
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)

    @property
    def n_modes(self) -> int:
        return self.matrix.shape[0] // 2

    @property
    def vacuum_variance(self) -> float:
        return _VACUUM_VARIANCE[self.convention]

    def normalized(self) -> np.ndarray:
        """The matrix rescaled so that the vacuum is the identity."""
        return self.matrix / self.vacuum_variance

    def reduced(self, modes) -> "CovarianceMatrix":
        idx = mode_indices(modes)
        return CovarianceMatrix(self.matrix[np.ix_(idx, idx)], self.convention)


# --------------------------------------------------------------------------
# eigenvalue helpers
# --------------------------------------------------------------------------


def eigenvalues(m) -> np.ndarray:
    """Full (complex) spectrum of a square matrix."""
    a = as_matrix(m)
    try:
        return np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc


def min_eigenvalue_hermitian(m) -> float:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    scale = max(1.0, float(np.max(np.abs(a))))
    if np.max(np.abs(a - a.conj().T)) > tol.HERMITIAN_TOL * scale:
        raise NotHermitian("matrix is not Hermitian")
    try:
        return float(np.linalg.eigvalsh(a)[0])
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc


def _check_symmetric(a: np.ndarray):
    scale = max(1.0, float(np.linalg.norm(a)))
    if np.linalg.norm(a - a.T) > tol.SYMMETRY_TOL * scale:
        raise NotSymmetric("matrix is not symmetric")


def symplectic_eigenvalues(m, n_modes: int | None = None) -> np.ndarray:
    """Symplectic spectrum of a symmetric positive semidefinite matrix.

    Computed from the (doubly degenerate) eigenvalues of ``-(Omega M)^2``.

    Args:
        m: ``2n x 2n`` symmetric PSD matrix.
        n_modes: number of modes; inferred from the shape when omitted.

    Returns:
        array of ``n`` non-negative values in descending order.

    Raises:
        NotSymmetric, NotPSD, SpectrumNotReal
    """
    a = as_matrix(m)
    n = a.shape[0] // 2 if n_modes is None else n_modes
    if a.shape[0] != 2 * n:
        raise ValueError(f"shape {a.shape} does not match {n} modes")
    _check_symmetric(a)
    a = 0.5 * (a + a.T)
    norm = float(np.linalg.norm(a, 2))
    if np.linalg.eigvalsh(a)[0] < -tol.PSD_TOL * norm:
        raise NotPSD("matrix is not positive semidefinite")

    om_a = symplectic_form(n) @ a
    lam = eigenvalues(-om_a @ om_a)
    scale = max(norm * norm, np.finfo(float).tiny)
    if np.max(np.abs(lam.imag)) > tol.SPECTRUM_IMAG_TOL * scale:
        raise SpectrumNotReal("-(Omega M)^2 has complex eigenvalues")
    lam = np.sort(lam.real)[::-1]
    if lam[-1] < -tol.PSD_TOL * scale:
        raise NotPSD("negative squared symplectic eigenvalue")
    lam = np.clip(lam, 0.0, None)
    first, second = lam[0::2], lam[1::2]
    if np.max(np.abs(first - second)) > tol.PAIRING_TOL * scale:
        raise SpectrumNotReal("eigenvalues of -(Omega M)^2 do not pair up")
    return np.sqrt(0.5 * (first + second))


def physicality_margin(cm: CovarianceMatrix) -> float:
    """``min eig(sigma + i v Omega)`` with ``v`` the vacuum variance.

    Non-negative for states allowed by the uncertainty principle.
    """
    om = symplectic_form(cm.n_modes)
    return min_eigenvalue_hermitian(cm.matrix + 1j * cm.vacuum_variance * om)


# --------------------------------------------------------------------------
# Lyapunov equation
# --------------------------------------------------------------------------


def max_real_part(k) -> float:
    return float(np.max(eigenvalues(k).real))


def lyapunov_residual(k, sigma, n) -> float:
    """Relative Frobenius residual of ``K s + s K^T + N = 0``."""
    k, sigma, n = (np.asarray(x, dtype=float) for x in (k, sigma, n))
    res = np.linalg.norm(k @ sigma + sigma @ k.T + n)
    nn = np.linalg.norm(n)
    return float(res / nn) if nn > 0 else float(res)


def solve_lyapunov(k, n) -> np.ndarray:
    """Solve ``K sigma + sigma K^T + N = 0`` for a Hurwitz-stable ``K``.

    The equation is vectorized as ``(K (x) I + I (x) K) vec(sigma) = -vec(N)``
    and solved by dense LU, with one round of iterative refinement if the
    first residual is above tolerance.
    """
    k = as_matrix(k)
    n = as_matrix(n)
    if k.shape != n.shape:
        raise ValueError(f"K {k.shape} and N {n.shape} differ in shape")
    _check_symmetric(n)
    top = max_real_part(k)
    if top >= -tol.STABILITY_EPS:
        raise NotStable(f"drift matrix is not stable (max Re eig = {top:.6g})")

    d = k.shape[0]
    eye = np.eye(d)
    system = np.kron(k, eye) + np.kron(eye, k)
    if np.linalg.cond(system) > tol.KRONECKER_COND_MAX:
        raise SingularSystem("Kronecker system is numerically singular")
    rhs = -n.reshape(-1)
    try:
        x = np.linalg.solve(system, rhs)
        sigma = 0.5 * (x.reshape(d, d) + x.reshape(d, d).T)
        if lyapunov_residual(k, sigma, n) > tol.LYAPUNOV_RTOL:
            resid = rhs - system @ sigma.reshape(-1)
            x = sigma.reshape(-1) + np.linalg.solve(system, resid)
            sigma = 0.5 * (x.reshape(d, d) + x.reshape(d, d).T)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from exc
    if lyapunov_residual(k, sigma, n) > tol.LYAPUNOV_RTOL:
        raise SingularSystem("Lyapunov residual above tolerance after refinement")
    return sigma


def integrate_lyapunov(k, n, t_final: float, dt: float) -> np.ndarray:
    """Integrate ``d sigma/dt = K sigma + sigma K^T + N`` from zero with RK4.

    Fixed steps; the last step is shortened to land exactly on ``t_final``.
    """
    k = as_matrix(k)
    n = as_matrix(n)
    if dt <= 0 or t_final < 0:
        raise ValueError("dt must be positive and t_final non-negative")
    if dt * np.linalg.norm(k, 2) > tol.RK4_MAX_STEP_NORM:
        raise StepTooLarge(
            f"dt * ||K|| = {dt * np.linalg.norm(k, 2):.3g} exceeds {tol.RK4_MAX_STEP_NORM}"
        )
    kt = k.T

    def rhs(s):
        return k @ s + s @ kt + n

    sigma = np.zeros_like(n)
    steps = int(math.floor(t_final / dt))
    for h in [dt] * steps + [t_final - steps * dt]:
        if h <= 0:
            continue
        k1 = rhs(sigma)
        k2 = rhs(sigma + 0.5 * h * k1)
        k3 = rhs(sigma + 0.5 * h * k2)
        k4 = rhs(sigma + h * k3)
        sigma = sigma + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return 0.5 * (sigma + sigma.T)


# --------------------------------------------------------------------------
# Schur complement
# --------------------------------------------------------------------------


def schur_steered(sigma, part) -> np.ndarray:
    """Schur complement of the steering block, ``Y - Z^T X^{-1} Z``.

    ``part`` supplies ``steering_modes`` (X) and ``steered_modes`` (Y).
    Modes in neither party are ignored (traced out).
    """
    s = as_matrix(sigma)
    ix = mode_indices(part.steering_modes)
    iy = mode_indices(part.steered_modes)
    x = s[np.ix_(ix, ix)]
    y = s[np.ix_(iy, iy)]
    z = s[np.ix_(ix, iy)]
    if np.linalg.cond(x) > tol.SCHUR_COND_MAX:
        raise SingularXBlock(f"steering block is singular (cond = {np.linalg.cond(x):.3g})")
    m = y - z.T @ np.linalg.solve(x, z)
    return 0.5 * (m + m.T)


# --------------------------------------------------------------------------
# text format
# --------------------------------------------------------------------------


def format_cm(cm: CovarianceMatrix | np.ndarray) -> str:
    """Serialize a covariance matrix in the plain-text format.

    Line one holds the mode count, followed by one row per line with
    17 significant digits.
    """
    a = cm.matrix if isinstance(cm, CovarianceMatrix) else as_matrix(cm)
    lines = [str(a.shape[0] // 2)]
    lines += [" ".join(format(float(v), ".17g") for v in row) for row in a]
    return "\n".join(lines) + "\n"


def write_cm(cm, path):
    Path(path).write_text(format_cm(cm))


def parse_cm(text: str, path=None, convention: str = VACUUM_HALF) -> CovarianceMatrix:
    """Parse the plain-text covariance-matrix format.

    Blank lines and lines starting with ``#`` are skipped.
    """
    n_modes = None
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n_modes is None:
            try:
                n_modes = int(line)
            except ValueError:
                raise ParseError(f"expected integer mode count, got {line!r}", path, lineno)
            if n_modes < 1:
                raise ParseError("mode count must be positive", path, lineno)
            continue
        if len(rows) == 2 * n_modes:
            raise ParseError("unexpected extra row", path, lineno)
        fields = line.split()
        if len(fields) != 2 * n_modes:
            raise ParseError(
                f"expected {2 * n_modes} values, got {len(fields)}", path, lineno
            )
        try:
            row = [float(f) for f in fields]
        except ValueError as exc:
            raise ParseError(str(exc), path, lineno)
        if not all(math.isfinite(v) for v in row):
            raise ParseError("non-finite entry", path, lineno)
        rows.append(row)
    if n_modes is None:
        raise ParseError("empty file: missing mode count", path)
    if len(rows) != 2 * n_modes:
        raise ParseError(f"expected {2 * n_modes} rows, got {len(rows)}", path)
    return CovarianceMatrix(np.array(rows), convention)


def read_cm(path, convention: str = VACUUM_HALF) -> CovarianceMatrix:
    return parse_cm(Path(path).read_text(), path=path, convention=convention)
