"""Reference Gaussian states and random physical covariance matrices.

All covariance matrices returned here use the ``vacuum=I/2`` convention.
"""

from __future__ import annotations

import numpy as np

from .linalg import CovarianceMatrix, mode_indices

_Z = np.diag([1.0, -1.0])


def vacuum_cm(n_modes: int) -> CovarianceMatrix:
    return CovarianceMatrix(0.5 * np.eye(2 * n_modes))


def thermal_cm(n_bars) -> CovarianceMatrix:
    n_bars = np.atleast_1d(np.asarray(n_bars, dtype=float))
    return CovarianceMatrix(np.diag(np.repeat(n_bars + 0.5, 2)))


def tmsv_cm(r: float) -> CovarianceMatrix:
    """Two-mode squeezed vacuum with squeezing ``r``."""
    c, s = np.cosh(2 * r), np.sinh(2 * r)
    m = np.block([[c * np.eye(2), s * _Z], [s * _Z, c * np.eye(2)]])
    return CovarianceMatrix(0.5 * m)


def direct_sum(*cms: CovarianceMatrix) -> CovarianceMatrix:
    blocks = [cm.matrix for cm in cms]
    size = sum(b.shape[0] for b in blocks)
    out = np.zeros((size, size))
    i = 0
    for b in blocks:
        d = b.shape[0]
        out[i:i + d, i:i + d] = b
        i += d
    return CovarianceMatrix(out)


def passive_symplectic(u: np.ndarray) -> np.ndarray:
    """Orthogonal symplectic matrix of a mode unitary, interleaved ordering."""
    n = u.shape[0]
    xxpp = np.block([[u.real, -u.imag], [u.imag, u.real]])
    perm = [i // 2 + (i % 2) * n for i in range(2 * n)]
    return xxpp[np.ix_(perm, perm)]


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_symplectic(n: int, rng: np.random.Generator, max_squeeze: float = 1.0) -> np.ndarray:
    """Passive - squeeze - passive composition (Bloch-Messiah form)."""
    s = rng.uniform(0.0, max_squeeze, size=n)
    squeeze = np.diag(np.ravel(np.column_stack([np.exp(-s), np.exp(s)])))
    o1 = passive_symplectic(random_unitary(n, rng))
    o2 = passive_symplectic(random_unitary(n, rng))
    return o1 @ squeeze @ o2


def random_pure_cm(n: int, rng: np.random.Generator, max_squeeze: float = 1.0) -> CovarianceMatrix:
    s = random_symplectic(n, rng, max_squeeze)
    return CovarianceMatrix(0.5 * s @ s.T)


def random_mixed_cm(n_modes: int, rng: np.random.Generator, n_ancilla: int | None = None,
                    max_squeeze: float = 1.0) -> CovarianceMatrix:
    """Random physical mixed state: a pure state on ``n_modes + n_ancilla``
    modes with the ancillas traced out."""
    n_anc = n_modes if n_ancilla is None else n_ancilla
    pure = random_pure_cm(n_modes + n_anc, rng, max_squeeze)
    idx = mode_indices(range(n_modes))
    return CovarianceMatrix(pure.matrix[np.ix_(idx, idx)])
