"""Physical constants and numerical tolerances used across the package.

Every threshold lives here so that a change in one place is seen by the
solvers, the steering code and the tests alike.
"""

# CODATA 2018 exact / recommended values
HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K

# Lyapunov solver
STABILITY_EPS = 1e-12  # Re(eig K) must be below -STABILITY_EPS
LYAPUNOV_RTOL = 1e-10  # ||K s + s K^T + N||_F / ||N||_F
KRONECKER_COND_MAX = 1e14
RK4_MAX_STEP_NORM = 0.1  # dt * ||K||_2

# symplectic spectra
PSD_TOL = 1e-9  # relative to ||M||_2
SPECTRUM_IMAG_TOL = 1e-8  # relative to ||M||_2 ** 2
PAIRING_TOL = 1e-8  # relative to ||M||_2 ** 2
HERMITIAN_TOL = 1e-12
SYMMETRY_TOL = 1e-10  # relative to max(1, ||M||)

# Schur complement
SCHUR_COND_MAX = 1e12

# steering
EPS_ZERO = 1e-9  # nats; anything at or below counts as "no steering"
PHYSICALITY_TOL = 1e-9  # allowed negativity of min eig(s + i Omega / 2)
