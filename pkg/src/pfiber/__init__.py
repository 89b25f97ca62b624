"""Spectral data of the one-photon-truncated Pauli-Fierz fiber Hamiltonian.

The package evaluates, for total momentum ``p``, the bottom of the continuous
band, the isolated ground-state eigenvalue, its eigenvector, the explicit
resolvent and the effective mass, and cross-checks all of them against a
brute-force discretisation of the operator.
"""

from pfiber.errors import (
    AccuracyWarning,
    ContractError,
    DomainError,
    PoleError,
    SingularError,
    SolverError,
)
from pfiber.model import (
    Momentum,
    ModelParams,
    PhotonMode,
    as_vector,
    coupling_g,
    coupling_vectors,
    default_gamma0,
    diagonal_shift,
    norm_g_sq,
    polarization,
    tilde_l,
    tilde_t,
    z0,
)
from pfiber.kernels import (
    DEFAULT_QUAD,
    KernelTriplet,
    KernelValue,
    QuadratureSpec,
    c_matrix,
    c_from_kernels,
    d1,
    d12,
    d12_edge,
    d2,
    denom,
    kernel_triplet,
)
from pfiber.spectrum import (
    Eigenfunction,
    EffectiveMassResult,
    SpectrumReport,
    dispersion_curve,
    effective_mass,
    effective_mass_fd,
    effective_mass_fd_extrapolated,
    effective_mass_sigma0,
    effective_mass_sigma_limit,
    eigenfunction,
    k_det,
    lemma_dd1_bound,
    no_root_threshold,
    secular_f,
    secular_f_edge,
    solve_ground,
    spectrum_report,
    theorem1_bound,
)
from pfiber.grid import QuadratureGrid, StateVector
from pfiber.oracle import (
    DiscretizedHamiltonian,
    apply_h_minus_z,
    build_discrete_h,
    build_grid,
    c_matrix_bruteforce,
    eigenvalues,
    ground_eigenvalue,
    ground_state,
    residual,
    write_matrix_triplets,
)
from pfiber.resolvent import (
    ReducedSystem,
    apply_resolvent,
    b_lambda,
    grid_coeffs,
    grid_kernels,
    n_vector,
    reduced_system,
    s_vector,
    solve_q,
    u_coeffs,
)

__version__ = "0.1.0"
