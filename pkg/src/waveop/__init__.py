"""waveop: generalized unitary evolution between pure and mixed states.

A density matrix rho is factored as rho = rho_hat rho_hat^dagger and the
square-root operator rho_hat is evolved by the most general linear, local,
probability-conserving extension of the Liouville equation.  In the
N^2-dimensional operator space this is an ordinary Schroedinger equation
with a hermitian generator, so the extended dynamics is unitary while the
purity of rho itself may oscillate.  A standard Lindblad-type master
equation is included as a comparator.
"""

from ._kernels import backend as kernel_backend
from .basis import HermitianBasis, build_basis, from_coherence, inner_product, to_coherence
from .dynamics import (
    EvolutionSpec,
    LindbladSpec,
    Superoperator,
    Trajectory,
    build_superoperator,
    exact_trajectory,
    gauge_transform,
    init_wave_operator,
    lindblad_rhs,
    propagate_exact,
    propagate_lindblad,
    step_integrate,
)
from .linalg import HermitianEigenSystem, commutator, dagger, eig_hermitian, mat_mul
from .observables import (
    ConservationCheck,
    MappedObservable,
    degeneracy_complement,
    density_matrix,
    expectation,
    expectation_from_coherence,
    is_conserved,
    map_observable,
    mapped_subspace_projection,
    purity,
    purity_of_density,
)
from .twolevel import (
    NEUTRON_FLIGHT_TIME,
    NEUTRON_LAMBDA,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ContrastReport,
    TwoLevelParams,
    analytic_wave_operator,
    contrast_comparison,
    dephasing_lindblad_spec,
    initial_state,
    interference_expectation,
    interference_observable,
    two_level_spec,
)

__version__ = "0.1.0"

__all__ = [
    "HermitianBasis",
    "HermitianEigenSystem",
    "EvolutionSpec",
    "LindbladSpec",
    "Superoperator",
    "Trajectory",
    "MappedObservable",
    "ConservationCheck",
    "TwoLevelParams",
    "ContrastReport",
    "build_basis",
    "to_coherence",
    "from_coherence",
    "inner_product",
    "mat_mul",
    "dagger",
    "commutator",
    "eig_hermitian",
    "init_wave_operator",
    "build_superoperator",
    "propagate_exact",
    "exact_trajectory",
    "step_integrate",
    "gauge_transform",
    "lindblad_rhs",
    "propagate_lindblad",
    "density_matrix",
    "expectation",
    "expectation_from_coherence",
    "purity",
    "purity_of_density",
    "map_observable",
    "mapped_subspace_projection",
    "is_conserved",
    "degeneracy_complement",
    "two_level_spec",
    "initial_state",
    "analytic_wave_operator",
    "interference_observable",
    "interference_expectation",
    "contrast_comparison",
    "dephasing_lindblad_spec",
    "kernel_backend",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "NEUTRON_LAMBDA",
    "NEUTRON_FLIGHT_TIME",
    "__version__",
]
