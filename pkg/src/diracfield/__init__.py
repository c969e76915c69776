"""Sector spectra and entanglement dynamics of a confined fermion
coupled to an external two-component field.

The Hamiltonian conserves a sector-label operator, so it splits into
1x1, 3x3 and 4x4 blocks.  This package builds those blocks in one, two
and three dimensions, evaluates every closed-form spectrum the solvable
cases admit, cross-validates them against an independent Jacobi
eigensolver and full-space truncated oracles, and follows the exact
reduced dynamics of the field doublet.
"""

__version__ = "1.0.0"

from .algebra import (
    CartesianOracle3D,
    LadderConvention,
    ModelParams,
    OperatorMatrix,
    ProductBasis,
    build_angular_momentum,
    build_full_hamiltonian,
    build_invariant,
    commutator_norm,
    hermiticity_defect,
    interior_mask,
    invariant_value,
    product_basis,
)
from .dynamics import (
    EntanglementPoint,
    Propagator,
    ReducedDensity,
    StateVector,
    dirac_oscillator_state,
    entanglement_trajectory,
    evolve,
    prepare_initial,
    purity_entropy,
    reduce_isospin,
    state_to_vector,
)
from .harness import (
    RunConfig,
    SweepResult,
    load_config,
    parse_config_text,
    render_table,
    run_evolve,
    run_mode,
    run_spectrum,
    run_sweep,
    run_verify,
    serialize_config,
)
from .sectors import (
    BlockMatrix,
    SectorKey,
    block_1d,
    block_2d,
    block_3d,
    block_3d_base,
    block_singlet,
    block_symm,
    block_triplet,
    sector_spectra_1d,
    singlet_energy,
    total_spin_basis_matrix,
)
from .spectra import (
    DegenerateRadicalError,
    EigenSystem,
    FormulaViolationError,
    QuarticIntermediates,
    cubic_triplet_eigenvalues,
    eigenvalues_alpha0,
    eigenvalues_gauge,
    eigenvalues_massless,
    eigenvectors_alpha0,
    eigenvectors_gauge,
    jacobi_eigensolver,
    quartic_intermediates,
)

__all__ = [name for name in dir() if not name.startswith("_")]
