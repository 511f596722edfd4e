"""Exact cavity-QED simulation of superpositions and entanglement of
displaced thermal fields.

The heavy lifting lives in the compiled ``_core`` module; this package
re-exports its surface.
"""

from ._core import (  # noqa: F401
    __version__,
    ProgramParseError,
    SeriesError,
    ToleranceError,
    TruncationError,
    analytic_cat_joint_state,
    branch_overlap,
    collapse_time,
    conditional_displacement_hamiltonian,
    contrast_reduction_perturbative,
    displaced_frame_hamiltonian,
    displaced_hamiltonian,
    displaced_thermal_fock_coeff,
    displaced_thermal_state,
    displacement_operator,
    echo_run,
    evolve,
    fidelity,
    fringe_contrast,
    hermitian_eig,
    jcm_hamiltonian,
    kron,
    lindblad_evolve,
    negativity,
    partial_trace,
    partial_transpose,
    phase_kick,
    rabi_probability_analytic,
    rabi_probability_exact,
    run_program,
    run_program_file,
    rwa_hamiltonian,
    sweep_program,
    thermal_occupation_from_temperature,
    thermal_state,
    trace_distance,
    truncation_for,
    two_mode_analytic_state,
    two_mode_hamiltonian,
    two_mode_rabi_analytic,
    unitary_from_hamiltonian,
    validate_program,
    wigner,
    wigner_auto,
)
