//! Continuous-time quantum walks of two interacting particles on a 1D
//! periodic lattice.
//!
//! The crate simulates bosons, spinless fermions, and hard-core bosons
//! hopping on a ring of 2L+1 sites with a nearest-neighbour interaction,
//! and derives two-particle correlations in position and momentum space,
//! a strong-coupling effective model for interaction-bound pairs, and an
//! equivalent classical 2D waveguide-array mapping.
//!
//! Module map:
//! - [`lattice`]: site labelling, two-particle basis, momentum grid
//! - [`hamiltonian`]: dense two-particle and single-particle Hamiltonians
//! - [`evolution`]: spectral decomposition and unitary propagation
//! - [`observables`]: pair amplitudes, correlations, densities, front speed
//! - [`effective`]: strong-coupling co-walking model and comparisons
//! - [`waveguide`]: 2D waveguide-array layouts and field propagation

pub mod effective;
pub mod error;
pub mod evolution;
pub mod hamiltonian;
pub mod lattice;
pub mod numfmt;
pub mod observables;
pub mod waveguide;

pub use error::{Error, Result};
pub use lattice::{
    build_basis, initial_pair_state, BasisMap, LatticeSpec, MomentumGrid, RingBoundary, Statistics,
    TwoParticleState,
};

pub use effective::{
    compare_effective, cowalk_projection, effective_hamiltonian, effective_params,
    evolve_effective, is_strong_coupling, CoWalkAmplitudes, EffectiveComparison, EffectiveParams,
};
pub use evolution::{decompose, evolve, single_particle_propagator, SpectralDecomposition};
pub use hamiltonian::{
    build_single_particle_hamiltonian, build_two_particle_hamiltonian, energy_expectation,
    HamiltonianMatrix,
};
pub use observables::{
    density, front_speed, half_width_90, minor_diagonal, momentum_correlation, pair_amplitude,
    position_correlation, CorrelationMatrix, CorrelationSpace, FrontSpeedEstimate, PairAmplitude,
};
pub use waveguide::{
    build_layout, export_layout, initial_field, parse_layout, propagate_field,
    quantum_equivalence_check, Boundary, Coupling, EquivalenceReport, FieldState, WaveguideLayout,
};
