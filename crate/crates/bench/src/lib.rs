//! Prebuilt fixtures shared by the criterion benches.

use std::sync::Arc;

use qwalk2_core::{
    build_basis, build_two_particle_hamiltonian, decompose, initial_pair_state, BasisMap,
    HamiltonianMatrix, LatticeSpec, SpectralDecomposition, Statistics, TwoParticleState,
};

pub struct WalkFixture {
    pub spec: LatticeSpec,
    pub basis: Arc<BasisMap>,
    pub h: HamiltonianMatrix,
    pub decomposition: SpectralDecomposition,
    pub psi0: TwoParticleState,
}

/// Pair released on neighbouring sites at the ring centre, fully prepared
/// for propagation so benches can time each stage in isolation.
pub fn walk_fixture(l_max: i32, v: f64, statistics: Statistics) -> WalkFixture {
    let spec = LatticeSpec::new(l_max, 1.0, v, statistics).expect("valid bench lattice");
    let basis = Arc::new(build_basis(&spec));
    let h = build_two_particle_hamiltonian(&spec, &basis).expect("bench Hamiltonian");
    let decomposition = decompose(&h).expect("bench decomposition");
    let psi0 = initial_pair_state(&basis, 0, 1).expect("bench launch state");
    WalkFixture {
        spec,
        basis,
        h,
        decomposition,
        psi0,
    }
}

/// Jt grid matching the CLI default run: 8 samples up to Jt = 4.
pub fn default_times() -> Vec<f64> {
    (1..=8).map(|k| k as f64 * 0.5).collect()
}
