//! Two-particle observables, all routed through the pair amplitude.
//!
//! Phi(l, m) = <0| a_l a_m |psi> carries the exchange statistics exactly
//! once: it is symmetric for bosons (with Phi(l,l) = sqrt(2) C_{l,l}),
//! antisymmetric for fermions, and symmetric with a vanishing diagonal for
//! hard-core bosons. Position correlations are Gamma_qr = |Phi(q,r)|^2 and
//! momentum correlations come from the unitary 2D transform of Phi, so the
//! total mass in either space is sum Gamma = 2 (ordered pairs counted both
//! ways).
//!
//! Fermi sign convention: for the canonical amplitude C_{l,m} with l < m,
//! Phi(m, l) = +C_{l,m} and Phi(l, m) = -C_{l,m}. Both walkers released
//! from (0, 1) therefore give Phi(1, 0) = +1, matching
//! <0| a_1 a_0 a+_0 a+_1 |0> = 1.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{Statistics, TwoParticleState};

/// Pair amplitude Phi over ordered site pairs, storage offset l+L per axis.
#[derive(Clone, Debug)]
pub struct PairAmplitude {
    pub phi: DMatrix<Complex64>,
    pub l_max: i32,
    pub statistics: Statistics,
    pub time: f64,
}

impl PairAmplitude {
    pub fn offset(&self, l: i32) -> usize {
        (l + self.l_max) as usize
    }

    pub fn at(&self, l: i32, m: i32) -> Complex64 {
        self.phi[(self.offset(l), self.offset(m))]
    }

    /// Total mass sum |Phi|^2; 2 for a normalized two-particle state.
    pub fn mass(&self) -> f64 {
        self.phi.iter().map(|z| z.norm_sqr()).sum()
    }
}

/// Which space a correlation matrix lives in. Position rows/columns are site
/// labels q, r = -L..L; momentum rows/columns are mode labels alpha, beta =
/// -L..L with p_alpha = 2 pi alpha / L_t.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CorrelationSpace {
    Position,
    Momentum,
}

/// Two-particle correlation Gamma = |Phi|^2 in position or momentum space.
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    pub gamma: DMatrix<f64>,
    pub l_max: i32,
    pub space: CorrelationSpace,
    pub statistics: Statistics,
    pub time: f64,
}

impl CorrelationMatrix {
    pub fn offset(&self, label: i32) -> usize {
        (label + self.l_max) as usize
    }

    pub fn at(&self, a: i32, b: i32) -> f64 {
        self.gamma[(self.offset(a), self.offset(b))]
    }

    pub fn mass(&self) -> f64 {
        self.gamma.iter().sum()
    }
}

/// Builds Phi(l, m) = <0| a_l a_m |psi> from the basis amplitudes.
pub fn pair_amplitude(state: &TwoParticleState) -> PairAmplitude {
    let basis = &state.basis;
    let n = basis.total_sites();
    let l_max = basis.l_max;
    let off = |l: i32| (l + l_max) as usize;
    let mut phi = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (i, &(a, b)) in basis.pairs.iter().enumerate() {
        let c = state.amplitudes[i];
        match basis.statistics {
            Statistics::Bose => {
                if a == b {
                    phi[(off(a), off(a))] = c * std::f64::consts::SQRT_2;
                } else {
                    phi[(off(a), off(b))] = c;
                    phi[(off(b), off(a))] = c;
                }
            }
            Statistics::Fermi => {
                phi[(off(b), off(a))] = c;
                phi[(off(a), off(b))] = -c;
            }
            Statistics::HardCoreBose => {
                phi[(off(a), off(b))] = c;
                phi[(off(b), off(a))] = c;
            }
        }
    }
    PairAmplitude {
        phi,
        l_max,
        statistics: basis.statistics,
        time: state.time,
    }
}

/// Gamma_qr = |Phi(q, r)|^2.
pub fn position_correlation(state: &TwoParticleState) -> CorrelationMatrix {
    let phi = pair_amplitude(state);
    CorrelationMatrix {
        gamma: phi.phi.map(|z| z.norm_sqr()),
        l_max: phi.l_max,
        space: CorrelationSpace::Position,
        statistics: phi.statistics,
        time: phi.time,
    }
}

/// Gamma_{alpha,beta} = |Phi~(alpha, beta)|^2 with the unitary transform
/// Phi~ = (1/L_t) sum_{l,m} exp(i p_alpha l) exp(i p_beta m) Phi(l, m).
pub fn momentum_correlation(state: &TwoParticleState) -> CorrelationMatrix {
    let phi = pair_amplitude(state);
    let n = state.basis.total_sites();
    let l_max = phi.l_max;
    let grid = crate::lattice::MomentumGrid::new(l_max);
    let norm = 1.0 / (n as f64).sqrt();
    let u = DMatrix::from_fn(n, n, |ai, li| {
        let p = grid.p_alpha[ai];
        let l = (li as i32) - l_max;
        Complex64::new(0.0, p * l as f64).exp() * norm
    });
    let phi_tilde = &u * &phi.phi * u.transpose();
    CorrelationMatrix {
        gamma: phi_tilde.map(|z| z.norm_sqr()),
        l_max,
        space: CorrelationSpace::Momentum,
        statistics: phi.statistics,
        time: phi.time,
    }
}

/// Site densities n_q = <n_q>, summing to the particle number 2.
pub fn density(state: &TwoParticleState) -> DVector<f64> {
    let basis = &state.basis;
    let l_max = basis.l_max;
    let mut n = DVector::zeros(basis.total_sites());
    for (i, &(a, b)) in basis.pairs.iter().enumerate() {
        let w = state.amplitudes[i].norm_sqr();
        if a == b {
            n[(a + l_max) as usize] += 2.0 * w;
        } else {
            n[(a + l_max) as usize] += w;
            n[(b + l_max) as usize] += w;
        }
    }
    n
}

/// Nearest-neighbour correlation trace Gamma_{q, q+1} for q = -L..L, the
/// q = L entry wrapping to the pair (L, -L).
pub fn minor_diagonal(state: &TwoParticleState) -> DVector<f64> {
    let phi = pair_amplitude(state);
    let l_max = phi.l_max;
    DVector::from_fn(state.basis.total_sites(), |qi, _| {
        let q = qi as i32 - l_max;
        let r = if q == l_max { -l_max } else { q + 1 };
        phi.at(q, r).norm_sqr()
    })
}

/// Interpolated 90%-mass half-width of a distribution over sites -L..L:
/// the (fractional) radius q at which the cumulative mass of [-q, q]
/// crosses 90% of the total. Zero when the centre cell already holds 90%.
pub fn half_width_90(values: &DVector<f64>, l_max: i32) -> f64 {
    let off = |l: i32| (l + l_max) as usize;
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return 0.0;
    }
    let threshold = 0.9 * total;
    let mut cum = values[off(0)];
    if cum >= threshold {
        return 0.0;
    }
    for k in 1..=l_max {
        let next = cum + values[off(k)] + values[off(-k)];
        if next >= threshold {
            return (k - 1) as f64 + (threshold - cum) / (next - cum);
        }
        cum = next;
    }
    l_max as f64
}

/// Front-speed estimate from a time series of minor-diagonal traces.
#[derive(Clone, Copy, Debug)]
pub struct FrontSpeedEstimate {
    /// Ballistic front speed in sites per unit time (1/J).
    pub speed: f64,
    /// Least-squares slope of the RMS half-width the speed derives from.
    pub width_slope: f64,
    pub samples: usize,
}

/// Estimates the ballistic front speed of a spreading distribution.
///
/// The RMS half-width sigma(t) = sqrt(sum_q q^2 p_q(t)) of a tight-binding
/// wavepacket grows exactly linearly from t = 0, so its least-squares slope
/// is transient-free; the front (maximum group velocity) runs sqrt(2) times
/// faster than the RMS width grows. The interpolated 90% half-width guards
/// the fit window: the front must stay clear of |q| = L - 1.
pub fn front_speed(
    times: &[f64],
    traces: &[DVector<f64>],
    l_max: i32,
) -> Result<FrontSpeedEstimate> {
    const MIN_SAMPLES: usize = 10;
    if times.len() != traces.len() {
        return Err(Error::GridMismatch {
            context: format!("{} times vs {} traces", times.len(), traces.len()),
        });
    }
    if times.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples {
            needed: MIN_SAMPLES,
            got: times.len(),
        });
    }
    let l_t = (2 * l_max + 1) as usize;
    let mut widths = Vec::with_capacity(times.len());
    for trace in traces {
        if trace.len() != l_t {
            return Err(Error::GridMismatch {
                context: format!("trace length {} vs {} sites", trace.len(), l_t),
            });
        }
        let radius = half_width_90(trace, l_max);
        if radius >= (l_max - 1) as f64 {
            return Err(Error::FrontHitBoundary {
                radius: radius.ceil() as i32,
                l_max,
            });
        }
        let total: f64 = trace.iter().sum();
        if total <= 0.0 {
            return Err(Error::Validation(
                "minor-diagonal trace carries no mass".into(),
            ));
        }
        let second_moment: f64 = trace
            .iter()
            .enumerate()
            .map(|(qi, v)| {
                let q = (qi as i32 - l_max) as f64;
                q * q * v
            })
            .sum();
        widths.push((second_moment / total).sqrt());
    }
    let n = times.len() as f64;
    let t_mean = times.iter().sum::<f64>() / n;
    let w_mean = widths.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&t, &w) in times.iter().zip(&widths) {
        cov += (t - t_mean) * (w - w_mean);
        var += (t - t_mean) * (t - t_mean);
    }
    if var == 0.0 {
        return Err(Error::Validation(
            "front-speed fit needs distinct time samples".into(),
        ));
    }
    let width_slope = cov / var;
    Ok(FrontSpeedEstimate {
        speed: std::f64::consts::SQRT_2 * width_slope,
        width_slope,
        samples: times.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{decompose, evolve, single_particle_propagator};
    use crate::hamiltonian::build_two_particle_hamiltonian;
    use crate::lattice::{build_basis, initial_pair_state, LatticeSpec, Statistics};
    use std::sync::Arc;

    fn evolved(l: i32, v: f64, stat: Statistics, t: f64) -> TwoParticleState {
        let spec = LatticeSpec::new(l, 1.0, v, stat).unwrap();
        let basis = Arc::new(build_basis(&spec));
        let h = build_two_particle_hamiltonian(&spec, &basis).unwrap();
        let dec = decompose(&h).unwrap();
        let psi0 = initial_pair_state(&basis, 0, 1).unwrap();
        evolve(&dec, &psi0, &[t]).unwrap().remove(0)
    }

    #[test]
    fn test_fermi_sign_convention_at_launch() {
        let spec = LatticeSpec::new(2, 1.0, 0.0, Statistics::Fermi).unwrap();
        let basis = Arc::new(build_basis(&spec));
        let psi = initial_pair_state(&basis, 0, 1).unwrap();
        let phi = pair_amplitude(&psi);
        assert_eq!(phi.at(1, 0), Complex64::new(1.0, 0.0));
        assert_eq!(phi.at(0, 1), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn test_bose_doublon_diagonal_carries_sqrt2() {
        let spec = LatticeSpec::new(2, 1.0, 0.0, Statistics::Bose).unwrap();
        let basis = Arc::new(build_basis(&spec));
        let psi = initial_pair_state(&basis, 0, 0).unwrap();
        let phi = pair_amplitude(&psi);
        assert_eq!(phi.at(0, 0), Complex64::new(2.0f64.sqrt(), 0.0));
        let gamma = position_correlation(&psi);
        assert!((gamma.at(0, 0) - 2.0).abs() < 1e-15);
        let n = density(&psi);
        assert!((n[2] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn test_phi_symmetry_and_mass_after_evolution() {
        for (stat, v) in [
            (Statistics::Bose, 0.0),
            (Statistics::Bose, 3.0),
            (Statistics::Fermi, 2.0),
            (Statistics::HardCoreBose, 2.0),
        ] {
            let state = evolved(5, v, stat, 1.7);
            let phi = pair_amplitude(&state);
            let sign = if stat == Statistics::Fermi { -1.0 } else { 1.0 };
            for l in -5..=5 {
                for m in -5..=5 {
                    let diff = (phi.at(l, m) - phi.at(m, l) * sign).norm();
                    assert!(diff < 1e-12, "{stat} ({l},{m}): {diff}");
                }
            }
            if stat != Statistics::Bose {
                for l in -5..=5 {
                    assert!(phi.at(l, l).norm() < 1e-15, "{stat} diagonal at {l}");
                }
            }
            assert!((phi.mass() - 2.0).abs() < 1e-12, "{stat} mass");
        }
    }

    #[test]
    fn test_correlation_mass_is_two_in_both_spaces() {
        for stat in Statistics::ALL {
            let state = evolved(4, 2.0, stat, 2.1);
            let pos = position_correlation(&state);
            let mom = momentum_correlation(&state);
            assert!((pos.mass() - 2.0).abs() < 1e-12, "{stat} position");
            assert!((mom.mass() - 2.0).abs() < 1e-12, "{stat} momentum");
            for a in -4..=4 {
                for b in -4..=4 {
                    assert!((pos.at(a, b) - pos.at(b, a)).abs() < 1e-14);
                    assert!((mom.at(a, b) - mom.at(b, a)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn test_free_momentum_correlations_match_closed_form() {
        // At V = 0 momentum correlations are conserved:
        // Gamma_{alpha,beta} = (2 +- 2 cos(p_alpha - p_beta)) / L_t^2.
        let l = 6;
        let grid = crate::lattice::MomentumGrid::new(l);
        let l_t = (2 * l + 1) as f64;
        for (stat, sign) in [(Statistics::Bose, 1.0), (Statistics::Fermi, -1.0)] {
            for t in [0.0, 1.3, 4.0] {
                let state = evolved(l, 0.0, stat, t);
                let mom = momentum_correlation(&state);
                for (ai, a) in (-l..=l).enumerate() {
                    for (bi, b) in (-l..=l).enumerate() {
                        let expect = (2.0
                            + sign * 2.0 * (grid.p_alpha[ai] - grid.p_alpha[bi]).cos())
                            / (l_t * l_t);
                        let diff = (mom.at(a, b) - expect).abs();
                        assert!(diff < 1e-12, "{stat} t={t} ({a},{b}): {diff}");
                    }
                }
            }
        }
    }

    #[test]
    fn test_fermi_momentum_diagonal_vanishes_hcb_does_not() {
        let fermi = momentum_correlation(&evolved(6, 0.0, Statistics::Fermi, 3.0));
        for a in -6..=6 {
            assert!(fermi.at(a, a) < 1e-15, "fermi alpha={a}");
        }
        let hcb = momentum_correlation(&evolved(6, 0.0, Statistics::HardCoreBose, 3.0));
        let max_diag = (-6..=6).map(|a| hcb.at(a, a)).fold(0.0, f64::max);
        assert!(max_diag > 1e-3, "hcb momentum diagonal flat: {max_diag}");
    }

    #[test]
    fn test_density_equals_row_sums_of_position_correlation() {
        for stat in Statistics::ALL {
            let state = evolved(4, 1.5, stat, 2.7);
            let n = density(&state);
            let gamma = position_correlation(&state);
            let mut total = 0.0;
            for q in -4..=4 {
                let row: f64 = (-4..=4).map(|r| gamma.at(q, r)).sum();
                let nq = n[(q + 4) as usize];
                assert!((row - nq).abs() < 1e-12, "{stat} q={q}: {row} vs {nq}");
                total += nq;
            }
            assert!((total - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn test_minor_diagonal_at_launch() {
        let spec = LatticeSpec::new(5, 1.0, 0.0, Statistics::Bose).unwrap();
        let basis = Arc::new(build_basis(&spec));
        let psi = initial_pair_state(&basis, 0, 1).unwrap();
        let trace = minor_diagonal(&psi);
        assert_eq!(trace[5], 1.0);
        assert_eq!(trace.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn test_half_width_interpolates() {
        let l = 5;
        let mut values = DVector::zeros(11);
        values[5] = 0.8; // q = 0
        values[6] = 0.1; // q = 1
        values[4] = 0.1; // q = -1
                         // Cumulative: 0.8 at radius 0, 1.0 at radius 1; 90% crosses halfway.
        let w = half_width_90(&values, l);
        assert!((w - 0.5).abs() < 1e-12, "width {w}");
        assert_eq!(half_width_90(&DVector::zeros(11), l), 0.0);
    }

    #[test]
    fn test_front_speed_of_unit_speed_spreading_packet() {
        // A free walker with hopping J~ = 0.5 has front speed 2 J~ = 1.
        let spec = LatticeSpec::new(30, 0.5, 0.0, Statistics::Bose).unwrap();
        let times: Vec<f64> = (0..40).map(|k| k as f64 * 0.25).collect();
        let traces: Vec<DVector<f64>> = times
            .iter()
            .map(|&t| {
                let g = single_particle_propagator(&spec, t);
                DVector::from_fn(61, |q, _| g[(q, 30)].norm_sqr())
            })
            .collect();
        let est = front_speed(&times, &traces, 30).unwrap();
        assert!(
            (est.speed - 1.0).abs() < 0.1,
            "front speed {} not within 0.1 of 1.0",
            est.speed
        );
        // The RMS route makes the estimate essentially exact here.
        assert!((est.speed - 1.0).abs() < 1e-6, "speed {}", est.speed);
    }

    #[test]
    fn test_front_speed_guards() {
        let l = 5;
        let times: Vec<f64> = (0..12).map(|k| k as f64).collect();
        let flat: Vec<DVector<f64>> = times
            .iter()
            .map(|_| DVector::from_element(11, 1.0))
            .collect();
        assert!(matches!(
            front_speed(&times[..3], &flat[..3], l),
            Err(Error::InsufficientSamples { needed: 10, got: 3 })
        ));
        // Uniform mass puts the 90% radius at the boundary.
        assert!(matches!(
            front_speed(&times, &flat, l),
            Err(Error::FrontHitBoundary { .. })
        ));
        let mut centred = DVector::zeros(11);
        centred[5] = 1.0;
        let ok: Vec<DVector<f64>> = times.iter().map(|_| centred.clone()).collect();
        let est = front_speed(&times, &ok, l).unwrap();
        assert_eq!(est.speed, 0.0);
    }
}
