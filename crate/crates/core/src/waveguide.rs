//! Classical waveguide-array equivalent of the two-particle walk.
//!
//! The pair amplitude Phi(l1, l2, t) of the quantum walk obeys a
//! first-quantized Schroedinger equation on a 2D grid of points (l1, l2):
//! nearest-neighbour kinetic coupling -J along both axes plus a diagonal
//! detuning V on the interaction stripe l2 = l1 +- 1 (ring-wrapped when
//! periodic). That equation is exactly the coupled-mode equation
//!
//!   i dE/dz = -J sum_<neighbours> E + V_site E
//!
//! of an array of evanescently coupled optical waveguides, with the
//! propagation distance z playing the role of Jt. One classical array per
//! statistics: bosons use the full grid, fermions and hard-core bosons omit
//! the main diagonal (their Phi vanishes there for all z, so the guides
//! can be dropped). Launching E(0) = Phi(0) / sqrt(2) makes the classical
//! field reproduce sqrt(2) E(z) = Phi(t = z) identically, quantum exchange
//! statistics encoded purely in the symmetry of the launch pattern.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::evolution::{decompose, evolve, spectral_propagate, symmetric_eigen_sorted};
use crate::hamiltonian::build_two_particle_hamiltonian;
use crate::lattice::{build_basis, initial_pair_state, LatticeSpec, Statistics};
use crate::numfmt::f64_repr;
use crate::observables::{pair_amplitude, PairAmplitude};

/// Edge handling of the 2D array. `Periodic` matches the quantum ring
/// exactly; `Open` is the fabricable variant that truncates the wrap-around
/// couplings and detunings.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    Open,
}

impl Boundary {
    pub fn token(self) -> &'static str {
        match self {
            Boundary::Periodic => "periodic",
            Boundary::Open => "open",
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.token())
    }
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "periodic" => Ok(Boundary::Periodic),
            "open" => Ok(Boundary::Open),
            other => Err(Error::Validation(format!(
                "unknown boundary '{other}' (expected periodic or open)"
            ))),
        }
    }
}

/// Evanescent coupling between two guides, endpoints in lexicographic order.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coupling {
    pub a: (i32, i32),
    pub b: (i32, i32),
    pub strength: f64,
}

/// A concrete 2D guide array: one guide per grid point (l1, l2), detunings
/// on the interaction stripe, couplings along both grid axes.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveguideLayout {
    pub statistics: Statistics,
    pub boundary: Boundary,
    pub l_max: i32,
    pub j: f64,
    pub v: f64,
    /// Guide positions in lexicographic (l1, l2) order.
    pub sites: Vec<(i32, i32)>,
    /// Propagation-constant detunings, aligned with `sites`.
    pub detunings: Vec<f64>,
    pub couplings: Vec<Coupling>,
    site_index: Vec<Option<usize>>,
}

impl WaveguideLayout {
    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn total_axis_sites(&self) -> usize {
        (2 * self.l_max + 1) as usize
    }

    pub fn index_of(&self, l1: i32, l2: i32) -> Option<usize> {
        if l1.abs() > self.l_max || l2.abs() > self.l_max {
            return None;
        }
        let n = self.total_axis_sites();
        self.site_index[(l1 + self.l_max) as usize * n + (l2 + self.l_max) as usize]
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        statistics: Statistics,
        boundary: Boundary,
        l_max: i32,
        j: f64,
        v: f64,
        sites: Vec<(i32, i32)>,
        detunings: Vec<f64>,
        couplings: Vec<Coupling>,
    ) -> Result<Self> {
        let n = (2 * l_max + 1) as usize;
        let mut site_index = vec![None; n * n];
        for (i, &(l1, l2)) in sites.iter().enumerate() {
            if l1.abs() > l_max {
                return Err(Error::OutOfRange { site: l1, l_max });
            }
            if l2.abs() > l_max {
                return Err(Error::OutOfRange { site: l2, l_max });
            }
            let flat = (l1 + l_max) as usize * n + (l2 + l_max) as usize;
            if site_index[flat].is_some() {
                return Err(Error::Validation(format!("duplicate guide ({l1}, {l2})")));
            }
            site_index[flat] = Some(i);
        }
        let layout = WaveguideLayout {
            statistics,
            boundary,
            l_max,
            j,
            v,
            sites,
            detunings,
            couplings,
            site_index,
        };
        for c in &layout.couplings {
            for (l1, l2) in [c.a, c.b] {
                if layout.index_of(l1, l2).is_none() {
                    return Err(Error::UnsupportedSite { l1, l2 });
                }
            }
        }
        Ok(layout)
    }
}

/// Whether grid point (l1, l2) sits on the detuned interaction stripe.
fn on_stripe(spec: &LatticeSpec, boundary: Boundary, l1: i32, l2: i32) -> bool {
    match boundary {
        Boundary::Periodic => l1 != l2 && spec.ring_adjacent(l1, l2),
        Boundary::Open => (l1 - l2).abs() == 1,
    }
}

/// Builds the guide array equivalent to the two-particle walk of `spec`.
pub fn build_layout(spec: &LatticeSpec, boundary: Boundary) -> WaveguideLayout {
    let keep_diagonal = spec.statistics.allows_double_occupancy();
    let mut sites = Vec::new();
    let mut detunings = Vec::new();
    for l1 in -spec.l_max..=spec.l_max {
        for l2 in -spec.l_max..=spec.l_max {
            if l1 == l2 && !keep_diagonal {
                continue;
            }
            sites.push((l1, l2));
            detunings.push(if on_stripe(spec, boundary, l1, l2) {
                spec.v
            } else {
                0.0
            });
        }
    }
    let in_grid = |l1: i32, l2: i32| (l1 == l2 && !keep_diagonal).then_some(()).is_none();
    let mut couplings = Vec::new();
    for &(l1, l2) in &sites {
        // One edge per axis step in the increasing direction; the periodic
        // wrap (L -> -L) is emitted from the l = L guide only, so every
        // unordered edge appears exactly once.
        let steps: [Option<(i32, i32)>; 2] = match boundary {
            Boundary::Periodic => [
                Some((spec.right_neighbor(l1), l2)),
                Some((l1, spec.right_neighbor(l2))),
            ],
            Boundary::Open => [
                (l1 < spec.l_max).then(|| (l1 + 1, l2)),
                (l2 < spec.l_max).then(|| (l1, l2 + 1)),
            ],
        };
        for target in steps.into_iter().flatten() {
            if !in_grid(target.0, target.1) {
                continue;
            }
            let (a, b) = if target < (l1, l2) {
                (target, (l1, l2))
            } else {
                ((l1, l2), target)
            };
            couplings.push(Coupling {
                a,
                b,
                strength: spec.j,
            });
        }
    }
    couplings.sort_by_key(|c| (c.a, c.b));
    WaveguideLayout::assemble(
        spec.statistics,
        boundary,
        spec.l_max,
        spec.j,
        spec.v,
        sites,
        detunings,
        couplings,
    )
    .expect("freshly enumerated layout is internally consistent")
}

/// Classical field amplitudes across the array at propagation distance z.
#[derive(Clone, Debug)]
pub struct FieldState {
    pub amplitudes: DVector<Complex64>,
    pub layout: Arc<WaveguideLayout>,
    pub z: f64,
}

impl FieldState {
    pub fn power(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn at(&self, l1: i32, l2: i32) -> Result<Complex64> {
        self.layout
            .index_of(l1, l2)
            .map(|i| self.amplitudes[i])
            .ok_or(Error::UnsupportedSite { l1, l2 })
    }
}

/// Launch pattern E = Phi / sqrt(2) imprinting the exchange symmetry of a
/// pair amplitude onto the classical field.
pub fn initial_field(layout: &Arc<WaveguideLayout>, phi: &PairAmplitude) -> Result<FieldState> {
    if layout.l_max != phi.l_max || layout.statistics != phi.statistics {
        return Err(Error::GridMismatch {
            context: format!(
                "layout (L={}, {}) vs amplitude (L={}, {})",
                layout.l_max, layout.statistics, phi.l_max, phi.statistics
            ),
        });
    }
    if !layout.statistics.allows_double_occupancy() {
        for l in -layout.l_max..=layout.l_max {
            if phi.at(l, l).norm() > 1e-12 {
                return Err(Error::UnsupportedSite { l1: l, l2: l });
            }
        }
    }
    let amplitudes = DVector::from_fn(layout.n_sites(), |i, _| {
        let (l1, l2) = layout.sites[i];
        phi.at(l1, l2) / std::f64::consts::SQRT_2
    });
    Ok(FieldState {
        amplitudes,
        layout: Arc::clone(layout),
        z: phi.time,
    })
}

/// Coupled-mode matrix of the array: detunings on the diagonal, -strength
/// on coupled guide pairs.
fn coupled_mode_matrix(layout: &WaveguideLayout) -> DMatrix<f64> {
    let n = layout.n_sites();
    let mut h = DMatrix::zeros(n, n);
    for (i, &d) in layout.detunings.iter().enumerate() {
        h[(i, i)] = d;
    }
    for c in &layout.couplings {
        let ia = layout.index_of(c.a.0, c.a.1).expect("validated endpoint");
        let ib = layout.index_of(c.b.0, c.b.1).expect("validated endpoint");
        h[(ia, ib)] -= c.strength;
        h[(ib, ia)] -= c.strength;
    }
    h
}

/// Propagates the field by each z in `z_steps` (relative to `field.z`).
pub fn propagate_field(field: &FieldState, z_steps: &[f64]) -> Result<Vec<FieldState>> {
    if z_steps.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::Validation(
            "propagation distances must be sorted ascending".into(),
        ));
    }
    let (eigenvalues, eigenvectors) = symmetric_eigen_sorted(coupled_mode_matrix(&field.layout))?;
    let evolved = spectral_propagate(&eigenvalues, &eigenvectors, &field.amplitudes, z_steps);
    Ok(evolved
        .into_iter()
        .zip(z_steps)
        .map(|(amplitudes, &dz)| FieldState {
            amplitudes,
            layout: Arc::clone(&field.layout),
            z: field.z + dz,
        })
        .collect())
}

/// Side-by-side run of the quantum walk and its classical array.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub boundary: Boundary,
    pub times: Vec<f64>,
    /// max_site |sqrt(2) E(z = t) - Phi(t)| at each sample.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evolves the pair released at `init` both ways and reports the largest
/// field-vs-amplitude deviation per sample time.
///
/// With a periodic array the two routes agree to numerical precision at all
/// times; an open array agrees only until the spreading front reaches the
/// truncated edge, which is the regime a physical (finite) array operates
/// in.
pub fn quantum_equivalence_check(
    spec: &LatticeSpec,
    boundary: Boundary,
    init: (i32, i32),
    times: &[f64],
    tolerance: f64,
) -> Result<EquivalenceReport> {
    let basis = Arc::new(build_basis(spec));
    let h = build_two_particle_hamiltonian(spec, &basis)?;
    let dec = decompose(&h)?;
    let psi0 = initial_pair_state(&basis, init.0, init.1)?;
    let states = evolve(&dec, &psi0, times)?;

    let layout = Arc::new(build_layout(spec, boundary));
    let field0 = initial_field(&layout, &pair_amplitude(&psi0))?;
    let fields = propagate_field(&field0, times)?;

    let mut deviations = Vec::with_capacity(times.len());
    for (state, field) in states.iter().zip(&fields) {
        let phi = pair_amplitude(state);
        let mut dev: f64 = 0.0;
        for (i, &(l1, l2)) in layout.sites.iter().enumerate() {
            let diff = (field.amplitudes[i] * std::f64::consts::SQRT_2 - phi.at(l1, l2)).norm();
            dev = dev.max(diff);
        }
        deviations.push(dev);
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(EquivalenceReport {
        boundary,
        times: times.to_vec(),
        deviations,
        max_deviation,
        tolerance,
        pass: max_deviation <= tolerance,
    })
}

/// Serializes a layout to the plain-text guide list:
/// a header line, one `S l1 l2 detuning` line per guide, then one
/// `C l1a l2a l1b l2b strength` line per coupling. LF line endings,
/// floats with 17 significant digits.
pub fn export_layout(layout: &WaveguideLayout) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "qwalk2-layout v1 L={} statistics={} boundary={} J={} V={}\n",
        layout.l_max,
        layout.statistics.token(),
        layout.boundary.token(),
        f64_repr(layout.j),
        f64_repr(layout.v),
    ));
    for (&(l1, l2), &d) in layout.sites.iter().zip(&layout.detunings) {
        out.push_str(&format!("S {l1} {l2} {}\n", f64_repr(d)));
    }
    for c in &layout.couplings {
        out.push_str(&format!(
            "C {} {} {} {} {}\n",
            c.a.0,
            c.a.1,
            c.b.0,
            c.b.1,
            f64_repr(c.strength)
        ));
    }
    out
}

fn header_value<'a>(token: Option<&'a str>, key: &str) -> Result<&'a str> {
    let token = token
        .ok_or_else(|| Error::Validation(format!("layout header line 1: missing {key}=<value>")))?;
    token
        .strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| {
            Error::Validation(format!(
                "layout header line 1: expected {key}=<value>, found '{token}'"
            ))
        })
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| {
        Error::Validation(format!(
            "layout line {line}: cannot parse {what} from '{s}'"
        ))
    })
}

/// Parses the text form written by [`export_layout`]. Guides must appear in
/// strictly increasing lexicographic order and couplings may only reference
/// listed guides.
pub fn parse_layout(text: &str) -> Result<WaveguideLayout> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Validation("empty layout file".into()))?;
    let mut tok = header.split_whitespace();
    if tok.next() != Some("qwalk2-layout") || tok.next() != Some("v1") {
        return Err(Error::Validation(
            "layout line 1: expected 'qwalk2-layout v1' header".into(),
        ));
    }
    let l_max: i32 = parse_num(header_value(tok.next(), "L")?, "L", 1)?;
    if l_max < 1 {
        return Err(Error::Validation(format!(
            "layout line 1: L must be at least 1, got {l_max}"
        )));
    }
    let statistics: Statistics = header_value(tok.next(), "statistics")?.parse()?;
    let boundary: Boundary = header_value(tok.next(), "boundary")?.parse()?;
    let j: f64 = parse_num(header_value(tok.next(), "J")?, "J", 1)?;
    let v: f64 = parse_num(header_value(tok.next(), "V")?, "V", 1)?;
    if let Some(extra) = tok.next() {
        return Err(Error::Validation(format!(
            "layout line 1: unexpected trailing token '{extra}'"
        )));
    }

    let mut sites: Vec<(i32, i32)> = Vec::new();
    let mut detunings = Vec::new();
    let mut couplings = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.as_slice() {
            ["S", l1, l2, d] => {
                let site = (
                    parse_num::<i32>(l1, "site label", lineno)?,
                    parse_num::<i32>(l2, "site label", lineno)?,
                );
                if let Some(&last) = sites.last() {
                    if site <= last {
                        return Err(Error::Validation(format!(
                            "layout line {lineno}: guides out of lexicographic order"
                        )));
                    }
                }
                sites.push(site);
                detunings.push(parse_num::<f64>(d, "detuning", lineno)?);
            }
            ["C", a1, a2, b1, b2, s] => {
                couplings.push(Coupling {
                    a: (
                        parse_num::<i32>(a1, "site label", lineno)?,
                        parse_num::<i32>(a2, "site label", lineno)?,
                    ),
                    b: (
                        parse_num::<i32>(b1, "site label", lineno)?,
                        parse_num::<i32>(b2, "site label", lineno)?,
                    ),
                    strength: parse_num::<f64>(s, "coupling strength", lineno)?,
                });
            }
            [] => {}
            _ => {
                return Err(Error::Validation(format!(
                    "layout line {lineno}: expected 'S l1 l2 detuning' or \
                     'C l1a l2a l1b l2b strength'"
                )));
            }
        }
    }
    WaveguideLayout::assemble(
        statistics, boundary, l_max, j, v, sites, detunings, couplings,
    )
}
