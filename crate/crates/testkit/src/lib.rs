//! Brute-force reference implementations used as oracles by the qwalk2 test
//! suites. Everything here is deliberately independent of the main crates:
//! the two-particle Hamiltonian is assembled by applying ladder operators to
//! occupation vectors over the full Fock space, and free-walk correlations
//! come from closed-form single-particle propagators. Performance is not a
//! goal; transparency is.

use num_complex::Complex64;

/// Exchange statistics of the walkers.
///
/// `Fermi` uses Jordan-Wigner strings over the site storage order (site -L
/// first). `HardCore` commutes off-site and anticommutes on-site.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Bose,
    Fermi,
    HardCore,
}

impl Kind {
    fn max_occupancy(self) -> u8 {
        match self {
            Kind::Bose => 2,
            Kind::Fermi | Kind::HardCore => 1,
        }
    }
}

/// Occupation vectors are little-endian digits in base `max_occ + 1`, one
/// digit per site, site -L stored first.
fn fock_index(occ: &[u8], base: usize) -> usize {
    occ.iter().rev().fold(0, |acc, &n| acc * base + n as usize)
}

fn occupation(mut index: usize, base: usize, sites: usize) -> Vec<u8> {
    let mut occ = vec![0u8; sites];
    for slot in occ.iter_mut() {
        *slot = (index % base) as u8;
        index /= base;
    }
    occ
}

/// Applies the annihilator for `site` (storage offset). Returns the new
/// occupation vector and the amplitude factor, or None when the result
/// vanishes.
fn annihilate(kind: Kind, occ: &[u8], site: usize) -> Option<(Vec<u8>, f64)> {
    let n = occ[site];
    if n == 0 {
        return None;
    }
    let mut out = occ.to_vec();
    out[site] = n - 1;
    let factor = match kind {
        Kind::Bose => (n as f64).sqrt(),
        Kind::HardCore => 1.0,
        Kind::Fermi => jw_sign(occ, site),
    };
    Some((out, factor))
}

/// Applies the creator for `site`. None when the target occupancy would leave
/// the allowed range (hard-core / Pauli exclusion, or the 0..2 truncation for
/// bosons, which is exact on the two-particle sector).
fn create(kind: Kind, occ: &[u8], site: usize) -> Option<(Vec<u8>, f64)> {
    let n = occ[site];
    if n >= kind.max_occupancy() {
        return None;
    }
    let mut out = occ.to_vec();
    out[site] = n + 1;
    let factor = match kind {
        Kind::Bose => ((n + 1) as f64).sqrt(),
        Kind::HardCore => 1.0,
        Kind::Fermi => jw_sign(occ, site),
    };
    Some((out, factor))
}

fn jw_sign(occ: &[u8], site: usize) -> f64 {
    let crossings: u32 = occ[..site].iter().map(|&n| n as u32).sum();
    if crossings.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Two-particle basis labels in lexicographic order: site pairs (l1, l2) with
/// l1 <= l2 for bosons and l1 < l2 otherwise, sites labelled -l_max..l_max.
pub fn pair_labels(kind: Kind, l_max: i32) -> Vec<(i32, i32)> {
    let mut labels = Vec::new();
    for l1 in -l_max..=l_max {
        let start = if kind == Kind::Bose { l1 } else { l1 + 1 };
        for l2 in start..=l_max {
            labels.push((l1, l2));
        }
    }
    labels
}

/// Builds the ring Hamiltonian
///   H = -J sum_l (a+_l a_{l+1} + h.c.) + V sum_l n_l n_{l+1}
/// over the full (truncated) Fock space on 2*l_max+1 sites and projects the
/// two-particle block onto the lexicographic pair basis. Returns the pair
/// labels alongside the dense matrix, row-major.
// Index loops kept: `col` IS the integer encoding of a Fock state here.
#[allow(clippy::needless_range_loop)]
pub fn two_particle_hamiltonian(
    kind: Kind,
    l_max: i32,
    j: f64,
    v: f64,
) -> (Vec<(i32, i32)>, Vec<Vec<f64>>) {
    let sites = (2 * l_max + 1) as usize;
    let base = kind.max_occupancy() as usize + 1;
    let space = base.pow(sites as u32);

    // Column-by-column application of H to every Fock basis state.
    let mut full = vec![vec![0.0f64; space]; space];
    for col in 0..space {
        let occ = occupation(col, base, sites);
        for bond in 0..sites {
            let s1 = bond;
            let s2 = (bond + 1) % sites;
            // -J (a+_{s1} a_{s2} + a+_{s2} a_{s1})
            for (dst, src) in [(s1, s2), (s2, s1)] {
                if let Some((mid, f1)) = annihilate(kind, &occ, src) {
                    if let Some((out, f2)) = create(kind, &mid, dst) {
                        full[fock_index(&out, base)][col] += -j * f1 * f2;
                    }
                }
            }
            full[col][col] += v * occ[s1] as f64 * occ[s2] as f64;
        }
    }

    let labels = pair_labels(kind, l_max);
    let to_fock = |&(l1, l2): &(i32, i32)| -> usize {
        let mut occ = vec![0u8; sites];
        occ[(l1 + l_max) as usize] += 1;
        occ[(l2 + l_max) as usize] += 1;
        fock_index(&occ, base)
    };
    let block = labels
        .iter()
        .map(|row| {
            let r = to_fock(row);
            labels.iter().map(|col| full[r][to_fock(col)]).collect()
        })
        .collect();
    (labels, block)
}

/// Free single-particle propagator on the periodic ring, evaluated from the
/// plane-wave sum: G[q][l] = (1/L_t) sum_a exp(i p_a (q - l)) exp(2 i J cos(p_a) t)
/// with p_a = 2 pi a / L_t and storage offsets q, l in 0..L_t for sites
/// -l_max..l_max.
pub fn free_propagator(l_max: i32, j: f64, t: f64) -> Vec<Vec<Complex64>> {
    let l_t = (2 * l_max + 1) as i64;
    let momenta: Vec<f64> = (-(l_max as i64)..=l_max as i64)
        .map(|a| 2.0 * std::f64::consts::PI * a as f64 / l_t as f64)
        .collect();
    let mut g = vec![vec![Complex64::new(0.0, 0.0); l_t as usize]; l_t as usize];
    for (qi, row) in g.iter_mut().enumerate() {
        for (li, entry) in row.iter_mut().enumerate() {
            let d = qi as i64 - li as i64;
            let mut acc = Complex64::new(0.0, 0.0);
            for p in &momenta {
                acc += Complex64::new(0.0, p * d as f64 + 2.0 * j * p.cos() * t).exp();
            }
            *entry = acc / l_t as f64;
        }
    }
    g
}

/// Free-walk two-particle position correlation for walkers released from
/// sites (l1, l2): the permanent (Bose) or determinant (Fermi) of
/// single-particle propagator entries, squared. Hard-core bosons have no
/// such closed form and are rejected.
pub fn free_position_correlation(
    kind: Kind,
    l_max: i32,
    j: f64,
    t: f64,
    origin: (i32, i32),
) -> Vec<Vec<f64>> {
    let sign = match kind {
        Kind::Bose => 1.0,
        Kind::Fermi => -1.0,
        Kind::HardCore => panic!("no closed-form free correlation for hard-core bosons"),
    };
    let g = free_propagator(l_max, j, t);
    let a = (origin.0 + l_max) as usize;
    let b = (origin.1 + l_max) as usize;
    let l_t = (2 * l_max + 1) as usize;
    let mut gamma = vec![vec![0.0f64; l_t]; l_t];
    for (q, row) in gamma.iter_mut().enumerate() {
        for (r, entry) in row.iter_mut().enumerate() {
            let amp = g[q][a] * g[r][b] + sign * (g[q][b] * g[r][a]);
            *entry = amp.norm_sqr();
        }
    }
    gamma
}
