//! End-to-end acceptance suite. One test per criterion; each prints a
//! single PASS/FAIL line with the measured numbers (visible for passing
//! criteria with `cargo test -p qwalk2-cli --test acceptance -- --nocapture`)
//! and asserts both the criterion and its runtime budget.

use std::collections::BTreeMap;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use qwalk2_cli::commands::effective_report;
use qwalk2_core::{
    build_basis, build_two_particle_hamiltonian, decompose, density, effective_params,
    energy_expectation, evolve, initial_pair_state, momentum_correlation, position_correlation,
    quantum_equivalence_check, Boundary, Error, LatticeSpec, Statistics, TwoParticleState,
};
use qwalk2_testkit as testkit;

fn ring(l_max: i32, j: f64, v: f64, statistics: Statistics) -> LatticeSpec {
    LatticeSpec::new(l_max, j, v, statistics).unwrap()
}

fn evolve_full(spec: &LatticeSpec, initial: (i32, i32), times: &[f64]) -> Vec<TwoParticleState> {
    let basis = Arc::new(build_basis(spec));
    let h = build_two_particle_hamiltonian(spec, &basis).unwrap();
    let dec = decompose(&h).unwrap();
    let psi0 = initial_pair_state(&basis, initial.0, initial.1).unwrap();
    evolve(&dec, &psi0, times).unwrap()
}

fn finish(name: &str, start: Instant, budget: Duration, failures: Vec<String>, detail: String) {
    let elapsed = start.elapsed();
    let verdict = if failures.is_empty() && elapsed <= budget {
        "PASS"
    } else {
        "FAIL"
    };
    println!("acceptance {name}: {verdict}: {detail} [{elapsed:.2?} of {budget:.0?} budget]");
    assert!(
        failures.is_empty(),
        "{name} failed:\n  {}",
        failures.join("\n  ")
    );
    assert!(
        elapsed <= budget,
        "{name} exceeded its runtime budget: {elapsed:.2?} > {budget:?}"
    );
}

fn testkit_kind(statistics: Statistics) -> testkit::Kind {
    match statistics {
        Statistics::Bose => testkit::Kind::Bose,
        Statistics::Fermi => testkit::Kind::Fermi,
        Statistics::HardCoreBose => testkit::Kind::HardCore,
    }
}

/// Criterion 1: the two-particle Hamiltonian equals a brute-force
/// projection of the full Fock-space ring Hamiltonian, entry for entry,
/// exactly (all entries are 0, V, or -J times 1 or sqrt(2)).
#[test]
#[allow(clippy::needless_range_loop)]
fn criterion_1_hamiltonian_against_fock_oracle() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for l_max in [1, 2] {
        for statistics in Statistics::ALL {
            let spec = ring(l_max, 1.0, 5.0, statistics);
            let basis = Arc::new(build_basis(&spec));
            let h = build_two_particle_hamiltonian(&spec, &basis).unwrap();
            let (labels, block) =
                testkit::two_particle_hamiltonian(testkit_kind(statistics), l_max, spec.j, spec.v);
            if labels != basis.pairs {
                failures.push(format!("{statistics} L={l_max}: pair ordering differs"));
                continue;
            }
            for r in 0..labels.len() {
                for c in 0..labels.len() {
                    if h.entries[(r, c)] != block[r][c] {
                        failures.push(format!(
                            "{statistics} L={l_max} entry ({r},{c}): {} vs oracle {}",
                            h.entries[(r, c)],
                            block[r][c]
                        ));
                    }
                    checked += 1;
                }
            }
        }
    }
    finish(
        "criterion 1 (Hamiltonian oracle)",
        start,
        Duration::from_secs(1),
        failures,
        format!("{checked} entries across L in {{1,2}} and all statistics, exact equality"),
    );
}

/// Criterion 2: interaction-free correlations match the independent
/// permanent/determinant formula built on the plane-wave propagator.
#[test]
#[allow(clippy::needless_range_loop)]
fn criterion_2_free_walk_against_propagator_formula() {
    let start = Instant::now();
    let mut max_dev: f64 = 0.0;
    for statistics in [Statistics::Bose, Statistics::Fermi] {
        let spec = ring(10, 1.0, 0.0, statistics);
        let states = evolve_full(&spec, (0, 1), &[1.0, 2.0, 3.0, 4.0]);
        for state in &states {
            let gamma = position_correlation(state);
            let oracle = testkit::free_position_correlation(
                testkit_kind(statistics),
                10,
                spec.j,
                state.time,
                (0, 1),
            );
            for q in 0..21 {
                for r in 0..21 {
                    max_dev = max_dev.max((gamma.gamma[(q, r)] - oracle[q][r]).abs());
                }
            }
        }
    }
    let failures = if max_dev <= 1e-10 {
        vec![]
    } else {
        vec![format!("free-walk deviation {max_dev:.3e} > 1e-10")]
    };
    finish(
        "criterion 2 (free-walk oracle)",
        start,
        Duration::from_secs(5),
        failures,
        format!("L=10, Jt in 1..4, Bose+Fermi, max deviation {max_dev:.3e} (tol 1e-10)"),
    );
}

/// Criterion 3: exchange statistics discriminate exactly as claimed:
/// fermions and hard-core bosons are indistinguishable in position space
/// (identical correlations, empty main diagonal) yet differ in momentum
/// space, where the fermion diagonal vanishes identically while hard-core
/// bosons keep a bunching signal.
#[test]
fn criterion_3_statistics_discrimination() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let times: Vec<f64> = (1..=8).map(|k| k as f64 * 0.5).collect();
    let fermi = evolve_full(&ring(10, 1.0, 0.0, Statistics::Fermi), (0, 1), &times);
    let hcb = evolve_full(
        &ring(10, 1.0, 0.0, Statistics::HardCoreBose),
        (0, 1),
        &times,
    );

    let mut position_dev: f64 = 0.0;
    let mut fermi_momentum_diag: f64 = 0.0;
    for (f, h) in fermi.iter().zip(&hcb) {
        let gf = position_correlation(f);
        let gh = position_correlation(h);
        for q in -10..=10 {
            if gf.at(q, q) != 0.0 || gh.at(q, q) != 0.0 {
                failures.push(format!("populated position diagonal at q={q}"));
            }
        }
        position_dev = position_dev.max((&gf.gamma - &gh.gamma).abs().max());
        let mf = momentum_correlation(f);
        for a in -10..=10 {
            fermi_momentum_diag = fermi_momentum_diag.max(mf.at(a, a));
        }
    }
    if position_dev > 1e-10 {
        failures.push(format!(
            "Fermi-vs-HCB position deviation {position_dev:.3e} > 1e-10"
        ));
    }
    if fermi_momentum_diag > 1e-20 {
        failures.push(format!(
            "Fermi momentum diagonal {fermi_momentum_diag:.3e} is not zero"
        ));
    }

    let hcb_final = momentum_correlation(hcb.last().unwrap());
    let hcb_bunching = (-10..=10)
        .map(|a| hcb_final.at(a, a))
        .fold(0.0_f64, f64::max);
    // Required floor for the hard-core bunching signal at Jt = 4. On this
    // lattice the launch pattern caps every momentum-diagonal entry at
    // 4/L_t^2 = 0.00907 (the ideal-boson value, attained at t = 0), so the
    // floor is not attainable; it is asserted as stated rather than tuned
    // down, and the line below carries the measured value.
    if hcb_bunching < 0.01 {
        failures.push(format!(
            "HCB momentum bunching {hcb_bunching:.5} < 0.01 at Jt=4 \
             (ideal-boson ceiling 4/441 = {:.5})",
            4.0 / 441.0
        ));
    }
    finish(
        "criterion 3 (statistics discrimination)",
        start,
        Duration::from_secs(10),
        failures,
        format!(
            "position F-vs-HCB dev {position_dev:.3e}; Fermi momentum diag \
             {fermi_momentum_diag:.3e}; HCB bunching at Jt=4: {hcb_bunching:.5} (floor 0.01)"
        ),
    );
}

/// Criterion 4: norm, energy, correlation mass in both spaces, and total
/// particle number are conserved to 1e-10 over long evolutions at weak,
/// unit, and strong interaction for every statistics.
#[test]
fn criterion_4_conservation_suite() {
    let start = Instant::now();
    let times: Vec<f64> = (0..=20).map(|k| k as f64 * 2.0).collect();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for statistics in Statistics::ALL {
        for v in [0.0, 1.0, 80.0] {
            let spec = ring(10, 1.0, v, statistics);
            let basis = Arc::new(build_basis(&spec));
            let h = build_two_particle_hamiltonian(&spec, &basis).unwrap();
            let dec = decompose(&h).unwrap();
            let psi0 = initial_pair_state(&basis, 0, 1).unwrap();
            let e0 = energy_expectation(&h, &psi0).unwrap();
            for state in evolve(&dec, &psi0, &times).unwrap() {
                let checks = [
                    (state.norm() - 1.0).abs(),
                    (energy_expectation(&h, &state).unwrap() - e0).abs(),
                    (position_correlation(&state).mass() - 2.0).abs(),
                    (momentum_correlation(&state).mass() - 2.0).abs(),
                    (density(&state).sum() - 2.0).abs(),
                ];
                let dev = checks.into_iter().fold(0.0, f64::max);
                if dev > 1e-10 {
                    failures.push(format!(
                        "{statistics} V={v} Jt={}: deviation {dev:.3e}",
                        state.time
                    ));
                }
                worst = worst.max(dev);
            }
        }
    }
    finish(
        "criterion 4 (conservation suite)",
        start,
        Duration::from_secs(30),
        failures,
        format!(
            "norm/energy/correlation mass/particle number over Jt <= 40, \
             V in {{0, J, 80J}}, all statistics: worst deviation {worst:.3e} (tol 1e-10)"
        ),
    );
}

/// Criterion 5: at strong coupling the pair walks as a bound composite:
/// bound mass stays >= 0.99, the distribution tracks the effective model
/// to L1 <= 0.05, and the front speeds are in ratio 3:1:1 across
/// Bose : Fermi : hard-core statistics.
#[test]
fn criterion_5_bound_state_co_walking() {
    let start = Instant::now();
    let outcome = effective_report(10, 1.0, 80.0, 40.0, 80).unwrap();
    let mut failures = Vec::new();
    for r in &outcome.per_statistics {
        if r.min_p_bound < 0.99 {
            failures.push(format!(
                "{}: P_bound {:.4} < 0.99",
                r.statistics, r.min_p_bound
            ));
        }
        if r.max_l1 > 0.05 {
            failures.push(format!("{}: L1 {:.4} > 0.05", r.statistics, r.max_l1));
        }
    }
    if (outcome.bose_fermi_ratio - 3.0).abs() > 0.15 {
        failures.push(format!(
            "bose:fermi speed ratio {:.4} outside 3 +- 5%",
            outcome.bose_fermi_ratio
        ));
    }
    if (outcome.fermi_hcb_ratio - 1.0).abs() > 0.01 {
        failures.push(format!(
            "fermi:hcb speed ratio {:.6} outside 1 +- 1%",
            outcome.fermi_hcb_ratio
        ));
    }
    let summary: Vec<String> = outcome
        .per_statistics
        .iter()
        .map(|r| {
            format!(
                "{} P_bound {:.4} L1 {:.4} speed {:.4}",
                r.statistics, r.min_p_bound, r.max_l1, r.speed
            )
        })
        .collect();
    finish(
        "criterion 5 (bound-state co-walking)",
        start,
        Duration::from_secs(60),
        failures,
        format!(
            "{}; ratios bose:fermi {:.4}, fermi:hcb {:.6}",
            summary.join("; "),
            outcome.bose_fermi_ratio,
            outcome.fermi_hcb_ratio
        ),
    );
}

/// Criterion 6: second-order composite-pair parameters come out exactly:
/// J_eff = 3J^2/V and mu_eff = V + 6J^2/V for bosons, J_eff = J^2/V and
/// mu_eff = V + 2J^2/V for fermions and hard-core bosons.
#[test]
fn criterion_6_effective_parameters() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let (j, v) = (1.0, 80.0);
    for (statistics, j_scale, mu_scale, j_literal, mu_literal) in [
        (Statistics::Bose, 3.0, 6.0, 0.0375, 80.075),
        (Statistics::Fermi, 1.0, 2.0, 0.0125, 80.025),
        (Statistics::HardCoreBose, 1.0, 2.0, 0.0125, 80.025),
    ] {
        let p = effective_params(&ring(10, j, v, statistics)).unwrap();
        // Double precision leaves one rounding of slack between the two
        // legal associations of s*J^2/V, so "exact" means within 1 ulp.
        let j_ref = j_scale * j * j / v;
        let mu_ref = v + mu_scale * j * j / v;
        if p.j_eff.to_bits().abs_diff(j_ref.to_bits()) > 1
            || p.mu_eff.to_bits().abs_diff(mu_ref.to_bits()) > 1
        {
            failures.push(format!(
                "{statistics}: ({:e}, {:e}) deviates from the closed form ({j_ref:e}, {mu_ref:e})",
                p.j_eff, p.mu_eff
            ));
        }
        if (p.j_eff - j_literal).abs() > 1e-12 || (p.mu_eff - mu_literal).abs() > 1e-12 {
            failures.push(format!(
                "{statistics}: ({}, {}) vs printed ({j_literal}, {mu_literal})",
                p.j_eff, p.mu_eff
            ));
        }
    }
    if !matches!(
        effective_params(&ring(10, 1.0, 0.0, Statistics::Bose)),
        Err(Error::ZeroInteraction)
    ) {
        failures.push("V = 0 not rejected".into());
    }
    finish(
        "criterion 6 (effective parameters)",
        start,
        Duration::from_secs(1),
        failures,
        "closed-form J_eff, mu_eff at J=1, V=80 for all statistics, exact to 1 ulp".into(),
    );
}

/// Criterion 7: the classical guide-array field reproduces the quantum
/// pair amplitude, sqrt(2) E(z) = Phi(t = z): to 1e-9 on the periodic
/// array at all sampled times, and to 1e-6 on the open array while the
/// front has not reached the truncated edge.
#[test]
fn criterion_7_waveguide_equivalence() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let times: Vec<f64> = (1..=8).map(|k| k as f64 * 0.5).collect();
    let mut periodic_dev: f64 = 0.0;
    for statistics in Statistics::ALL {
        for v in [0.0, 2.0, 80.0] {
            let spec = ring(10, 1.0, v, statistics);
            let report =
                quantum_equivalence_check(&spec, Boundary::Periodic, (0, 1), &times, 1e-9).unwrap();
            periodic_dev = periodic_dev.max(report.max_deviation);
            if !report.pass {
                failures.push(format!(
                    "{statistics} V={v} periodic: {:.3e} > 1e-9",
                    report.max_deviation
                ));
            }
        }
    }
    // Pre-light-cone window for the open array: the nearest truncated edge
    // is 9 hops from the launch guides, and amplitude d hops into the
    // kinetic expansion is bounded by (Jt)^d/d!, so Jt <= 0.7 keeps the
    // leak below 1e-7 and the window honest for the 1e-6 comparison.
    let early: Vec<f64> = (1..=7).map(|k| k as f64 * 0.1).collect();
    let mut open_dev: f64 = 0.0;
    for statistics in Statistics::ALL {
        let spec = ring(10, 1.0, 2.0, statistics);
        let report =
            quantum_equivalence_check(&spec, Boundary::Open, (0, 1), &early, 1e-6).unwrap();
        open_dev = open_dev.max(report.max_deviation);
        if !report.pass {
            failures.push(format!(
                "{statistics} open pre-light-cone: {:.3e} > 1e-6",
                report.max_deviation
            ));
        }
    }
    finish(
        "criterion 7 (waveguide equivalence)",
        start,
        Duration::from_secs(30),
        failures,
        format!(
            "periodic dev {periodic_dev:.3e} (tol 1e-9, V in {{0, 2J, 80J}}); \
             open pre-light-cone dev {open_dev:.3e} (tol 1e-6)"
        ),
    );
}

/// Criterion 8: repeated CLI invocations with identical arguments produce
/// byte-identical CSV, PGM, manifest, and layout files.
#[test]
fn criterion_8_byte_identical_outputs() {
    let start = Instant::now();
    let mut failures = Vec::new();
    let root = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_qwalk2");

    let run_args = |out: &str| {
        vec![
            "run".into(),
            "--statistics".into(),
            "bose".into(),
            "--L".into(),
            "5".into(),
            "--V".into(),
            "2".into(),
            "--tmax".into(),
            "1.5".into(),
            "--nt".into(),
            "3".into(),
            "--outputs".into(),
            "position_corr,momentum_corr,density,minor_diag,cowalk,waveguide_check".into(),
            "--heatmaps".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    let wg_args = |out: &str| {
        vec![
            "waveguide".into(),
            "--statistics".into(),
            "fermi".into(),
            "--L".into(),
            "4".into(),
            "--V".into(),
            "2".into(),
            "--nt".into(),
            "4".into(),
            "--tmax".into(),
            "2".into(),
            "--out".into(),
            out.to_string(),
        ]
    };
    for (label, args_of) in [
        ("run", run_args as fn(&str) -> Vec<String>),
        ("waveguide", wg_args as fn(&str) -> Vec<String>),
    ] {
        let mut trees = Vec::new();
        for attempt in 0..2 {
            let dir = root.path().join(format!("{label}{attempt}"));
            let status = Command::new(bin)
                .args(args_of(dir.to_str().unwrap()))
                .status()
                .unwrap();
            if !status.success() {
                failures.push(format!("{label} attempt {attempt} exited {status}"));
            }
            let mut tree = BTreeMap::new();
            for entry in std::fs::read_dir(&dir).unwrap() {
                let entry = entry.unwrap();
                tree.insert(
                    entry.file_name().into_string().unwrap(),
                    std::fs::read(entry.path()).unwrap(),
                );
            }
            trees.push(tree);
        }
        let names: Vec<&String> = trees[0].keys().collect();
        if trees[0].keys().ne(trees[1].keys()) {
            failures.push(format!("{label}: file sets differ between runs"));
        }
        for name in names {
            if trees[0][name] != trees[1][name] {
                failures.push(format!("{label}: {name} differs between runs"));
            }
        }
    }
    finish(
        "criterion 8 (deterministic artifacts)",
        start,
        Duration::from_secs(30),
        failures,
        "run + waveguide subcommands executed twice, full output trees compared".into(),
    );
}
