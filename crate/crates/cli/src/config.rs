//! Run configuration: defaults, plain-text config files, flag overrides.

use std::path::PathBuf;

use qwalk2_core::{LatticeSpec, Statistics};

use crate::error::{CliError, Result};

/// Artifacts a `run` invocation can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputKind {
    PositionCorr,
    MomentumCorr,
    Density,
    MinorDiag,
    Cowalk,
    WaveguideCheck,
}

impl OutputKind {
    pub const ALL: [OutputKind; 6] = [
        OutputKind::PositionCorr,
        OutputKind::MomentumCorr,
        OutputKind::Density,
        OutputKind::MinorDiag,
        OutputKind::Cowalk,
        OutputKind::WaveguideCheck,
    ];

    pub fn token(self) -> &'static str {
        match self {
            OutputKind::PositionCorr => "position_corr",
            OutputKind::MomentumCorr => "momentum_corr",
            OutputKind::Density => "density",
            OutputKind::MinorDiag => "minor_diag",
            OutputKind::Cowalk => "cowalk",
            OutputKind::WaveguideCheck => "waveguide_check",
        }
    }
}

impl std::str::FromStr for OutputKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        OutputKind::ALL
            .into_iter()
            .find(|k| k.token() == s)
            .ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown output kind '{s}' (expected one of: {})",
                    OutputKind::ALL.map(OutputKind::token).join(", ")
                ))
            })
    }
}

/// A fully resolved scenario. All times are in units of 1/J (the interface
/// works in Jt); the physical time handed to the propagator is jt / J.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec: LatticeSpec,
    pub initial: (i32, i32),
    /// Largest sample time, in Jt.
    pub time_max: f64,
    pub n_times: usize,
    pub outputs: Vec<OutputKind>,
    pub out_dir: PathBuf,
    pub heatmaps: bool,
}

impl RunConfig {
    /// Uniform sample grid Jt_k = k * time_max / n_times, k = 1..n_times.
    pub fn sample_times_jt(&self) -> Vec<f64> {
        (1..=self.n_times)
            .map(|k| self.time_max * k as f64 / self.n_times as f64)
            .collect()
    }
}

/// Raw parameter values collected from flags; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub statistics: Option<Statistics>,
    pub l_max: Option<i32>,
    pub j: Option<f64>,
    pub v: Option<f64>,
    pub time_max: Option<f64>,
    pub n_times: Option<usize>,
    pub initial: Option<(i32, i32)>,
    pub out_dir: Option<PathBuf>,
    pub outputs: Option<Vec<OutputKind>>,
    pub heatmaps: Option<bool>,
}

pub fn parse_initial(s: &str) -> Result<(i32, i32)> {
    let err = || {
        CliError::Validation(format!(
            "initial pair must be 'l1,l2' with integer sites, got '{s}'"
        ))
    };
    let (a, b) = s.split_once(',').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

pub fn parse_outputs(s: &str) -> Result<Vec<OutputKind>> {
    let mut kinds = Vec::new();
    for token in s.split(',') {
        let kind: OutputKind = token.trim().parse()?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    if kinds.is_empty() {
        return Err(CliError::Validation("outputs list is empty".into()));
    }
    Ok(kinds)
}

fn parse_bool(s: &str, line: usize) -> Result<bool> {
    match s {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(CliError::Validation(format!(
            "config line {line}: expected true or false, got '{s}'"
        ))),
    }
}

fn numeric<T: std::str::FromStr>(s: &str, key: &str, line: usize) -> Result<T> {
    s.parse().map_err(|_| {
        CliError::Validation(format!("config line {line}: cannot parse {key} from '{s}'"))
    })
}

/// Resolves a scenario from (in increasing precedence) built-in defaults,
/// an optional `key = value` config file, and command-line overrides.
///
/// Config file syntax: one `key = value` per line; blank lines and lines
/// starting with `#` are skipped; unknown keys are an error naming the line.
pub fn parse_config(file_text: Option<&str>, flags: &Overrides) -> Result<RunConfig> {
    let mut file = Overrides::default();
    if let Some(text) = file_text {
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| {
                CliError::Validation(format!(
                    "config line {line}: expected 'key = value', got '{trimmed}'"
                ))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "statistics" => {
                    file.statistics = Some(value.parse().map_err(|e: qwalk2_core::Error| {
                        CliError::Validation(format!("config line {line}: {e}"))
                    })?)
                }
                "L" => file.l_max = Some(numeric(value, "L", line)?),
                "J" => file.j = Some(numeric(value, "J", line)?),
                "V" => file.v = Some(numeric(value, "V", line)?),
                "tmax" => file.time_max = Some(numeric(value, "tmax", line)?),
                "nt" => file.n_times = Some(numeric(value, "nt", line)?),
                "init" => file.initial = Some(parse_initial(value)?),
                "out" => file.out_dir = Some(PathBuf::from(value)),
                "outputs" => file.outputs = Some(parse_outputs(value)?),
                "heatmaps" => file.heatmaps = Some(parse_bool(value, line)?),
                _ => {
                    return Err(CliError::Validation(format!(
                        "config line {line}: unknown key '{key}'"
                    )))
                }
            }
        }
    }

    let pick = |flag: Option<Statistics>, file: Option<Statistics>| flag.or(file);
    let statistics = pick(flags.statistics, file.statistics).unwrap_or(Statistics::Bose);
    let l_max = flags.l_max.or(file.l_max).unwrap_or(10);
    let j = flags.j.or(file.j).unwrap_or(1.0);
    let v = flags.v.or(file.v).unwrap_or(0.0);
    let time_max = flags.time_max.or(file.time_max).unwrap_or(4.0);
    let n_times = flags.n_times.or(file.n_times).unwrap_or(8);
    let initial = flags.initial.or(file.initial).unwrap_or((0, 1));
    let out_dir = flags
        .out_dir
        .clone()
        .or(file.out_dir)
        .unwrap_or_else(|| PathBuf::from("."));
    let outputs = flags.outputs.clone().or(file.outputs).unwrap_or_else(|| {
        vec![
            OutputKind::PositionCorr,
            OutputKind::MomentumCorr,
            OutputKind::Density,
            OutputKind::MinorDiag,
        ]
    });
    let heatmaps = flags.heatmaps.or(file.heatmaps).unwrap_or(false);

    let spec = LatticeSpec::new(l_max, j, v, statistics)?;
    if time_max <= 0.0 {
        return Err(CliError::Validation(format!(
            "tmax must be positive, got {time_max}"
        )));
    }
    if n_times < 2 {
        return Err(CliError::Validation(format!(
            "nt must be at least 2, got {n_times}"
        )));
    }
    for site in [initial.0, initial.1] {
        if site.abs() > l_max {
            return Err(CliError::Validation(format!(
                "initial site {site} outside the lattice (L = {l_max})"
            )));
        }
    }
    Ok(RunConfig {
        spec,
        initial,
        time_max,
        n_times,
        outputs,
        out_dir,
        heatmaps,
    })
}
