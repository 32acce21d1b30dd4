//! Design-space sweeps over profiles, designs, register sizes and channels.

pub mod emit;
pub mod metrics;

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::graph::circuit_depth;
use crate::circuit::OpKind;
use crate::designs::{build, CuProvider, DesignError, DesignKind, ShorDesignSpec};
use crate::distribution::{distribute, DistributedLayout};
use crate::ebit::{EbitError, ModelFile};
use crate::profile::{DelayProfile, ProfileError};
use crate::timing::decompose::{shor_delay_decomposition, DecomposeError};
use crate::Nanos;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Ebit(#[from] EbitError),
    #[error("record check failed: {0}")]
    Check(String),
    #[error("{0}")]
    Metric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// `m` as a function of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(try_from = "toml::Value")]
pub enum MRule {
    TwoN,
    Fixed(usize),
}

impl TryFrom<toml::Value> for MRule {
    type Error = String;

    fn try_from(v: toml::Value) -> Result<Self, String> {
        match v {
            toml::Value::String(s) if s == "2n" => Ok(MRule::TwoN),
            toml::Value::Integer(i) if i >= 1 => Ok(MRule::Fixed(i as usize)),
            other => Err(format!(
                "m_rule must be \"2n\" or a positive integer, got {other}"
            )),
        }
    }
}

impl MRule {
    pub fn m(self, n: usize) -> usize {
        match self {
            MRule::TwoN => 2 * n,
            MRule::Fixed(m) => m,
        }
    }
}

/// Controlled-unitary delays.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CuModel {
    /// `t_CU = c1·n·t_q1 + c2·n²·t_q2`, rounded to whole ns.
    Poly {
        c1: f64,
        c2: f64,
    },
    Constant {
        delay_ns: Nanos,
    },
    /// One entry per block; only valid when every coordinate has the same m.
    List {
        delays_ns: Vec<Nanos>,
    },
    /// Gate-level blocks read from `<dir>/n<n>/CU_<i>.qc`.
    Import {
        dir: PathBuf,
    },
}

impl CuModel {
    pub fn provider(
        &self,
        n: usize,
        m: usize,
        profile: &DelayProfile<Nanos>,
    ) -> Result<CuProvider<Nanos>, SweepError> {
        Ok(match self {
            CuModel::Poly { c1, c2 } => {
                let nf = n as f64;
                let t = c1 * nf * profile.t_q1 as f64 + c2 * nf * nf * profile.t_q2 as f64;
                CuProvider::constant(t.round() as Nanos)
            }
            CuModel::Constant { delay_ns } => CuProvider::constant(*delay_ns),
            CuModel::List { delays_ns } => CuProvider::list(delays_ns.clone()),
            CuModel::Import { dir } => CuProvider::imported_dir(dir.join(format!("n{n}")), m)?,
        })
    }
}

/// Distributed axes.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributedConfig {
    pub k_values: Vec<usize>,
    /// Fixed generation times, ns.
    #[serde(default)]
    pub t_ebit_values: Vec<Nanos>,
    /// Link model evaluated at each of `d_values` (km).
    pub ebit_model: Option<ModelFile>,
    #[serde(default)]
    pub d_values: Vec<f64>,
}

impl DistributedConfig {
    /// The generation times to sweep, ascending and deduplicated.
    pub fn t_ebit_axis(&self) -> Result<Vec<Nanos>, SweepError> {
        let mut axis = self.t_ebit_values.clone();
        if let Some(model) = &self.ebit_model {
            if self.d_values.is_empty() {
                return Err(SweepError::Config("ebit_model needs d_values".into()));
            }
            let model = model.clone().into_model()?;
            for &d in &self.d_values {
                axis.push(model.time_ns(d)?);
            }
        }
        axis.sort_unstable();
        axis.dedup();
        Ok(axis)
    }
}

/// Baselines for relative reduction: a design for monolithic records and a
/// channel count for distributed ones.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Baselines {
    pub design: DesignKind,
    pub k: usize,
}

impl Default for Baselines {
    fn default() -> Self {
        Self {
            design: DesignKind::Iterative,
            k: 1,
        }
    }
}

impl<'de> Deserialize<'de> for DesignKind {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        DesignKind::from_name(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("unknown design `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Preset names or profile files.
    pub profiles: Vec<String>,
    pub designs: Vec<DesignKind>,
    pub n_values: Vec<usize>,
    pub m_rule: MRule,
    pub cu_model: CuModel,
    #[serde(default = "yes")]
    pub include_final_reset: bool,
    pub distributed: Option<DistributedConfig>,
    /// Output path prefix.
    pub output: PathBuf,
    #[serde(default)]
    pub baselines: Baselines,
}

fn yes() -> bool {
    true
}

impl SweepConfig {
    pub fn from_toml(text: &str) -> Result<Self, SweepError> {
        let cfg: SweepConfig =
            toml::from_str(text).map_err(|e| SweepError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads a config; relative profile, import and output paths are taken
    /// relative to the config file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, SweepError> {
        let path = path.as_ref();
        let mut cfg = Self::from_toml(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in &mut cfg.profiles {
            if DelayProfile::<Nanos>::preset(p).is_err() && Path::new(p).is_relative() {
                *p = base.join(&*p).to_string_lossy().into_owned();
            }
        }
        if let CuModel::Import { dir } = &mut cfg.cu_model {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        if cfg.output.is_relative() {
            cfg.output = base.join(&cfg.output);
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        let bad = |msg: &str| Err(SweepError::Config(msg.into()));
        if self.profiles.is_empty() || self.designs.is_empty() || self.n_values.is_empty() {
            return bad("profiles, designs and n_values must be non-empty");
        }
        if self.n_values.contains(&0) {
            return bad("n_values must be positive");
        }
        if let Some(d) = &self.distributed {
            if d.k_values.is_empty() || d.k_values.iter().any(|k| !(1..=16).contains(k)) {
                return bad("k_values must be non-empty and within 1..=16");
            }
            if d.t_ebit_values.is_empty() && d.ebit_model.is_none() {
                return bad("distributed sweep needs t_ebit_values or ebit_model");
            }
            if d.t_ebit_values.iter().any(|&t| t < 0) {
                return bad("t_ebit_values must be non-negative");
            }
        }
        Ok(())
    }

    fn resolved_profiles(&self) -> Result<Vec<DelayProfile<Nanos>>, SweepError> {
        self.profiles
            .iter()
            .map(|p| DelayProfile::resolve(p).map_err(SweepError::from))
            .collect()
    }
}

/// One row of sweep output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub design: String,
    pub profile: String,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub t_ebit_ns: Option<Nanos>,
    #[serde(rename = "t_C_ns")]
    pub t_c_ns: Nanos,
    #[serde(rename = "t_H_ns")]
    pub t_h_ns: Nanos,
    #[serde(rename = "sum_CU_ns")]
    pub sum_cu_ns: Nanos,
    #[serde(rename = "delta_P_ns")]
    pub delta_p_ns: Nanos,
    #[serde(rename = "delta_P_M_ns")]
    pub delta_p_m_ns: Nanos,
    #[serde(rename = "delta_D_ns")]
    pub delta_d_ns: Nanos,
    #[serde(rename = "delta_D_M_ns")]
    pub delta_d_m_ns: Nanos,
    pub idle_work_ns: Nanos,
    pub qubits_total: usize,
    pub ebits_used: usize,
    pub depth: usize,
    /// Σ_{i<m-1} t(P_i H M R H).
    #[serde(skip)]
    pub delta_p_m_upper_ns: Nanos,
    #[serde(skip)]
    pub delta_d_m_upper_ns: Option<Nanos>,
    #[serde(skip)]
    pub delta_d_not_m_ns: Nanos,
}

impl SweepRecord {
    /// Canonical ordering key.
    pub fn key(&self) -> (String, String, usize, usize, Option<usize>, Option<Nanos>) {
        (
            self.profile.clone(),
            self.design.clone(),
            self.n,
            self.m,
            self.k,
            self.t_ebit_ns,
        )
    }

    /// Delay identities and mitigatable-delay bounds.
    pub fn check(&self) -> Result<(), String> {
        let sum = self.t_h_ns + self.sum_cu_ns + self.delta_p_ns + self.delta_d_ns;
        if sum != self.t_c_ns {
            return Err(format!("{self:?}: t_C {} != parts {sum}", self.t_c_ns));
        }
        if self.delta_p_m_ns < 0 || self.delta_p_m_ns > self.delta_p_m_upper_ns {
            return Err(format!(
                "{self:?}: delta_P_M {} outside [0, {}]",
                self.delta_p_m_ns, self.delta_p_m_upper_ns
            ));
        }
        if let Some(upper) = self.delta_d_m_upper_ns {
            if self.delta_d_m_ns < 0 || self.delta_d_m_ns > upper {
                return Err(format!(
                    "{self:?}: delta_D_M {} outside [0, {upper}]",
                    self.delta_d_m_ns
                ));
            }
        }
        Ok(())
    }
}

/// Builds (and distributes, if `channels` is set) one design and reports it.
pub fn evaluate_point(
    spec: &ShorDesignSpec<Nanos>,
    profile: &DelayProfile<Nanos>,
    channels: Option<(usize, Nanos)>,
) -> Result<SweepRecord, SweepError> {
    let circuit = match channels {
        None => build(spec)?,
        Some((k, t_ebit)) => distribute(spec, &DistributedLayout::uniform(spec, k, t_ebit)?)?,
    };
    let report = shor_delay_decomposition(&circuit, profile)?;
    let d = report
        .decomposition
        .expect("generated designs are annotated");
    let b = report.bounds.expect("generated designs are annotated");
    Ok(SweepRecord {
        design: spec.design.name().to_string(),
        profile: profile.name.clone(),
        n: spec.n,
        m: spec.m,
        k: channels.map(|c| c.0),
        t_ebit_ns: channels.map(|c| c.1),
        t_c_ns: report.t_c,
        t_h_ns: d.t_h,
        sum_cu_ns: d.sum_cu,
        delta_p_ns: d.delta_p,
        delta_p_m_ns: d.delta_p_m,
        delta_d_ns: d.delta_d,
        delta_d_m_ns: d.delta_d_m,
        idle_work_ns: report.idle_work(),
        qubits_total: circuit.num_qubits(),
        ebits_used: circuit
            .instructions()
            .iter()
            .filter(|i| i.opcode.kind() == OpKind::EbitCx)
            .count(),
        depth: circuit_depth(&circuit),
        delta_p_m_upper_ns: b.delta_p_m_upper,
        delta_d_m_upper_ns: b.delta_d_m_upper,
        delta_d_not_m_ns: d.delta_d_not_m,
    })
}

struct Point {
    spec: ShorDesignSpec<Nanos>,
    profile: usize,
    channels: Option<(usize, Nanos)>,
}

fn run_points(
    config: &SweepConfig,
    monolithic: bool,
    distributed: bool,
) -> Result<Vec<SweepRecord>, SweepError> {
    config.validate()?;
    let profiles = config.resolved_profiles()?;
    let axes = match (&config.distributed, distributed) {
        (Some(d), true) => Some((d.k_values.clone(), d.t_ebit_axis()?)),
        (None, true) => return Err(SweepError::Config("no distributed section".into())),
        _ => None,
    };
    let mut points = Vec::new();
    for (pi, profile) in profiles.iter().enumerate() {
        for &design in &config.designs {
            for &n in &config.n_values {
                let m = config.m_rule.m(n);
                let cu = config.cu_model.provider(n, m, profile)?;
                let spec = ShorDesignSpec::new(design, n, cu)
                    .with_m(m)
                    .with_final_reset(config.include_final_reset);
                if monolithic {
                    points.push(Point {
                        spec: spec.clone(),
                        profile: pi,
                        channels: None,
                    });
                }
                if let Some((ks, ts)) = &axes {
                    for &k in ks {
                        for &t in ts {
                            points.push(Point {
                                spec: spec.clone(),
                                profile: pi,
                                channels: Some((k, t)),
                            });
                        }
                    }
                }
            }
        }
    }
    let mut records = points
        .par_iter()
        .map(|p| evaluate_point(&p.spec, &profiles[p.profile], p.channels))
        .collect::<Result<Vec<_>, _>>()?;
    records.sort_by_key(SweepRecord::key);
    Ok(records)
}

/// One record per (profile, design, n).
pub fn run_monolithic_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    run_points(config, true, false)
}

/// One record per (profile, design, n, k, t_ebit).
pub fn run_distributed_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    run_points(config, false, true)
}

/// Monolithic records, plus distributed ones when configured.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRecord>, SweepError> {
    run_points(config, true, config.distributed.is_some())
}
