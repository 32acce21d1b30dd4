//! Expected ebit generation time of a heralded photonic link.
//!
//! Each attempt entangles a local qubit with a photon on both ends
//! (probability `p = p_ht·ν_h·ν_t`), sends the photons to a midpoint Bell
//! measurement and waits for the herald. The end-to-end success probability
//! is `p_e = ½·ν_o·p²·exp(-d/L_0)`; successful and failed attempts take
//!
//! ```text
//! T_s = τ_p + max(τ_h, τ_t + d/c_f + τ_o)
//! T_f = τ_p + max(τ_h, τ_t + d/c_f + τ_o, τ_c)
//! ```
//!
//! and the expected generation time is `(p_e·T_s + (1 - p_e)·T_f) / p_e`.
//! Durations are in microseconds.

use std::path::Path;

use num_traits::Float;
use serde::Deserialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EbitError {
    #[error("parameter `{0}` out of range")]
    Range(&'static str),
    #[error("end-to-end success probability is zero; generation never completes")]
    Unreachable,
    #[error("unknown ebit model preset `{0}`")]
    UnknownPreset(String),
    #[error("cannot parse ebit model: {0}")]
    Format(String),
    #[error("cannot read ebit model: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EbitLinkParams<F> {
    pub p_ht: F,
    pub nu_h: F,
    pub nu_t: F,
    pub nu_o: F,
    /// Fiber attenuation length, km.
    pub l0_km: F,
    /// Link length, km.
    pub d_km: F,
    /// Speed of light in fiber, m/s.
    pub c_f: F,
    pub tau_p_us: F,
    pub tau_h_us: F,
    pub tau_t_us: F,
    pub tau_o_us: F,
    pub tau_c_us: F,
}

fn lit<F: Float>(v: f64) -> F {
    F::from(v).expect("literal representable")
}

// negated comparisons reject NaN as well
#[allow(clippy::neg_cmp_op_on_partial_ord)]
impl<F: Float> EbitLinkParams<F> {
    /// Neutral-atom link at distance `d_km`.
    pub fn neutral_atom(d_km: F) -> Self {
        Self {
            p_ht: lit(0.53),
            nu_h: lit(0.8),
            nu_t: lit(0.8),
            nu_o: lit(0.39),
            l0_km: lit(22.0),
            d_km,
            c_f: lit(2e8),
            tau_p_us: lit(5.9),
            tau_h_us: lit(20.0),
            tau_t_us: lit(10.0),
            tau_o_us: lit(10.0),
            tau_c_us: lit(100.0),
        }
    }

    pub fn at_distance(self, d_km: F) -> Self {
        Self { d_km, ..self }
    }

    pub fn validate(&self) -> Result<(), EbitError> {
        let unit = |v: F| v >= F::zero() && v <= F::one();
        let eff = |v: F| v > F::zero() && v <= F::one();
        // p_ht may be zero: the link is then valid but never succeeds.
        if !unit(self.p_ht) {
            return Err(EbitError::Range("p_ht"));
        }
        for (name, v) in [
            ("nu_h", self.nu_h),
            ("nu_t", self.nu_t),
            ("nu_o", self.nu_o),
        ] {
            if !eff(v) {
                return Err(EbitError::Range(name));
            }
        }
        if !(self.l0_km > F::zero()) {
            return Err(EbitError::Range("l0_km"));
        }
        if !(self.c_f > F::zero()) {
            return Err(EbitError::Range("c_f"));
        }
        if !(self.d_km >= F::zero()) {
            return Err(EbitError::Range("d_km"));
        }
        for (name, v) in [
            ("tau_p_us", self.tau_p_us),
            ("tau_h_us", self.tau_h_us),
            ("tau_t_us", self.tau_t_us),
            ("tau_o_us", self.tau_o_us),
            ("tau_c_us", self.tau_c_us),
        ] {
            if !(v >= F::zero()) {
                return Err(EbitError::Range(name));
            }
        }
        Ok(())
    }

    pub fn local_success_probability(&self) -> F {
        self.p_ht * self.nu_h * self.nu_t
    }

    pub fn end_to_end_success_probability(&self) -> F {
        let p = self.local_success_probability();
        lit::<F>(0.5) * self.nu_o * p * p * (-self.d_km / self.l0_km).exp()
    }

    /// Photon travel plus acknowledgement, μs.
    fn fiber_us(&self) -> F {
        self.d_km * lit(1e3) / self.c_f * lit(1e6)
    }

    /// `(T_s, T_f)` in μs.
    pub fn attempt_times(&self) -> (F, F) {
        let photon = self.tau_t_us + self.fiber_us() + self.tau_o_us;
        let ts = self.tau_p_us + self.tau_h_us.max(photon);
        let tf = self.tau_p_us + self.tau_h_us.max(photon).max(self.tau_c_us);
        (ts, tf)
    }

    /// Expected generation time, μs.
    pub fn expected_ebit_time(&self) -> Result<F, EbitError> {
        self.validate()?;
        let pe = self.end_to_end_success_probability();
        if pe <= F::zero() {
            return Err(EbitError::Unreachable);
        }
        let (ts, tf) = self.attempt_times();
        Ok((pe * ts + (F::one() - pe) * tf) / pe)
    }
}

/// A link model, or a fixed generation time for platforms without a
/// parameter set.
#[derive(Debug, Clone, PartialEq)]
pub enum EbitModel<F> {
    Link(EbitLinkParams<F>),
    Fixed { t_ebit_us: F },
}

/// Named models. Fixed values span the generation times reported for
/// superconducting (10–1000 μs) and trapped-ion (≈5.5 ms, 2–17 s) links.
pub const PRESET_NAMES: [&str; 7] = [
    "neutral_atom",
    "superconducting_fast",
    "superconducting_slow",
    "ion_trap",
    "ion_trap_slow_min",
    "ion_trap_slow_max",
    "ideal",
];

impl<F: Float> EbitModel<F> {
    pub fn preset(name: &str) -> Result<Self, EbitError> {
        let fixed = |us: f64| EbitModel::Fixed { t_ebit_us: lit(us) };
        Ok(match name {
            "neutral_atom" => EbitModel::Link(EbitLinkParams::neutral_atom(F::zero())),
            "superconducting_fast" => fixed(10.0),
            "superconducting_slow" => fixed(1_000.0),
            "ion_trap" => fixed(5_500.0),
            "ion_trap_slow_min" => fixed(2e6),
            "ion_trap_slow_max" => fixed(17e6),
            "ideal" => fixed(0.0),
            _ => return Err(EbitError::UnknownPreset(name.to_string())),
        })
    }

    /// Expected generation time at `d_km`, μs. Fixed models ignore distance.
    pub fn time_us(&self, d_km: F) -> Result<F, EbitError> {
        match self {
            EbitModel::Link(p) => p.at_distance(d_km).expected_ebit_time(),
            EbitModel::Fixed { t_ebit_us } if *t_ebit_us >= F::zero() => Ok(*t_ebit_us),
            EbitModel::Fixed { .. } => Err(EbitError::Range("t_ebit_us")),
        }
    }
}

impl EbitModel<f64> {
    /// Generation time rounded to whole nanoseconds.
    pub fn time_ns(&self, d_km: f64) -> Result<i64, EbitError> {
        Ok((self.time_us(d_km)? * 1e3).round() as i64)
    }

    /// Parses a model description: a preset name, a fixed time, or link
    /// parameters layered over an optional preset.
    ///
    /// ```toml
    /// preset = "neutral_atom"
    /// tau_c_us = 80.0
    /// ```
    pub fn from_toml(text: &str) -> Result<Self, EbitError> {
        let file: ModelFile = toml::from_str(text).map_err(|e| EbitError::Format(e.to_string()))?;
        file.into_model()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EbitError> {
        let text = std::fs::read_to_string(path).map_err(|e| EbitError::Io(e.to_string()))?;
        Self::from_toml(&text)
    }
}

/// On-disk / inline model schema. Every link field is optional when a link
/// preset supplies defaults.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub preset: Option<String>,
    pub t_ebit_us: Option<f64>,
    pub p_ht: Option<f64>,
    pub nu_h: Option<f64>,
    pub nu_t: Option<f64>,
    pub nu_o: Option<f64>,
    pub l0_km: Option<f64>,
    pub c_f: Option<f64>,
    pub tau_p_us: Option<f64>,
    pub tau_h_us: Option<f64>,
    pub tau_t_us: Option<f64>,
    pub tau_o_us: Option<f64>,
    pub tau_c_us: Option<f64>,
}

impl ModelFile {
    pub fn into_model(self) -> Result<EbitModel<f64>, EbitError> {
        if let Some(t) = self.t_ebit_us {
            return Ok(EbitModel::Fixed { t_ebit_us: t });
        }
        let base = match self.preset.as_deref() {
            Some(name) => EbitModel::preset(name)?,
            None => {
                // A bare parameter set must be complete.
                let all = [
                    self.p_ht,
                    self.nu_h,
                    self.nu_t,
                    self.nu_o,
                    self.l0_km,
                    self.c_f,
                    self.tau_p_us,
                    self.tau_h_us,
                    self.tau_t_us,
                    self.tau_o_us,
                    self.tau_c_us,
                ];
                if all.iter().any(Option::is_none) {
                    return Err(EbitError::Format(
                        "link model needs a preset or all link parameters".into(),
                    ));
                }
                EbitModel::Link(EbitLinkParams::neutral_atom(0.0))
            }
        };
        let EbitModel::Link(mut p) = base else {
            return Ok(base);
        };
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut p.p_ht, self.p_ht);
        set(&mut p.nu_h, self.nu_h);
        set(&mut p.nu_t, self.nu_t);
        set(&mut p.nu_o, self.nu_o);
        set(&mut p.l0_km, self.l0_km);
        set(&mut p.c_f, self.c_f);
        set(&mut p.tau_p_us, self.tau_p_us);
        set(&mut p.tau_h_us, self.tau_h_us);
        set(&mut p.tau_t_us, self.tau_t_us);
        set(&mut p.tau_o_us, self.tau_o_us);
        set(&mut p.tau_c_us, self.tau_c_us);
        p.validate()?;
        Ok(EbitModel::Link(p))
    }
}
