//! Hardware delay profiles.
//!
//! Bundled presets carry averaged gate, measurement and reset times of
//! superconducting (IBM Eagle/Heron), trapped-ion (IonQ Aria/Forte) and
//! neutral-atom backends, in nanoseconds.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::circuit::OpKind;
use crate::time::Time;

#[derive(Debug, Error)]
pub enum ProfileError {
    #[error("unknown profile preset `{0}`")]
    UnknownPreset(String),
    #[error("profile field `{0}` must be non-negative")]
    Negative(String),
    #[error("ebit split exceeds total: t_ebit_h {h} > t_ebit {total}")]
    EbitSplit { h: String, total: String },
    #[error("unknown override key `{0}` (expected an opcode mnemonic or `macro:<label>`)")]
    BadOverrideKey(String),
    #[error("cannot parse profile: {0}")]
    Format(String),
    #[error("cannot read profile: {0}")]
    Io(#[from] std::io::Error),
}

/// Per-opcode durations.
#[derive(Debug, Clone, PartialEq)]
pub struct DelayProfile<T> {
    pub name: String,
    pub t_q1: T,
    pub t_q2: T,
    pub t_measure: T,
    pub t_reset: T,
    pub t_ebit_h: T,
    pub t_ebit_cx: T,
    /// Added to every classically conditioned instruction.
    pub t_classical_ff: T,
    /// Keyed by opcode mnemonic (`"cx"`) or `"macro:<label>"`.
    pub overrides: BTreeMap<String, T>,
}

/// Preset table in integer nanoseconds:
/// `(name, t_q1, t_q2, t_measure, t_reset)`.
pub const PRESETS: [(&str, i64, i64, i64, i64); 8] = [
    ("eagle_sherbrooke", 57, 533, 1_216, 1_276),
    ("heron_r1_torino", 32, 68, 1_560, 1_708),
    ("heron_r2_fez", 24, 84, 1_560, 1_584),
    ("heron_r2_marrakesh", 36, 68, 2_100, 2_236),
    ("aria_1", 135_000, 600_000, 300_000, 20_000),
    ("aria_2", 135_000, 600_000, 50_000, 15_000),
    ("forte", 130_000, 970_000, 150_000, 50_000),
    // Reset = measurement followed by one single-qubit gate.
    ("neutral_atom", 2_000, 400, 10_000_000, 10_002_000),
];

fn cast<T: Time>(v: i64) -> T {
    <T as num_traits::NumCast>::from(v).expect("preset value representable")
}

impl<T: Time> DelayProfile<T> {
    /// Profile with the given basic durations; ebit and feed-forward times
    /// are zero.
    pub fn new(name: impl Into<String>, t_q1: T, t_q2: T, t_measure: T, t_reset: T) -> Self {
        Self {
            name: name.into(),
            t_q1,
            t_q2,
            t_measure,
            t_reset,
            t_ebit_h: T::zero(),
            t_ebit_cx: T::zero(),
            t_classical_ff: T::zero(),
            overrides: BTreeMap::new(),
        }
    }

    /// Every operation takes one time unit, ebit generation included.
    pub fn unit() -> Self {
        let one = T::one();
        Self::new("unit", one, one, one, one).with_ebit(one)
    }

    /// Named hardware profile; `unit` gives every class a delay of 1.
    pub fn preset(name: &str) -> Result<Self, ProfileError> {
        if name == "unit" {
            return Ok(Self::unit());
        }
        PRESETS
            .iter()
            .find(|p| p.0 == name)
            .map(|&(n, q1, q2, m, r)| Self::new(n, cast(q1), cast(q2), cast(m), cast(r)))
            .ok_or_else(|| ProfileError::UnknownPreset(name.to_string()))
    }

    pub fn preset_names() -> impl Iterator<Item = &'static str> {
        PRESETS.iter().map(|p| p.0)
    }

    /// Sets the total ebit generation time, all of it on the `ebit_cx` half.
    pub fn with_ebit(mut self, t_ebit: T) -> Self {
        self.t_ebit_h = T::zero();
        self.t_ebit_cx = t_ebit;
        self
    }

    pub fn with_classical_ff(mut self, t_ff: T) -> Self {
        self.t_classical_ff = t_ff;
        self
    }

    pub fn with_override(mut self, key: impl Into<String>, t: T) -> Self {
        self.overrides.insert(key.into(), t);
        self
    }

    pub fn t_ebit(&self) -> T {
        self.t_ebit_h + self.t_ebit_cx
    }

    /// Multiplies every duration by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            name: self.name.clone(),
            t_q1: self.t_q1 * factor,
            t_q2: self.t_q2 * factor,
            t_measure: self.t_measure * factor,
            t_reset: self.t_reset * factor,
            t_ebit_h: self.t_ebit_h * factor,
            t_ebit_cx: self.t_ebit_cx * factor,
            t_classical_ff: self.t_classical_ff * factor,
            overrides: self
                .overrides
                .iter()
                .map(|(k, v)| (k.clone(), *v * factor))
                .collect(),
        }
    }

    /// Class default for an opcode, before overrides.
    pub fn class_delay(&self, kind: OpKind) -> Option<T> {
        Some(match kind {
            OpKind::H | OpKind::X | OpKind::Y | OpKind::Z | OpKind::I | OpKind::P => self.t_q1,
            OpKind::CX | OpKind::CP => self.t_q2,
            OpKind::Measure => self.t_measure,
            OpKind::Reset => self.t_reset,
            OpKind::EbitH => self.t_ebit_h,
            OpKind::EbitCx => self.t_ebit_cx,
            OpKind::Macro => return None,
        })
    }

    pub fn validate(&self) -> Result<(), ProfileError> {
        let fields = [
            ("t_q1", self.t_q1),
            ("t_q2", self.t_q2),
            ("t_measure", self.t_measure),
            ("t_reset", self.t_reset),
            ("t_ebit_h", self.t_ebit_h),
            ("t_ebit_cx", self.t_ebit_cx),
            ("t_classical_ff", self.t_classical_ff),
        ];
        for (name, v) in fields {
            if v < T::zero() {
                return Err(ProfileError::Negative(name.to_string()));
            }
        }
        for (key, v) in &self.overrides {
            if !key.starts_with("macro:") && OpKind::from_mnemonic(key).is_none() {
                return Err(ProfileError::BadOverrideKey(key.clone()));
            }
            if *v < T::zero() {
                return Err(ProfileError::Negative(key.clone()));
            }
        }
        Ok(())
    }

    /// Resolves a preset name or a TOML profile file path.
    pub fn resolve(name_or_path: &str) -> Result<Self, ProfileError>
    where
        T: for<'de> Deserialize<'de>,
    {
        match Self::preset(name_or_path) {
            Ok(p) => Ok(p),
            Err(_) if Path::new(name_or_path).exists() => Self::load(name_or_path),
            Err(e) => Err(e),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ProfileError>
    where
        T: for<'de> Deserialize<'de>,
    {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, ProfileError>
    where
        T: for<'de> Deserialize<'de>,
    {
        let file: ProfileFile<T> =
            toml::from_str(text).map_err(|e| ProfileError::Format(e.to_string()))?;
        file.into_profile()
    }
}

/// On-disk profile schema.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileFile<T> {
    name: String,
    t_q1_ns: T,
    t_q2_ns: T,
    t_measure_ns: T,
    t_reset_ns: T,
    t_ebit_ns: Option<T>,
    t_ebit_h_ns: Option<T>,
    t_classical_ff_ns: Option<T>,
    #[serde(default = "BTreeMap::new")]
    overrides: BTreeMap<String, T>,
}

impl<T: Time> ProfileFile<T> {
    fn into_profile(self) -> Result<DelayProfile<T>, ProfileError> {
        let t_ebit = self.t_ebit_ns.unwrap_or_else(T::zero);
        let t_ebit_h = self.t_ebit_h_ns.unwrap_or_else(T::zero);
        if t_ebit_h > t_ebit {
            return Err(ProfileError::EbitSplit {
                h: t_ebit_h.to_string(),
                total: t_ebit.to_string(),
            });
        }
        let profile = DelayProfile {
            name: self.name,
            t_q1: self.t_q1_ns,
            t_q2: self.t_q2_ns,
            t_measure: self.t_measure_ns,
            t_reset: self.t_reset_ns,
            t_ebit_h,
            t_ebit_cx: t_ebit - t_ebit_h,
            t_classical_ff: self.t_classical_ff_ns.unwrap_or_else(T::zero),
            overrides: self.overrides,
        };
        profile.validate()?;
        Ok(profile)
    }
}
