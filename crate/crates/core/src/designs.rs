//! Generators for the order-finding circuit designs.
//!
//! All designs share one layout: data qubits first, then the `n`-qubit work
//! register, then (when distributed) one pair of communication qubits per
//! ebit channel. Classical bit `i < m` receives the phase bit of iteration
//! `i`; distributed circuits add two bits per controlled-unitary block for
//! the telegate measurements.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use thiserror::Error;

use crate::circuit::text::{parse_circuit, ParseError};
use crate::circuit::{BlockTag, Circuit, CircuitError, Instruction, OpKind, Qpu, Role};
use crate::distribution::DistributedLayout;
use crate::profile::DelayProfile;
use crate::time::Time;
use crate::timing::{circuit_delay, TimingError};

#[derive(Debug, Error)]
pub enum DesignError {
    #[error("CU provider supplies {got} blocks, design needs {expected}")]
    ProviderArity { expected: usize, got: usize },
    #[error("CU subcircuit {index} has {got} qubits, expected control + {expected} work qubits")]
    WorkWidth {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("CU subcircuit {index}: control qubit used outside a control position ({op})")]
    Embedding { index: usize, op: &'static str },
    #[error("CU subcircuit {index}: `{op}` is not allowed inside a controlled-unitary block")]
    NonUnitary { index: usize, op: &'static str },
    #[error("invalid design parameters: {0}")]
    Parameters(String),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Timing(#[from] TimingError),
    #[error("cannot import CU subcircuit {path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: ParseError,
    },
    #[error("cannot read CU subcircuit: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DesignKind {
    Regular,
    RegularSemiclassical,
    Iterative,
    Alternating,
}

impl DesignKind {
    pub const ALL: [DesignKind; 4] = [
        DesignKind::Regular,
        DesignKind::RegularSemiclassical,
        DesignKind::Iterative,
        DesignKind::Alternating,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DesignKind::Regular => "regular",
            DesignKind::RegularSemiclassical => "regular_semiclassical",
            DesignKind::Iterative => "iterative",
            DesignKind::Alternating => "alternating",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.name() == s)
    }

    /// Phase corrections use classically conditioned rotations everywhere
    /// except in the full-QFT regular design.
    pub fn phase_mode(self) -> PhaseMode {
        match self {
            DesignKind::Regular => PhaseMode::Quantum,
            _ => PhaseMode::Classical,
        }
    }

    pub fn data_qubits(self, m: usize) -> usize {
        match self {
            DesignKind::Regular | DesignKind::RegularSemiclassical => m,
            DesignKind::Iterative => 1,
            DesignKind::Alternating => m.min(2),
        }
    }
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseMode {
    /// Two-qubit controlled rotations.
    Quantum,
    /// Single-qubit rotations conditioned on earlier measurement bits.
    Classical,
}

/// CU delays as a list or as a function of `(i, n)`.
#[derive(Clone)]
pub enum AbstractDelays<T> {
    List(Vec<T>),
    Function(Arc<dyn Fn(usize, usize) -> T + Send + Sync>),
}

impl<T: fmt::Debug> fmt::Debug for AbstractDelays<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AbstractDelays::List(v) => f.debug_tuple("List").field(v).finish(),
            AbstractDelays::Function(_) => f.write_str("Function(..)"),
        }
    }
}

/// Source of the controlled-unitary blocks.
#[derive(Debug, Clone)]
pub enum CuProvider<T> {
    /// Opaque macro blocks spanning the control and the whole work register.
    Abstract(AbstractDelays<T>),
    /// Gate-level subcircuits: qubit 0 is the control, qubits `1..=n` map
    /// onto the work register.
    Explicit(Vec<Circuit<T>>),
}

impl<T: Time> CuProvider<T> {
    pub fn constant(delay: T) -> Self {
        CuProvider::Abstract(AbstractDelays::Function(Arc::new(move |_, _| delay)))
    }

    pub fn list(delays: Vec<T>) -> Self {
        CuProvider::Abstract(AbstractDelays::List(delays))
    }

    pub fn function(f: impl Fn(usize, usize) -> T + Send + Sync + 'static) -> Self {
        CuProvider::Abstract(AbstractDelays::Function(Arc::new(f)))
    }

    /// Reads one circuit file per block.
    pub fn imported<P: AsRef<Path>>(paths: &[P]) -> Result<Self, DesignError> {
        let mut subs = Vec::with_capacity(paths.len());
        for p in paths {
            let text = std::fs::read_to_string(p)?;
            let sub = parse_circuit(&text).map_err(|source| DesignError::Parse {
                path: p.as_ref().display().to_string(),
                source,
            })?;
            subs.push(sub);
        }
        Ok(CuProvider::Explicit(subs))
    }

    /// Reads `CU_<i>.qc` for `i = 0..m` from a directory.
    pub fn imported_dir(dir: impl AsRef<Path>, m: usize) -> Result<Self, DesignError> {
        let paths: Vec<_> = (0..m)
            .map(|i| dir.as_ref().join(format!("CU_{i}.qc")))
            .collect();
        Self::imported(&paths)
    }
}

#[derive(Debug, Clone)]
pub struct ShorDesignSpec<T> {
    /// Work-register width.
    pub n: usize,
    /// Number of phase bits (data-register width of the regular design).
    pub m: usize,
    pub design: DesignKind,
    pub cu: CuProvider<T>,
    /// Reset each data qubit after its final measurement.
    pub include_final_reset: bool,
}

impl<T: Time> ShorDesignSpec<T> {
    /// Spec with `m = 2n` and final resets enabled.
    pub fn new(design: DesignKind, n: usize, cu: CuProvider<T>) -> Self {
        Self {
            n,
            m: 2 * n,
            design,
            cu,
            include_final_reset: true,
        }
    }

    pub fn with_m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn with_final_reset(mut self, on: bool) -> Self {
        self.include_final_reset = on;
        self
    }

    pub fn with_design(&self, design: DesignKind) -> Self {
        Self {
            design,
            ..self.clone()
        }
    }

    pub fn data_qubits(&self) -> usize {
        self.design.data_qubits(self.m)
    }

    /// Data plus work qubits.
    pub fn compute_qubits(&self) -> usize {
        self.data_qubits() + self.n
    }

    pub fn validate(&self) -> Result<(), DesignError> {
        if self.m == 0 || self.n == 0 {
            return Err(DesignError::Parameters(format!(
                "need m >= 1 and n >= 1, got m={} n={}",
                self.m, self.n
            )));
        }
        match &self.cu {
            CuProvider::Abstract(AbstractDelays::List(v)) if v.len() != self.m => {
                Err(DesignError::ProviderArity {
                    expected: self.m,
                    got: v.len(),
                })
            }
            CuProvider::Abstract(AbstractDelays::List(v)) if v.iter().any(|d| *d < T::zero()) => {
                Err(DesignError::Parameters("negative CU delay".into()))
            }
            CuProvider::Explicit(subs) => {
                if subs.len() != self.m {
                    return Err(DesignError::ProviderArity {
                        expected: self.m,
                        got: subs.len(),
                    });
                }
                subs.iter()
                    .enumerate()
                    .try_for_each(|(i, s)| check_subcircuit(i, s, self.n))
            }
            _ => Ok(()),
        }
    }

    /// Delay of each CU block under `profile`.
    pub fn cu_delays(&self, profile: &DelayProfile<T>) -> Result<Vec<T>, DesignError> {
        self.validate()?;
        match &self.cu {
            CuProvider::Abstract(AbstractDelays::List(v)) => Ok(v.clone()),
            CuProvider::Abstract(AbstractDelays::Function(f)) => {
                let v: Vec<T> = (0..self.m).map(|i| f(i, self.n)).collect();
                if v.iter().any(|d| *d < T::zero()) {
                    return Err(DesignError::Parameters("negative CU delay".into()));
                }
                Ok(v)
            }
            CuProvider::Explicit(subs) => subs
                .iter()
                .map(|s| circuit_delay(s, profile).map_err(DesignError::from))
                .collect(),
        }
    }
}

fn check_subcircuit<T: Time>(index: usize, sub: &Circuit<T>, n: usize) -> Result<(), DesignError> {
    if sub.num_qubits() != n + 1 {
        return Err(DesignError::WorkWidth {
            index,
            expected: n,
            got: sub.num_qubits(),
        });
    }
    for inst in sub.instructions() {
        let kind = inst.opcode.kind();
        if matches!(
            kind,
            OpKind::Measure | OpKind::Reset | OpKind::EbitH | OpKind::EbitCx
        ) || inst.is_conditioned()
        {
            return Err(DesignError::NonUnitary {
                index,
                op: kind.mnemonic(),
            });
        }
        let touches_control = inst.qubits.contains(&0);
        let as_control = matches!(kind, OpKind::CX | OpKind::CP) && inst.qubits[0] == 0;
        if touches_control && !as_control {
            return Err(DesignError::Embedding {
                index,
                op: kind.mnemonic(),
            });
        }
    }
    Ok(())
}

/// Phase correction `P_j`: `j` rotations by `-2π/2^(k+1)`, `k = 1..=j`,
/// each controlled by result `j - k`.
///
/// `sources[l]` is the qubit (quantum mode) or classical bit (classical mode)
/// holding result `l`.
pub fn phase_correction<T: Time>(
    j: usize,
    mode: PhaseMode,
    target: usize,
    sources: &[usize],
) -> Vec<Instruction<T>> {
    (1..=j)
        .map(|k| {
            let theta = -2.0 * std::f64::consts::PI / 2f64.powi((k + 1) as i32);
            let src = sources[j - k];
            match mode {
                PhaseMode::Quantum => Instruction::cp(theta, src, target),
                PhaseMode::Classical => Instruction::p(theta, target).when([src]),
            }
        })
        .collect()
}

/// t(P_i H M R H): serial delay of one full phase-processing step.
pub fn phase_block_delay<T: Time>(
    i: usize,
    mode: PhaseMode,
    profile: &DelayProfile<T>,
) -> Result<T, TimingError> {
    // Target qubit 0, quantum controls on 1..=i, classical results on 0..i.
    let sources: Vec<usize> = match mode {
        PhaseMode::Quantum => (1..=i).collect(),
        PhaseMode::Classical => (0..i).collect(),
    };
    let mut c = Circuit::plain(i + 1, i + 1);
    c.extend(phase_correction(i, mode, 0, &sources))
        .expect("scratch block is well formed");
    c.extend([
        Instruction::h(0),
        Instruction::measure(0, i),
        Instruction::reset(0),
        Instruction::h(0),
    ])
    .expect("scratch block is well formed");
    circuit_delay(&c, profile)
}

/// Outcome of a zero-idle test: per-index slack and whether all are ≥ 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroIdleCheck<T> {
    pub holds: bool,
    pub margins: Vec<T>,
}

/// Checks `t(CU_{i+1}) ≥ t(P_i H M R H)` for `i = 0..m-1`.
pub fn check_alternating_zero_idle<T: Time>(
    spec: &ShorDesignSpec<T>,
    profile: &DelayProfile<T>,
) -> Result<ZeroIdleCheck<T>, DesignError> {
    let cu = spec.cu_delays(profile)?;
    let mode = spec.design.phase_mode();
    let margins = (0..spec.m.saturating_sub(1))
        .map(|i| Ok(cu[i + 1] - phase_block_delay(i, mode, profile)?))
        .collect::<Result<Vec<T>, DesignError>>()?;
    Ok(ZeroIdleCheck {
        holds: margins.iter().all(|m| *m >= T::zero()),
        margins,
    })
}

pub fn build_regular<T: Time>(spec: &ShorDesignSpec<T>) -> Result<Circuit<T>, DesignError> {
    expect_kind(spec, DesignKind::Regular)?;
    build_design(spec, None)
}

pub fn build_regular_semiclassical<T: Time>(
    spec: &ShorDesignSpec<T>,
) -> Result<Circuit<T>, DesignError> {
    expect_kind(spec, DesignKind::RegularSemiclassical)?;
    build_design(spec, None)
}

pub fn build_iterative<T: Time>(spec: &ShorDesignSpec<T>) -> Result<Circuit<T>, DesignError> {
    expect_kind(spec, DesignKind::Iterative)?;
    build_design(spec, None)
}

pub fn build_alternating<T: Time>(spec: &ShorDesignSpec<T>) -> Result<Circuit<T>, DesignError> {
    expect_kind(spec, DesignKind::Alternating)?;
    build_design(spec, None)
}

/// Monolithic circuit for whichever design the spec names.
pub fn build<T: Time>(spec: &ShorDesignSpec<T>) -> Result<Circuit<T>, DesignError> {
    build_design(spec, None)
}

fn expect_kind<T>(spec: &ShorDesignSpec<T>, kind: DesignKind) -> Result<(), DesignError> {
    if spec.design != kind {
        return Err(DesignError::Parameters(format!(
            "spec names the {} design, builder expects {}",
            spec.design, kind
        )));
    }
    Ok(())
}

/// Builds a design, replacing each CU by a telegate when `layout` is given.
pub(crate) fn build_design<T: Time>(
    spec: &ShorDesignSpec<T>,
    layout: Option<&DistributedLayout<T>>,
) -> Result<Circuit<T>, DesignError> {
    spec.validate()?;
    let mut b = Builder::new(spec, layout)?;
    match spec.design {
        DesignKind::Regular | DesignKind::RegularSemiclassical => b.regular()?,
        DesignKind::Iterative => b.iterative()?,
        DesignKind::Alternating => b.alternating()?,
    }
    Ok(b.circuit)
}

struct Builder<'a, T> {
    spec: &'a ShorDesignSpec<T>,
    layout: Option<&'a DistributedLayout<T>>,
    circuit: Circuit<T>,
    data: Vec<usize>,
    work: Vec<usize>,
    channel_used: Vec<bool>,
}

impl<'a, T: Time> Builder<'a, T> {
    fn new(
        spec: &'a ShorDesignSpec<T>,
        layout: Option<&'a DistributedLayout<T>>,
    ) -> Result<Self, DesignError> {
        let nd = spec.data_qubits();
        let data: Vec<usize> = (0..nd).collect();
        let work: Vec<usize> = (nd..nd + spec.n).collect();
        let mut roles = BTreeMap::new();
        let mut partition = BTreeMap::new();
        for &q in &data {
            roles.insert(q, Role::Data);
        }
        for &q in &work {
            roles.insert(q, Role::Work);
        }
        let mut num_qubits = nd + spec.n;
        let mut num_clbits = spec.m;
        if let Some(layout) = layout {
            layout.validate_for(spec)?;
            data.iter().for_each(|&q| {
                partition.insert(q, Qpu::A);
            });
            work.iter().for_each(|&q| {
                partition.insert(q, Qpu::B);
            });
            for ch in layout.channels() {
                roles.insert(ch.c_on_a, Role::Comm);
                roles.insert(ch.c_on_b, Role::Comm);
                partition.insert(ch.c_on_a, Qpu::A);
                partition.insert(ch.c_on_b, Qpu::B);
            }
            num_qubits += 2 * layout.k();
            num_clbits += 2 * spec.m;
        }
        let circuit = Circuit::new(num_qubits, num_clbits, roles, partition)?
            .named(format!("{}_n{}_m{}", spec.design, spec.n, spec.m));
        Ok(Self {
            spec,
            layout,
            circuit,
            data,
            work,
            channel_used: vec![false; layout.map_or(0, |l| l.k())],
        })
    }

    fn push(&mut self, inst: Instruction<T>) -> Result<(), DesignError> {
        self.circuit.append(inst)?;
        Ok(())
    }

    fn results(&self) -> Vec<usize> {
        (0..self.spec.m).collect()
    }

    /// Controlled block `i` with data qubit `ctrl`, possibly via a telegate.
    fn controlled_unitary(&mut self, i: usize, ctrl: usize) -> Result<(), DesignError> {
        let Some(layout) = self.layout else {
            return self.cu_body(i, ctrl);
        };
        let j = layout.assign(i);
        let ch = layout.channels()[j];
        let (a, b) = (ch.c_on_a, ch.c_on_b);
        let (s_bit, e_bit) = (self.spec.m + 2 * i, self.spec.m + 2 * i + 1);
        let gen = BlockTag::Gen(i);
        if self.channel_used[j] {
            self.push(Instruction::reset(a).tagged(gen))?;
            self.push(Instruction::reset(b).tagged(gen))?;
        }
        self.channel_used[j] = true;
        self.push(Instruction::ebit_h(a).tagged(gen))?;
        self.push(
            Instruction::ebit_cx(a, b)
                .with_duration(ch.t_ebit)
                .tagged(gen),
        )?;

        let start = BlockTag::Start(i);
        self.push(Instruction::cx(ctrl, a).tagged(start))?;
        self.push(Instruction::measure(a, s_bit).tagged(start))?;
        self.push(Instruction::x(b).when([s_bit]).tagged(start))?;

        self.cu_body(i, b)?;

        let end = BlockTag::End(i);
        self.push(Instruction::h(b).tagged(end))?;
        self.push(Instruction::measure(b, e_bit).tagged(end))?;
        self.push(Instruction::z(ctrl).when([e_bit]).tagged(end))?;
        Ok(())
    }

    fn cu_body(&mut self, i: usize, ctrl: usize) -> Result<(), DesignError> {
        let tag = BlockTag::Cu(i);
        let insts: Vec<Instruction<T>> = match &self.spec.cu {
            CuProvider::Abstract(delays) => {
                let d = match delays {
                    AbstractDelays::List(v) => v[i],
                    AbstractDelays::Function(f) => f(i, self.spec.n),
                };
                let mut qubits = vec![ctrl];
                qubits.extend(&self.work);
                vec![Instruction::macro_block(format!("CU_{i}"), qubits)
                    .with_duration(d)
                    .tagged(tag)]
            }
            CuProvider::Explicit(subs) => subs[i]
                .instructions()
                .iter()
                .map(|inst| {
                    let mut mapped = inst.clone();
                    mapped.qubits = inst
                        .qubits
                        .iter()
                        .map(|&q| if q == 0 { ctrl } else { self.work[q - 1] })
                        .collect();
                    mapped.tag = Some(tag);
                    mapped
                })
                .collect(),
        };
        for inst in insts {
            self.push(inst)?;
        }
        Ok(())
    }

    /// P_i, H, M -> c_i, then optional reset and re-initialization.
    fn phase_block(
        &mut self,
        i: usize,
        q: usize,
        reset: bool,
        reinit: bool,
    ) -> Result<(), DesignError> {
        let tag = BlockTag::Phase(i);
        let results = self.results();
        for inst in phase_correction(i, PhaseMode::Classical, q, &results) {
            self.push(inst.tagged(tag))?;
        }
        self.push(Instruction::h(q).tagged(tag))?;
        self.push(Instruction::measure(q, i).tagged(tag))?;
        if reset {
            self.push(Instruction::reset(q).tagged(tag))?;
        }
        if reinit {
            self.push(Instruction::h(q).tagged(tag))?;
        }
        Ok(())
    }

    fn regular(&mut self) -> Result<(), DesignError> {
        let m = self.spec.m;
        let final_reset = self.spec.include_final_reset;
        for (j, q) in self.data.clone().into_iter().enumerate() {
            let h = Instruction::h(q);
            self.push(if j == 0 { h.tagged(BlockTag::Init) } else { h })?;
        }
        for i in 0..m {
            self.controlled_unitary(i, self.data[i])?;
        }
        if self.spec.design == DesignKind::RegularSemiclassical {
            for j in 0..m {
                self.phase_block(j, self.data[j], final_reset, false)?;
            }
            return Ok(());
        }
        // Full inverse QFT with controlled rotations, then measure everything.
        for j in 0..m {
            let tag = BlockTag::Phase(j);
            for inst in phase_correction(j, PhaseMode::Quantum, self.data[j], &self.data) {
                self.push(inst.tagged(tag))?;
            }
            self.push(Instruction::h(self.data[j]).tagged(tag))?;
        }
        for j in 0..m {
            let tag = BlockTag::Phase(j);
            self.push(Instruction::measure(self.data[j], j).tagged(tag))?;
            if final_reset {
                self.push(Instruction::reset(self.data[j]).tagged(tag))?;
            }
        }
        Ok(())
    }

    fn iterative(&mut self) -> Result<(), DesignError> {
        let m = self.spec.m;
        let q = self.data[0];
        self.push(Instruction::h(q).tagged(BlockTag::Init))?;
        for i in 0..m {
            self.controlled_unitary(i, q)?;
            let last = i + 1 == m;
            self.phase_block(i, q, !last || self.spec.include_final_reset, !last)?;
        }
        Ok(())
    }

    fn alternating(&mut self) -> Result<(), DesignError> {
        let m = self.spec.m;
        let final_reset = self.spec.include_final_reset;
        let d = self.data.clone();
        self.push(Instruction::h(d[0]).tagged(BlockTag::Init))?;
        self.controlled_unitary(0, d[0])?;
        if m > 1 {
            self.push(Instruction::h(d[1]))?;
        }
        // Block i runs on its qubit while CU_{i+1} occupies the work register.
        for i in 1..m {
            self.controlled_unitary(i, d[i % 2])?;
            let reused = i + 1 < m;
            self.phase_block(i - 1, d[(i - 1) % 2], reused || final_reset, reused)?;
        }
        self.phase_block(m - 1, d[(m - 1) % 2], final_reset, false)?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::graph::circuit_depth;
    use crate::circuit::Opcode;

    type Spec = ShorDesignSpec<i64>;

    fn count(c: &Circuit<i64>, kind: OpKind) -> usize {
        c.instructions()
            .iter()
            .filter(|i| i.opcode.kind() == kind)
            .count()
    }

    #[test]
    fn phase_correction_examples() {
        assert!(phase_correction::<i64>(0, PhaseMode::Classical, 0, &[]).is_empty());
        let p2 = phase_correction::<i64>(2, PhaseMode::Classical, 5, &[0, 1]);
        let pi = std::f64::consts::PI;
        assert_eq!(
            p2,
            vec![
                Instruction::p(-2.0 * pi / 4.0, 5).when([1]),
                Instruction::p(-2.0 * pi / 8.0, 5).when([0]),
            ]
        );
        assert_eq!(
            phase_correction::<i64>(5, PhaseMode::Quantum, 9, &[0, 1, 2, 3, 4]).len(),
            5
        );
        let q = phase_correction::<i64>(1, PhaseMode::Quantum, 3, &[7]);
        assert_eq!(q[0].qubits, vec![7, 3]);
    }

    #[test]
    fn regular_structure() {
        let spec = Spec::new(DesignKind::Regular, 2, CuProvider::constant(10)).with_m(3);
        let c = build_regular(&spec).unwrap();
        assert_eq!(c.num_qubits(), 5);
        assert_eq!(c.qubits_with_role(Role::Data).len(), 3);
        assert_eq!(count(&c, OpKind::Macro), 3);
        assert_eq!(count(&c, OpKind::CP), 3);
        assert_eq!(count(&c, OpKind::Measure), 3);
        assert!(circuit_depth(&c) >= 3);
    }

    #[test]
    fn semiclassical_structure() {
        let spec = Spec::new(
            DesignKind::RegularSemiclassical,
            2,
            CuProvider::constant(10),
        )
        .with_m(3);
        let c = build_regular_semiclassical(&spec).unwrap();
        assert_eq!(c.num_qubits(), 5);
        assert_eq!(count(&c, OpKind::Measure), 3);
        assert_eq!(count(&c, OpKind::CP) + count(&c, OpKind::CX), 0);
        assert!(c
            .instructions()
            .iter()
            .filter(|i| matches!(i.opcode, Opcode::P(_)))
            .all(|i| i.is_conditioned()));
    }

    #[test]
    fn iterative_structure() {
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(1)).with_m(3);
        let c = build_iterative(&spec).unwrap();
        assert_eq!(c.len(), 18);
        assert_eq!(count(&c, OpKind::H), 6);
        assert_eq!(count(&c, OpKind::Macro), 3);
        assert_eq!(count(&c, OpKind::P), 3);
        assert_eq!(count(&c, OpKind::Measure), 3);
        assert_eq!(count(&c, OpKind::Reset), 3);
        assert_eq!(c.num_qubits(), 3);
        let no_reset = build_iterative(&spec.clone().with_final_reset(false)).unwrap();
        assert_eq!(count(&no_reset, OpKind::Reset), 2);
        // One dependency chain: delay equals the serial sum.
        let unit = DelayProfile::unit();
        let serial: i64 = c
            .instructions()
            .iter()
            .map(|i| crate::timing::delay_of(i, &unit).unwrap())
            .sum();
        assert_eq!(circuit_delay(&c, &unit).unwrap(), serial);
        assert_eq!(serial, 18);
    }

    #[test]
    fn alternating_structure() {
        let spec = Spec::new(DesignKind::Alternating, 3, CuProvider::constant(5)).with_m(4);
        let c = build_alternating(&spec).unwrap();
        assert_eq!(c.num_qubits(), 5);
        let controls: Vec<usize> = c
            .instructions()
            .iter()
            .filter(|i| i.opcode.kind() == OpKind::Macro)
            .map(|i| i.qubits[0])
            .collect();
        assert_eq!(controls, vec![0, 1, 0, 1]);
        let iterative = build(&spec.with_design(DesignKind::Iterative)).unwrap();
        assert_eq!(c.num_qubits(), iterative.num_qubits() + 1);
    }

    #[test]
    fn builder_kind_mismatch() {
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(1));
        assert!(matches!(
            build_alternating(&spec),
            Err(DesignError::Parameters(_))
        ));
    }

    #[test]
    fn provider_arity() {
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::list(vec![1, 2]));
        assert!(matches!(
            build(&spec),
            Err(DesignError::ProviderArity {
                expected: 4,
                got: 2
            })
        ));
        let spec = Spec::new(DesignKind::Iterative, 1, CuProvider::Explicit(vec![]));
        assert!(matches!(
            build(&spec),
            Err(DesignError::ProviderArity { .. })
        ));
    }

    #[test]
    fn explicit_embedding_rules() {
        let mut good = Circuit::<i64>::plain(3, 0);
        good.extend([
            Instruction::cx(0, 1),
            Instruction::x(2),
            Instruction::cx(0, 2),
        ])
        .unwrap();
        let spec = Spec::new(
            DesignKind::Iterative,
            2,
            CuProvider::Explicit(vec![good; 2]),
        )
        .with_m(2);
        let c = build(&spec).unwrap();
        // data qubit 0 drives cx onto work qubits 1 and 2.
        assert!(c
            .instructions()
            .contains(&Instruction::cx(0, 1).tagged(BlockTag::Cu(0))));

        let mut bad = Circuit::<i64>::plain(3, 0);
        bad.append(Instruction::cx(1, 0)).unwrap();
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::Explicit(vec![bad])).with_m(1);
        assert!(matches!(
            build(&spec),
            Err(DesignError::Embedding { index: 0, .. })
        ));

        let mut wide = Circuit::<i64>::plain(4, 0);
        wide.append(Instruction::x(1)).unwrap();
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::Explicit(vec![wide])).with_m(1);
        assert!(matches!(build(&spec), Err(DesignError::WorkWidth { .. })));

        let mut meas = Circuit::<i64>::plain(3, 1);
        meas.append(Instruction::measure(1, 0)).unwrap();
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::Explicit(vec![meas])).with_m(1);
        assert!(matches!(build(&spec), Err(DesignError::NonUnitary { .. })));
    }

    #[test]
    fn zero_idle_examples() {
        let unit = DelayProfile::<i64>::unit();
        let spec = Spec::new(DesignKind::Alternating, 2, CuProvider::constant(100)).with_m(3);
        let check = check_alternating_zero_idle(&spec, &unit).unwrap();
        assert!(check.holds);
        assert_eq!(check.margins, vec![100 - 4, 100 - 5]);

        let spec = Spec::new(DesignKind::Alternating, 2, CuProvider::constant(3)).with_m(3);
        let check = check_alternating_zero_idle(&spec, &unit).unwrap();
        assert!(!check.holds);
        assert_eq!(check.margins[0], -1);

        let spec = Spec::new(DesignKind::Alternating, 2, CuProvider::constant(0)).with_m(1);
        let check = check_alternating_zero_idle(&spec, &unit).unwrap();
        assert!(check.holds && check.margins.is_empty());
    }

    #[test]
    fn phase_block_delay_unit() {
        let unit = DelayProfile::<i64>::unit();
        for i in 0..6 {
            assert_eq!(
                phase_block_delay(i, PhaseMode::Classical, &unit),
                Ok(i as i64 + 4)
            );
        }
        let p = DelayProfile::<i64>::new("q", 1, 10, 100, 1000);
        assert_eq!(
            phase_block_delay(2, PhaseMode::Quantum, &p),
            Ok(20 + 1 + 100 + 1000 + 1)
        );
    }

    #[test]
    fn imported_provider_reads_files() {
        let dir = tempfile::tempdir().unwrap();
        for i in 0..2 {
            std::fs::write(
                dir.path().join(format!("CU_{i}.qc")),
                "qubits 3\ncx 0 1\nx 2\n",
            )
            .unwrap();
        }
        let cu = CuProvider::<i64>::imported_dir(dir.path(), 2).unwrap();
        let spec = Spec::new(DesignKind::Iterative, 2, cu).with_m(2);
        let delays = spec.cu_delays(&DelayProfile::unit()).unwrap();
        assert_eq!(delays, vec![1, 1]);
        assert!(CuProvider::<i64>::imported_dir(dir.path(), 3).is_err());
    }
}
