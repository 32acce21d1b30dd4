//! Gate-level circuit representation.
//!
//! A [`Circuit`] is an append-only list of [`Instruction`]s. Because every
//! instruction can only depend on instructions already in the list, the list
//! order is always a valid topological order of the dependency graph built by
//! [`graph::build_circuit_graph`].

pub mod graph;
pub mod text;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::time::Time;

/// Instruction kinds of the basis gate set plus the ebit and macro extensions.
#[derive(Debug, Clone, PartialEq)]
pub enum Opcode {
    H,
    X,
    Y,
    Z,
    I,
    /// Single-qubit phase rotation by the given angle in radians.
    P(f64),
    /// Controlled phase rotation; operands are `[control, target]`.
    CP(f64),
    CX,
    Measure,
    Reset,
    /// First half of an ebit generation (Hadamard on the A-side qubit).
    EbitH,
    /// Second half of an ebit generation (CNOT across the channel).
    EbitCx,
    /// Opaque block with an externally supplied delay.
    Macro(String),
}

/// Payload-free opcode discriminant, used as the key for delay overrides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OpKind {
    H,
    X,
    Y,
    Z,
    I,
    P,
    CP,
    CX,
    Measure,
    Reset,
    EbitH,
    EbitCx,
    Macro,
}

impl OpKind {
    pub const ALL: [OpKind; 13] = [
        OpKind::H,
        OpKind::X,
        OpKind::Y,
        OpKind::Z,
        OpKind::I,
        OpKind::P,
        OpKind::CP,
        OpKind::CX,
        OpKind::Measure,
        OpKind::Reset,
        OpKind::EbitH,
        OpKind::EbitCx,
        OpKind::Macro,
    ];

    /// Lower-case mnemonic used in the text format and in profile files.
    pub fn mnemonic(self) -> &'static str {
        match self {
            OpKind::H => "h",
            OpKind::X => "x",
            OpKind::Y => "y",
            OpKind::Z => "z",
            OpKind::I => "i",
            OpKind::P => "p",
            OpKind::CP => "cp",
            OpKind::CX => "cx",
            OpKind::Measure => "measure",
            OpKind::Reset => "reset",
            OpKind::EbitH => "ebit_h",
            OpKind::EbitCx => "ebit_cx",
            OpKind::Macro => "macro",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<OpKind> {
        OpKind::ALL.into_iter().find(|k| k.mnemonic() == s)
    }
}

impl Opcode {
    pub fn kind(&self) -> OpKind {
        match self {
            Opcode::H => OpKind::H,
            Opcode::X => OpKind::X,
            Opcode::Y => OpKind::Y,
            Opcode::Z => OpKind::Z,
            Opcode::I => OpKind::I,
            Opcode::P(_) => OpKind::P,
            Opcode::CP(_) => OpKind::CP,
            Opcode::CX => OpKind::CX,
            Opcode::Measure => OpKind::Measure,
            Opcode::Reset => OpKind::Reset,
            Opcode::EbitH => OpKind::EbitH,
            Opcode::EbitCx => OpKind::EbitCx,
            Opcode::Macro(_) => OpKind::Macro,
        }
    }

    /// Required qubit count, `None` for variadic macros.
    fn qubit_arity(&self) -> Option<usize> {
        match self.kind() {
            OpKind::CX | OpKind::CP | OpKind::EbitCx => Some(2),
            OpKind::Macro => None,
            _ => Some(1),
        }
    }

    fn clbit_arity(&self) -> usize {
        usize::from(matches!(self, Opcode::Measure))
    }
}

/// Role of an instruction inside a generated Shor design.
///
/// The delay decomposition reads these tags to find the initialization
/// Hadamard, the controlled-unitary blocks, the phase-processing blocks and
/// the distribution blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BlockTag {
    Init,
    Cu(usize),
    Phase(usize),
    Gen(usize),
    Start(usize),
    End(usize),
}

impl fmt::Display for BlockTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BlockTag::Init => write!(f, "init"),
            BlockTag::Cu(i) => write!(f, "cu{i}"),
            BlockTag::Phase(i) => write!(f, "phase{i}"),
            BlockTag::Gen(i) => write!(f, "gen{i}"),
            BlockTag::Start(i) => write!(f, "start{i}"),
            BlockTag::End(i) => write!(f, "end{i}"),
        }
    }
}

impl std::str::FromStr for BlockTag {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        if s == "init" {
            return Ok(BlockTag::Init);
        }
        let split = s.find(|c: char| c.is_ascii_digit()).ok_or(())?;
        let (head, digits) = s.split_at(split);
        let index: usize = digits.parse().map_err(|_| ())?;
        match head {
            "cu" => Ok(BlockTag::Cu(index)),
            "phase" => Ok(BlockTag::Phase(index)),
            "gen" => Ok(BlockTag::Gen(index)),
            "start" => Ok(BlockTag::Start(index)),
            "end" => Ok(BlockTag::End(index)),
            _ => Err(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Data,
    Work,
    Comm,
    Ancilla,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::Data => "DATA",
            Role::Work => "WORK",
            Role::Comm => "COMM",
            Role::Ancilla => "ANCILLA",
        }
    }

    pub fn from_name(s: &str) -> Option<Role> {
        [Role::Data, Role::Work, Role::Comm, Role::Ancilla]
            .into_iter()
            .find(|r| r.name() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Qpu {
    A,
    B,
}

impl Qpu {
    pub fn name(self) -> &'static str {
        match self {
            Qpu::A => "A",
            Qpu::B => "B",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instruction<T> {
    pub opcode: Opcode,
    pub qubits: Vec<usize>,
    /// Classical bits written by the instruction (the measurement target).
    pub clbits: Vec<usize>,
    /// Classical bits that gate execution; kept sorted and deduplicated.
    pub condition: Vec<usize>,
    pub duration: Option<T>,
    pub tag: Option<BlockTag>,
}

impl<T> Instruction<T> {
    pub fn new(opcode: Opcode, qubits: Vec<usize>) -> Self {
        Self {
            opcode,
            qubits,
            clbits: Vec::new(),
            condition: Vec::new(),
            duration: None,
            tag: None,
        }
    }

    pub fn h(q: usize) -> Self {
        Self::new(Opcode::H, vec![q])
    }
    pub fn x(q: usize) -> Self {
        Self::new(Opcode::X, vec![q])
    }
    pub fn y(q: usize) -> Self {
        Self::new(Opcode::Y, vec![q])
    }
    pub fn z(q: usize) -> Self {
        Self::new(Opcode::Z, vec![q])
    }
    pub fn id(q: usize) -> Self {
        Self::new(Opcode::I, vec![q])
    }
    pub fn p(theta: f64, q: usize) -> Self {
        Self::new(Opcode::P(theta), vec![q])
    }
    pub fn cp(theta: f64, control: usize, target: usize) -> Self {
        Self::new(Opcode::CP(theta), vec![control, target])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::new(Opcode::CX, vec![control, target])
    }
    pub fn measure(q: usize, c: usize) -> Self {
        let mut inst = Self::new(Opcode::Measure, vec![q]);
        inst.clbits.push(c);
        inst
    }
    pub fn reset(q: usize) -> Self {
        Self::new(Opcode::Reset, vec![q])
    }
    pub fn ebit_h(q: usize) -> Self {
        Self::new(Opcode::EbitH, vec![q])
    }
    pub fn ebit_cx(a: usize, b: usize) -> Self {
        Self::new(Opcode::EbitCx, vec![a, b])
    }
    pub fn macro_block(label: impl Into<String>, qubits: Vec<usize>) -> Self {
        Self::new(Opcode::Macro(label.into()), qubits)
    }

    /// Execute only when the given classical bits are set.
    pub fn when(mut self, bits: impl IntoIterator<Item = usize>) -> Self {
        self.condition.extend(bits);
        self.condition.sort_unstable();
        self.condition.dedup();
        self
    }

    pub fn with_duration(mut self, duration: T) -> Self {
        self.duration = Some(duration);
        self
    }

    pub fn tagged(mut self, tag: BlockTag) -> Self {
        self.tag = Some(tag);
        self
    }

    pub fn is_conditioned(&self) -> bool {
        !self.condition.is_empty()
    }

    /// Every bit the instruction touches, as flat indices where classical
    /// bit `c` maps to `num_qubits + c`. Sorted, no duplicates.
    pub fn bits(&self, num_qubits: usize) -> Vec<usize> {
        let mut bits: Vec<usize> = self
            .qubits
            .iter()
            .copied()
            .chain(self.clbits.iter().map(|c| num_qubits + c))
            .chain(self.condition.iter().map(|c| num_qubits + c))
            .collect();
        bits.sort_unstable();
        bits.dedup();
        bits
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("qubit {index} out of range for {size}-qubit circuit")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("classical bit {index} out of range for {size}-bit register")]
    ClbitOutOfRange { index: usize, size: usize },
    #[error("{op} expects {expected} qubit operand(s), got {got}")]
    QubitArity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("{op} expects {expected} classical operand(s), got {got}")]
    ClbitArity {
        op: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("macro block needs at least one qubit")]
    EmptyMacro,
    #[error("qubit {0} listed twice in one instruction")]
    RepeatedQubit(usize),
    #[error("negative duration override")]
    NegativeDuration,
    #[error("{op} on qubits {a} (QPU {qa}) and {b} (QPU {qb}) crosses partitions")]
    Locality {
        op: &'static str,
        a: usize,
        qa: &'static str,
        b: usize,
        qb: &'static str,
    },
    #[error("ebit_cx across QPUs must act on communication qubits, got {0} and {1}")]
    EbitNotOnChannel(usize, usize),
}

/// Append-only gate-level program.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit<T> {
    pub name: String,
    num_qubits: usize,
    num_clbits: usize,
    instructions: Vec<Instruction<T>>,
    roles: BTreeMap<usize, Role>,
    partition: BTreeMap<usize, Qpu>,
}

impl<T: Time> Circuit<T> {
    pub fn new(
        num_qubits: usize,
        num_clbits: usize,
        roles: BTreeMap<usize, Role>,
        partition: BTreeMap<usize, Qpu>,
    ) -> Result<Self, CircuitError> {
        for &q in roles.keys().chain(partition.keys()) {
            if q >= num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    index: q,
                    size: num_qubits,
                });
            }
        }
        Ok(Self {
            name: String::new(),
            num_qubits,
            num_clbits,
            instructions: Vec::new(),
            roles,
            partition,
        })
    }

    /// Unannotated circuit without roles or partition.
    pub fn plain(num_qubits: usize, num_clbits: usize) -> Self {
        Self::new(num_qubits, num_clbits, BTreeMap::new(), BTreeMap::new())
            .expect("empty maps are always valid")
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    /// Qubits plus classical bits: the wire count of the dependency graph.
    pub fn num_bits(&self) -> usize {
        self.num_qubits + self.num_clbits
    }

    pub fn instructions(&self) -> &[Instruction<T>] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    pub fn roles(&self) -> &BTreeMap<usize, Role> {
        &self.roles
    }

    pub fn partition(&self) -> &BTreeMap<usize, Qpu> {
        &self.partition
    }

    pub fn role(&self, q: usize) -> Option<Role> {
        self.roles.get(&q).copied()
    }

    pub fn qpu(&self, q: usize) -> Option<Qpu> {
        self.partition.get(&q).copied()
    }

    pub fn qubits_with_role(&self, role: Role) -> Vec<usize> {
        self.roles
            .iter()
            .filter(|(_, r)| **r == role)
            .map(|(q, _)| *q)
            .collect()
    }

    pub fn append(&mut self, inst: Instruction<T>) -> Result<&mut Self, CircuitError> {
        self.validate(&inst)?;
        self.instructions.push(inst);
        Ok(self)
    }

    pub fn extend(
        &mut self,
        insts: impl IntoIterator<Item = Instruction<T>>,
    ) -> Result<&mut Self, CircuitError> {
        for inst in insts {
            self.append(inst)?;
        }
        Ok(self)
    }

    fn validate(&self, inst: &Instruction<T>) -> Result<(), CircuitError> {
        let op = inst.opcode.kind().mnemonic();
        match inst.opcode.qubit_arity() {
            Some(expected) if inst.qubits.len() != expected => {
                return Err(CircuitError::QubitArity {
                    op,
                    expected,
                    got: inst.qubits.len(),
                })
            }
            None if inst.qubits.is_empty() => return Err(CircuitError::EmptyMacro),
            _ => {}
        }
        let expected = inst.opcode.clbit_arity();
        if inst.clbits.len() != expected {
            return Err(CircuitError::ClbitArity {
                op,
                expected,
                got: inst.clbits.len(),
            });
        }
        for (i, &q) in inst.qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return Err(CircuitError::QubitOutOfRange {
                    index: q,
                    size: self.num_qubits,
                });
            }
            if inst.qubits[..i].contains(&q) {
                return Err(CircuitError::RepeatedQubit(q));
            }
        }
        for &c in inst.clbits.iter().chain(&inst.condition) {
            if c >= self.num_clbits {
                return Err(CircuitError::ClbitOutOfRange {
                    index: c,
                    size: self.num_clbits,
                });
            }
        }
        if matches!(inst.duration, Some(d) if d < T::zero()) {
            return Err(CircuitError::NegativeDuration);
        }
        self.check_locality(inst)
    }

    fn check_locality(&self, inst: &Instruction<T>) -> Result<(), CircuitError> {
        if inst.qubits.len() < 2 || self.partition.is_empty() {
            return Ok(());
        }
        let placed: Vec<(usize, Qpu)> = inst
            .qubits
            .iter()
            .filter_map(|&q| self.qpu(q).map(|p| (q, p)))
            .collect();
        let Some(&(a, qa)) = placed.first() else {
            return Ok(());
        };
        let Some(&(b, qb)) = placed.iter().find(|(_, p)| *p != qa) else {
            return Ok(());
        };
        if inst.opcode == Opcode::EbitCx {
            if self.role(a) == Some(Role::Comm) && self.role(b) == Some(Role::Comm) {
                return Ok(());
            }
            return Err(CircuitError::EbitNotOnChannel(a, b));
        }
        Err(CircuitError::Locality {
            op: inst.opcode.kind().mnemonic(),
            a,
            qa: qa.name(),
            b,
            qb: qb.name(),
        })
    }

    /// Instructions carrying the given tag, in append order.
    pub fn tagged(&self, tag: BlockTag) -> impl Iterator<Item = &Instruction<T>> {
        self.instructions
            .iter()
            .filter(move |inst| inst.tag == Some(tag))
    }
}
