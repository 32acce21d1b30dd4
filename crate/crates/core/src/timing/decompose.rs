//! Splitting the circuit delay of a generated design into its parts.
//!
//! ```text
//! t_C = t_H + Σ t_CU + δ_P + δ_D
//! ```
//!
//! `t_H` is what the first data-qubit Hadamard adds to t_C, `Σ t_CU` sums the
//! controlled-unitary blocks, `δ_P` is the phase-processing contribution of
//! the monolithic design and `δ_D` (distributed circuits only) whatever the
//! G/S/E blocks add on top. Each δ splits into an unavoidable part, spent
//! after the last controlled-unitary, and a mitigatable remainder.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::circuit::{BlockTag, Circuit, Instruction, Opcode, Role};
use crate::designs::{phase_block_delay, PhaseMode};
use crate::profile::DelayProfile;
use crate::time::Time;
use crate::timing::{asap_schedule, critical_path, delays, qubit_idle_times, sweep_delay};
use crate::timing::{Schedule, TimingError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecomposeError {
    #[error("circuit has no `{0}` annotation; was it produced by a design builder?")]
    MissingTag(String),
    #[error(transparent)]
    Timing(#[from] TimingError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decomposition<T> {
    pub t_h: T,
    pub sum_cu: T,
    pub delta_p: T,
    pub delta_p_m: T,
    pub delta_p_not_m: T,
    /// Zero for monolithic circuits.
    pub delta_d: T,
    pub delta_d_m: T,
    pub delta_d_not_m: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds<T> {
    /// Σ_{i<m-1} t(P_i H M R H).
    pub delta_p_m_upper: T,
    /// (m - 1) · t(P_{m-1} H M R H).
    pub delta_p_m_upper_relaxed: T,
    /// (m - 1) · max_i t(G_i S_i E_i); `None` when monolithic.
    pub delta_d_m_upper: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimingReport<T> {
    pub t_c: T,
    pub schedule: Schedule<T>,
    pub critical_path: Vec<usize>,
    /// Idle time per qubit.
    pub idle: Vec<T>,
    pub decomposition: Option<Decomposition<T>>,
    pub bounds: Option<Bounds<T>>,
    /// Number of controlled-unitary blocks found.
    pub m: usize,
    pub distributed: bool,
    work_qubits: Vec<usize>,
}

impl<T: Time> TimingReport<T> {
    /// Largest idle time over the work register.
    pub fn idle_work(&self) -> T {
        self.work_qubits
            .iter()
            .map(|&q| self.idle[q])
            .fold(T::zero(), T::later)
    }
}

/// Delay, schedule, critical path and idle times; the decomposition is
/// attached when the circuit carries design annotations.
pub fn analyze<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<TimingReport<T>, TimingError> {
    match shor_delay_decomposition(circuit, profile) {
        Ok(r) => Ok(r),
        Err(DecomposeError::Timing(e)) => Err(e),
        Err(DecomposeError::MissingTag(_)) => base_report(circuit, profile),
    }
}

fn base_report<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<TimingReport<T>, TimingError> {
    let schedule = asap_schedule(circuit, profile)?;
    Ok(TimingReport {
        t_c: schedule.makespan,
        critical_path: critical_path(circuit, profile)?,
        idle: qubit_idle_times(circuit, profile)?,
        schedule,
        decomposition: None,
        bounds: None,
        m: 0,
        distributed: false,
        work_qubits: circuit.qubits_with_role(Role::Work),
    })
}

pub fn shor_delay_decomposition<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<TimingReport<T>, DecomposeError> {
    let mut report = base_report(circuit, profile)?;
    let view = Tagged::new(circuit, profile)?;
    let m = view.num_blocks();
    if m == 0 {
        return Err(DecomposeError::MissingTag("cu0".into()));
    }
    for i in 0..m {
        for tag in [BlockTag::Cu(i), BlockTag::Phase(i)] {
            if !view.has(tag) {
                return Err(DecomposeError::MissingTag(tag.to_string()));
            }
        }
    }
    let distributed = view.has(BlockTag::Gen(0));

    let t_c = view.total();
    let t_h = view.marginal_init()?;
    let sum_cu = T::total((0..m).map(|i| view.subset(&[BlockTag::Cu(i)])));
    let delta_p = if distributed {
        let mono = monolithic_counterpart(circuit)?;
        let mv = Tagged::new(&mono, profile)?;
        mv.total() - mv.marginal_init()? - sum_cu
    } else {
        t_c - t_h - sum_cu
    };
    let delta_d = t_c - t_h - sum_cu - delta_p;
    let delta_p_not_m = view.subset(&[BlockTag::Phase(m - 1)]);

    let mode = if circuit
        .instructions()
        .iter()
        .any(|i| matches!(i.opcode, Opcode::CP(_)) && matches!(i.tag, Some(BlockTag::Phase(_))))
    {
        PhaseMode::Quantum
    } else {
        PhaseMode::Classical
    };
    let mut delta_p_m_upper = T::zero();
    for i in 0..m - 1 {
        delta_p_m_upper = delta_p_m_upper + phase_block_delay(i, mode, profile)?;
    }
    let last = phase_block_delay(m - 1, mode, profile)?;

    let (delta_d_not_m, delta_d_m_upper) = if distributed {
        for i in 0..m {
            for tag in [BlockTag::Gen(i), BlockTag::Start(i), BlockTag::End(i)] {
                if !view.has(tag) {
                    return Err(DecomposeError::MissingTag(tag.to_string()));
                }
            }
        }
        let gse = |g: usize, s: usize, e: usize| {
            view.subset(&[BlockTag::Gen(g)])
                + view.subset(&[BlockTag::Start(s)])
                + view.subset(&[BlockTag::End(e)])
        };
        let worst = (0..m).map(|i| gse(i, i, i)).fold(T::zero(), T::later);
        (gse(0, 0, m - 1), Some(worst * T::from_count(m - 1)))
    } else {
        (T::zero(), None)
    };

    report.decomposition = Some(Decomposition {
        t_h,
        sum_cu,
        delta_p,
        delta_p_m: delta_p - delta_p_not_m,
        delta_p_not_m,
        delta_d,
        delta_d_m: delta_d - delta_d_not_m,
        delta_d_not_m,
    });
    report.bounds = Some(Bounds {
        delta_p_m_upper,
        delta_p_m_upper_relaxed: last * T::from_count(m - 1),
        delta_d_m_upper,
    });
    report.m = m;
    report.distributed = distributed;
    Ok(report)
}

/// Annotated circuit with precomputed instruction delays.
struct Tagged<'a, T> {
    circuit: &'a Circuit<T>,
    delays: Vec<T>,
}

impl<'a, T: Time> Tagged<'a, T> {
    fn new(circuit: &'a Circuit<T>, profile: &DelayProfile<T>) -> Result<Self, TimingError> {
        Ok(Self {
            circuit,
            delays: delays(circuit.instructions(), profile)?,
        })
    }

    fn has(&self, tag: BlockTag) -> bool {
        self.circuit.tagged(tag).next().is_some()
    }

    fn num_blocks(&self) -> usize {
        self.circuit
            .instructions()
            .iter()
            .filter_map(|i| match i.tag {
                Some(BlockTag::Cu(j)) => Some(j + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    fn total(&self) -> T {
        let c = self.circuit;
        sweep_delay(c.instructions(), c.num_qubits(), c.num_bits(), &self.delays)
    }

    /// How much t_C drops when the initial Hadamard takes no time.
    fn marginal_init(&self) -> Result<T, DecomposeError> {
        let c = self.circuit;
        let idx = c
            .instructions()
            .iter()
            .position(|i| i.tag == Some(BlockTag::Init))
            .ok_or_else(|| DecomposeError::MissingTag(BlockTag::Init.to_string()))?;
        let mut d = self.delays.clone();
        d[idx] = T::zero();
        Ok(self.total() - sweep_delay(c.instructions(), c.num_qubits(), c.num_bits(), &d))
    }

    /// Algorithm-1 delay of the instructions carrying one of `tags`.
    fn subset(&self, tags: &[BlockTag]) -> T {
        let (insts, d): (Vec<Instruction<T>>, Vec<T>) = self
            .circuit
            .instructions()
            .iter()
            .zip(&self.delays)
            .filter(|(i, _)| i.tag.is_some_and(|t| tags.contains(&t)))
            .map(|(i, &d)| (i.clone(), d))
            .unzip();
        sweep_delay(
            &insts,
            self.circuit.num_qubits(),
            self.circuit.num_bits(),
            &d,
        )
    }
}

/// Drops the G/S/E blocks and moves each CU control from `c_B` back to the
/// data qubit that drove the telegate.
fn monolithic_counterpart<T: Time>(circuit: &Circuit<T>) -> Result<Circuit<T>, DecomposeError> {
    let mut remote: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for inst in circuit.instructions() {
        if let Some(BlockTag::Start(i)) = inst.tag {
            match inst.opcode {
                Opcode::CX => remote.entry(i).or_insert((usize::MAX, 0)).1 = inst.qubits[0],
                Opcode::X => remote.entry(i).or_insert((usize::MAX, 0)).0 = inst.qubits[0],
                _ => {}
            }
        }
    }
    let mut mono = Circuit::new(
        circuit.num_qubits(),
        circuit.num_clbits(),
        circuit.roles().clone(),
        BTreeMap::new(),
    )
    .expect("roles already validated");
    for inst in circuit.instructions() {
        match inst.tag {
            Some(BlockTag::Gen(_) | BlockTag::Start(_) | BlockTag::End(_)) => continue,
            Some(BlockTag::Cu(i)) => {
                let &(c_b, ctrl) = remote
                    .get(&i)
                    .ok_or_else(|| DecomposeError::MissingTag(BlockTag::Start(i).to_string()))?;
                let mut moved = inst.clone();
                for q in &mut moved.qubits {
                    if *q == c_b {
                        *q = ctrl;
                    }
                }
                mono.append(moved).expect("remapped control stays in range");
            }
            _ => {
                mono.append(inst.clone())
                    .expect("copied instruction stays valid");
            }
        }
    }
    Ok(mono)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::designs::{build, CuProvider, DesignKind, ShorDesignSpec};
    use crate::distribution::{distribute, DistributedLayout};

    type Spec = ShorDesignSpec<i64>;

    #[test]
    fn iterative_unit_example() {
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(1)).with_m(3);
        let c = build(&spec).unwrap();
        let r = shor_delay_decomposition(&c, &DelayProfile::unit()).unwrap();
        let d = r.decomposition.unwrap();
        assert_eq!(r.t_c, 18);
        assert_eq!((d.t_h, d.sum_cu, d.delta_p), (1, 3, 14));
        assert_eq!(d.delta_d, 0);
        // Last block P_2 H M R.
        assert_eq!(d.delta_p_not_m, 2 + 3);
        let b = r.bounds.unwrap();
        assert_eq!(b.delta_p_m_upper, 4 + 5);
        assert_eq!(d.delta_p_m, b.delta_p_m_upper);
        assert_eq!(b.delta_p_m_upper_relaxed, 2 * 6);
        assert!(b.delta_d_m_upper.is_none());
    }

    #[test]
    fn alternating_zero_idle_has_no_mitigatable_delay() {
        let spec = Spec::new(DesignKind::Alternating, 2, CuProvider::constant(100)).with_m(5);
        let c = build(&spec).unwrap();
        let d = shor_delay_decomposition(&c, &DelayProfile::unit())
            .unwrap()
            .decomposition
            .unwrap();
        assert_eq!(d.delta_p_m, 0);
        assert_eq!(d.sum_cu, 500);
    }

    #[test]
    fn plain_circuit_has_no_decomposition() {
        let mut c = Circuit::<i64>::plain(1, 0);
        c.append(Instruction::h(0)).unwrap();
        let p = DelayProfile::unit();
        assert!(matches!(
            shor_delay_decomposition(&c, &p),
            Err(DecomposeError::MissingTag(_))
        ));
        let r = analyze(&c, &p).unwrap();
        assert_eq!(r.t_c, 1);
        assert!(r.decomposition.is_none());
    }

    #[test]
    fn distributed_identity_and_overhead() {
        let p = DelayProfile::<i64>::preset("heron_r2_fez").unwrap();
        let spec = Spec::new(DesignKind::Alternating, 3, CuProvider::constant(200_000)).with_m(6);
        let mono = shor_delay_decomposition(&build(&spec).unwrap(), &p).unwrap();
        let md = mono.decomposition.unwrap();
        let layout = DistributedLayout::uniform(&spec, 2, 5_000).unwrap();
        let c = distribute(&spec, &layout).unwrap();
        let r = shor_delay_decomposition(&c, &p).unwrap();
        let d = r.decomposition.unwrap();
        assert!(r.distributed);
        assert_eq!(r.t_c, d.t_h + d.sum_cu + d.delta_p + d.delta_d);
        assert_eq!(d.delta_p, md.delta_p);
        assert_eq!(d.delta_d_m, 0);
        assert_eq!(d.delta_d, d.delta_d_not_m);
        // The first Hadamard runs under the first ebit generation.
        assert_eq!(d.t_h, 0);
        assert_eq!(r.t_c, mono.t_c - md.t_h + d.delta_d_not_m);
    }

    #[test]
    fn single_channel_is_fully_serial() {
        let p = DelayProfile::<i64>::unit();
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(4)).with_m(3);
        let layout = DistributedLayout::uniform(&spec, 1, 10).unwrap();
        let c = distribute(&spec, &layout).unwrap();
        let r = shor_delay_decomposition(&c, &p).unwrap();
        let serial: i64 = c
            .instructions()
            .iter()
            .map(|i| crate::timing::delay_of(i, &p).unwrap())
            .sum();
        // Everything but the parallel first G/init H and the two resets of
        // each reused channel sits on one chain.
        assert!(r.t_c <= serial);
        let d = r.decomposition.unwrap();
        assert!(d.delta_d_m >= 0);
        assert!(d.delta_d_m <= r.bounds.unwrap().delta_d_m_upper.unwrap());
    }
}
