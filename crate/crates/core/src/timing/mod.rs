//! Circuit delay, schedules, critical paths and idle time.
//!
//! [`circuit_delay`] walks the append-ordered instruction list once while
//! keeping only a running finish time per qubit and classical bit, so memory
//! is proportional to the wire count. [`oracle::longest_path_oracle`] computes
//! the same quantity from the explicit weighted graph.

pub mod decompose;
pub mod oracle;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::circuit::{Circuit, Instruction, Opcode};
use crate::profile::DelayProfile;
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimingError {
    #[error("macro `{0}` has no duration override and no profile entry")]
    MissingMacroDelay(String),
    #[error("graph contains a cycle")]
    Cycle,
}

/// Gate delay of one instruction.
///
/// Precedence: the instruction's own duration, then a profile override for
/// the opcode (`macro:<label>` for macros), then the opcode class default.
/// Conditioned instructions pay the classical feed-forward latency on top.
pub fn delay_of<T: Time>(
    inst: &Instruction<T>,
    profile: &DelayProfile<T>,
) -> Result<T, TimingError> {
    let base = match inst.duration {
        Some(d) => d,
        None => {
            let kind = inst.opcode.kind();
            let key = match &inst.opcode {
                Opcode::Macro(label) => format!("macro:{label}"),
                _ => kind.mnemonic().to_string(),
            };
            match profile.overrides.get(&key) {
                Some(&d) => d,
                None => profile
                    .class_delay(kind)
                    .ok_or_else(|| match &inst.opcode {
                        Opcode::Macro(label) => TimingError::MissingMacroDelay(label.clone()),
                        _ => unreachable!("non-macro opcodes always have a class delay"),
                    })?,
            }
        }
    };
    Ok(if inst.is_conditioned() {
        base + profile.t_classical_ff
    } else {
        base
    })
}

pub(crate) fn delays<T: Time>(
    insts: &[Instruction<T>],
    profile: &DelayProfile<T>,
) -> Result<Vec<T>, TimingError> {
    insts.iter().map(|i| delay_of(i, profile)).collect()
}

/// Running-time sweep over a topologically ordered instruction list.
pub(crate) fn sweep_delay<T: Time>(
    insts: &[Instruction<T>],
    num_qubits: usize,
    num_bits: usize,
    delays: &[T],
) -> T {
    let mut t = vec![T::zero(); num_bits];
    for (inst, &d) in insts.iter().zip(delays) {
        let bits = inst.bits(num_qubits);
        let t_max = bits.iter().fold(T::zero(), |acc, &b| acc.later(t[b]));
        for b in bits {
            t[b] = t_max + d;
        }
    }
    t.into_iter().fold(T::zero(), T::later)
}

/// Circuit delay t_C: the critical-path delay of the weighted circuit graph.
pub fn circuit_delay<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<T, TimingError> {
    let d = delays(circuit.instructions(), profile)?;
    Ok(sweep_delay(
        circuit.instructions(),
        circuit.num_qubits(),
        circuit.num_bits(),
        &d,
    ))
}

/// ASAP start and end times, indexed like the instruction list.
#[derive(Debug, Clone, PartialEq)]
pub struct Schedule<T> {
    pub start: Vec<T>,
    pub end: Vec<T>,
    pub makespan: T,
}

impl<T: Time> Schedule<T> {
    pub fn duration(&self, i: usize) -> T {
        self.end[i] - self.start[i]
    }
}

pub fn asap_schedule<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<Schedule<T>, TimingError> {
    let d = delays(circuit.instructions(), profile)?;
    let mut ready = vec![T::zero(); circuit.num_bits()];
    let mut start = Vec::with_capacity(circuit.len());
    let mut end = Vec::with_capacity(circuit.len());
    let mut makespan = T::zero();
    for (inst, &di) in circuit.instructions().iter().zip(&d) {
        let bits = inst.bits(circuit.num_qubits());
        let s = bits.iter().fold(T::zero(), |acc, &b| acc.later(ready[b]));
        let e = s + di;
        for b in bits {
            ready[b] = e;
        }
        start.push(s);
        end.push(e);
        makespan = makespan.later(e);
    }
    Ok(Schedule {
        start,
        end,
        makespan,
    })
}

/// One longest-delay path, as instruction indices from source to sink.
///
/// At every step the predecessor with the latest finish wins; ties go to
/// the source, then to the smallest instruction index. The final vertex is
/// the smallest index among instructions finishing at t_C.
pub fn critical_path<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<Vec<usize>, TimingError> {
    let d = delays(circuit.instructions(), profile)?;
    // Per bit: (finish time, last instruction on the bit).
    let mut wire: Vec<(T, Option<usize>)> = vec![(T::zero(), None); circuit.num_bits()];
    let mut pred: Vec<Option<usize>> = Vec::with_capacity(circuit.len());
    let mut finish: Vec<T> = Vec::with_capacity(circuit.len());
    for (i, inst) in circuit.instructions().iter().enumerate() {
        let bits = inst.bits(circuit.num_qubits());
        let mut best: (T, Option<usize>) = (T::zero(), None);
        let mut seen_any = false;
        for &b in &bits {
            let cand = wire[b];
            // None (source) sorts before any index on ties.
            let better = !seen_any || cand.0 > best.0 || (cand.0 == best.0 && cand.1 < best.1);
            if better {
                best = cand;
            }
            seen_any = true;
        }
        let f = best.0 + d[i];
        for b in bits {
            wire[b] = (f, Some(i));
        }
        pred.push(best.1);
        finish.push(f);
    }
    let t_c = finish.iter().copied().fold(T::zero(), T::later);
    let Some(mut cur) = finish.iter().position(|&f| f == t_c) else {
        return Ok(Vec::new());
    };
    let mut path = vec![cur];
    while let Some(p) = pred[cur] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    Ok(path)
}

/// Idle time of each qubit inside its active window: (last end − first
/// start) minus the busy time. Unused qubits have zero idle.
pub fn qubit_idle_times<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<Vec<T>, TimingError> {
    let sched = asap_schedule(circuit, profile)?;
    let n = circuit.num_qubits();
    let mut first: Vec<Option<T>> = vec![None; n];
    let mut last = vec![T::zero(); n];
    let mut busy = vec![T::zero(); n];
    for (i, inst) in circuit.instructions().iter().enumerate() {
        for &q in &inst.qubits {
            if first[q].is_none() {
                first[q] = Some(sched.start[i]);
            }
            last[q] = sched.end[i];
            busy[q] = busy[q] + sched.duration(i);
        }
    }
    Ok((0..n)
        .map(|q| match first[q] {
            Some(f) => last[q] - f - busy[q],
            None => T::zero(),
        })
        .collect())
}

/// Register idle time: the largest per-qubit idle over `qubits`.
pub fn idle_time<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
    qubits: &BTreeSet<usize>,
) -> Result<T, TimingError> {
    let per_qubit = qubit_idle_times(circuit, profile)?;
    Ok(qubits
        .iter()
        .filter_map(|&q| per_qubit.get(q).copied())
        .fold(T::zero(), T::later))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction as Ins;

    type C = Circuit<i64>;
    type P = DelayProfile<i64>;

    fn four_gate() -> C {
        let mut c = C::plain(2, 0);
        c.extend([Ins::h(0), Ins::cx(0, 1), Ins::x(1), Ins::z(1)])
            .unwrap();
        c
    }

    #[test]
    fn delay_precedence() {
        let eagle = P::preset("eagle_sherbrooke").unwrap();
        assert_eq!(delay_of(&Ins::cx(0, 1), &eagle), Ok(533));
        let forte = P::preset("forte").unwrap();
        assert_eq!(delay_of(&Ins::reset(0), &forte), Ok(50_000));
        let cu = Ins::macro_block("CU_3", vec![0, 1]).with_duration(7);
        assert_eq!(delay_of(&cu, &eagle), Ok(7));
        let bare = Ins::macro_block("CU_3", vec![0, 1]);
        assert_eq!(
            delay_of(&bare, &eagle),
            Err(TimingError::MissingMacroDelay("CU_3".into()))
        );
        let prof = eagle
            .clone()
            .with_override("macro:CU_3", 90)
            .with_override("x", 1);
        assert_eq!(delay_of(&bare, &prof), Ok(90));
        assert_eq!(delay_of(&Ins::x(0), &prof), Ok(1));
        assert_eq!(delay_of(&Ins::id(0), &eagle), Ok(57));
        let ff = eagle.with_classical_ff(11);
        assert_eq!(delay_of(&Ins::z(0).when([0]), &ff), Ok(68));
    }

    #[test]
    fn circuit_delay_examples() {
        assert_eq!(circuit_delay(&four_gate(), &P::unit()), Ok(4));
        let eagle = P::preset("eagle_sherbrooke").unwrap();
        assert_eq!(circuit_delay(&four_gate(), &eagle), Ok(57 + 533 + 57 + 57));
        assert_eq!(circuit_delay(&C::plain(3, 2), &eagle), Ok(0));
    }

    #[test]
    fn schedule_examples() {
        let mut c = C::plain(2, 0);
        c.extend([Ins::h(0), Ins::cx(0, 1)]).unwrap();
        let s = asap_schedule(&c, &P::unit()).unwrap();
        assert_eq!(s.start, vec![0, 1]);
        assert_eq!(s.makespan, 2);

        let mut par = C::plain(2, 0);
        par.extend([Ins::h(0), Ins::h(1)]).unwrap();
        assert_eq!(asap_schedule(&par, &P::unit()).unwrap().start, vec![0, 0]);

        let prof = P::unit().with_classical_ff(5);
        let mut cond = C::plain(2, 1);
        cond.extend([Ins::measure(0, 0), Ins::p(0.3, 1).when([0])])
            .unwrap();
        let s = asap_schedule(&cond, &prof).unwrap();
        assert_eq!(s.start[1], s.end[0]);
        assert_eq!(s.duration(1), 1 + 5);
    }

    #[test]
    fn critical_path_examples() {
        assert_eq!(
            critical_path(&four_gate(), &P::unit()),
            Ok(vec![0, 1, 2, 3])
        );
        assert_eq!(critical_path(&C::plain(1, 0), &P::unit()), Ok(vec![]));
        let mut tie = C::plain(2, 0);
        tie.extend([Ins::h(0), Ins::h(1)]).unwrap();
        assert_eq!(critical_path(&tie, &P::unit()), Ok(vec![0]));
    }

    #[test]
    fn critical_path_through_macros() {
        // Long CU blocks on a shared register dominate short side work.
        let mut c = C::plain(3, 1);
        c.extend([
            Ins::h(0),
            Ins::macro_block("CU_0", vec![0, 2]).with_duration(100),
            Ins::measure(0, 0),
            Ins::h(1),
            Ins::macro_block("CU_1", vec![1, 2]).with_duration(100),
            Ins::x(0),
        ])
        .unwrap();
        assert_eq!(critical_path(&c, &P::unit()), Ok(vec![0, 1, 4]));
    }

    #[test]
    fn idle_examples() {
        let mut packed = C::plain(1, 0);
        packed.extend([Ins::h(0), Ins::x(0), Ins::z(0)]).unwrap();
        let all = BTreeSet::from([0]);
        assert_eq!(idle_time(&packed, &P::unit(), &all), Ok(0));

        // Work qubit 1: busy 5 + 5 = 10 inside [0, 30].
        let mut toy = C::plain(2, 0);
        toy.extend([
            Ins::cx(0, 1).with_duration(5),
            Ins::x(0).with_duration(20),
            Ins::cx(0, 1).with_duration(5),
        ])
        .unwrap();
        let work = BTreeSet::from([1]);
        assert_eq!(idle_time(&toy, &P::unit(), &work), Ok(20));
        assert_eq!(idle_time(&toy, &P::unit(), &BTreeSet::from([0])), Ok(0));

        let unused = C::plain(3, 0);
        assert_eq!(idle_time(&unused, &P::unit(), &BTreeSet::from([2])), Ok(0));
    }
}
