//! Two-QPU distribution with the EJPP telegate.
//!
//! The data register lives on QPU A and the work register on QPU B. Every
//! controlled-unitary block is executed remotely on one ebit channel:
//!
//! ```text
//! G  reset c_A, reset c_B (channel reuse only), ebit_h c_A, ebit_cx c_A c_B
//! S  cx d c_A, measure c_A, x c_B if bit
//!    CU controlled by c_B
//! E  h c_B, measure c_B, z d if bit
//! ```
//!
//! Blocks are assigned to channels round-robin, so block `i` uses channel
//! `i mod k` and the whole circuit consumes exactly `m` ebits.

use crate::circuit::{Circuit, Instruction};
use crate::designs::{build_design, phase_block_delay, DesignError, DesignKind, ShorDesignSpec};
use crate::profile::DelayProfile;
use crate::time::Time;
use crate::timing::{circuit_delay, TimingError};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EbitChannel<T> {
    pub c_on_a: usize,
    pub c_on_b: usize,
    /// Generation time, charged to the `ebit_cx` instruction.
    pub t_ebit: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedLayout<T> {
    channels: Vec<EbitChannel<T>>,
}

impl<T: Time> DistributedLayout<T> {
    pub fn new(channels: Vec<EbitChannel<T>>) -> Result<Self, DesignError> {
        if channels.is_empty() {
            return Err(DesignError::Parameters(
                "need at least one ebit channel".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for ch in &channels {
            if ch.t_ebit < T::zero() {
                return Err(DesignError::Parameters("negative t_ebit".into()));
            }
            if !seen.insert(ch.c_on_a) || !seen.insert(ch.c_on_b) {
                return Err(DesignError::Parameters(format!(
                    "communication qubits of channel ({}, {}) clash",
                    ch.c_on_a, ch.c_on_b
                )));
            }
        }
        Ok(Self { channels })
    }

    /// `k` identical channels placed right after the compute qubits of `spec`.
    pub fn uniform(spec: &ShorDesignSpec<T>, k: usize, t_ebit: T) -> Result<Self, DesignError> {
        let base = spec.compute_qubits();
        Self::new(
            (0..k)
                .map(|j| EbitChannel {
                    c_on_a: base + 2 * j,
                    c_on_b: base + 2 * j + 1,
                    t_ebit,
                })
                .collect(),
        )
    }

    pub fn k(&self) -> usize {
        self.channels.len()
    }

    pub fn channels(&self) -> &[EbitChannel<T>] {
        &self.channels
    }

    /// Channel serving controlled-unitary block `i`.
    pub fn assign(&self, i: usize) -> usize {
        i % self.k()
    }

    /// Communication qubits must fill exactly the indices after the compute
    /// qubits of `spec`.
    pub(crate) fn validate_for(&self, spec: &ShorDesignSpec<T>) -> Result<(), DesignError> {
        let base = spec.compute_qubits();
        let top = base + 2 * self.k();
        for ch in &self.channels {
            for q in [ch.c_on_a, ch.c_on_b] {
                if q < base || q >= top {
                    return Err(DesignError::Parameters(format!(
                        "communication qubit {q} outside {base}..{top}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub fn assign_channels(m: usize, k: usize) -> Vec<usize> {
    assert!(k >= 1, "at least one channel");
    (0..m).map(|i| i % k).collect()
}

/// Distributed circuit for `spec` over `layout`.
pub fn distribute<T: Time>(
    spec: &ShorDesignSpec<T>,
    layout: &DistributedLayout<T>,
) -> Result<Circuit<T>, DesignError> {
    build_design(spec, Some(layout))
}

/// Delays of the three distribution blocks on one channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDelays<T> {
    /// Generation on a fresh channel.
    pub g_first: T,
    /// Generation on a reused channel, including the two resets.
    pub g_reuse: T,
    pub s: T,
    pub e: T,
}

impl<T: Time> BlockDelays<T> {
    /// t(GSE) on a fresh channel.
    pub fn gse_first(&self) -> T {
        self.g_first + self.s + self.e
    }

    pub fn gse_reuse(&self) -> T {
        self.g_reuse + self.s + self.e
    }
}

pub fn block_delays<T: Time>(
    profile: &DelayProfile<T>,
    t_ebit: T,
) -> Result<BlockDelays<T>, TimingError> {
    // d = 0, c_A = 1, c_B = 2
    let run = |insts: Vec<Instruction<T>>| {
        let mut c = Circuit::plain(3, 2);
        c.extend(insts).expect("scratch block is well formed");
        circuit_delay(&c, profile)
    };
    let gen = || {
        vec![
            Instruction::ebit_h(1),
            Instruction::ebit_cx(1, 2).with_duration(t_ebit),
        ]
    };
    let mut reuse = vec![Instruction::reset(1), Instruction::reset(2)];
    reuse.extend(gen());
    Ok(BlockDelays {
        g_first: run(gen())?,
        g_reuse: run(reuse)?,
        s: run(vec![
            Instruction::cx(0, 1),
            Instruction::measure(1, 0),
            Instruction::x(2).when([0]),
        ])?,
        e: run(vec![
            Instruction::h(2),
            Instruction::measure(2, 1),
            Instruction::z(0).when([1]),
        ])?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributedZeroIdle<T> {
    /// Every reuse window of `k - 1` blocks hides a full G/S/E cycle.
    pub exact: bool,
    /// `(k - 1) · mean(t_CU) ≥ t(GSE)`.
    pub relaxed: bool,
    /// Per reuse: the summed CU delay between two uses of a channel minus
    /// the channel turnaround t(G S E) with resets.
    pub margins: Vec<T>,
    pub t_gse: T,
}

/// Zero-idle test for the work register under `layout`.
///
/// Channel `j` serves blocks `i` and `i + k`. Between the end of `CU_i` and
/// the start of `CU_{i+k}` the channel must finish `E_i`, regenerate and run
/// `S_{i+k}`, while the work register executes the `k - 1` blocks in between.
pub fn check_distributed_zero_idle<T: Time>(
    spec: &ShorDesignSpec<T>,
    profile: &DelayProfile<T>,
    layout: &DistributedLayout<T>,
) -> Result<DistributedZeroIdle<T>, DesignError> {
    let cu = spec.cu_delays(profile)?;
    let k = layout.k();
    let m = spec.m;
    let margins: Vec<T> = (0..m.saturating_sub(k))
        .map(|i| {
            let t_gse =
                block_delays(profile, layout.channels()[layout.assign(i)].t_ebit)?.gse_reuse();
            Ok(T::total(cu[i + 1..i + k].iter().copied()) - t_gse)
        })
        .collect::<Result<_, TimingError>>()?;
    let worst = layout
        .channels()
        .iter()
        .map(|ch| block_delays(profile, ch.t_ebit).map(|b| b.gse_reuse()))
        .collect::<Result<Vec<T>, _>>()?
        .into_iter()
        .fold(T::zero(), T::later);
    let mean = T::total(cu.iter().copied()).as_f64() / m as f64;
    Ok(DistributedZeroIdle {
        exact: margins.iter().all(|x| *x >= T::zero()) && !(k == 1 && worst > T::zero()),
        relaxed: (k - 1) as f64 * mean >= worst.as_f64(),
        margins,
        t_gse: worst,
    })
}

/// Alternating design only: the data qubit freed by `E_i` must finish its
/// phase step and `S_{i+2}` while `CU_{i+1}` runs.
///
/// Margin `i` is `t(CU_{i+1}) − t(E) − t(P_i H M R H) − t(S)`.
pub fn check_data_turnaround<T: Time>(
    spec: &ShorDesignSpec<T>,
    profile: &DelayProfile<T>,
    layout: &DistributedLayout<T>,
) -> Result<Vec<T>, DesignError> {
    if spec.design != DesignKind::Alternating {
        return Ok(Vec::new());
    }
    let cu = spec.cu_delays(profile)?;
    (0..spec.m.saturating_sub(1))
        .map(|i| {
            let b = block_delays(profile, layout.channels()[layout.assign(i)].t_ebit)?;
            let phase = phase_block_delay(i, spec.design.phase_mode(), profile)?;
            Ok(cu[i + 1] - b.e - phase - b.s)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistributionBounds<T> {
    /// t(G) + t(S) + t(E) of a fresh channel.
    pub delta_d_not_m: T,
    /// `(m - 1)` times the largest per-block G/S/E delay (resets included).
    pub delta_d_m_upper: T,
}

pub fn distribution_delay_bounds<T: Time>(
    spec: &ShorDesignSpec<T>,
    profile: &DelayProfile<T>,
    layout: &DistributedLayout<T>,
) -> Result<DistributionBounds<T>, TimingError> {
    let mut worst = T::zero();
    for i in 0..spec.m {
        let b = block_delays(profile, layout.channels()[layout.assign(i)].t_ebit)?;
        worst = worst.later(if i >= layout.k() {
            b.gse_reuse()
        } else {
            b.gse_first()
        });
    }
    let first = block_delays(profile, layout.channels()[0].t_ebit)?;
    Ok(DistributionBounds {
        delta_d_not_m: first.gse_first(),
        delta_d_m_upper: worst * T::from_count(spec.m.saturating_sub(1)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{BlockTag, OpKind, Role};
    use crate::designs::CuProvider;

    type Spec = ShorDesignSpec<i64>;

    fn count(c: &Circuit<i64>, kind: OpKind) -> usize {
        c.instructions()
            .iter()
            .filter(|i| i.opcode.kind() == kind)
            .count()
    }

    #[test]
    fn round_robin() {
        assert_eq!(assign_channels(5, 1), vec![0; 5]);
        assert_eq!(assign_channels(4, 2), vec![0, 1, 0, 1]);
        assert_eq!(assign_channels(5, 3), vec![0, 1, 2, 0, 1]);
    }

    #[test]
    fn layout_rejects_clashes() {
        let ch = |a, b| EbitChannel {
            c_on_a: a,
            c_on_b: b,
            t_ebit: 1i64,
        };
        assert!(DistributedLayout::new(vec![ch(4, 5), ch(5, 6)]).is_err());
        assert!(DistributedLayout::new(vec![ch(4, 4)]).is_err());
        assert!(DistributedLayout::<i64>::new(vec![]).is_err());
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(1));
        let low = DistributedLayout::new(vec![ch(0, 5)]).unwrap();
        assert!(distribute(&spec, &low).is_err());
    }

    #[test]
    fn serial_single_channel() {
        let spec = Spec::new(DesignKind::Iterative, 2, CuProvider::constant(5)).with_m(2);
        let layout = DistributedLayout::uniform(&spec, 1, 10).unwrap();
        let c = distribute(&spec, &layout).unwrap();
        assert_eq!(c.num_qubits(), 2 + 1 + 2);
        assert_eq!(c.qubits_with_role(Role::Comm), vec![3, 4]);
        assert_eq!(count(&c, OpKind::EbitCx), 2);
        // Resets only on the reused channel.
        assert_eq!(c.tagged(BlockTag::Gen(0)).count(), 2);
        assert_eq!(c.tagged(BlockTag::Gen(1)).count(), 4);
        // Every CU is controlled by c_B.
        assert!(c
            .instructions()
            .iter()
            .filter(|i| i.opcode.kind() == OpKind::Macro)
            .all(|i| i.qubits[0] == 4));
    }

    #[test]
    fn ebits_equal_m_for_every_k() {
        for design in DesignKind::ALL {
            let spec = Spec::new(design, 2, CuProvider::constant(7)).with_m(5);
            for k in 1..=6 {
                let layout = DistributedLayout::uniform(&spec, k, 3).unwrap();
                let c = distribute(&spec, &layout).unwrap();
                assert_eq!(count(&c, OpKind::EbitCx), 5);
                assert_eq!(c.num_qubits(), spec.compute_qubits() + 2 * k);
            }
        }
    }

    #[test]
    fn alternating_channels() {
        let spec = Spec::new(DesignKind::Alternating, 2, CuProvider::constant(7)).with_m(4);
        let layout = DistributedLayout::uniform(&spec, 2, 3).unwrap();
        let c = distribute(&spec, &layout).unwrap();
        let a_side: Vec<usize> = c
            .instructions()
            .iter()
            .filter(|i| i.opcode.kind() == OpKind::EbitCx)
            .map(|i| i.qubits[0])
            .collect();
        assert_eq!(a_side, vec![4, 6, 4, 6]);
    }

    #[test]
    fn block_delay_example() {
        let p = DelayProfile::<i64>::new("u", 1, 1, 1, 1);
        let b = block_delays(&p, 10).unwrap();
        assert_eq!((b.g_first, b.s, b.e), (10, 3, 3));
        assert_eq!(b.gse_first(), 16);
        assert_eq!(b.g_reuse, 11);

        let spec = Spec::new(DesignKind::Iterative, 1, CuProvider::constant(1)).with_m(1);
        let layout = DistributedLayout::uniform(&spec, 1, 10).unwrap();
        let bounds = distribution_delay_bounds(&spec, &p, &layout).unwrap();
        assert_eq!(bounds.delta_d_not_m, 16);
        assert_eq!(bounds.delta_d_m_upper, 0);

        let zero = DelayProfile::<i64>::new("z", 0, 0, 0, 0);
        let l2 = DistributedLayout::uniform(&spec, 1, 20).unwrap();
        let once = distribution_delay_bounds(&spec, &zero, &layout).unwrap();
        let twice = distribution_delay_bounds(&spec, &zero, &l2).unwrap();
        assert_eq!(twice.delta_d_not_m, 2 * once.delta_d_not_m);
    }

    #[test]
    fn zero_idle_windows() {
        // Zero-delay gates make t(GSE) = t_ebit = 8.
        let p = DelayProfile::<i64>::new("z", 0, 0, 0, 0);
        let spec = Spec::new(
            DesignKind::RegularSemiclassical,
            2,
            CuProvider::constant(10),
        )
        .with_m(6);
        let k2 = DistributedLayout::uniform(&spec, 2, 8).unwrap();
        let r = check_distributed_zero_idle(&spec, &p, &k2).unwrap();
        assert!(r.exact && r.relaxed);
        assert_eq!(r.t_gse, 8);

        let spec = spec.clone();
        let spec3 = Spec {
            cu: CuProvider::constant(3),
            ..spec
        };
        let r = check_distributed_zero_idle(&spec3, &p, &k2).unwrap();
        assert!(!r.exact);
        let k4 = DistributedLayout::uniform(&spec3, 4, 8).unwrap();
        let r = check_distributed_zero_idle(&spec3, &p, &k4).unwrap();
        assert!(r.exact, "three blocks of 3 cover 8: {:?}", r.margins);

        let k1 = DistributedLayout::uniform(&spec3, 1, 8).unwrap();
        assert!(!check_distributed_zero_idle(&spec3, &p, &k1).unwrap().exact);
        let k1_free = DistributedLayout::uniform(&spec3, 1, 0).unwrap();
        assert!(
            check_distributed_zero_idle(&spec3, &p, &k1_free)
                .unwrap()
                .exact
        );
    }
}
