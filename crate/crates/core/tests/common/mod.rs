#![allow(dead_code)]

use qsta_core::circuit::{Circuit, Instruction};
use rand::seq::index::sample;
use rand::Rng;

/// Random circuit over the basis set with measurements, resets, conditioned
/// gates and per-instruction durations in `1..=max_dur`.
pub fn random_circuit<R: Rng>(
    rng: &mut R,
    max_qubits: usize,
    max_clbits: usize,
    max_len: usize,
    max_dur: i64,
) -> Circuit<i64> {
    let nq = rng.random_range(1..=max_qubits);
    let nc = rng.random_range(0..=max_clbits);
    let len = rng.random_range(0..=max_len);
    let mut c = Circuit::plain(nq, nc);
    for _ in 0..len {
        let q = rng.random_range(0..nq);
        let mut inst = match rng.random_range(0..8) {
            0 => Instruction::h(q),
            1 => Instruction::x(q),
            2 => Instruction::p(0.5, q),
            3 if nq >= 2 => {
                let pair = sample(rng, nq, 2);
                Instruction::cx(pair.index(0), pair.index(1))
            }
            4 if nc > 0 => Instruction::measure(q, rng.random_range(0..nc)),
            5 => Instruction::reset(q),
            6 if nq >= 3 => {
                let k = rng.random_range(2..=nq.min(4));
                let qs = sample(rng, nq, k).into_vec();
                Instruction::macro_block("blk", qs)
            }
            _ => Instruction::z(q),
        };
        if nc > 0 && rng.random_bool(0.2) {
            let k = rng.random_range(1..=nc);
            inst = inst.when(sample(rng, nc, k).into_vec());
        }
        inst = inst.with_duration(rng.random_range(1..=max_dur));
        c.append(inst).expect("generator emits valid instructions");
    }
    c
}
