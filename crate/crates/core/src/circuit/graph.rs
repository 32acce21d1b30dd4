//! DAG and weighted-DAG views of a circuit.

use crate::circuit::Circuit;
use crate::profile::DelayProfile;
use crate::time::Time;
use crate::timing::{delay_of, TimingError};

/// Vertex of a circuit graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Vertex {
    Source,
    Gate(usize),
    Sink,
}

/// Dependency DAG: instructions plus the dummy source and sink.
///
/// Edge `(u, v)` exists when `v` is the next instruction after `u` on some
/// shared qubit or classical bit (condition bits count as wires).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircuitGraph {
    num_gates: usize,
    edges: Vec<(Vertex, Vertex)>,
}

impl CircuitGraph {
    /// Graph over `num_gates` instruction vertices with arbitrary edges.
    /// Not guaranteed acyclic; meant for feeding hand-built graphs to the
    /// longest-path oracle.
    pub fn from_edges(num_gates: usize, edges: Vec<(Vertex, Vertex)>) -> Self {
        Self { num_gates, edges }
    }

    pub fn num_gates(&self) -> usize {
        self.num_gates
    }

    /// Instruction vertices plus `Source` and `Sink`.
    pub fn num_vertices(&self) -> usize {
        self.num_gates + 2
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn successors(&self, u: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.edges
            .iter()
            .filter(move |(a, _)| *a == u)
            .map(|(_, b)| *b)
    }
}

pub fn build_circuit_graph<T: Time>(circuit: &Circuit<T>) -> CircuitGraph {
    let mut last: Vec<Option<usize>> = vec![None; circuit.num_bits()];
    let mut edges = Vec::new();
    for (i, inst) in circuit.instructions().iter().enumerate() {
        for b in inst.bits(circuit.num_qubits()) {
            let from = last[b].map_or(Vertex::Source, Vertex::Gate);
            edges.push((from, Vertex::Gate(i)));
            last[b] = Some(i);
        }
    }
    for i in last.into_iter().flatten() {
        edges.push((Vertex::Gate(i), Vertex::Sink));
    }
    edges.sort_unstable();
    edges.dedup();
    CircuitGraph {
        num_gates: circuit.len(),
        edges,
    }
}

/// Circuit graph whose edge `(u, v)` carries the delay of `v`; edges into the
/// sink carry zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCircuitGraph<T> {
    graph: CircuitGraph,
    weights: Vec<T>,
}

impl<T: Time> WeightedCircuitGraph<T> {
    /// Wraps an explicit graph with per-edge weights, aligned with
    /// [`CircuitGraph::edges`]. No structural checks are made.
    pub fn from_parts(graph: CircuitGraph, weights: Vec<T>) -> Self {
        assert_eq!(graph.edges.len(), weights.len(), "one weight per edge");
        Self { graph, weights }
    }

    pub fn graph(&self) -> &CircuitGraph {
        &self.graph
    }

    pub fn weighted_edges(&self) -> impl Iterator<Item = (Vertex, Vertex, T)> + '_ {
        self.graph
            .edges
            .iter()
            .zip(&self.weights)
            .map(|(&(u, v), &w)| (u, v, w))
    }

    pub fn weight(&self, u: Vertex, v: Vertex) -> Option<T> {
        self.weighted_edges()
            .find(|&(a, b, _)| a == u && b == v)
            .map(|(_, _, w)| w)
    }
}

pub fn build_weighted_graph<T: Time>(
    circuit: &Circuit<T>,
    profile: &DelayProfile<T>,
) -> Result<WeightedCircuitGraph<T>, TimingError> {
    let delays = circuit
        .instructions()
        .iter()
        .map(|inst| delay_of(inst, profile))
        .collect::<Result<Vec<_>, _>>()?;
    let graph = build_circuit_graph(circuit);
    let weights = graph
        .edges
        .iter()
        .map(|&(_, v)| match v {
            Vertex::Gate(i) => delays[i],
            _ => T::zero(),
        })
        .collect();
    Ok(WeightedCircuitGraph { graph, weights })
}

/// Number of instructions on the longest source-to-sink path.
pub fn circuit_depth<T: Time>(circuit: &Circuit<T>) -> usize {
    let mut level = vec![0usize; circuit.num_bits()];
    let mut depth = 0;
    for inst in circuit.instructions() {
        let bits = inst.bits(circuit.num_qubits());
        let next = bits.iter().map(|&b| level[b]).max().unwrap_or(0) + 1;
        for b in bits {
            level[b] = next;
        }
        depth = depth.max(next);
    }
    depth
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Instruction;
    use Vertex::{Gate, Sink, Source};

    type C = Circuit<i64>;
    type Ins = Instruction<i64>;

    fn four_gate() -> C {
        let mut c = C::plain(2, 0);
        c.extend([Ins::h(0), Ins::cx(0, 1), Ins::x(1), Ins::z(1)])
            .unwrap();
        c
    }

    #[test]
    fn per_bit_chains() {
        let g = build_circuit_graph(&four_gate());
        assert_eq!(g.num_vertices(), 6);
        let expected = [
            (Source, Gate(0)),
            (Source, Gate(1)),
            (Gate(0), Gate(1)),
            (Gate(1), Gate(2)),
            (Gate(1), Sink),
            (Gate(2), Gate(3)),
            (Gate(3), Sink),
        ];
        assert_eq!(g.edges(), &expected);
    }

    #[test]
    fn empty_graph_has_isolated_dummies() {
        let g = build_circuit_graph(&C::plain(0, 0));
        assert_eq!(g.num_vertices(), 2);
        assert!(g.edges().is_empty());
        assert!(!g.has_edge(Source, Sink));
        assert_eq!(circuit_depth(&C::plain(3, 0)), 0);
    }

    #[test]
    fn classical_dependency_edge() {
        let mut c = C::plain(2, 1);
        c.extend([Ins::measure(0, 0), Ins::p(0.25, 1).when([0])])
            .unwrap();
        let g = build_circuit_graph(&c);
        assert!(g.has_edge(Gate(0), Gate(1)));
        assert_eq!(circuit_depth(&c), 2);
    }

    #[test]
    fn depth_examples() {
        let mut c = four_gate();
        c.append(Ins::y(0)).unwrap();
        assert_eq!(circuit_depth(&c), 4);

        let mut wide = C::plain(6, 0);
        wide.extend((0..6).map(Ins::x)).unwrap();
        assert_eq!(circuit_depth(&wide), 1);
    }

    #[test]
    fn edges_respect_append_order() {
        let g = build_circuit_graph(&four_gate());
        for &(u, v) in g.edges() {
            if let (Gate(a), Gate(b)) = (u, v) {
                assert!(a < b);
            }
        }
    }
}
