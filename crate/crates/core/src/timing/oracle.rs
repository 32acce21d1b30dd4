//! Reference longest-path computation on the explicit weighted graph.
//!
//! Independent of append order: vertices are ordered by a fresh topological
//! sort, so this also validates that the graph is acyclic.

use std::collections::HashMap;

use petgraph::algo::toposort;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;

use crate::circuit::graph::{Vertex, WeightedCircuitGraph};
use crate::time::Time;
use crate::timing::TimingError;

/// Longest source-to-sink path delay and one path achieving it, as
/// instruction indices.
pub fn longest_path_oracle<T: Time>(
    wdag: &WeightedCircuitGraph<T>,
) -> Result<(T, Vec<usize>), TimingError> {
    let mut g: DiGraph<Vertex, T> = DiGraph::new();
    let mut ids: HashMap<Vertex, NodeIndex> = HashMap::new();
    let mut node =
        |g: &mut DiGraph<Vertex, T>, v: Vertex| *ids.entry(v).or_insert_with(|| g.add_node(v));
    let source = node(&mut g, Vertex::Source);
    let sink = node(&mut g, Vertex::Sink);
    for (u, v, w) in wdag.weighted_edges() {
        let (a, b) = (node(&mut g, u), node(&mut g, v));
        g.add_edge(a, b, w);
    }
    let order = toposort(&g, None).map_err(|_| TimingError::Cycle)?;

    let mut dist: HashMap<NodeIndex, (T, Option<NodeIndex>)> = HashMap::new();
    dist.insert(source, (T::zero(), None));
    for u in order {
        let Some(&(du, _)) = dist.get(&u) else {
            continue;
        };
        for e in g.edges(u) {
            let cand = du + *e.weight();
            let entry = dist.entry(e.target()).or_insert((cand, Some(u)));
            if cand > entry.0 {
                *entry = (cand, Some(u));
            }
        }
    }

    let Some(&(total, _)) = dist.get(&sink) else {
        return Ok((T::zero(), Vec::new()));
    };
    let mut path = Vec::new();
    let mut cur = dist[&sink].1;
    while let Some(n) = cur {
        if let Vertex::Gate(i) = g[n] {
            path.push(i);
        }
        cur = dist[&n].1;
    }
    path.reverse();
    Ok((total, path))
}
