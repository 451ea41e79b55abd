#![allow(dead_code)]

use catnet::graph::DiGraph;

/// Every simple digraph on `n` vertices, as edge-pair lists.
pub fn digraphs(n: u32) -> Vec<Vec<(u32, u32)>> {
    let pairs: Vec<(u32, u32)> = (0..n).flat_map(|u| (0..n).filter(move |&v| v != u).map(move |v| (u, v))).collect();
    (0u64..1 << pairs.len())
        .map(|mask| pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &p)| p).collect())
        .collect()
}

pub fn build(n: u32, pairs: &[(u32, u32)]) -> DiGraph {
    DiGraph::from_pairs(n, pairs).unwrap()
}

pub fn usize_pairs(pairs: &[(u32, u32)]) -> Vec<(usize, usize)> {
    pairs.iter().map(|&(u, v)| (u as usize, v as usize)).collect()
}
