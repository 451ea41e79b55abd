//! Finite directed graphs, pointed graphs, strongly connected components,
//! condensation, topological order and two network generators.
//!
//! Vertex and edge ids are `u32`. Every tie is broken by smallest id so that
//! all outputs are reproducible bit for bit.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rng::seeded;

pub type VertexId = u32;
pub type EdgeId = u32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("edge {0} references unknown vertex {1}")]
    UnknownVertex(EdgeId, VertexId),
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("duplicate edge id {0}")]
    DuplicateEdge(EdgeId),
    #[error("graph contains a directed cycle")]
    CycleDetected,
    #[error("probability {0} outside [0,1]")]
    InvalidProbability(f64),
    #[error("layer {0} is empty")]
    EmptyLayer(usize),
    #[error("need at least two layers, got {0}")]
    TooFewLayers(usize),
    #[error("graph is not simple (loop or parallel edge at edge {0})")]
    NotSimple(EdgeId),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(EdgeId, VertexId, VertexId)", into = "(EdgeId, VertexId, VertexId)")]
pub struct Edge {
    pub id: EdgeId,
    pub src: VertexId,
    pub tgt: VertexId,
}

impl From<(EdgeId, VertexId, VertexId)> for Edge {
    fn from((id, src, tgt): (EdgeId, VertexId, VertexId)) -> Self {
        Edge { id, src, tgt }
    }
}

impl From<Edge> for (EdgeId, VertexId, VertexId) {
    fn from(e: Edge) -> Self {
        (e.id, e.src, e.tgt)
    }
}

/// A finite directed graph. Loops and parallel edges are allowed; use
/// [`DiGraph::check_simple`] where they must be excluded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawGraph", into = "RawGraph")]
pub struct DiGraph {
    vertices: Vec<VertexId>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    edges: Vec<Edge>,
    vertices: Vec<VertexId>,
}

impl TryFrom<RawGraph> for DiGraph {
    type Error = GraphError;
    fn try_from(r: RawGraph) -> Result<Self, GraphError> {
        DiGraph::new(r.vertices, r.edges)
    }
}

impl From<DiGraph> for RawGraph {
    fn from(g: DiGraph) -> Self {
        RawGraph { vertices: g.vertices, edges: g.edges }
    }
}

impl DiGraph {
    pub fn new(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = Edge>,
    ) -> Result<Self, GraphError> {
        let mut vs: Vec<VertexId> = vertices.into_iter().collect();
        vs.sort_unstable();
        if let Some(w) = vs.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateVertex(w[0]));
        }
        let mut es: Vec<Edge> = edges.into_iter().collect();
        es.sort_unstable_by_key(|e| e.id);
        if let Some(w) = es.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(GraphError::DuplicateEdge(w[0].id));
        }
        for e in &es {
            for v in [e.src, e.tgt] {
                if vs.binary_search(&v).is_err() {
                    return Err(GraphError::UnknownVertex(e.id, v));
                }
            }
        }
        Ok(DiGraph { vertices: vs, edges: es })
    }

    /// Builds a graph on vertices `0..n` from `(src, tgt)` pairs; edge ids are
    /// assigned in input order.
    pub fn from_pairs(n: u32, pairs: &[(VertexId, VertexId)]) -> Result<Self, GraphError> {
        DiGraph::new(
            0..n,
            pairs.iter().enumerate().map(|(i, &(s, t))| Edge { id: i as EdgeId, src: s, tgt: t }),
        )
    }

    pub fn empty() -> Self {
        DiGraph { vertices: vec![], edges: vec![] }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// Position of `v` in the sorted vertex list.
    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.binary_search(&v).ok()
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok().map(|i| &self.edges[i])
    }

    pub fn has_edge_between(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.iter().any(|e| e.src == u && e.tgt == v)
    }

    /// Outgoing neighbour indices per vertex index, in edge-id order.
    pub fn successor_indices(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            let s = self.index_of(e.src).expect("validated");
            let t = self.index_of(e.tgt).expect("validated");
            adj[s].push(t);
        }
        adj
    }

    /// Dense adjacency matrix over vertex indices (parallel edges collapse).
    pub fn adjacency_matrix(&self) -> Vec<Vec<bool>> {
        let n = self.vertices.len();
        let mut m = vec![vec![false; n]; n];
        for (s, succ) in self.successor_indices().into_iter().enumerate() {
            for t in succ {
                m[s][t] = true;
            }
        }
        m
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == v)
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.tgt == v)
    }

    pub fn is_simple(&self) -> bool {
        self.check_simple().is_ok()
    }

    /// Rejects loops and parallel edges.
    pub fn check_simple(&self) -> Result<(), GraphError> {
        let mut seen = BTreeSet::new();
        for e in &self.edges {
            if e.src == e.tgt || !seen.insert((e.src, e.tgt)) {
                return Err(GraphError::NotSimple(e.id));
            }
        }
        Ok(())
    }

    /// Subgraph induced on `keep`; edge ids are preserved.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> DiGraph {
        DiGraph {
            vertices: self.vertices.iter().copied().filter(|v| keep.contains(v)).collect(),
            edges: self
                .edges
                .iter()
                .copied()
                .filter(|e| keep.contains(&e.src) && keep.contains(&e.tgt))
                .collect(),
        }
    }

    /// Subgraph keeping all vertices and only the listed edges.
    pub fn edge_subgraph(&self, keep: &BTreeSet<EdgeId>) -> DiGraph {
        DiGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.iter().copied().filter(|e| keep.contains(&e.id)).collect(),
        }
    }

    pub fn max_vertex_id(&self) -> Option<VertexId> {
        self.vertices.last().copied()
    }

    pub fn max_edge_id(&self) -> Option<EdgeId> {
        self.edges.last().map(|e| e.id)
    }

    /// Vertices with no incoming edge.
    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices.iter().copied().filter(|&v| self.in_edges(v).next().is_none()).collect()
    }

    pub fn to_json(&self) -> String {
        crate::io::to_sorted_json(self)
    }
}

/// A graph `G*`: the network plus a disjoint base vertex `v*` carrying the
/// single looping edge `e*`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedDiGraph {
    pub base: DiGraph,
    pub star_vertex: VertexId,
    pub star_edge: EdgeId,
}

impl PointedDiGraph {
    /// The underlying network with the star pair removed.
    pub fn network(&self) -> DiGraph {
        DiGraph {
            vertices: self.base.vertices.iter().copied().filter(|&v| v != self.star_vertex).collect(),
            edges: self.base.edges.iter().copied().filter(|e| e.id != self.star_edge).collect(),
        }
    }

    /// Edges of the network in id order, excluding `e*`.
    pub fn network_edges(&self) -> Vec<Edge> {
        self.base.edges.iter().copied().filter(|e| e.id != self.star_edge).collect()
    }

    pub fn network_vertices(&self) -> Vec<VertexId> {
        self.base.vertices.iter().copied().filter(|&v| v != self.star_vertex).collect()
    }
}

pub fn to_pointed(g: &DiGraph) -> PointedDiGraph {
    let star_vertex = g.max_vertex_id().map_or(0, |v| v + 1);
    let star_edge = g.max_edge_id().map_or(0, |e| e + 1);
    let mut vertices = g.vertices.clone();
    vertices.push(star_vertex);
    let mut edges = g.edges.clone();
    edges.push(Edge { id: star_edge, src: star_vertex, tgt: star_vertex });
    PointedDiGraph { base: DiGraph { vertices, edges }, star_vertex, star_edge }
}

/// Strongly connected components in reverse topological order of the
/// condensation (sink components first). Each component is sorted.
pub fn tarjan_scc(g: &DiGraph) -> Vec<Vec<VertexId>> {
    let n = g.vertex_count();
    let adj = g.successor_indices();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0usize;
    let mut out = Vec::new();

    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        // (vertex, position in its successor list)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < adj[v].len() {
                let w = adj[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(g.vertices[w]);
                        if w == v {
                            break;
                        }
                    }
                    comp.sort_unstable();
                    out.push(comp);
                }
            }
        }
    }
    out
}

/// The condensation of a graph together with the component bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condensation {
    /// Acyclic graph on component ids `0..k`, numbered in a topological order.
    pub graph: DiGraph,
    pub components: Vec<Vec<VertexId>>,
    pub component_of: BTreeMap<VertexId, u32>,
}

/// Contracts each strongly connected component to a vertex. Parallel
/// inter-component edges collapse to one; component ids follow a topological
/// order and new edge ids are assigned in `(source, target)` order.
pub fn condensation(g: &DiGraph) -> Condensation {
    let mut components = tarjan_scc(g);
    components.reverse();
    let component_of: BTreeMap<VertexId, u32> = components
        .iter()
        .enumerate()
        .flat_map(|(i, c)| c.iter().map(move |&v| (v, i as u32)))
        .collect();
    let pairs: BTreeSet<(u32, u32)> = g
        .edges
        .iter()
        .map(|e| (component_of[&e.src], component_of[&e.tgt]))
        .filter(|(a, b)| a != b)
        .collect();
    let graph = DiGraph {
        vertices: (0..components.len() as u32).collect(),
        edges: pairs
            .into_iter()
            .enumerate()
            .map(|(i, (s, t))| Edge { id: i as EdgeId, src: s, tgt: t })
            .collect(),
    };
    Condensation { graph, components, component_of }
}

/// Topological order; among ready vertices the smallest id goes first.
pub fn kahn_order(g: &DiGraph) -> Result<Vec<VertexId>, GraphError> {
    let mut indeg: BTreeMap<VertexId, usize> = g.vertices.iter().map(|&v| (v, 0)).collect();
    for e in &g.edges {
        *indeg.get_mut(&e.tgt).expect("validated") += 1;
    }
    let mut ready: BinaryHeap<Reverse<VertexId>> =
        indeg.iter().filter(|(_, &d)| d == 0).map(|(&v, _)| Reverse(v)).collect();
    let mut order = Vec::with_capacity(g.vertex_count());
    while let Some(Reverse(v)) = ready.pop() {
        order.push(v);
        for e in g.out_edges(v) {
            let d = indeg.get_mut(&e.tgt).expect("validated");
            *d -= 1;
            if *d == 0 {
                ready.push(Reverse(e.tgt));
            }
        }
    }
    if order.len() == g.vertex_count() {
        Ok(order)
    } else {
        Err(GraphError::CycleDetected)
    }
}

fn check_probability(p: f64) -> Result<(), GraphError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GraphError::InvalidProbability(p))
    }
}

/// Directed G(n,p): every ordered pair `(u,v)`, `u != v`, gets an edge with
/// probability `p`, pairs visited in lexicographic order.
pub fn gen_erdos_renyi(n: u32, p: f64, seed: u64) -> Result<DiGraph, GraphError> {
    check_probability(p)?;
    let mut rng = seeded(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    DiGraph::from_pairs(n, &pairs)
}

/// Undirected G(n,p) stored with one edge `u -> v`, `u < v`, per chosen pair.
pub fn gen_erdos_renyi_undirected(n: u32, p: f64, seed: u64) -> Result<DiGraph, GraphError> {
    check_probability(p)?;
    let mut rng = seeded(seed);
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen::<f64>() < p {
                pairs.push((u, v));
            }
        }
    }
    DiGraph::from_pairs(n, &pairs)
}

/// Fully connected layered feedforward graph. Vertices are numbered layer by
/// layer; edges run only between consecutive layers.
pub fn gen_mlp(layer_sizes: &[u32]) -> Result<DiGraph, GraphError> {
    if layer_sizes.len() < 2 {
        return Err(GraphError::TooFewLayers(layer_sizes.len()));
    }
    if let Some(i) = layer_sizes.iter().position(|&s| s == 0) {
        return Err(GraphError::EmptyLayer(i));
    }
    let mut offset = 0u32;
    let mut pairs = Vec::new();
    for w in layer_sizes.windows(2) {
        for a in 0..w[0] {
            for b in 0..w[1] {
                pairs.push((offset + a, offset + w[0] + b));
            }
        }
        offset += w[0];
    }
    let total: u32 = layer_sizes.iter().sum();
    DiGraph::from_pairs(total, &pairs)
}

/// Layer index of every vertex of `gen_mlp(layer_sizes)`.
pub fn mlp_layers(layer_sizes: &[u32]) -> Vec<usize> {
    layer_sizes.iter().enumerate().flat_map(|(i, &s)| std::iter::repeat_n(i, s as usize)).collect()
}
