//! Hopfield dynamics on weighted-code valued summing functors and on their
//! total weights.
//!
//! Categorical states grow by wedge sums at every step, so the word count is
//! exponential in the number of steps. States therefore live in a
//! hash-consed expression arena: a node is the zero object, a leaf code, a
//! weight scaling `(C, t·ω)` of another node, or a wedge sum of nodes. Total
//! weights are cached per node; explicit words are produced on demand by
//! [`Arena::materialize`] within a word budget.

use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng as _;
use thiserror::Error;

use crate::codes::{total_weight, Code, CodeError, WeightedCode, Word};
use crate::graph::{to_pointed, DiGraph, EdgeId, PointedDiGraph};
use crate::netfunctors::{CodeCarrier, FunctorError, SummingFunctor};
use crate::numeric::{fsum, pos};
use crate::resources::{ResourceMonoid, SignedReals};
use crate::rng::seeded;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HopfieldError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("inhibitory mode needs every coupling negative; t[{0}][{1}] = {2}")]
    ModeMismatch(usize, usize, f64),
    #[error("{0} words exceed the budget {1}")]
    WordBudgetExceeded(u64, u64),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

pub type NodeId = u32;

/// The zero object.
pub const ZERO: NodeId = 0;

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Zero,
    Leaf(WeightedCode),
    Scale(f64, NodeId),
    /// Children sorted, none zero, none a wedge.
    Wedge(Vec<NodeId>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Key {
    Leaf(String),
    Scale(u64, NodeId),
    Wedge(Vec<NodeId>),
}

/// Hash-consed store of weighted-code expressions of one length and
/// alphabet. Structurally equal expressions share a node id.
#[derive(Debug, Clone)]
pub struct Arena {
    n: usize,
    q: u8,
    nodes: Vec<Node>,
    alpha: Vec<f64>,
    words: Vec<u64>,
    index: HashMap<Key, NodeId>,
}

impl Arena {
    pub fn new(n: usize, q: u8) -> Self {
        Arena { n, q, nodes: vec![Node::Zero], alpha: vec![0.0], words: vec![0], index: HashMap::new() }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total weight `α`.
    pub fn alpha(&self, id: NodeId) -> f64 {
        self.alpha[id as usize]
    }

    /// Number of nonzero word instances, saturating.
    pub fn words(&self, id: NodeId) -> u64 {
        self.words[id as usize]
    }

    fn intern(&mut self, key: Key, node: Node, alpha: f64, words: u64) -> NodeId {
        if let Some(&id) = self.index.get(&key) {
            return id;
        }
        let id = self.nodes.len() as NodeId;
        self.nodes.push(node);
        self.alpha.push(alpha);
        self.words.push(words);
        self.index.insert(key, id);
        id
    }

    pub fn leaf(&mut self, c: &WeightedCode) -> Result<NodeId, HopfieldError> {
        if c.code().n() != self.n || c.code().q() != self.q {
            return Err(HopfieldError::DimensionMismatch(format!(
                "code ({}, {}) in an arena for ({}, {})",
                c.code().n(),
                c.code().q(),
                self.n,
                self.q
            )));
        }
        if c.len() == 1 {
            return Ok(ZERO);
        }
        Ok(self.intern(Key::Leaf(c.to_text()), Node::Leaf(c.clone()), total_weight(c), (c.len() - 1) as u64))
    }

    /// `(C, t·ω)`; `t = 0` is the zero endofunctor and `t = 1` the identity.
    pub fn scale(&mut self, t: f64, child: NodeId) -> NodeId {
        if t == 0.0 || child == ZERO {
            return ZERO;
        }
        if t == 1.0 {
            return child;
        }
        let (a, w) = (t * self.alpha(child), self.words(child));
        self.intern(Key::Scale(t.to_bits(), child), Node::Scale(t, child), a, w)
    }

    /// Wedge sum, flattened and sorted so that it is associative and
    /// commutative on node ids.
    pub fn wedge(&mut self, parts: &[NodeId]) -> NodeId {
        let mut children = Vec::with_capacity(parts.len());
        for &p in parts {
            match &self.nodes[p as usize] {
                Node::Zero => {}
                Node::Wedge(cs) => children.extend_from_slice(cs),
                _ => children.push(p),
            }
        }
        match children.len() {
            0 => return ZERO,
            1 => return children[0],
            _ => {}
        }
        children.sort_unstable();
        let alpha = fsum(children.iter().map(|&c| self.alpha(c)));
        let words = children.iter().fold(0u64, |acc, &c| acc.saturating_add(self.words(c)));
        self.intern(Key::Wedge(children.clone()), Node::Wedge(children), alpha, words)
    }

    /// The explicit weighted code of a node.
    pub fn materialize(&self, id: NodeId, budget: u64) -> Result<WeightedCode, HopfieldError> {
        let w = self.words(id);
        if w > budget {
            return Err(HopfieldError::WordBudgetExceeded(w, budget));
        }
        let mut words: Vec<Word> = vec![vec![0; self.n]];
        let mut weights = vec![0.0];
        self.emit(id, &mut words, &mut weights);
        Ok(WeightedCode::new(Code::new(self.n, self.q, words)?, weights)?)
    }

    fn emit(&self, id: NodeId, words: &mut Vec<Word>, weights: &mut Vec<f64>) {
        match &self.nodes[id as usize] {
            Node::Zero => {}
            Node::Leaf(c) => {
                words.extend(c.code().nonzero_words().iter().cloned());
                weights.extend_from_slice(&c.weights()[1..]);
            }
            Node::Scale(t, child) => {
                let start = weights.len();
                self.emit(*child, words, weights);
                for w in &mut weights[start..] {
                    *w *= t;
                }
            }
            Node::Wedge(cs) => {
                for &c in cs {
                    self.emit(c, words, weights);
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// `X(n+1) = X(n) ⊕ (Y)₊`.
    #[default]
    SelfTerm,
    /// `X(n+1) = (Y)₊`.
    Pure,
}

/// Couplings `t[i][j]` and external inputs `Θ[i]` indexed by the network
/// edges in id order.
#[derive(Debug, Clone)]
pub struct HopfieldSystem {
    network: PointedDiGraph,
    edges: Vec<EdgeId>,
    t: Vec<Vec<f64>>,
    theta: Vec<WeightedCode>,
    theta_alpha: Vec<f64>,
    variant: Variant,
    n: usize,
    q: u8,
}

impl HopfieldSystem {
    pub fn new(
        network: PointedDiGraph,
        t: Vec<Vec<f64>>,
        theta: Vec<WeightedCode>,
        variant: Variant,
    ) -> Result<Self, HopfieldError> {
        let edges: Vec<EdgeId> = network.network_edges().iter().map(|e| e.id).collect();
        let m = edges.len();
        if t.len() != m || t.iter().any(|r| r.len() != m) {
            return Err(HopfieldError::DimensionMismatch(format!("t must be {m}x{m}")));
        }
        if theta.len() != m {
            return Err(HopfieldError::DimensionMismatch(format!("{} inputs for {m} edges", theta.len())));
        }
        let (n, q) = theta.first().map_or((1, 2), |c| (c.code().n(), c.code().q()));
        if theta.iter().any(|c| c.code().n() != n || c.code().q() != q) {
            return Err(HopfieldError::DimensionMismatch("inputs of different code shapes".into()));
        }
        let theta_alpha = theta.iter().map(total_weight).collect();
        Ok(HopfieldSystem { network, edges, t, theta, theta_alpha, variant, n, q })
    }

    pub fn network(&self) -> &PointedDiGraph {
        &self.network
    }

    pub fn edges(&self) -> &[EdgeId] {
        &self.edges
    }

    pub fn coupling(&self) -> &[Vec<f64>] {
        &self.t
    }

    pub fn theta(&self) -> &[WeightedCode] {
        &self.theta
    }

    /// `θ_e = α(Θ_e)`.
    pub fn theta_alpha(&self) -> &[f64] {
        &self.theta_alpha
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn code_shape(&self) -> (usize, u8) {
        (self.n, self.q)
    }

    /// Errors unless every coupling is negative.
    pub fn check_inhibitory(&self) -> Result<(), HopfieldError> {
        for (i, row) in self.t.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                if !(x < 0.0) {
                    return Err(HopfieldError::ModeMismatch(i, j, x));
                }
            }
        }
        Ok(())
    }

    /// `Σ_{s(e)=v} t_{ee'} = Σ_{t(e)=v} t_{ee'}` for every vertex and column.
    pub fn is_vertex_balanced(&self, tol: f64) -> bool {
        let es = self.network.network_edges();
        self.network.network_vertices().iter().all(|&v| {
            (0..self.edges.len()).all(|j| {
                let out = fsum(es.iter().enumerate().filter(|(_, e)| e.src == v).map(|(i, _)| self.t[i][j]));
                let inc = fsum(es.iter().enumerate().filter(|(_, e)| e.tgt == v).map(|(i, _)| self.t[i][j]));
                (out - inc).abs() <= tol
            })
        })
    }

    fn gate(y: f64) -> bool {
        SignedReals.threshold(&y)
    }

    /// One step on total weights: `α + (Σ t α + θ)₊`, or `(Σ t α + θ)₊` for
    /// the pure variant.
    pub fn step_classical(&self, alpha: &[f64]) -> Vec<f64> {
        (0..alpha.len())
            .map(|i| {
                let y = self.t[i].iter().zip(alpha).map(|(t, a)| t * a).sum::<f64>() + self.theta_alpha[i];
                match self.variant {
                    Variant::SelfTerm => alpha[i] + pos(y),
                    Variant::Pure => pos(y),
                }
            })
            .collect()
    }

    pub fn run_classical(&self, alpha0: &[f64], steps: usize) -> Vec<Vec<f64>> {
        let mut out = vec![alpha0.to_vec()];
        for _ in 0..steps {
            let next = self.step_classical(out.last().expect("nonempty"));
            out.push(next);
        }
        out
    }

    /// Registers the initial codes and `Θ` in a fresh arena.
    pub fn arena_for(&self, initial: &[WeightedCode]) -> Result<(Arena, Vec<NodeId>, Vec<NodeId>), HopfieldError> {
        if initial.len() != self.edges.len() {
            return Err(HopfieldError::DimensionMismatch(format!(
                "{} initial codes for {} edges",
                initial.len(),
                self.edges.len()
            )));
        }
        let mut arena = Arena::new(self.n, self.q);
        let x0 = initial.iter().map(|c| arena.leaf(c)).collect::<Result<Vec<_>, _>>()?;
        let th = self.theta.iter().map(|c| arena.leaf(c)).collect::<Result<Vec<_>, _>>()?;
        Ok((arena, x0, th))
    }

    /// The summands `Y_e = ⊕_{e'} T_{ee'}(X_{e'}) ⊕ Θ_e` before gating.
    pub fn inputs(&self, arena: &mut Arena, theta: &[NodeId], state: &[NodeId]) -> Vec<NodeId> {
        (0..state.len())
            .map(|i| {
                let mut parts: Vec<NodeId> = (0..state.len()).map(|j| arena.scale(self.t[i][j], state[j])).collect();
                parts.push(theta[i]);
                arena.wedge(&parts)
            })
            .collect()
    }

    /// One categorical step. Returns the new state and the gates.
    pub fn step_categorical(&self, arena: &mut Arena, theta: &[NodeId], state: &[NodeId]) -> (Vec<NodeId>, Vec<bool>) {
        let ys = self.inputs(arena, theta, state);
        let mut next = Vec::with_capacity(state.len());
        let mut gates = Vec::with_capacity(state.len());
        for (i, &y) in ys.iter().enumerate() {
            let open = Self::gate(arena.alpha(y));
            let appended = if open { y } else { ZERO };
            next.push(match self.variant {
                Variant::SelfTerm => arena.wedge(&[state[i], appended]),
                Variant::Pure => appended,
            });
            gates.push(open);
        }
        (next, gates)
    }

    /// Runs both dynamics side by side.
    pub fn run(&self, initial: &[WeightedCode], steps: usize) -> Result<Trajectory, HopfieldError> {
        let (mut arena, x0, theta) = self.arena_for(initial)?;
        let mut states = vec![x0];
        let mut gates = Vec::with_capacity(steps);
        for _ in 0..steps {
            let (next, g) = self.step_categorical(&mut arena, &theta, states.last().expect("nonempty"));
            states.push(next);
            gates.push(g);
        }
        let alpha0: Vec<f64> = initial.iter().map(total_weight).collect();
        let classical = self.run_classical(&alpha0, steps);
        Ok(Trajectory { arena, theta, states, gates, classical })
    }

    /// Runs `steps` steps and compares total weights of the categorical
    /// states with the classical trajectory, through cached node weights on
    /// every cell and through the explicit words wherever a state has at
    /// most `word_budget` words.
    pub fn verify_reduction(
        &self,
        initial: &[WeightedCode],
        steps: usize,
        word_budget: u64,
    ) -> Result<ReductionReport, HopfieldError> {
        self.check_inhibitory()?;
        let tr = self.run(initial, steps)?;
        let mut rep = ReductionReport::default();
        for (state, alpha) in tr.states.iter().zip(&tr.classical) {
            for (&x, &a) in state.iter().zip(alpha) {
                rep.cells += 1;
                rep.structural_deviation = rep.structural_deviation.max((tr.arena.alpha(x) - a).abs());
                if tr.arena.words(x) <= word_budget {
                    let wc = tr.arena.materialize(x, word_budget)?;
                    rep.word_deviation = rep.word_deviation.max((total_weight(&wc) - a).abs());
                    rep.word_checked += 1;
                }
            }
        }
        Ok(rep)
    }

    /// The summing functor with the given per-edge values.
    pub fn functor(&self, values: Vec<WeightedCode>) -> Result<SummingFunctor<CodeCarrier>, HopfieldError> {
        let gens: BTreeMap<EdgeId, WeightedCode> = self.edges.iter().copied().zip(values).collect();
        Ok(SummingFunctor::new(self.network.clone(), CodeCarrier { n: self.n, q: self.q }, gens)?)
    }

    /// Conservation at every vertex for a state. Vertices whose outgoing and
    /// incoming wedges are the same node pass structurally; otherwise both
    /// sides are materialized and compared within `tol`.
    pub fn state_in_equalizer(
        &self,
        arena: &mut Arena,
        state: &[NodeId],
        tol: f64,
        word_budget: u64,
    ) -> Result<bool, HopfieldError> {
        let es = self.network.network_edges();
        for v in self.network.network_vertices() {
            let out: Vec<NodeId> = es.iter().zip(state).filter(|(e, _)| e.src == v).map(|(_, &x)| x).collect();
            let inc: Vec<NodeId> = es.iter().zip(state).filter(|(e, _)| e.tgt == v).map(|(_, &x)| x).collect();
            let (a, b) = (arena.wedge(&out), arena.wedge(&inc));
            if a == b {
                continue;
            }
            let (ma, mb) = (arena.materialize(a, word_budget)?, arena.materialize(b, word_budget)?);
            if !ma.equivalent(&mb, tol) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Residuals of the leak-term relation `X(n+1) ⊕ X(n) ≅ (Y(n))₊` on an
    /// explicit trajectory: the largest weight difference after sorting, or
    /// infinity where the word lists differ.
    pub fn leak_relation_residual(&self, traj: &[Vec<WeightedCode>]) -> Result<f64, HopfieldError> {
        let mut worst: f64 = 0.0;
        for w in traj.windows(2) {
            let (mut arena, x, theta) = self.arena_for(&w[0])?;
            let ys = self.inputs(&mut arena, &theta, &x);
            for (i, &y) in ys.iter().enumerate() {
                let rhs = if Self::gate(arena.alpha(y)) { y } else { ZERO };
                let next = arena.leaf(&w[1][i])?;
                let lhs = arena.wedge(&[next, x[i]]);
                let (l, r) = (
                    arena.materialize(lhs, u64::MAX)?.canonical_form(),
                    arena.materialize(rhs, u64::MAX)?.canonical_form(),
                );
                if l.len() != r.len() || l.iter().zip(&r).any(|(a, b)| a.0 != b.0) {
                    return Ok(f64::INFINITY);
                }
                for (a, b) in l.iter().zip(&r) {
                    worst = worst.max((a.1 - b.1).abs());
                }
            }
        }
        Ok(worst)
    }
}

/// A run of both dynamics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub arena: Arena,
    pub theta: Vec<NodeId>,
    /// `states[n][i]` is `X_{e_i}(n)`.
    pub states: Vec<Vec<NodeId>>,
    /// `gates[n][i]` is the gate used to go from step `n` to `n+1`.
    pub gates: Vec<Vec<bool>>,
    pub classical: Vec<Vec<f64>>,
}

impl Trajectory {
    /// Total weights of the categorical states.
    pub fn alpha(&self) -> Vec<Vec<f64>> {
        self.states.iter().map(|s| s.iter().map(|&x| self.arena.alpha(x)).collect()).collect()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ReductionReport {
    /// Largest `|α(X_e(n)) − α_classical(e, n)|` from cached node weights.
    pub structural_deviation: f64,
    /// Largest deviation on cells whose words were summed explicitly.
    pub word_deviation: f64,
    pub cells: usize,
    pub word_checked: usize,
}

impl ReductionReport {
    pub fn max_deviation(&self) -> f64 {
        self.structural_deviation.max(self.word_deviation)
    }
}

fn random_code(rng: &mut crate::rng::Rng, n: usize, k: usize, total: f64) -> WeightedCode {
    let mut words = vec![vec![0u8; n]];
    while words.len() < k + 1 {
        let w: Word = (0..n).map(|_| rng.gen_range(0..2u8)).collect();
        if w.iter().any(|&d| d != 0) {
            words.push(w);
        }
    }
    let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.2..1.0)).collect();
    let s: f64 = raw.iter().sum();
    let mut weights = vec![0.0];
    weights.extend(raw.iter().map(|r| total * r / s));
    WeightedCode::new(Code::new(n, 2, words).expect("valid"), weights).expect("valid")
}

/// Word length used by the random generators.
pub const RANDOM_CODE_LEN: usize = 4;

/// A random linear-inhibitory system on `g`: couplings in `[-0.05, -0.005)`,
/// inputs with `θ_e ∈ [0.5, 1.5)` and initial total weights in `[0.5, 1.5)`,
/// each realised by two or three random words.
pub fn random_inhibitory(
    g: &DiGraph,
    variant: Variant,
    seed: u64,
) -> Result<(HopfieldSystem, Vec<WeightedCode>), HopfieldError> {
    let mut rng = seeded(seed);
    let m = g.edge_count();
    let t: Vec<Vec<f64>> = (0..m).map(|_| (0..m).map(|_| -rng.gen_range(0.005..0.05)).collect()).collect();
    let mut theta = Vec::with_capacity(m);
    let mut init = Vec::with_capacity(m);
    for _ in 0..m {
        let k = rng.gen_range(2..4);
        let th = rng.gen_range(0.5..1.5);
        theta.push(random_code(&mut rng, RANDOM_CODE_LEN, k, th));
        let k = rng.gen_range(2..4);
        let a = rng.gen_range(0.5..1.5);
        init.push(random_code(&mut rng, RANDOM_CODE_LEN, k, a));
    }
    Ok((HopfieldSystem::new(to_pointed(g), t, theta, variant)?, init))
}

/// Partitions the edges of `g` into classes, each an edge-disjoint union of
/// directed cycles found in random order, plus the uncovered edges. Returns
/// the class of each edge in id order (`None` when uncovered).
pub fn cycle_classes(g: &DiGraph, rng: &mut crate::rng::Rng) -> Vec<Option<usize>> {
    let es = g.edges();
    let mut free = vec![true; es.len()];
    let mut order: Vec<usize> = (0..es.len()).collect();
    order.shuffle(rng);
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    for &start in &order {
        if !free[start] {
            continue;
        }
        // breadth-first path from tgt(start) back to src(start) on free edges
        let (from, to) = (es[start].tgt, es[start].src);
        let mut prev: HashMap<u32, usize> = HashMap::new();
        let mut queue = std::collections::VecDeque::from([from]);
        let mut seen = std::collections::HashSet::from([from]);
        while let Some(u) = queue.pop_front() {
            if u == to {
                break;
            }
            for (i, e) in es.iter().enumerate() {
                if free[i] && i != start && e.src == u && seen.insert(e.tgt) {
                    prev.insert(e.tgt, i);
                    queue.push_back(e.tgt);
                }
            }
        }
        if from != to && !seen.contains(&to) {
            continue;
        }
        let mut cyc = vec![start];
        let mut cur = to;
        while cur != from {
            let i = prev[&cur];
            cyc.push(i);
            cur = es[i].src;
        }
        for &i in &cyc {
            free[i] = false;
        }
        cycles.push(cyc);
    }
    let n_classes = cycles.len().div_ceil(2).max(1);
    let mut class = vec![None; es.len()];
    for cyc in &cycles {
        let c = rng.gen_range(0..n_classes);
        for &i in cyc {
            class[i] = Some(c);
        }
    }
    class
}

/// A system in the equalizer class on `g`: edges are grouped by
/// [`cycle_classes`]; initial codes, inputs and couplings depend only on the
/// classes involved, and uncovered edges carry zero data. Such couplings are
/// vertex balanced and the initial functor and inputs satisfy conservation.
pub fn equalizer_instance(
    g: &DiGraph,
    variant: Variant,
    seed: u64,
) -> Result<(HopfieldSystem, Vec<WeightedCode>), HopfieldError> {
    let mut rng = seeded(seed);
    let class = cycle_classes(g, &mut rng);
    let k = class.iter().flatten().max().map_or(0, |&c| c + 1);
    let x0: Vec<WeightedCode> = (0..k)
        .map(|_| {
            let (w, a) = (rng.gen_range(1..4), rng.gen_range(0.5..1.5));
            random_code(&mut rng, RANDOM_CODE_LEN, w, a)
        })
        .collect();
    let th: Vec<WeightedCode> = (0..k)
        .map(|_| {
            let (w, a) = (rng.gen_range(1..4), rng.gen_range(0.5..1.5));
            random_code(&mut rng, RANDOM_CODE_LEN, w, a)
        })
        .collect();
    let tau: Vec<Vec<f64>> = (0..k).map(|_| (0..k).map(|_| rng.gen_range(-0.3..0.1)).collect()).collect();
    let zero = WeightedCode::zero(RANDOM_CODE_LEN, 2);
    let pick = |c: Option<usize>, v: &[WeightedCode]| c.map_or_else(|| zero.clone(), |c| v[c].clone());
    let t = class
        .iter()
        .map(|&ci| class.iter().map(|&cj| ci.zip(cj).map_or(0.0, |(a, b)| tau[a][b])).collect())
        .collect();
    let theta = class.iter().map(|&c| pick(c, &th)).collect();
    let init = class.iter().map(|&c| pick(c, &x0)).collect();
    Ok((HopfieldSystem::new(to_pointed(g), t, theta, variant)?, init))
}
