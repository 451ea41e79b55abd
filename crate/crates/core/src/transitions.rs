//! Transition systems `τ = (S, ι, L, T)` with an optional final state, their
//! coproduct and product, grafting, and the architecture functor that
//! assembles one system from a graph whose vertices carry systems.
//!
//! Idle transitions `(s, ⋆, s)` are implicit: they are never stored and are
//! materialised only when words are enumerated.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{Code, CodeError};
use crate::graph::{condensation, kahn_order, DiGraph, Edge, EdgeId, GraphError, VertexId};

pub type StateId = usize;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransitionError {
    #[error("state {0} does not exist")]
    StateNotFound(StateId),
    #[error("transition uses unknown label {0:?}")]
    UnknownLabel(String),
    #[error("label {0:?} appears with delays {1} and {2}")]
    LabelConflict(String, u32, u32),
    #[error("system for vertex {0} has no final state")]
    NoFinalState(VertexId),
    #[error("no system supplied for vertex {0}")]
    MissingPart(VertexId),
    #[error("product would have {0} states, above the cap {1}")]
    ProductBudgetExceeded(usize, usize),
    #[error("{0} summands exceed the budget {1}")]
    BudgetExceeded(usize, usize),
    #[error("more than {0} words")]
    EnumerationBudgetExceeded(usize),
    #[error("graph is not strongly connected")]
    NotStronglyConnected,
    #[error("order is not a topological order of the graph")]
    InvalidOrder,
    #[error("machine {0} does not induce a strongly connected subgraph")]
    MachineNotStronglyConnected(usize),
    #[error("the machine quotient has a cycle")]
    CondensationNotAcyclic,
    #[error("invalid distributed structure: {0}")]
    InvalidStructure(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Code(#[from] CodeError),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Label {
    pub name: String,
    #[serde(default)]
    pub delay: u32,
}

impl Label {
    pub fn new(name: impl Into<String>) -> Self {
        Label { name: name.into(), delay: 0 }
    }

    pub fn delayed(name: impl Into<String>, delay: u32) -> Self {
        Label { name: name.into(), delay }
    }
}

/// A transition system on states `0..n_states`. Labels are kept sorted by
/// name; transitions `(src, label index, dst)` are sorted and unique.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSystem", into = "RawSystem")]
pub struct TransitionSystem {
    n_states: usize,
    initial: StateId,
    final_state: Option<StateId>,
    labels: Vec<Label>,
    transitions: Vec<(StateId, usize, StateId)>,
}

#[derive(Serialize, Deserialize)]
struct RawSystem {
    #[serde(rename = "final", default, skip_serializing_if = "Option::is_none")]
    final_state: Option<StateId>,
    initial: StateId,
    labels: Vec<Label>,
    states: Vec<StateId>,
    transitions: Vec<(StateId, String, StateId)>,
}

impl TryFrom<RawSystem> for TransitionSystem {
    type Error = TransitionError;
    fn try_from(r: RawSystem) -> Result<Self, TransitionError> {
        let n = r.states.len();
        if r.states.iter().copied().ne(0..n) {
            return Err(TransitionError::InvalidStructure("states must be 0..n in order".into()));
        }
        let tr: Vec<(StateId, &str, StateId)> = r.transitions.iter().map(|(s, l, t)| (*s, l.as_str(), *t)).collect();
        TransitionSystem::new(n, r.initial, r.final_state, r.labels, &tr)
    }
}

impl From<TransitionSystem> for RawSystem {
    fn from(t: TransitionSystem) -> Self {
        RawSystem {
            final_state: t.final_state,
            initial: t.initial,
            states: (0..t.n_states).collect(),
            transitions: t.transitions.iter().map(|&(s, l, d)| (s, t.labels[l].name.clone(), d)).collect(),
            labels: t.labels,
        }
    }
}

impl TransitionSystem {
    /// Builds a system from named transitions. Labels mentioned only in
    /// transitions are added with delay 0.
    pub fn new(
        n_states: usize,
        initial: StateId,
        final_state: Option<StateId>,
        labels: Vec<Label>,
        transitions: &[(StateId, &str, StateId)],
    ) -> Result<Self, TransitionError> {
        let mut a = Assembly { n_states, ..Assembly::default() };
        for l in labels {
            a.add_label(&l)?;
        }
        for &(s, l, d) in transitions {
            for x in [s, d] {
                if x >= n_states {
                    return Err(TransitionError::StateNotFound(x));
                }
            }
            if !a.labels.contains_key(l) {
                a.add_label(&Label::new(l))?;
            }
            a.transitions.insert((s, l.to_string(), d));
        }
        for x in std::iter::once(initial).chain(final_state) {
            if x >= n_states {
                return Err(TransitionError::StateNotFound(x));
            }
        }
        Ok(a.finish(initial, final_state, &[]).0)
    }

    /// The zero object: one state, no labels, no transitions.
    pub fn zero() -> Self {
        TransitionSystem { n_states: 1, initial: 0, final_state: None, labels: vec![], transitions: vec![] }
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn final_state(&self) -> Option<StateId> {
        self.final_state
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn transitions(&self) -> &[(StateId, usize, StateId)] {
        &self.transitions
    }

    pub fn label_index(&self, name: &str) -> Option<usize> {
        self.labels.binary_search_by(|l| l.name.as_str().cmp(name)).ok()
    }

    /// Transitions as `(src, label name, dst)`.
    pub fn named_transitions(&self) -> Vec<(StateId, &str, StateId)> {
        self.transitions.iter().map(|&(s, l, d)| (s, self.labels[l].name.as_str(), d)).collect()
    }

    /// The same system with a different final state.
    pub fn with_final(mut self, q: Option<StateId>) -> Result<Self, TransitionError> {
        if let Some(x) = q {
            if x >= self.n_states {
                return Err(TransitionError::StateNotFound(x));
            }
        }
        self.final_state = q;
        Ok(self)
    }

    /// Renumbers states in breadth-first order from the initial state,
    /// following outgoing transitions in `(label, target)` order; states not
    /// reachable keep their relative order at the end. Exact as an
    /// isomorphism invariant on deterministic systems and idempotent always.
    pub fn canonicalize(&self) -> TransitionSystem {
        let mut out_adj: Vec<Vec<(usize, StateId)>> = vec![Vec::new(); self.n_states];
        for &(s, l, d) in &self.transitions {
            out_adj[s].push((l, d));
        }
        let mut new_id = vec![usize::MAX; self.n_states];
        let mut next = 0;
        let mut queue = VecDeque::from([self.initial]);
        new_id[self.initial] = 0;
        next += 1;
        while let Some(s) = queue.pop_front() {
            let mut succ = out_adj[s].clone();
            succ.sort_unstable();
            for (_, d) in succ {
                if new_id[d] == usize::MAX {
                    new_id[d] = next;
                    next += 1;
                    queue.push_back(d);
                }
            }
        }
        for id in new_id.iter_mut() {
            if *id == usize::MAX {
                *id = next;
                next += 1;
            }
        }
        let mut transitions: Vec<_> = self.transitions.iter().map(|&(s, l, d)| (new_id[s], l, new_id[d])).collect();
        transitions.sort_unstable();
        TransitionSystem {
            n_states: self.n_states,
            initial: 0,
            final_state: self.final_state.map(|q| new_id[q]),
            labels: self.labels.clone(),
            transitions,
        }
    }

    pub fn to_json(&self) -> String {
        crate::io::to_sorted_json(self)
    }
}

/// Working representation used by all constructions: named labels and
/// transitions, plus state identifications applied at the end.
#[derive(Default)]
struct Assembly {
    n_states: usize,
    labels: BTreeMap<String, u32>,
    transitions: BTreeSet<(StateId, String, StateId)>,
}

impl Assembly {
    fn add_label(&mut self, l: &Label) -> Result<(), TransitionError> {
        match self.labels.get(&l.name) {
            Some(&d) if d != l.delay => Err(TransitionError::LabelConflict(l.name.clone(), d, l.delay)),
            _ => {
                self.labels.insert(l.name.clone(), l.delay);
                Ok(())
            }
        }
    }

    /// Appends a disjoint copy of `t`; returns the offset of its states.
    fn add_system(&mut self, t: &TransitionSystem) -> Result<usize, TransitionError> {
        let off = self.n_states;
        self.n_states += t.n_states;
        for l in &t.labels {
            self.add_label(l)?;
        }
        for &(s, l, d) in &t.transitions {
            self.transitions.insert((s + off, t.labels[l].name.clone(), d + off));
        }
        Ok(off)
    }

    /// Identifies the given state pairs, renumbers representatives in order
    /// of their smallest member, and returns the system with the old-to-new
    /// state map.
    fn finish(
        self,
        initial: StateId,
        final_state: Option<StateId>,
        glue: &[(StateId, StateId)],
    ) -> (TransitionSystem, Vec<StateId>) {
        let mut parent: Vec<usize> = (0..self.n_states).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        for &(a, b) in glue {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
                parent[hi] = lo;
            }
        }
        let mut new_id = vec![usize::MAX; self.n_states];
        let mut next = 0;
        let mut map = vec![0; self.n_states];
        for s in 0..self.n_states {
            let r = find(&mut parent, s);
            if new_id[r] == usize::MAX {
                new_id[r] = next;
                next += 1;
            }
            map[s] = new_id[r];
        }
        let labels: Vec<Label> = self.labels.into_iter().map(|(name, delay)| Label { name, delay }).collect();
        let index = |name: &str| labels.binary_search_by(|l| l.name.as_str().cmp(name)).expect("label registered");
        let mut transitions: Vec<(StateId, usize, StateId)> =
            self.transitions.iter().map(|(s, l, d)| (map[*s], index(l), map[*d])).collect();
        transitions.sort_unstable();
        transitions.dedup();
        let sys = TransitionSystem {
            n_states: next,
            initial: map[initial],
            final_state: final_state.map(|q| map[q]),
            labels,
            transitions,
        };
        (sys, map)
    }
}

/// A coproduct with the embeddings of both summands' states.
#[derive(Debug, Clone, PartialEq)]
pub struct Coproduct {
    pub system: TransitionSystem,
    pub left: Vec<StateId>,
    pub right: Vec<StateId>,
}

/// `τ₁ ⊔ τ₂`: states `S₁×{ι₂} ∪ {ι₁}×S₂` with the initial states identified,
/// labels and transitions united. A final state survives only when exactly
/// one summand has one.
pub fn coproduct(t1: &TransitionSystem, t2: &TransitionSystem) -> Result<Coproduct, TransitionError> {
    let mut a = Assembly::default();
    let o1 = a.add_system(t1)?;
    let o2 = a.add_system(t2)?;
    let fin = match (t1.final_state, t2.final_state) {
        (Some(q), None) => Some(q + o1),
        (None, Some(q)) => Some(q + o2),
        _ => None,
    };
    let (system, map) = a.finish(t1.initial + o1, fin, &[(t1.initial + o1, t2.initial + o2)]);
    Ok(Coproduct {
        left: map[o1..o1 + t1.n_states].to_vec(),
        right: map[o2..o2 + t2.n_states].to_vec(),
        system,
    })
}

/// Coproduct of systems with unique final states in which initial states
/// are identified and final states are identified, so the result again has
/// a unique final state. Returns the state embeddings of all summands.
pub fn coproduct_final(parts: &[TransitionSystem]) -> Result<(TransitionSystem, Vec<Vec<StateId>>), TransitionError> {
    let mut a = Assembly::default();
    let mut offs = Vec::with_capacity(parts.len());
    for p in parts {
        offs.push(a.add_system(p)?);
    }
    let mut glue = Vec::new();
    for (i, p) in parts.iter().enumerate() {
        let q = p.final_state.ok_or(TransitionError::NoFinalState(i as VertexId))?;
        if i > 0 {
            glue.push((parts[0].initial + offs[0], p.initial + offs[i]));
            glue.push((parts[0].final_state.expect("checked") + offs[0], q + offs[i]));
        }
    }
    let first = parts.first().ok_or(TransitionError::InvalidStructure("empty coproduct".into()))?;
    let (sys, map) = a.finish(
        first.initial + offs[0],
        first.final_state.map(|q| q + offs[0]),
        &glue,
    );
    let embeds = parts.iter().zip(&offs).map(|(p, &o)| map[o..o + p.n_states].to_vec()).collect();
    Ok((sys, embeds))
}

/// A product with the projections recorded per state and label.
#[derive(Debug, Clone, PartialEq)]
pub struct Product {
    pub system: TransitionSystem,
    /// `pairs[s] = (s₁, s₂)`.
    pub pairs: Vec<(StateId, StateId)>,
    /// Per label of `system`, the component labels; `None` is idle.
    pub label_pairs: Vec<(Option<usize>, Option<usize>)>,
}

pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// `τ₁ × τ₂`: a transition exists iff both projections are transitions,
/// idles included, except the all-idle pair.
pub fn product(t1: &TransitionSystem, t2: &TransitionSystem, cap: usize) -> Result<Product, TransitionError> {
    let n = t1.n_states * t2.n_states;
    if n > cap {
        return Err(TransitionError::ProductBudgetExceeded(n, cap));
    }
    let id = |a: StateId, b: StateId| a * t2.n_states + b;
    let with_idle = |t: &TransitionSystem| -> Vec<(StateId, Option<usize>, StateId)> {
        let mut v: Vec<_> = (0..t.n_states).map(|s| (s, None, s)).collect();
        v.extend(t.transitions.iter().map(|&(s, l, d)| (s, Some(l), d)));
        v
    };
    let name = |t: &TransitionSystem, l: Option<usize>| l.map_or("*".to_string(), |i| t.labels[i].name.clone());
    let delay = |t: &TransitionSystem, l: Option<usize>| l.map_or(0, |i| t.labels[i].delay);
    let mut a = Assembly { n_states: n, ..Default::default() };
    let mut by_name: BTreeMap<String, (Option<usize>, Option<usize>)> = BTreeMap::new();
    for &(s1, l1, d1) in &with_idle(t1) {
        for &(s2, l2, d2) in &with_idle(t2) {
            if l1.is_none() && l2.is_none() {
                continue;
            }
            let nm = format!("({},{})", name(t1, l1), name(t2, l2));
            a.add_label(&Label::delayed(nm.clone(), delay(t1, l1).max(delay(t2, l2))))?;
            by_name.insert(nm.clone(), (l1, l2));
            a.transitions.insert((id(s1, s2), nm, id(d1, d2)));
        }
    }
    let fin = match (t1.final_state, t2.final_state) {
        (Some(p), Some(q)) => Some(id(p, q)),
        _ => None,
    };
    let (system, _) = a.finish(id(t1.initial, t2.initial), fin, &[]);
    let label_pairs = system.labels.iter().map(|l| by_name[&l.name]).collect();
    let pairs = (0..t1.n_states).flat_map(|a| (0..t2.n_states).map(move |b| (a, b))).collect();
    Ok(Product { system, pairs, label_pairs })
}

/// Joins `t2` to `t1` by one bridge transition `(s, label, s2)`. States are
/// `S₁` followed by `S₂`; the initial state is `ι₁`. When the bridge runs
/// from the final state of `t1` to the initial state of `t2`, the final
/// state of the result is that of `t2`; otherwise it has none.
pub fn graft(
    t1: &TransitionSystem,
    s: StateId,
    t2: &TransitionSystem,
    s2: StateId,
    label: Label,
) -> Result<TransitionSystem, TransitionError> {
    if s >= t1.n_states {
        return Err(TransitionError::StateNotFound(s));
    }
    if s2 >= t2.n_states {
        return Err(TransitionError::StateNotFound(s2));
    }
    let mut a = Assembly::default();
    let o1 = a.add_system(t1)?;
    let o2 = a.add_system(t2)?;
    a.add_label(&label)?;
    a.transitions.insert((s + o1, label.name, s2 + o2));
    let fin = if t1.final_state == Some(s) && s2 == t2.initial { t2.final_state.map(|q| q + o2) } else { None };
    Ok(a.finish(t1.initial + o1, fin, &[]).0)
}

/// Label carried by the bridge of edge `e`.
pub fn edge_label_name(e: EdgeId) -> String {
    format!("edge:{e}")
}

/// Parses a bridge label back to its edge id.
pub fn edge_of_label(name: &str) -> Option<EdgeId> {
    name.strip_prefix("edge:")?.parse().ok()
}

/// A system assembled from a graph, with the vertex whose part each state
/// came from.
#[derive(Debug, Clone, PartialEq)]
pub struct Architecture {
    pub system: TransitionSystem,
    pub state_vertex: Vec<VertexId>,
    /// The vertex whose part contributed each non-bridge transition. Glued
    /// states belong to several parts, so this is not read off the states.
    pub transition_vertex: BTreeMap<(StateId, usize, StateId), VertexId>,
}

/// Who produced a transition of an architecture.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Owner {
    Vertex(VertexId),
    Edge(EdgeId),
}

impl Architecture {
    fn single(v: VertexId, t: &TransitionSystem) -> Self {
        let transition_vertex = t.transitions.iter().map(|&tr| (tr, v)).collect();
        Architecture { system: t.clone(), state_vertex: vec![v; t.n_states], transition_vertex }
    }

    /// Owned transitions as `(src, label name, dst, vertex)`.
    fn owned(&self) -> impl Iterator<Item = (StateId, &str, StateId, VertexId)> {
        self.transition_vertex.iter().map(|(&(s, l, d), &v)| (s, self.system.labels[l].name.as_str(), d, v))
    }

    pub fn owner(&self, tr: (StateId, usize, StateId)) -> Owner {
        match edge_of_label(&self.system.labels[tr.1].name) {
            Some(e) => Owner::Edge(e),
            None => Owner::Vertex(self.transition_vertex.get(&tr).copied().unwrap_or(self.state_vertex[tr.0])),
        }
    }
}

fn part(parts: &BTreeMap<VertexId, TransitionSystem>, v: VertexId) -> Result<&TransitionSystem, TransitionError> {
    parts.get(&v).ok_or(TransitionError::MissingPart(v))
}

/// Grafts annotated parts along an acyclic graph: states are the parts in
/// `order`, bridges `(q_{s(e)}, e, ι_{t(e)})` for every edge.
fn graft_acyclic_annotated(
    g: &DiGraph,
    order: &[VertexId],
    parts: &BTreeMap<VertexId, Architecture>,
    delays: &BTreeMap<EdgeId, u32>,
) -> Result<Architecture, TransitionError> {
    check_order(g, order)?;
    let mut a = Assembly::default();
    let mut off = BTreeMap::new();
    let mut state_vertex = Vec::new();
    for &v in order {
        let p = parts.get(&v).ok_or(TransitionError::MissingPart(v))?;
        if p.system.final_state.is_none() {
            return Err(TransitionError::NoFinalState(v));
        }
        off.insert(v, a.add_system(&p.system)?);
        state_vertex.extend_from_slice(&p.state_vertex);
    }
    for e in g.edges() {
        let (ps, pt) = (&parts[&e.src].system, &parts[&e.tgt].system);
        let name = edge_label_name(e.id);
        a.add_label(&Label::delayed(name.clone(), delays.get(&e.id).copied().unwrap_or(0)))?;
        a.transitions.insert((
            ps.final_state.expect("checked") + off[&e.src],
            name,
            pt.initial + off[&e.tgt],
        ));
    }
    let (first, last) = match (order.first(), order.last()) {
        (Some(f), Some(l)) => (*f, *l),
        _ => return Err(TransitionError::InvalidStructure("empty graph".into())),
    };
    let init = parts[&first].system.initial + off[&first];
    let fin = parts[&last].system.final_state.map(|q| q + off[&last]);
    let (system, map) = a.finish(init, fin, &[]);
    debug_assert!(map.iter().enumerate().all(|(i, &m)| i == m));
    let mut transition_vertex = BTreeMap::new();
    for &v in order {
        for (s, name, d, owner) in parts[&v].owned() {
            let l = system.label_index(name).expect("label carried over");
            transition_vertex.insert((s + off[&v], l, d + off[&v]), owner);
        }
    }
    Ok(Architecture { system, state_vertex, transition_vertex })
}

fn check_order(g: &DiGraph, order: &[VertexId]) -> Result<(), TransitionError> {
    let mut sorted = order.to_vec();
    sorted.sort_unstable();
    if sorted != g.vertices() {
        return Err(TransitionError::InvalidOrder);
    }
    let pos: BTreeMap<VertexId, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    if g.edges().iter().any(|e| e.src == e.tgt) {
        return Err(GraphError::CycleDetected.into());
    }
    if g.edges().iter().any(|e| pos[&e.src] > pos[&e.tgt]) {
        kahn_order(g)?;
        return Err(TransitionError::InvalidOrder);
    }
    Ok(())
}

/// Grafting along an acyclic graph in the given topological order. Every
/// part needs a final state; the result starts at the first vertex's initial
/// state and ends at the last vertex's final state.
pub fn graft_acyclic(
    g: &DiGraph,
    order: &[VertexId],
    parts: &BTreeMap<VertexId, TransitionSystem>,
) -> Result<Architecture, TransitionError> {
    let annotated = g
        .vertices()
        .iter()
        .map(|&v| Ok((v, Architecture::single(v, part(parts, v)?))))
        .collect::<Result<BTreeMap<_, _>, TransitionError>>()?;
    graft_acyclic_annotated(g, order, &annotated, &BTreeMap::new())
}

pub const DEFAULT_STRONG_BUDGET: usize = 64;

fn graft_strong_with(
    g: &DiGraph,
    parts: &BTreeMap<VertexId, TransitionSystem>,
    delays: &BTreeMap<EdgeId, u32>,
    budget: usize,
) -> Result<Architecture, TransitionError> {
    let vs = g.vertices();
    let summands = vs.len() * vs.len();
    if summands > budget {
        return Err(TransitionError::BudgetExceeded(summands, budget));
    }
    if crate::graph::tarjan_scc(g).len() != 1 {
        return Err(TransitionError::NotStronglyConnected);
    }
    for &v in vs {
        if part(parts, v)?.final_state.is_none() {
            return Err(TransitionError::NoFinalState(v));
        }
    }
    // One system per (v_in, v_out): all parts, all bridges.
    let mut base = Assembly::default();
    let mut off = BTreeMap::new();
    let mut state_vertex = Vec::new();
    let mut owned = Vec::new();
    for &v in vs {
        let p = &parts[&v];
        let o = base.add_system(p)?;
        off.insert(v, o);
        state_vertex.extend(std::iter::repeat_n(v, p.n_states));
        owned.extend(p.named_transitions().into_iter().map(|(s, l, d)| (s + o, l.to_string(), d + o, v)));
    }
    for e in g.edges() {
        let name = edge_label_name(e.id);
        base.add_label(&Label::delayed(name.clone(), delays.get(&e.id).copied().unwrap_or(0)))?;
        base.transitions.insert((
            parts[&e.src].final_state.expect("checked") + off[&e.src],
            name,
            parts[&e.tgt].initial + off[&e.tgt],
        ));
    }
    let mut summand_systems = Vec::with_capacity(summands);
    for &vin in vs {
        for &vout in vs {
            let a = Assembly { n_states: base.n_states, labels: base.labels.clone(), transitions: base.transitions.clone() };
            let init = parts[&vin].initial + off[&vin];
            let fin = parts[&vout].final_state.expect("checked") + off[&vout];
            summand_systems.push(a.finish(init, Some(fin), &[]).0);
        }
    }
    let (system, embeds) = coproduct_final(&summand_systems)?;
    let mut sv = vec![0; system.n_states];
    for emb in &embeds {
        for (i, &s) in emb.iter().enumerate() {
            sv[s] = state_vertex[i];
        }
    }
    // glued initial/final states take the vertex of the first summand
    for (i, &s) in embeds[0].iter().enumerate() {
        sv[s] = state_vertex[i];
    }
    let mut transition_vertex = BTreeMap::new();
    for emb in &embeds {
        for (s, name, d, v) in &owned {
            let l = system.label_index(name).expect("label carried over");
            transition_vertex.entry((emb[*s], l, emb[*d])).or_insert(*v);
        }
    }
    Ok(Architecture { system, state_vertex: sv, transition_vertex })
}

/// Grafting over a strongly connected graph: the coproduct, over all pairs
/// `(v_in, v_out)`, of the system made of all parts and all edge bridges
/// with initial state `ι_{v_in}` and final state `q_{v_out}`. Summands are
/// disjoint copies glued at their initial states and at their final states.
pub fn graft_strong(
    g: &DiGraph,
    parts: &BTreeMap<VertexId, TransitionSystem>,
    budget: usize,
) -> Result<Architecture, TransitionError> {
    graft_strong_with(g, parts, &BTreeMap::new(), budget)
}

/// Quotient of `g` by a vertex partition that keeps every edge between
/// distinct blocks with its original id.
fn quotient_multigraph(g: &DiGraph, block_of: &BTreeMap<VertexId, u32>, blocks: u32) -> DiGraph {
    let edges: Vec<Edge> = g
        .edges()
        .iter()
        .filter(|e| block_of[&e.src] != block_of[&e.tgt])
        .map(|e| Edge { id: e.id, src: block_of[&e.src], tgt: block_of[&e.tgt] })
        .collect();
    DiGraph::new(0..blocks, edges).expect("quotient is well formed")
}

fn assemble_over_blocks(
    g: &DiGraph,
    blocks: &[Vec<VertexId>],
    parts: &BTreeMap<VertexId, TransitionSystem>,
    delays: &BTreeMap<EdgeId, u32>,
    budget: usize,
) -> Result<Architecture, TransitionError> {
    let block_of: BTreeMap<VertexId, u32> = blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |&v| (v, i as u32)))
        .collect();
    let mut block_parts = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        let sub = g.induced(&b.iter().copied().collect());
        block_parts.insert(i as u32, graft_strong_with(&sub, parts, delays, budget)?);
    }
    let q = quotient_multigraph(g, &block_of, blocks.len() as u32);
    let order = kahn_order(&q)?;
    graft_acyclic_annotated(&q, &order, &block_parts, delays)
}

/// The architecture functor: grafting over each strongly connected
/// component, then grafting the results along the condensation in Kahn
/// order. Every edge between components contributes its own bridge.
pub fn xi(
    g: &DiGraph,
    parts: &BTreeMap<VertexId, TransitionSystem>,
    budget: usize,
) -> Result<Architecture, TransitionError> {
    let c = condensation(g);
    assemble_over_blocks(g, &c.components, parts, &BTreeMap::new(), budget)
}

/// One machine of a distributed structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Machine {
    pub vertices: Vec<VertexId>,
    #[serde(default)]
    pub sources: Vec<VertexId>,
    #[serde(default)]
    pub targets: Vec<VertexId>,
}

/// Machines partitioning the vertices, with their source and target sets
/// and the delays of the hub edges.
///
/// A machine with a nonempty target set gets a hub vertex with an edge to
/// each of its targets, and every source vertex of every machine gets an
/// edge into that hub. Original edges carry delay 0.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DistributedStructure {
    pub machines: Vec<Machine>,
    /// `(source vertex, hub machine, delay)` for edges into hubs.
    #[serde(default)]
    pub in_delays: Vec<(VertexId, usize, u32)>,
    /// `(hub machine, target vertex, delay)` for edges out of hubs.
    #[serde(default)]
    pub out_delays: Vec<(usize, VertexId, u32)>,
}

/// The enlarged graph of a distributed structure.
#[derive(Debug, Clone, PartialEq)]
pub struct HubGraph {
    pub graph: DiGraph,
    /// Hub vertex of each machine, if it has one.
    pub hubs: Vec<Option<VertexId>>,
    pub delays: BTreeMap<EdgeId, u32>,
    /// Vertex sets of the machines including their hubs.
    pub blocks: Vec<Vec<VertexId>>,
}

pub fn hub_graph(g: &DiGraph, ds: &DistributedStructure) -> Result<HubGraph, TransitionError> {
    let mut seen = BTreeSet::new();
    for (i, m) in ds.machines.iter().enumerate() {
        for &v in &m.vertices {
            if !g.has_vertex(v) || !seen.insert(v) {
                return Err(TransitionError::InvalidStructure(format!("vertex {v} in machine {i}")));
            }
        }
        for v in m.sources.iter().chain(&m.targets) {
            if !m.vertices.contains(v) {
                return Err(TransitionError::InvalidStructure(format!("vertex {v} not in machine {i}")));
            }
        }
    }
    if seen.len() != g.vertex_count() {
        return Err(TransitionError::InvalidStructure("machines do not cover the graph".into()));
    }
    let mut next_v = g.max_vertex_id().map_or(0, |v| v + 1);
    let mut next_e = g.max_edge_id().map_or(0, |e| e + 1);
    let mut vertices = g.vertices().to_vec();
    let mut edges = g.edges().to_vec();
    let mut hubs = Vec::new();
    let mut blocks: Vec<Vec<VertexId>> = ds.machines.iter().map(|m| m.vertices.clone()).collect();
    for (i, m) in ds.machines.iter().enumerate() {
        if m.targets.is_empty() {
            hubs.push(None);
        } else {
            hubs.push(Some(next_v));
            vertices.push(next_v);
            blocks[i].push(next_v);
            next_v += 1;
        }
    }
    let mut delays = BTreeMap::new();
    for (i, m) in ds.machines.iter().enumerate() {
        let Some(h) = hubs[i] else { continue };
        for &t in &m.targets {
            let d = ds.out_delays.iter().find(|x| x.0 == i && x.1 == t).map_or(0, |x| x.2);
            edges.push(Edge { id: next_e, src: h, tgt: t });
            delays.insert(next_e, d);
            next_e += 1;
        }
        for mj in &ds.machines {
            for &s in &mj.sources {
                let d = ds.in_delays.iter().find(|x| x.0 == s && x.1 == i).map_or(0, |x| x.2);
                edges.push(Edge { id: next_e, src: s, tgt: h });
                delays.insert(next_e, d);
                next_e += 1;
            }
        }
    }
    for d in ds.in_delays.iter().map(|x| x.1).chain(ds.out_delays.iter().map(|x| x.0)) {
        if hubs.get(d).copied().flatten().is_none() {
            return Err(TransitionError::InvalidStructure(format!("machine {d} has no hub")));
        }
    }
    Ok(HubGraph { graph: DiGraph::new(vertices, edges)?, hubs, delays, blocks })
}

/// A one-state system whose initial state is also final.
pub fn relay() -> TransitionSystem {
    TransitionSystem { n_states: 1, initial: 0, final_state: Some(0), labels: vec![], transitions: vec![] }
}

/// The time-delay architecture: like [`xi`] but over the hub graph, with
/// machines in place of strongly connected components and delays on the
/// bridge labels. Hubs carry [`relay`] systems.
pub fn xi_t(
    g: &DiGraph,
    ds: &DistributedStructure,
    parts: &BTreeMap<VertexId, TransitionSystem>,
    budget: usize,
) -> Result<Architecture, TransitionError> {
    let hg = hub_graph(g, ds)?;
    let mut all_parts = parts.clone();
    for h in hg.hubs.iter().flatten() {
        all_parts.entry(*h).or_insert_with(relay);
    }
    for (i, b) in hg.blocks.iter().enumerate() {
        let sub = hg.graph.induced(&b.iter().copied().collect());
        if crate::graph::tarjan_scc(&sub).len() != 1 {
            return Err(TransitionError::MachineNotStronglyConnected(i));
        }
    }
    let block_of: BTreeMap<VertexId, u32> = hg
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |&v| (v, i as u32)))
        .collect();
    let q = quotient_multigraph(&hg.graph, &block_of, hg.blocks.len() as u32);
    if kahn_order(&q).is_err() {
        return Err(TransitionError::CondensationNotAcyclic);
    }
    assemble_over_blocks(&hg.graph, &hg.blocks, &all_parts, &hg.delays, budget)
}

/// One step of a word: `label = None` is the idle transition at `src`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step {
    pub src: StateId,
    pub label: Option<usize>,
    pub dst: StateId,
}

impl Step {
    pub fn is_idle(&self) -> bool {
        self.label.is_none()
    }
}

pub type TsWord = Vec<Step>;

pub const DEFAULT_WORD_BUDGET: usize = 1 << 20;

/// All composable sequences of `n` transitions from the initial state, idle
/// steps included, in lexicographic order (idle first, then by label and
/// target).
pub fn language_words(t: &TransitionSystem, n: usize, budget: usize) -> Result<Vec<TsWord>, TransitionError> {
    let mut out_adj: Vec<Vec<Step>> = (0..t.n_states).map(|s| vec![Step { src: s, label: None, dst: s }]).collect();
    for &(s, l, d) in &t.transitions {
        out_adj[s].push(Step { src: s, label: Some(l), dst: d });
    }
    for v in &mut out_adj {
        v.sort_unstable();
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n);
    fn rec(
        adj: &[Vec<Step>],
        state: StateId,
        n: usize,
        cur: &mut TsWord,
        out: &mut Vec<TsWord>,
        budget: usize,
    ) -> Result<(), TransitionError> {
        if cur.len() == n {
            if out.len() >= budget {
                return Err(TransitionError::EnumerationBudgetExceeded(budget));
            }
            out.push(cur.clone());
            return Ok(());
        }
        for st in &adj[state] {
            cur.push(*st);
            rec(adj, st.dst, n, cur, out, budget)?;
            cur.pop();
        }
        Ok(())
    }
    rec(&out_adj, t.initial, n, &mut cur, &mut out, budget)?;
    Ok(out)
}

/// Words of every length `0..=n`.
pub fn language_words_upto(t: &TransitionSystem, n: usize, budget: usize) -> Result<Vec<TsWord>, TransitionError> {
    let mut all = Vec::new();
    for k in 0..=n {
        all.extend(language_words(t, k, budget.saturating_sub(all.len()))?);
    }
    Ok(all)
}

/// The binary code of length-`n` words: digit `i` is 0 exactly when step `i`
/// is idle. Duplicates collapse; the all-idle word gives the zero word.
pub fn extract_code(t: &TransitionSystem, n: usize) -> Result<Code, TransitionError> {
    let words: BTreeSet<Vec<u8>> = language_words(t, n, DEFAULT_WORD_BUDGET)?
        .iter()
        .map(|w| w.iter().map(|s| u8::from(!s.is_idle())).collect())
        .collect();
    Ok(Code::new(n, 2, words.into_iter().collect())?)
}

/// Labels of the non-idle steps whose delay block equals `t`.
pub fn time_block(sys: &TransitionSystem, word: &[Step], t: u32) -> Vec<String> {
    word.iter()
        .filter_map(|s| s.label)
        .filter(|&l| sys.labels[l].delay == t)
        .map(|l| sys.labels[l].name.clone())
        .collect()
}

/// Binary code over the given vertex list: digit `i` is 1 when some step of
/// the word is a transition of the part at `vertices[i]` (bridges excluded).
pub fn activity_code(arch: &Architecture, vertices: &[VertexId], n: usize) -> Result<Code, TransitionError> {
    let pos: BTreeMap<VertexId, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut words: BTreeSet<Vec<u8>> = BTreeSet::new();
    words.insert(vec![0; vertices.len()]);
    for w in language_words(&arch.system, n, DEFAULT_WORD_BUDGET)? {
        let mut c = vec![0u8; vertices.len()];
        for s in w.iter().filter(|s| !s.is_idle()) {
            if let Owner::Vertex(v) = arch.owner((s.src, s.label.expect("non-idle"), s.dst)) {
                if let Some(&i) = pos.get(&v) {
                    c[i] = 1;
                }
            }
        }
        words.insert(c);
    }
    Ok(Code::new(vertices.len(), 2, words.into_iter().collect())?)
}

/// Checks that `(σ, λ)` is a morphism `a → b`: `σ(ι) = ι'` and every
/// transition maps to a transition, or to an idle step when `λ` erases its
/// label and `σ` identifies its endpoints.
pub fn is_ts_morphism(
    a: &TransitionSystem,
    b: &TransitionSystem,
    sigma: &[StateId],
    lambda: &dyn Fn(&str) -> Option<String>,
) -> bool {
    if sigma.len() != a.n_states || sigma.iter().any(|&s| s >= b.n_states) || sigma[a.initial] != b.initial {
        return false;
    }
    let target: BTreeSet<(StateId, &str, StateId)> = b.named_transitions().into_iter().collect();
    a.named_transitions().into_iter().all(|(s, l, d)| match lambda(l) {
        Some(l2) => target.contains(&(sigma[s], l2.as_str(), sigma[d])),
        None => sigma[s] == sigma[d],
    })
}

/// A quantised integrate-and-fire neuron: membrane levels `0..=levels`, an
/// `in` transition up, a `leak` transition down, and `spike` from the top
/// level to a final fired state. Initial state is level 0.
pub fn integrate_and_fire(levels: usize) -> TransitionSystem {
    let fired = levels + 1;
    let mut tr: Vec<(StateId, &str, StateId)> = Vec::new();
    for k in 0..levels {
        tr.push((k, "in", k + 1));
        tr.push((k + 1, "leak", k));
    }
    tr.push((levels, "spike", fired));
    TransitionSystem::new(levels + 2, 0, Some(fired), vec![], &tr).expect("well formed")
}

/// `ι --label--> q` with two states.
pub fn single_transition(label: &str) -> TransitionSystem {
    TransitionSystem::new(2, 0, Some(1), vec![], &[(0, label, 1)]).expect("well formed")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(sys: &TransitionSystem, w: &TsWord) -> Vec<String> {
        w.iter().map(|s| s.label.map_or("*".into(), |l| sys.labels()[l].name.clone())).collect()
    }

    #[test]
    fn coproduct_with_zero_is_identity() {
        let a = integrate_and_fire(2);
        let c = coproduct(&a, &TransitionSystem::zero()).unwrap();
        assert_eq!(c.system.canonicalize(), a.canonicalize());
    }

    #[test]
    fn coproduct_of_single_transitions() {
        let c = coproduct(&single_transition("a"), &single_transition("b")).unwrap();
        assert_eq!(c.system.n_states(), 3);
        let words: BTreeSet<Vec<String>> =
            language_words(&c.system, 1, 100).unwrap().iter().map(|w| names(&c.system, w)).collect();
        let expect: BTreeSet<Vec<String>> = [["*"], ["a"], ["b"]].iter().map(|w| vec![w[0].to_string()]).collect();
        assert_eq!(words, expect);
    }

    #[test]
    fn language_of_one_transition() {
        let t = single_transition("a");
        let w = language_words(&t, 2, 100).unwrap();
        let n: Vec<Vec<String>> = w.iter().map(|x| names(&t, x)).collect();
        assert_eq!(n, vec![vec!["*", "*"], vec!["*", "a"], vec!["a", "*"]]);
        assert_eq!(w[2][1], Step { src: 1, label: None, dst: 1 });
        assert_eq!(language_words(&t, 0, 10).unwrap(), vec![Vec::<Step>::new()]);
        let code = extract_code(&t, 2).unwrap();
        assert_eq!(code, Code::from_strs(2, &["00", "01", "10"]).unwrap());
    }

    #[test]
    fn product_counts_and_sync() {
        let p = product(&single_transition("a"), &single_transition("b"), 100).unwrap();
        assert_eq!(p.system.n_states(), 4);
        let names: Vec<&str> = p.system.labels().iter().map(|l| l.name.as_str()).collect();
        assert_eq!(names, vec!["(*,b)", "(a,*)", "(a,b)"]);
        let big = integrate_and_fire(1);
        assert_eq!(product(&big, &single_transition("x"), 100).unwrap().system.n_states(), 6);
        assert!(matches!(product(&big, &big, 4), Err(TransitionError::ProductBudgetExceeded(9, 4))));
    }

    #[test]
    fn graft_then_word() {
        let t = graft(&single_transition("a"), 1, &single_transition("b"), 0, Label::new("e")).unwrap();
        assert_eq!(t.final_state(), Some(3));
        let words: Vec<Vec<String>> = language_words(&t, 3, 100).unwrap().iter().map(|w| names(&t, w)).collect();
        assert!(words.contains(&vec!["a".into(), "e".into(), "b".into()]));
        let z = graft(&single_transition("a"), 0, &TransitionSystem::zero(), 0, Label::new("e")).unwrap();
        assert_eq!((z.n_states(), z.transitions().len()), (3, 2));
        assert!(graft(&single_transition("a"), 5, &single_transition("b"), 0, Label::new("e")).is_err());
    }

    #[test]
    fn strong_graft_two_cycle() {
        let g = DiGraph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap();
        let parts: BTreeMap<_, _> = [(0, single_transition("a")), (1, single_transition("b"))].into();
        let arch = graft_strong(&g, &parts, 64).unwrap();
        // four summands of four states, glued at initial and final states
        assert_eq!(arch.system.n_states(), 4 * 4 - 3 - 3);
        assert!(matches!(graft_strong(&g, &parts, 3), Err(TransitionError::BudgetExceeded(4, 3))));
    }

    #[test]
    fn morphism_validator() {
        let a = single_transition("a");
        assert!(is_ts_morphism(&a, &a, &[0, 1], &|l| Some(l.to_string())));
        assert!(is_ts_morphism(&a, &TransitionSystem::zero(), &[0, 0], &|_| None));
        assert!(!is_ts_morphism(&a, &a, &[1, 0], &|l| Some(l.to_string())));
    }

    #[test]
    fn json_round_trip() {
        let t = integrate_and_fire(1);
        let s = t.to_json();
        let back: TransitionSystem = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        assert!(s.starts_with(r#"{"final":2,"initial":0,"labels":"#));
    }
}
