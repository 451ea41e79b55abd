//! Summing functors on the pointed edge set of a network, their source and
//! target pushforwards to vertices, and the conservation law at vertices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Debug;

use thiserror::Error;

use crate::codes::{wedge_sum_weighted, CodeError, WeightedCode};
use crate::graph::{EdgeId, PointedDiGraph, VertexId};
use crate::transitions::{coproduct, TransitionError, TransitionSystem};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctorError {
    #[error("edge {0} is not in the network")]
    UnknownEdge(EdgeId),
    #[error("vertex {0} is not in the network")]
    UnknownVertex(VertexId),
    #[error("no value assigned to a required subgraph")]
    UndefinedSubgraph,
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// A target category with a zero object and a chosen sum.
pub trait Carrier {
    type Obj: Clone + Debug;
    fn zero(&self) -> Self::Obj;
    fn sum(&self, a: &Self::Obj, b: &Self::Obj) -> Result<Self::Obj, FunctorError>;
    /// Equality of canonical forms; numeric parts within `tol`.
    fn equivalent(&self, a: &Self::Obj, b: &Self::Obj, tol: f64) -> bool;
}

/// Weighted codes of fixed length and alphabet under wedge sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeCarrier {
    pub n: usize,
    pub q: u8,
}

impl Carrier for CodeCarrier {
    type Obj = WeightedCode;
    fn zero(&self) -> WeightedCode {
        WeightedCode::zero(self.n, self.q)
    }
    fn sum(&self, a: &WeightedCode, b: &WeightedCode) -> Result<WeightedCode, FunctorError> {
        Ok(wedge_sum_weighted(a, b)?)
    }
    fn equivalent(&self, a: &WeightedCode, b: &WeightedCode, tol: f64) -> bool {
        a.equivalent(b, tol)
    }
}

/// Transition systems under coproduct, compared after breadth-first
/// renumbering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SystemCarrier;

impl Carrier for SystemCarrier {
    type Obj = TransitionSystem;
    fn zero(&self) -> TransitionSystem {
        TransitionSystem::zero()
    }
    fn sum(&self, a: &TransitionSystem, b: &TransitionSystem) -> Result<TransitionSystem, FunctorError> {
        Ok(coproduct(a, b)?.system)
    }
    fn equivalent(&self, a: &TransitionSystem, b: &TransitionSystem, _tol: f64) -> bool {
        a.canonicalize() == b.canonicalize()
    }
}

/// Dimensions of vector spaces under direct sum.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DimCarrier;

impl Carrier for DimCarrier {
    type Obj = u64;
    fn zero(&self) -> u64 {
        0
    }
    fn sum(&self, a: &u64, b: &u64) -> Result<u64, FunctorError> {
        Ok(a + b)
    }
    fn equivalent(&self, a: &u64, b: &u64, _tol: f64) -> bool {
        a == b
    }
}

/// A summing functor on the pointed edge set, stored by its values on single
/// edges. Edges without a value map to the zero object.
#[derive(Debug, Clone)]
pub struct SummingFunctor<C: Carrier> {
    network: PointedDiGraph,
    carrier: C,
    generators: BTreeMap<EdgeId, C::Obj>,
}

/// Which endpoint map to push forward along.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Endpoint {
    Source,
    Target,
}

impl<C: Carrier> SummingFunctor<C> {
    pub fn new(network: PointedDiGraph, carrier: C, generators: BTreeMap<EdgeId, C::Obj>) -> Result<Self, FunctorError> {
        for &e in generators.keys() {
            if e == network.star_edge || network.base.edge(e).is_none() {
                return Err(FunctorError::UnknownEdge(e));
            }
        }
        Ok(SummingFunctor { network, carrier, generators })
    }

    pub fn network(&self) -> &PointedDiGraph {
        &self.network
    }

    pub fn carrier(&self) -> &C {
        &self.carrier
    }

    pub fn generator(&self, e: EdgeId) -> C::Obj {
        self.generators.get(&e).cloned().unwrap_or_else(|| self.carrier.zero())
    }

    /// The sum of generator values over `subset`, in increasing edge order.
    /// The base edge contributes nothing.
    pub fn eval(&self, subset: &BTreeSet<EdgeId>) -> Result<C::Obj, FunctorError> {
        let mut acc = self.carrier.zero();
        for &e in subset {
            if self.network.base.edge(e).is_none() {
                return Err(FunctorError::UnknownEdge(e));
            }
            if e == self.network.star_edge {
                continue;
            }
            if let Some(x) = self.generators.get(&e) {
                acc = self.carrier.sum(&acc, x)?;
            }
        }
        Ok(acc)
    }

    /// Edges with the given endpoint at `v`.
    pub fn preimage(&self, which: Endpoint, v: VertexId) -> BTreeSet<EdgeId> {
        self.network
            .base
            .edges()
            .iter()
            .filter(|e| match which {
                Endpoint::Source => e.src == v,
                Endpoint::Target => e.tgt == v,
            })
            .map(|e| e.id)
            .collect()
    }

    /// `A ↦ Φ(s⁻¹(A))` or `A ↦ Φ(t⁻¹(A))` on pointed vertex sets.
    pub fn pushforward(&self, which: Endpoint) -> Result<VertexFunctor<C>, FunctorError>
    where
        C: Clone,
    {
        let mut generators = BTreeMap::new();
        for &v in self.network.base.vertices() {
            if v != self.network.star_vertex {
                generators.insert(v, self.eval(&self.preimage(which, v))?);
            }
        }
        Ok(VertexFunctor { network: self.network.clone(), carrier: self.carrier.clone(), generators })
    }

    /// Checks `Φ(s⁻¹(v)) ≅ Φ(t⁻¹(v))` at every network vertex; by the summing
    /// property this covers every vertex subset.
    pub fn is_in_equalizer(&self, tol: f64) -> Result<EqualizerReport, FunctorError> {
        let mut violations = Vec::new();
        for &v in self.network.base.vertices() {
            if v == self.network.star_vertex {
                continue;
            }
            let out = self.eval(&self.preimage(Endpoint::Source, v))?;
            let inc = self.eval(&self.preimage(Endpoint::Target, v))?;
            if !self.carrier.equivalent(&out, &inc, tol) {
                violations.push(v);
            }
        }
        Ok(EqualizerReport { holds: violations.is_empty(), violations })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EqualizerReport {
    pub holds: bool,
    /// Vertices where outgoing and incoming sums differ.
    pub violations: Vec<VertexId>,
}

/// A summing functor on the pointed vertex set.
#[derive(Debug, Clone)]
pub struct VertexFunctor<C: Carrier> {
    network: PointedDiGraph,
    carrier: C,
    generators: BTreeMap<VertexId, C::Obj>,
}

impl<C: Carrier> VertexFunctor<C> {
    pub fn generator(&self, v: VertexId) -> C::Obj {
        self.generators.get(&v).cloned().unwrap_or_else(|| self.carrier.zero())
    }

    pub fn eval(&self, subset: &BTreeSet<VertexId>) -> Result<C::Obj, FunctorError> {
        let mut acc = self.carrier.zero();
        for &v in subset {
            if !self.network.base.has_vertex(v) {
                return Err(FunctorError::UnknownVertex(v));
            }
            if let Some(x) = self.generators.get(&v) {
                acc = self.carrier.sum(&acc, x)?;
            }
        }
        Ok(acc)
    }
}

/// A subgraph given by vertex and edge sets.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Subgraph {
    pub vertices: BTreeSet<VertexId>,
    pub edges: BTreeSet<EdgeId>,
}

impl Subgraph {
    pub fn intersection(&self, o: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.intersection(&o.vertices).copied().collect(),
            edges: self.edges.intersection(&o.edges).copied().collect(),
        }
    }

    pub fn union(&self, o: &Subgraph) -> Subgraph {
        Subgraph {
            vertices: self.vertices.union(&o.vertices).copied().collect(),
            edges: self.edges.union(&o.edges).copied().collect(),
        }
    }
}

/// `dim(G₁∩G₂) + dim(G₁∪G₂) = dim(G₁) + dim(G₂)`.
pub fn inclusion_exclusion_check(
    assign: &dyn Fn(&Subgraph) -> Option<u64>,
    g1: &Subgraph,
    g2: &Subgraph,
) -> Result<bool, FunctorError> {
    let d = |g: &Subgraph| assign(g).ok_or(FunctorError::UndefinedSubgraph);
    Ok(d(&g1.intersection(g2))? + d(&g1.union(g2))? == d(g1)? + d(g2)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::Code;
    use crate::graph::{to_pointed, DiGraph};

    fn wc(words: &[&str], w: f64) -> WeightedCode {
        WeightedCode::uniform(Code::from_strs(2, words).unwrap(), w)
    }

    fn two_cycle(x: WeightedCode, y: WeightedCode) -> SummingFunctor<CodeCarrier> {
        let g = to_pointed(&DiGraph::from_pairs(2, &[(0, 1), (1, 0)]).unwrap());
        SummingFunctor::new(g, CodeCarrier { n: 2, q: 2 }, [(0, x), (1, y)].into()).unwrap()
    }

    #[test]
    fn star_and_singletons() {
        let phi = two_cycle(wc(&["00", "01"], 1.0), wc(&["00", "11"], 2.0));
        let star = phi.network().star_edge;
        assert!(phi.eval(&[star].into()).unwrap().equivalent(&WeightedCode::zero(2, 2), 0.0));
        assert!(phi.eval(&[1].into()).unwrap().equivalent(&phi.generator(1), 0.0));
        assert_eq!(phi.eval(&[9].into()).unwrap_err(), FunctorError::UnknownEdge(9));
    }

    #[test]
    fn pushforward_preimages() {
        let (x, y) = (wc(&["00", "01"], 1.0), wc(&["00", "11"], 2.0));
        let phi = two_cycle(x.clone(), y.clone());
        let s = phi.pushforward(Endpoint::Source).unwrap();
        let t = phi.pushforward(Endpoint::Target).unwrap();
        assert!(s.generator(1).equivalent(&y, 0.0));
        assert!(t.generator(1).equivalent(&x, 0.0));
        assert!(s.generator(phi.network().star_vertex).equivalent(&WeightedCode::zero(2, 2), 0.0));
    }

    #[test]
    fn equalizer_on_two_cycle() {
        let x = wc(&["00", "01"], 1.0);
        assert!(two_cycle(x.clone(), x.clone()).is_in_equalizer(0.0).unwrap().holds);
        let r = two_cycle(x, wc(&["00", "01"], 2.0)).is_in_equalizer(1e-12).unwrap();
        assert_eq!(r.violations, vec![0, 1]);
    }

    #[test]
    fn dimension_additivity() {
        let per_edge = |g: &Subgraph| Some(g.edges.iter().map(|&e| u64::from(e) + 1).sum());
        let a = Subgraph { vertices: [0, 1].into(), edges: [0, 1].into() };
        let b = Subgraph { vertices: [1, 2].into(), edges: [1, 2].into() };
        assert!(inclusion_exclusion_check(&per_edge, &a, &b).unwrap());
        assert!(inclusion_exclusion_check(&per_edge, &a, &a).unwrap());
        let squared = |g: &Subgraph| Some((g.edges.len() as u64).pow(2));
        assert!(!inclusion_exclusion_check(&squared, &a, &b).unwrap());
        let partial = |g: &Subgraph| (g.edges.len() < 3).then_some(1);
        assert_eq!(inclusion_exclusion_check(&partial, &a, &b), Err(FunctorError::UndefinedSubgraph));
    }
}
