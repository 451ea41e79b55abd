//! Finite probability: joint distributions over product outcome spaces,
//! variables as partitions of the outcome space, Tsallis entropy and
//! divergences, the semigroup action `σ_α`, and low-degree coboundaries.
//!
//! Conventions: `0·log 0 = 0` and `0^α = 0`.

use rand::Rng as _;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::{weight_b, Code};
use crate::graph::DiGraph;
use crate::simplicial::{code_nerve, directed_flag_complex, FlagVariant, SimplicialComplex, SimplicialError};

/// Normalisation tolerance for distributions.
pub const NORM_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InfoError {
    #[error("alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("p has mass where q has none, at outcome {0}")]
    SupportViolation(usize),
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("the two constructions of the complex differ")]
    ConstructionMismatch,
    #[error(transparent)]
    Simplicial(#[from] SimplicialError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Axis {
    pub name: String,
    pub size: usize,
}

/// Probabilities over the product of the axes, row-major with the last axis
/// varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDist")]
pub struct JointDistribution {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawDist {
    axes: Vec<Axis>,
    probs: Vec<f64>,
}

impl TryFrom<RawDist> for JointDistribution {
    type Error = InfoError;
    fn try_from(r: RawDist) -> Result<Self, InfoError> {
        JointDistribution::new(r.axes, r.probs)
    }
}

impl JointDistribution {
    pub fn new(axes: Vec<Axis>, probs: Vec<f64>) -> Result<Self, InfoError> {
        let len: usize = axes.iter().map(|a| a.size).product();
        if axes.iter().any(|a| a.size == 0) {
            return Err(InfoError::InvalidDistribution("empty axis".into()));
        }
        if probs.len() != len {
            return Err(InfoError::LengthMismatch(probs.len(), len));
        }
        check_distribution(&probs)?;
        Ok(JointDistribution { axes, probs })
    }

    /// Axes named `X0, X1, …`.
    pub fn from_sizes(sizes: &[usize], probs: Vec<f64>) -> Result<Self, InfoError> {
        let axes = sizes.iter().enumerate().map(|(i, &size)| Axis { name: format!("X{i}"), size }).collect();
        JointDistribution::new(axes, probs)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.size).collect()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The variable reading the given axes.
    pub fn axis_variable(&self, axes: &[usize]) -> Variable {
        Variable::from_axes(&self.sizes(), axes)
    }
}

fn check_distribution(p: &[f64]) -> Result<(), InfoError> {
    if let Some(i) = p.iter().position(|&x| !(x >= 0.0) || !x.is_finite()) {
        return Err(InfoError::InvalidDistribution(format!("entry {i} is {}", p[i])));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > NORM_TOL {
        return Err(InfoError::InvalidDistribution(format!("sum is {s}")));
    }
    Ok(())
}

/// Multi-index of a flat outcome.
pub fn unravel(mut idx: usize, sizes: &[usize]) -> Vec<usize> {
    let mut out = vec![0; sizes.len()];
    for k in (0..sizes.len()).rev() {
        out[k] = idx % sizes[k];
        idx /= sizes[k];
    }
    out
}

pub fn ravel(multi: &[usize], sizes: &[usize]) -> usize {
    multi.iter().zip(sizes).fold(0, |acc, (&i, &s)| acc * s + i)
}

/// A finite random variable on an outcome space, stored as the block label
/// of each outcome. Labels are numbered by first appearance.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Variable {
    labels: Vec<usize>,
    blocks: usize,
}

impl Variable {
    pub fn from_labels<T: Ord + Clone>(raw: &[T]) -> Self {
        let mut seen: std::collections::BTreeMap<T, usize> = std::collections::BTreeMap::new();
        let mut labels = Vec::with_capacity(raw.len());
        for x in raw {
            let next = seen.len();
            labels.push(*seen.entry(x.clone()).or_insert(next));
        }
        Variable { blocks: seen.len(), labels }
    }

    /// The constant variable, written `1`.
    pub fn trivial(outcomes: usize) -> Self {
        Variable { labels: vec![0; outcomes], blocks: 1.min(outcomes) }
    }

    /// The identity variable (finest partition).
    pub fn identity(outcomes: usize) -> Self {
        Variable { labels: (0..outcomes).collect(), blocks: outcomes }
    }

    pub fn from_axes(sizes: &[usize], axes: &[usize]) -> Self {
        let total: usize = sizes.iter().product();
        let raw: Vec<Vec<usize>> = (0..total)
            .map(|i| {
                let m = unravel(i, sizes);
                axes.iter().map(|&a| m[a]).collect()
            })
            .collect();
        Variable::from_labels(&raw)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn outcomes(&self) -> usize {
        self.labels.len()
    }

    /// The common refinement `XY`.
    pub fn join(&self, other: &Variable) -> Variable {
        let raw: Vec<(usize, usize)> = self.labels.iter().copied().zip(other.labels.iter().copied()).collect();
        Variable::from_labels(&raw)
    }

    /// Whether every block of `other` lies inside a block of `self`.
    pub fn is_coarser_than(&self, other: &Variable) -> bool {
        let mut map = vec![usize::MAX; other.blocks];
        self.labels.iter().zip(&other.labels).all(|(&a, &b)| {
            if map[b] == usize::MAX {
                map[b] = a;
            }
            map[b] == a
        })
    }

    /// The law `X_*P`.
    pub fn pushforward(&self, p: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.blocks];
        for (&l, &x) in self.labels.iter().zip(p) {
            out[l] += x;
        }
        out
    }

    /// `P|_{X=x}` on the full outcome space, or `None` if `X_*P(x) = 0`.
    pub fn condition(&self, p: &[f64], block: usize) -> Option<Vec<f64>> {
        let mass: f64 = self.labels.iter().zip(p).filter(|(&l, _)| l == block).map(|(_, &x)| x).sum();
        (mass > 0.0).then(|| self.labels.iter().zip(p).map(|(&l, &x)| if l == block { x / mass } else { 0.0 }).collect())
    }
}

fn check_alpha(alpha: f64) -> Result<(), InfoError> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(InfoError::InvalidAlpha(alpha))
    }
}

/// Tsallis entropy `(1 − Σ p^α)/(α − 1)`, Shannon entropy at `α = 1`.
pub fn entropy(p: &[f64], alpha: f64) -> Result<f64, InfoError> {
    check_alpha(alpha)?;
    Ok(entropy_unchecked(p, alpha))
}

fn entropy_unchecked(p: &[f64], alpha: f64) -> f64 {
    if alpha == 1.0 {
        -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.ln()).sum::<f64>()
    } else {
        (1.0 - p.iter().filter(|&&x| x > 0.0).map(|&x| x.powf(alpha)).sum::<f64>()) / (alpha - 1.0)
    }
}

/// `KL_α(p‖q)`: `Σ p log(p/q)` at `α = 1`, otherwise
/// `(1/(1−α)) Σ p((p/q)^{1−α} − 1)`.
pub fn kl(p: &[f64], q: &[f64], alpha: f64) -> Result<f64, InfoError> {
    check_alpha(alpha)?;
    if p.len() != q.len() {
        return Err(InfoError::LengthMismatch(p.len(), q.len()));
    }
    let mut s = 0.0;
    for (i, (&a, &b)) in p.iter().zip(q).enumerate() {
        if a == 0.0 {
            continue;
        }
        if b <= 0.0 {
            return Err(InfoError::SupportViolation(i));
        }
        s += if alpha == 1.0 { a * (a / b).ln() } else { a * ((a / b).powf(1.0 - alpha) - 1.0) };
    }
    Ok(if alpha == 1.0 { s } else { s / (1.0 - alpha) })
}

/// A function of a distribution on the outcome space.
pub type Cochain0<'a> = dyn Fn(&[f64]) -> f64 + 'a;

/// A function of one variable and a distribution.
pub type Cochain1<'a> = dyn Fn(&Variable, &[f64]) -> f64 + 'a;

/// `Y.f(P) = Σ_{y: Y_*P(y) > 0} (Y_*P(y))^α f(P|_{Y=y})`.
pub fn sigma_action(y: &Variable, f: &Cochain0, p: &[f64], alpha: f64) -> f64 {
    let law = y.pushforward(p);
    law.iter()
        .enumerate()
        .filter(|(_, &m)| m > 0.0)
        .map(|(b, &m)| m.powf(alpha) * f(&y.condition(p, b).expect("positive mass")))
        .sum()
}

/// `δf[X₁] = X₁.f − f`.
pub fn coboundary0(f: &Cochain0, x1: &Variable, p: &[f64], alpha: f64) -> f64 {
    sigma_action(x1, f, p, alpha) - f(p)
}

/// `δf[X₁|X₂] = X₁.f[X₂] − f[X₁X₂] + f[X₁]`.
pub fn coboundary1(f: &Cochain1, x1: &Variable, x2: &Variable, p: &[f64], alpha: f64) -> f64 {
    sigma_action(x1, &|q: &[f64]| f(x2, q), p, alpha) - f(&x1.join(x2), p) + f(x1, p)
}

/// `δ(δf)[X₁|X₂]` for a degree-0 cochain, through the two coboundaries.
pub fn coboundary_squared(f: &Cochain0, x1: &Variable, x2: &Variable, p: &[f64], alpha: f64) -> f64 {
    let df = |x: &Variable, q: &[f64]| coboundary0(f, x, q, alpha);
    coboundary1(&df, x1, x2, p, alpha)
}

/// The entropy cochain `X ↦ S_α(X_*P)`.
pub fn entropy_cochain(alpha: f64) -> impl Fn(&Variable, &[f64]) -> f64 {
    move |x: &Variable, p: &[f64]| entropy_unchecked(&x.pushforward(p), alpha)
}

/// `Σ aᵢ Pᵢ + Σ bᵢ Pᵢ² + c·S(P)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCochain {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: f64,
}

impl PolyCochain {
    pub fn random(outcomes: usize, rng: &mut crate::rng::Rng) -> Self {
        PolyCochain {
            a: (0..outcomes).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            b: (0..outcomes).map(|_| rng.gen_range(-1.0..1.0)).collect(),
            c: rng.gen_range(-1.0..1.0),
        }
    }

    pub fn eval(&self, p: &[f64]) -> f64 {
        let lin: f64 = self.a.iter().zip(p).map(|(a, x)| a * x).sum();
        let quad: f64 = self.b.iter().zip(p).map(|(b, x)| b * x * x).sum();
        lin + quad + self.c * entropy_unchecked(p, 1.0)
    }
}

/// A random distribution with the given axis sizes, drawn from the flat
/// Dirichlet law.
pub fn random_distribution(sizes: &[usize], rng: &mut crate::rng::Rng) -> JointDistribution {
    let len: usize = sizes.iter().product();
    let raw: Vec<f64> = (0..len).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
    let s: f64 = raw.iter().sum();
    JointDistribution::from_sizes(sizes, raw.iter().map(|x| x / s).collect()).expect("normalised")
}

/// Outcomes of a code: one per word instance, with the digit variables and
/// the level sets of the weight `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeOutcomes {
    pub outcomes: usize,
    pub digits: Vec<Variable>,
    pub weight: Variable,
}

pub fn code_to_outcomes(c: &Code) -> CodeOutcomes {
    let digits = (0..c.n())
        .map(|i| Variable::from_labels(&c.words().iter().map(|w| w[i]).collect::<Vec<_>>()))
        .collect();
    let weight = Variable::from_labels(&c.words().iter().map(|w| weight_b(w)).collect::<Vec<_>>());
    CodeOutcomes { outcomes: c.len(), digits, weight }
}

/// Where a complex of probability simplices comes from.
pub enum QxSource<'a> {
    Code(&'a Code),
    /// A simple digraph, up to the given dimension.
    Graph(&'a DiGraph, usize),
}

/// The combinatorial shadow of the probability simplicial set. For a graph
/// the directed clique complex is built, re-encoded as the binary code of
/// its simplex indicators, and checked against the nerve of that code.
pub fn qx_complex(source: QxSource) -> Result<SimplicialComplex, InfoError> {
    match source {
        QxSource::Code(c) => Ok(code_nerve(c)?),
        QxSource::Graph(g, max_dim) => {
            let k = directed_flag_complex(g, max_dim, FlagVariant::EdgePair)?;
            let verts = g.vertices();
            let n = verts.len().max(1);
            let mut words = vec![vec![0u8; n]];
            for s in k.iter() {
                let mut w = vec![0u8; n];
                for v in s {
                    w[g.index_of(*v).expect("vertex of g")] = 1;
                }
                words.push(w);
            }
            let code = Code::new(n, 2, words).map_err(|e| InfoError::InvalidDistribution(e.to_string()))?;
            let nerve = code_nerve(&code)?;
            let relabelled = SimplicialComplex::closure(
                nerve.iter().map(|s| s.iter().map(|&i| verts[i as usize]).collect::<Vec<_>>()),
            );
            if relabelled != k {
                return Err(InfoError::ConstructionMismatch);
            }
            Ok(k)
        }
    }
}
