//! Simplicial complexes built from graphs and codes, their homology over
//! GF(2) and the rationals, and persistence barcodes.
//!
//! Homology over a field stands in for homotopy throughout: a complex "passes
//! connectivity at level m" when β₀ = 1 and β₁ = … = β_m = 0.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::codes::Code;
use crate::graph::{DiGraph, GraphError, VertexId};

pub type Simplex = Vec<VertexId>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimplicialError {
    #[error(transparent)]
    NotSimple(#[from] GraphError),
    #[error("code alphabet has size {0}, expected 2")]
    NonBinary(u8),
    #[error("face {face:?} of {simplex:?} is missing")]
    NotFaceClosed { simplex: Simplex, face: Simplex },
    #[error("filtration value of {face:?} exceeds that of its coface {simplex:?}")]
    NonMonotone { simplex: Simplex, face: Simplex },
    #[error("filtration has {got} values in dimension {dim}, complex has {expected}")]
    ValueCountMismatch { dim: usize, expected: usize, got: usize },
}

/// Simplices stored per dimension as sorted vertex tuples, each list sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
}

impl Serialize for SimplicialComplex {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let m: BTreeMap<String, &Vec<Simplex>> =
            self.by_dim.iter().enumerate().map(|(k, v)| (format!("dim_{k}"), v)).collect();
        m.serialize(s)
    }
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        Self::default()
    }

    fn from_sets(sets: Vec<BTreeSet<Simplex>>) -> Self {
        let mut by_dim: Vec<Vec<Simplex>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        while by_dim.last().is_some_and(|v| v.is_empty()) {
            by_dim.pop();
        }
        SimplicialComplex { by_dim }
    }

    /// Downward closure of the given simplices (vertex order is irrelevant).
    pub fn closure<I, S>(generators: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[VertexId]>,
    {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for g in generators {
            let mut s: Simplex = g.as_ref().to_vec();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            add_with_faces(&mut sets, s);
        }
        Self::from_sets(sets)
    }

    /// Builds a complex from an explicit list, rejecting lists that are not
    /// closed under taking faces.
    pub fn from_simplices<I, S>(simplices: I) -> Result<Self, SimplicialError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[VertexId]>,
    {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for g in simplices {
            let mut s: Simplex = g.as_ref().to_vec();
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                continue;
            }
            let k = s.len() - 1;
            if sets.len() <= k {
                sets.resize_with(k + 1, BTreeSet::new);
            }
            sets[k].insert(s);
        }
        let c = Self::from_sets(sets);
        for k in 1..c.by_dim.len() {
            for s in &c.by_dim[k] {
                for f in facets(s) {
                    if c.by_dim[k - 1].binary_search(&f).is_err() {
                        return Err(SimplicialError::NotFaceClosed { simplex: s.clone(), face: f });
                    }
                }
            }
        }
        Ok(c)
    }

    /// Top dimension, or -1 for the empty complex.
    pub fn dim(&self) -> isize {
        self.by_dim.len() as isize - 1
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map_or(&[], |v| v.as_slice())
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.by_dim.iter().map(Vec::len).collect()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn contains(&self, s: &[VertexId]) -> bool {
        let mut s = s.to_vec();
        s.sort_unstable();
        !s.is_empty() && self.simplices(s.len() - 1).binary_search(&s).is_ok()
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        self.simplices(0).iter().map(|s| s[0]).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    /// Every simplex of `self` is a simplex of `other`.
    pub fn is_subcomplex_of(&self, other: &SimplicialComplex) -> bool {
        self.iter().all(|s| other.contains(s))
    }

    /// Keeps simplices of dimension at most `max_dim`.
    pub fn truncate(&self, max_dim: usize) -> Self {
        SimplicialComplex { by_dim: self.by_dim.iter().take(max_dim + 1).cloned().collect() }
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(k, v)| if k % 2 == 0 { v.len() as i64 } else { -(v.len() as i64) })
            .sum()
    }

    pub fn to_json(&self) -> String {
        crate::io::to_sorted_json(self)
    }
}

fn add_with_faces(sets: &mut Vec<BTreeSet<Simplex>>, s: Simplex) {
    let k = s.len() - 1;
    if sets.len() <= k {
        sets.resize_with(k + 1, BTreeSet::new);
    }
    if !sets[k].insert(s.clone()) || k == 0 {
        return;
    }
    for f in facets(&s) {
        add_with_faces(sets, f);
    }
}

/// Codimension-one faces, the i-th omitting vertex i.
pub fn facets(s: &[VertexId]) -> Vec<Simplex> {
    (0..s.len())
        .map(|i| s.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, &v)| v).collect())
        .collect()
}

/// Which ordered vertex tuples count as directed cliques.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FlagVariant {
    /// A direct edge `v_i -> v_j` for every `i < j`.
    #[default]
    EdgePair,
    /// All pairs adjacent, a unique source and sink in the induced subgraph,
    /// and an order in which each earlier vertex reaches each later one by a
    /// directed path inside the clique. The result is closed under faces.
    Path,
    /// Orientation ignored: the ordinary clique complex.
    Undirected,
}

/// The directed flag complex of a simple graph, truncated at `max_dim`.
pub fn directed_flag_complex(
    g: &DiGraph,
    max_dim: usize,
    variant: FlagVariant,
) -> Result<SimplicialComplex, SimplicialError> {
    g.check_simple()?;
    let n = g.vertex_count();
    let adj = g.adjacency_matrix();
    let ids = g.vertices();
    let mut sets: Vec<BTreeSet<Simplex>> = vec![BTreeSet::new(); max_dim + 1];
    match variant {
        FlagVariant::EdgePair => {
            let mut tuple = Vec::with_capacity(max_dim + 1);
            for v in 0..n {
                tuple.push(v);
                extend_ordered(&adj, &mut tuple, max_dim, ids, &mut sets);
                tuple.pop();
            }
        }
        FlagVariant::Undirected | FlagVariant::Path => {
            let und: Vec<Vec<bool>> =
                (0..n).map(|i| (0..n).map(|j| adj[i][j] || adj[j][i]).collect()).collect();
            let mut cliques: Vec<Vec<usize>> = Vec::new();
            let mut cur = Vec::with_capacity(max_dim + 1);
            for v in 0..n {
                cur.push(v);
                extend_cliques(&und, &mut cur, max_dim, &mut cliques);
                cur.pop();
            }
            for c in cliques {
                if variant == FlagVariant::Undirected || is_path_clique(&adj, &c) {
                    let s: Simplex = c.iter().map(|&i| ids[i]).collect();
                    add_with_faces(&mut sets, s);
                }
            }
        }
    }
    Ok(SimplicialComplex::from_sets(sets))
}

fn extend_ordered(
    adj: &[Vec<bool>],
    tuple: &mut Vec<usize>,
    max_dim: usize,
    ids: &[VertexId],
    sets: &mut [BTreeSet<Simplex>],
) {
    let mut s: Simplex = tuple.iter().map(|&i| ids[i]).collect();
    s.sort_unstable();
    // A vertex set may recur under another ordering; its extensions can
    // differ, so the search continues either way.
    sets[tuple.len() - 1].insert(s);
    if tuple.len() > max_dim {
        return;
    }
    for w in 0..adj.len() {
        if !tuple.contains(&w) && tuple.iter().all(|&u| adj[u][w]) {
            tuple.push(w);
            extend_ordered(adj, tuple, max_dim, ids, sets);
            tuple.pop();
        }
    }
}

fn extend_cliques(und: &[Vec<bool>], cur: &mut Vec<usize>, max_dim: usize, out: &mut Vec<Vec<usize>>) {
    out.push(cur.clone());
    if cur.len() > max_dim {
        return;
    }
    let last = *cur.last().expect("non-empty");
    for w in (last + 1)..und.len() {
        if cur.iter().all(|&u| und[u][w]) {
            cur.push(w);
            extend_cliques(und, cur, max_dim, out);
            cur.pop();
        }
    }
}

fn is_path_clique(adj: &[Vec<bool>], c: &[usize]) -> bool {
    let k = c.len();
    if k == 1 {
        return true;
    }
    let sources = c.iter().filter(|&&v| c.iter().all(|&u| !adj[u][v])).count();
    let sinks = c.iter().filter(|&&v| c.iter().all(|&u| !adj[v][u])).count();
    if sources != 1 || sinks != 1 {
        return false;
    }
    // reachability inside the induced subgraph
    let mut reach: Vec<Vec<bool>> =
        (0..k).map(|i| (0..k).map(|j| i == j || adj[c[i]][c[j]]).collect()).collect();
    for m in 0..k {
        for i in 0..k {
            if reach[i][m] {
                for j in 0..k {
                    if reach[m][j] {
                        reach[i][j] = true;
                    }
                }
            }
        }
    }
    // a compatible linear order exists iff every pair is comparable
    (0..k).all(|i| (0..k).all(|j| reach[i][j] || reach[j][i]))
}

/// Nerve of a binary code: the downward closure of the supports of its
/// nonzero words. Positions are numbered from 0.
pub fn code_nerve(c: &Code) -> Result<SimplicialComplex, SimplicialError> {
    if c.q() != 2 {
        return Err(SimplicialError::NonBinary(c.q()));
    }
    Ok(SimplicialComplex::closure(c.words().iter().map(|w| support(w))))
}

fn support(w: &[u8]) -> Simplex {
    w.iter().enumerate().filter(|(_, &d)| d != 0).map(|(i, _)| i as VertexId).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Field {
    #[default]
    Gf2,
    Rationals,
}

/// Betti numbers β₀..β_dim.
pub fn betti(k: &SimplicialComplex, field: Field) -> Vec<usize> {
    let d = k.by_dim.len();
    // ranks[j] = rank of the boundary map from dimension j to j-1
    let mut ranks = vec![0usize; d + 1];
    for j in 1..d {
        ranks[j] = match field {
            Field::Gf2 => boundary_rank_gf2(k, j),
            Field::Rationals => boundary_rank_q(k, j),
        };
    }
    (0..d).map(|j| k.count(j) - ranks[j] - ranks[j + 1]).collect()
}

fn face_index(k: &SimplicialComplex, dim: usize) -> HashMap<&[VertexId], usize> {
    k.simplices(dim).iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect()
}

fn boundary_rank_gf2(k: &SimplicialComplex, dim: usize) -> usize {
    let index = face_index(k, dim - 1);
    let words = k.count(dim - 1).div_ceil(64);
    let mut pivots: HashMap<usize, Vec<u64>> = HashMap::new();
    let mut rank = 0;
    for s in k.simplices(dim) {
        let mut col = vec![0u64; words];
        for f in facets(s) {
            let i = index[f.as_slice()];
            col[i / 64] ^= 1 << (i % 64);
        }
        while let Some(low) = highest_bit(&col) {
            match pivots.get(&low) {
                Some(p) => col.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                None => {
                    pivots.insert(low, col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    rank
}

fn highest_bit(col: &[u64]) -> Option<usize> {
    col.iter().enumerate().rev().find(|(_, &w)| w != 0).map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

fn boundary_rank_q(k: &SimplicialComplex, dim: usize) -> usize {
    let index = face_index(k, dim - 1);
    let rows: Vec<Vec<BigInt>> = k
        .simplices(dim)
        .iter()
        .map(|s| {
            let mut row = vec![BigInt::zero(); k.count(dim - 1)];
            for (i, f) in facets(s).into_iter().enumerate() {
                row[index[f.as_slice()]] = if i % 2 == 0 { BigInt::from(1) } else { BigInt::from(-1) };
            }
            row
        })
        .collect();
    integer_rank(rows)
}

/// Rank over the rationals of an integer matrix by fraction-free elimination.
pub fn integer_rank(mut rows: Vec<Vec<BigInt>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        let a = pivot_row[c].clone();
        for r in (rank + 1)..rows.len() {
            if rows[r][c].is_zero() {
                continue;
            }
            let b = rows[r][c].clone();
            let mut g = BigInt::zero();
            for (x, y) in rows[r].iter_mut().zip(&pivot_row) {
                *x = &a * &*x - &b * y;
                g = num_integer_gcd(&g, x);
            }
            if !g.is_zero() && g != BigInt::from(1) {
                rows[r].iter_mut().for_each(|x| *x = &*x / &g);
            }
        }
        rank += 1;
    }
    rank
}

fn num_integer_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut a, mut b) = (a.abs(), b.abs());
    while !b.is_zero() {
        let r = &a % &b;
        a = b;
        b = r;
    }
    a
}

/// True iff β₀ = 1 and βᵢ = 0 for 1 ≤ i ≤ m over GF(2). This is a homology
/// proxy for m-connectedness; the complex must contain its (m+1)-simplices.
pub fn connectivity_proxy(k: &SimplicialComplex, m: usize) -> bool {
    let b = betti(k, Field::Gf2);
    b.first() == Some(&1) && (1..=m).all(|i| b.get(i).copied().unwrap_or(0) == 0)
}

/// A complex with a value on each simplex, monotone along faces.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    complex: SimplicialComplex,
    values: Vec<Vec<f64>>,
}

impl Filtration {
    /// `values[k][i]` belongs to `complex.simplices(k)[i]`.
    pub fn new(complex: SimplicialComplex, values: Vec<Vec<f64>>) -> Result<Self, SimplicialError> {
        for k in 0..complex.by_dim.len() {
            let got = values.get(k).map_or(0, Vec::len);
            if got != complex.count(k) {
                return Err(SimplicialError::ValueCountMismatch { dim: k, expected: complex.count(k), got });
            }
        }
        let f = Filtration { complex, values };
        for k in 1..f.complex.by_dim.len() {
            for (i, s) in f.complex.simplices(k).iter().enumerate() {
                for face in facets(s) {
                    if f.value(&face) > f.values[k][i] {
                        return Err(SimplicialError::NonMonotone { simplex: s.clone(), face });
                    }
                }
            }
        }
        Ok(f)
    }

    /// Assigns values through a function of the simplex.
    pub fn from_fn(
        complex: SimplicialComplex,
        f: impl Fn(&[VertexId]) -> f64,
    ) -> Result<Self, SimplicialError> {
        let values = complex.by_dim.iter().map(|v| v.iter().map(|s| f(s)).collect()).collect();
        Self::new(complex, values)
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn value(&self, s: &[VertexId]) -> f64 {
        let k = s.len() - 1;
        let i = self.complex.simplices(k).binary_search_by(|x| x.as_slice().cmp(s)).expect("simplex present");
        self.values[k][i]
    }

    /// The sublevel complex `{σ : value(σ) ≤ t}`.
    pub fn sublevel(&self, t: f64) -> SimplicialComplex {
        let sets = self
            .complex
            .by_dim
            .iter()
            .zip(&self.values)
            .map(|(ss, vs)| ss.iter().zip(vs).filter(|(_, &v)| v <= t).map(|(s, _)| s.clone()).collect())
            .collect();
        SimplicialComplex::from_sets(sets)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bar {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` for classes that never die.
    pub death: f64,
}

impl Bar {
    pub fn alive_at(&self, t: f64) -> bool {
        self.birth <= t && t < self.death
    }
}

/// Persistence barcode over GF(2) by column reduction. Bars of zero length
/// are dropped; output is sorted by `(dim, birth, death)`.
pub fn persistence(f: &Filtration) -> Vec<Bar> {
    let mut order: Vec<(f64, usize, usize)> = Vec::with_capacity(f.complex.len());
    for (k, vs) in f.values.iter().enumerate() {
        for (i, &v) in vs.iter().enumerate() {
            order.push((v, k, i));
        }
    }
    order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut pos: HashMap<(usize, usize), usize> = HashMap::with_capacity(order.len());
    for (p, &(_, k, i)) in order.iter().enumerate() {
        pos.insert((k, i), p);
    }
    let index: Vec<HashMap<&[VertexId], usize>> =
        (0..f.complex.by_dim.len()).map(|k| face_index(&f.complex, k)).collect();

    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut bars = Vec::new();
    for (j, &(vj, k, i)) in order.iter().enumerate() {
        let mut col: Vec<usize> = if k == 0 {
            Vec::new()
        } else {
            let s = &f.complex.simplices(k)[i];
            let mut c: Vec<usize> = facets(s).iter().map(|face| pos[&(k - 1, index[k - 1][face.as_slice()])]).collect();
            c.sort_unstable();
            c
        };
        while let Some(&low) = col.last() {
            match low_owner.get(&low) {
                Some(&other) => col = sym_diff(&col, &reduced[other]),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            low_owner.insert(low, j);
            let (vb, kb, _) = order[low];
            if vb < vj {
                bars.push(Bar { dim: kb, birth: vb, death: vj });
            }
        }
        reduced[j] = col;
    }
    for (j, &(v, k, _)) in order.iter().enumerate() {
        if reduced[j].is_empty() && !low_owner.contains_key(&j) {
            bars.push(Bar { dim: k, birth: v, death: f64::INFINITY });
        }
    }
    bars.sort_by(|a, b| {
        a.dim.cmp(&b.dim).then(a.birth.total_cmp(&b.birth)).then(a.death.total_cmp(&b.death))
    });
    bars
}

fn sym_diff(a: &[usize], b: &[usize]) -> Vec<usize> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Barcode as CSV `dim,birth,death` with `inf` for open bars.
pub fn barcode_csv(bars: &[Bar]) -> String {
    use crate::io::{csv, fmt_f64};
    csv(
        &["dim", "birth", "death"],
        bars.iter().map(|b| vec![b.dim.to_string(), fmt_f64(b.birth), fmt_f64(b.death)]),
    )
}
