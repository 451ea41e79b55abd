//! Geometric integrated information.
//!
//! A joint `P(X, Y)` lives on axes `X_1..X_N` followed by `Y_1..Y_N`. For a
//! partition `λ` of the units, the disconnected family is realised as
//! `Q(x, y) = P(x) Π_B q_B(y_B | x_B)`, which satisfies `Q(Y_B|X) =
//! Q(Y_B|X_B)` by construction. `II_λ` is the divergence from `P` to its
//! projection and `II` the minimum over partitions.
//!
//! A second kind of partition splits the state space rather than the units
//! (blocks of configurations); its projection is used for networks whose
//! input nodes keep their values.

use rand::Rng as _;
use thiserror::Error;

use crate::graph::{DiGraph, VertexId};
use crate::hopfield::{HopfieldSystem, Variant};
use crate::information::{kl, unravel, InfoError, JointDistribution};
use crate::numeric::pos;
use crate::rng::seeded;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IiError {
    #[error("axes do not split into inputs and outputs: {0}")]
    AxisMismatch(String),
    #[error("{0} units exceed the cap {1}")]
    TooManyUnits(usize, usize),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("no convergence after {0} iterations")]
    NoConvergence(usize),
    #[error("noise must lie in (0, 0.5], got {0}")]
    InvalidNoise(f64),
    #[error(transparent)]
    Info(#[from] InfoError),
}

/// A partition of the units `0..n`, applied jointly to inputs and outputs.
/// Blocks are sorted and ordered by their smallest unit.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SystemPartition {
    blocks: Vec<Vec<usize>>,
}

impl SystemPartition {
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self, IiError> {
        let mut seen = vec![false; n];
        for b in &blocks {
            if b.is_empty() {
                return Err(IiError::InvalidPartition("empty block".into()));
            }
            for &u in b {
                if u >= n || std::mem::replace(&mut seen[u], true) {
                    return Err(IiError::InvalidPartition(format!("unit {u}")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(IiError::InvalidPartition("blocks do not cover all units".into()));
        }
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        blocks.sort();
        Ok(SystemPartition { blocks })
    }

    /// From a restricted growth string: unit `i` goes to block `rgs[i]`.
    pub fn from_rgs(rgs: &[usize]) -> Self {
        let k = rgs.iter().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); k];
        for (u, &b) in rgs.iter().enumerate() {
            blocks[b].push(u);
        }
        SystemPartition { blocks }
    }

    pub fn single(n: usize) -> Self {
        SystemPartition { blocks: vec![(0..n).collect()] }
    }

    pub fn finest(n: usize) -> Self {
        SystemPartition { blocks: (0..n).map(|u| vec![u]).collect() }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn units(&self) -> usize {
        self.blocks.iter().map(Vec::len).sum()
    }

    /// Block index of every unit.
    pub fn rgs(&self) -> Vec<usize> {
        let mut out = vec![0; self.units()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &u in b {
                out[u] = i;
            }
        }
        out
    }

    /// `{0,2}|{1}` style encoding.
    pub fn encode(&self) -> String {
        self.blocks
            .iter()
            .map(|b| format!("{{{}}}", b.iter().map(|u| u.to_string()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join("|")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PartitionMode {
    /// Every partition for up to four units, bipartitions above.
    #[default]
    Auto,
    All,
    Bipartitions,
}

/// Cap on units for exhaustive partition enumeration.
pub const ALL_PARTITIONS_CAP: usize = 6;

/// Partitions with at least two blocks, in lexicographic order of their
/// restricted growth strings.
pub fn enumerate_partitions(n: usize, mode: PartitionMode) -> Result<Vec<SystemPartition>, IiError> {
    let all = match mode {
        PartitionMode::All => {
            if n > ALL_PARTITIONS_CAP {
                return Err(IiError::TooManyUnits(n, ALL_PARTITIONS_CAP));
            }
            true
        }
        PartitionMode::Auto => n <= 4,
        PartitionMode::Bipartitions => false,
    };
    let mut out = Vec::new();
    if n < 2 {
        return Ok(out);
    }
    let mut rgs = vec![0usize; n];
    fn rec(i: usize, max: usize, rgs: &mut Vec<usize>, all: bool, out: &mut Vec<SystemPartition>) {
        if i == rgs.len() {
            if max >= 1 {
                out.push(SystemPartition::from_rgs(rgs));
            }
            return;
        }
        let top = if all { max + 1 } else { 1.min(max + 1) };
        for b in 0..=top {
            rgs[i] = b;
            rec(i + 1, max.max(b), rgs, all, out);
        }
    }
    rec(1, 0, &mut rgs, all, &mut out);
    Ok(out)
}

/// Shape of a joint over `(X_1..X_N, Y_1..Y_N)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitShape {
    pub x_sizes: Vec<usize>,
    pub y_sizes: Vec<usize>,
}

impl UnitShape {
    pub fn of(p: &JointDistribution) -> Result<Self, IiError> {
        let s = p.sizes();
        if !s.len().is_multiple_of(2) || s.is_empty() {
            return Err(IiError::AxisMismatch(format!("{} axes", s.len())));
        }
        let n = s.len() / 2;
        Ok(UnitShape { x_sizes: s[..n].to_vec(), y_sizes: s[n..].to_vec() })
    }

    pub fn units(&self) -> usize {
        self.x_sizes.len()
    }

    pub fn nx(&self) -> usize {
        self.x_sizes.iter().product()
    }

    pub fn ny(&self) -> usize {
        self.y_sizes.iter().product()
    }

    /// Index of the sub-configuration on `block` for every full
    /// configuration, and the number of sub-configurations.
    fn sub_index(sizes: &[usize], block: &[usize]) -> (Vec<usize>, usize) {
        let total: usize = sizes.iter().product();
        let count: usize = block.iter().map(|&u| sizes[u]).product();
        let idx = (0..total)
            .map(|i| {
                let m = unravel(i, sizes);
                block.iter().fold(0, |acc, &u| acc * sizes[u] + m[u])
            })
            .collect();
        (idx, count)
    }
}

/// Block marginals `P(x_B, y_B)` and `P(x_B)` with the index maps used to
/// read them.
struct BlockTables {
    xi: Vec<usize>,
    yi: Vec<usize>,
    nxb: usize,
    nyb: usize,
    joint: Vec<f64>,
    marg: Vec<f64>,
}

fn block_tables(shape: &UnitShape, block: &[usize], p: &[f64]) -> BlockTables {
    let (xi, nxb) = UnitShape::sub_index(&shape.x_sizes, block);
    let (yi, nyb) = UnitShape::sub_index(&shape.y_sizes, block);
    let ny = shape.ny();
    let mut joint = vec![0.0; nxb * nyb];
    let mut marg = vec![0.0; nxb];
    for (c, &v) in p.iter().enumerate() {
        let (x, y) = (c / ny, c % ny);
        joint[xi[x] * nyb + yi[y]] += v;
        marg[xi[x]] += v;
    }
    BlockTables { xi, yi, nxb, nyb, joint, marg }
}

/// `max |Q(y_B | x) − Q(y_B | x_B)|` over blocks, and `x` with `Q(x) > 0`.
pub fn manifold_residual(q: &JointDistribution, lam: &SystemPartition) -> Result<f64, IiError> {
    let shape = UnitShape::of(q)?;
    check_units(&shape, lam)?;
    let (nx, ny) = (shape.nx(), shape.ny());
    let qp = q.probs();
    let qx: Vec<f64> = (0..nx).map(|x| qp[x * ny..(x + 1) * ny].iter().sum()).collect();
    let mut worst: f64 = 0.0;
    for b in lam.blocks() {
        let t = block_tables(&shape, b, qp);
        for x in 0..nx {
            if qx[x] <= 0.0 {
                continue;
            }
            let mut full = vec![0.0; t.nyb];
            for y in 0..ny {
                full[t.yi[y]] += qp[x * ny + y];
            }
            let xb = t.xi[x];
            for yb in 0..t.nyb {
                let local = t.joint[xb * t.nyb + yb] / t.marg[xb];
                worst = worst.max((full[yb] / qx[x] - local).abs());
            }
        }
    }
    Ok(worst)
}

fn check_units(shape: &UnitShape, lam: &SystemPartition) -> Result<(), IiError> {
    if lam.units() != shape.units() {
        return Err(IiError::AxisMismatch(format!("{} units, partition of {}", shape.units(), lam.units())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectOptions {
    pub tol: f64,
    pub max_iter: usize,
    /// Added to every cell before the factors are estimated.
    pub smoothing: f64,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        ProjectOptions { tol: 1e-8, max_iter: 1000, smoothing: 1e-12 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionResult {
    pub q_star: JointDistribution,
    pub kl_value: f64,
    pub constraint_residual: f64,
    /// Largest violation of the stationarity conditions on the factors.
    pub kkt_residual: f64,
    pub iterations: usize,
    pub smoothing: f64,
}

fn smoothed(p: &[f64], eps: f64) -> Vec<f64> {
    let z = 1.0 + eps * p.len() as f64;
    p.iter().map(|x| (x + eps) / z).collect()
}

fn compose(shape: &UnitShape, px: &[f64], tables: &[BlockTables], factors: &[Vec<f64>]) -> Vec<f64> {
    let (nx, ny) = (shape.nx(), shape.ny());
    let mut q = vec![0.0; nx * ny];
    for x in 0..nx {
        for y in 0..ny {
            let mut v = px[x];
            for (t, f) in tables.iter().zip(factors) {
                v *= f[t.xi[x] * t.nyb + t.yi[y]];
            }
            q[x * ny + y] = v;
        }
    }
    q
}

/// Minimises `KL(P‖Q)` over the disconnected family by block coordinate
/// descent on the factors `q_B(y_B | x_B)`. Each block update is the exact
/// minimiser given the others (the objective separates over blocks), so the
/// loop stops after a sweep that changes nothing beyond `tol`.
pub fn project(p: &JointDistribution, lam: &SystemPartition, opts: &ProjectOptions) -> Result<ProjectionResult, IiError> {
    let shape = UnitShape::of(p)?;
    check_units(&shape, lam)?;
    let (nx, ny) = (shape.nx(), shape.ny());
    let ps = smoothed(p.probs(), opts.smoothing);
    let px: Vec<f64> = (0..nx).map(|x| p.probs()[x * ny..(x + 1) * ny].iter().sum()).collect();
    let tables: Vec<BlockTables> = lam.blocks().iter().map(|b| block_tables(&shape, b, &ps)).collect();
    let mut factors: Vec<Vec<f64>> = tables.iter().map(|t| vec![1.0 / t.nyb as f64; t.nxb * t.nyb]).collect();
    let mut iterations = 0;
    loop {
        if iterations >= opts.max_iter {
            return Err(IiError::NoConvergence(iterations));
        }
        iterations += 1;
        let mut change: f64 = 0.0;
        for (t, f) in tables.iter().zip(factors.iter_mut()) {
            for xb in 0..t.nxb {
                for yb in 0..t.nyb {
                    let v = t.joint[xb * t.nyb + yb] / t.marg[xb];
                    change = change.max((v - f[xb * t.nyb + yb]).abs());
                    f[xb * t.nyb + yb] = v;
                }
            }
        }
        if change <= opts.tol {
            break;
        }
    }
    // stationarity: P(x_B, y_B) / q_B(y_B|x_B) is constant in y_B
    let raw: Vec<BlockTables> = lam.blocks().iter().map(|b| block_tables(&shape, b, p.probs())).collect();
    let mut kkt: f64 = 0.0;
    for (t, f) in raw.iter().zip(&factors) {
        for xb in 0..t.nxb {
            let g: Vec<f64> = (0..t.nyb).map(|yb| t.joint[xb * t.nyb + yb] / f[xb * t.nyb + yb]).collect();
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            kkt = kkt.max(g.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max));
        }
    }
    let q = compose(&shape, &px, &tables, &factors);
    let kl_value = kl(p.probs(), &q, 1.0)?;
    let q_star = JointDistribution::new(p.axes().to_vec(), renormalised(q))?;
    let constraint_residual = manifold_residual(&q_star, lam)?;
    Ok(ProjectionResult { q_star, kl_value, constraint_residual, kkt_residual: kkt, iterations, smoothing: opts.smoothing })
}

fn renormalised(q: Vec<f64>) -> Vec<f64> {
    let s: f64 = q.iter().sum();
    q.into_iter().map(|x| x / s).collect()
}

/// `II_λ(P) = KL(P ‖ Q*_λ)`.
pub fn ii_lambda(p: &JointDistribution, lam: &SystemPartition) -> Result<f64, IiError> {
    Ok(project(p, lam, &ProjectOptions::default())?.kl_value)
}

#[derive(Debug, Clone, PartialEq)]
pub struct IiResult {
    pub value: f64,
    /// The minimal information partition.
    pub partition: SystemPartition,
}

/// `II = min_λ II_λ` over the enumerated partitions; ties keep the first in
/// enumeration order. A single unit has only the one-block partition and
/// `II = 0`.
pub fn ii(p: &JointDistribution, mode: PartitionMode) -> Result<IiResult, IiError> {
    let n = UnitShape::of(p)?.units();
    let parts = enumerate_partitions(n, mode)?;
    if parts.is_empty() {
        return Ok(IiResult { value: 0.0, partition: SystemPartition::single(n) });
    }
    let mut best: Option<IiResult> = None;
    for lam in parts {
        let v = ii_lambda(p, &lam)?;
        if best.as_ref().is_none_or(|b| v < b.value) {
            best = Some(IiResult { value: v, partition: lam });
        }
    }
    Ok(best.expect("nonempty"))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PythagoreanReport {
    /// `KL(P‖R) − KL(P‖Q*) − KL(Q*‖R)` per sample.
    pub deviations: Vec<f64>,
    /// Smallest `KL(P‖R) − KL(P‖Q*)`.
    pub min_gap: f64,
}

impl PythagoreanReport {
    pub fn max_abs_deviation(&self) -> f64 {
        self.deviations.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// Compares the projection with random members `R` of the same family, with
/// factors drawn from flat Dirichlet laws.
pub fn pythagorean_check(
    p: &JointDistribution,
    lam: &SystemPartition,
    r_samples: usize,
    seed: u64,
) -> Result<PythagoreanReport, IiError> {
    let shape = UnitShape::of(p)?;
    let proj = project(p, lam, &ProjectOptions::default())?;
    let (nx, ny) = (shape.nx(), shape.ny());
    let px: Vec<f64> = (0..nx).map(|x| p.probs()[x * ny..(x + 1) * ny].iter().sum()).collect();
    let tables: Vec<BlockTables> = lam.blocks().iter().map(|b| block_tables(&shape, b, p.probs())).collect();
    let mut rng = seeded(seed);
    let mut deviations = Vec::with_capacity(r_samples);
    let mut min_gap = f64::INFINITY;
    for _ in 0..r_samples {
        let factors: Vec<Vec<f64>> = tables
            .iter()
            .map(|t| {
                let mut f = Vec::with_capacity(t.nxb * t.nyb);
                for _ in 0..t.nxb {
                    let raw: Vec<f64> = (0..t.nyb).map(|_| -(1.0 - rng.gen::<f64>()).ln()).collect();
                    let s: f64 = raw.iter().sum();
                    f.extend(raw.iter().map(|x| x / s));
                }
                f
            })
            .collect();
        let r = compose(&shape, &px, &tables, &factors);
        let kl_pr = kl(p.probs(), &r, 1.0)?;
        let kl_qr = kl(proj.q_star.probs(), &r, 1.0)?;
        deviations.push(kl_pr - proj.kl_value - kl_qr);
        min_gap = min_gap.min(kl_pr - proj.kl_value);
    }
    Ok(PythagoreanReport { deviations, min_gap })
}

/// A partition of the configuration space `0..n_states` into blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    pub block_of: Vec<usize>,
    pub blocks: usize,
}

/// Projection onto the family where, for every block `S_j`, the law of the
/// output restricted to `S_j` depends only on the input restricted to `S_j`.
/// Inputs outside `S_j` then share one output law on `S_j`; writing `C_j`
/// for its total mass, the optimal masses maximise
/// `Σ_j M_j log C_j + Σ_a π_a log(1 − Σ_{k≠a} C_k)`, with `M_j` the mass
/// entering `S_j` from outside and `π_a` the mass staying in `S_a`. The
/// masses are found by cyclic bisection on the stationarity conditions.
pub fn project_state_partition(
    p: &JointDistribution,
    part: &StatePartition,
    opts: &ProjectOptions,
) -> Result<ProjectionResult, IiError> {
    let shape = UnitShape::of(p)?;
    let (nx, ny) = (shape.nx(), shape.ny());
    if nx != ny || part.block_of.len() != nx {
        return Err(IiError::AxisMismatch("state partition needs matching input and output spaces".into()));
    }
    let pp = p.probs();
    let k = part.blocks;
    let mut entering = vec![vec![0.0; ny]; k];
    let mut m = vec![0.0; k];
    let mut pi = vec![0.0; k];
    for x in 0..nx {
        let a = part.block_of[x];
        for y in 0..ny {
            let j = part.block_of[y];
            let v = pp[x * ny + y];
            if j == a {
                pi[a] += v;
            } else {
                entering[j][y] += v;
                m[j] += v;
            }
        }
    }
    let mut c = vec![0.0; k];
    let slack = |c: &[f64], a: usize| 1.0 - c.iter().enumerate().filter(|&(i, _)| i != a).map(|(_, v)| v).sum::<f64>();
    let mut iterations = 0;
    loop {
        if iterations >= opts.max_iter {
            return Err(IiError::NoConvergence(iterations));
        }
        iterations += 1;
        let mut change: f64 = 0.0;
        for j in 0..k {
            if m[j] <= 0.0 {
                change = change.max(c[j]);
                c[j] = 0.0;
                continue;
            }
            // C_j may grow until some other block's own mass reaches zero
            let mut hi = f64::INFINITY;
            for a in (0..k).filter(|&a| a != j) {
                let mut c2 = c.clone();
                c2[j] = 0.0;
                hi = hi.min(slack(&c2, a));
            }
            let hi = hi.min(1.0);
            let grad = |cj: f64| {
                let mut c2 = c.clone();
                c2[j] = cj;
                m[j] / cj - (0..k).filter(|&a| a != j).map(|a| pi[a] / slack(&c2, a)).sum::<f64>()
            };
            let (mut lo, mut up) = (0.0, hi);
            if grad(up * (1.0 - 1e-15)) >= 0.0 {
                lo = up;
            } else {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + up);
                    if grad(mid) > 0.0 {
                        lo = mid;
                    } else {
                        up = mid;
                    }
                    if up - lo <= 1e-16 * up.max(1e-300) {
                        break;
                    }
                }
            }
            let new = 0.5 * (lo + up);
            change = change.max((new - c[j]).abs());
            c[j] = new;
        }
        if change <= opts.tol * 1e-6 {
            break;
        }
    }
    // explicit Q*
    let mut q = vec![0.0; nx * ny];
    for x in 0..nx {
        let a = part.block_of[x];
        let px: f64 = pp[x * ny..(x + 1) * ny].iter().sum();
        if px <= 0.0 {
            continue;
        }
        let own: f64 = (0..ny).filter(|&y| part.block_of[y] == a).map(|y| pp[x * ny + y]).sum();
        let own_len = (0..ny).filter(|&y| part.block_of[y] == a).count() as f64;
        let s = slack(&c, a);
        for y in 0..ny {
            let j = part.block_of[y];
            let cond = if j == a {
                if own > 0.0 {
                    s * pp[x * ny + y] / own
                } else {
                    s / own_len
                }
            } else {
                c[j] * entering[j][y] / m[j].max(f64::MIN_POSITIVE)
            };
            q[x * ny + y] = px * cond;
        }
    }
    let kkt = (0..k)
        .filter(|&j| m[j] > 0.0)
        .map(|j| (m[j] / c[j] - (0..k).filter(|&a| a != j).map(|a| pi[a] / slack(&c, a)).sum::<f64>()).abs())
        .fold(0.0, f64::max);
    let kl_value = kl(pp, &q, 1.0)?;
    let q_star = JointDistribution::new(p.axes().to_vec(), renormalised(q))?;
    let constraint_residual = state_manifold_residual(&q_star, part);
    Ok(ProjectionResult { q_star, kl_value, constraint_residual, kkt_residual: kkt, iterations, smoothing: 0.0 })
}

/// `max |Q(Y_j = y | x) − Q(Y_j = y | X_j = ⊥)|` over blocks `j`, outputs
/// `y ∈ S_j` and inputs `x ∉ S_j` with `Q(x) > 0`, where `X_j = ⊥` means
/// the input lies outside `S_j`.
pub fn state_manifold_residual(q: &JointDistribution, part: &StatePartition) -> f64 {
    let n = part.block_of.len();
    let qp = q.probs();
    let qx: Vec<f64> = (0..n).map(|x| qp[x * n..(x + 1) * n].iter().sum()).collect();
    let mut worst: f64 = 0.0;
    for j in 0..part.blocks {
        let outside: Vec<usize> = (0..n).filter(|&x| part.block_of[x] != j && qx[x] > 0.0).collect();
        let mass: f64 = outside.iter().map(|&x| qx[x]).sum();
        if mass <= 0.0 {
            continue;
        }
        for y in (0..n).filter(|&y| part.block_of[y] == j) {
            let pooled = outside.iter().map(|&x| qp[x * n + y]).sum::<f64>() / mass;
            for &x in &outside {
                worst = worst.max((qp[x * n + y] / qx[x] - pooled).abs());
            }
        }
    }
    worst
}

/// Node update for binary network dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UpdateRule {
    /// Active when at least half of the parents are active.
    Threshold,
    /// Parity of the parents.
    Xor,
}

/// Most units for exact joint enumeration.
pub const EXACT_UNITS_CAP: usize = 10;

fn check_noise(eps: f64) -> Result<(), IiError> {
    if eps > 0.0 && eps <= 0.5 {
        Ok(())
    } else {
        Err(IiError::InvalidNoise(eps))
    }
}

/// `P(X_t, X_{t+1})` for uniform `X_t` on the vertices of `g` (in id order).
/// Vertices without parents keep their value; every other vertex applies
/// `rule` to its parents and is flipped with probability `eps`.
pub fn dynamics_joint(g: &DiGraph, rule: UpdateRule, eps: f64) -> Result<JointDistribution, IiError> {
    check_noise(eps)?;
    let vs = g.vertices();
    let n = vs.len();
    if n > EXACT_UNITS_CAP {
        return Err(IiError::TooManyUnits(n, EXACT_UNITS_CAP));
    }
    let parents: Vec<Vec<usize>> = vs
        .iter()
        .map(|&v| g.in_edges(v).map(|e| g.index_of(e.src).expect("vertex")).collect())
        .collect();
    let states = 1usize << n;
    let bit = |s: usize, i: usize| (s >> (n - 1 - i)) & 1;
    let mut probs = vec![0.0; states * states];
    let px = 1.0 / states as f64;
    for x in 0..states {
        let det: Vec<Option<usize>> = (0..n)
            .map(|i| {
                if parents[i].is_empty() {
                    return None;
                }
                let on = parents[i].iter().filter(|&&j| bit(x, j) == 1).count();
                Some(match rule {
                    UpdateRule::Threshold => usize::from(2 * on >= parents[i].len()),
                    UpdateRule::Xor => on % 2,
                })
            })
            .collect();
        for y in 0..states {
            let mut pr = px;
            for i in 0..n {
                pr *= match det[i] {
                    None => f64::from(u8::from(bit(y, i) == bit(x, i))),
                    Some(d) => {
                        if bit(y, i) == d {
                            1.0 - eps
                        } else {
                            eps
                        }
                    }
                };
            }
            probs[x * states + y] = pr;
        }
    }
    let sizes = vec![2; 2 * n];
    Ok(JointDistribution::from_sizes(&sizes, renormalised(probs))?)
}

/// The state partition by the values at the given input vertices.
pub fn input_partition(g: &DiGraph, inputs: &[VertexId]) -> StatePartition {
    let n = g.vertex_count();
    let idx: Vec<usize> = inputs.iter().map(|&v| g.index_of(v).expect("vertex")).collect();
    let block_of = (0..1usize << n)
        .map(|s| idx.iter().fold(0, |acc, &i| (acc << 1) | ((s >> (n - 1 - i)) & 1)))
        .collect();
    StatePartition { block_of, blocks: 1 << idx.len() }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FeedforwardMode {
    /// `II_λ` for the partition by input values.
    InputStates { inputs: Vec<VertexId> },
    /// No input vertices: `II` over unit partitions.
    Units { partition: SystemPartition },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedforwardResult {
    pub value: f64,
    pub mode: FeedforwardMode,
}

/// Integrated information of the noisy dynamics on `g`. With input vertices
/// this is `II_λ` for the partition of configurations by input values;
/// without, it is `II` over partitions of the units.
pub fn feedforward_ii(g: &DiGraph, rule: UpdateRule, eps: f64) -> Result<FeedforwardResult, IiError> {
    let p = dynamics_joint(g, rule, eps)?;
    let inputs: Vec<VertexId> = g.vertices().iter().copied().filter(|&v| g.in_edges(v).next().is_none()).collect();
    if inputs.is_empty() {
        let r = ii(&p, PartitionMode::Auto)?;
        return Ok(FeedforwardResult { value: r.value, mode: FeedforwardMode::Units { partition: r.partition } });
    }
    let part = input_partition(g, &inputs);
    let r = project_state_partition(&p, &part, &ProjectOptions::default())?;
    Ok(FeedforwardResult { value: r.kl_value, mode: FeedforwardMode::InputStates { inputs } })
}

#[derive(Debug, Clone, PartialEq)]
pub struct IiStep {
    pub step: usize,
    pub ii: f64,
    pub partition: SystemPartition,
}

/// Joint of `(X_n, X_{n+1})` for edge units at total weights `alpha`:
/// `X_n` is the binarised state `[α_e > θ_b]` with independent flips, and
/// `X_{n+1}` the binarised Hopfield update of `X_n`, flipped likewise.
pub fn hopfield_joint(sys: &HopfieldSystem, alpha: &[f64], theta_b: f64, eps: f64) -> Result<JointDistribution, IiError> {
    check_noise(eps)?;
    let m = alpha.len();
    if m > EXACT_UNITS_CAP {
        return Err(IiError::TooManyUnits(m, EXACT_UNITS_CAP));
    }
    if m == 0 {
        return Err(IiError::AxisMismatch("no edges".into()));
    }
    let states = 1usize << m;
    let bit = |s: usize, i: usize| (s >> (m - 1 - i)) & 1;
    let b: Vec<usize> = alpha.iter().map(|&a| usize::from(a > theta_b)).collect();
    let flip = |s: usize, target: &[usize]| -> f64 {
        (0..m).map(|i| if bit(s, i) == target[i] { 1.0 - eps } else { eps }).product()
    };
    let t = sys.coupling();
    let th = sys.theta_alpha();
    let mut probs = vec![0.0; states * states];
    for x in 0..states {
        let px = flip(x, &b);
        let f: Vec<usize> = (0..m)
            .map(|i| {
                let drive: f64 = (0..m).map(|j| t[i][j] * bit(x, j) as f64 * alpha[j]).sum::<f64>() + th[i];
                let base = match sys.variant() {
                    Variant::SelfTerm => alpha[i],
                    Variant::Pure => 0.0,
                };
                usize::from(base + pos(drive) > theta_b)
            })
            .collect();
        for y in 0..states {
            probs[x * states + y] = px * flip(y, &f);
        }
    }
    Ok(JointDistribution::from_sizes(&vec![2; 2 * m], renormalised(probs))?)
}

/// `II` of `(X_n, X_{n+1})` for `n = 0..steps`, along the total-weight
/// trajectory from `alpha0`.
pub fn hopfield_ii_trace(
    sys: &HopfieldSystem,
    alpha0: &[f64],
    steps: usize,
    theta_b: f64,
    eps: f64,
    mode: PartitionMode,
) -> Result<Vec<IiStep>, IiError> {
    check_noise(eps)?;
    let traj = sys.run_classical(alpha0, steps);
    traj.iter()
        .take(steps)
        .enumerate()
        .map(|(n, a)| {
            let p = hopfield_joint(sys, a, theta_b, eps)?;
            let r = ii(&p, mode)?;
            Ok(IiStep { step: n, ii: r.value, partition: r.partition })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::information::random_distribution;

    fn xor_joint(eps: f64) -> JointDistribution {
        // y1 = x1 xor x2 with noise, y2 = x2
        let mut p = vec![0.0; 16];
        for x in 0..4usize {
            let (x1, x2) = (x >> 1, x & 1);
            for y in 0..4usize {
                let (y1, y2) = (y >> 1, y & 1);
                let a = if y1 == x1 ^ x2 { 1.0 - eps } else { eps };
                let b = if y2 == x2 { 1.0 - eps } else { eps };
                p[x * 4 + y] = 0.25 * a * b;
            }
        }
        JointDistribution::from_sizes(&[2, 2, 2, 2], p).unwrap()
    }

    #[test]
    fn partition_counts() {
        assert_eq!(enumerate_partitions(3, PartitionMode::All).unwrap().len(), 4);
        assert_eq!(enumerate_partitions(4, PartitionMode::All).unwrap().len(), 14);
        assert_eq!(enumerate_partitions(5, PartitionMode::Auto).unwrap().len(), 15);
        assert_eq!(enumerate_partitions(1, PartitionMode::All).unwrap().len(), 0);
        assert!(matches!(enumerate_partitions(7, PartitionMode::All), Err(IiError::TooManyUnits(7, 6))));
        let first = &enumerate_partitions(3, PartitionMode::All).unwrap()[0];
        assert_eq!(first.encode(), "{0,1}|{2}");
    }

    #[test]
    fn xor_residual_and_positive_ii() {
        let p = xor_joint(0.05);
        let lam = SystemPartition::finest(2);
        assert!(manifold_residual(&p, &lam).unwrap() > 0.1);
        assert_eq!(manifold_residual(&p, &SystemPartition::single(2)).unwrap(), 0.0);
        let r = project(&p, &lam, &ProjectOptions::default()).unwrap();
        assert!(r.kl_value > 0.1);
        assert!(r.constraint_residual < 1e-10);
        assert!(r.kkt_residual < 1e-9);
        assert!(ii_lambda(&p, &SystemPartition::single(2)).unwrap().abs() < 1e-9);
    }

    #[test]
    fn product_joint_has_zero_ii() {
        let mut rng = seeded(4);
        let a = random_distribution(&[2, 2], &mut rng);
        let b = random_distribution(&[2, 2], &mut rng);
        // units independent: P = P1(x1,y1) P2(x2,y2), axes x1 x2 y1 y2
        let mut p = vec![0.0; 16];
        for (c, v) in p.iter_mut().enumerate() {
            let m = unravel(c, &[2, 2, 2, 2]);
            *v = a.probs()[m[0] * 2 + m[2]] * b.probs()[m[1] * 2 + m[3]];
        }
        let p = JointDistribution::from_sizes(&[2, 2, 2, 2], p).unwrap();
        let r = ii(&p, PartitionMode::All).unwrap();
        assert!(r.value.abs() < 1e-8);
        assert_eq!(r.partition, SystemPartition::finest(2));
    }

    #[test]
    fn pythagorean_sampling() {
        let p = xor_joint(0.1);
        let rep = pythagorean_check(&p, &SystemPartition::finest(2), 50, 9).unwrap();
        assert!(rep.min_gap >= -1e-8);
        assert!(rep.max_abs_deviation() < 1e-8);
    }

    #[test]
    fn copy_network_state_partition() {
        let g = DiGraph::from_pairs(2, &[(0, 1)]).unwrap();
        let r = feedforward_ii(&g, UpdateRule::Threshold, 0.1).unwrap();
        assert!(r.value.abs() < 1e-8, "{r:?}");
        let p = dynamics_joint(&g, UpdateRule::Threshold, 0.1).unwrap();
        let part = input_partition(&g, &[0]);
        let proj = project_state_partition(&p, &part, &ProjectOptions::default()).unwrap();
        assert!(state_manifold_residual(&p, &part) < 1e-15);
        assert!(proj.constraint_residual < 1e-12);
    }

    #[test]
    fn state_projection_when_blocks_mix() {
        // the input flips: mass moves between blocks
        let mut p = xor_joint(0.2).probs().to_vec();
        p.iter_mut().for_each(|v| *v = 0.5 * *v + 0.5 / 16.0);
        let p = JointDistribution::from_sizes(&[2, 2, 2, 2], p).unwrap();
        let part = StatePartition { block_of: vec![0, 0, 1, 1], blocks: 2 };
        let r = project_state_partition(&p, &part, &ProjectOptions::default()).unwrap();
        assert!(state_manifold_residual(&p, &part) > 1e-3);
        assert!(r.constraint_residual < 1e-12);
        assert!(r.kkt_residual < 1e-8);
        assert!(r.kl_value > 0.0);
    }

    #[test]
    fn xor_control_is_integrated() {
        let g = DiGraph::from_pairs(2, &[(0, 1), (1, 0), (0, 0), (1, 1)]).unwrap();
        let r = feedforward_ii(&g, UpdateRule::Xor, 0.05).unwrap();
        assert!(r.value > 0.01, "{r:?}");
        assert!(matches!(r.mode, FeedforwardMode::Units { .. }));
    }

    #[test]
    fn noise_guard() {
        let g = DiGraph::from_pairs(2, &[(0, 1)]).unwrap();
        assert_eq!(dynamics_joint(&g, UpdateRule::Xor, 0.0), Err(IiError::InvalidNoise(0.0)));
    }
}
