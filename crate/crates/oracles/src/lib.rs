//! Brute-force reference computations on plain data, used by tests as
//! independent checks. Nothing here depends on the main crate; inputs are
//! vertex counts, edge lists, simplex lists and flat probability tables.
//! Everything is exponential or dense and meant for tiny inputs.

use std::collections::{BTreeMap, BTreeSet};

/// Strongly connected components as classes of mutual reachability,
/// each sorted, listed by smallest member.
pub fn mutual_reach_components(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut r = vec![vec![false; n]; n];
    for (i, row) in r.iter_mut().enumerate() {
        row[i] = true;
    }
    for &(u, v) in edges {
        r[u][v] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    let mut done = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if done[i] {
            continue;
        }
        let comp: Vec<usize> = (0..n).filter(|&j| r[i][j] && r[j][i]).collect();
        for &j in &comp {
            done[j] = true;
        }
        out.push(comp);
    }
    out
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Every order of `0..n` in which each edge points forward.
pub fn all_topological_orders(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let items: Vec<usize> = (0..n).collect();
    permutations(&items)
        .into_iter()
        .filter(|p| {
            let mut pos = vec![0; n];
            for (i, &v) in p.iter().enumerate() {
                pos[v] = i;
            }
            edges.iter().all(|&(u, v)| pos[u] < pos[v])
        })
        .collect()
}

/// Rank over GF(2) by dense elimination.
pub fn gf2_rank(mut m: Vec<Vec<u8>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] & 1 == 1) else { continue };
        m.swap(rank, p);
        for r in 0..m.len() {
            if r != rank && m[r][c] & 1 == 1 {
                for k in 0..cols {
                    m[r][k] ^= m[rank][k] & 1;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank over the rationals by fraction-free elimination in `i128`.
pub fn rational_rank(m: Vec<Vec<i64>>) -> usize {
    let mut a: Vec<Vec<i128>> = m.into_iter().map(|r| r.into_iter().map(i128::from).collect()).collect();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| a[r][c] != 0) else { continue };
        a.swap(rank, p);
        for r in 0..a.len() {
            if r != rank && a[r][c] != 0 {
                let (x, y) = (a[rank][c], a[r][c]);
                for k in 0..cols {
                    a[r][k] = a[r][k] * x - a[rank][k] * y;
                }
                let g = a[r].iter().fold(0i128, |g, &v| gcd(g, v.abs()));
                if g > 1 {
                    a[r].iter_mut().for_each(|v| *v /= g);
                }
            }
        }
        rank += 1;
    }
    rank
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// All nonempty faces of the given simplices, each sorted.
pub fn face_closure(simplices: &[Vec<u32>]) -> BTreeSet<Vec<u32>> {
    let mut out = BTreeSet::new();
    for s in simplices {
        let mut s = s.clone();
        s.sort_unstable();
        s.dedup();
        for mask in 1u64..(1u64 << s.len()) {
            out.insert(s.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &v)| v).collect());
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coefficients {
    Gf2,
    Rationals,
}

/// Betti numbers of the face closure of `simplices`, from dense boundary
/// matrices, in dimensions `0..=top`.
pub fn betti_dense(simplices: &[Vec<u32>], coeffs: Coefficients) -> Vec<usize> {
    let all = face_closure(simplices);
    let top = all.iter().map(Vec::len).max().unwrap_or(0);
    if top == 0 {
        return Vec::new();
    }
    let by_dim: Vec<Vec<Vec<u32>>> = (1..=top).map(|k| all.iter().filter(|s| s.len() == k).cloned().collect()).collect();
    // rank of ∂_k : C_k -> C_{k-1}, k >= 1
    let rank_of = |k: usize| -> usize {
        if k == 0 || k >= by_dim.len() {
            return 0;
        }
        let rows = &by_dim[k - 1];
        let index: BTreeMap<&Vec<u32>, usize> = rows.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let mut mat = vec![vec![0i64; by_dim[k].len()]; rows.len()];
        for (j, s) in by_dim[k].iter().enumerate() {
            for i in 0..s.len() {
                let mut f = s.clone();
                f.remove(i);
                mat[index[&f]][j] = if i % 2 == 0 { 1 } else { -1 };
            }
        }
        match coeffs {
            Coefficients::Gf2 => gf2_rank(mat.into_iter().map(|r| r.into_iter().map(|v| (v & 1) as u8).collect()).collect()),
            Coefficients::Rationals => rational_rank(mat),
        }
    };
    (0..by_dim.len()).map(|k| by_dim[k].len() - rank_of(k) - rank_of(k + 1)).collect()
}

/// Vertex sets of size at most `max_dim + 1` admitting an order with an edge
/// from every earlier to every later vertex; with `undirected`, any pair of
/// vertices joined in either direction suffices.
pub fn flag_complex_brute(n: usize, edges: &[(usize, usize)], max_dim: usize, undirected: bool) -> BTreeSet<Vec<u32>> {
    let set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let has = |u: usize, v: usize| set.contains(&(u, v)) || (undirected && set.contains(&(v, u)));
    let mut out = BTreeSet::new();
    for mask in 1u64..(1u64 << n) {
        let verts: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        if verts.len() > max_dim + 1 {
            continue;
        }
        let ok = permutations(&verts)
            .iter()
            .any(|p| (0..p.len()).all(|i| (i + 1..p.len()).all(|j| has(p[i], p[j]))));
        if ok {
            out.insert(verts.iter().map(|&v| v as u32).collect());
        }
    }
    out
}

/// One step of a run: `(from, label or None for idle, to)`.
pub type RunStep = (usize, Option<String>, usize);

/// All runs of exactly `len` steps from `initial`, idle steps included.
pub fn runs(n_states: usize, initial: usize, transitions: &[(usize, String, usize)], len: usize) -> BTreeSet<Vec<RunStep>> {
    let mut frontier: Vec<(usize, Vec<RunStep>)> = vec![(initial, Vec::new())];
    for _ in 0..len {
        let mut next = Vec::new();
        for (s, w) in frontier {
            let mut w2 = w.clone();
            w2.push((s, None, s));
            next.push((s, w2));
            for (a, l, b) in transitions {
                if *a == s {
                    let mut w2 = w.clone();
                    w2.push((s, Some(l.clone()), *b));
                    next.push((*b, w2));
                }
            }
        }
        frontier = next;
    }
    assert!(initial < n_states.max(1));
    frontier.into_iter().map(|(_, w)| w).collect()
}

/// States and transitions of grafting over a strongly connected graph with
/// `|V|` parts whose initial and final states differ: `|V|²` copies of all
/// parts and bridges, initial states merged and final states merged.
pub fn strong_graft_shape(part_states: &[usize], part_transitions: &[usize], n_edges: usize) -> (usize, usize) {
    let k = part_states.len() * part_states.len();
    let s: usize = part_states.iter().sum();
    let t: usize = part_transitions.iter().sum();
    (k * s - 2 * (k - 1), k * (t + n_edges))
}

/// Conditional entropy `S(Y|X) = Σ p(x,y) log(p(x)/p(x,y))` of a table
/// `pxy[x][y]`.
pub fn conditional_entropy(pxy: &[Vec<f64>]) -> f64 {
    let mut s = 0.0;
    for row in pxy {
        let px: f64 = row.iter().sum();
        for &v in row {
            if v > 0.0 {
                s += v * (px / v).ln();
            }
        }
    }
    s
}

fn kl_two_unit(p: &[f64; 16], a: [f64; 2], b: [f64; 2]) -> f64 {
    let mut s = 0.0;
    for x1 in 0..2 {
        for x2 in 0..2 {
            let px: f64 = (0..4).map(|y| p[(x1 * 2 + x2) * 4 + y]).sum();
            for y1 in 0..2 {
                for y2 in 0..2 {
                    let v = p[(x1 * 2 + x2) * 4 + y1 * 2 + y2];
                    if v == 0.0 {
                        continue;
                    }
                    let qa = if y1 == 1 { a[x1] } else { 1.0 - a[x1] };
                    let qb = if y2 == 1 { b[x2] } else { 1.0 - b[x2] };
                    let q = px * qa * qb;
                    if q <= 0.0 {
                        return f64::INFINITY;
                    }
                    s += v * (v / q).ln();
                }
            }
        }
    }
    s
}

/// Smallest `KL(P ‖ P(x) a(y₁|x₁) b(y₂|x₂))` over a grid of `points` values
/// per parameter, refined `levels` times around the best point. `p` is
/// indexed `(x1, x2, y1, y2)` with the last index fastest.
pub fn grid_min_kl_two_unit(p: &[f64; 16], points: usize, levels: usize) -> f64 {
    let mut lo = [0.0f64; 4];
    let mut hi = [1.0f64; 4];
    let mut best = f64::INFINITY;
    let mut arg = [0.5f64; 4];
    for _ in 0..levels {
        let axis = |d: usize| -> Vec<f64> {
            (0..points).map(|i| lo[d] + (hi[d] - lo[d]) * (i as f64 + 0.5) / points as f64).collect()
        };
        let g: Vec<Vec<f64>> = (0..4).map(axis).collect();
        for &a0 in &g[0] {
            for &a1 in &g[1] {
                for &b0 in &g[2] {
                    for &b1 in &g[3] {
                        let v = kl_two_unit(p, [a0, a1], [b0, b1]);
                        if v < best {
                            best = v;
                            arg = [a0, a1, b0, b1];
                        }
                    }
                }
            }
        }
        for d in 0..4 {
            let half = (hi[d] - lo[d]) * 2.0 / points as f64;
            lo[d] = (arg[d] - half).max(0.0);
            hi[d] = (arg[d] + half).min(1.0);
        }
    }
    best
}
