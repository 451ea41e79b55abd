//! Preordered commutative resource monoids, measurings and conversion rates.

use num_rational::Ratio;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResourceError {
    #[error("conversion rate is unbounded: the target has nonpositive measure")]
    UnboundedRate,
    #[error("no multiple of the source dominates any multiple of the target")]
    Infeasible,
    #[error("search bound must be at least 1")]
    BadBound,
}

/// `(R, +, ⪰, 0)`.
pub trait ResourceMonoid {
    type Elem: Clone + std::fmt::Debug;
    fn unit(&self) -> Self::Elem;
    fn combine(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// `a ⪰ b`.
    fn geq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    /// `n·a`, the n-fold sum.
    fn times(&self, n: u64, a: &Self::Elem) -> Self::Elem {
        let mut acc = self.unit();
        for _ in 0..n {
            acc = self.combine(&acc, a);
        }
        acc
    }

    /// The gate `r ⪰ 0`.
    fn threshold(&self, r: &Self::Elem) -> bool {
        self.geq(r, &self.unit())
    }
}

/// An additive, order-preserving real-valued map.
pub trait Measuring<M: ResourceMonoid> {
    fn measure(&self, a: &M::Elem) -> f64;
}

/// Reals under `+`, ordered by `≥`. Negative values are admitted; the
/// Hopfield gate needs a sign test.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignedReals;

impl ResourceMonoid for SignedReals {
    type Elem = f64;
    fn unit(&self) -> f64 {
        0.0
    }
    fn combine(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn geq(&self, a: &f64, b: &f64) -> bool {
        a >= b
    }
    fn times(&self, n: u64, a: &f64) -> f64 {
        n as f64 * a
    }
}

/// Non-negative reals; elements are assumed `≥ 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct NonNegReals;

impl ResourceMonoid for NonNegReals {
    type Elem = f64;
    fn unit(&self) -> f64 {
        0.0
    }
    fn combine(&self, a: &f64, b: &f64) -> f64 {
        a + b
    }
    fn geq(&self, a: &f64, b: &f64) -> bool {
        a >= b
    }
    fn times(&self, n: u64, a: &f64) -> f64 {
        n as f64 * a
    }
}

/// Integers under `+` with the usual order.
#[derive(Debug, Clone, Copy, Default)]
pub struct Integers;

impl ResourceMonoid for Integers {
    type Elem = i64;
    fn unit(&self) -> i64 {
        0
    }
    fn combine(&self, a: &i64, b: &i64) -> i64 {
        a + b
    }
    fn geq(&self, a: &i64, b: &i64) -> bool {
        a >= b
    }
    fn times(&self, n: u64, a: &i64) -> i64 {
        n as i64 * a
    }
}

/// Integer vectors of fixed dimension, componentwise `+` and `≥`.
#[derive(Debug, Clone, Copy)]
pub struct IntVectors {
    pub dim: usize,
}

impl ResourceMonoid for IntVectors {
    type Elem = Vec<i64>;
    fn unit(&self) -> Vec<i64> {
        vec![0; self.dim]
    }
    fn combine(&self, a: &Vec<i64>, b: &Vec<i64>) -> Vec<i64> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }
    fn geq(&self, a: &Vec<i64>, b: &Vec<i64>) -> bool {
        a.iter().zip(b).all(|(x, y)| x >= y)
    }
    fn times(&self, n: u64, a: &Vec<i64>) -> Vec<i64> {
        a.iter().map(|x| n as i64 * x).collect()
    }
}

/// The identity on a real carrier.
#[derive(Debug, Clone, Copy, Default)]
pub struct Identity;

impl Measuring<SignedReals> for Identity {
    fn measure(&self, a: &f64) -> f64 {
        *a
    }
}

impl Measuring<NonNegReals> for Identity {
    fn measure(&self, a: &f64) -> f64 {
        *a
    }
}

impl Measuring<Integers> for Identity {
    fn measure(&self, a: &i64) -> f64 {
        *a as f64
    }
}

/// `M(a) = Σ wᵢ aᵢ` with non-negative weights; order preserving for the
/// componentwise preorder.
#[derive(Debug, Clone)]
pub struct LinearMeasuring {
    pub weights: Vec<f64>,
}

impl Measuring<IntVectors> for LinearMeasuring {
    fn measure(&self, a: &Vec<i64>) -> f64 {
        self.weights.iter().zip(a).map(|(w, x)| w * *x as f64).sum()
    }
}

/// `ρ̂ = max { m/n : n·a ⪰ m·b, 1 ≤ n ≤ n_max }`.
///
/// For each `n` the candidates `m` run from 0 up to `⌊n M(a) / M(b)⌋`, a
/// bound implied by order preservation of the measuring.
pub fn conversion_rate<R, M>(
    monoid: &R,
    measuring: &M,
    a: &R::Elem,
    b: &R::Elem,
    n_max: u64,
) -> Result<Ratio<i64>, ResourceError>
where
    R: ResourceMonoid,
    M: Measuring<R>,
{
    if n_max == 0 {
        return Err(ResourceError::BadBound);
    }
    let mb = measuring.measure(b);
    if mb <= 0.0 {
        return Err(ResourceError::UnboundedRate);
    }
    let ma = measuring.measure(a);
    let mut best: Option<Ratio<i64>> = None;
    for n in 1..=n_max {
        let na = monoid.times(n, a);
        let bound = ((n as f64) * ma / mb).floor();
        if bound < 0.0 {
            continue;
        }
        // one extra candidate guards against rounding in the bound
        let bound = bound as u64 + 1;
        for m in (0..=bound).rev() {
            if monoid.geq(&na, &monoid.times(m, b)) {
                let r = Ratio::new(m as i64, n as i64);
                if best.is_none_or(|x| r > x) {
                    best = Some(r);
                }
                break;
            }
        }
    }
    best.ok_or(ResourceError::Infeasible)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_rate_three_halves() {
        assert_eq!(conversion_rate(&Integers, &Identity, &3, &2, 2).unwrap(), Ratio::new(3, 2));
        assert_eq!(conversion_rate(&Integers, &Identity, &3, &2, 1).unwrap(), Ratio::new(1, 1));
        assert_eq!(conversion_rate(&Integers, &Identity, &5, &5, 7).unwrap(), Ratio::new(1, 1));
    }

    #[test]
    fn unbounded_and_infeasible() {
        assert_eq!(conversion_rate(&Integers, &Identity, &3, &0, 4), Err(ResourceError::UnboundedRate));
        assert_eq!(conversion_rate(&Integers, &Identity, &-1, &2, 4), Err(ResourceError::Infeasible));
    }

    #[test]
    fn threshold_gate() {
        assert!(SignedReals.threshold(&0.0));
        assert!(!SignedReals.threshold(&-0.1));
        assert!(IntVectors { dim: 2 }.threshold(&vec![0, 3]));
        assert!(!IntVectors { dim: 2 }.threshold(&vec![-1, 3]));
    }

    #[test]
    fn vector_rate_respects_bound() {
        let m = IntVectors { dim: 2 };
        let meas = LinearMeasuring { weights: vec![1.0, 2.0] };
        let a = vec![4, 3];
        let b = vec![1, 2];
        let r = conversion_rate(&m, &meas, &a, &b, 6).unwrap();
        assert_eq!(r, Ratio::new(3, 2));
        let rf = *r.numer() as f64 / *r.denom() as f64;
        assert!(rf * meas.measure(&b) <= meas.measure(&a));
    }
}
