//! Pointed codes and weighted codes.
//!
//! A code is a multiset of length-`n` words over `{0..q-1}` containing the
//! zero word exactly once, kept at index 0. Repeated words are separate
//! instances so that weights may differ between them.

use std::fmt::Write as _;

use num_rational::Ratio;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::numeric::fsum;
use crate::rng::seeded;

pub type Word = Vec<u8>;
pub type Rational = Ratio<i64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CodeError {
    #[error("word length {got} does not match code length {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("alphabet sizes differ: {0} vs {1}")]
    AlphabetMismatch(u8, u8),
    #[error("digit {0} outside alphabet of size {1}")]
    DigitOutOfRange(u8, u8),
    #[error("alphabet size must be at least 2")]
    AlphabetTooSmall,
    #[error("code length must be positive")]
    EmptyLength,
    #[error("zero word missing")]
    ZeroWordMissing,
    #[error("zero word occurs {0} times")]
    ZeroWordRepeated(usize),
    #[error("degenerate code: {0}")]
    DegenerateCode(String),
    #[error("probability {0} outside (0,1)")]
    InvalidProbability(f64),
    #[error("weight vector has {got} entries for {expected} words")]
    WeightCount { expected: usize, got: usize },
    #[error("zero word carries nonzero weight {0}")]
    ZeroWordWeight(f64),
    #[error("code is not binary")]
    NonBinary,
    #[error("parse error: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Code {
    n: usize,
    q: u8,
    words: Vec<Word>,
}

impl Code {
    /// Validates and normalises: the zero word moves to the front, the other
    /// instances keep their order.
    pub fn new(n: usize, q: u8, words: Vec<Word>) -> Result<Self, CodeError> {
        if q < 2 {
            return Err(CodeError::AlphabetTooSmall);
        }
        if n == 0 {
            return Err(CodeError::EmptyLength);
        }
        for w in &words {
            if w.len() != n {
                return Err(CodeError::LengthMismatch { expected: n, got: w.len() });
            }
            if let Some(&d) = w.iter().find(|&&d| d >= q) {
                return Err(CodeError::DigitOutOfRange(d, q));
            }
        }
        let zeros = words.iter().filter(|w| is_zero(w)).count();
        match zeros {
            0 => return Err(CodeError::ZeroWordMissing),
            1 => {}
            k => return Err(CodeError::ZeroWordRepeated(k)),
        }
        let mut ordered = vec![vec![0; n]];
        ordered.extend(words.into_iter().filter(|w| !is_zero(w)));
        Ok(Code { n, q, words: ordered })
    }

    /// Binary code from strings of `0`/`1` (or any digits below 10).
    pub fn from_strs(q: u8, words: &[&str]) -> Result<Self, CodeError> {
        let n = words.first().map_or(0, |w| w.len());
        let parsed = words.iter().map(|w| parse_word(w)).collect::<Result<Vec<_>, _>>()?;
        Code::new(n, q, parsed)
    }

    /// The zero object `{c₀}`.
    pub fn zero(n: usize, q: u8) -> Self {
        Code { n, q, words: vec![vec![0; n]] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u8 {
        self.q
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn nonzero_words(&self) -> &[Word] {
        &self.words[1..]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    /// Never true: the zero word is always present.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_zero_object(&self) -> bool {
        self.words.len() == 1
    }

    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    /// The code `{c₀, c₁}` made of the zero word and the all-ones word, which
    /// is not an admissible object for probability assignments.
    pub fn is_excluded(&self) -> bool {
        self.words.len() == 2 && self.words[1].iter().all(|&d| d == 1)
    }

    /// Minimum Hamming distance between distinct instances, if any pair exists.
    pub fn min_distance(&self) -> Option<usize> {
        let mut best = None;
        for i in 0..self.words.len() {
            for j in (i + 1)..self.words.len() {
                let d = hamming(&self.words[i], &self.words[j]);
                best = Some(best.map_or(d, |b: usize| b.min(d)));
            }
        }
        best
    }

    /// Parses `n q` on the first line followed by one word per line.
    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let (n, q, rows) = parse_rows(text)?;
        let words = rows.into_iter().map(|(w, _)| w).collect();
        Code::new(n, q, words)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.q);
        for w in &self.words {
            s.push_str(&word_string(w));
            s.push('\n');
        }
        s
    }
}

fn is_zero(w: &[u8]) -> bool {
    w.iter().all(|&d| d == 0)
}

/// Number of nonzero digits, `b(w)`.
pub fn weight_b(w: &[u8]) -> usize {
    w.iter().filter(|&&d| d != 0).count()
}

pub fn hamming(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn word_string(w: &[u8]) -> String {
    w.iter().map(|d| char::from_digit(*d as u32, 36).expect("digit < 36")).collect()
}

pub fn parse_word(s: &str) -> Result<Word, CodeError> {
    s.chars()
        .map(|c| c.to_digit(36).map(|d| d as u8).ok_or_else(|| CodeError::Parse(format!("bad digit {c:?}"))))
        .collect()
}

type ParsedRows = (usize, u8, Vec<(Word, Option<f64>)>);

fn parse_rows(text: &str) -> Result<ParsedRows, CodeError> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines.next().ok_or_else(|| CodeError::Parse("missing header".into()))?;
    let mut it = header.split_whitespace();
    let n = it.next().and_then(|x| x.parse().ok()).ok_or_else(|| CodeError::Parse("bad n".into()))?;
    let q = it.next().and_then(|x| x.parse().ok()).ok_or_else(|| CodeError::Parse("bad q".into()))?;
    let mut rows = Vec::new();
    for l in lines {
        let mut cols = l.split('\t');
        let w = parse_word(cols.next().unwrap_or("").trim())?;
        let weight = match cols.next() {
            Some(x) => Some(x.trim().parse::<f64>().map_err(|e| CodeError::Parse(e.to_string()))?),
            None => None,
        };
        rows.push((w, weight));
    }
    Ok((n, q, rows))
}

/// A code with a real weight per word instance, zero on the zero word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightedCode {
    code: Code,
    weights: Vec<f64>,
}

impl WeightedCode {
    /// `weights[i]` belongs to `code.words()[i]`.
    pub fn new(code: Code, weights: Vec<f64>) -> Result<Self, CodeError> {
        if weights.len() != code.len() {
            return Err(CodeError::WeightCount { expected: code.len(), got: weights.len() });
        }
        if weights[0] != 0.0 {
            return Err(CodeError::ZeroWordWeight(weights[0]));
        }
        Ok(WeightedCode { code, weights })
    }

    /// Every nonzero word gets weight `w`.
    pub fn uniform(code: Code, w: f64) -> Self {
        let mut weights = vec![w; code.len()];
        weights[0] = 0.0;
        WeightedCode { code, weights }
    }

    pub fn zero(n: usize, q: u8) -> Self {
        WeightedCode { code: Code::zero(n, q), weights: vec![0.0] }
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|&w| w >= 0.0)
    }

    /// `(C, t·ω)`.
    pub fn scaled(&self, t: f64) -> Self {
        WeightedCode { code: self.code.clone(), weights: self.weights.iter().map(|w| w * t).collect() }
    }

    /// Nonzero instances as `(word, weight)` sorted by word then weight.
    pub fn canonical_form(&self) -> Vec<(Word, f64)> {
        let mut v: Vec<(Word, f64)> = self
            .code
            .nonzero_words()
            .iter()
            .cloned()
            .zip(self.weights[1..].iter().copied())
            .collect();
        v.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        v
    }

    /// Equal canonical forms, weights compared within `tol`.
    pub fn equivalent(&self, other: &WeightedCode, tol: f64) -> bool {
        let (a, b) = (self.canonical_form(), other.canonical_form());
        self.code.n == other.code.n
            && a.len() == b.len()
            && a.iter().zip(&b).all(|(x, y)| x.0 == y.0 && (x.1 - y.1).abs() <= tol)
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        let (n, q, rows) = parse_rows(text)?;
        let words: Vec<Word> = rows.iter().map(|(w, _)| w.clone()).collect();
        let code = Code::new(n, q, words)?;
        // Code::new moved the zero word to the front; realign weights.
        let mut weights = vec![0.0];
        for (w, wt) in &rows {
            if !is_zero(w) {
                weights.push(wt.unwrap_or(0.0));
            } else if let Some(x) = wt {
                if *x != 0.0 {
                    return Err(CodeError::ZeroWordWeight(*x));
                }
            }
        }
        WeightedCode::new(code, weights)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.code.n, self.code.q);
        for (w, x) in self.code.words.iter().zip(&self.weights) {
            let _ = writeln!(s, "{}\t{}", word_string(w), x);
        }
        s
    }
}

/// `C ∨ C'`: disjoint union with the zero words identified.
pub fn wedge_sum(a: &Code, b: &Code) -> Result<Code, CodeError> {
    if a.n != b.n {
        return Err(CodeError::LengthMismatch { expected: a.n, got: b.n });
    }
    if a.q != b.q {
        return Err(CodeError::AlphabetMismatch(a.q, b.q));
    }
    let mut words = a.words.clone();
    words.extend(b.nonzero_words().iter().cloned());
    Ok(Code { n: a.n, q: a.q, words })
}

/// Wedge sum carrying weights: `ω ∨ ω'`.
pub fn wedge_sum_weighted(a: &WeightedCode, b: &WeightedCode) -> Result<WeightedCode, CodeError> {
    let code = wedge_sum(&a.code, &b.code)?;
    let mut weights = a.weights.clone();
    weights.extend_from_slice(&b.weights[1..]);
    Ok(WeightedCode { code, weights })
}

/// All concatenations `(c, c')`, first index outermost.
pub fn concat_sum(a: &Code, b: &Code) -> Result<Code, CodeError> {
    if a.q != b.q {
        return Err(CodeError::AlphabetMismatch(a.q, b.q));
    }
    let mut words = Vec::with_capacity(a.len() * b.len());
    for x in &a.words {
        for y in &b.words {
            let mut w = x.clone();
            w.extend_from_slice(y);
            words.push(w);
        }
    }
    Ok(Code { n: a.n + b.n, q: a.q, words })
}

/// Exact probability per word instance: `b(w)/(n(|C|-1))` off the zero word
/// and the remainder on it. The zero object gets the point mass.
pub fn probability_exact(c: &Code) -> Result<Vec<Rational>, CodeError> {
    if c.is_zero_object() {
        return Ok(vec![Rational::from_integer(1)]);
    }
    if c.is_excluded() {
        return Err(CodeError::DegenerateCode("the code {c0, all-ones} is excluded".into()));
    }
    let denom = (c.n * (c.len() - 1)) as i64;
    let mut p: Vec<Rational> = vec![Rational::from_integer(0)];
    p.extend(c.nonzero_words().iter().map(|w| Rational::new(weight_b(w) as i64, denom)));
    let rest = Rational::from_integer(1) - p.iter().sum::<Rational>();
    if rest <= Rational::from_integer(0) {
        return Err(CodeError::DegenerateCode(format!("mass left for the zero word is {rest}")));
    }
    p[0] = rest;
    Ok(p)
}

pub fn probability(c: &Code) -> Result<Vec<f64>, CodeError> {
    Ok(probability_exact(c)?.iter().map(ratio_f64).collect())
}

pub fn ratio_f64(r: &Rational) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Binary reduction `p = Σ_c b(c) / (n |C|)` of the firing distribution.
pub fn firing_probability_exact(c: &Code) -> Rational {
    let total: usize = c.words.iter().map(|w| weight_b(w)).sum();
    Rational::new(total as i64, (c.n * c.len()) as i64)
}

pub fn firing_probability(c: &Code) -> f64 {
    let total: usize = c.words.iter().map(|w| weight_b(w)).sum();
    total as f64 / (c.n * c.len()) as f64
}

/// Mixing weight `λ = n/(n+n')` and the deviation of
/// `p(C ⊕ C') = λ p(C) + (1-λ) p(C')` for the concatenation sum.
pub fn mix_law_check(c1: &Code, c2: &Code) -> Result<(f64, f64), CodeError> {
    if !c1.is_binary() || !c2.is_binary() {
        return Err(CodeError::NonBinary);
    }
    let sum = concat_sum(c1, c2)?;
    let lambda = c1.n as f64 / (c1.n + c2.n) as f64;
    let lhs = firing_probability(&sum);
    let rhs = lambda * firing_probability(c1) + (1.0 - lambda) * firing_probability(c2);
    // the (1-p) component deviates by the same amount up to rounding
    let dev = (lhs - rhs).abs().max(((1.0 - lhs) - (1.0 - rhs)).abs());
    Ok((lambda, dev))
}

/// Coefficients `(N/(N+N'), N'/(N+N'))`, `N = |C1|-1`, with which
/// `P_{C1∨C2}` mixes `P_{C1}` and `P_{C2}`.
pub fn wedge_mixing_coefficients(c1: &Code, c2: &Code) -> (Rational, Rational) {
    let (a, b) = ((c1.len() - 1) as i64, (c2.len() - 1) as i64);
    (Rational::new(a, a + b), Rational::new(b, a + b))
}

/// `k` words with i.i.d. Bernoulli(p) digits; the first zero draw (or an
/// appended zero word) is the base point and later zero draws are dropped.
pub fn gen_bernoulli_code(n: usize, k: usize, p: f64, seed: u64) -> Result<Code, CodeError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CodeError::InvalidProbability(p));
    }
    if n == 0 {
        return Err(CodeError::EmptyLength);
    }
    let mut rng = seeded(seed);
    let mut words = vec![vec![0u8; n]];
    for _ in 0..k {
        let w: Word = (0..n).map(|_| u8::from(rng.gen::<f64>() < p)).collect();
        if !is_zero(&w) {
            words.push(w);
        }
    }
    Ok(Code { n, q: 2, words })
}

/// Fraction of ones among the digits of the nonzero instances.
pub fn ones_fraction(c: &Code) -> f64 {
    let k = c.len() - 1;
    if k == 0 {
        return 0.0;
    }
    let ones: usize = c.nonzero_words().iter().map(|w| weight_b(w)).sum();
    ones as f64 / (c.n * k) as f64
}

/// Total weight `α(C, ω) = Σ ω(c)`, correctly rounded.
pub fn total_weight(wc: &WeightedCode) -> f64 {
    fsum(wc.weights.iter().copied())
}

/// Whether `f` fixes the zero word, lands in `b` and never increases
/// Hamming distance on the words of `a`.
pub fn is_code_morphism(f: &dyn Fn(&[u8]) -> Word, a: &Code, b: &Code) -> bool {
    let images: Vec<Word> = a.words.iter().map(|w| f(w)).collect();
    if !is_zero(&images[0]) || images[0].len() != b.n {
        return false;
    }
    if !images.iter().all(|w| b.words.contains(w)) {
        return false;
    }
    for i in 0..a.words.len() {
        for j in (i + 1)..a.words.len() {
            if hamming(&images[i], &images[j]) > hamming(&a.words[i], &a.words[j]) {
                return false;
            }
        }
    }
    true
}

/// Relative minimum distance `δ = d/n` and the q-ary entropy `H_q(δ)`.
/// Diagnostic only.
pub fn relative_distance_entropy(c: &Code) -> Option<(f64, f64)> {
    let d = c.min_distance()? as f64 / c.n as f64;
    let q = c.q as f64;
    let h = if d <= 0.0 {
        0.0
    } else if d >= 1.0 {
        (q - 1.0).log(q)
    } else {
        d * (q - 1.0).log(q) - d * d.log(q) - (1.0 - d) * (1.0 - d).log(q)
    };
    Some((d, h))
}
