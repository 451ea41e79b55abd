use catnet::codes::{
    concat_sum, firing_probability_exact, gen_bernoulli_code, mix_law_check, ones_fraction, probability,
    probability_exact, wedge_mixing_coefficients, wedge_sum, Code, CodeError, Rational,
};
use proptest::prelude::*;

fn ones(w: &[u8]) -> i64 {
    w.iter().filter(|&&d| d != 0).count() as i64
}

fn random_code(n: usize, k: usize, seed: u64) -> Code {
    gen_bernoulli_code(n, k, 0.3, seed).unwrap()
}

#[test]
fn normalization_on_generated_codes() {
    for seed in 0..200u64 {
        let c = random_code(3 + (seed % 6) as usize, 1 + (seed % 9) as usize, seed);
        match probability_exact(&c) {
            Ok(p) => {
                assert_eq!(p.iter().sum::<Rational>(), Rational::from_integer(1));
                assert!((probability(&c).unwrap().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
            }
            Err(e) => assert!(matches!(e, CodeError::DegenerateCode(_))),
        }
    }
}

#[test]
fn wedge_probability_is_the_stated_mixture() {
    for seed in 0..100u64 {
        let (a, b) = (random_code(5, 4, seed), random_code(5, 3, seed + 1000));
        let w = wedge_sum(&a, &b).unwrap();
        let (Ok(pw), Ok(_), Ok(_)) = (probability_exact(&w), probability_exact(&a), probability_exact(&b)) else {
            continue;
        };
        let (na, nb) = ((a.len() - 1) as i64, (b.len() - 1) as i64);
        let (la, lb) = wedge_mixing_coefficients(&a, &b);
        assert_eq!((la, lb), (Rational::new(na, na + nb), Rational::new(nb, na + nb)));
        // direct per-word formula b(w)/(n N) on each summand
        for (i, word) in a.nonzero_words().iter().enumerate() {
            assert_eq!(pw[1 + i], la * Rational::new(ones(word), 5 * na));
        }
        for (i, word) in b.nonzero_words().iter().enumerate() {
            assert_eq!(pw[1 + a.nonzero_words().len() + i], lb * Rational::new(ones(word), 5 * nb));
        }
    }
}

#[test]
fn concatenation_mixes_by_length() {
    for seed in 0..100u64 {
        let (n1, n2) = (2 + (seed % 5) as usize, 1 + (seed % 7) as usize);
        let (a, b) = (random_code(n1, 3, seed), random_code(n2, 2, seed + 7));
        let (lambda, dev) = mix_law_check(&a, &b).unwrap();
        assert_eq!(lambda, n1 as f64 / (n1 + n2) as f64);
        assert!(dev <= 1e-12);
        let l = Rational::new(n1 as i64, (n1 + n2) as i64);
        let lhs = firing_probability_exact(&concat_sum(&a, &b).unwrap());
        let rhs = l * firing_probability_exact(&a) + (Rational::from_integer(1) - l) * firing_probability_exact(&b);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn excluded_code_and_zero_object() {
    let bad = Code::from_strs(2, &["000", "111"]).unwrap();
    assert!(matches!(probability(&bad), Err(CodeError::DegenerateCode(_))));
    assert_eq!(probability(&Code::zero(4, 2)).unwrap(), vec![1.0]);
}

#[test]
fn firing_rate_concentrates() {
    for &p in &[0.1, 0.3, 0.5] {
        let hits = (0..100u64)
            .filter(|&s| (ones_fraction(&gen_bernoulli_code(10_000, 1, p, s).unwrap()) - p).abs() < 0.02)
            .count();
        assert!(hits >= 99, "p={p}: {hits}");
    }
    let c = gen_bernoulli_code(200, 200, 0.3, 5).unwrap();
    assert!((ones_fraction(&c) - 0.3).abs() <= 4.0 / (200.0f64 * 200.0).sqrt());
}

proptest! {
    #[test]
    fn generated_codes_are_pointed(n in 1usize..12, k in 0usize..20, p in 0.01f64..0.99, seed in any::<u64>()) {
        let c = gen_bernoulli_code(n, k, p, seed).unwrap();
        prop_assert!(c.words()[0].iter().all(|&d| d == 0));
        prop_assert!(c.nonzero_words().iter().all(|w| w.len() == n && w.iter().any(|&d| d != 0)));
        prop_assert_eq!(c, gen_bernoulli_code(n, k, p, seed).unwrap());
    }
}
