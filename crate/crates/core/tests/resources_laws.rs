use catnet::resources::{conversion_rate, Identity, IntVectors, Integers, LinearMeasuring, Measuring};
use catnet::rng::seeded;
use num_rational::Ratio;
use rand::Rng;

#[test]
fn additive_integers() {
    assert_eq!(conversion_rate(&Integers, &Identity, &3, &2, 16).unwrap(), Ratio::new(3, 2));
}

#[test]
fn rate_times_measure_is_bounded() {
    let mut rng = seeded(11);
    let mut violations = 0;
    for _ in 0..100 {
        let dim = rng.gen_range(1..4);
        let m = IntVectors { dim };
        let a: Vec<i64> = (0..dim).map(|_| rng.gen_range(0..10)).collect();
        let b: Vec<i64> = (0..dim).map(|_| rng.gen_range(1..10)).collect();
        let meas = LinearMeasuring { weights: (0..dim).map(|_| rng.gen_range(0.1..2.0)).collect() };
        let r = conversion_rate(&m, &meas, &a, &b, 12).unwrap();
        let rate = *r.numer() as f64 / *r.denom() as f64;
        if rate * meas.measure(&b) > meas.measure(&a) + 1e-12 {
            violations += 1;
        }
        // the componentwise optimum min_i a_i/b_i, floored to denominators ≤ 12
        let exact = (1..=12i64)
            .map(|n| Ratio::new((0..dim).map(|i| n * a[i] / b[i]).min().unwrap(), n))
            .max()
            .unwrap();
        assert_eq!(r, exact);
    }
    assert_eq!(violations, 0);
}
