use num_rational::Ratio;
use rprun_core::experiments::PrimeExperiment;
use rprun_core::ramanujan::{classify_primes, compute_ramanujan_table};
use rprun_core::sieve::build_prime_table;
use rprun_core::RpParams;

fn trial_division_pi(max: u64) -> Vec<u64> {
    let is_prime = |n: u64| n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0);
    let mut pi = vec![0u64; max as usize + 1];
    for y in 1..=max {
        pi[y as usize] = pi[y as usize - 1] + u64::from(is_prime(y));
    }
    pi
}

/// `R_n = 1 + max{y <= horizon : π(y) − π(⌊c y⌋) < n}`, valid while the
/// horizon is far enough past `R_n` that `s` never dips back below `n`.
fn oracle(c: (u64, u64), horizon: u64, upto: u64) -> Vec<u64> {
    let pi = trial_division_pi(horizon);
    let s = |y: u64| pi[y as usize] - pi[(y * c.0 / c.1) as usize];
    let mut out = Vec::new();
    for n in 1.. {
        let r = (1..=horizon).rev().find(|&y| s(y) < n).map_or(1, |y| y + 1);
        if r > upto {
            return out;
        }
        out.push(r);
    }
    unreachable!()
}

#[test]
fn ordinary_ramanujan_primes() {
    let want = oracle((1, 2), 40_000, 10_000);
    assert_eq!(&want[..8], &[2, 11, 17, 29, 41, 47, 59, 67]);
    let e = PrimeExperiment::covering(10_000, &RpParams::ordinary()).unwrap();
    assert!(e.rp.safe_limit() >= 10_000);
    let got: Vec<u64> =
        e.rp.values()
            .iter()
            .copied()
            .take_while(|&r| r <= 10_000)
            .collect();
    assert_eq!(got, want);
    for (n, &r) in want.iter().enumerate().take(50) {
        assert_eq!(e.rp.nth(n as u64 + 1).unwrap(), r);
    }
}

#[test]
fn classification_matches_oracle() {
    let want = oracle((1, 2), 40_000, 10_000);
    let table = build_prime_table(40_000).unwrap();
    let rp = compute_ramanujan_table(&table, &RpParams::ordinary()).unwrap();
    let classes = classify_primes(&table, &rp);
    let upto: Vec<_> = classes.iter().take_while(|c| c.prime <= 10_000).collect();
    assert_eq!(upto.len(), 1229);
    for c in upto {
        assert_eq!(
            c.is_ramanujan,
            want.binary_search(&c.prime).is_ok(),
            "prime {}",
            c.prime
        );
    }
}

#[test]
fn generalized_ratios() {
    for (num, den) in [(1, 3), (2, 3), (3, 4)] {
        let want = oracle((num, den), 24_000, 3000);
        let params = RpParams::new(Ratio::new(num, den)).unwrap();
        let e = PrimeExperiment::covering(3000, &params).unwrap();
        let got: Vec<u64> =
            e.rp.values()
                .iter()
                .copied()
                .take_while(|&r| r <= 3000)
                .collect();
        assert_eq!(got, want, "c = {num}/{den}");
    }
    let e = PrimeExperiment::covering(100, &RpParams::new(Ratio::new(3, 4)).unwrap()).unwrap();
    assert_eq!(e.rp.values()[0], 11);
}

#[test]
fn every_ramanujan_prime_is_prime() {
    let e = PrimeExperiment::covering(200_000, &RpParams::ordinary()).unwrap();
    for &r in e.rp.values() {
        assert!(e.table.is_prime(r).unwrap(), "{r}");
    }
}
