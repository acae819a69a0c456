use rprun_core::coin_model::Toss;
use rprun_core::poisson_lab::{
    coupled_half_search, log_integral, paired_search, simulate_dual, simulate_dual_events,
    synthetic_primes_until, DualProcessConfig,
};
use rprun_core::stats::chi_square_gof;

#[test]
fn synthetic_count_follows_log_integral() {
    let x0 = 1e6;
    let expected = log_integral(x0, 2.0 * x0);
    for seed in 0..5 {
        let n = synthetic_primes_until(x0, 2.0 * x0, seed).unwrap().len() as f64;
        assert!(
            (n - expected).abs() < 3.0 * expected.sqrt(),
            "seed {seed}: {n} vs {expected}"
        );
    }
}

#[test]
fn dual_head_fraction() {
    let cfg = DualProcessConfig {
        seed: 3,
        ..Default::default()
    };
    let tags = simulate_dual_events(&cfg, 1_000_000).unwrap().tags();
    let f = tags.heads() as f64 / tags.len() as f64;
    assert!((f - 2.0 / 3.0).abs() < 0.002, "{f}");
}

#[test]
fn dual_event_count_matches_intensity() {
    let cfg = DualProcessConfig {
        base_intensity: 2.0,
        ratio: 3.0,
        horizon: 5000.0,
        seed: 8,
    };
    let n = simulate_dual(&cfg).unwrap().len() as f64;
    let mean = 5000.0 * 2.0 * 4.0;
    assert!((n - mean).abs() < 4.0 * mean.sqrt(), "{n}");
}

#[test]
fn dual_k_grams_are_independent() {
    let p: f64 = 0.75;
    let cfg = DualProcessConfig {
        ratio: 3.0,
        seed: 21,
        ..Default::default()
    };
    let tags = simulate_dual_events(&cfg, 300_000).unwrap().tags();
    let mut counts = [0u64; 16];
    for w in tags.outcomes().chunks_exact(4) {
        let code = w
            .iter()
            .fold(0, |a, t| 2 * a + usize::from(*t == Toss::Head));
        counts[code] += 1;
    }
    let probs: Vec<f64> = (0..16u32)
        .map(|c| p.powi(c.count_ones() as i32) * (1.0 - p).powi(4 - c.count_ones() as i32))
        .collect();
    let t = chi_square_gof(&counts, &probs).unwrap();
    assert!(!t.rejects_at(0.01), "p = {}", t.p_value);
}

#[test]
fn paired_search_head_rate() {
    // Heads arrive at rate 1/ln(x0 + t), tails at rate 1/(2 ln(x0/2 + t/2)).
    let x0: f64 = 1e9;
    let ratio = 2.0 * (x0 / 2.0).ln() / x0.ln();
    let want = ratio / (1.0 + ratio);
    let events = paired_search(x0, 400_000, 4).unwrap();
    let f = events.tags().heads() as f64 / events.len() as f64;
    assert!((f - want).abs() < 0.004, "{f} vs {want}");
    assert!(events.events().windows(2).all(|w| w[0].t <= w[1].t));
}

#[test]
fn coupled_walk_tracks_pi_difference() {
    // Heads minus tails over (x0, x] equals the synthetic (π(x) − π(x/2)) increment.
    let (x0, x_end) = (1e5, 3e5);
    let s = coupled_half_search(x0, x_end, 6).unwrap();
    let points = synthetic_primes_until(x0 / 2.0, x_end, 6).unwrap();
    let count = |a: f64, b: f64| points.iter().filter(|&&y| y > a && y <= b).count() as i64;
    let walk: i64 = s
        .events()
        .iter()
        .map(|e| if e.tag == Toss::Head { 1 } else { -1 })
        .sum();
    assert_eq!(walk, count(x0, x_end) - count(x0 / 2.0, x_end / 2.0));
}
