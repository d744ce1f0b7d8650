use mcpqe::ansatz::{enumerate_uccsd, AnsatzState};
use mcpqe::stats::{mean_std, reblock};
use proptest::prelude::*;

fn ansatz_with(theta: &[f64]) -> AnsatzState {
    let mut a = enumerate_uccsd(6, 0b11, &[-1.0, 0.2, 0.5]);
    a.set_amplitudes(&theta[..a.len()]);
    a
}

fn amplitudes() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), -0.5f64..0.5], 8)
}

proptest! {
    #[test]
    fn rounding_keeps_or_zeroes_each_amplitude(theta in amplitudes(), p in 0.0f64..1.0) {
        let a = ansatz_with(&theta);
        let r = a.round_with(p, false);
        let before = a.amplitudes();
        let after = r.state.amplitudes();
        let mut kept = 0;
        for (x, y) in before.iter().zip(&after) {
            prop_assert!(*y == 0.0 || y == x);
            kept += usize::from(*y != 0.0);
        }
        prop_assert_eq!(kept, r.kept);
        if before.iter().any(|t| *t != 0.0) {
            prop_assert!(r.kept >= 1);
        }
    }

    #[test]
    fn rounding_keeps_the_largest_amplitudes(theta in amplitudes(), p in 0.0f64..1.0) {
        let a = ansatz_with(&theta);
        let after = a.round_with(p, false).state.amplitudes();
        let smallest_kept = after.iter().filter(|t| **t != 0.0).map(|t| t.abs()).fold(f64::INFINITY, f64::min);
        for (x, y) in a.amplitudes().iter().zip(&after) {
            if *y == 0.0 {
                prop_assert!(x.abs() <= smallest_kept);
            }
        }
    }

    #[test]
    fn rounding_is_monotone_in_p(theta in amplitudes(), p in 0.0f64..1.0, q in 0.0f64..1.0) {
        let a = ansatz_with(&theta);
        let (lo, hi) = if p < q { (p, q) } else { (q, p) };
        prop_assert!(a.round_with(lo, false).kept <= a.round_with(hi, false).kept);
        prop_assert!(a.round_with(lo, false).kept <= a.round_with(lo, true).kept + 1);
    }

    #[test]
    fn reblock_mean_is_the_sample_mean(x in prop::collection::vec(-10.0f64..10.0, 16..400), scale in 0.1f64..10.0) {
        let r = reblock(&x, 0).unwrap();
        prop_assert!((r.mean - mean_std(&x).0).abs() < 1e-9);
        prop_assert!(r.std_err >= 0.0);
        let scaled: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let s = reblock(&scaled, 0).unwrap();
        prop_assert!((s.std_err - scale * r.std_err).abs() <= 1e-9 * (1.0 + s.std_err));
    }
}

/// The probability that amplitude `k` survives is one minus the share of
/// the total held by larger amplitudes.
#[test]
fn keep_frequency_matches_cumulative_weight() {
    use rand::SeedableRng;
    let theta = [0.4, -0.2, 0.1, 0.05, 0.0, 0.15, -0.07, 0.03];
    let a = ansatz_with(&theta);
    let amps = a.amplitudes();
    let total: f64 = amps.iter().map(|t| t.abs()).sum();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let n = 200_000;
    let mut kept = vec![0usize; amps.len()];
    for _ in 0..n {
        let r = a.stochastic_round(false, &mut rng).state.amplitudes();
        for (k, v) in r.iter().enumerate() {
            kept[k] += usize::from(*v != 0.0);
        }
    }
    for (k, t) in amps.iter().enumerate() {
        if *t == 0.0 {
            assert_eq!(kept[k], 0);
            continue;
        }
        let larger: f64 = amps.iter().filter(|u| u.abs() > t.abs()).map(|u| u.abs()).sum();
        let want = 1.0 - larger / total;
        let got = kept[k] as f64 / n as f64;
        assert!((got - want).abs() < 5e-3, "amplitude {k}: {got} vs {want}");
    }
}
