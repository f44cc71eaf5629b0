use raxcode_core::exponents::OptimizerConfig;
use raxcode_core::simulator::{
    compute_threshold, exact_ensemble_error, run_trials, trial_seed, wilson_radius_95, Codebook, CodebookSpec,
    Condition, Decoder, Outcome, Scenario, ThresholdParams, ThresholdTable, DEFAULT_MEMORY_BUDGET, ENUMERATION_LIMIT,
};
use raxcode_core::{Channel, InputDistribution, OperationRegion, RatePoint, RateProfile, Subset};

struct Setup {
    ch: Channel,
    rp: RateProfile,
    region: OperationRegion,
    table: ThresholdTable,
}

impl Setup {
    fn new(ch: Channel, rp: RateProfile, region: OperationRegion, offset: f64) -> Self {
        let table = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), offset).unwrap();
        Self { ch, rp, region, table }
    }

    fn scenario(&self, n: usize, condition: Condition) -> Scenario<'_> {
        Scenario::new(&self.ch, &self.rp, &self.region, &self.table, n, condition, DEFAULT_MEMORY_BUDGET).unwrap()
    }
}

fn single(ch: Channel, rates: &[f64], dist: &InputDistribution, members: &[usize]) -> Setup {
    let rp = RateProfile::single(rates.iter().map(|&r| RatePoint::new(r, dist.clone())).collect()).unwrap();
    let region = OperationRegion::single(members, &rp).unwrap();
    Setup::new(ch, rp, region, 0.0)
}

fn noisy_xor(p: f64) -> Channel {
    let mut t = Vec::new();
    for x1 in 0..2u32 {
        for x2 in 0..2u32 {
            let y = x1 ^ x2;
            t.extend(if y == 0 { [1.0 - p, p] } else { [p, 1.0 - p] });
        }
    }
    Channel::new(vec![2, 2], 2, t).unwrap()
}

fn assert_matches_exact(setup: &Setup, n: usize, condition: Condition, trials: u64, seed: u64) {
    let sc = setup.scenario(n, condition);
    let exact = exact_ensemble_error(&sc, ENUMERATION_LIMIT).unwrap();
    let out = run_trials(&sc, trials, seed).unwrap();
    let radius = wilson_radius_95(exact, trials).max(wilson_radius_95(out.freq, trials));
    assert!(
        (out.freq - exact).abs() <= 3.0 * radius,
        "freq {} exact {} radius {}",
        out.freq,
        exact,
        radius
    );
}

#[test]
fn monte_carlo_matches_enumeration() {
    let u = InputDistribution::uniform(2);
    let bsc = single(Channel::bsc(0.2).unwrap(), &[0.5, 1.2], &u, &[0]);
    assert_matches_exact(&bsc, 3, Condition::first_message(vec![0]), 20_000, 1);
    assert_matches_exact(&bsc, 3, Condition::first_message(vec![1]), 20_000, 2);

    let z3 = Channel::single_user(&[&[0.8, 0.15, 0.05], &[0.1, 0.3, 0.6]]).unwrap();
    let skew = InputDistribution::new(vec![0.35, 0.65]).unwrap();
    let z = single(z3, &[0.4, 1.0], &skew, &[0]);
    assert_matches_exact(&z, 2, Condition::first_message(vec![0]), 20_000, 3);
    assert_matches_exact(&z, 2, Condition::first_message(vec![1]), 20_000, 4);

    let pts = vec![RatePoint::new(0.4, u.clone()), RatePoint::new(1.0, u.clone())];
    let rp = RateProfile::new(vec![pts.clone(), pts]).unwrap();
    let region = OperationRegion::new(vec![vec![0, 0]], &rp).unwrap();
    let xor = Setup::new(noisy_xor(0.1), rp, region, 0.0);
    assert_matches_exact(&xor, 2, Condition::first_message(vec![0, 0]), 20_000, 5);
    assert_matches_exact(&xor, 2, Condition::first_message(vec![1, 0]), 20_000, 6);
}

#[test]
fn two_random_codewords_on_one_symbol_fail_half_the_time() {
    let u = InputDistribution::uniform(2);
    let s = single(Channel::identity(2).unwrap(), &[0.7], &u, &[0]);
    let sc = s.scenario(1, Condition::first_message(vec![0]));
    assert_eq!(exact_ensemble_error(&sc, ENUMERATION_LIMIT).unwrap(), 0.5);
}

#[test]
fn useless_channel_extremes_match_enumeration() {
    let useless = Channel::single_user(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
    let u = InputDistribution::uniform(2);
    let rp = RateProfile::single(vec![RatePoint::new(0.0, u.clone()), RatePoint::new(0.5, u)]).unwrap();
    let region = OperationRegion::single(&[0], &rp).unwrap();
    for (offset, expected) in [(f64::NEG_INFINITY, 0.0), (f64::INFINITY, 1.0)] {
        let setup = Setup::new(useless.clone(), rp.clone(), region.clone(), offset);
        let sc = setup.scenario(3, Condition::first_message(vec![1]));
        assert_eq!(exact_ensemble_error(&sc, ENUMERATION_LIMIT).unwrap(), expected);
        assert_eq!(run_trials(&sc, 500, 7).unwrap().freq, expected);
    }
}

#[test]
fn multi_user_decoder_reduces_to_single_user_scan() {
    let ch = Channel::bsc(0.15).unwrap();
    let u = InputDistribution::uniform(2);
    let rp = RateProfile::single(vec![RatePoint::new(0.2, u.clone()), RatePoint::new(0.35, u.clone()), RatePoint::new(0.8, u)])
        .unwrap();
    let region = OperationRegion::single(&[0, 1], &rp).unwrap();
    let table = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), 0.0);
    let table = table.unwrap_or_else(|e| panic!("{e}"));
    let n = 8;
    let dec = Decoder::new(&ch, &rp, &region, &table, n).unwrap();
    let mut decoded = 0;
    for i in 0..1000u64 {
        let seed = trial_seed(11, i);
        let cb = Codebook::for_region(&CodebookSpec { n, profile: &rp, seed }, &region, DEFAULT_MEMORY_BUDGET).unwrap();
        let y: Vec<u32> = (0..n).map(|j| ((seed >> (j * 3)) & 1) as u32).collect();
        let a = dec.decode(&y, &cb);
        assert_eq!(a, dec.decode_single(&y, &cb).unwrap());
        decoded += matches!(a, Outcome::Decoded { .. }) as u32;
    }
    assert!(decoded > 0 && decoded < 1000);
}

#[test]
fn xor_explicit_codebook_decodes_both_users() {
    let ch = noisy_xor(0.0);
    let u = InputDistribution::uniform(2);
    // two codewords per user at N=3, sum rate 0.5 below ln 2
    let pts = vec![RatePoint::new(0.25, u.clone()), RatePoint::new(1.0, u)];
    let rp = RateProfile::new(vec![pts.clone(), pts]).unwrap();
    let region = OperationRegion::new(vec![vec![0, 0]], &rp).unwrap();
    let table = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), 0.0).unwrap();
    let spec = CodebookSpec { n: 3, profile: &rp, seed: 0 };
    let cb = Codebook::from_codewords(
        &spec,
        &[(0, 0, vec![vec![0, 0, 0], vec![1, 1, 1]]), (1, 0, vec![vec![0, 0, 0], vec![0, 1, 1]])],
    )
    .unwrap();
    let dec = Decoder::new(&ch, &rp, &region, &table, 3).unwrap();
    // candidate sums: (0,0) 000, (0,1) 011, (1,0) 111, (1,1) 100
    for (y, w) in [([1, 0, 0], [1, 1]), ([0, 1, 1], [0, 1]), ([0, 0, 0], [0, 0]), ([1, 1, 1], [1, 0])] {
        match dec.decode(&y, &cb) {
            Outcome::Decoded { messages, rates } => {
                assert_eq!(messages, w.to_vec());
                assert_eq!(rates, vec![0, 0]);
            }
            Outcome::Collision => panic!("expected decoding of {y:?}"),
        }
    }
    // no candidate explains y = 010
    assert_eq!(dec.decode(&[0, 1, 0], &cb), Outcome::Collision);
    // identical user-2 codewords tie
    let cb = Codebook::from_codewords(
        &spec,
        &[(0, 0, vec![vec![0, 0, 0], vec![1, 1, 1]]), (1, 0, vec![vec![0, 1, 1], vec![0, 1, 1]])],
    )
    .unwrap();
    assert_eq!(dec.decode(&[0, 1, 1], &cb), Outcome::Collision);
}

#[test]
fn swapped_identical_codebooks_collide() {
    let ch = noisy_xor(0.05);
    let u = InputDistribution::uniform(2);
    let pts = vec![RatePoint::new(0.0, u.clone()), RatePoint::new(0.1, u)];
    let rp = RateProfile::new(vec![pts.clone(), pts]).unwrap();
    let region = OperationRegion::new(vec![vec![0, 1], vec![1, 0]], &rp).unwrap();
    let table = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), 0.0).unwrap();
    let spec = CodebookSpec { n: 3, profile: &rp, seed: 0 };
    let word = vec![1, 0, 1];
    let cb = Codebook::from_codewords(
        &spec,
        &[(0, 0, vec![word.clone()]), (0, 1, vec![word.clone()]), (1, 0, vec![word.clone()]), (1, 1, vec![word])],
    )
    .unwrap();
    let dec = Decoder::new(&ch, &rp, &region, &table, 3).unwrap();
    for y in [[0, 0, 0], [1, 1, 0]] {
        assert_eq!(dec.decode(&y, &cb), Outcome::Collision);
    }
}

/// Threshold written out directly from its closed form in plain floating
/// point for one user and an empty subset.
fn threshold_oracle(rows: &[Vec<f64>], q: &[f64], outs: &[Vec<f64>], r: f64, tp: &ThresholdParams, y: &[u32]) -> f64 {
    let n = y.len() as f64;
    let mean = |d: &[f64], yj: usize, a: f64| -> f64 { d.iter().zip(rows).map(|(p, row)| p * row[yj].powf(a)).sum() };
    let ln_a = outs
        .iter()
        .map(|d| y.iter().map(|&yj| mean(d, yj as usize, 1.0).ln()).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    let ln_b: f64 = y.iter().map(|&yj| mean(q, yj as usize, tp.s2 / tp.rho_tilde).ln()).sum();
    let ln_c: f64 = y.iter().map(|&yj| mean(q, yj as usize, 1.0 - tp.s1).ln()).sum();
    let e = ln_a + tp.rho_tilde * ln_b + n * tp.rho_tilde * r - ln_c;
    -e / (tp.s1 + tp.s2) / n + tp.offset
}

#[test]
fn threshold_matches_direct_transcription() {
    let rows = vec![vec![0.8, 0.2], vec![0.3, 0.7]];
    let ch = Channel::single_user(&[&rows[0], &rows[1]]).unwrap();
    let q = InputDistribution::new(vec![0.3, 0.7]).unwrap();
    let o1 = InputDistribution::uniform(2);
    let o2 = InputDistribution::new(vec![0.9, 0.1]).unwrap();
    for &(rho, s) in &[(0.3, 0.2), (0.7, 0.25), (0.05, 0.9)] {
        let tp = ThresholdParams::new(rho, s, 0.0).unwrap();
        for y in [vec![0u32, 1, 1, 0, 1], vec![1, 1, 1, 1, 1], vec![0, 0, 0, 0, 1]] {
            let got = compute_threshold(&ch, Subset::EMPTY, &[0.2], &[&q], &[vec![&o1], vec![&o2]], &tp, &y, &[]).unwrap();
            let want = threshold_oracle(&rows, q.probs(), &[o1.probs().to_vec(), o2.probs().to_vec()], 0.2, &tp, &y);
            assert!((got - want).abs() <= 1e-12 * want.abs().max(1.0), "{got} {want}");
            let shifted = ThresholdParams::new(rho, s, 0.25).unwrap();
            let got2 = compute_threshold(&ch, Subset::EMPTY, &[0.2], &[&q], &[vec![&o1], vec![&o2]], &shifted, &y, &[]).unwrap();
            assert!((got2 - got - 0.25).abs() <= 1e-12);
        }
    }
}

#[test]
fn conditioned_threshold_matches_direct_transcription() {
    let ch = noisy_xor(0.1);
    let u = InputDistribution::uniform(2);
    let skew = InputDistribution::new(vec![0.2, 0.8]).unwrap();
    let tp = ThresholdParams::new(0.4, 0.3, 0.0).unwrap();
    let y = [0u32, 1, 1, 0];
    let x1 = [1u32, 1, 0, 0];
    let got = compute_threshold(&ch, Subset::from_users(&[0]), &[0.3, 0.25], &[&u, &u], &[vec![&u, &skew]], &tp, &y, &[&x1, &[]])
        .unwrap();
    // user 1 known: per symbol average over x2 only
    let p = |x1: u32, x2: u32, y: u32| if (x1 ^ x2) == y { 0.9 } else { 0.1 };
    let mean = |q: &[f64], j: usize, a: f64| -> f64 { (0..2).map(|x2| q[x2] * f64::powf(p(x1[j], x2 as u32, y[j]), a)).sum() };
    let n = y.len();
    let ln_a: f64 = (0..n).map(|j| mean(skew.probs(), j, 1.0).ln()).sum();
    let ln_b: f64 = (0..n).map(|j| mean(u.probs(), j, tp.s2 / tp.rho_tilde).ln()).sum();
    let ln_c: f64 = (0..n).map(|j| mean(u.probs(), j, 1.0 - tp.s1).ln()).sum();
    let want = -(ln_a + tp.rho_tilde * ln_b + n as f64 * tp.rho_tilde * 0.25 - ln_c) / (tp.s1 + tp.s2) / n as f64;
    assert!((got - want).abs() <= 1e-12, "{got} {want}");
}

#[test]
fn useless_channel_threshold_tracks_output_law() {
    let law = [0.2, 0.5, 0.3];
    let ch = Channel::single_user(&[&law, &law]).unwrap();
    let u = InputDistribution::uniform(2);
    let tp = ThresholdParams::new(0.5, 0.3, 0.0).unwrap();
    // every per-symbol factor is a power of P(y), and the powers add up to
    // s1 + s2, leaving tau(y) = -ln P(y) / N + const
    let t = |y: &[u32]| {
        let tau = compute_threshold(&ch, Subset::EMPTY, &[0.1], &[&u], &[vec![&u]], &tp, y, &[]).unwrap();
        tau + y.iter().map(|&j| law[j as usize].ln()).sum::<f64>() / y.len() as f64
    };
    let a = t(&[0, 0, 0]);
    for y in [[1, 2, 0], [2, 2, 2], [1, 1, 0]] {
        assert!((t(&y) - a).abs() < 1e-12);
    }
    let uniform = Channel::single_user(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
    let t = |y: &[u32]| compute_threshold(&uniform, Subset::EMPTY, &[0.1], &[&u], &[vec![&u]], &tp, y, &[]).unwrap();
    assert!((t(&[0, 1, 1]) - t(&[0, 0, 0])).abs() < 1e-12);
}

#[test]
fn raising_offset_only_adds_decodings() {
    let ch = Channel::bsc(0.1).unwrap();
    let u = InputDistribution::uniform(2);
    let rp = RateProfile::single(vec![RatePoint::new(0.15, u.clone()), RatePoint::new(0.6, u)]).unwrap();
    let region = OperationRegion::single(&[0], &rp).unwrap();
    let base = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), 0.0).unwrap();
    let n = 10;
    let offsets = [-0.2, -0.05, 0.0, 0.05, 0.2];
    let decoders: Vec<Decoder> = offsets
        .iter()
        .map(|&o| Decoder::new(&ch, &rp, &region, &base.with_offset(o), n).unwrap())
        .collect();
    let mut counts = vec![0u32; offsets.len()];
    for i in 0..500u64 {
        let seed = trial_seed(3, i);
        let cb = Codebook::for_region(&CodebookSpec { n, profile: &rp, seed }, &region, DEFAULT_MEMORY_BUDGET).unwrap();
        let y: Vec<u32> = (0..n).map(|j| ((seed >> (2 * j)) & 1) as u32).collect();
        let mut prev: Option<Outcome> = None;
        for (d, c) in decoders.iter().zip(&mut counts) {
            let out = d.decode(&y, &cb);
            if let Some(Outcome::Decoded { .. }) = &prev {
                assert_eq!(prev.as_ref(), Some(&out));
            }
            *c += matches!(out, Outcome::Decoded { .. }) as u32;
            prev = Some(out);
        }
    }
    assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    assert!(counts[0] < counts[4]);

    let mut last = 0;
    for &o in &offsets {
        let t = base.with_offset(o);
        let sc = Scenario::new(&ch, &rp, &region, &t, n, Condition::first_message(vec![1]), DEFAULT_MEMORY_BUDGET).unwrap();
        let errors = run_trials(&sc, 2000, 9).unwrap().errors;
        assert!(errors >= last);
        last = errors;
    }
}

#[test]
fn transmitted_message_does_not_matter() {
    let u = InputDistribution::uniform(2);
    let s = single(Channel::bsc(0.1).unwrap(), &[0.2, 0.7], &u, &[0]);
    let n = 10;
    let outs: Vec<f64> = [0u64, 3, 6]
        .iter()
        .map(|&w| {
            let sc = s.scenario(n, Condition { rates: vec![0], messages: vec![w] });
            run_trials(&sc, 20_000, 100 + w).unwrap().freq
        })
        .collect();
    for w in outs.windows(2) {
        let r = wilson_radius_95(w[0], 20_000) + wilson_radius_95(w[1], 20_000);
        assert!((w[0] - w[1]).abs() <= 1.5 * r, "{outs:?}");
    }
}

#[test]
fn trials_are_reproducible() {
    let u = InputDistribution::uniform(2);
    let s = single(Channel::bsc(0.1).unwrap(), &[0.2, 0.7], &u, &[0]);
    let sc = s.scenario(12, Condition::first_message(vec![1]));
    let a = run_trials(&sc, 3000, 42).unwrap();
    let b = run_trials(&sc, 3000, 42).unwrap();
    assert_eq!(a, b);
    let split = sc.run_range(42, 0..1000).unwrap() + sc.run_range(42, 1000..3000).unwrap();
    assert_eq!(split, a.errors);
}

#[test]
fn noiseless_distinct_codewords_never_fail() {
    let ch = Channel::identity(4).unwrap();
    let rp = RateProfile::single(vec![RatePoint::new(0.0, InputDistribution::uniform(4))]).unwrap();
    let region = OperationRegion::single(&[0], &rp).unwrap();
    let table = ThresholdTable::optimized(&ch, &rp, &region, &OptimizerConfig::default(), 0.0).unwrap();
    let sc = Scenario::new(&ch, &rp, &region, &table, 6, Condition::first_message(vec![0]), DEFAULT_MEMORY_BUDGET).unwrap();
    assert_eq!(run_trials(&sc, 1000, 5).unwrap().errors, 0);
}

#[test]
fn symbol_frequencies_follow_the_input_distribution() {
    let rate = 8.5f64.ln() / 1250.0;
    let rp = RateProfile::single(vec![RatePoint::new(rate, InputDistribution::uniform(2))]).unwrap();
    let spec = CodebookSpec { n: 1250, profile: &rp, seed: 77 };
    // 8 codewords of 1250 symbols
    let ones: u64 = (0..spec.count(0, 0) as u64)
        .map(|w| spec.draw(0, 0, w).iter().map(|&x| x as u64).sum::<u64>())
        .sum();
    let total = 8.0 * 1250.0;
    assert_eq!(spec.count(0, 0), 8);
    assert!((ones as f64 / total - 0.5).abs() <= 3.0 * (0.25f64 / total).sqrt());
}
