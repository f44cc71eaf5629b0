mod support;

use raxcode_core::exponents::{ei_single, em_single, OptimizerConfig};
use raxcode_core::{Channel, InputDistribution};
use support::*;

fn channel(rows: &[Vec<f64>]) -> Channel {
    let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    Channel::single_user(&refs).unwrap()
}

#[test]
fn matches_gallager_random_coding_exponent() {
    let rows = bsc_rows(0.1);
    let ch = channel(&rows);
    let u = InputDistribution::uniform(2);
    for r in [0.05, 0.1, 0.2, 0.3] {
        let ours = em_single(&ch, &u, r, &u, &OptimizerConfig::default()).unwrap().value;
        let oracle = gallager_er(&rows, &[0.5, 0.5], r);
        assert!((ours - oracle).abs() < 1e-6, "r={r}: {ours} vs {oracle}");
    }
}

#[test]
fn gallager_match_on_nonuniform_input() {
    let rows = vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]];
    let ch = channel(&rows);
    let q = [0.35, 0.65];
    let d = InputDistribution::new(q.to_vec()).unwrap();
    for r in [0.02, 0.08, 0.15] {
        let ours = em_single(&ch, &d, r, &d, &OptimizerConfig::default()).unwrap().value;
        let oracle = gallager_er(&rows, &q, r);
        assert!((ours - oracle).abs() < 1e-6, "r={r}: {ours} vs {oracle}");
    }
}

#[test]
fn agrees_with_brute_force_grid() {
    let cases: Vec<(Vec<Vec<f64>>, Vec<f64>, Vec<f64>)> = vec![
        (bsc_rows(0.1), vec![0.5, 0.5], vec![0.5, 0.5]),
        (vec![vec![0.95, 0.05], vec![0.2, 0.8]], vec![0.5, 0.5], vec![0.3, 0.7]),
        (vec![vec![0.7, 0.2, 0.1], vec![0.1, 0.3, 0.6]], vec![0.4, 0.6], vec![0.5, 0.5]),
    ];
    let cfg = OptimizerConfig::default();
    for (rows, pr, prt) in &cases {
        let ch = channel(rows);
        let dr = InputDistribution::new(pr.clone()).unwrap();
        let drt = InputDistribution::new(prt.clone()).unwrap();
        for r in [0.05, 0.2] {
            let em = em_single(&ch, &dr, r, &drt, &cfg).unwrap().value;
            let em_grid = grid_max(|a, b| em_direct(rows, pr, prt, r, a, b), false, 500);
            assert!(em >= em_grid - 1e-12, "Em below grid: {em} {em_grid}");
            assert!((em - em_grid).abs() < 1e-3);
            let ei = ei_single(&ch, r, &dr, &drt, &cfg).unwrap().value;
            let ei_grid = grid_max(|a, b| ei_direct(rows, pr, prt, r, a, b), true, 500);
            assert!(ei >= ei_grid - 1e-12, "Ei below grid: {ei} {ei_grid}");
            assert!((ei - ei_grid).abs() < 1e-3);
        }
    }
}

#[test]
fn bsc_mutual_information_closed_form() {
    let ch = Channel::bsc(0.1).unwrap();
    let i = raxcode_core::channel::mutual_information(&ch, &InputDistribution::uniform(2)).unwrap();
    assert!((i - (std::f64::consts::LN_2 - binary_entropy(0.1))).abs() < 1e-12);
}
