use alloc::vec;
use alloc::vec::Vec;

use super::codebook::{Codebook, CodebookSpec};
use super::trials::Scenario;
use crate::error::{Error, Result};

/// Largest number of (codebook realization, output sequence) pairs
/// [`exact_ensemble_error`] accepts.
pub const ENUMERATION_LIMIT: u128 = 10_000_000;

struct Position {
    support: Vec<(u32, f64)>,
}

/// Exact ensemble error probability of a scenario: the sum over every
/// realization of the stored codewords and the transmitted codewords, and
/// every output sequence, of realization probability times output
/// probability times the error indicator.
pub fn exact_ensemble_error(scenario: &Scenario<'_>, limit: u128) -> Result<f64> {
    let ch = scenario.ch;
    let profile = scenario.profile;
    let n = scenario.n();
    let users = ch.num_users();
    let spec = CodebookSpec { n, profile, seed: 0 };

    let support = |k: usize, i: usize| -> Vec<(u32, f64)> {
        profile
            .point(k, i)
            .dist
            .probs()
            .iter()
            .enumerate()
            .filter(|(_, &p)| p > 0.0)
            .map(|(x, &p)| (x as u32, p))
            .collect()
    };

    // stored classes first, then transmitted codewords drawn on demand
    let mut positions = Vec::new();
    let mut stored = Vec::new();
    for k in 0..users {
        for &i in &scenario.classes[k] {
            let count = spec.count(k, i);
            let start = positions.len();
            for _ in 0..count * n as u128 {
                positions.push(Position { support: support(k, i) });
            }
            stored.push((k, i, start, count));
        }
    }
    let mut extra = vec![None; users];
    for k in 0..users {
        let i = scenario.condition.rates[k];
        if !scenario.classes[k].contains(&i) {
            extra[k] = Some(positions.len());
            for _ in 0..n {
                positions.push(Position { support: support(k, i) });
            }
        }
    }

    let mut size: u128 = 1;
    for p in &positions {
        size = size.saturating_mul(p.support.len() as u128);
    }
    for _ in 0..n {
        size = size.saturating_mul(ch.output_size() as u128);
    }
    if size > limit {
        return Err(Error::EnumerationTooLarge { size, limit });
    }

    let mut idx = vec![0usize; positions.len()];
    let mut total = Neumaier::default();
    let mut y = vec![0u32; n];
    loop {
        let symbols: Vec<u32> = positions.iter().zip(&idx).map(|(p, &i)| p.support[i].0).collect();
        let weight: f64 = positions.iter().zip(&idx).map(|(p, &i)| p.support[i].1).product();

        let mut books = vec![vec![None; 0]; users];
        let mut counts = vec![Vec::new(); users];
        for k in 0..users {
            let m = profile.user(k).len();
            books[k] = vec![None; m];
            counts[k] = (0..m).map(|i| spec.count(k, i)).collect();
        }
        for &(k, i, start, count) in &stored {
            books[k][i] = Some(symbols[start..start + count as usize * n].to_vec());
        }
        let cb = Codebook::from_parts(n, books, counts);
        let sent: Vec<&[u32]> = (0..users)
            .map(|k| match extra[k] {
                Some(start) => &symbols[start..start + n],
                None => {
                    let (i, w) = (scenario.condition.rates[k], scenario.condition.messages[k]);
                    cb.codeword(k, i, w).expect("stored class")
                }
            })
            .collect();
        let rows: Vec<usize> = (0..n)
            .map(|j| (0..users).map(|k| sent[k][j] as usize * ch.stride(k)).sum())
            .collect();

        y.iter_mut().for_each(|v| *v = 0);
        loop {
            let p_y: f64 = rows.iter().zip(&y).map(|(&r, &yj)| ch.prob(r, yj as usize)).product();
            if p_y > 0.0 && scenario.is_error(&scenario.decoder.decode(&y, &cb)) {
                total.add(weight * p_y);
            }
            if !advance(&mut y, |_| ch.output_size()) {
                break;
            }
        }

        let more = {
            let mut j = idx.len();
            loop {
                if j == 0 {
                    break false;
                }
                j -= 1;
                idx[j] += 1;
                if idx[j] < positions[j].support.len() {
                    break true;
                }
                idx[j] = 0;
            }
        };
        if !more {
            break;
        }
    }
    // rounding in the realization weights can push the sum past 1
    Ok(total.value().min(1.0))
}

/// Compensated running sum.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

fn advance(v: &mut [u32], size: impl Fn(usize) -> usize) -> bool {
    let mut j = v.len();
    while j > 0 {
        j -= 1;
        v[j] += 1;
        if (v[j] as usize) < size(j) {
            return true;
        }
        v[j] = 0;
    }
    false
}
