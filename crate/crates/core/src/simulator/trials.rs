use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use super::codebook::{searched_classes, Codebook, CodebookSpec};
use super::decoder::{Decoder, Outcome};
use super::seed::{noise_rng, trial_seed, unit};
use super::threshold::ThresholdTable;
use crate::channel::{Channel, OperationRegion, RateProfile};
use crate::error::{Error, Result};
use crate::math::sqrt;

const Z95: f64 = 1.959_963_984_540_054;

/// Transmitted rate-index vector and message of each user.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub rates: Vec<usize>,
    pub messages: Vec<u64>,
}

impl Condition {
    /// Message 0 for every user.
    pub fn first_message(rates: Vec<usize>) -> Self {
        let messages = alloc::vec![0; rates.len()];
        Self { rates, messages }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// In-region transmission not decoded to the sent messages and rates.
    DecodeError,
    /// Out-of-region transmission not reported as a collision.
    MissDetection,
}

impl ErrorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorKind::DecodeError => "decode_error",
            ErrorKind::MissDetection => "miss_detection",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutcome {
    pub condition: Condition,
    pub in_region: bool,
    pub kind: ErrorKind,
    pub trials: u64,
    pub errors: u64,
    pub freq: f64,
    pub wilson_radius_95: f64,
}

impl SimOutcome {
    pub fn from_counts(condition: Condition, in_region: bool, trials: u64, errors: u64) -> Self {
        let freq = if trials == 0 { 0.0 } else { errors as f64 / trials as f64 };
        Self {
            condition,
            in_region,
            kind: if in_region {
                ErrorKind::DecodeError
            } else {
                ErrorKind::MissDetection
            },
            trials,
            errors,
            freq,
            wilson_radius_95: wilson_radius_95(freq, trials),
        }
    }

    pub fn decode_error_freq(&self) -> Option<f64> {
        self.in_region.then_some(self.freq)
    }

    pub fn miss_detect_freq(&self) -> Option<f64> {
        (!self.in_region).then_some(self.freq)
    }
}

/// Half width of the 95% Wilson score interval.
pub fn wilson_radius_95(freq: f64, trials: u64) -> f64 {
    if trials == 0 {
        return f64::INFINITY;
    }
    let n = trials as f64;
    let z2 = Z95 * Z95;
    Z95 / (1.0 + z2 / n) * sqrt(freq * (1.0 - freq) / n + z2 / (4.0 * n * n))
}

/// Largest error frequency over the conditions.
pub fn empirical_p_es(outcomes: &[SimOutcome]) -> f64 {
    outcomes.iter().map(|o| o.freq).fold(0.0, f64::max)
}

/// Everything one condition needs, prepared once and shared by all trials.
#[derive(Debug, Clone)]
pub struct Scenario<'a> {
    pub(crate) ch: &'a Channel,
    pub(crate) profile: &'a RateProfile,
    pub(crate) decoder: Decoder<'a>,
    pub(crate) condition: Condition,
    pub(crate) in_region: bool,
    pub(crate) classes: Vec<BTreeSet<usize>>,
    pub(crate) budget: u128,
}

impl<'a> Scenario<'a> {
    pub fn new(
        ch: &'a Channel,
        profile: &'a RateProfile,
        region: &OperationRegion,
        thresholds: &ThresholdTable,
        n: usize,
        condition: Condition,
        budget: u128,
    ) -> Result<Self> {
        let users = ch.num_users();
        if condition.rates.len() != users || condition.messages.len() != users {
            return Err(Error::DimensionMismatch {
                what: "condition entries",
                expected: users,
                found: condition.rates.len().min(condition.messages.len()),
            });
        }
        for k in 0..users {
            let i = condition.rates[k];
            if i >= profile.user(k).len() {
                return Err(Error::Invalid(format!("rate index {i} out of range for user {}", k + 1)));
            }
            let count = CodebookSpec { n, profile, seed: 0 }.count(k, i);
            if condition.messages[k] as u128 >= count {
                return Err(Error::Invalid(format!(
                    "message {} out of range for user {} ({count} codewords)",
                    condition.messages[k],
                    k + 1
                )));
            }
        }
        let classes = searched_classes(region, users);
        let required = CodebookSpec { n, profile, seed: 0 }.required_symbols(&classes);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let decoder = Decoder::new(ch, profile, region, thresholds, n)?;
        let in_region = region.contains(&condition.rates);
        Ok(Self {
            ch,
            profile,
            decoder,
            condition,
            in_region,
            classes,
            budget,
        })
    }

    pub fn in_region(&self) -> bool {
        self.in_region
    }

    pub fn n(&self) -> usize {
        self.decoder.n()
    }

    pub fn decoder(&self) -> &Decoder<'a> {
        &self.decoder
    }

    pub(crate) fn is_error(&self, outcome: &Outcome) -> bool {
        match outcome {
            Outcome::Collision => self.in_region,
            Outcome::Decoded { messages, rates } => {
                !self.in_region || *messages != self.condition.messages || *rates != self.condition.rates
            }
        }
    }

    /// Run trial `index`: fresh codebook, transmission, channel, decoding.
    /// Returns whether the trial is an error for this condition.
    pub fn run_trial(&self, base_seed: u64, index: u64) -> Result<bool> {
        let seed = trial_seed(base_seed, index);
        let n = self.n();
        let spec = CodebookSpec {
            n,
            profile: self.profile,
            seed,
        };
        let cb = Codebook::generate(&spec, &self.classes, self.budget)?;
        let users = self.ch.num_users();
        let sent: Vec<Vec<u32>> = (0..users)
            .map(|k| {
                let (i, w) = (self.condition.rates[k], self.condition.messages[k]);
                match cb.codeword(k, i, w) {
                    Some(x) => x.to_vec(),
                    None => spec.draw(k, i, w),
                }
            })
            .collect();
        let mut rng = noise_rng(seed);
        let y: Vec<u32> = (0..n)
            .map(|j| {
                let row: usize = (0..users).map(|k| sent[k][j] as usize * self.ch.stride(k)).sum();
                sample_row(self.ch.row(row), unit(&mut rng))
            })
            .collect();
        Ok(self.is_error(&self.decoder.decode(&y, &cb)))
    }

    /// Error count over a range of trial indices.
    pub fn run_range(&self, base_seed: u64, range: Range<u64>) -> Result<u64> {
        let mut errors = 0;
        for i in range {
            errors += self.run_trial(base_seed, i)? as u64;
        }
        Ok(errors)
    }

    pub fn outcome(&self, trials: u64, errors: u64) -> SimOutcome {
        SimOutcome::from_counts(self.condition.clone(), self.in_region, trials, errors)
    }
}

fn sample_row(row: &[f64], u: f64) -> u32 {
    let mut acc = 0.0;
    let mut last = 0;
    for (y, &p) in row.iter().enumerate() {
        if p > 0.0 {
            acc += p;
            last = y;
            if u < acc {
                return y as u32;
            }
        }
    }
    last as u32
}

/// Sequential trial loop; trial `i` always uses `trial_seed(base_seed, i)`.
pub fn run_trials(scenario: &Scenario<'_>, trials: u64, base_seed: u64) -> Result<SimOutcome> {
    if trials == 0 {
        return Err(Error::Invalid("trials must be at least 1".into()));
    }
    let errors = scenario.run_range(base_seed, 0..trials)?;
    Ok(scenario.outcome(trials, errors))
}
