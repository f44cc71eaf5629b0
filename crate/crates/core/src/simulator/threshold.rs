use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use crate::channel::{Channel, InputDistribution, OperationRegion, RateProfile, Subset};
use crate::error::{Error, Result};
use crate::exponents::{ei_max_min, ExponentResult, OptimizerConfig};
use crate::math::{scale, LogSum, NEG_INF};

/// Auxiliary parameters of the typicality threshold.
///
/// The exponents are parameterized by `(rho, s)`; the threshold by
/// `(rho~, s1, s2)` with `rho~ = rho / (1 - s)`,
/// `s2 = rho~ s / (1 - (1 - s)(1 - rho~))` and `s1 = 1 - s2 / rho~`.
/// These simplify to `s1 = rho / (s + rho)` and `s2 = rho~ s / (s + rho)`,
/// the forms evaluated here since they stay accurate as `rho -> 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdParams {
    pub rho: f64,
    pub s: f64,
    pub rho_tilde: f64,
    pub s1: f64,
    pub s2: f64,
    /// Added to the threshold, in nats per symbol.
    pub offset: f64,
}

impl ThresholdParams {
    pub fn new(rho: f64, s: f64, offset: f64) -> Result<Self> {
        let bad = || Error::InvalidThreshold { rho, s };
        // rounding slack so that s = 1 - rho written in decimal is accepted
        if !(rho > 0.0 && rho <= 1.0 && s > 0.0 && s < 1.0 && s <= 1.0 - rho + 1e-12) || offset.is_nan() {
            return Err(bad());
        }
        let rho_tilde = rho / (1.0 - s);
        let s2 = rho_tilde * s / (s + rho);
        let s1 = rho / (s + rho);
        let p = Self {
            rho,
            s,
            rho_tilde,
            s1,
            s2,
            offset,
        };
        if !(s2 > 0.0 && s2 < rho_tilde && s1 > 0.0 && s1 < 1.0) {
            return Err(bad());
        }
        let (r2, q2) = p.forward();
        if (r2 - rho).abs() > 1e-12 || (q2 - s).abs() > 1e-12 {
            return Err(bad());
        }
        Ok(p)
    }

    pub fn from_result(res: &ExponentResult, offset: f64) -> Result<Self> {
        Self::new(res.rho_star, res.s_star, offset)
    }

    /// `(rho, s)` recovered by the forward change
    /// `rho = rho~ (rho~ - s2) / (rho~ - (1 - rho~) s2)`,
    /// `s = 1 - (rho~ - s2) / (rho~ - (1 - rho~) s2)`. With
    /// `rho~ - s2 = rho~ s1` the denominator is `rho~ (s1 + s2)`.
    pub fn forward(&self) -> (f64, f64) {
        let sum = self.s1 + self.s2;
        (self.rho_tilde * self.s1 / sum, self.s2 / sum)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }
}

/// Threshold parameters per (in-region vector, subset). Pairs without any
/// out-of-region vector agreeing on the subset need none: their threshold
/// is `+inf`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ThresholdTable {
    entries: BTreeMap<(Vec<usize>, Subset), ThresholdParams>,
}

fn outs_agreeing<'a>(out: &'a [Vec<usize>], r: &'a [usize], s: Subset) -> impl Iterator<Item = &'a Vec<usize>> {
    out.iter().filter(move |o| s.agree(r, o))
}

impl ThresholdTable {
    /// Same parameters everywhere.
    pub fn uniform(profile: &RateProfile, region: &OperationRegion, tp: ThresholdParams) -> Self {
        let out = region.complement(profile);
        let mut entries = BTreeMap::new();
        for r in region.members() {
            for s in Subset::proper_subsets(profile.num_users()) {
                if outs_agreeing(&out, r, s).next().is_some() {
                    entries.insert((r.clone(), s), tp);
                }
            }
        }
        Self { entries }
    }

    /// Parameters maximizing the smallest threshold exponent over the
    /// out-of-region vectors each pair has to reject. With a single such
    /// vector they are the certificate of its threshold exponent.
    pub fn optimized(
        ch: &Channel,
        profile: &RateProfile,
        region: &OperationRegion,
        cfg: &OptimizerConfig,
        offset: f64,
    ) -> Result<Self> {
        profile.check_channel(ch)?;
        let out = region.complement(profile);
        let mut entries = BTreeMap::new();
        for r in region.members() {
            let rates = profile.rates(r);
            let dists = profile.dists(r);
            for s in Subset::proper_subsets(ch.num_users()) {
                let outs: Vec<Vec<&InputDistribution>> =
                    outs_agreeing(&out, r, s).map(|o| profile.dists(o)).collect();
                if outs.is_empty() {
                    continue;
                }
                let res = ei_max_min(ch, s, &rates, &dists, &outs, cfg)?;
                entries.insert((r.clone(), s), ThresholdParams::from_result(&res, offset)?);
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, r: &[usize], s: Subset) -> Option<&ThresholdParams> {
        self.entries.get(&(r.to_vec(), s))
    }

    pub fn insert(&mut self, r: Vec<usize>, s: Subset, tp: ThresholdParams) {
        self.entries.insert((r, s), tp);
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        Self {
            entries: self.entries.iter().map(|(k, v)| (k.clone(), v.with_offset(offset))).collect(),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(Vec<usize>, Subset), &ThresholdParams)> {
        self.entries.iter()
    }
}

/// Per-symbol tables for the threshold of one (in-region vector, subset).
#[derive(Debug, Clone)]
pub(crate) struct SubsetThreshold {
    params: Option<ThresholdParams>,
    rate_sum: f64,
    n_y: usize,
    inside_users: Vec<usize>,
    inside_sizes: Vec<usize>,
    /// per out-of-region vector: `ln sum_{x_S^c} P_{r'}(x) P(y|x)` per `(x_S, y)`
    ln_a: Vec<Vec<f64>>,
    /// `ln sum_{x_S^c} P_r(x) P(y|x)^{s2/rho~}`
    ln_b: Vec<f64>,
    /// `ln sum_{x_S^c} P_r(x) P(y|x)^{1-s1}`
    ln_c: Vec<f64>,
}

impl SubsetThreshold {
    pub(crate) fn new(
        ch: &Channel,
        subset: Subset,
        r_rates: &[f64],
        r_dists: &[&InputDistribution],
        out_dists: &[Vec<&InputDistribution>],
        params: Option<ThresholdParams>,
    ) -> Result<Self> {
        ch.check_subset(subset)?;
        ch.check_dists(r_dists)?;
        let layout = ch.split(subset);
        let n_y = ch.output_size();
        let table = |dists: &[&InputDistribution], a: f64| {
            let w = layout.outside.log_weights(dists);
            let mut t = Vec::with_capacity(layout.inside.len() * n_y);
            for &off_in in &layout.inside.offsets {
                for y in 0..n_y {
                    let mut acc = LogSum::new();
                    for (b, &off_out) in layout.outside.offsets.iter().enumerate() {
                        acc.add(w[b] + scale(ch.log_prob(off_in + off_out, y), a));
                    }
                    t.push(acc.value());
                }
            }
            t
        };
        let (ln_a, ln_b, ln_c) = match (params, out_dists.is_empty()) {
            (_, true) => (Vec::new(), Vec::new(), Vec::new()),
            (None, false) => {
                return Err(Error::Invalid(format!("missing threshold parameters for subset {subset}")));
            }
            (Some(p), false) => {
                let mut ln_a = Vec::with_capacity(out_dists.len());
                for d in out_dists {
                    ch.check_dists(d)?;
                    ln_a.push(table(d, 1.0));
                }
                (ln_a, table(r_dists, p.s2 / p.rho_tilde), table(r_dists, 1.0 - p.s1))
            }
        };
        let inside_users = layout.inside.users.clone();
        let inside_sizes = inside_users.iter().map(|&k| ch.input_sizes()[k]).collect();
        let rate_sum = (0..r_rates.len()).filter(|&k| !subset.contains(k)).map(|k| r_rates[k]).sum();
        Ok(Self {
            params: if out_dists.is_empty() { None } else { params },
            rate_sum,
            n_y,
            inside_users,
            inside_sizes,
            ln_a,
            ln_b,
            ln_c,
        })
    }

    /// `tau(y)` given the candidate's codewords of the users in `S`
    /// (indexed by user; other entries unused).
    pub(crate) fn tau(&self, y: &[u32], cand: &[&[u32]]) -> f64 {
        let Some(p) = self.params else {
            return f64::INFINITY;
        };
        let n = y.len();
        let mut ln_a = NEG_INF;
        let mut sums_a = alloc::vec![0.0; self.ln_a.len()];
        let (mut ln_b, mut ln_c) = (0.0, 0.0);
        for (j, &yj) in y.iter().enumerate() {
            let mut a = 0usize;
            for (&k, &size) in self.inside_users.iter().zip(&self.inside_sizes) {
                a = a * size + cand[k][j] as usize;
            }
            let cell = a * self.n_y + yj as usize;
            for (acc, t) in sums_a.iter_mut().zip(&self.ln_a) {
                *acc += t[cell];
            }
            ln_b += self.ln_b[cell];
            ln_c += self.ln_c[cell];
        }
        // worst out-of-region vector for this output
        for v in sums_a {
            if v > ln_a {
                ln_a = v;
            }
        }
        if ln_a == NEG_INF {
            return f64::INFINITY;
        }
        if ln_b == NEG_INF || ln_c == NEG_INF {
            return NEG_INF;
        }
        let nf = n as f64;
        let minus_n_tau = (ln_a + p.rho_tilde * ln_b + nf * p.rho_tilde * self.rate_sum - ln_c) / (p.s1 + p.s2);
        -minus_n_tau / nf + p.offset
    }
}

/// Typicality threshold `tau_{(r,S)}(y)` in nats per symbol.
///
/// `r_rates`/`r_dists` describe the decoded in-region vector, `out_dists`
/// every out-of-region vector agreeing with it on `S`, and `x_s` the
/// candidate's codewords of the users in `S` (indexed by user, other entries
/// ignored). Returns `+inf` when `out_dists` is empty.
#[allow(clippy::too_many_arguments)]
pub fn compute_threshold(
    ch: &Channel,
    subset: Subset,
    r_rates: &[f64],
    r_dists: &[&InputDistribution],
    out_dists: &[Vec<&InputDistribution>],
    tp: &ThresholdParams,
    y: &[u32],
    x_s: &[&[u32]],
) -> Result<f64> {
    for &yj in y {
        if yj as usize >= ch.output_size() {
            return Err(Error::Invalid(format!("output symbol {yj} out of range")));
        }
    }
    for k in (0..ch.num_users()).filter(|&k| subset.contains(k)) {
        let x = x_s.get(k).ok_or(Error::DimensionMismatch {
            what: "candidate codewords",
            expected: ch.num_users(),
            found: x_s.len(),
        })?;
        if x.len() != y.len() || x.iter().any(|&s| s as usize >= ch.input_sizes()[k]) {
            return Err(Error::Invalid(format!("bad candidate codeword for user {}", k + 1)));
        }
    }
    let t = SubsetThreshold::new(ch, subset, r_rates, r_dists, out_dists, Some(*tp))?;
    Ok(t.tau(y, x_s))
}
