//! Discrete memoryless multi-user channels, input distributions, rate menus
//! and operation regions, plus the mutual-information quantities that decide
//! whether an operation region is achievable.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math::{ln0, NEG_INF};

/// Largest supported number of users; subsets are enumerated as bitmasks.
pub const MAX_USERS: usize = 16;

/// Tolerance on probability-vector and row sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

fn check_probability(what: impl FnOnce() -> alloc::string::String, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability { what: what(), value: p });
    }
    Ok(())
}

/// K-user discrete memoryless channel `P(y | x_1, ..., x_K)`.
///
/// Rows are input tuples in lexicographic order of `(x_1, ..., x_K)` with
/// `x_1` most significant.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    input_sizes: Vec<usize>,
    output_size: usize,
    strides: Vec<usize>,
    transition: Vec<f64>,
    log_transition: Vec<f64>,
}

impl Channel {
    pub fn new(input_sizes: Vec<usize>, output_size: usize, transition: Vec<f64>) -> Result<Self> {
        if input_sizes.is_empty() {
            return Err(Error::Invalid("channel needs at least one user".into()));
        }
        if input_sizes.len() > MAX_USERS {
            return Err(Error::TooManyUsers {
                users: input_sizes.len(),
                max: MAX_USERS,
            });
        }
        if input_sizes.contains(&0) || output_size == 0 {
            return Err(Error::Invalid("alphabet sizes must be positive".into()));
        }
        if input_sizes.iter().any(|&s| s > u32::MAX as usize) {
            return Err(Error::Invalid("input alphabet too large".into()));
        }
        let rows = input_sizes
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::Invalid("input alphabet product overflows".into()))?;
        let expected = rows
            .checked_mul(output_size)
            .ok_or_else(|| Error::Invalid("transition tensor too large".into()))?;
        if transition.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "transition entries",
                expected,
                found: transition.len(),
            });
        }
        for row in 0..rows {
            let entries = &transition[row * output_size..(row + 1) * output_size];
            let mut sum = 0.0;
            for (y, &p) in entries.iter().enumerate() {
                check_probability(|| format!("P(y={y} | row {row})"), p)?;
                sum += p;
            }
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(Error::RowSum { row, sum });
            }
        }
        let mut strides = vec![1usize; input_sizes.len()];
        for k in (0..input_sizes.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * input_sizes[k + 1];
        }
        let log_transition = transition.iter().map(|&p| ln0(p)).collect();
        Ok(Self {
            input_sizes,
            output_size,
            strides,
            transition,
            log_transition,
        })
    }

    /// Single-user channel from a row-major `|X| x |Y|` matrix.
    pub fn single_user(rows: &[&[f64]]) -> Result<Self> {
        let output_size = rows.first().map_or(0, |r| r.len());
        let mut flat = Vec::with_capacity(rows.len() * output_size);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != output_size {
                return Err(Error::Invalid(format!("row {i} has {} entries, expected {output_size}", r.len())));
            }
            flat.extend_from_slice(r);
        }
        Self::new(vec![rows.len()], output_size, flat)
    }

    /// Binary symmetric channel with crossover probability `p`.
    pub fn bsc(p: f64) -> Result<Self> {
        Self::single_user(&[&[1.0 - p, p], &[p, 1.0 - p]])
    }

    /// Noiseless channel on an alphabet of `size` symbols.
    pub fn identity(size: usize) -> Result<Self> {
        let mut t = vec![0.0; size * size];
        for i in 0..size {
            t[i * size + i] = 1.0;
        }
        Self::new(vec![size], size, t)
    }

    pub fn num_users(&self) -> usize {
        self.input_sizes.len()
    }

    pub fn input_sizes(&self) -> &[usize] {
        &self.input_sizes
    }

    pub fn output_size(&self) -> usize {
        self.output_size
    }

    /// Number of input tuples.
    pub fn num_rows(&self) -> usize {
        self.transition.len() / self.output_size
    }

    pub fn stride(&self, user: usize) -> usize {
        self.strides[user]
    }

    /// Row index of an input tuple.
    pub fn row_index(&self, symbols: &[u32]) -> usize {
        symbols
            .iter()
            .zip(&self.strides)
            .map(|(&x, &st)| x as usize * st)
            .sum()
    }

    #[inline]
    pub fn prob(&self, row: usize, y: usize) -> f64 {
        self.transition[row * self.output_size + y]
    }

    #[inline]
    pub fn log_prob(&self, row: usize, y: usize) -> f64 {
        self.log_transition[row * self.output_size + y]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.transition[row * self.output_size..(row + 1) * self.output_size]
    }

    pub fn transition(&self) -> &[f64] {
        &self.transition
    }

    pub(crate) fn check_dists(&self, dists: &[&InputDistribution]) -> Result<()> {
        if dists.len() != self.num_users() {
            return Err(Error::DimensionMismatch {
                what: "per-user input distributions",
                expected: self.num_users(),
                found: dists.len(),
            });
        }
        for (k, d) in dists.iter().enumerate() {
            if d.len() != self.input_sizes[k] {
                return Err(Error::DimensionMismatch {
                    what: "input distribution length",
                    expected: self.input_sizes[k],
                    found: d.len(),
                });
            }
        }
        Ok(())
    }

    pub(crate) fn check_subset(&self, subset: Subset) -> Result<()> {
        let k = self.num_users();
        if subset.0 >> k != 0 {
            return Err(Error::Invalid(format!("subset {subset} names users beyond {k}")));
        }
        if subset == Subset::full(k) {
            return Err(Error::FullSubset);
        }
        Ok(())
    }

    /// Enumerate the input tuples of the users inside and outside `subset`.
    pub fn split(&self, subset: Subset) -> SubsetLayout {
        let inside: Vec<usize> = (0..self.num_users()).filter(|&k| subset.contains(k)).collect();
        let outside: Vec<usize> = (0..self.num_users()).filter(|&k| !subset.contains(k)).collect();
        SubsetLayout {
            inside: PartialTuples::enumerate(self, &inside),
            outside: PartialTuples::enumerate(self, &outside),
        }
    }
}

/// All joint symbol assignments of a group of users.
#[derive(Debug, Clone)]
pub struct PartialTuples {
    pub users: Vec<usize>,
    /// `symbols[t * users.len() + j]` is the symbol of `users[j]` in tuple `t`.
    pub symbols: Vec<u32>,
    /// Row offset contributed by each tuple.
    pub offsets: Vec<usize>,
}

impl PartialTuples {
    fn enumerate(ch: &Channel, users: &[usize]) -> Self {
        let count: usize = users.iter().map(|&k| ch.input_sizes[k]).product();
        let mut symbols = Vec::with_capacity(count * users.len());
        let mut offsets = Vec::with_capacity(count);
        let mut cur = vec![0u32; users.len()];
        for _ in 0..count {
            symbols.extend_from_slice(&cur);
            offsets.push(users.iter().zip(&cur).map(|(&k, &x)| x as usize * ch.strides[k]).sum());
            // odometer, last user fastest
            for j in (0..users.len()).rev() {
                cur[j] += 1;
                if (cur[j] as usize) < ch.input_sizes[users[j]] {
                    break;
                }
                cur[j] = 0;
            }
        }
        Self {
            users: users.to_vec(),
            symbols,
            offsets,
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    pub fn tuple(&self, t: usize) -> &[u32] {
        let w = self.users.len();
        &self.symbols[t * w..(t + 1) * w]
    }

    /// `sum_k ln P_k(x_k)` for every tuple, with `dists` indexed by user.
    pub fn log_weights(&self, dists: &[&InputDistribution]) -> Vec<f64> {
        (0..self.len())
            .map(|t| {
                self.tuple(t)
                    .iter()
                    .zip(&self.users)
                    .map(|(&x, &k)| dists[k].log_prob(x as usize))
                    .sum()
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct SubsetLayout {
    pub inside: PartialTuples,
    pub outside: PartialTuples,
}

/// Probability vector over one user's input alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct InputDistribution {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Invalid("input distribution is empty".into()));
        }
        let mut sum = 0.0;
        for (i, &p) in probs.iter().enumerate() {
            check_probability(|| format!("input probability {i}"), p)?;
            sum += p;
        }
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidProbability {
                what: "input distribution sum".into(),
                value: sum,
            });
        }
        let log_probs = probs.iter().map(|&p| ln0(p)).collect();
        Ok(Self { probs, log_probs })
    }

    pub fn uniform(size: usize) -> Self {
        Self::new(vec![1.0 / size as f64; size]).expect("uniform distribution is valid")
    }

    pub fn point_mass(size: usize, symbol: usize) -> Self {
        let mut p = vec![0.0; size];
        p[symbol] = 1.0;
        Self::new(p).expect("point mass is valid")
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn prob(&self, x: usize) -> f64 {
        self.probs[x]
    }

    #[inline]
    pub fn log_prob(&self, x: usize) -> f64 {
        self.log_probs[x]
    }

    /// Inverse-CDF sampling from a uniform variate in `[0, 1)`.
    pub fn sample(&self, u: f64) -> u32 {
        let mut acc = 0.0;
        let mut last = 0;
        for (i, &p) in self.probs.iter().enumerate() {
            if p > 0.0 {
                acc += p;
                last = i;
                if u < acc {
                    return i as u32;
                }
            }
        }
        last as u32
    }
}

/// One entry of a user's rate menu: a rate in nats per symbol and the input
/// distribution its codewords are drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct RatePoint {
    pub rate: f64,
    pub dist: InputDistribution,
}

impl RatePoint {
    pub fn new(rate: f64, dist: InputDistribution) -> Self {
        Self { rate, dist }
    }
}

/// Per-user rate menus.
#[derive(Debug, Clone, PartialEq)]
pub struct RateProfile {
    users: Vec<Vec<RatePoint>>,
}

impl RateProfile {
    pub fn new(users: Vec<Vec<RatePoint>>) -> Result<Self> {
        if users.is_empty() {
            return Err(Error::Invalid("rate profile has no users".into()));
        }
        if users.len() > MAX_USERS {
            return Err(Error::TooManyUsers {
                users: users.len(),
                max: MAX_USERS,
            });
        }
        for (k, points) in users.iter().enumerate() {
            if points.is_empty() {
                return Err(Error::EmptyRateProfile { user: k });
            }
            for p in points {
                if !(p.rate >= 0.0) || !p.rate.is_finite() {
                    return Err(Error::InvalidRate(p.rate));
                }
            }
            if points.windows(2).any(|w| !(w[0].rate < w[1].rate)) {
                return Err(Error::RatesNotIncreasing { user: k });
            }
        }
        Ok(Self { users })
    }

    pub fn single(points: Vec<RatePoint>) -> Result<Self> {
        Self::new(vec![points])
    }

    pub fn num_users(&self) -> usize {
        self.users.len()
    }

    pub fn user(&self, k: usize) -> &[RatePoint] {
        &self.users[k]
    }

    pub fn point(&self, user: usize, index: usize) -> &RatePoint {
        &self.users[user][index]
    }

    pub fn rates(&self, indices: &[usize]) -> Vec<f64> {
        indices.iter().enumerate().map(|(k, &i)| self.users[k][i].rate).collect()
    }

    pub fn dists(&self, indices: &[usize]) -> Vec<&InputDistribution> {
        indices.iter().enumerate().map(|(k, &i)| &self.users[k][i].dist).collect()
    }

    /// Every rate-index vector, lexicographic with user 1 most significant.
    pub fn all_vectors(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = vec![0usize; self.users.len()];
        loop {
            out.push(cur.clone());
            let mut j = self.users.len();
            loop {
                if j == 0 {
                    return out;
                }
                j -= 1;
                cur[j] += 1;
                if cur[j] < self.users[j].len() {
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    pub fn check_channel(&self, ch: &Channel) -> Result<()> {
        if self.num_users() != ch.num_users() {
            return Err(Error::DimensionMismatch {
                what: "users in rate profile",
                expected: ch.num_users(),
                found: self.num_users(),
            });
        }
        for (k, points) in self.users.iter().enumerate() {
            for p in points {
                if p.dist.len() != ch.input_sizes()[k] {
                    return Err(Error::DimensionMismatch {
                        what: "input distribution length",
                        expected: ch.input_sizes()[k],
                        found: p.dist.len(),
                    });
                }
            }
        }
        Ok(())
    }
}

/// The set of rate-index vectors the receiver intends to decode.
#[derive(Debug, Clone, PartialEq)]
pub struct OperationRegion {
    members: Vec<Vec<usize>>,
    lookup: BTreeSet<Vec<usize>>,
}

impl OperationRegion {
    pub fn new(members: Vec<Vec<usize>>, profile: &RateProfile) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::EmptyRegion);
        }
        let mut lookup = BTreeSet::new();
        for (m, v) in members.iter().enumerate() {
            if v.len() != profile.num_users() {
                return Err(Error::BadRegionMember {
                    member: m,
                    reason: format!("has {} entries for {} users", v.len(), profile.num_users()),
                });
            }
            for (k, &i) in v.iter().enumerate() {
                if i >= profile.user(k).len() {
                    return Err(Error::BadRegionMember {
                        member: m,
                        reason: format!("index {i} out of range for user {}", k + 1),
                    });
                }
            }
            if !lookup.insert(v.clone()) {
                return Err(Error::BadRegionMember {
                    member: m,
                    reason: "duplicate".into(),
                });
            }
        }
        Ok(Self { members, lookup })
    }

    /// Single-user region from rate indices.
    pub fn single(indices: &[usize], profile: &RateProfile) -> Result<Self> {
        Self::new(indices.iter().map(|&i| vec![i]).collect(), profile)
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, v: &[usize]) -> bool {
        self.lookup.contains(v)
    }

    /// Rate vectors of the profile not in the region, lexicographic.
    pub fn complement(&self, profile: &RateProfile) -> Vec<Vec<usize>> {
        profile
            .all_vectors()
            .into_iter()
            .filter(|v| !self.contains(v))
            .collect()
    }

    /// Rate indices per user that appear in some member.
    pub fn classes_in_use(&self, user: usize) -> BTreeSet<usize> {
        self.members.iter().map(|v| v[user]).collect()
    }
}

/// A set of users as a bitmask; bit `k` is user `k` (zero based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Subset(pub u32);

impl Subset {
    pub const EMPTY: Subset = Subset(0);

    pub fn full(users: usize) -> Self {
        Subset(((1u64 << users) - 1) as u32)
    }

    pub fn from_users(users: &[usize]) -> Self {
        Subset(users.iter().fold(0, |m, &k| m | (1 << k)))
    }

    #[inline]
    pub fn contains(self, user: usize) -> bool {
        self.0 >> user & 1 == 1
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// All proper subsets of `users` users, including the empty set, by mask.
    pub fn proper_subsets(users: usize) -> impl Iterator<Item = Subset> {
        let full = Subset::full(users).0;
        (0..full).map(Subset)
    }

    /// Do `a` and `b` agree on every user in the subset?
    pub fn agree(self, a: &[usize], b: &[usize]) -> bool {
        a.iter()
            .zip(b)
            .enumerate()
            .all(|(k, (x, y))| !self.contains(k) || x == y)
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for k in 0..32 {
            if self.contains(k) {
                if !first {
                    f.write_str(",")?;
                }
                write!(f, "{}", k + 1)?;
                first = false;
            }
        }
        f.write_str("}")
    }
}

/// `I(X;Y)` in nats for a single-user channel.
pub fn mutual_information(ch: &Channel, dist: &InputDistribution) -> Result<f64> {
    if ch.num_users() != 1 {
        return Err(Error::NotSingleUser { users: ch.num_users() });
    }
    conditional_mutual_information(ch, &[dist], Subset::EMPTY)
}

/// `I(X_{S^c}; Y | X_S)` in nats under independent inputs.
pub fn conditional_mutual_information(
    ch: &Channel,
    dists: &[&InputDistribution],
    subset: Subset,
) -> Result<f64> {
    ch.check_dists(dists)?;
    ch.check_subset(subset)?;
    let layout = ch.split(subset);
    let w_in = layout.inside.log_weights(dists);
    let w_out = layout.outside.log_weights(dists);
    let mut total = 0.0;
    for (a, &off_a) in layout.inside.offsets.iter().enumerate() {
        let pa = crate::math::exp(w_in[a]);
        if pa == 0.0 {
            continue;
        }
        for y in 0..ch.output_size() {
            // P(y | x_S)
            let mut marg = 0.0;
            for (b, &off_b) in layout.outside.offsets.iter().enumerate() {
                marg += crate::math::exp(w_out[b]) * ch.prob(off_a + off_b, y);
            }
            if marg == 0.0 {
                continue;
            }
            let log_marg = crate::math::ln(marg);
            for (b, &off_b) in layout.outside.offsets.iter().enumerate() {
                let p = ch.prob(off_a + off_b, y);
                if p == 0.0 {
                    continue;
                }
                let pb = crate::math::exp(w_out[b]);
                total += pa * pb * p * (crate::math::ln(p) - log_marg);
            }
        }
    }
    // rounding can leave a tiny negative value for useless channels
    Ok(if total < 0.0 && total > -1e-15 { 0.0 } else { total })
}

/// One failed achievability condition.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub member: Vec<usize>,
    pub subset: Subset,
    /// `sum_{k not in S} r_k`
    pub rate_sum: f64,
    /// `I(X_{S^c}; Y | X_S)`
    pub information: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Achievability {
    pub achievable: bool,
    pub violations: Vec<Violation>,
}

/// Check `sum_{k not in S} r_k < I(X_{S^c}; Y | X_S)` for every rate vector
/// and every proper subset `S`.
pub fn vector_violations(ch: &Channel, profile: &RateProfile, v: &[usize]) -> Result<Vec<Violation>> {
    profile.check_channel(ch)?;
    let dists = profile.dists(v);
    let rates = profile.rates(v);
    let mut out = Vec::new();
    for subset in Subset::proper_subsets(ch.num_users()) {
        let rate_sum: f64 = (0..rates.len()).filter(|&k| !subset.contains(k)).map(|k| rates[k]).sum();
        let information = conditional_mutual_information(ch, &dists, subset)?;
        if !(rate_sum < information) {
            out.push(Violation {
                member: v.to_vec(),
                subset,
                rate_sum,
                information,
            });
        }
    }
    Ok(out)
}

pub fn region_is_achievable(
    ch: &Channel,
    profile: &RateProfile,
    region: &OperationRegion,
) -> Result<Achievability> {
    let mut violations = Vec::new();
    for v in region.members() {
        violations.extend(vector_violations(ch, profile, v)?);
    }
    Ok(Achievability {
        achievable: violations.is_empty(),
        violations,
    })
}

/// Joint log-likelihood `sum_j ln P(y_j | x_j)` of a symbol-row sequence.
pub fn sequence_log_likelihood(ch: &Channel, rows: &[usize], y: &[u32]) -> f64 {
    let mut ll = 0.0;
    for (&row, &yj) in rows.iter().zip(y) {
        let lp = ch.log_prob(row, yj as usize);
        if lp == NEG_INF {
            return NEG_INF;
        }
        ll += lp;
    }
    ll
}
