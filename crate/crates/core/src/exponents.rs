//! Achievable exponents of the random coding ensemble.
//!
//! Every exponent here has the form `max_{rho,s} -rho R - ln sum_y (...)`
//! over either the square `0<rho<=1, 0<s<=1` (missed-decoding type `Em`) or
//! the triangle `0<s<=1-rho` (threshold-crossing type `Ei`). The single-user
//! versions are the `K = 1`, `S = {}` case of the multi-user ones, and those
//! in turn are the one-representative case of the grid-rate versions, so all
//! of them share one evaluator.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::channel::{Channel, InputDistribution, OperationRegion, RatePoint, RateProfile, Subset};
use crate::error::{Error, Result};
use crate::math::{scale, LogSum};
use crate::optimize::{maximize, Domain};

pub use crate::optimize::OptimizerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExponentKind {
    Em,
    Ei,
    EmTilde,
    EiTilde,
}

impl ExponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExponentKind::Em => "Em",
            ExponentKind::Ei => "Ei",
            ExponentKind::EmTilde => "EmTilde",
            ExponentKind::EiTilde => "EiTilde",
        }
    }

    fn domain(self) -> Domain {
        match self {
            ExponentKind::Em | ExponentKind::EmTilde => Domain::Square,
            ExponentKind::Ei | ExponentKind::EiTilde => Domain::Triangle,
        }
    }

    fn is_missed(self) -> bool {
        matches!(self, ExponentKind::Em | ExponentKind::EmTilde)
    }
}

impl fmt::Display for ExponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Exponent value together with the `(rho, s)` it was evaluated at.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentResult {
    pub value: f64,
    pub rho_star: f64,
    pub s_star: f64,
    pub kind: ExponentKind,
}

/// The objective of one exponent as a function of `(rho, s)`.
///
/// Missed-decoding form:
/// `-rho R - ln sum_y sum_{x_S} w(x_S) [sum_{x_S^c} w1 P^{1-s}] min_c [sum_{x_S^c} w_c P^{s/rho}]^rho`.
///
/// Threshold form:
/// `-rho R - ln sum_y sum_{x_S} w(x_S) [sum_{x_S^c} w1 P]^{1-s} min_c [sum_{x_S^c} w_c P^{s/(s+rho)}]^{s+rho}`.
#[derive(Debug, Clone)]
pub struct Objective {
    kind: ExponentKind,
    rate_sum: f64,
    n_in: usize,
    n_out: usize,
    n_y: usize,
    /// `lp[(a * n_y + y) * n_out + b]`
    lp: Vec<f64>,
    w_outer: Vec<f64>,
    w_single: Vec<f64>,
    w_cands: Vec<Vec<f64>>,
    /// threshold form: `ln sum_b w1 P` per `(a, y)`
    single_full: Vec<f64>,
}

impl Objective {
    /// `outer` supplies the users in `S`, `single` the unmatched bracket and
    /// each entry of `cands` one candidate for the minimized bracket. All are
    /// full per-user vectors; entries that do not apply are ignored.
    pub fn new(
        ch: &Channel,
        kind: ExponentKind,
        subset: Subset,
        rate_sum: f64,
        outer: &[&InputDistribution],
        single: &[&InputDistribution],
        cands: &[Vec<&InputDistribution>],
    ) -> Result<Self> {
        ch.check_subset(subset)?;
        ch.check_dists(outer)?;
        ch.check_dists(single)?;
        if cands.is_empty() {
            return Err(Error::EmptyRepresentativeSet);
        }
        for c in cands {
            ch.check_dists(c)?;
        }
        if !(rate_sum >= 0.0) || !rate_sum.is_finite() {
            return Err(Error::InvalidRate(rate_sum));
        }
        let layout = ch.split(subset);
        let n_in = layout.inside.len();
        let n_out = layout.outside.len();
        let n_y = ch.output_size();
        let mut lp = Vec::with_capacity(n_in * n_y * n_out);
        for &off_a in &layout.inside.offsets {
            for y in 0..n_y {
                for &off_b in &layout.outside.offsets {
                    lp.push(ch.log_prob(off_a + off_b, y));
                }
            }
        }
        let w_outer = layout.inside.log_weights(outer);
        let w_single = layout.outside.log_weights(single);
        let w_cands = cands.iter().map(|c| layout.outside.log_weights(c)).collect();
        let mut obj = Self {
            kind,
            rate_sum,
            n_in,
            n_out,
            n_y,
            lp,
            w_outer,
            w_single,
            w_cands,
            single_full: Vec::new(),
        };
        if !kind.is_missed() {
            let mut full = Vec::with_capacity(n_in * n_y);
            for cell in 0..n_in * n_y {
                full.push(obj.bracket(cell, &obj.w_single, 1.0));
            }
            obj.single_full = full;
        }
        Ok(obj)
    }

    pub fn kind(&self) -> ExponentKind {
        self.kind
    }

    pub fn domain(&self) -> Domain {
        self.kind.domain()
    }

    #[inline]
    fn bracket(&self, cell: usize, w: &[f64], a: f64) -> f64 {
        let row = &self.lp[cell * self.n_out..(cell + 1) * self.n_out];
        let mut acc = LogSum::new();
        for (lp, wb) in row.iter().zip(w) {
            acc.add(wb + scale(*lp, a));
        }
        acc.value()
    }

    /// Objective value at `(rho, s)`.
    pub fn eval(&self, rho: f64, s: f64) -> f64 {
        let mut total = LogSum::new();
        let missed = self.kind.is_missed();
        for a in 0..self.n_in {
            for y in 0..self.n_y {
                let cell = a * self.n_y + y;
                let (first, inner, outer_pow) = if missed {
                    (self.bracket(cell, &self.w_single, 1.0 - s), s / rho, rho)
                } else {
                    (scale(self.single_full[cell], 1.0 - s), s / (s + rho), s + rho)
                };
                let mut second = f64::INFINITY;
                for w in &self.w_cands {
                    let v = scale(self.bracket(cell, w, inner), outer_pow);
                    if v < second {
                        second = v;
                    }
                }
                total.add(self.w_outer[a] + first + second);
            }
        }
        -rho * self.rate_sum - total.value()
    }

    pub fn maximize(&self, cfg: &OptimizerConfig) -> Result<ExponentResult> {
        cfg.validate()?;
        let m = maximize(&|r, s| self.eval(r, s), self.domain(), cfg);
        Ok(ExponentResult {
            value: m.value,
            rho_star: m.rho,
            s_star: m.s,
            kind: self.kind,
        })
    }
}

fn rate_sum(rates: &[f64], subset: Subset) -> f64 {
    rates
        .iter()
        .enumerate()
        .filter(|&(k, _)| !subset.contains(k))
        .map(|(_, &r)| r)
        .sum()
}

fn check_rates(rates: &[f64], users: usize) -> Result<()> {
    if rates.len() != users {
        return Err(Error::DimensionMismatch {
            what: "per-user rates",
            expected: users,
            found: rates.len(),
        });
    }
    Ok(())
}

fn require_single(ch: &Channel) -> Result<()> {
    if ch.num_users() != 1 {
        return Err(Error::NotSingleUser { users: ch.num_users() });
    }
    Ok(())
}

/// Objective of the grid-rate missed-decoding exponent. `r_dists` are the
/// transmitted distributions; `reps` the in-region representatives of the
/// competing grid cell, which agree with `r_dists` on `S`.
pub fn em_tilde_objective(
    ch: &Channel,
    subset: Subset,
    r_dists: &[&InputDistribution],
    grid_rates: &[f64],
    reps: &[Vec<&InputDistribution>],
) -> Result<Objective> {
    check_rates(grid_rates, ch.num_users())?;
    Objective::new(ch, ExponentKind::EmTilde, subset, rate_sum(grid_rates, subset), r_dists, r_dists, reps)
}

/// Objective of the grid-rate threshold exponent. `reps` are the in-region
/// representatives of the decoded grid cell (they supply the users in `S`),
/// `rprime_dists` the transmitted out-of-region vector.
pub fn ei_tilde_objective(
    ch: &Channel,
    subset: Subset,
    grid_rates: &[f64],
    reps: &[Vec<&InputDistribution>],
    rprime_dists: &[&InputDistribution],
) -> Result<Objective> {
    check_rates(grid_rates, ch.num_users())?;
    let outer = reps.first().ok_or(Error::EmptyRepresentativeSet)?;
    Objective::new(ch, ExponentKind::EiTilde, subset, rate_sum(grid_rates, subset), outer, rprime_dists, reps)
}

pub fn em_multi_objective(
    ch: &Channel,
    subset: Subset,
    r_dists: &[&InputDistribution],
    rtilde: &[f64],
    rtilde_dists: &[&InputDistribution],
) -> Result<Objective> {
    let mut o = em_tilde_objective(ch, subset, r_dists, rtilde, &[rtilde_dists.to_vec()])?;
    o.kind = ExponentKind::Em;
    Ok(o)
}

pub fn ei_multi_objective(
    ch: &Channel,
    subset: Subset,
    r: &[f64],
    r_dists: &[&InputDistribution],
    rprime_dists: &[&InputDistribution],
) -> Result<Objective> {
    let mut o = ei_tilde_objective(ch, subset, r, &[r_dists.to_vec()], rprime_dists)?;
    o.kind = ExponentKind::Ei;
    Ok(o)
}

/// Single-user missed-decoding exponent `E_m(rtilde, P_r, P_rtilde)`.
pub fn em_single(
    ch: &Channel,
    r_dist: &InputDistribution,
    rtilde: f64,
    rtilde_dist: &InputDistribution,
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    require_single(ch)?;
    em_multi(ch, Subset::EMPTY, &[r_dist], &[rtilde], &[rtilde_dist], cfg)
}

/// Single-user threshold exponent `E_i(r, P_r, P_rtilde)`.
pub fn ei_single(
    ch: &Channel,
    r: f64,
    r_dist: &InputDistribution,
    rtilde_dist: &InputDistribution,
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    require_single(ch)?;
    ei_multi(ch, Subset::EMPTY, &[r], &[r_dist], &[rtilde_dist], cfg)
}

/// Multi-user missed-decoding exponent. Vectors are indexed by user; the
/// entries of `rtilde` for users in `S` are ignored.
pub fn em_multi(
    ch: &Channel,
    subset: Subset,
    r_dists: &[&InputDistribution],
    rtilde: &[f64],
    rtilde_dists: &[&InputDistribution],
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    em_multi_objective(ch, subset, r_dists, rtilde, rtilde_dists)?.maximize(cfg)
}

/// Multi-user threshold exponent. Entries of `r` for users in `S` are
/// ignored.
pub fn ei_multi(
    ch: &Channel,
    subset: Subset,
    r: &[f64],
    r_dists: &[&InputDistribution],
    rprime_dists: &[&InputDistribution],
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    ei_multi_objective(ch, subset, r, r_dists, rprime_dists)?.maximize(cfg)
}

pub fn em_tilde(
    ch: &Channel,
    subset: Subset,
    r_dists: &[&InputDistribution],
    grid_rates: &[f64],
    reps: &[Vec<&InputDistribution>],
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    em_tilde_objective(ch, subset, r_dists, grid_rates, reps)?.maximize(cfg)
}

pub fn ei_tilde(
    ch: &Channel,
    subset: Subset,
    grid_rates: &[f64],
    reps: &[Vec<&InputDistribution>],
    rprime_dists: &[&InputDistribution],
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    ei_tilde_objective(ch, subset, grid_rates, reps, rprime_dists)?.maximize(cfg)
}

/// Maximize over `(rho, s)` the smallest threshold objective across several
/// transmitted out-of-region vectors. With one vector this is `ei_multi`.
pub fn ei_max_min(
    ch: &Channel,
    subset: Subset,
    r: &[f64],
    r_dists: &[&InputDistribution],
    rprime_dists: &[Vec<&InputDistribution>],
    cfg: &OptimizerConfig,
) -> Result<ExponentResult> {
    cfg.validate()?;
    let objs = rprime_dists
        .iter()
        .map(|d| ei_multi_objective(ch, subset, r, r_dists, d))
        .collect::<Result<Vec<_>>>()?;
    if objs.is_empty() {
        return Err(Error::EmptyRepresentativeSet);
    }
    let f = |rho: f64, s: f64| {
        objs.iter()
            .map(|o| o.eval(rho, s))
            .fold(f64::INFINITY, f64::min)
    };
    let m = maximize(&f, Domain::Triangle, cfg);
    Ok(ExponentResult {
        value: m.value,
        rho_star: m.rho,
        s_star: m.s,
        kind: ExponentKind::Ei,
    })
}

/// Identifies one exponent term of a bound.
///
/// For `Em`: `cond` is the transmitted vector `r`, `other` the competing
/// in-region vector. For `Ei`: `cond` is the decoded in-region vector,
/// `other` the transmitted out-of-region vector. For `EmTilde`: `cond` is
/// `r`, `other` the competing grid-cell vector. For `EiTilde`: `cond` is the
/// decoded grid-cell vector, `other` the transmitted out-of-region vector.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    pub kind: ExponentKind,
    pub subset: Subset,
    pub cond: Vec<usize>,
    pub other: Vec<usize>,
}

/// All exponent terms a region needs, computed once.
#[derive(Debug, Clone, Default)]
pub struct ExponentTable {
    entries: BTreeMap<PairKey, ExponentResult>,
}

/// Lower bound on the system error exponent with the term attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct EsLower {
    pub value: f64,
    pub witness: PairKey,
    pub result: ExponentResult,
}

impl ExponentTable {
    /// Terms for discrete rate menus: `Em` over in-region pairs agreeing on
    /// `S`, `Ei` over (in-region, out-of-region) pairs agreeing on `S`.
    pub fn for_region(
        ch: &Channel,
        profile: &RateProfile,
        region: &OperationRegion,
        cfg: &OptimizerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        profile.check_channel(ch)?;
        let out = region.complement(profile);
        let mut entries = BTreeMap::new();
        for subset in Subset::proper_subsets(ch.num_users()) {
            for r in region.members() {
                let rd = profile.dists(r);
                for rt in region.members().iter().filter(|v| subset.agree(r, v)) {
                    let res = em_multi(ch, subset, &rd, &profile.rates(rt), &profile.dists(rt), cfg)?;
                    entries.insert(
                        PairKey {
                            kind: ExponentKind::Em,
                            subset,
                            cond: r.clone(),
                            other: rt.clone(),
                        },
                        res,
                    );
                }
                for rp in out.iter().filter(|v| subset.agree(r, v)) {
                    let res = ei_multi(ch, subset, &profile.rates(r), &rd, &profile.dists(rp), cfg)?;
                    entries.insert(
                        PairKey {
                            kind: ExponentKind::Ei,
                            subset,
                            cond: r.clone(),
                            other: rp.clone(),
                        },
                        res,
                    );
                }
            }
        }
        Ok(Self { entries })
    }

    /// Terms for grid rates. Grid cells with no in-region representative
    /// for a term are skipped.
    pub fn for_grid(
        ch: &Channel,
        grid: &GridProfile,
        region: &OperationRegion,
        cfg: &OptimizerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let (profile, _) = grid.flatten()?;
        profile.check_channel(ch)?;
        let out = region.complement(&profile);
        let cell_vectors = grid.cell_vectors();
        let mut entries = BTreeMap::new();
        for subset in Subset::proper_subsets(ch.num_users()) {
            for r in region.members() {
                let ur = grid.cells_of(r);
                let rd = profile.dists(r);
                for cv in cell_vectors.iter().filter(|c| subset.agree(&ur, c)) {
                    let reps: Vec<Vec<&InputDistribution>> = region
                        .members()
                        .iter()
                        .filter(|v| subset.agree(r, v) && grid.cells_of(v) == *cv)
                        .map(|v| profile.dists(v))
                        .collect();
                    if reps.is_empty() {
                        continue;
                    }
                    let res = em_tilde(ch, subset, &rd, &grid.grid_rates_of(cv), &reps, cfg)?;
                    entries.insert(
                        PairKey {
                            kind: ExponentKind::EmTilde,
                            subset,
                            cond: r.clone(),
                            other: cv.clone(),
                        },
                        res,
                    );
                }
            }
            for rp in &out {
                for cv in &cell_vectors {
                    let key = PairKey {
                        kind: ExponentKind::EiTilde,
                        subset,
                        cond: cv.clone(),
                        other: rp.clone(),
                    };
                    if entries.contains_key(&key) {
                        continue;
                    }
                    let reps: Vec<Vec<&InputDistribution>> = region
                        .members()
                        .iter()
                        .filter(|v| subset.agree(rp, v) && grid.cells_of(v) == *cv)
                        .map(|v| profile.dists(v))
                        .collect();
                    if reps.is_empty() {
                        continue;
                    }
                    let res = ei_tilde(ch, subset, &grid.grid_rates_of(cv), &reps, &profile.dists(rp), cfg)?;
                    entries.insert(key, res);
                }
            }
        }
        Ok(Self { entries })
    }

    pub fn get(&self, key: &PairKey) -> Option<&ExponentResult> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PairKey, &ExponentResult)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest exponent in the table; first in key order on ties.
    pub fn es_lower(&self) -> Result<EsLower> {
        let mut best: Option<(&PairKey, &ExponentResult)> = None;
        for (k, v) in &self.entries {
            if best.is_none_or(|(_, b)| v.value < b.value) {
                best = Some((k, v));
            }
        }
        let (k, v) = best.ok_or(Error::EmptyRegion)?;
        Ok(EsLower {
            value: v.value,
            witness: k.clone(),
            result: *v,
        })
    }
}

/// System error exponent lower bound for a single-user system.
pub fn es_lower_single(
    ch: &Channel,
    profile: &RateProfile,
    region: &OperationRegion,
    cfg: &OptimizerConfig,
) -> Result<EsLower> {
    require_single(ch)?;
    es_lower_multi(ch, profile, region, cfg)
}

/// System error exponent lower bound over all subsets and agreeing pairs.
pub fn es_lower_multi(
    ch: &Channel,
    profile: &RateProfile,
    region: &OperationRegion,
    cfg: &OptimizerConfig,
) -> Result<EsLower> {
    ExponentTable::for_region(ch, profile, region, cfg)?.es_lower()
}

/// One user's rate grid: cell `i` holds the rate points whose rates lie in
/// `(grid_rates[i-1], grid_rates[i]]`, the first cell starting below zero.
#[derive(Debug, Clone, PartialEq)]
pub struct UserGrid {
    pub grid_rates: Vec<f64>,
    pub cells: Vec<Vec<RatePoint>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    pub users: Vec<UserGrid>,
    cell_of: Vec<Vec<usize>>,
}

impl GridProfile {
    pub fn new(users: Vec<UserGrid>) -> Result<Self> {
        let mut cell_of = Vec::with_capacity(users.len());
        for (k, g) in users.iter().enumerate() {
            let bad = |reason: &str| Error::InvalidGrid {
                user: k,
                reason: reason.into(),
            };
            if g.grid_rates.is_empty() {
                return Err(bad("no grid rates"));
            }
            if g.grid_rates.len() != g.cells.len() {
                return Err(bad("one representative list per grid rate is required"));
            }
            if g.grid_rates.iter().any(|r| !(*r >= 0.0) || !r.is_finite()) {
                return Err(bad("grid rates must be finite and non-negative"));
            }
            if g.grid_rates.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(bad("grid rates must be strictly increasing"));
            }
            let mut map = Vec::new();
            for (i, cell) in g.cells.iter().enumerate() {
                let lo = if i == 0 { f64::NEG_INFINITY } else { g.grid_rates[i - 1] };
                for p in cell {
                    if !(p.rate > lo && p.rate <= g.grid_rates[i]) {
                        return Err(bad("representative rate outside its cell"));
                    }
                    map.push(i);
                }
            }
            if map.is_empty() {
                return Err(bad("no representatives"));
            }
            cell_of.push(map);
        }
        let grid = Self { users, cell_of };
        grid.flatten()?;
        Ok(grid)
    }

    /// Every representative as one rate menu per user, in cell order.
    pub fn flatten(&self) -> Result<(RateProfile, Vec<Vec<usize>>)> {
        let users = self
            .users
            .iter()
            .map(|g| g.cells.iter().flatten().cloned().collect())
            .collect();
        Ok((RateProfile::new(users)?, self.cell_of.clone()))
    }

    /// Grid cell of each user's rate point.
    pub fn cells_of(&self, v: &[usize]) -> Vec<usize> {
        v.iter().enumerate().map(|(k, &i)| self.cell_of[k][i]).collect()
    }

    pub fn grid_rates_of(&self, cells: &[usize]) -> Vec<f64> {
        cells
            .iter()
            .enumerate()
            .map(|(k, &c)| self.users[k].grid_rates[c])
            .collect()
    }

    /// All grid-cell vectors, lexicographic.
    pub fn cell_vectors(&self) -> Vec<Vec<usize>> {
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
                if cur[j] < self.users[j].cells.len() {
                    break;
                }
                cur[j] = 0;
            }
        }
    }

    /// Grid with one cell per rate point, the point itself as representative.
    pub fn from_profile(profile: &RateProfile) -> Result<Self> {
        let users = (0..profile.num_users())
            .map(|k| UserGrid {
                grid_rates: profile.user(k).iter().map(|p| p.rate).collect(),
                cells: profile.user(k).iter().map(|p| vec![p.clone()]).collect(),
            })
            .collect();
        Self::new(users)
    }
}
