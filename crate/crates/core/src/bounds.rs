//! System error probability upper bounds at a given codeword length.
//!
//! A [`Bound`] is prepared once per configuration: it computes every
//! exponent the bound needs and records how they combine. Evaluating it at
//! a length `n` then only exponentiates and sums, all in the log domain.

use alloc::vec::Vec;
use core::fmt;

use crate::channel::{Channel, OperationRegion, RateProfile, Subset};
use crate::error::{Error, Result};
use crate::exponents::{ExponentKind, ExponentTable, GridProfile, OptimizerConfig, PairKey};
use crate::math::{exp, LogSum, NEG_INF};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    /// In-region transmissions: decoding errors.
    Decode,
    /// Out-of-region transmissions: missed collisions.
    Collision,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Decode => "decode",
            Branch::Collision => "collision",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One additive term `exp(-n E)` of the bound. Where the bound takes a
/// maximum over several terms only the selected one is listed.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTerm {
    pub branch: Branch,
    /// Index of the sum (one per conditioning rate vector) within the branch.
    pub group: usize,
    pub key: PairKey,
    pub exponent: f64,
    pub log_value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub n: u64,
    pub p_es_upper: f64,
    pub log_p_es_upper: f64,
    pub log_decode: f64,
    /// `-inf` when every rate vector is in the region.
    pub log_collision: f64,
    pub collision_vacuous: bool,
    pub trivial: bool,
    pub breakdown: Vec<BoundTerm>,
}

impl BoundResult {
    /// Branch with the larger log value; decode on ties.
    pub fn dominating_branch(&self) -> Branch {
        if self.log_collision > self.log_decode {
            Branch::Collision
        } else {
            Branch::Decode
        }
    }

    /// Rebuild the log bound from the breakdown alone.
    pub fn recombine(&self) -> f64 {
        let branch_value = |b: Branch| {
            let mut best = NEG_INF;
            let mut group = None;
            let mut acc = LogSum::new();
            for t in self.breakdown.iter().filter(|t| t.branch == b) {
                if group != Some(t.group) {
                    if group.is_some() {
                        best = best.max(acc.value());
                    }
                    acc = LogSum::new();
                    group = Some(t.group);
                }
                acc.add(t.log_value);
            }
            if group.is_some() {
                best = best.max(acc.value());
            }
            best
        };
        branch_value(Branch::Decode).max(branch_value(Branch::Collision))
    }
}

#[derive(Debug, Clone)]
enum Part {
    Term(PairKey),
    /// Largest of the terms; contributes nothing when empty.
    Max(Vec<PairKey>),
}

/// Prepared bound: exponents plus the sum/max structure over them.
#[derive(Debug, Clone)]
pub struct Bound {
    table: ExponentTable,
    decode: Vec<Vec<Part>>,
    collision: Vec<Vec<Part>>,
    collision_vacuous: bool,
}

fn key(kind: ExponentKind, subset: Subset, cond: &[usize], other: &[usize]) -> PairKey {
    PairKey {
        kind,
        subset,
        cond: cond.to_vec(),
        other: other.to_vec(),
    }
}

impl Bound {
    /// Single-user bound: the larger of
    /// `max_{r in R} [sum_{r~ in R} e^{-n Em(r~)} + max_{r~ notin R} e^{-n Ei(r, r~)}]`
    /// and `sum_{r in R} max_{r~ notin R} e^{-n Ei(r, r~)}`.
    pub fn single(ch: &Channel, profile: &RateProfile, region: &OperationRegion, cfg: &OptimizerConfig) -> Result<Self> {
        if ch.num_users() != 1 {
            return Err(Error::NotSingleUser { users: ch.num_users() });
        }
        let table = ExponentTable::for_region(ch, profile, region, cfg)?;
        let out = region.complement(profile);
        let s = Subset::EMPTY;
        let ei_max = |r: &[usize]| Part::Max(out.iter().map(|o| key(ExponentKind::Ei, s, r, o)).collect());
        let decode = region
            .members()
            .iter()
            .map(|r| {
                let mut parts: Vec<Part> = region
                    .members()
                    .iter()
                    .map(|rt| Part::Term(key(ExponentKind::Em, s, r, rt)))
                    .collect();
                parts.push(ei_max(r));
                parts
            })
            .collect();
        let collision = alloc::vec![region.members().iter().map(|r| ei_max(r)).collect()];
        Ok(Self {
            table,
            decode,
            collision,
            collision_vacuous: out.is_empty(),
        })
    }

    /// Multi-user bound with subset sums over agreeing rate vectors.
    pub fn multi(ch: &Channel, profile: &RateProfile, region: &OperationRegion, cfg: &OptimizerConfig) -> Result<Self> {
        let table = ExponentTable::for_region(ch, profile, region, cfg)?;
        let out = region.complement(profile);
        let subsets: Vec<Subset> = Subset::proper_subsets(ch.num_users()).collect();
        let ei_max = |s: Subset, r: &[usize], anchor: &[usize]| {
            Part::Max(
                out.iter()
                    .filter(|o| s.agree(anchor, o))
                    .map(|o| key(ExponentKind::Ei, s, r, o))
                    .collect(),
            )
        };
        let mut decode = Vec::new();
        for r in region.members() {
            let mut parts = Vec::new();
            for &s in &subsets {
                for rt in region.members().iter().filter(|v| s.agree(r, v)) {
                    parts.push(Part::Term(key(ExponentKind::Em, s, r, rt)));
                }
                parts.push(ei_max(s, r, r));
            }
            decode.push(parts);
        }
        let mut collision = Vec::new();
        for rt in &out {
            let mut parts = Vec::new();
            for &s in &subsets {
                for r in region.members().iter().filter(|v| s.agree(rt, v)) {
                    parts.push(ei_max(s, r, rt));
                }
            }
            collision.push(parts);
        }
        Ok(Self {
            table,
            decode,
            collision,
            collision_vacuous: out.is_empty(),
        })
    }

    /// Grid-rate bound. `region` indexes the flattened representatives of
    /// `grid`. Grid vectors without an in-region representative are skipped.
    pub fn standard(ch: &Channel, grid: &GridProfile, region: &OperationRegion, cfg: &OptimizerConfig) -> Result<Self> {
        let table = ExponentTable::for_grid(ch, grid, region, cfg)?;
        let (profile, _) = grid.flatten()?;
        let out = region.complement(&profile);
        let cells = grid.cell_vectors();
        let subsets: Vec<Subset> = Subset::proper_subsets(ch.num_users()).collect();
        let ei_max = |s: Subset, cv: &[usize], anchor: &[usize]| {
            Part::Max(
                out.iter()
                    .filter(|o| s.agree(anchor, o))
                    .map(|o| key(ExponentKind::EiTilde, s, cv, o))
                    .filter(|k| table.get(k).is_some())
                    .collect(),
            )
        };
        let mut decode = Vec::new();
        for r in region.members() {
            let ur = grid.cells_of(r);
            let mut parts = Vec::new();
            for &s in &subsets {
                for cv in cells.iter().filter(|c| s.agree(&ur, c)) {
                    let k = key(ExponentKind::EmTilde, s, r, cv);
                    if table.get(&k).is_some() {
                        parts.push(Part::Term(k));
                    }
                }
                parts.push(ei_max(s, &ur, r));
            }
            decode.push(parts);
        }
        let mut collision = Vec::new();
        for rt in &out {
            let ut = grid.cells_of(rt);
            let mut parts = Vec::new();
            for &s in &subsets {
                for cv in cells.iter().filter(|c| s.agree(&ut, c)) {
                    parts.push(ei_max(s, cv, rt));
                }
            }
            collision.push(parts);
        }
        Ok(Self {
            table,
            decode,
            collision,
            collision_vacuous: out.is_empty(),
        })
    }

    pub fn table(&self) -> &ExponentTable {
        &self.table
    }

    pub fn collision_vacuous(&self) -> bool {
        self.collision_vacuous
    }

    fn term(&self, k: &PairKey, n: f64) -> (f64, f64) {
        let e = self.table.get(k).expect("bound terms are in the table").value;
        (e, -n * e)
    }

    fn branch(&self, branch: Branch, groups: &[Vec<Part>], n: f64, out: &mut Vec<BoundTerm>) -> f64 {
        let mut best = NEG_INF;
        for (g, parts) in groups.iter().enumerate() {
            let mut acc = LogSum::new();
            for part in parts {
                let chosen = match part {
                    Part::Term(k) => Some(k),
                    Part::Max(ks) => {
                        let mut pick: Option<(&PairKey, f64)> = None;
                        for k in ks {
                            let (_, lv) = self.term(k, n);
                            if pick.is_none_or(|(_, b)| lv > b) {
                                pick = Some((k, lv));
                            }
                        }
                        pick.map(|(k, _)| k)
                    }
                };
                if let Some(k) = chosen {
                    let (exponent, log_value) = self.term(k, n);
                    acc.add(log_value);
                    out.push(BoundTerm {
                        branch,
                        group: g,
                        key: k.clone(),
                        exponent,
                        log_value,
                    });
                }
            }
            best = best.max(acc.value());
        }
        best
    }

    pub fn evaluate(&self, n: u64) -> Result<BoundResult> {
        if n == 0 {
            return Err(Error::ZeroLength);
        }
        let nf = n as f64;
        let mut breakdown = Vec::new();
        let log_decode = self.branch(Branch::Decode, &self.decode, nf, &mut breakdown);
        let log_collision = self.branch(Branch::Collision, &self.collision, nf, &mut breakdown);
        let log_p = log_decode.max(log_collision);
        Ok(BoundResult {
            n,
            p_es_upper: exp(log_p),
            log_p_es_upper: log_p,
            log_decode,
            log_collision,
            collision_vacuous: self.collision_vacuous,
            trivial: log_p >= 0.0,
            breakdown,
        })
    }
}

pub fn pes_bound_single(
    n: u64,
    ch: &Channel,
    profile: &RateProfile,
    region: &OperationRegion,
    cfg: &OptimizerConfig,
) -> Result<BoundResult> {
    Bound::single(ch, profile, region, cfg)?.evaluate(n)
}

pub fn pes_bound_multi(
    n: u64,
    ch: &Channel,
    profile: &RateProfile,
    region: &OperationRegion,
    cfg: &OptimizerConfig,
) -> Result<BoundResult> {
    Bound::multi(ch, profile, region, cfg)?.evaluate(n)
}

pub fn pes_bound_standard(
    n: u64,
    ch: &Channel,
    grid: &GridProfile,
    region: &OperationRegion,
    cfg: &OptimizerConfig,
) -> Result<BoundResult> {
    Bound::standard(ch, grid, region, cfg)?.evaluate(n)
}
