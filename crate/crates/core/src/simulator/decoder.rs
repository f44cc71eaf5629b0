use alloc::vec;
use alloc::vec::Vec;

use super::codebook::Codebook;
use super::threshold::{SubsetThreshold, ThresholdTable};
use crate::channel::{Channel, InputDistribution, OperationRegion, RateProfile, Subset};
use crate::error::{Error, Result};
use crate::math::NEG_INF;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Decoded { messages: Vec<u64>, rates: Vec<usize> },
    Collision,
}

/// Maximum likelihood search over every in-region codeword tuple followed
/// by the typicality check `-(1/n) ln P(y|x) < min_S tau_{(r,S)}(y)`.
/// Exact likelihood ties, including two zero likelihoods, are collisions.
#[derive(Debug, Clone)]
pub struct Decoder<'a> {
    ch: &'a Channel,
    n: usize,
    members: Vec<Vec<usize>>,
    thresholds: Vec<Vec<SubsetThreshold>>,
}

struct Search {
    best: f64,
    member: usize,
    messages: Vec<u64>,
    seen: bool,
    tie: bool,
}

impl Search {
    fn new(users: usize) -> Self {
        Self {
            best: NEG_INF,
            member: 0,
            messages: vec![0; users],
            seen: false,
            tie: false,
        }
    }

    fn offer(&mut self, ll: f64, member: usize, messages: &[u64]) {
        if !self.seen || ll > self.best {
            self.best = ll;
            self.member = member;
            self.messages.copy_from_slice(messages);
            self.seen = true;
            self.tie = false;
        } else if ll == self.best {
            self.tie = true;
        }
    }
}

impl<'a> Decoder<'a> {
    pub fn new(
        ch: &'a Channel,
        profile: &RateProfile,
        region: &OperationRegion,
        table: &ThresholdTable,
        n: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::ZeroLength);
        }
        profile.check_channel(ch)?;
        let out = region.complement(profile);
        let mut thresholds = Vec::with_capacity(region.len());
        for r in region.members() {
            let rates = profile.rates(r);
            let dists = profile.dists(r);
            let mut per_subset = Vec::new();
            for s in Subset::proper_subsets(ch.num_users()) {
                let outs: Vec<Vec<&InputDistribution>> =
                    out.iter().filter(|o| s.agree(r, o)).map(|o| profile.dists(o)).collect();
                per_subset.push(SubsetThreshold::new(ch, s, &rates, &dists, &outs, table.get(r, s).copied())?);
            }
            thresholds.push(per_subset);
        }
        Ok(Self {
            ch,
            n,
            members: region.members().to_vec(),
            thresholds,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    /// `tau_r(y)`: the smallest subset threshold for region member `member`
    /// with the candidate codewords `cand` (one per user).
    pub fn threshold(&self, member: usize, y: &[u32], cand: &[&[u32]]) -> f64 {
        self.thresholds[member]
            .iter()
            .map(|t| t.tau(y, cand))
            .fold(f64::INFINITY, f64::min)
    }

    fn log_likelihood(&self, y: &[u32], cand: &[&[u32]]) -> f64 {
        let mut ll = 0.0;
        for (j, &yj) in y.iter().enumerate() {
            let row: usize = cand
                .iter()
                .enumerate()
                .map(|(k, c)| c[j] as usize * self.ch.stride(k))
                .sum();
            let lp = self.ch.log_prob(row, yj as usize);
            if lp == NEG_INF {
                return NEG_INF;
            }
            ll += lp;
        }
        ll
    }

    fn finish(&self, search: Search, y: &[u32], cb: &Codebook) -> Outcome {
        if !search.seen || search.tie {
            return Outcome::Collision;
        }
        let r = &self.members[search.member];
        let cand: Vec<&[u32]> = (0..r.len())
            .map(|k| cb.codeword(k, r[k], search.messages[k]).expect("searched class is stored"))
            .collect();
        let tau = self.threshold(search.member, y, &cand);
        if -search.best / (self.n as f64) < tau {
            Outcome::Decoded {
                messages: search.messages,
                rates: r.clone(),
            }
        } else {
            Outcome::Collision
        }
    }

    /// Decode `y` against every in-region message tuple of `cb`, which must
    /// store every class the region uses.
    pub fn decode(&self, y: &[u32], cb: &Codebook) -> Outcome {
        let users = self.ch.num_users();
        let mut search = Search::new(users);
        let mut w = vec![0u64; users];
        let mut cand: Vec<&[u32]> = vec![&[]; users];
        for (mi, r) in self.members.iter().enumerate() {
            let counts: Vec<u64> = (0..users).map(|k| cb.count(k, r[k]) as u64).collect();
            w.iter_mut().for_each(|x| *x = 0);
            'tuples: loop {
                for k in 0..users {
                    cand[k] = cb.codeword(k, r[k], w[k]).expect("searched class is stored");
                }
                let ll = self.log_likelihood(y, &cand);
                search.offer(ll, mi, &w);
                let mut k = users;
                loop {
                    if k == 0 {
                        break 'tuples;
                    }
                    k -= 1;
                    w[k] += 1;
                    if w[k] < counts[k] {
                        break;
                    }
                    w[k] = 0;
                }
            }
        }
        self.finish(search, y, cb)
    }

    /// Single-user decoding written directly as a scan over codewords.
    pub fn decode_single(&self, y: &[u32], cb: &Codebook) -> Result<Outcome> {
        if self.ch.num_users() != 1 {
            return Err(Error::NotSingleUser {
                users: self.ch.num_users(),
            });
        }
        let mut search = Search::new(1);
        for (mi, r) in self.members.iter().enumerate() {
            for w in 0..cb.count(0, r[0]) as u64 {
                let x = cb.codeword(0, r[0], w).expect("searched class is stored");
                let mut ll = 0.0;
                for (&xj, &yj) in x.iter().zip(y) {
                    ll += self.ch.log_prob(xj as usize, yj as usize);
                }
                search.offer(ll, mi, &[w]);
            }
        }
        Ok(self.finish(search, y, cb))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::RatePoint;
    use crate::simulator::codebook::CodebookSpec;
    use crate::simulator::threshold::ThresholdParams;

    #[test]
    fn exact_match_on_identity_channel_decodes() {
        let ch = Channel::identity(2).unwrap();
        let u = InputDistribution::uniform(2);
        let rp = RateProfile::single(vec![RatePoint::new(0.1, u.clone()), RatePoint::new(0.5, u)]).unwrap();
        let region = OperationRegion::single(&[0], &rp).unwrap();
        let n = 12;
        let spec = CodebookSpec { n, profile: &rp, seed: 4 };
        let cb = Codebook::for_region(&spec, &region, 1 << 20).unwrap();
        assert_eq!(cb.count(0, 0), 3);
        let tp = ThresholdTable::uniform(&rp, &region, ThresholdParams::new(0.5, 0.3, 0.0).unwrap());
        let dec = Decoder::new(&ch, &rp, &region, &tp, n).unwrap();
        let words: Vec<&[u32]> = (0..3).map(|w| cb.codeword(0, 0, w).unwrap()).collect();
        assert!(words[0] != words[1] && words[0] != words[2] && words[1] != words[2]);
        for w in 0..3u64 {
            let y = words[w as usize].to_vec();
            let expected = Outcome::Decoded { messages: vec![w], rates: vec![0] };
            assert_eq!(dec.decode(&y, &cb), expected);
            assert_eq!(dec.decode_single(&y, &cb).unwrap(), expected);
        }
    }

    #[test]
    fn identical_codewords_collide() {
        let ch = Channel::identity(2).unwrap();
        let pm = InputDistribution::point_mass(2, 0);
        let rp = RateProfile::single(vec![RatePoint::new(0.4, pm)]).unwrap();
        let region = OperationRegion::single(&[0], &rp).unwrap();
        let spec = CodebookSpec { n: 3, profile: &rp, seed: 1 };
        let cb = Codebook::for_region(&spec, &region, 1 << 20).unwrap();
        assert_eq!(cb.count(0, 0), 3);
        let dec = Decoder::new(&ch, &rp, &region, &ThresholdTable::default(), 3).unwrap();
        assert_eq!(dec.decode(&[0, 0, 0], &cb), Outcome::Collision);
    }
}
