use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::seed::{codeword_rng, unit};
use crate::channel::{OperationRegion, RateProfile};
use crate::error::{Error, Result};
use crate::math::{exp, floor};

/// `floor(e^{n r})`, saturating. A relative guard of `1e-12` keeps exact
/// integers such as `e^{ln 2}` from rounding down.
pub fn codeword_count(n: usize, rate: f64) -> u128 {
    let v = exp(n as f64 * rate) * (1.0 + 1e-12);
    if v >= u128::MAX as f64 {
        u128::MAX
    } else {
        floor(v) as u128
    }
}

/// Codebook ensemble parameters.
#[derive(Debug, Clone, Copy)]
pub struct CodebookSpec<'a> {
    pub n: usize,
    pub profile: &'a RateProfile,
    pub seed: u64,
}

impl CodebookSpec<'_> {
    pub fn count(&self, user: usize, class: usize) -> u128 {
        codeword_count(self.n, self.profile.point(user, class).rate)
    }

    /// Symbols of one codeword, independent of every other codeword.
    pub fn draw(&self, user: usize, class: usize, w: u64) -> Vec<u32> {
        let dist = &self.profile.point(user, class).dist;
        let mut rng = codeword_rng(self.seed, user, class, w);
        (0..self.n).map(|_| dist.sample(unit(&mut rng))).collect()
    }

    /// Stored symbols needed for the given classes of each user.
    pub fn required_symbols(&self, classes: &[BTreeSet<usize>]) -> u128 {
        let mut total: u128 = 0;
        for (k, set) in classes.iter().enumerate() {
            for &i in set {
                total = total.saturating_add(self.count(k, i).saturating_mul(self.n as u128));
            }
        }
        total
    }
}

/// Rate classes of each user the receiver searches.
pub(crate) fn searched_classes(region: &OperationRegion, users: usize) -> Vec<BTreeSet<usize>> {
    (0..users).map(|k| region.classes_in_use(k)).collect()
}

/// Stored codewords of selected rate classes.
#[derive(Debug, Clone, PartialEq)]
pub struct Codebook {
    n: usize,
    /// `books[k][i]`: concatenated codewords of class `i` of user `k`.
    books: Vec<Vec<Option<Vec<u32>>>>,
    counts: Vec<Vec<u128>>,
}

impl Codebook {
    /// Materialize the given classes; everything else stays implicit.
    pub fn generate(spec: &CodebookSpec<'_>, classes: &[BTreeSet<usize>], budget: u128) -> Result<Self> {
        if spec.n == 0 {
            return Err(Error::ZeroLength);
        }
        let required = spec.required_symbols(classes);
        if required > budget {
            return Err(Error::BudgetExceeded { required, budget });
        }
        let users = spec.profile.num_users();
        let mut books = Vec::with_capacity(users);
        let mut counts = Vec::with_capacity(users);
        for k in 0..users {
            let m = spec.profile.user(k).len();
            let mut b = vec![None; m];
            let mut c = Vec::with_capacity(m);
            for i in 0..m {
                let count = spec.count(k, i);
                c.push(count);
                if classes.get(k).is_some_and(|s| s.contains(&i)) {
                    let mut flat = Vec::with_capacity(count as usize * spec.n);
                    for w in 0..count as u64 {
                        flat.extend(spec.draw(k, i, w));
                    }
                    b[i] = Some(flat);
                }
            }
            books.push(b);
            counts.push(c);
        }
        Ok(Self { n: spec.n, books, counts })
    }

    /// Codebook of every class the region searches.
    pub fn for_region(spec: &CodebookSpec<'_>, region: &OperationRegion, budget: u128) -> Result<Self> {
        Self::generate(spec, &searched_classes(region, spec.profile.num_users()), budget)
    }

    /// Codebook with explicitly given codewords for the listed
    /// `(user, class, codewords)` entries; each entry must hold exactly the
    /// class's codeword count, each of length `spec.n`.
    pub fn from_codewords(spec: &CodebookSpec<'_>, stored: &[(usize, usize, Vec<Vec<u32>>)]) -> Result<Self> {
        if spec.n == 0 {
            return Err(Error::ZeroLength);
        }
        let profile = spec.profile;
        let users = profile.num_users();
        let mut books: Vec<Vec<Option<Vec<u32>>>> = (0..users).map(|k| vec![None; profile.user(k).len()]).collect();
        let counts: Vec<Vec<u128>> = (0..users)
            .map(|k| (0..profile.user(k).len()).map(|i| spec.count(k, i)).collect())
            .collect();
        for (k, i, words) in stored {
            let (k, i) = (*k, *i);
            if k >= users || i >= profile.user(k).len() {
                return Err(Error::Invalid(format!("no rate class {i} for user {}", k + 1)));
            }
            if words.len() as u128 != counts[k][i] {
                return Err(Error::DimensionMismatch {
                    what: "codewords in class",
                    expected: counts[k][i] as usize,
                    found: words.len(),
                });
            }
            let alphabet = profile.point(k, i).dist.len() as u32;
            let mut flat = Vec::with_capacity(words.len() * spec.n);
            for w in words {
                if w.len() != spec.n || w.iter().any(|&x| x >= alphabet) {
                    return Err(Error::Invalid(format!("bad codeword for user {} class {i}", k + 1)));
                }
                flat.extend_from_slice(w);
            }
            books[k][i] = Some(flat);
        }
        Ok(Self { n: spec.n, books, counts })
    }

    pub(crate) fn from_parts(n: usize, books: Vec<Vec<Option<Vec<u32>>>>, counts: Vec<Vec<u128>>) -> Self {
        Self { n, books, counts }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn count(&self, user: usize, class: usize) -> u128 {
        self.counts[user][class]
    }

    pub fn is_materialized(&self, user: usize, class: usize) -> bool {
        self.books[user][class].is_some()
    }

    pub fn codeword(&self, user: usize, class: usize, w: u64) -> Option<&[u32]> {
        let n = self.n;
        self.books[user][class]
            .as_deref()
            .map(|b| &b[w as usize * n..(w as usize + 1) * n])
    }
}
