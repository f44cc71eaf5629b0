//! Two-parameter maximizer used for every exponent.
//!
//! A uniform grid over the feasible set picks a starting node, then rounds of
//! alternating golden-section searches polish it. Only strict improvements
//! are accepted, so the returned point is always one the objective was
//! actually evaluated at and the reported value is that evaluation.

use crate::error::{Error, Result};

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const GOLDEN_STEPS: usize = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub grid_points_rho: usize,
    pub grid_points_s: usize,
    pub refine_iters: usize,
    pub epsilon: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            grid_points_rho: 64,
            grid_points_s: 64,
            refine_iters: 60,
            epsilon: 1e-9,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points_rho < 8 {
            return Err(Error::InvalidOptimizer("grid_points_rho must be at least 8"));
        }
        if self.grid_points_s < 8 {
            return Err(Error::InvalidOptimizer("grid_points_s must be at least 8"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1e-3) {
            return Err(Error::InvalidOptimizer("epsilon must lie in (0, 1e-3)"));
        }
        Ok(())
    }
}

/// Feasible set of `(rho, s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// `0 < rho <= 1`, `0 < s <= 1`.
    Square,
    /// `0 < rho < 1`, `0 < s <= 1 - rho`.
    Triangle,
}

impl Domain {
    pub fn rho_max(self, eps: f64) -> f64 {
        match self {
            Domain::Square => 1.0,
            Domain::Triangle => 1.0 - eps,
        }
    }

    pub fn s_max(self, rho: f64) -> f64 {
        match self {
            Domain::Square => 1.0,
            Domain::Triangle => 1.0 - rho,
        }
    }

    pub fn contains(self, rho: f64, s: f64) -> bool {
        rho > 0.0 && rho <= 1.0 && s > 0.0 && s <= self.s_max(rho) && !(self == Domain::Triangle && rho >= 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub value: f64,
    pub rho: f64,
    pub s: f64,
}

struct Best<'f, F> {
    f: &'f F,
    domain: Domain,
    eps: f64,
    cur: Maximum,
    /// `s / s_max(rho)` of the incumbent
    t: f64,
}

impl<F: Fn(f64, f64) -> f64> Best<'_, F> {
    fn s_of(&self, rho: f64, t: f64) -> f64 {
        (self.domain.s_max(rho) * t).max(self.eps)
    }

    fn try_point(&mut self, rho: f64, t: f64) -> f64 {
        let s = self.s_of(rho, t);
        let v = (self.f)(rho, s);
        if v > self.cur.value {
            self.cur = Maximum { value: v, rho, s };
            self.t = t;
        }
        v
    }

    /// Golden-section search on `[lo, hi]` along `rho` (fixed `t`) or `t`
    /// (fixed `rho`).
    fn line(&mut self, lo: f64, hi: f64, along_rho: bool) {
        if !(hi > lo) {
            return;
        }
        let (rho0, t0) = (self.cur.rho, self.t);
        let point = |x: f64| if along_rho { (x, t0) } else { (rho0, x) };
        let (p, q) = point(lo);
        self.try_point(p, q);
        let (p, q) = point(hi);
        self.try_point(p, q);
        let (mut a, mut b) = (lo, hi);
        let mut c = b - INV_PHI * (b - a);
        let mut d = a + INV_PHI * (b - a);
        let (p, q) = point(c);
        let mut fc = self.try_point(p, q);
        let (p, q) = point(d);
        let mut fd = self.try_point(p, q);
        for _ in 0..GOLDEN_STEPS {
            if fc >= fd {
                b = d;
                d = c;
                fd = fc;
                c = b - INV_PHI * (b - a);
                let (p, q) = point(c);
                fc = self.try_point(p, q);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + INV_PHI * (b - a);
                let (p, q) = point(d);
                fd = self.try_point(p, q);
            }
        }
    }
}

/// Maximize `f` over `domain`.
///
/// The search runs in `(rho, t)` with `s = t * s_max(rho)`, which maps the
/// triangle onto a rectangle. Grid nodes are `rho_i = rho_max * i / n` and
/// `t_j = j / m`, with `rho` and `s` lifted to `epsilon` when smaller, so
/// doubling either count keeps every old node. The scan runs `rho` major,
/// `s` minor and keeps the first maximum.
pub fn maximize<F: Fn(f64, f64) -> f64>(f: &F, domain: Domain, cfg: &OptimizerConfig) -> Maximum {
    let eps = cfg.epsilon;
    let n = cfg.grid_points_rho;
    let m = cfg.grid_points_s;
    let rho_max = domain.rho_max(eps);
    let mut best = Best {
        f,
        domain,
        eps,
        cur: Maximum {
            value: f64::NEG_INFINITY,
            rho: rho_max,
            s: eps,
        },
        t: 0.0,
    };
    let mut seeded = false;
    for i in 1..=n {
        let rho = (rho_max * i as f64 / n as f64).max(eps);
        for j in 1..=m {
            let t = j as f64 / m as f64;
            let s = best.s_of(rho, t);
            let v = f(rho, s);
            if !seeded || v > best.cur.value {
                best.cur = Maximum { value: v, rho, s };
                best.t = t;
                seeded = true;
            }
        }
    }
    let h_rho = rho_max / n as f64;
    let h_t = 1.0 / m as f64;
    for _ in 0..cfg.refine_iters {
        let before = best.cur.value;
        let rho = best.cur.rho;
        best.line((rho - h_rho).max(eps), (rho + h_rho).min(rho_max), true);
        let t = best.t;
        best.line((t - h_t).max(0.0), (t + h_t).min(1.0), false);
        if !(best.cur.value - before > 1e-15) {
            break;
        }
    }
    best.cur
}
