//! Log-domain helpers and the power conventions used throughout.
//!
//! `0^a := 0` for every exponent `a >= 0` (including `a = 0`), which in the
//! log domain is `scale(-inf, a) = -inf`. Plain `a * -inf` would give NaN at
//! `a = 0`.

pub const NEG_INF: f64 = f64::NEG_INFINITY;

#[inline]
pub fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub fn floor(x: f64) -> f64 {
    libm::floor(x)
}

/// `ln p`, with `ln 0 = -inf`.
#[inline]
pub fn ln0(p: f64) -> f64 {
    if p <= 0.0 {
        NEG_INF
    } else {
        ln(p)
    }
}

/// `a * lp` where `lp` is a log-probability; `-inf` stays `-inf` for `a >= 0`.
#[inline]
pub fn scale(lp: f64, a: f64) -> f64 {
    if lp == NEG_INF {
        NEG_INF
    } else {
        a * lp
    }
}

/// `p^a` with `0^a = 0`.
#[inline]
pub fn pow0(p: f64, a: f64) -> f64 {
    if p <= 0.0 {
        0.0
    } else {
        libm::pow(p, a)
    }
}

/// `ln(e^a + e^b)`.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == NEG_INF {
        return b;
    }
    if b == NEG_INF {
        return a;
    }
    if a == f64::INFINITY || b == f64::INFINITY {
        return f64::INFINITY;
    }
    if a > b {
        a + libm::log1p(libm::exp(b - a))
    } else {
        b + libm::log1p(libm::exp(a - b))
    }
}

/// Running log-sum-exp accumulator (two-pass free, streaming max shift).
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

impl LogSum {
    pub const fn new() -> Self {
        Self {
            max: NEG_INF,
            scaled: 0.0,
        }
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        if x == NEG_INF {
            return;
        }
        if x == f64::INFINITY {
            self.max = f64::INFINITY;
            return;
        }
        if self.max == f64::INFINITY {
            return;
        }
        if x <= self.max {
            self.scaled += exp(x - self.max);
        } else {
            self.scaled = self.scaled * exp(self.max - x) + 1.0;
            self.max = x;
        }
    }

    #[inline]
    pub fn value(&self) -> f64 {
        if self.max == NEG_INF || self.max == f64::INFINITY {
            self.max
        } else {
            self.max + ln(self.scaled)
        }
    }
}

/// `ln sum_i e^{x_i}`; empty input gives `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = LogSum::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_naive_in_range() {
        let xs = [0.5, -1.25, 2.0, 0.0];
        let naive = ln(xs.iter().map(|&x| exp(x)).sum::<f64>());
        assert!((log_sum_exp(xs) - naive).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_survives_extreme_magnitudes() {
        // ln(e^1234 + e^1232) = 1232 + ln(e^2 + 1)
        let expected = 1232.0 + ln(exp(2.0) + 1.0);
        assert!((log_sum_exp([1234.0, 1232.0]) - expected).abs() < 1e-12);
        let tiny = log_sum_exp([-2000.0, -2000.0]);
        assert!((tiny - (-2000.0 + core::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn empty_and_neg_inf() {
        assert_eq!(log_sum_exp(core::iter::empty()), NEG_INF);
        assert_eq!(log_sum_exp([NEG_INF, NEG_INF]), NEG_INF);
        assert_eq!(log_sum_exp([NEG_INF, 0.0]), 0.0);
        assert_eq!(log_add_exp(NEG_INF, 3.0), 3.0);
    }

    #[test]
    fn zero_power_convention() {
        assert_eq!(pow0(0.0, 0.0), 0.0);
        assert_eq!(pow0(0.0, 0.5), 0.0);
        assert_eq!(scale(NEG_INF, 0.0), NEG_INF);
        assert_eq!(scale(-2.0, 0.0), 0.0);
    }
}
