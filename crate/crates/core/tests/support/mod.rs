//! Reference computations written directly from the defining formulas in
//! plain floating point, independent of the library's log-domain code.
#![allow(dead_code)]

pub fn pw(p: f64, a: f64) -> f64 {
    if p == 0.0 {
        0.0
    } else {
        p.powf(a)
    }
}

pub fn bsc_rows(p: f64) -> Vec<Vec<f64>> {
    vec![vec![1.0 - p, p], vec![p, 1.0 - p]]
}

pub fn identity_rows(n: usize) -> Vec<Vec<f64>> {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// `E0(rho) = -ln sum_y [sum_x q(x) P(y|x)^{1/(1+rho)}]^{1+rho}`.
pub fn e0(rows: &[Vec<f64>], q: &[f64], rho: f64) -> f64 {
    let ny = rows[0].len();
    let mut total = 0.0;
    for y in 0..ny {
        let inner: f64 = rows.iter().zip(q).map(|(r, &qx)| qx * pw(r[y], 1.0 / (1.0 + rho))).sum();
        total += pw(inner, 1.0 + rho);
    }
    -total.ln()
}

/// Random coding exponent `max_{0<=rho<=1} -rho r + E0(rho)` by a dense
/// one-dimensional scan.
pub fn gallager_er(rows: &[Vec<f64>], q: &[f64], r: f64) -> f64 {
    let steps = 100_000;
    (0..=steps)
        .map(|i| {
            let rho = i as f64 / steps as f64;
            -rho * r + e0(rows, q, rho)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Missed-decoding objective, single user. The `s/rho` power is taken in
/// the log domain with a max shift since it underflows for small `rho`.
pub fn em_direct(rows: &[Vec<f64>], pr: &[f64], prt: &[f64], rt: f64, rho: f64, s: f64) -> f64 {
    let ny = rows[0].len();
    let mut total = 0.0;
    for y in 0..ny {
        let a: f64 = rows.iter().zip(pr).map(|(r, &p)| p * pw(r[y], 1.0 - s)).sum();
        let logs: Vec<f64> = rows
            .iter()
            .zip(prt)
            .filter(|(r, &p)| p > 0.0 && r[y] > 0.0)
            .map(|(r, &p)| p.ln() + s / rho * r[y].ln())
            .collect();
        if logs.is_empty() {
            continue;
        }
        let m = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let ln_b = m + logs.iter().map(|l| (l - m).exp()).sum::<f64>().ln();
        total += a * (rho * ln_b).exp();
    }
    -rho * rt - total.ln()
}

/// Threshold objective, single user.
pub fn ei_direct(rows: &[Vec<f64>], pr: &[f64], prt: &[f64], r: f64, rho: f64, s: f64) -> f64 {
    let ny = rows[0].len();
    let mut total = 0.0;
    for y in 0..ny {
        let a: f64 = rows.iter().zip(pr).map(|(row, &p)| p * pw(row[y], s / (s + rho))).sum();
        let b: f64 = rows.iter().zip(prt).map(|(row, &p)| p * row[y]).sum();
        total += pw(a, s + rho) * pw(b, 1.0 - s);
    }
    -rho * r - total.ln()
}

/// Brute-force maximum over `rho = i/pts`, `s = s_max(rho) j/pts`.
pub fn grid_max(f: impl Fn(f64, f64) -> f64, triangle: bool, pts: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 1..=pts {
        let rho = i as f64 / pts as f64;
        let s_max = if triangle { 1.0 - rho } else { 1.0 };
        if s_max <= 0.0 {
            continue;
        }
        for j in 1..=pts {
            let s = s_max * j as f64 / pts as f64;
            let v = f(rho, s);
            if v > best {
                best = v;
            }
        }
    }
    best
}

pub fn binary_entropy(p: f64) -> f64 {
    -p * p.ln() - (1.0 - p) * (1.0 - p).ln()
}
