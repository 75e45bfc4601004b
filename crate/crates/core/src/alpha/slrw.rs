//! Closed forms for `k = 2` built on the symmetric lazy random walk over the
//! `N = n/2` blocks of four Majorana modes. All functions use block
//! coordinates `i, j ∈ 1..=N` and odd depth `d = 2t + 1`.

use std::f64::consts::PI;

use crate::alpha::{AlphaMethod, AlphaResult};
use crate::error::{Error, Result};

const POISSON_CUTOFF: f64 = 1e-18;

/// `L_i(μ, t)`: probability that the walk started at `i` sits at `μ` after `t` steps.
pub fn slrw_propagator(big_n: usize, i: usize, mu: usize, t: usize) -> f64 {
    assert!(big_n >= 1 && (1..=big_n).contains(&i) && (1..=big_n).contains(&mu));
    let nf = big_n as f64;
    let mut acc = 1.0 / nf;
    for k in 1..big_n {
        let kf = k as f64;
        acc += 2.0 / nf
            * ((mu as f64 - 0.5) * PI * kf / nf).cos()
            * ((i as f64 - 0.5) * PI * kf / nf).cos()
            * (PI * kf / (2.0 * nf)).cos().powi(2 * t as i32);
    }
    acc
}

pub(crate) fn check_pair(n: usize, d: usize, i: usize, j: usize) -> Result<usize> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::OddQubitCount(n));
    }
    if d % 2 == 0 {
        return Err(Error::InvalidArgument(format!("depth {d} must be odd for the closed forms")));
    }
    let big_n = n / 2;
    if !(1..=big_n).contains(&i) || !(1..=big_n).contains(&j) {
        return Err(Error::InvalidIndices(format!("block coordinates ({i}, {j}) outside 1..={big_n}")));
    }
    Ok(big_n)
}

/// `α^L = (1/3)[1/N + (1/N) Σ_k (cos((i-j)kπ/N) + cos((i+j-1)kπ/N)) cos^{4t}(πk/2N)]`.
pub fn alpha_l(big_n: usize, t: usize, i: usize, j: usize) -> f64 {
    let nf = big_n as f64;
    let a = i as f64 - j as f64;
    let b = (i + j - 1) as f64;
    let mut acc = 1.0 / nf;
    for k in 1..big_n {
        let x = k as f64 * PI / nf;
        acc += ((a * x).cos() + (b * x).cos()) * (x / 2.0).cos().powi(4 * t as i32) / nf;
    }
    acc / 3.0
}

pub fn alpha_slrw_sum(n: usize, d: usize, i: usize, j: usize) -> Result<AlphaResult> {
    let big_n = check_pair(n, d, i, j)?;
    Ok(AlphaResult::exact(alpha_l(big_n, (d - 1) / 2, i, j), AlphaMethod::SlrwSum))
}

/// Gaussian-kernel form `(1/(3√(2πt))) Σ_k [e^{-(2Nk+a)²/2t} + e^{-(2Nk+b)²/2t}]`
/// with `a = |i-j|`, `b = i+j-1`. Needs `t ≥ 1`.
pub fn alpha_slrw_poisson(n: usize, d: usize, i: usize, j: usize) -> Result<AlphaResult> {
    let big_n = check_pair(n, d, i, j)?;
    let t = (d - 1) / 2;
    if t == 0 {
        return Err(Error::InvalidArgument("the Poisson form is singular at depth 1".into()));
    }
    let tf = t as f64;
    let period = 2.0 * big_n as f64;
    let a = i.abs_diff(j) as f64;
    let b = (i + j - 1) as f64;
    let term = |k: i64| {
        let s = period * k as f64;
        (-(s + a).powi(2) / (2.0 * tf)).exp() + (-(s + b).powi(2) / (2.0 * tf)).exp()
    };
    // both Gaussians are centred in k ∈ [-1, 0]
    let mut acc = term(0) + term(-1);
    let mut k = 1;
    loop {
        let v = term(k);
        acc += v;
        if v < POISSON_CUTOFF {
            break;
        }
        k += 1;
    }
    let mut k = -2;
    loop {
        let v = term(k);
        acc += v;
        if v < POISSON_CUTOFF {
            break;
        }
        k -= 1;
    }
    Ok(AlphaResult::exact(acc / (3.0 * (2.0 * PI * tf).sqrt()), AlphaMethod::SlrwPoisson))
}
