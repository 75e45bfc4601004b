//! `k = 2` dynamics reduced to quadratic polynomials in block variables
//! `y_1 … y_N`. A monomial `y_i y_j` with `i ≠ j` stands for the 16 mode
//! pairs across blocks `i` and `j`; `y_i²` for the 6 pairs inside block `i`.
//! One step is two brickwork layers (even then odd).

use std::collections::BTreeMap;

use crate::alpha::slrw::check_pair;
use crate::alpha::{majorana_to_y, AlphaMethod, AlphaResult};
use crate::error::{Error, Result};
use crate::majorana::MajoranaString;

/// Quadratic form `Σ_{μ ≤ ν} c_{μν} y_μ y_ν`.
#[derive(Clone, Debug, PartialEq)]
pub struct PnPolynomial {
    big_n: usize,
    coeffs: BTreeMap<(usize, usize), f64>,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    (a.min(b), a.max(b))
}

/// Linear lazy-walk step `L(y_i)`.
fn lazy_step(big_n: usize, i: usize) -> Vec<(usize, f64)> {
    if big_n == 1 {
        return vec![(1, 1.0)];
    }
    if i == 1 {
        vec![(1, 0.75), (2, 0.25)]
    } else if i == big_n {
        vec![(big_n - 1, 0.25), (big_n, 0.75)]
    } else {
        vec![(i - 1, 0.25), (i, 0.5), (i + 1, 0.25)]
    }
}

/// Image of `y_i y_j` (`i ≤ j`) under one step: `L(y_i)L(y_j)` plus the
/// nearest-neighbour corrections.
pub fn pn_transition(big_n: usize, i: usize, j: usize) -> Vec<((usize, usize), f64)> {
    let (i, j) = key(i, j);
    let mut out: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (a, wa) in lazy_step(big_n, i) {
        for (b, wb) in lazy_step(big_n, j) {
            *out.entry(key(a, b)).or_default() += wa * wb;
        }
    }
    let mut add = |a: usize, b: usize, w: f64| *out.entry(key(a, b)).or_default() += w;
    if big_n >= 2 {
        if i == j && i == 1 {
            add(1, 1, -5.0 / 144.0);
            add(2, 2, -5.0 / 144.0);
            add(1, 2, 5.0 / 72.0);
        } else if i == j && i == big_n {
            add(big_n, big_n, -5.0 / 144.0);
            add(big_n - 1, big_n - 1, -5.0 / 144.0);
            add(big_n - 1, big_n, 5.0 / 72.0);
        } else if i == j {
            add(i - 1, i - 1, -5.0 / 144.0);
            add(i - 1, i, 1.0 / 36.0);
            add(i - 1, i + 1, 1.0 / 24.0);
            add(i, i, -1.0 / 36.0);
            add(i, i + 1, 1.0 / 36.0);
            add(i + 1, i + 1, -5.0 / 144.0);
        } else if j == i + 1 {
            add(i, i, -1.0 / 48.0);
            add(j, j, -1.0 / 48.0);
            add(i, j, 1.0 / 24.0);
        }
    }
    out.into_iter().filter(|&(_, w)| w != 0.0).collect()
}

impl PnPolynomial {
    pub fn monomial(big_n: usize, i: usize, j: usize) -> Self {
        let mut coeffs = BTreeMap::new();
        coeffs.insert(key(i, j), 1.0);
        Self { big_n, coeffs }
    }

    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn coefficient(&self, i: usize, j: usize) -> f64 {
        self.coeffs.get(&key(i, j)).copied().unwrap_or(0.0)
    }

    pub fn coefficients(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.coeffs.iter().map(|(&k, &v)| (k, v))
    }

    pub fn step(&self) -> Self {
        let mut next: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (&(i, j), &c) in &self.coeffs {
            for (k, w) in pn_transition(self.big_n, i, j) {
                *next.entry(k).or_default() += c * w;
            }
        }
        Self { big_n: self.big_n, coeffs: next }
    }

    /// `(1/3) Σ_μ c_{μμ}`: each in-block monomial carries 2 paired sets out of 6.
    pub fn alpha(&self) -> f64 {
        self.coeffs.iter().filter(|((a, b), _)| a == b).map(|(_, &c)| c).sum::<f64>() / 3.0
    }
}

/// `α` for block coordinates `(i, j)` at odd depth `d`.
pub fn alpha_pn_exact(n: usize, d: usize, i: usize, j: usize) -> Result<AlphaResult> {
    let big_n = check_pair(n, d, i, j)?;
    let mut p = PnPolynomial::monomial(big_n, i, j);
    for _ in 0..(d - 1) / 2 {
        p = p.step();
    }
    Ok(AlphaResult::exact(p.alpha(), AlphaMethod::PnExact))
}

/// Block coordinates of a two-mode string.
pub fn pair_coordinates(s: &MajoranaString) -> Result<(usize, usize)> {
    match s.indices() {
        &[a, b] => Ok((majorana_to_y(a), majorana_to_y(b))),
        _ => Err(Error::InvalidArgument(format!("expected a 2-local string, got {s}"))),
    }
}
