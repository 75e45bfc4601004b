//! Difference between the exact block-variable chain and the product of two
//! independent lazy walks, `R_{ij}(μ, ν, t)`.

use crate::alpha::pn::PnPolynomial;
use crate::alpha::slrw::slrw_propagator;
use crate::error::{Error, Result};

/// Symmetric `N × N` matrix indexed by block pairs `(μ, ν)`, 1-based.
#[derive(Clone, Debug, PartialEq)]
pub struct DeviationMatrix {
    big_n: usize,
    entries: Vec<f64>,
}

impl DeviationMatrix {
    pub fn big_n(&self) -> usize {
        self.big_n
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.entries[(mu - 1) * self.big_n + nu - 1]
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    /// Largest diagonal entry (should be ≤ 0).
    pub fn max_diagonal(&self) -> f64 {
        (1..=self.big_n).map(|m| self.get(m, m)).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest off-diagonal entry (should be ≥ 0), with its position.
    pub fn min_off_diagonal(&self) -> Option<(f64, usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for mu in 1..=self.big_n {
            for nu in 1..=self.big_n {
                if mu != nu {
                    let v = self.get(mu, nu);
                    if best.is_none_or(|b| v < b.0) {
                        best = Some((v, mu, nu));
                    }
                }
            }
        }
        best
    }
}

/// `R(μ,ν) = E(μ,ν) - (L_i(μ)L_j(ν) + L_i(ν)L_j(μ))/2` where `E` spreads the
/// exact chain's off-diagonal coefficients evenly over `(μ,ν)` and `(ν,μ)`.
pub fn slrw_deviation(n: usize, t: usize, i: usize, j: usize) -> Result<DeviationMatrix> {
    if n % 2 == 1 || n < 2 {
        return Err(Error::OddQubitCount(n));
    }
    let big_n = n / 2;
    if !(1..=big_n).contains(&i) || !(1..=big_n).contains(&j) {
        return Err(Error::InvalidIndices(format!("block coordinates ({i}, {j}) outside 1..={big_n}")));
    }
    let mut p = PnPolynomial::monomial(big_n, i, j);
    for _ in 0..t {
        p = p.step();
    }
    let li: Vec<f64> = (1..=big_n).map(|m| slrw_propagator(big_n, i, m, t)).collect();
    let lj: Vec<f64> = (1..=big_n).map(|m| slrw_propagator(big_n, j, m, t)).collect();
    let mut entries = vec![0.0; big_n * big_n];
    for mu in 0..big_n {
        for nu in 0..big_n {
            let c = p.coefficient(mu + 1, nu + 1);
            let exact = if mu == nu { c } else { c / 2.0 };
            let walk = (li[mu] * lj[nu] + li[nu] * lj[mu]) / 2.0;
            entries[mu * big_n + nu] = exact - walk;
        }
    }
    Ok(DeviationMatrix { big_n, entries })
}
