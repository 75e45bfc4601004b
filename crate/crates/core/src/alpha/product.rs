//! Approximation of `α_{S,d}` for `k`-local strings by independent pair walks:
//! `α' = (1/(k-1)!!) (3n/2)^{k/2} C(n,k/2)/C(2n,k) Σ_Λ Π_{(i,j)∈Λ} α^L_{ij}`.

use crate::alpha::slrw::{alpha_l, check_pair};
use crate::alpha::{binomial, majorana_to_y, AlphaMethod, AlphaResult};
use crate::error::{Error, Result};
use crate::majorana::MajoranaString;

pub const MAX_PRODUCT_LOCALITY: usize = 12;

/// All perfect matchings of `items` (which must have even length).
pub fn perfect_matchings(items: &[usize]) -> Vec<Vec<(usize, usize)>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let first = items[0];
    let mut out = Vec::new();
    for p in 1..items.len() {
        let rest: Vec<usize> = items[1..].iter().enumerate().filter(|&(x, _)| x + 1 != p).map(|(_, &v)| v).collect();
        for mut m in perfect_matchings(&rest) {
            m.insert(0, (first, items[p]));
            out.push(m);
        }
    }
    out
}

fn double_factorial(k: usize) -> f64 {
    (1..=k).rev().step_by(2).map(|x| x as f64).product()
}

pub fn alpha_k_product(n: usize, d: usize, s: &MajoranaString) -> Result<AlphaResult> {
    let k = s.locality();
    if k % 2 == 1 {
        return Err(Error::OddLocality(k));
    }
    if k > MAX_PRODUCT_LOCALITY {
        return Err(Error::InvalidArgument(format!("locality {k} exceeds {MAX_PRODUCT_LOCALITY}")));
    }
    if s.n() != n {
        return Err(Error::QubitMismatch { expected: n, got: s.n() });
    }
    let big_n = check_pair(n, d, 1, 1)?;
    let t = (d - 1) / 2;
    let sum: f64 = perfect_matchings(s.indices())
        .iter()
        .map(|m| m.iter().map(|&(a, b)| alpha_l(big_n, t, majorana_to_y(a), majorana_to_y(b))).product::<f64>())
        .sum();
    let half = (k / 2) as i32;
    let prefactor = (1.5 * n as f64).powi(half) * binomial(n, k / 2) / binomial(2 * n, k)
        / double_factorial(k.saturating_sub(1));
    Ok(AlphaResult::exact(prefactor * sum, AlphaMethod::KProduct))
}
