//! Shadow-channel eigenvalues `α_{S,d}` from several independent engines.

pub mod deviation;
pub mod dp;
pub mod monte_carlo;
pub mod pn;
pub mod product;
pub mod slrw;
pub mod tensor;

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

pub use deviation::{slrw_deviation, DeviationMatrix};
pub use dp::{alpha_dp_curve, alpha_dp_curve_with_kernel, alpha_exact_dp, GateKernel, SubsetDistribution};
pub use monte_carlo::alpha_monte_carlo;
pub use pn::{alpha_pn_exact, PnPolynomial};
pub use product::alpha_k_product;
pub use slrw::{alpha_slrw_poisson, alpha_slrw_sum, slrw_propagator};
pub use tensor::{t_tensor, LocalTwirlTensor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlphaMethod {
    ExactDp,
    MonteCarlo,
    PnExact,
    SlrwSum,
    SlrwPoisson,
    KProduct,
    FcsLimit,
}

impl AlphaMethod {
    pub const ALL: [AlphaMethod; 7] = [
        AlphaMethod::ExactDp,
        AlphaMethod::MonteCarlo,
        AlphaMethod::PnExact,
        AlphaMethod::SlrwSum,
        AlphaMethod::SlrwPoisson,
        AlphaMethod::KProduct,
        AlphaMethod::FcsLimit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            AlphaMethod::ExactDp => "exact_dp",
            AlphaMethod::MonteCarlo => "monte_carlo",
            AlphaMethod::PnExact => "pn_exact",
            AlphaMethod::SlrwSum => "slrw_sum",
            AlphaMethod::SlrwPoisson => "slrw_poisson",
            AlphaMethod::KProduct => "k_product",
            AlphaMethod::FcsLimit => "fcs_limit",
        }
    }
}

impl fmt::Display for AlphaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AlphaMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown alpha method `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AlphaResult {
    pub value: f64,
    pub method: AlphaMethod,
    /// Monte-Carlo standard error.
    pub stderr: Option<f64>,
    /// Probability mass dropped by DP pruning; an upper bound on the truncation error.
    pub pruned_mass: f64,
}

impl AlphaResult {
    pub(crate) fn exact(value: f64, method: AlphaMethod) -> Self {
        Self { value, method, stderr: None, pruned_mass: 0.0 }
    }
}

/// Binomial coefficient as `f64`, exact while the value fits in 53 bits.
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

/// Full matchgate-group eigenvalue `C(n, k/2) / C(2n, k)`.
pub fn alpha_fcs_limit(n: usize, k: usize) -> Result<AlphaResult> {
    if k % 2 == 1 {
        return Err(Error::OddLocality(k));
    }
    if n == 0 || k > 2 * n {
        return Err(Error::InvalidArgument(format!("locality {k} impossible for n = {n}")));
    }
    Ok(AlphaResult::exact(binomial(n, k / 2) / binomial(2 * n, k), AlphaMethod::FcsLimit))
}

/// Block coordinate of a Majorana index: `⌊(i-1)/4⌋ + 1`.
pub fn majorana_to_y(i: usize) -> usize {
    assert!(i >= 1, "Majorana indices are 1-based");
    (i - 1) / 4 + 1
}
