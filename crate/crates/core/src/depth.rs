//! Choice of the measurement depth `d*` for an observable.

use serde::Serialize;

use crate::alpha::dp::{GateKernel, SubsetDistribution};
use crate::alpha::alpha_fcs_limit;
use crate::error::{Error, Result};
use crate::majorana::MajoranaString;

pub const DEFAULT_CONSTANT: f64 = 2.0;
pub const DEFAULT_ETA: f64 = 0.5;
/// Search thresholds are capped just below the deep limit, which `α` may
/// approach from below without reaching it.
pub const MAX_THRESHOLD_FRACTION: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DepthMode {
    Formula,
    Search,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TermAlpha {
    #[serde(rename = "S")]
    pub indices: Vec<usize>,
    pub alpha: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DepthRecommendation {
    pub d_star: usize,
    pub mode: DepthMode,
    pub per_term_alpha: Vec<TermAlpha>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub calibration_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
}

impl DepthRecommendation {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("recommendation serializes")
    }
}

/// `max(1, round(c · max(d_int² / ln n, d_int)))`, bumped to the next odd
/// integer when `odd` is set.
pub fn recommend_depth_formula(n: usize, d_int: usize, c: f64, odd: bool) -> Result<DepthRecommendation> {
    if n < 4 {
        return Err(Error::InvalidArgument(format!("depth formula needs n >= 4, got {n}")));
    }
    if d_int == 0 {
        return Err(Error::InvalidArgument("interaction distance must be positive".into()));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(format!("calibration constant must be positive, got {c}")));
    }
    let d = d_int as f64;
    let raw = c * (d * d / (n as f64).ln()).max(d);
    let mut d_star = (raw.round() as usize).max(1);
    if odd && d_star % 2 == 0 {
        d_star += 1;
    }
    Ok(DepthRecommendation {
        d_star,
        mode: DepthMode::Formula,
        per_term_alpha: Vec::new(),
        calibration_constant: Some(c),
        eta: None,
    })
}

fn check_terms(n: usize, terms: &[MajoranaString]) -> Result<()> {
    if terms.is_empty() {
        return Err(Error::EmptyObservable);
    }
    if n % 2 == 1 || n == 0 {
        return Err(Error::OddQubitCount(n));
    }
    for s in terms {
        if s.n() != n {
            return Err(Error::QubitMismatch { expected: n, got: s.n() });
        }
        if s.locality() % 2 == 1 {
            return Err(Error::OddLocality(s.locality()));
        }
    }
    Ok(())
}

/// Generous bound on the depth needed to mix any string.
fn depth_limit(n: usize) -> usize {
    8 * n * n + 64
}

/// Walks every term's DP forward one layer at a time from depth 1 and stops
/// at the first depth where `accept(α, α_fcs)` holds for all terms.
fn scan<F>(n: usize, terms: &[MajoranaString], accept: F) -> Result<(usize, Vec<f64>)>
where
    F: Fn(f64, f64) -> bool,
{
    check_terms(n, terms)?;
    let kernel = GateKernel::uniform();
    let limits = terms.iter().map(|s| Ok(alpha_fcs_limit(n, s.locality())?.value)).collect::<Result<Vec<_>>>()?;
    let mut dists = terms.iter().map(SubsetDistribution::point).collect::<Result<Vec<_>>>()?;
    for d in 1..=depth_limit(n) {
        for dist in dists.iter_mut() {
            dist.apply_layer(d, &kernel);
        }
        let alphas: Vec<f64> = dists.iter().map(SubsetDistribution::paired_mass).collect();
        if alphas.iter().zip(&limits).all(|(&a, &l)| accept(a, l)) {
            return Ok((d, alphas));
        }
    }
    Err(Error::Numerical(format!("no depth up to {} met the target", depth_limit(n))))
}

fn per_term(terms: &[MajoranaString], alphas: Vec<f64>) -> Vec<TermAlpha> {
    terms.iter().zip(alphas).map(|(s, alpha)| TermAlpha { indices: s.indices().to_vec(), alpha }).collect()
}

/// Smallest `d ≥ 1` with `α_{S,d} ≥ min(η, 0.99) · α_fcs` for every term.
pub fn recommend_depth_search(n: usize, terms: &[MajoranaString], eta: f64) -> Result<DepthRecommendation> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::InvalidArgument(format!("eta must lie in (0, 1], got {eta}")));
    }
    let frac = eta.min(MAX_THRESHOLD_FRACTION);
    let (d_star, alphas) = scan(n, terms, |a, l| a >= frac * l)?;
    Ok(DepthRecommendation {
        d_star,
        mode: DepthMode::Search,
        per_term_alpha: per_term(terms, alphas),
        calibration_constant: None,
        eta: Some(eta),
    })
}

/// Smallest `d ≥ 1` with `|α_{S,d} − α_fcs| ≤ tol · α_fcs` for every term.
pub fn saturation_depth(n: usize, terms: &[MajoranaString], tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(scan(n, terms, |a, l| (a - l).abs() <= tol * l)?.0)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CalibrationPoint {
    pub n: usize,
    pub d_int: usize,
    pub d_search: usize,
    pub d_formula: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Calibration {
    /// Smallest constant for which the unrounded formula reaches every searched depth.
    pub fitted_constant: f64,
    /// Fraction of grid points with `d_search ≤ d_formula` at the constant used.
    pub agreement: f64,
    pub constant_used: f64,
    pub points: Vec<CalibrationPoint>,
}

/// Compares the formula at constant `c` against the search for the pair
/// `{1, 1 + d_int}` on every `(n, d_int)` of the grid.
pub fn calibrate_formula_constant(ns: &[usize], d_ints: &[usize], c: f64, eta: f64) -> Result<Calibration> {
    let mut points = Vec::new();
    let mut fitted: f64 = 0.0;
    for &n in ns {
        for &d_int in d_ints {
            if d_int + 1 > 2 * n {
                continue;
            }
            let s = MajoranaString::new(n, vec![1, 1 + d_int])?;
            let d_search = recommend_depth_search(n, &[s], eta)?.d_star;
            let d_formula = recommend_depth_formula(n, d_int, c, true)?.d_star;
            let x = d_int as f64;
            fitted = fitted.max(d_search as f64 / (x * x / (n as f64).ln()).max(x));
            points.push(CalibrationPoint { n, d_int, d_search, d_formula });
        }
    }
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty calibration grid".into()));
    }
    let ok = points.iter().filter(|p| p.d_search <= p.d_formula).count();
    Ok(Calibration {
        fitted_constant: fitted,
        agreement: ok as f64 / points.len() as f64,
        constant_used: c,
        points,
    })
}
