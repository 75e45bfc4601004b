//! The shadow estimator: random brickwork measurements and inversion of the
//! shadow channel on each Majorana string.
//!
//! A shot applies a random circuit `U` to the state, measures `b`, and keeps
//! `(Q, b)`. The single-shot estimate of `tr(ρ γ_S)` is
//! `⟨b| U γ_S U† |b⟩ / α_{S,d}`, evaluated as a Pfaffian on the columns `S`
//! of `Q`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::alpha::{alpha_exact_dp, AlphaMethod};
use crate::error::{Error, Result};
use crate::gaussian::{rotated_basis_expectation, CovarianceMatrix};
use crate::majorana::{FermionObservable, MajoranaString};
use crate::matchgate::{synthesize_unitary, BrickworkCircuit, GlobalOrthogonal};
use crate::rng::stream;
use crate::statevector::StateVector;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Dense,
    Gaussian,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Dense => "dense",
            Backend::Gaussian => "gaussian",
        }
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dense" => Ok(Backend::Dense),
            "gaussian" => Ok(Backend::Gaussian),
            _ => Err(Error::InvalidArgument(format!("unknown backend `{s}`"))),
        }
    }
}

/// The state being measured, held by one of the two simulators.
#[derive(Clone, Debug, PartialEq)]
pub enum BackendState {
    Dense(StateVector),
    Gaussian(CovarianceMatrix),
}

impl BackendState {
    pub fn n(&self) -> usize {
        match self {
            BackendState::Dense(s) => s.n(),
            BackendState::Gaussian(m) => m.n(),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            BackendState::Dense(_) => Backend::Dense,
            BackendState::Gaussian(_) => Backend::Gaussian,
        }
    }

    /// Exact `tr(ρ γ_S)`.
    pub fn expectation(&self, s: &MajoranaString) -> Result<Complex64> {
        match self {
            BackendState::Dense(psi) => psi.expectation(s),
            BackendState::Gaussian(m) => m.expectation(s),
        }
    }

    /// Exact `tr(ρ H)`.
    pub fn observable_expectation(&self, h: &FermionObservable) -> Result<Complex64> {
        h.terms().iter().try_fold(Complex64::new(0.0, 0.0), |acc, t| {
            Ok(acc + t.coefficient() * self.expectation(t)?)
        })
    }
}

/// One measurement record `(Q, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShadowSample {
    pub q: GlobalOrthogonal,
    pub outcome: Vec<bool>,
}

impl ShadowSample {
    pub fn n(&self) -> usize {
        self.outcome.len()
    }
}

/// Runs one shot with a depth-`max(depths)` circuit and records a sample at
/// every depth in `depths` (sorted ascending). Each record is distributed
/// exactly as a shot at that depth; records within one call share the
/// circuit prefix and are therefore correlated.
///
/// `key` identifies the shot: circuits draw from `stream(seed, "circuit", key)`
/// and outcomes from `stream(seed, "outcome", key ++ [depth])`.
pub fn sample_nested(state: &BackendState, depths: &[usize], seed: u64, key: &[u64]) -> Result<Vec<ShadowSample>> {
    if depths.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoint depths must be sorted".into()));
    }
    let n = state.n();
    let d_max = depths.last().copied().unwrap_or(0);
    let circuit = BrickworkCircuit::sample(n, d_max, &mut stream(seed, "circuit", key))?;
    let mut q = GlobalOrthogonal::identity(n);
    let mut psi = match state {
        BackendState::Dense(s) => Some(s.clone()),
        BackendState::Gaussian(_) => None,
    };
    let mut out = Vec::with_capacity(depths.len());
    let mut applied = 0;
    for &d in depths {
        for layer in &circuit.layers()[applied..d] {
            for g in layer {
                q.apply_gate_left(g);
                if let Some(psi) = psi.as_mut() {
                    psi.apply_two_qubit(g.qubit, &synthesize_unitary(&g.block));
                }
            }
        }
        applied = d;
        let mut okey = key.to_vec();
        okey.push(d as u64);
        let mut rng = stream(seed, "outcome", &okey);
        let outcome = match (state, psi.as_ref()) {
            (_, Some(psi)) => psi.sample_outcome(&mut rng),
            (BackendState::Gaussian(m), None) => m.evolve(&q)?.sample_outcome(&mut rng)?,
            (BackendState::Dense(_), None) => unreachable!("dense state is always evolved"),
        };
        out.push(ShadowSample { q: q.clone(), outcome });
    }
    Ok(out)
}

/// A single shot at depth `d`; shot `index` of the stream keyed by `seed`.
pub fn sample_shot(state: &BackendState, d: usize, seed: u64, index: u64) -> Result<ShadowSample> {
    Ok(sample_nested(state, &[d], seed, &[index])?.remove(0))
}

/// `shots` independent samples, in shot order, computed in parallel.
pub fn collect_samples(state: &BackendState, d: usize, shots: usize, seed: u64) -> Result<Vec<ShadowSample>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot is required".into()));
    }
    (0..shots as u64).into_par_iter().map(|i| sample_shot(state, d, seed, i)).collect()
}

fn check_alpha(s: &MajoranaString, alpha: f64, depth: usize) -> Result<()> {
    if alpha > 0.0 && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::Unestimable { set: s.to_string(), alpha, depth })
    }
}

/// `⟨b| U γ_S U† |b⟩ / α`. The string's coefficient is ignored.
pub fn single_shot_estimate(sample: &ShadowSample, s: &MajoranaString, alpha: f64) -> Result<Complex64> {
    if sample.n() != s.n() {
        return Err(Error::QubitMismatch { expected: sample.n(), got: s.n() });
    }
    if s.locality() % 2 == 1 {
        return Err(Error::OddLocality(s.locality()));
    }
    check_alpha(s, alpha, 0)?;
    Ok(rotated_basis_expectation(&sample.q, &sample.outcome, s.indices()) / alpha)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Aggregator {
    #[default]
    Mean,
    /// Median (per real and imaginary part) of `batches` batch means.
    MedianOfMeans { batches: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub mean: Complex64,
    /// Unbiased sample variance of the single-shot values, `E|v - v̄|²`.
    pub empirical_variance: f64,
    pub shots: usize,
    /// Smallest `α` among the estimated strings.
    pub alpha_used: f64,
    pub method: AlphaMethod,
}

impl EstimateReport {
    pub fn stderr(&self) -> f64 {
        (self.empirical_variance / self.shots as f64).sqrt()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Location and spread of a list of single-shot values.
pub fn aggregate(values: &[Complex64], agg: Aggregator) -> Result<(Complex64, f64)> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("no samples to aggregate".into()));
    }
    let t = values.len() as f64;
    let mean: Complex64 = values.iter().sum::<Complex64>() / t;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / (t - 1.0)
    } else {
        0.0
    };
    let centre = match agg {
        Aggregator::Mean => mean,
        Aggregator::MedianOfMeans { batches } => {
            if batches == 0 || batches > values.len() {
                return Err(Error::InvalidArgument(format!(
                    "{batches} batches for {} samples",
                    values.len()
                )));
            }
            let size = values.len() / batches;
            let means: Vec<Complex64> = values
                .chunks(size)
                .take(batches)
                .map(|c| c.iter().sum::<Complex64>() / c.len() as f64)
                .collect();
            Complex64::new(median(means.iter().map(|m| m.re).collect()), median(means.iter().map(|m| m.im).collect()))
        }
    };
    Ok((centre, var))
}

pub fn estimate_majorana(
    samples: &[ShadowSample],
    s: &MajoranaString,
    alpha: f64,
    agg: Aggregator,
) -> Result<EstimateReport> {
    let values = samples.iter().map(|x| single_shot_estimate(x, s, alpha)).collect::<Result<Vec<_>>>()?;
    let (mean, empirical_variance) = aggregate(&values, agg)?;
    Ok(EstimateReport { mean, empirical_variance, shots: values.len(), alpha_used: alpha, method: AlphaMethod::ExactDp })
}

/// `α_{S,d}` for each index set of an observable.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlphaTable {
    depth: usize,
    method: Option<AlphaMethod>,
    values: BTreeMap<Vec<usize>, f64>,
}

impl AlphaTable {
    pub fn new(depth: usize) -> Self {
        Self { depth, method: None, values: BTreeMap::new() }
    }

    /// Exact DP values for every term of `h` at depth `d`.
    pub fn exact(h: &FermionObservable, d: usize) -> Result<Self> {
        let mut t = Self::new(d);
        t.method = Some(AlphaMethod::ExactDp);
        for s in h.terms() {
            t.values.insert(s.indices().to_vec(), alpha_exact_dp(h.n(), d, s)?.value);
        }
        Ok(t)
    }

    pub fn insert(&mut self, indices: Vec<usize>, alpha: f64) {
        self.values.insert(indices, alpha);
    }

    pub fn get(&self, indices: &[usize]) -> Option<f64> {
        self.values.get(indices).copied()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn method(&self) -> AlphaMethod {
        self.method.unwrap_or(AlphaMethod::ExactDp)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[usize], f64)> {
        self.values.iter().map(|(k, &v)| (k.as_slice(), v))
    }

    /// `α` for each term of `h`, failing on missing or non-positive entries.
    pub fn lookup(&self, h: &FermionObservable) -> Result<Vec<f64>> {
        h.terms()
            .iter()
            .map(|s| {
                let a = self
                    .get(s.indices())
                    .ok_or_else(|| Error::InvalidArgument(format!("no alpha for term {s}")))?;
                check_alpha(s, a, self.depth)?;
                Ok(a)
            })
            .collect()
    }
}

/// `Σ_S c_S ⟨b| U γ_S U† |b⟩ / α_S` for one sample.
pub fn single_shot_observable(sample: &ShadowSample, h: &FermionObservable, alphas: &[f64]) -> Complex64 {
    h.terms()
        .iter()
        .zip(alphas)
        .map(|(s, &a)| s.coefficient() * rotated_basis_expectation(&sample.q, &sample.outcome, s.indices()) / a)
        .sum()
}

/// Estimate of `tr(ρ H)` with all terms read off the same samples.
///
/// For Hermitian `H` every single-shot value is real up to rounding; an
/// imaginary part above `1e-6 Σ |c_S| / α_S` is reported as a numerical error.
pub fn estimate_observable(
    samples: &[ShadowSample],
    h: &FermionObservable,
    table: &AlphaTable,
    agg: Aggregator,
) -> Result<EstimateReport> {
    let alphas = table.lookup(h)?;
    if let Some(x) = samples.iter().find(|x| x.n() != h.n()) {
        return Err(Error::QubitMismatch { expected: h.n(), got: x.n() });
    }
    let values: Vec<Complex64> = samples.iter().map(|x| single_shot_observable(x, h, &alphas)).collect();
    let (mean, empirical_variance) = aggregate(&values, agg)?;
    if h.is_hermitian(1e-12) {
        let scale: f64 = h.terms().iter().zip(&alphas).map(|(s, a)| s.coefficient().norm() / a).sum();
        if mean.im.abs() > 1e-6 * scale {
            return Err(Error::Numerical(format!("imaginary residual {:.3e} on a Hermitian observable", mean.im)));
        }
    }
    Ok(EstimateReport {
        mean,
        empirical_variance,
        shots: values.len(),
        alpha_used: alphas.iter().copied().fold(f64::INFINITY, f64::min),
        method: table.method(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::kitaev_chain;
    use crate::statevector::bits_to_index;

    fn ms(n: usize, idx: &[usize]) -> MajoranaString {
        MajoranaString::new(n, idx.to_vec()).unwrap()
    }

    fn vacuum_dense(n: usize) -> BackendState {
        BackendState::Dense(StateVector::zero(n).unwrap())
    }

    #[test]
    fn collect_is_deterministic_and_sized() {
        let st = vacuum_dense(4);
        let a = collect_samples(&st, 3, 17, 5).unwrap();
        let b = collect_samples(&st, 3, 17, 5).unwrap();
        assert_eq!(a.len(), 17);
        assert_eq!(a, b);
        assert_ne!(a, collect_samples(&st, 3, 17, 6).unwrap());
        assert!(collect_samples(&st, 3, 0, 5).is_err());
    }

    #[test]
    fn depth_zero_vacuum() {
        for st in [vacuum_dense(4), BackendState::Gaussian(CovarianceMatrix::vacuum(4))] {
            for x in collect_samples(&st, 0, 20, 1).unwrap() {
                assert!(x.outcome.iter().all(|&b| !b));
                assert_eq!(single_shot_estimate(&x, &ms(4, &[1, 2]), 1.0).unwrap(), Complex64::new(0.0, 1.0));
                assert_eq!(single_shot_estimate(&x, &ms(4, &[1, 3]), 1.0).unwrap().norm(), 0.0);
            }
        }
    }

    #[test]
    fn kernel_matches_dense_sandwich() {
        let n = 6;
        for i in 0..30u64 {
            let x = sample_shot(&vacuum_dense(n), 4, 9, i).unwrap();
            let c = BrickworkCircuit::sample(n, 4, &mut stream(9, "circuit", &[i])).unwrap();
            assert_eq!(c.global_q(), x.q);
            let s = ms(n, &[2, 5, 6, 11]);
            // (U†|b⟩)_c = conj(⟨b|U|c⟩)
            let bi = bits_to_index(&x.outcome);
            let amps = (0..1usize << n)
                .map(|col| StateVector::basis_index(n, col).unwrap().evolved(&c).unwrap().amplitudes()[bi].conj())
                .collect();
            let basis = StateVector::from_amplitudes(n, amps).unwrap();
            let want = basis.expectation(&s).unwrap();
            let got = single_shot_estimate(&x, &s, 1.0).unwrap();
            assert!((got - want).norm() < 1e-10);
        }
    }

    #[test]
    fn nested_records_match_single_shots() {
        let st = BackendState::Dense(StateVector::random(6, &mut stream(3, "state", &[])).unwrap());
        let nested = sample_nested(&st, &[1, 3, 5], 11, &[7]).unwrap();
        let c = BrickworkCircuit::sample(6, 5, &mut stream(11, "circuit", &[7])).unwrap();
        for (x, d) in nested.iter().zip([1, 3, 5]) {
            assert_eq!(x.q, c.truncated(d).global_q());
        }
        assert_eq!(nested[2], sample_shot(&st, 5, 11, 7).unwrap());
        assert!(sample_nested(&st, &[3, 1], 11, &[7]).is_err());
    }

    #[test]
    fn gaussian_and_dense_backends_agree_in_distribution() {
        let n = 4;
        let dense = vacuum_dense(n);
        let gauss = BackendState::Gaussian(CovarianceMatrix::vacuum(n));
        let a = collect_samples(&dense, 3, 50, 2).unwrap();
        let b = collect_samples(&gauss, 3, 50, 2).unwrap();
        // same circuits, outcomes drawn from the same Born distribution
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.q, y.q);
        }
    }

    #[test]
    fn unestimable_and_shape_errors() {
        let x = sample_shot(&vacuum_dense(4), 1, 0, 0).unwrap();
        assert!(matches!(single_shot_estimate(&x, &ms(4, &[1, 8]), 0.0), Err(Error::Unestimable { .. })));
        assert!(matches!(single_shot_estimate(&x, &ms(4, &[1, 2, 3]), 1.0), Err(Error::OddLocality(3))));
        assert!(single_shot_estimate(&x, &ms(6, &[1, 2]), 1.0).is_err());
        let h = FermionObservable::new(4, vec![ms(4, &[1, 8])]).unwrap();
        assert!(estimate_observable(&[x.clone()], &h, &AlphaTable::new(1), Aggregator::Mean).is_err());
        let t = AlphaTable::exact(&h, 1).unwrap();
        assert!(matches!(estimate_observable(&[x], &h, &t, Aggregator::Mean), Err(Error::Unestimable { .. })));
    }

    #[test]
    fn vacuum_pair_estimate() {
        let n = 4;
        let s = ms(n, &[1, 2]);
        let alpha = alpha_exact_dp(n, 3, &s).unwrap().value;
        let samples = collect_samples(&vacuum_dense(n), 3, 20_000, 4).unwrap();
        let r = estimate_majorana(&samples, &s, alpha, Aggregator::Mean).unwrap();
        assert!((r.mean - Complex64::new(0.0, 1.0)).norm() < 3.0 * r.stderr() * 1.5);
        let half = estimate_majorana(&samples[..10_000], &s, alpha, Aggregator::Mean).unwrap();
        let tol = 3.0 * (r.stderr().powi(2) + half.stderr().powi(2)).sqrt();
        assert!((r.mean - half.mean).norm() < tol);
        let mom = estimate_majorana(&samples, &s, alpha, Aggregator::MedianOfMeans { batches: 10 }).unwrap();
        assert!((mom.mean - Complex64::new(0.0, 1.0)).norm() < 0.1);
    }

    #[test]
    fn kitaev_two_qubits() {
        let h = kitaev_chain(2, 2.0, 1.0, 0.4).unwrap();
        let st = vacuum_dense(2);
        assert!((st.observable_expectation(&h).unwrap() - Complex64::new(2.0, 0.0)).norm() < 1e-12);
        let table = AlphaTable::exact(&h, 3).unwrap();
        let samples = collect_samples(&st, 3, 20_000, 8).unwrap();
        let r = estimate_observable(&samples, &h, &table, Aggregator::Mean).unwrap();
        assert!((r.mean.re - 2.0).abs() < 3.0 * r.stderr());
        assert!(r.mean.im.abs() < 1e-9);
    }

    #[test]
    fn aggregate_edge_cases() {
        let v = [Complex64::new(1.0, 0.0), Complex64::new(3.0, 2.0)];
        let (m, var) = aggregate(&v, Aggregator::Mean).unwrap();
        assert_eq!(m, Complex64::new(2.0, 1.0));
        assert!((var - 4.0).abs() < 1e-15);
        assert!(aggregate(&[], Aggregator::Mean).is_err());
        assert!(aggregate(&v, Aggregator::MedianOfMeans { batches: 3 }).is_err());
        assert_eq!(median(vec![3.0, 1.0, 2.0]), 2.0);
        assert_eq!("gaussian".parse::<Backend>().unwrap(), Backend::Gaussian);
        assert!("gpu".parse::<Backend>().is_err());
    }
}
