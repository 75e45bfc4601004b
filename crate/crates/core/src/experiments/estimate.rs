//! Observable estimates from one batch of shots per depth.

use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::experiments::{random_state, resolve_depths, with_workers, ExperimentConfig, ExperimentOutput};
use crate::gaussian::CovarianceMatrix;
use crate::shadow::{collect_samples, estimate_observable, Aggregator, AlphaTable, Backend, BackendState};
use crate::statevector::StateVector;

/// Where the measured state comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StateSource {
    /// [`random_state`] with key `[0]`.
    Random,
    Vacuum,
    /// Dense amplitudes in the format of [`StateVector::write_binary`].
    File(PathBuf),
}

impl StateSource {
    pub fn load(&self, backend: Backend, n: usize, seed: u64) -> Result<BackendState> {
        let state = match (self, backend) {
            (StateSource::Random, _) => random_state(backend, n, seed, &[0])?,
            (StateSource::Vacuum, Backend::Dense) => BackendState::Dense(StateVector::zero(n)?),
            (StateSource::Vacuum, Backend::Gaussian) => BackendState::Gaussian(CovarianceMatrix::vacuum(n)),
            (StateSource::File(p), Backend::Dense) => {
                BackendState::Dense(StateVector::read_binary(std::io::BufReader::new(std::fs::File::open(p)?))?)
            }
            (StateSource::File(_), Backend::Gaussian) => {
                return Err(Error::Config("state files hold dense amplitudes; use the dense backend".into()))
            }
        };
        if state.n() != n {
            return Err(Error::QubitMismatch { expected: n, got: state.n() });
        }
        Ok(state)
    }
}

pub const ESTIMATE_HEADER: &str = "observable_id,n,d,shots,alpha,mean_re,mean_im,emp_var";

/// One row per observable, depth and entry of the shot schedule. Shot
/// counts are prefixes of the same sample list, so rows at a fixed depth
/// refine one another. `alpha` is the smallest term eigenvalue.
pub fn run_estimate(cfg: &ExperimentConfig, source: &StateSource, agg: Aggregator) -> Result<ExperimentOutput> {
    cfg.validate()?;
    if cfg.observables.is_empty() {
        return Err(Error::Config("estimate needs at least one observable".into()));
    }
    let state = source.load(cfg.backend, cfg.n, cfg.seed)?;
    let depths = resolve_depths(cfg, &cfg.index_sets()?)?;
    let total = *cfg.shots.last().expect("validated schedule");
    let mut csv = cfg.provenance();
    csv.push_str(ESTIMATE_HEADER);
    csv.push('\n');
    for &d in &depths {
        let samples = with_workers(cfg.workers, || collect_samples(&state, d, total, cfg.seed))??;
        for (id, spec) in cfg.observables.iter().enumerate() {
            let h = spec.build(cfg.n)?;
            let table = AlphaTable::exact(&h, d)?;
            for &shots in &cfg.shots {
                let r = estimate_observable(&samples[..shots], &h, &table, agg)?;
                csv.push_str(&format!(
                    "{id},{},{d},{shots},{},{},{},{}\n",
                    cfg.n, r.alpha_used, r.mean.re, r.mean.im, r.empirical_variance
                ));
            }
        }
    }
    Ok(ExperimentOutput::single("estimate.csv", csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(text).unwrap()
    }

    #[test]
    fn vacuum_pair_is_i() {
        let c = cfg("n = 4\ndepths = 3\nobservables = 1 2\nshots = 2000, 20000\nseed = 2");
        let out = run_estimate(&c, &StateSource::Vacuum, Aggregator::Mean).unwrap();
        let csv = out.get("estimate.csv").unwrap();
        assert_eq!(csv.lines().nth(1).unwrap(), ESTIMATE_HEADER);
        let last: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(last[3], 20000.0);
        let sigma = (last[7] / 20000.0).sqrt();
        assert!(last[5].abs() < 1e-12);
        assert!((last[6] - 1.0).abs() < 3.0 * sigma, "{last:?}");
    }

    #[test]
    fn kitaev_vacuum_on_gaussian_backend() {
        let c = cfg("n = 4\ndepths = 5\nobservables = kitaev\nshots = 20000\nbackend = gaussian\nseed = 9");
        let csv = run_estimate(&c, &StateSource::Vacuum, Aggregator::Mean).unwrap().files.remove(0).contents;
        let row: Vec<f64> = csv.lines().last().unwrap().split(',').map(|x| x.parse().unwrap()).collect();
        let h = crate::majorana::kitaev_chain(4, 2.0, 1.0, 0.4).unwrap();
        let truth = h.basis_expectation(&[false; 4]).unwrap().re;
        let sigma = (row[7] / 20000.0).sqrt();
        assert!((row[5] - truth).abs() < 4.0 * sigma, "{row:?} vs {truth}");
    }

    #[test]
    fn state_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("psi.bin");
        let psi = StateVector::random(4, &mut crate::rng::stream(1, "test", &[])).unwrap();
        psi.write_binary(std::fs::File::create(&path).unwrap()).unwrap();
        let loaded = StateSource::File(path.clone()).load(Backend::Dense, 4, 0).unwrap();
        assert_eq!(loaded, BackendState::Dense(psi));
        assert!(StateSource::File(path.clone()).load(Backend::Dense, 6, 0).is_err());
        assert!(StateSource::File(path).load(Backend::Gaussian, 4, 0).is_err());
    }

    #[test]
    fn unestimable_depth_is_an_error() {
        let c = cfg("n = 6\ndepths = 1\nobservables = 2 9\nshots = 10");
        assert!(matches!(
            run_estimate(&c, &StateSource::Vacuum, Aggregator::Mean),
            Err(Error::Unestimable { .. })
        ));
    }
}
