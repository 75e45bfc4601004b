//! Experiment drivers behind the command-line tool. Each driver takes an
//! [`ExperimentConfig`] and returns its output files as strings; nothing
//! here depends on the number of worker threads.

pub mod config;
pub mod curves;
pub mod estimate;
pub mod kitaev;
pub mod sweep;
pub mod validation;

use std::path::{Path, PathBuf};

use crate::depth::saturation_depth;
use crate::error::{Error, Result};
use crate::gaussian::CovarianceMatrix;
use crate::majorana::MajoranaString;
use crate::matchgate::BrickworkCircuit;
use crate::rng::stream;
use crate::shadow::{Backend, BackendState};
use crate::statevector::StateVector;

pub use config::{DepthSpec, ExperimentConfig, ObservableSpec};
pub use curves::{run_alpha_curves, run_alpha_table};
pub use estimate::{run_estimate, StateSource};
pub use kitaev::{kitaev_defaults, kitaev_experiment, run_kitaev, KitaevResult};
pub use sweep::{error_sweep, run_error_sweep, SweepRow};
pub use validation::{run_validation, Check, ValidationReport};

/// Relative tolerance defining the saturation depth used for `fcs`.
pub const SATURATION_TOL: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OutputFile {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOutput {
    pub files: Vec<OutputFile>,
}

impl ExperimentOutput {
    pub fn single(name: &str, contents: String) -> Self {
        Self { files: vec![OutputFile { name: name.into(), contents }] }
    }

    pub fn get(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|f| f.name == name).map(|f| f.contents.as_str())
    }

    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|f| {
                let p = dir.join(&f.name);
                std::fs::write(&p, &f.contents)?;
                Ok(p)
            })
            .collect()
    }
}

/// Runs `f` on a dedicated pool of `workers` threads (0: rayon's default).
pub fn with_workers<T, F>(workers: usize, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

/// Replaces `fcs` by the saturation depth of `sets`.
pub fn resolve_depths(cfg: &ExperimentConfig, sets: &[MajoranaString]) -> Result<Vec<usize>> {
    let mut sat = None;
    cfg.depths
        .iter()
        .map(|d| match d {
            DepthSpec::Fixed(d) => Ok(*d),
            DepthSpec::Fcs => {
                if sat.is_none() {
                    sat = Some(saturation_depth(cfg.n, sets, SATURATION_TOL)?);
                }
                Ok(sat.expect("just set"))
            }
        })
        .collect()
}

/// Ascending list without repeats.
pub(crate) fn checkpoints(depths: &[usize]) -> Vec<usize> {
    let mut v = depths.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// A random state for experiment `key`: Haar-random amplitudes for the
/// dense backend, and the vacuum rotated by a depth-`2n` random circuit for
/// the Gaussian one.
pub fn random_state(backend: Backend, n: usize, seed: u64, key: &[u64]) -> Result<BackendState> {
    let mut rng = stream(seed, "state", key);
    match backend {
        Backend::Dense => Ok(BackendState::Dense(StateVector::random(n, &mut rng)?)),
        Backend::Gaussian => {
            let q = BrickworkCircuit::sample(n, 2 * n, &mut rng)?.global_q();
            Ok(BackendState::Gaussian(CovarianceMatrix::vacuum(n).evolve(&q)?))
        }
    }
}

/// Shortest round-trip decimal form; empty for a missing value.
pub(crate) fn num(x: Option<f64>) -> String {
    x.map(|v| format!("{v}")).unwrap_or_default()
}
