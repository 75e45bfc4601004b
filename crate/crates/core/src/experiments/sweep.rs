//! Estimation error against the number of shots, per string and depth.
//!
//! Every repetition draws its own shots. A shot runs one circuit of the
//! largest requested depth and records an outcome at each smaller depth on
//! the way, so all depths are served by the same simulation. Running means
//! are read off at each entry of the shot schedule.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::alpha::alpha_exact_dp;
use crate::error::{Error, Result};
use crate::experiments::{checkpoints, num, random_state, resolve_depths, with_workers, ExperimentConfig, ExperimentOutput};
use crate::gaussian::rotated_basis_expectation;
use crate::majorana::MajoranaString;
use crate::shadow::{sample_nested, BackendState};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub set: Vec<usize>,
    pub d_int: usize,
    pub d: usize,
    pub shots: usize,
    pub reps: usize,
    pub alpha: f64,
    /// `None` when `α = 0`, so that the string cannot be estimated.
    pub rmse: Option<f64>,
    pub truth: Complex64,
}

impl SweepRow {
    pub fn unestimable(&self) -> bool {
        self.rmse.is_none()
    }
}

/// Squared errors of the running mean, `[depth][checkpoint]`, for one repetition.
#[allow(clippy::too_many_arguments)]
fn one_repetition(
    state: &BackendState,
    s: &MajoranaString,
    depths: &[usize],
    alphas: &[f64],
    schedule: &[usize],
    truth: Complex64,
    seed: u64,
    key: [u64; 2],
) -> Result<Vec<Vec<f64>>> {
    let mut sums = vec![Complex64::new(0.0, 0.0); depths.len()];
    let mut out = vec![Vec::with_capacity(schedule.len()); depths.len()];
    let mut next = 0;
    let total = *schedule.last().expect("validated schedule");
    for shot in 0..total {
        let records = sample_nested(state, depths, seed, &[key[0], key[1], shot as u64])?;
        for ((sum, rec), &a) in sums.iter_mut().zip(&records).zip(alphas) {
            if a > 0.0 {
                *sum += rotated_basis_expectation(&rec.q, &rec.outcome, s.indices()) / a;
            }
        }
        if shot + 1 == schedule[next] {
            for (o, sum) in out.iter_mut().zip(&sums) {
                o.push((sum / (shot + 1) as f64 - truth).norm_sqr());
            }
            next += 1;
        }
    }
    Ok(out)
}

/// One random state per string (shared by all its depths), `reps`
/// repetitions of the shot schedule, RMSE against the exact expectation.
pub fn error_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let sets = cfg.index_sets()?;
    if sets.is_empty() {
        return Err(Error::Config("sweep-error needs at least one observable".into()));
    }
    let requested = resolve_depths(cfg, &sets)?;
    let depths = checkpoints(&requested);
    let mut rows = Vec::new();
    for (si, s) in sets.iter().enumerate() {
        let state = random_state(cfg.backend, cfg.n, cfg.seed, &[si as u64])?;
        let truth = state.expectation(s)?;
        let alphas = depths.iter().map(|&d| Ok(alpha_exact_dp(cfg.n, d, s)?.value)).collect::<Result<Vec<_>>>()?;
        let per_rep = with_workers(cfg.workers, || {
            (0..cfg.reps as u64)
                .into_par_iter()
                .map(|r| one_repetition(&state, s, &depths, &alphas, &cfg.shots, truth, cfg.seed, [si as u64, r]))
                .collect::<Result<Vec<_>>>()
        })??;
        for &d in &requested {
            let k = depths.binary_search(&d).expect("depth is a checkpoint");
            for (c, &shots) in cfg.shots.iter().enumerate() {
                let rmse = (alphas[k] > 0.0).then(|| {
                    let mse: f64 = per_rep.iter().map(|r| r[k][c]).sum::<f64>() / cfg.reps as f64;
                    mse.sqrt()
                });
                rows.push(SweepRow {
                    n: cfg.n,
                    set: s.indices().to_vec(),
                    d_int: s.interaction_distance(),
                    d,
                    shots,
                    reps: cfg.reps,
                    alpha: alphas[k],
                    rmse,
                    truth,
                });
            }
        }
    }
    Ok(rows)
}

pub const SWEEP_HEADER: &str = "n,S,d_int,d,shots,reps,alpha,rmse,truth_re,truth_im,unestimable";

pub fn sweep_csv(cfg: &ExperimentConfig, rows: &[SweepRow]) -> String {
    let mut csv = cfg.provenance();
    csv.push_str(SWEEP_HEADER);
    csv.push('\n');
    for r in rows {
        let label: Vec<String> = r.set.iter().map(ToString::to_string).collect();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            label.join(" "),
            r.d_int,
            r.d,
            r.shots,
            r.reps,
            r.alpha,
            num(r.rmse),
            r.truth.re,
            r.truth.im,
            u8::from(r.unestimable())
        ));
    }
    csv
}

pub fn run_error_sweep(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let rows = error_sweep(cfg)?;
    Ok(ExperimentOutput::single("error_sweep.csv", sweep_csv(cfg, &rows)))
}
