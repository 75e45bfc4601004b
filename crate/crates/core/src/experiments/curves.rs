//! `α` against depth for several engines.

use crate::alpha::{
    alpha_dp_curve, alpha_exact_dp, alpha_fcs_limit, alpha_k_product, alpha_monte_carlo, alpha_pn_exact,
    alpha_slrw_poisson, alpha_slrw_sum, majorana_to_y, AlphaMethod, AlphaResult,
};
use crate::error::{Error, Result};
use crate::experiments::{num, resolve_depths, with_workers, ExperimentConfig, ExperimentOutput};
use crate::majorana::MajoranaString;
use crate::rng::{stream, StreamRng};

fn pair_y(s: &MajoranaString) -> Option<(usize, usize)> {
    match s.indices() {
        &[a, b] => {
            let (i, j) = (majorana_to_y(a), majorana_to_y(b));
            Some((i.min(j), i.max(j)))
        }
        _ => None,
    }
}

/// Rows `n,S,d,alpha_exact,alpha_product,alpha_slrw`; the last two are
/// empty where the formulas do not apply (even depth, or `k ≠ 2` for the walk).
pub fn run_alpha_curves(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let sets = cfg.index_sets()?;
    if sets.is_empty() {
        return Err(Error::Config("alpha-curves needs at least one observable".into()));
    }
    let depths = resolve_depths(cfg, &sets)?;
    let d_max = depths.iter().copied().max().unwrap_or(0);
    let mut csv = cfg.provenance();
    csv.push_str("n,S,d,alpha_exact,alpha_product,alpha_slrw\n");
    for s in &sets {
        let exact = alpha_dp_curve(cfg.n, s, d_max)?;
        for &d in &depths {
            let odd = d % 2 == 1;
            let product = if odd { Some(alpha_k_product(cfg.n, d, s)?.value) } else { None };
            let slrw = match (odd, pair_y(s)) {
                (true, Some((i, j))) => Some(alpha_slrw_sum(cfg.n, d, i, j)?.value),
                _ => None,
            };
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cfg.n,
                s.label(),
                d,
                exact[d],
                num(product),
                num(slrw)
            ));
        }
    }
    Ok(ExperimentOutput::single("alpha_curves.csv", csv))
}

/// `α` of one string by one method; `None` where the method does not apply.
pub fn alpha_by_method(
    n: usize,
    d: usize,
    s: &MajoranaString,
    method: AlphaMethod,
    trials: usize,
    rng: &mut StreamRng,
) -> Result<Option<AlphaResult>> {
    let odd_pair = if d % 2 == 1 { pair_y(s) } else { None };
    Ok(match method {
        AlphaMethod::ExactDp => Some(alpha_exact_dp(n, d, s)?),
        AlphaMethod::MonteCarlo => Some(alpha_monte_carlo(n, d, s, trials, rng)?),
        AlphaMethod::PnExact => odd_pair.map(|(i, j)| alpha_pn_exact(n, d, i, j)).transpose()?,
        AlphaMethod::SlrwSum => odd_pair.map(|(i, j)| alpha_slrw_sum(n, d, i, j)).transpose()?,
        AlphaMethod::SlrwPoisson => {
            odd_pair.filter(|_| d >= 3).map(|(i, j)| alpha_slrw_poisson(n, d, i, j)).transpose()?
        }
        AlphaMethod::KProduct => (d % 2 == 1).then(|| alpha_k_product(n, d, s)).transpose()?,
        AlphaMethod::FcsLimit => Some(alpha_fcs_limit(n, s.locality())?),
    })
}

/// Rows `n,d,S,method,alpha,stderr` for every (set, depth, method).
pub fn run_alpha_table(cfg: &ExperimentConfig, methods: &[AlphaMethod]) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let sets = cfg.index_sets()?;
    if sets.is_empty() {
        return Err(Error::Config("alpha needs at least one observable".into()));
    }
    let depths = resolve_depths(cfg, &sets)?;
    let jobs: Vec<(usize, usize, AlphaMethod)> = (0..sets.len())
        .flat_map(|si| depths.iter().flat_map(move |&d| methods.iter().map(move |&m| (si, d, m))))
        .collect();
    let rows = with_workers(cfg.workers, || {
        use rayon::prelude::*;
        jobs.par_iter()
            .enumerate()
            .map(|(k, &(si, d, m))| {
                let mut rng = stream(cfg.seed, "alpha-mc", &[k as u64]);
                alpha_by_method(cfg.n, d, &sets[si], m, cfg.trials, &mut rng)
            })
            .collect::<Result<Vec<_>>>()
    })??;
    let mut csv = cfg.provenance();
    csv.push_str("n,d,S,method,alpha,stderr\n");
    for (&(si, d, m), r) in jobs.iter().zip(rows) {
        if let Some(r) = r {
            csv.push_str(&format!("{},{},{},{},{},{}\n", cfg.n, d, sets[si].label(), m, r.value, num(r.stderr)));
        }
    }
    Ok(ExperimentOutput::single("alpha.csv", csv))
}
