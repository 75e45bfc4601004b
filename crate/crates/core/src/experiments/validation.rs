//! Cross-engine consistency checks at fixed seeds.
//!
//! Every check reports what it measured against its tolerance. Checks marked
//! non-gating record known gaps between the closed-form analysis and the
//! exact chain; they are reported but do not fail the run.

use num_complex::Complex64;
use serde::Serialize;

use crate::alpha::slrw::alpha_l;
use crate::alpha::tensor::{estimate_twirl_tensor, PAULI_LABELS};
use crate::alpha::{
    alpha_dp_curve_with_kernel, alpha_exact_dp, alpha_fcs_limit, alpha_k_product, alpha_monte_carlo, alpha_pn_exact,
    alpha_slrw_poisson, alpha_slrw_sum, pn::pair_coordinates, slrw_deviation, slrw_propagator, t_tensor, GateKernel,
};
use crate::error::Result;
use crate::experiments::ExperimentOutput;
use crate::gaussian::{rotated_basis_expectation, CovarianceMatrix};
use crate::majorana::{subsets, MajoranaString};
use crate::matchgate::{sample_haar_o4, synthesize_unitary, BrickworkCircuit, GateUnitary};
use crate::rng::stream;
use crate::statevector::{bits_to_index, StateVector};

/// The twirl tensor written out row by row (output label), columns in
/// [`PAULI_LABELS`] order: `.` is 0, `1` is 1, `q` is 1/4 and `s` is 1/6.
pub const REFERENCE_GRID: [&str; 16] = [
    "1...............",
    ".qq....q...q....",
    ".qq....q...q....",
    "...s.ss..ss.s...",
    "....q...q....qq.",
    "...s.ss..ss.s...",
    "...s.ss..ss.s...",
    ".qq....q...q....",
    "....q...q....qq.",
    "...s.ss..ss.s...",
    "...s.ss..ss.s...",
    ".qq....q...q....",
    "...s.ss..ss.s...",
    "....q...q....qq.",
    "....q...q....qq.",
    "...............1",
];

pub fn reference_grid() -> [[f64; 16]; 16] {
    std::array::from_fn(|r| {
        let row = REFERENCE_GRID[r].as_bytes();
        std::array::from_fn(|c| match row[c] {
            b'1' => 1.0,
            b'q' => 0.25,
            b's' => 1.0 / 6.0,
            _ => 0.0,
        })
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub tolerance: f64,
    pub measured: f64,
    pub passed: bool,
    /// Whether a failure fails the whole run.
    pub gating: bool,
    pub note: String,
}

impl Check {
    /// Passes when `measured ≤ tolerance`.
    fn at_most(name: &str, measured: f64, tolerance: f64, note: String) -> Self {
        Self { name: name.into(), tolerance, measured, passed: measured <= tolerance, gating: true, note }
    }

    fn non_gating(mut self) -> Self {
        self.gating = false;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub seed: u64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn ms(n: usize, idx: &[usize]) -> MajoranaString {
    MajoranaString::new(n, idx.to_vec()).expect("static index set")
}

fn table_exact() -> Check {
    let exact = t_tensor();
    let grid = reference_grid();
    let mut bad = Vec::new();
    for (r, row) in grid.iter().enumerate() {
        for (c, &want) in row.iter().enumerate() {
            let got = exact.get(r, c);
            if (*got.numer() as f64 / *got.denom() as f64 - want).abs() > 0.0 {
                bad.push(format!("{}/{}", PAULI_LABELS[r], PAULI_LABELS[c]));
            }
        }
    }
    Check::at_most("tensor_exact", bad.len() as f64, 0.0, format!("mismatched entries: [{}]", bad.join(", ")))
}

fn table_monte_carlo(samples: usize, seed: u64) -> Check {
    let (mean, err) = estimate_twirl_tensor(samples, &mut stream(seed, "validate-twirl", &[]));
    let grid = reference_grid();
    let mut worst: (f64, usize, usize) = (0.0, 0, 0);
    for r in 0..16 {
        for c in 0..16 {
            let z = (mean[r][c] - grid[r][c]).abs() / (err[r][c] + 1e-12);
            if z > worst.0 {
                worst = (z, r, c);
            }
        }
    }
    Check::at_most(
        "tensor_monte_carlo_z",
        worst.0,
        4.5,
        format!("{samples} Haar O(4) samples; worst {}/{}", PAULI_LABELS[worst.1], PAULI_LABELS[worst.2]),
    )
}

/// Largest weight difference between `kernel` and the one read off [`REFERENCE_GRID`].
pub fn kernel_vs_reference(kernel: &GateKernel) -> Check {
    let reference = GateKernel::from_tensor(&reference_grid());
    let mut diff: f64 = 0.0;
    for a in 0..16u8 {
        for b in 0..16u8 {
            diff = diff.max((kernel.weight(b, a) - reference.weight(b, a)).abs());
        }
    }
    Check::at_most("kernel_vs_reference", diff, 1e-15, "transition weights against the reference tensor".into())
}

/// All two-mode strings of an `n`-qubit system.
fn all_pairs(n: usize) -> impl Iterator<Item = MajoranaString> {
    subsets(2 * n, 2).map(move |s| MajoranaString::new(n, s).expect("valid pair"))
}

fn dp_vs_pn() -> Result<Check> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in [4, 8] {
        for d in [1, 3, 5, 9] {
            for s in all_pairs(n) {
                let (i, j) = pair_coordinates(&s)?;
                let a = alpha_exact_dp(n, d, &s)?.value;
                let b = alpha_pn_exact(n, d, i, j)?.value;
                worst = worst.max((a - b).abs());
                cases += 1;
            }
        }
    }
    Ok(Check::at_most("dp_vs_pn", worst, 1e-10, format!("{cases} two-mode cases, n in {{4, 8}}, d in {{1, 3, 5, 9}}")))
}

/// Largest `|DP − MC| / stderr` over a fixed panel of strings at `n = 8`,
/// with the DP run on `kernel`. A kernel that differs from the physical
/// twirl shows up as a large z-score.
pub fn dp_vs_mc(kernel: &GateKernel, trials: usize, seed: u64) -> Result<Check> {
    let n = 8;
    let panel = [ms(n, &[1, 2]), ms(n, &[2, 7]), ms(n, &[3, 14]), ms(n, &[1, 2, 5, 12]), ms(n, &[1, 3, 4, 6, 9, 10])];
    let depths = [1, 3, 5, 9];
    let mut worst = (0.0, String::new());
    for (si, s) in panel.iter().enumerate() {
        let curve = alpha_dp_curve_with_kernel(n, s, 9, kernel)?;
        for (di, &d) in depths.iter().enumerate() {
            let mut rng = stream(seed, "validate-mc", &[si as u64, di as u64]);
            let mc = alpha_monte_carlo(n, d, s, trials, &mut rng)?;
            let z = (curve[d] - mc.value).abs() / (mc.stderr.unwrap_or(0.0) + 1e-12);
            if z > worst.0 {
                worst = (z, format!("{s} at d = {d}: dp {:.6}, mc {:.6}", curve[d], mc.value));
            }
        }
    }
    Ok(Check::at_most("dp_vs_mc_z", worst.0, 5.0, format!("{trials} circuits per case; worst {}", worst.1)))
}

fn fcs_limit() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for s in [ms(8, &[1, 2]), ms(8, &[3, 14]), ms(8, &[1, 4, 9, 16]), ms(8, &[2, 3, 5, 8])] {
        let lim = alpha_fcs_limit(8, s.locality())?.value;
        worst = worst.max((alpha_exact_dp(8, 200, &s)?.value - lim).abs());
    }
    Ok(Check::at_most("dp_deep_limit", worst, 1e-6, "n = 8, d = 200, k in {2, 4}".into()))
}

fn product_limit() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for s in [ms(8, &[1, 2]), ms(8, &[3, 14]), ms(8, &[1, 4, 9, 16]), ms(8, &[2, 3, 5, 8])] {
        let lim = alpha_fcs_limit(8, s.locality())?.value;
        worst = worst.max((alpha_k_product(8, 401, &s)?.value - lim).abs());
    }
    Ok(Check::at_most("product_deep_limit", worst, 1e-8, "n = 8, d = 401, k in {2, 4}".into()))
}

fn slrw_sum_vs_propagator() -> Result<Check> {
    let mut worst: f64 = 0.0;
    for big_n in [2usize, 4, 5, 6] {
        for t in 0..=20 {
            for i in 1..=big_n {
                for j in 1..=big_n {
                    let via_l: f64 = (1..=big_n)
                        .map(|mu| slrw_propagator(big_n, i, mu, t) * slrw_propagator(big_n, j, mu, t))
                        .sum::<f64>()
                        / 3.0;
                    let s = alpha_slrw_sum(2 * big_n, 2 * t + 1, i, j)?.value;
                    worst = worst.max((s - via_l).abs());
                }
            }
        }
    }
    Ok(Check::at_most("slrw_sum_vs_propagator", worst, 1e-12, "N in {2, 4, 5, 6}, t <= 20".into()))
}

fn slrw_poisson() -> Result<Check> {
    let mut worst = (0.0, String::new());
    for big_n in 4..=6 {
        for t in 10..=30 {
            for i in 1..=big_n {
                for j in i..=big_n {
                    let d = 2 * t + 1;
                    let gap = (alpha_slrw_poisson(2 * big_n, d, i, j)?.value
                        - alpha_slrw_sum(2 * big_n, d, i, j)?.value)
                        .abs();
                    if gap > worst.0 {
                        worst = (gap, format!("N = {big_n}, t = {t}, (i, j) = ({i}, {j})"));
                    }
                }
            }
        }
    }
    Ok(Check::at_most("slrw_poisson_vs_sum", worst.0, 1e-6, format!("N in 4..=6, t in 10..=30; worst {}", worst.1))
        .non_gating())
}

fn deviation_checks() -> Result<Vec<Check>> {
    let (mut sum, mut diag) = (0.0f64, f64::NEG_INFINITY);
    let mut off = (f64::INFINITY, String::new());
    for n in [8, 12] {
        let big_n = n / 2;
        for t in 0..=15 {
            for i in 1..=big_n {
                for j in i..=big_n {
                    let r = slrw_deviation(n, t, i, j)?;
                    sum = sum.max(r.sum().abs());
                    diag = diag.max(r.max_diagonal());
                    if let Some((v, mu, nu)) = r.min_off_diagonal() {
                        if v < off.0 {
                            off = (v, format!("n = {n}, t = {t}, (i, j) = ({i}, {j}), (mu, nu) = ({mu}, {nu})"));
                        }
                    }
                }
            }
        }
    }
    let grid = "n in {8, 12}, t <= 15, all i <= j";
    Ok(vec![
        Check::at_most("deviation_total_mass", sum, 1e-12, grid.into()),
        Check::at_most("deviation_diagonal_max", diag, 1e-12, grid.into()),
        Check::at_most("deviation_off_diagonal_neg_min", -off.0, 1e-12, format!("{grid}; worst {}", off.1)).non_gating(),
    ])
}

/// `α` and `max_{t' ≤ t} α^L` for `d = 2t + 1 ∈ {3, …, 31}` on `n ∈ {8, 12}`, `i < j`.
fn walk_bounds() -> Result<Vec<Check>> {
    let mut thm = (f64::INFINITY, String::new());
    let mut lemma = (f64::NEG_INFINITY, String::new());
    for n in [8usize, 12] {
        let big_n = n / 2;
        for i in 1..=big_n {
            for j in i + 1..=big_n {
                let mut best_l: f64 = alpha_l(big_n, 0, i, j);
                for t in 1..=15 {
                    let d = 2 * t + 1;
                    let a = alpha_pn_exact(n, d, i, j)?.value;
                    let l = alpha_l(big_n, t, i, j);
                    best_l = best_l.max(l);
                    let where_ = format!("n = {n}, (i, j) = ({i}, {j}), d = {d}: alpha {a:.6}, alpha_L max {best_l:.6}");
                    let slack = a - 47.0 / 72.0 * best_l;
                    if slack < thm.0 {
                        thm = (slack, where_.clone());
                    }
                    let excess = -(a - l) * 3.0 - 25.0 / 72.0 * 3.0 * best_l;
                    if excess > lemma.0 {
                        lemma = (excess, where_);
                    }
                }
            }
        }
    }
    Ok(vec![
        Check::at_most("walk_lower_bound_deficit", -thm.0, 1e-12, format!("worst {}", thm.1)).non_gating(),
        Check::at_most("walk_deviation_bound_excess", lemma.0, 1e-12, format!("worst {}", lemma.1)),
    ])
}

fn random_gaussian_pair(n: usize, seed: u64, case: u64) -> Result<(CovarianceMatrix, StateVector)> {
    let c = BrickworkCircuit::sample(n, 2 * n, &mut stream(seed, "validate-state", &[case]))?;
    let m = CovarianceMatrix::vacuum(n).evolve(&c.global_q())?;
    let psi = StateVector::zero(n)?.evolved(&c)?;
    Ok((m, psi))
}

fn gaussian_vs_dense(seed: u64) -> Result<Check> {
    let n = 4;
    let mut worst: f64 = 0.0;
    for case in 0..5 {
        let (m, psi) = random_gaussian_pair(n, seed, case)?;
        for k in [2, 4, 6] {
            for idx in subsets(2 * n, k) {
                let s = MajoranaString::new(n, idx)?;
                worst = worst.max((m.expectation(&s)? - psi.expectation(&s)?).norm());
            }
        }
    }
    Ok(Check::at_most("gaussian_vs_dense_expectations", worst, 1e-10, "n = 4, 5 states, all k in {2, 4, 6}".into()))
}

/// `U†|b⟩` for the circuit unitary `U`, column by column.
fn pulled_back_basis(c: &BrickworkCircuit, b: &[bool]) -> Result<StateVector> {
    let n = c.n();
    let bi = bits_to_index(b);
    let amps = (0..1usize << n)
        .map(|col| Ok(StateVector::basis_index(n, col)?.evolved(c)?.amplitudes()[bi].conj()))
        .collect::<Result<Vec<Complex64>>>()?;
    StateVector::from_amplitudes(n, amps)
}

fn kernel_vs_dense(seed: u64) -> Result<Check> {
    let n = 4;
    let mut worst: f64 = 0.0;
    let mut rng = stream(seed, "validate-kernel", &[]);
    for case in 0..20u64 {
        let c = BrickworkCircuit::sample(n, 1 + case as usize % 6, &mut rng)?;
        let q = c.global_q();
        let b: Vec<bool> = (0..n).map(|j| (case >> j) & 1 == 1).collect();
        let phi = pulled_back_basis(&c, &b)?;
        for k in [2, 4] {
            for idx in subsets(2 * n, k) {
                let s = MajoranaString::new(n, idx.clone())?;
                worst = worst.max((rotated_basis_expectation(&q, &b, &idx) - phi.expectation(&s)?).norm());
            }
        }
    }
    Ok(Check::at_most("kernel_vs_dense", worst, 1e-10, "n = 4, 20 circuits, k in {2, 4}".into()))
}

fn sampling_tvd(seed: u64) -> Result<Check> {
    let n = 4;
    let shots = 20_000;
    let (m, psi) = random_gaussian_pair(n, seed, 99)?;
    let mut counts = vec![0usize; 1 << n];
    let mut rng = stream(seed, "validate-sampling", &[]);
    for _ in 0..shots {
        counts[bits_to_index(&m.sample_outcome(&mut rng)?)] += 1;
    }
    let tvd = 0.5
        * psi.probabilities().iter().zip(&counts).map(|(p, &c)| (p - c as f64 / shots as f64).abs()).sum::<f64>();
    Ok(Check::at_most("gaussian_sampling_tvd", tvd, 0.03, format!("n = {n}, {shots} shots")))
}

fn unitarity(seed: u64) -> Result<Check> {
    let mut rng = stream(seed, "validate-unitary", &[]);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let u = synthesize_unitary(&sample_haar_o4(&mut rng));
        worst = worst.max((u.adjoint() * u - GateUnitary::identity()).camax());
    }
    for d in [1, 7, 40] {
        worst = worst.max(BrickworkCircuit::sample(10, d, &mut rng)?.global_q().orthogonality_error());
    }
    Ok(Check::at_most("unitarity", worst, 1e-10, "200 synthesized gates, Q of three n = 10 circuits".into()))
}

pub fn validate(seed: u64) -> Result<ValidationReport> {
    let mut checks = vec![
        table_exact(),
        table_monte_carlo(20_000, seed),
        Check { name: "uniform_kernel_vs_reference".into(), ..kernel_vs_reference(&GateKernel::uniform()) },
        kernel_vs_reference(&GateKernel::from_exact(&t_tensor())),
        dp_vs_pn()?,
        dp_vs_mc(&GateKernel::uniform(), 2000, seed)?,
        fcs_limit()?,
        product_limit()?,
        slrw_sum_vs_propagator()?,
        slrw_poisson()?,
    ];
    checks.extend(deviation_checks()?);
    checks.extend(walk_bounds()?);
    checks.extend([gaussian_vs_dense(seed)?, kernel_vs_dense(seed)?, sampling_tvd(seed)?, unitarity(seed)?]);
    let passed = checks.iter().all(|c| c.passed || !c.gating);
    Ok(ValidationReport { passed, seed, checks })
}

pub fn run_validation(seed: u64) -> Result<(ValidationReport, ExperimentOutput)> {
    let report = validate(seed)?;
    let out = ExperimentOutput::single("validation.json", report.to_json());
    Ok((report, out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_grid_columns_are_stochastic() {
        let g = reference_grid();
        for c in 0..16 {
            let s: f64 = (0..16).map(|r| g[r][c]).sum();
            assert!((s - 1.0).abs() < 1e-12, "column {c}");
        }
    }

    #[test]
    fn clean_build_passes_gating_checks() {
        let (report, out) = run_validation(0).unwrap();
        for c in report.checks.iter().filter(|c| c.gating) {
            assert!(c.passed, "{c:?}");
        }
        assert!(report.passed);
        let v: serde_json::Value = serde_json::from_str(out.get("validation.json").unwrap()).unwrap();
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c.get("tolerance").is_some() && c.get("measured").is_some()));
    }

    fn perturbed(out: &str, inp: &str, value: f64) -> GateKernel {
        let mut t = t_tensor().to_f64();
        let (r, c) = (
            PAULI_LABELS.iter().position(|&l| l == out).unwrap(),
            PAULI_LABELS.iter().position(|&l| l == inp).unwrap(),
        );
        t[r][c] = value;
        GateKernel::from_tensor(&t)
    }

    #[test]
    fn perturbed_two_mode_entry_is_caught() {
        let k = perturbed("IZ", "ZI", 0.26);
        let check = dp_vs_mc(&k, 2000, 0).unwrap();
        assert!(!check.passed, "{check:?}");
        assert!(!kernel_vs_reference(&k).passed);
    }

    #[test]
    fn perturbed_three_mode_entry_is_below_sampling_resolution() {
        // 1/4 entries act on odd local subsets, which even strings only reach
        // through gates they straddle; α moves by a few 1e-3 at most
        let k = perturbed("XI", "XI", 0.26);
        assert!(!kernel_vs_reference(&k).passed);
        let s = ms(8, &[1, 5]);
        let shift = alpha_dp_curve_with_kernel(8, &s, 9, &k).unwrap()[9] - alpha_exact_dp(8, 9, &s).unwrap().value;
        assert!(shift > 0.0 && shift < 5e-3, "{shift}");
        assert!(dp_vs_mc(&k, 2000, 0).unwrap().passed);
    }
}
