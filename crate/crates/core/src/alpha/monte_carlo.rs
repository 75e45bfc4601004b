//! `α_{S,d} = E_U |⟨0| U γ_S U† |0⟩|²` estimated over sampled brickwork circuits.

use rand::Rng;

use crate::alpha::{AlphaMethod, AlphaResult};
use crate::error::{Error, Result};
use crate::gaussian::rotated_basis_expectation;
use crate::majorana::MajoranaString;
use crate::matchgate::BrickworkCircuit;

pub fn alpha_monte_carlo<R: Rng + ?Sized>(
    n: usize,
    d: usize,
    s: &MajoranaString,
    trials: usize,
    rng: &mut R,
) -> Result<AlphaResult> {
    if n % 2 == 1 || n == 0 {
        return Err(Error::OddQubitCount(n));
    }
    if s.n() != n {
        return Err(Error::QubitMismatch { expected: n, got: s.n() });
    }
    if s.locality() % 2 == 1 {
        return Err(Error::OddLocality(s.locality()));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("at least one trial is required".into()));
    }
    let vacuum = vec![false; n];
    let (mut sum, mut sq) = (0.0, 0.0);
    for _ in 0..trials {
        let q = BrickworkCircuit::sample(n, d, rng)?.global_q();
        let v = rotated_basis_expectation(&q, &vacuum, s.indices()).norm_sqr();
        sum += v;
        sq += v * v;
    }
    let t = trials as f64;
    let mean = sum / t;
    let var = if trials > 1 { ((sq - t * mean * mean) / (t - 1.0)).max(0.0) } else { 0.0 };
    Ok(AlphaResult {
        value: mean,
        method: AlphaMethod::MonteCarlo,
        stderr: Some((var / t).sqrt()),
        pruned_mass: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::alpha_exact_dp;
    use crate::rng::stream;

    fn ms(n: usize, idx: &[usize]) -> MajoranaString {
        MajoranaString::new(n, idx.to_vec()).unwrap()
    }

    #[test]
    fn depth_zero_is_exact() {
        let mut rng = stream(1, "mc", &[]);
        let a = alpha_monte_carlo(4, 0, &ms(4, &[1, 2]), 10, &mut rng).unwrap();
        assert_eq!((a.value, a.stderr), (1.0, Some(0.0)));
        let a = alpha_monte_carlo(4, 0, &ms(4, &[1, 3]), 10, &mut rng).unwrap();
        assert_eq!((a.value, a.stderr), (0.0, Some(0.0)));
    }

    #[test]
    fn agrees_with_dp() {
        let s = ms(8, &[1, 4]);
        let mc = alpha_monte_carlo(8, 5, &s, 10_000, &mut stream(2, "mc", &[])).unwrap();
        let dp = alpha_exact_dp(8, 5, &s).unwrap().value;
        assert!((mc.value - dp).abs() <= 5.0 * mc.stderr.unwrap(), "{} vs {dp}", mc.value);
    }

    #[test]
    fn deep_pair_reaches_full_group_value() {
        let mc = alpha_monte_carlo(10, 60, &ms(10, &[1, 2]), 3000, &mut stream(3, "mc", &[])).unwrap();
        assert!((mc.value - 1.0 / 19.0).abs() <= 5.0 * mc.stderr.unwrap());
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut rng = stream(4, "mc", &[]);
        assert!(alpha_monte_carlo(4, 1, &ms(4, &[1, 2]), 0, &mut rng).is_err());
        assert!(alpha_monte_carlo(3, 1, &ms(3, &[1, 2]), 5, &mut rng).is_err());
        assert!(alpha_monte_carlo(4, 1, &ms(4, &[1]), 5, &mut rng).is_err());
    }
}
