//! Fermionic Gaussian states through their covariance matrix
//! `M_{μν} = -i tr(ρ γ_μ γ_ν)` (`μ ≠ ν`), so that `⟨γ_S⟩ = i^{k/2} Pf(M|_S)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::majorana::{i_pow, MajoranaString};
use crate::matchgate::GlobalOrthogonal;
use crate::pfaffian::{pfaffian, pfaffian_in_place};

const PROB_EPS: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix {
    n: usize,
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    /// `M_{2j-1,2j} = (-1)^{b_j}`.
    pub fn basis(b: &[bool]) -> Self {
        let n = b.len();
        let mut m = DMatrix::zeros(2 * n, 2 * n);
        for (j, &bit) in b.iter().enumerate() {
            let v = if bit { -1.0 } else { 1.0 };
            m[(2 * j, 2 * j + 1)] = v;
            m[(2 * j + 1, 2 * j)] = -v;
        }
        Self { n, m }
    }

    pub fn vacuum(n: usize) -> Self {
        Self::basis(&vec![false; n])
    }

    pub fn from_matrix(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() % 2 == 1 {
            return Err(Error::DimensionMismatch(format!("{}x{} covariance", m.nrows(), m.ncols())));
        }
        let asym = (&m + m.transpose()).amax();
        if asym > 1e-10 {
            return Err(Error::InvalidArgument(format!("covariance not antisymmetric ({asym:.2e})")));
        }
        Ok(Self { n: m.nrows() / 2, m })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// Covariance of `U ρ U†` where `U† γ_μ U = Σ_ν Q_{μν} γ_ν`: `Q M Qᵀ`.
    pub fn evolve(&self, q: &GlobalOrthogonal) -> Result<Self> {
        if q.n() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: q.n() });
        }
        let qm = q.matrix();
        let mut m = qm * &self.m * qm.transpose();
        // restore exact antisymmetry lost to rounding
        let mt = m.transpose();
        m = (&m - mt) * 0.5;
        Ok(Self { n: self.n, m })
    }

    /// Physical states have all singular values of `M` at most 1.
    pub fn is_physical(&self, tol: f64) -> bool {
        let asym = (&self.m + self.m.transpose()).amax() <= 1e-10;
        let gram = self.m.transpose() * &self.m;
        let top = gram.symmetric_eigenvalues().max();
        asym && top <= 1.0 + tol
    }

    /// `M|_S` for 1-based indices.
    pub fn restricted(&self, idx: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.m[(idx[r] - 1, idx[c] - 1)])
    }

    /// `tr(ρ γ_S) = i^{k/2} Pf(M|_S)`; the string's coefficient is ignored.
    pub fn expectation(&self, s: &MajoranaString) -> Result<Complex64> {
        if s.n() != self.n {
            return Err(Error::QubitMismatch { expected: self.n, got: s.n() });
        }
        let k = s.locality();
        if k % 2 == 1 {
            return Err(Error::OddLocality(k));
        }
        let pf = pfaffian(&self.restricted(s.indices()))?;
        Ok(i_pow((k / 2) as i64) * pf)
    }

    /// Sequential Born sampling of all qubits, left to right, conditioning
    /// the covariance on each outcome with a 2×2 Schur complement.
    pub fn sample_outcome<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Vec<bool>> {
        let dim = 2 * self.n;
        let mut m: Vec<f64> = (0..dim * dim).map(|i| self.m[(i / dim, i % dim)]).collect();
        let mut bits = Vec::with_capacity(self.n);
        for j in 0..self.n {
            let (a, b) = (2 * j, 2 * j + 1);
            let mab = m[a * dim + b];
            let p1 = (1.0 - mab) / 2.0;
            if !(-PROB_EPS..=1.0 + PROB_EPS).contains(&p1) || !p1.is_finite() {
                return Err(Error::Numerical(format!(
                    "conditional probability {p1} for qubit {} outside [0, 1]",
                    j + 1
                )));
            }
            let bit = rng.random::<f64>() < p1;
            bits.push(bit);
            let s = if bit { -1.0 } else { 1.0 };
            let denom = 1.0 + s * mab;
            if denom <= 0.0 {
                return Err(Error::Numerical(format!("sampled an outcome of probability {}", denom / 2.0)));
            }
            // only the modes of later qubits matter from here on
            let rest = b + 1;
            let col_a: Vec<f64> = (rest..dim).map(|mu| m[mu * dim + a]).collect();
            let col_b: Vec<f64> = (rest..dim).map(|mu| m[mu * dim + b]).collect();
            for (x, mu) in (rest..dim).enumerate() {
                for (y, nu) in (rest..dim).enumerate() {
                    m[mu * dim + nu] += s * (col_b[x] * col_a[y] - col_a[x] * col_b[y]) / denom;
                }
            }
        }
        Ok(bits)
    }
}

/// `⟨b| U γ_S U† |b⟩ = i^{k/2} Pf((Qᵀ M_b Q)|_S)`, computed from the columns
/// `S` of `Q` only. `b[j]` is the bit of qubit `j+1`.
pub fn rotated_basis_expectation(q: &GlobalOrthogonal, b: &[bool], s: &[usize]) -> Complex64 {
    let k = s.len();
    debug_assert!(k % 2 == 0);
    let qm = q.matrix();
    let mut sub = vec![0.0; k * k];
    for x in 0..k {
        for y in x + 1..k {
            let (ca, cb) = (s[x] - 1, s[y] - 1);
            let mut v = 0.0;
            for (j, &bit) in b.iter().enumerate() {
                let t = qm[(2 * j, ca)] * qm[(2 * j + 1, cb)] - qm[(2 * j + 1, ca)] * qm[(2 * j, cb)];
                if bit {
                    v -= t;
                } else {
                    v += t;
                }
            }
            sub[x * k + y] = v;
            sub[y * k + x] = -v;
        }
    }
    i_pow((k / 2) as i64) * pfaffian_in_place(&mut sub, k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matchgate::BrickworkCircuit;
    use crate::rng::stream;
    use crate::statevector::{bits_to_index, StateVector};

    fn ms(n: usize, idx: &[usize]) -> MajoranaString {
        MajoranaString::new(n, idx.to_vec()).unwrap()
    }

    #[test]
    fn basis_covariance_examples() {
        let m = CovarianceMatrix::basis(&[false, false]);
        assert_eq!(m.matrix()[(0, 1)], 1.0);
        assert_eq!(m.matrix()[(2, 3)], 1.0);
        let m = CovarianceMatrix::basis(&[true, false]);
        assert_eq!(m.matrix()[(0, 1)], -1.0);
        assert_eq!(m.matrix()[(1, 0)], 1.0);
        assert_eq!(m.matrix()[(2, 3)], 1.0);
        assert_eq!(m.matrix(), &-m.matrix().transpose());
        assert!(m.is_physical(1e-8));
        assert!(CovarianceMatrix::from_matrix(DMatrix::identity(4, 4)).is_err());
        assert!(!CovarianceMatrix::from_matrix(m.matrix() * 2.0).unwrap().is_physical(1e-8));
    }

    #[test]
    fn expectation_examples() {
        let m = CovarianceMatrix::vacuum(3);
        assert_eq!(m.expectation(&ms(3, &[1, 2])).unwrap(), Complex64::new(0.0, 1.0));
        assert_eq!(m.expectation(&ms(3, &[1, 4])).unwrap().norm(), 0.0);
        assert!(matches!(m.expectation(&ms(3, &[1, 2, 3])), Err(Error::OddLocality(3))));
        for idx in [vec![1, 2, 3, 4], vec![3, 4, 5, 6], vec![1, 2, 5, 6]] {
            let b = [true, false, true];
            let want = ms(3, &idx).vacuum_expectation(&b).unwrap();
            assert_eq!(CovarianceMatrix::basis(&b).expectation(&ms(3, &idx)).unwrap(), want);
        }
    }

    #[test]
    fn identity_evolution() {
        let m = CovarianceMatrix::basis(&[true, false, true]);
        assert_eq!(m.evolve(&GlobalOrthogonal::identity(3)).unwrap(), m);
        assert!(m.evolve(&GlobalOrthogonal::identity(2)).is_err());
    }

    /// Pins the evolution direction and the Pfaffian phase against the dense backend.
    #[test]
    fn convention_lock_against_dense() {
        let n = 4;
        for trial in 0..200u64 {
            let mut rng = stream(11, "lock", &[trial]);
            let b: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            let prep = BrickworkCircuit::sample(n, 1 + (trial % 5) as usize, &mut rng).unwrap();
            let c = BrickworkCircuit::sample(n, 1 + (trial % 4) as usize, &mut rng).unwrap();
            let k = [2usize, 4, 6][(trial % 3) as usize];
            let mut idx: Vec<usize> = (1..=2 * n).collect();
            for i in (1..idx.len()).rev() {
                idx.swap(i, rng.random_range(0..=i));
            }
            let mut idx = idx[..k].to_vec();
            idx.sort();
            let s = ms(n, &idx);

            let g = CovarianceMatrix::basis(&b)
                .evolve(&prep.global_q())
                .unwrap()
                .evolve(&c.global_q())
                .unwrap();
            assert!(g.is_physical(1e-8));
            let mut psi = StateVector::basis(&b).unwrap();
            psi.apply_circuit(&prep).unwrap();
            psi.apply_circuit(&c).unwrap();
            let want = psi.expectation(&s).unwrap();
            assert!((g.expectation(&s).unwrap() - want).norm() < 1e-8, "trial {trial}");
        }
    }

    #[test]
    fn rotated_kernel_matches_generic_path() {
        let n = 6;
        let mut rng = stream(12, "kern", &[]);
        for _ in 0..50 {
            let q = BrickworkCircuit::sample(n, 4, &mut rng).unwrap().global_q();
            let b: Vec<bool> = (0..n).map(|_| rng.random()).collect();
            for idx in [vec![1, 4], vec![2, 3, 7, 10], vec![1, 2, 3, 5, 8, 9]] {
                let fast = rotated_basis_expectation(&q, &b, &idx);
                let slow = CovarianceMatrix::basis(&b).evolve(&q.transpose()).unwrap().expectation(&ms(n, &idx)).unwrap();
                assert!((fast - slow).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sampling_basis_and_vacuum() {
        let mut rng = stream(13, "samp", &[]);
        let b = vec![true, false, false, true, true];
        let m = CovarianceMatrix::basis(&b);
        for _ in 0..50 {
            assert_eq!(m.sample_outcome(&mut rng).unwrap(), b);
        }
        let v = CovarianceMatrix::vacuum(4).evolve(&GlobalOrthogonal::identity(4)).unwrap();
        assert_eq!(v.sample_outcome(&mut rng).unwrap(), vec![false; 4]);
        let bad = CovarianceMatrix::from_matrix(m.matrix() * 3.0).unwrap();
        assert!(matches!(bad.sample_outcome(&mut rng), Err(Error::Numerical(_))));
    }

    #[test]
    fn sampling_matches_dense_born_rule() {
        let n = 6;
        let mut rng = stream(14, "samp", &[]);
        let c = BrickworkCircuit::sample(n, 12, &mut rng).unwrap();
        let g = CovarianceMatrix::vacuum(n).evolve(&c.global_q()).unwrap();
        let probs = StateVector::zero(n).unwrap().evolved(&c).unwrap().probabilities();
        let shots = 100_000;
        let mut counts = vec![0usize; 1 << n];
        let mut ones = vec![0usize; n];
        for _ in 0..shots {
            let b = g.sample_outcome(&mut rng).unwrap();
            counts[bits_to_index(&b)] += 1;
            for (j, &bit) in b.iter().enumerate() {
                ones[j] += bit as usize;
            }
        }
        let tvd: f64 =
            probs.iter().zip(&counts).map(|(p, &c)| (p - c as f64 / shots as f64).abs()).sum::<f64>() / 2.0;
        assert!(tvd <= 0.02, "tvd = {tvd}");
        for j in 0..n {
            let p = (1.0 - g.matrix()[(2 * j, 2 * j + 1)]) / 2.0;
            let sd = (p * (1.0 - p) / shots as f64).sqrt().max(1e-12);
            assert!((ones[j] as f64 / shots as f64 - p).abs() <= 3.0 * sd + 1e-12, "qubit {j}");
        }
    }
}
