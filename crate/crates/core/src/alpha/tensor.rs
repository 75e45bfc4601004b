//! The two-qubit twirl tensor in the Pauli basis.

use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

use crate::alpha::binomial;
use crate::majorana::{MajoranaString, PauliString};
use crate::matchgate::{sample_haar_o4, synthesize_unitary, GateUnitary};

/// Row/column order of the tensor; the first letter acts on the first qubit of the pair.
pub const PAULI_LABELS: [&str; 16] = [
    "II", "IX", "IY", "IZ", "XI", "XX", "XY", "XZ", "YI", "YX", "YY", "YZ", "ZI", "ZX", "ZY", "ZZ",
];

/// `T[out][in] = E_Q |tr(P_out U† P_in U)/4|²` over Haar O(4) gates.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTwirlTensor {
    entries: [[Ratio<i64>; 16]; 16],
}

pub fn label_index(label: &str) -> Option<usize> {
    PAULI_LABELS.iter().position(|&l| l == label)
}

/// Local Majorana subset (bit `μ-1` for mode `μ`) whose Jordan–Wigner string
/// carries the given Pauli letters.
pub fn label_to_subset(label: usize) -> u8 {
    (0u8..16)
        .find(|&mask| {
            let idx: Vec<usize> = (1..=4).filter(|m| mask >> (m - 1) & 1 == 1).collect();
            MajoranaString::new(2, idx).unwrap().jordan_wigner().letters_string() == PAULI_LABELS[label]
        })
        .expect("every two-qubit Pauli is a Majorana monomial")
}

pub fn t_tensor() -> LocalTwirlTensor {
    let mut entries = [[Ratio::from_integer(0); 16]; 16];
    for (out, row) in entries.iter_mut().enumerate() {
        let a = label_to_subset(out).count_ones() as usize;
        for (inp, e) in row.iter_mut().enumerate() {
            let b = label_to_subset(inp).count_ones() as usize;
            if a == b {
                *e = Ratio::new(1, binomial(4, a) as i64);
            }
        }
    }
    LocalTwirlTensor { entries }
}

impl LocalTwirlTensor {
    pub fn get(&self, out: usize, inp: usize) -> Ratio<i64> {
        self.entries[out][inp]
    }

    /// Entry by labels, e.g. `entry("XX", "IZ")` for `IZ → XX`.
    pub fn entry(&self, out: &str, inp: &str) -> Option<Ratio<i64>> {
        Some(self.entries[label_index(out)?][label_index(inp)?])
    }

    pub fn column_sums(&self) -> [Ratio<i64>; 16] {
        std::array::from_fn(|c| self.entries.iter().map(|row| row[c]).sum())
    }

    pub fn to_f64(&self) -> [[f64; 16]; 16] {
        std::array::from_fn(|r| std::array::from_fn(|c| {
            let e = self.entries[r][c];
            *e.numer() as f64 / *e.denom() as f64
        }))
    }
}

fn pauli_matrices() -> Vec<GateUnitary> {
    PAULI_LABELS
        .iter()
        .map(|l| {
            let m = PauliString::parse(l, 0).unwrap().to_matrix();
            GateUnitary::from_fn(|r, c| m[(r, c)])
        })
        .collect()
}

/// Monte-Carlo estimate of the twirl tensor from synthesized gate unitaries.
/// Returns per-entry means and standard errors.
pub fn estimate_twirl_tensor<R: Rng + ?Sized>(samples: usize, rng: &mut R) -> ([[f64; 16]; 16], [[f64; 16]; 16]) {
    let paulis = pauli_matrices();
    let mut sum = [[0.0; 16]; 16];
    let mut sq = [[0.0; 16]; 16];
    for _ in 0..samples {
        let u = synthesize_unitary(&sample_haar_o4(rng));
        let ud = u.adjoint();
        for inp in 0..16 {
            let rotated = ud * paulis[inp] * u;
            for out in 0..16 {
                let c: Complex64 = (paulis[out] * rotated).trace() / 4.0;
                let v = c.norm_sqr();
                sum[out][inp] += v;
                sq[out][inp] += v * v;
            }
        }
    }
    let s = samples as f64;
    let mean = std::array::from_fn(|r| std::array::from_fn(|c| sum[r][c] / s));
    let err = std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let m = sum[r][c] / s;
            let var = ((sq[r][c] / s - m * m) * s / (s - 1.0).max(1.0)).max(0.0);
            (var / s).sqrt()
        })
    });
    (mean, err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn examples() {
        let t = t_tensor();
        assert_eq!(t.entry("II", "II").unwrap(), Ratio::from_integer(1));
        assert_eq!(t.entry("IX", "IX").unwrap(), Ratio::new(1, 4));
        assert_eq!(t.entry("XX", "IZ").unwrap(), Ratio::new(1, 6));
        assert_eq!(t.entry("ZZ", "ZZ").unwrap(), Ratio::from_integer(1));
        assert_eq!(t.entry("XX", "XI").unwrap(), Ratio::from_integer(0));
        assert!(t.entry("QQ", "II").is_none());
    }

    #[test]
    fn columns_are_stochastic() {
        for s in t_tensor().column_sums() {
            assert_eq!(s, Ratio::from_integer(1));
        }
    }

    #[test]
    fn sectors_by_locality() {
        let by_k = |k: u32| -> Vec<&str> {
            (0..16).filter(|&l| label_to_subset(l).count_ones() == k).map(|l| PAULI_LABELS[l]).collect()
        };
        assert_eq!(by_k(0), vec!["II"]);
        let mut k1 = by_k(1);
        k1.sort();
        assert_eq!(k1, vec!["XI", "YI", "ZX", "ZY"]);
        let mut k2 = by_k(2);
        k2.sort();
        assert_eq!(k2, vec!["IZ", "XX", "XY", "YX", "YY", "ZI"]);
        let mut k3 = by_k(3);
        k3.sort();
        assert_eq!(k3, vec!["IX", "IY", "XZ", "YZ"]);
        assert_eq!(by_k(4), vec!["ZZ"]);
    }

    #[test]
    fn monte_carlo_agrees_roughly() {
        let (mean, err) = estimate_twirl_tensor(4000, &mut stream(1, "twirl", &[]));
        let exact = t_tensor().to_f64();
        for r in 0..16 {
            for c in 0..16 {
                assert!((mean[r][c] - exact[r][c]).abs() <= 5.0 * err[r][c] + 1e-12, "{r},{c}");
            }
        }
    }
}
