//! Orthogonal representation of matchgate circuits.
//!
//! A gate on qubits `(q, q+1)` is a 4×4 orthogonal block acting on the modes
//! `2q-1 ..= 2q+2`. The convention throughout is `U† γ_μ U = Σ_ν Q_{μν} γ_ν`,
//! under which the product `U_1 U_2` realizes `Q_1 Q_2`. A circuit whose
//! layer 1 acts first has unitary `U_d ⋯ U_1` and therefore global matrix
//! `Q_d ⋯ Q_1`.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix4};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorana::MajoranaString;

pub type GateUnitary = Matrix4<Complex64>;

const ORTHO_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrthogonalBlock(Matrix4<f64>);

impl OrthogonalBlock {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        let dev = (m.transpose() * m - Matrix4::identity()).amax();
        if dev > ORTHO_TOL || !dev.is_finite() {
            return Err(Error::NotOrthogonal(dev));
        }
        Ok(Self(m))
    }

    pub fn from_row_major(v: &[f64]) -> Result<Self> {
        if v.len() != 16 {
            return Err(Error::DimensionMismatch(format!("expected 16 entries, got {}", v.len())));
        }
        Self::new(Matrix4::from_row_slice(v))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    /// Rotation in the `(p, p+1)` plane (1-based local modes) with rows
    /// `[cos θ, sin θ; -sin θ, cos θ]`, i.e. `γ_p → cos θ γ_p + sin θ γ_{p+1}`.
    pub fn givens(p: usize, theta: f64) -> Self {
        assert!((1..=3).contains(&p), "local Givens plane must be 1..=3");
        let mut m = Matrix4::identity();
        let (s, c) = theta.sin_cos();
        m[(p - 1, p - 1)] = c;
        m[(p - 1, p)] = s;
        m[(p, p - 1)] = -s;
        m[(p, p)] = c;
        Self(m)
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn det(&self) -> f64 {
        self.0.determinant()
    }

    pub fn row_major(&self) -> Vec<f64> {
        (0..4).flat_map(|r| (0..4).map(move |c| (r, c))).map(|rc| self.0[rc]).collect()
    }
}

/// Haar-random element of O(4): Gaussian QR with sign-fixed `R` diagonal,
/// then a fair coin negates the last row.
pub fn sample_haar_o4<R: Rng + ?Sized>(rng: &mut R) -> OrthogonalBlock {
    let g = Matrix4::<f64>::from_fn(|_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..4 {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if rng.random::<bool>() {
        q.row_mut(3).neg_mut();
    }
    OrthogonalBlock(q)
}

/// Majorana matrices of the two-qubit system: `X⊗I, Y⊗I, Z⊗X, Z⊗Y`.
/// Basis index bit 0 is the first qubit of the pair.
pub fn local_majoranas() -> &'static [GateUnitary; 4] {
    &local_algebra().0
}

/// Local Majoranas and the adjacent products `γ_p γ_{p+1}`, `p = 1..=3`.
fn local_algebra() -> &'static ([GateUnitary; 4], [GateUnitary; 3]) {
    static ALGEBRA: OnceLock<([GateUnitary; 4], [GateUnitary; 3])> = OnceLock::new();
    ALGEBRA.get_or_init(|| {
        let gamma: [GateUnitary; 4] = std::array::from_fn(|mu| {
            let m = MajoranaString::new(2, vec![mu + 1]).unwrap().jordan_wigner().to_matrix();
            Matrix4::from_fn(|r, c| m[(r, c)])
        });
        let pairs = std::array::from_fn(|p| gamma[p] * gamma[p + 1]);
        (gamma, pairs)
    })
}

/// `exp((θ/2) γ_p γ_{p+1})`, which realizes [`OrthogonalBlock::givens`]`(p, θ)`.
#[cfg(test)]
fn givens_unitary(p: usize, theta: f64) -> GateUnitary {
    let (s, c) = (theta / 2.0).sin_cos();
    GateUnitary::identity() * Complex64::new(c, 0.0) + local_algebra().1[p - 1] * Complex64::new(s, 0.0)
}

/// Two-qubit unitary `U` with `U† γ_μ U = Σ_ν q_{μν} γ_ν` on the local modes.
///
/// `q` is reduced to the identity (or `diag(1,1,1,-1)`) by adjacent Givens
/// rotations from the left; the inverse rotations give `U`. A determinant −1
/// block is first multiplied by `F = diag(-1,-1,-1,1)`, which is realized by `γ_4`.
pub fn synthesize_unitary(q: &OrthogonalBlock) -> GateUnitary {
    let gamma = local_majoranas();
    let (prefix, mut w) = if q.det() < 0.0 {
        let f = Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -1.0, -1.0, 1.0));
        (gamma[3], f * q.0)
    } else {
        (GateUnitary::identity(), q.0)
    };
    let mut u = prefix;
    for c in 0..3 {
        for r in (c + 1..4).rev() {
            let a = w[(r - 1, c)];
            let b = w[(r, c)];
            let theta = b.atan2(a);
            let (s, cs) = theta.sin_cos();
            for k in 0..4 {
                let top = w[(r - 1, k)];
                let bot = w[(r, k)];
                w[(r - 1, k)] = cs * top + s * bot;
                w[(r, k)] = -s * top + cs * bot;
            }
            // q = G_1ᵀ ⋯ G_mᵀ, each Gᵀ realized by the adjoint rotation
            // `cos(θ/2) I - sin(θ/2) γ_r γ_{r+1}`; the pair product is monomial
            let (sh, ch) = (theta / 2.0).sin_cos();
            let prod = &local_algebra().1[r - 1];
            let mut next = u * Complex64::new(ch, 0.0);
            for col in 0..4 {
                let k = (0..4).find(|&k| prod[(k, col)] != Complex64::new(0.0, 0.0)).expect("monomial");
                let w = prod[(k, col)] * -sh;
                for row in 0..4 {
                    next[(row, col)] += u[(row, k)] * w;
                }
            }
            u = next;
        }
    }
    u
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    /// First qubit of the pair (1-based).
    pub qubit: usize,
    pub block: OrthogonalBlock,
}

/// Qubit positions of the gates in layer `layer` (1-based): odd layers start
/// at qubit 1, even layers at qubit 2.
pub fn layer_positions(n: usize, layer: usize) -> impl Iterator<Item = usize> {
    let start = if layer % 2 == 1 { 1 } else { 2 };
    (start..n).step_by(2)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BrickworkCircuit {
    n: usize,
    layers: Vec<Vec<Gate>>,
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    qubit: usize,
    q: Vec<f64>,
}

impl BrickworkCircuit {
    pub fn new(n: usize, layers: Vec<Vec<Gate>>) -> Result<Self> {
        if n % 2 == 1 || n == 0 {
            return Err(Error::OddQubitCount(n));
        }
        for (l, layer) in layers.iter().enumerate() {
            let want: Vec<usize> = layer_positions(n, l + 1).collect();
            let got: Vec<usize> = layer.iter().map(|g| g.qubit).collect();
            if want != got {
                return Err(Error::InvalidArgument(format!(
                    "layer {} has gates on {got:?}, expected {want:?}",
                    l + 1
                )));
            }
        }
        Ok(Self { n, layers })
    }

    pub fn sample<R: Rng + ?Sized>(n: usize, depth: usize, rng: &mut R) -> Result<Self> {
        if n % 2 == 1 || n == 0 {
            return Err(Error::OddQubitCount(n));
        }
        let layers = (1..=depth)
            .map(|l| {
                layer_positions(n, l)
                    .map(|qubit| Gate { qubit, block: sample_haar_o4(rng) })
                    .collect()
            })
            .collect();
        Ok(Self { n, layers })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Vec<Gate>] {
        &self.layers
    }

    pub fn gate_count(&self) -> usize {
        self.layers.iter().map(Vec::len).sum()
    }

    /// The first `depth` layers.
    pub fn truncated(&self, depth: usize) -> Self {
        Self { n: self.n, layers: self.layers[..depth.min(self.depth())].to_vec() }
    }

    pub fn global_q(&self) -> GlobalOrthogonal {
        let mut q = GlobalOrthogonal::identity(self.n);
        for layer in &self.layers {
            for g in layer {
                q.apply_gate_left(g);
            }
        }
        q
    }

    pub fn to_json(&self) -> String {
        let recs: Vec<Vec<GateRecord>> = self
            .layers
            .iter()
            .map(|l| l.iter().map(|g| GateRecord { qubit: g.qubit, q: g.block.row_major() }).collect())
            .collect();
        serde_json::to_string(&recs).expect("circuit serializes")
    }

    pub fn from_json(n: usize, s: &str) -> Result<Self> {
        let recs: Vec<Vec<GateRecord>> = serde_json::from_str(s)?;
        let layers = recs
            .into_iter()
            .map(|l| {
                l.into_iter()
                    .map(|r| Ok(Gate { qubit: r.qubit, block: OrthogonalBlock::from_row_major(&r.q)? }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, layers)
    }
}

pub fn circuit_to_global_q(c: &BrickworkCircuit) -> GlobalOrthogonal {
    c.global_q()
}

/// A `2n × 2n` orthogonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GlobalOrthogonal(DMatrix<f64>);

impl GlobalOrthogonal {
    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(2 * n, 2 * n))
    }

    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        if !m.is_square() || m.nrows() % 2 == 1 {
            return Err(Error::DimensionMismatch(format!(
                "expected an even square matrix, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let dev = (m.transpose() * &m - DMatrix::identity(m.nrows(), m.nrows())).amax();
        if dev > ORTHO_TOL || !dev.is_finite() {
            return Err(Error::NotOrthogonal(dev));
        }
        Ok(Self(m))
    }

    pub fn n(&self) -> usize {
        self.0.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn orthogonality_error(&self) -> f64 {
        (self.0.transpose() * &self.0 - DMatrix::identity(self.0.nrows(), self.0.nrows())).amax()
    }

    /// `Q ← Q_g Q` for a single gate `g`.
    ///
    /// A determinant −1 block is realized by a parity-odd local unitary, which
    /// also negates every mode to the right of the gate.
    pub fn apply_gate_left(&mut self, g: &Gate) {
        let base = 2 * (g.qubit - 1);
        let dim = self.0.nrows();
        let b = g.block.matrix();
        for col in 0..dim {
            let v = [
                self.0[(base, col)],
                self.0[(base + 1, col)],
                self.0[(base + 2, col)],
                self.0[(base + 3, col)],
            ];
            for r in 0..4 {
                self.0[(base + r, col)] =
                    b[(r, 0)] * v[0] + b[(r, 1)] * v[1] + b[(r, 2)] * v[2] + b[(r, 3)] * v[3];
            }
        }
        if b.determinant() < 0.0 {
            for row in base + 4..dim {
                self.0.row_mut(row).neg_mut();
            }
        }
    }

    /// `det(Q|_{rows, cols})` with 1-based indices.
    pub fn minor_det(&self, rows: &[usize], cols: &[usize]) -> Result<f64> {
        if rows.len() != cols.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows vs {} columns",
                rows.len(),
                cols.len()
            )));
        }
        let dim = self.0.nrows();
        if rows.iter().chain(cols).any(|&i| i == 0 || i > dim) {
            return Err(Error::InvalidIndices(format!("minor indices must lie in 1..={dim}")));
        }
        let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| self.0[(rows[r] - 1, cols[c] - 1)]);
        Ok(sub.determinant())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorana::{majorana_matrix, subsets};
    use crate::rng::stream;
    use proptest::prelude::*;

    fn conj_error(u: &GateUnitary, q: &Matrix4<f64>) -> f64 {
        let g = local_majoranas();
        let mut worst: f64 = 0.0;
        for mu in 0..4 {
            let lhs = u.adjoint() * g[mu] * u;
            let rhs = (0..4).fold(GateUnitary::zeros(), |acc, nu| acc + g[nu] * Complex64::new(q[(mu, nu)], 0.0));
            worst = worst.max((lhs - rhs).camax());
        }
        worst
    }

    #[test]
    fn haar_samples_are_orthogonal_and_hit_both_components() {
        let mut rng = stream(1, "test", &[]);
        let mut neg = 0usize;
        let mut q11sq = 0.0;
        let trials = 100_000;
        for _ in 0..trials {
            let q = sample_haar_o4(&mut rng);
            assert!((q.matrix().transpose() * q.matrix() - Matrix4::identity()).amax() < 1e-12);
            if q.det() < 0.0 {
                neg += 1;
            }
            q11sq += q.matrix()[(0, 0)].powi(2);
        }
        let p = neg as f64 / trials as f64;
        assert!((p - 0.5).abs() < 3.0 * (0.25 / trials as f64).sqrt(), "P(det=-1)={p}");
        // q11^2 ~ Beta(1/2, 3/2): variance 3/80
        let m = q11sq / trials as f64;
        assert!((m - 0.25).abs() < 3.0 * (3.0 / 80.0 / trials as f64).sqrt(), "E[q11^2]={m}");
    }

    #[test]
    fn haar_left_invariance_of_q11() {
        let mut rng = stream(2, "test", &[]);
        let g = sample_haar_o4(&mut rng);
        let trials = 100_000;
        let (mut a, mut b) = (0.0, 0.0);
        for _ in 0..trials {
            let q = sample_haar_o4(&mut rng);
            a += q.matrix()[(0, 0)];
            b += (g.matrix() * q.matrix())[(0, 0)];
        }
        // Var(q11) = 1/4 for both samples
        let sigma = (2.0 * 0.25 / trials as f64).sqrt();
        assert!(((a - b) / trials as f64).abs() < 3.0 * sigma);
    }

    #[test]
    fn non_orthogonal_rejected() {
        let mut m = Matrix4::identity();
        m[(0, 1)] = 0.1;
        assert!(matches!(OrthogonalBlock::new(m), Err(Error::NotOrthogonal(_))));
        assert!(OrthogonalBlock::from_row_major(&[0.0; 15]).is_err());
    }

    #[test]
    fn synthesis_examples() {
        let u = synthesize_unitary(&OrthogonalBlock::identity());
        assert!((u - GateUnitary::identity()).camax() < 1e-14);

        let theta = 0.37;
        let u = synthesize_unitary(&OrthogonalBlock::givens(1, theta));
        let zi = GateUnitary::from_diagonal(&nalgebra::Vector4::new(1.0, -1.0, 1.0, -1.0).map(|x| Complex64::new(x, 0.0)));
        let expect = (zi * Complex64::new(0.0, theta / 2.0)).exp();
        let phase = u[(0, 0)] / expect[(0, 0)];
        assert!((u - expect * phase).camax() < 1e-12);
        assert!(conj_error(&u, OrthogonalBlock::givens(1, theta).matrix()) < 1e-12);

        let f = OrthogonalBlock::new(Matrix4::from_diagonal(&nalgebra::Vector4::new(-1.0, -1.0, -1.0, 1.0))).unwrap();
        let u = synthesize_unitary(&f);
        let zy = local_majoranas()[3];
        let phase = u[(1, 3)] / zy[(1, 3)];
        assert!((phase.norm() - 1.0).abs() < 1e-12);
        assert!((u - zy * phase).camax() < 1e-12);
    }

    #[test]
    fn givens_exponentials() {
        for p in 1..=3 {
            for theta in [0.3, -1.2, 2.9] {
                let q = OrthogonalBlock::givens(p, theta);
                assert!(conj_error(&givens_unitary(p, theta), q.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn synthesis_matches_random_blocks() {
        let mut rng = stream(3, "test", &[]);
        for _ in 0..2000 {
            let q = sample_haar_o4(&mut rng);
            let u = synthesize_unitary(&q);
            assert!((u.adjoint() * u - GateUnitary::identity()).camax() < 1e-12);
            assert!(conj_error(&u, q.matrix()) < 1e-10);
        }
    }

    #[test]
    fn brickwork_layout() {
        let mut rng = stream(4, "test", &[]);
        let c = BrickworkCircuit::sample(4, 1, &mut rng).unwrap();
        assert_eq!(c.layers()[0].iter().map(|g| g.qubit).collect::<Vec<_>>(), vec![1, 3]);
        let c = BrickworkCircuit::sample(4, 2, &mut rng).unwrap();
        assert_eq!(c.layers()[1].iter().map(|g| g.qubit).collect::<Vec<_>>(), vec![2]);
        assert_eq!(BrickworkCircuit::sample(10, 5, &mut rng).unwrap().gate_count(), 23);
        assert!(matches!(BrickworkCircuit::sample(5, 2, &mut rng), Err(Error::OddQubitCount(5))));
    }

    #[test]
    fn global_q_examples() {
        let mut rng = stream(5, "test", &[]);
        let c = BrickworkCircuit::sample(6, 0, &mut rng).unwrap();
        assert_eq!(c.global_q(), GlobalOrthogonal::identity(6));

        // det +1 gate on (1,2): block-diag(q, I4)
        let q = OrthogonalBlock::givens(2, 0.8);
        let c = BrickworkCircuit::new(4, vec![vec![
            Gate { qubit: 1, block: q },
            Gate { qubit: 3, block: OrthogonalBlock::identity() },
        ]])
        .unwrap();
        let g = c.global_q();
        let mut want = DMatrix::identity(8, 8);
        want.view_mut((0, 0), (4, 4)).copy_from(q.matrix());
        assert!((g.matrix() - &want).amax() < 1e-15);

        // det -1 gate additionally negates the modes to its right
        let mut f = Matrix4::identity();
        f[(3, 3)] = -1.0;
        let q = OrthogonalBlock::new(f).unwrap();
        let c = BrickworkCircuit::new(4, vec![vec![
            Gate { qubit: 1, block: q },
            Gate { qubit: 3, block: OrthogonalBlock::identity() },
        ]])
        .unwrap();
        let mut want = DMatrix::identity(8, 8);
        want.view_mut((0, 0), (4, 4)).copy_from(q.matrix());
        for r in 4..8 {
            want[(r, r)] = -1.0;
        }
        assert!((c.global_q().matrix() - &want).amax() < 1e-15);
    }

    /// Dense conjugation check that pins the composition order and the
    /// determinant −1 tail.
    #[test]
    fn global_q_matches_dense_conjugation() {
        use crate::statevector::StateVector;
        for (n, seed) in [(4usize, 6u64), (6, 7)] {
            for trial in 0..6 {
                let mut rng = stream(seed, "test", &[trial]);
                let c = BrickworkCircuit::sample(n, 1 + trial as usize, &mut rng).unwrap();
                let dim = 1 << n;
                let mut u = DMatrix::<Complex64>::identity(dim, dim);
                for col in 0..dim {
                    let mut psi = StateVector::basis_index(n, col).unwrap();
                    psi.apply_circuit(&c).unwrap();
                    u.set_column(col, &nalgebra::DVector::from_column_slice(psi.amplitudes()));
                }
                let q = c.global_q();
                assert!(q.orthogonality_error() < 1e-10);
                let gam: Vec<_> = (1..=2 * n).map(|m| majorana_matrix(n, m).unwrap()).collect();
                for mu in 0..2 * n {
                    let lhs = u.adjoint() * &gam[mu] * &u;
                    let mut rhs = DMatrix::zeros(dim, dim);
                    for nu in 0..2 * n {
                        rhs += &gam[nu] * Complex64::new(q.matrix()[(mu, nu)], 0.0);
                    }
                    assert!((lhs - rhs).camax() < 1e-8, "n={n} trial={trial} mu={}", mu + 1);
                }
            }
        }
    }

    #[test]
    fn minors() {
        let id = GlobalOrthogonal::identity(2);
        assert_eq!(id.minor_det(&[1, 3], &[1, 3]).unwrap(), 1.0);
        assert_eq!(id.minor_det(&[1, 2], &[1, 3]).unwrap(), 0.0);
        assert!(id.minor_det(&[1, 2], &[1]).is_err());
        assert!(id.minor_det(&[1, 9], &[1, 2]).is_err());
        let mut rng = stream(8, "test", &[]);
        let q = BrickworkCircuit::sample(4, 6, &mut rng).unwrap().global_q();
        for rows in [vec![1, 4], vec![2, 3, 7], vec![1, 2, 5, 8]] {
            let s: f64 = subsets(8, rows.len()).map(|c| q.minor_det(&rows, &c).unwrap().powi(2)).sum();
            assert!((s - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut rng = stream(9, "test", &[]);
        let c = BrickworkCircuit::sample(6, 3, &mut rng).unwrap();
        let back = BrickworkCircuit::from_json(6, &c.to_json()).unwrap();
        assert_eq!(back.depth(), 3);
        assert!((back.global_q().matrix() - c.global_q().matrix()).amax() < 1e-14);
        assert!(BrickworkCircuit::from_json(6, r#"[[{"qubit":2,"q":[1,0,0,0,0,1,0,0,0,0,1,0,0,0,0,1]}]]"#).is_err());
    }

    proptest! {
        #[test]
        fn global_q_stays_orthogonal(seed in 0u64..1000, d in 0usize..12, half_n in 1usize..5) {
            let mut rng = stream(seed, "prop", &[]);
            let c = BrickworkCircuit::sample(2 * half_n, d, &mut rng).unwrap();
            prop_assert!(c.global_q().orthogonality_error() < 1e-10);
        }
    }
}
