//! Pfaffians of real antisymmetric matrices.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Pfaffian of an even-dimensional antisymmetric matrix.
pub fn pfaffian(a: &DMatrix<f64>) -> Result<f64> {
    let k = a.nrows();
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!("{}x{} is not square", a.nrows(), a.ncols())));
    }
    if k % 2 == 1 {
        return Err(Error::DimensionMismatch(format!("Pfaffian of odd dimension {k}")));
    }
    let scale = a.amax().max(1.0);
    if (a + a.transpose()).amax() > 1e-10 * scale {
        return Err(Error::InvalidArgument("matrix is not antisymmetric".into()));
    }
    let mut buf: Vec<f64> = (0..k * k).map(|i| a[(i / k, i % k)]).collect();
    Ok(pfaffian_in_place(&mut buf, k))
}

/// Pfaffian of the row-major `k × k` antisymmetric matrix in `a`, which is
/// overwritten. `k` must be even; only the strict upper triangle is trusted
/// for the closed forms, the elimination reads both.
pub fn pfaffian_in_place(a: &mut [f64], k: usize) -> f64 {
    debug_assert_eq!(a.len(), k * k);
    debug_assert!(k % 2 == 0);
    match k {
        0 => 1.0,
        2 => a[1],
        4 => a[1] * a[11] - a[2] * a[7] + a[3] * a[6],
        _ => parlett_reid(a, k),
    }
}

/// Skew `LTLᵀ` reduction with partial pivoting.
fn parlett_reid(a: &mut [f64], n: usize) -> f64 {
    let mut pf = 1.0;
    let mut tau = vec![0.0; n];
    for k in (0..n - 1).step_by(2) {
        // pivot: largest entry in column k below the diagonal
        let mut kp = k + 1;
        let mut best = a[(k + 1) * n + k].abs();
        for r in k + 2..n {
            let v = a[r * n + k].abs();
            if v > best {
                best = v;
                kp = r;
            }
        }
        if kp != k + 1 {
            for c in k..n {
                a.swap((k + 1) * n + c, kp * n + c);
            }
            for r in k..n {
                a.swap(r * n + k + 1, r * n + kp);
            }
            pf = -pf;
        }
        let piv = a[k * n + k + 1];
        if piv == 0.0 {
            return 0.0;
        }
        pf *= piv;
        if k + 2 < n {
            for c in k + 2..n {
                tau[c] = a[k * n + c] / piv;
            }
            for r in k + 2..n {
                let col = a[r * n + k + 1];
                let tr = tau[r];
                for c in k + 2..n {
                    a[r * n + c] += tr * a[c * n + k + 1] - col * tau[c];
                }
            }
        }
    }
    pf
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn random_antisym(k: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = stream(seed, "pf", &[]);
        let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
        &g - g.transpose()
    }

    /// Pfaffian by expansion along the first row.
    fn pf_expand(a: &DMatrix<f64>) -> f64 {
        let k = a.nrows();
        if k == 0 {
            return 1.0;
        }
        let mut total = 0.0;
        for j in 1..k {
            let keep: Vec<usize> = (1..k).filter(|&c| c != j).collect();
            let sub = DMatrix::from_fn(k - 2, k - 2, |r, c| a[(keep[r], keep[c])]);
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            total += sign * a[(0, j)] * pf_expand(&sub);
        }
        total
    }

    #[test]
    fn small_closed_forms() {
        let a = DMatrix::from_row_slice(2, 2, &[0.0, 2.5, -2.5, 0.0]);
        assert_eq!(pfaffian(&a).unwrap(), 2.5);
        let a = random_antisym(4, 1);
        let want = a[(0, 1)] * a[(2, 3)] - a[(0, 2)] * a[(1, 3)] + a[(0, 3)] * a[(1, 2)];
        assert!((pfaffian(&a).unwrap() - want).abs() < 1e-14);
        assert_eq!(pfaffian(&DMatrix::zeros(0, 0)).unwrap(), 1.0);
    }

    #[test]
    fn errors() {
        assert!(pfaffian(&DMatrix::zeros(3, 3)).is_err());
        assert!(pfaffian(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])).is_err());
        assert!(pfaffian(&DMatrix::zeros(2, 4)).is_err());
    }

    #[test]
    fn matches_expansion() {
        for k in [6, 8] {
            for seed in 0..5 {
                let a = random_antisym(k, 10 + seed);
                let want = pf_expand(&a);
                assert!((pfaffian(&a).unwrap() - want).abs() < 1e-10 * want.abs().max(1.0));
            }
        }
    }

    #[test]
    fn square_is_determinant() {
        for seed in 0..10 {
            let a = random_antisym(12, 100 + seed);
            let pf = pfaffian(&a).unwrap();
            let det = a.clone().determinant();
            assert!((pf * pf - det).abs() <= 1e-8 * det.abs());
        }
    }

    #[test]
    fn singular_gives_zero() {
        let mut a = random_antisym(6, 7);
        for c in 0..6 {
            a[(3, c)] = 0.0;
            a[(c, 3)] = 0.0;
        }
        assert_eq!(pfaffian(&a).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_covariance() {
        let mut rng = stream(3, "pf", &[]);
        for k in [4, 6, 10] {
            let a = random_antisym(k, 200 + k as u64);
            let g = DMatrix::<f64>::from_fn(k, k, |_, _| rng.sample(StandardNormal));
            let q = g.qr().q();
            let det = q.determinant();
            let lhs = pfaffian(&(&q * &a * q.transpose())).unwrap();
            let rhs = det * pfaffian(&a).unwrap();
            assert!((lhs - rhs).abs() <= 1e-8 * rhs.abs().max(1.0));
        }
    }
}
