use nalgebra::{DMatrix, Schur};
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::matrix::{IntMatrix, Polynomial};

const SCHUR_MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Debug, PartialEq)]
pub struct PerronData {
    pub eigenvalue: f64,
    /// Set when the eigenvalue is an integer root of the characteristic
    /// polynomial; `eigenvalue` then holds it exactly.
    pub exact: bool,
    /// Left eigenvector `λ A = ρ λ`, positive, unit 1-norm.
    pub left_eigenvector: Vec<f64>,
    /// `ρ - |μ|` for the next largest eigenvalue modulus `|μ|`; `None` when
    /// no eigenvalue computation converges.
    pub gap: Option<f64>,
}

/// Some power of the 0/1 pattern of `a` is entrywise positive.
pub fn is_primitive(a: &IntMatrix) -> bool {
    let n = a.rows();
    if n == 0 || a.row_vecs().iter().flatten().any(Signed::is_negative) {
        return false;
    }
    let base: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| !a.get(i, j).is_zero()).collect()).collect();
    let mut p = base.clone();
    // Wielandt's bound (n-1)^2 + 1
    for _ in 0..(n - 1) * (n - 1) + 1 {
        if p.iter().flatten().all(|&x| x) {
            return true;
        }
        p = (0..n).map(|i| (0..n).map(|j| (0..n).any(|k| p[i][k] && base[k][j])).collect()).collect();
    }
    false
}

/// Perron data of a primitive non-negative matrix, `None` otherwise.
pub fn perron_data(a: &IntMatrix) -> Option<PerronData> {
    if !is_primitive(a) {
        return None;
    }
    let n = a.rows();
    let m = a.to_f64();
    // power iteration for the left eigenvector on A^T + I
    let mut v = vec![1.0 / n as f64; n];
    for _ in 0..200_000 {
        let mut next: Vec<f64> = (0..n).map(|j| v[j] + (0..n).map(|i| v[i] * m[i][j]).sum::<f64>()).collect();
        let norm: f64 = next.iter().sum();
        next.iter_mut().for_each(|x| *x /= norm);
        let diff: f64 = next.iter().zip(&v).map(|(x, y)| (x - y).abs()).sum();
        v = next;
        if diff < 1e-15 {
            break;
        }
    }
    let mut rho: f64 = (0..n).map(|j| (0..n).map(|i| v[i] * m[i][j]).sum::<f64>()).sum();
    let rounded = rho.round();
    let exact = (rho - rounded).abs() < 1e-6 && a.char_poly().eval(&BigInt::from(rounded as i64)).is_zero();
    if exact {
        rho = rounded;
    }
    let gap = if n > 1 {
        eigenvalue_moduli(DMatrix::from_fn(n, n, |i, j| m[i][j]))
            .or_else(|| eigenvalue_moduli(companion(&a.char_poly().strip_x())?))
            .map(|moduli| rho - moduli.get(1).copied().unwrap_or(0.0))
    } else {
        None
    };
    Some(PerronData { eigenvalue: rho, exact, left_eigenvector: v, gap })
}

/// Eigenvalue moduli in decreasing order. The Schur iteration is bounded
/// because it can cycle forever on defective matrices.
fn eigenvalue_moduli(m: DMatrix<f64>) -> Option<Vec<f64>> {
    let schur = Schur::try_new(m, f64::EPSILON, SCHUR_MAX_ITERATIONS)?;
    let mut moduli: Vec<f64> = schur.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(|x, y| y.total_cmp(x));
    Some(moduli)
}

/// Companion matrix of a monic polynomial; carries its roots without the
/// Jordan structure of the original matrix.
fn companion(p: &Polynomial) -> Option<DMatrix<f64>> {
    let d = p.degree();
    if d == 0 {
        return None;
    }
    let c: Vec<f64> = p.coeffs().iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect();
    Some(DMatrix::from_fn(d, d, |i, j| {
        if j == d - 1 {
            -c[i]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    }))
}
