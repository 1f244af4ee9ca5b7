//! Sublattices of `Z^d`: Hermite normal form, integer kernels, Smith normal
//! form and quotient presentations.
//!
//! Lattices are always stored as the non-zero rows of their row-style Hermite
//! normal form: echelon, positive pivots, entries above each pivot reduced
//! into `[0, pivot)`. That basis is unique, so lattice equality is basis
//! equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::matrix::IntMatrix;

pub type IntVector = Vec<BigInt>;

pub fn to_big(v: &[i64]) -> IntVector {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

fn axpy(target: &mut [BigInt], q: &BigInt, source: &[BigInt]) {
    // target -= q * source
    if q.is_zero() {
        return;
    }
    for (t, s) in target.iter_mut().zip(source) {
        if !s.is_zero() {
            *t -= q * s;
        }
    }
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
/// Zero rows are dropped from the result.
pub fn hnf(mut rows: Vec<IntVector>, ncols: usize) -> Vec<IntVector> {
    rows.retain(|r| {
        assert_eq!(r.len(), ncols, "generator of wrong dimension");
        r.iter().any(|x| !x.is_zero())
    });
    let mut pivot_row = 0;
    for c in 0..ncols {
        if pivot_row == rows.len() {
            break;
        }
        loop {
            let best = (pivot_row..rows.len())
                .filter(|&i| !rows[i][c].is_zero())
                .min_by(|&i, &j| rows[i][c].abs().cmp(&rows[j][c].abs()));
            let Some(best) = best else { break };
            rows.swap(pivot_row, best);
            let (head, tail) = rows.split_at_mut(pivot_row + 1);
            let pivot = &head[pivot_row];
            let mut clean = true;
            for r in tail.iter_mut() {
                if r[c].is_zero() {
                    continue;
                }
                let q = r[c].div_floor(&pivot[c]);
                axpy(r, &q, pivot);
                if !r[c].is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if pivot_row < rows.len() && !rows[pivot_row][c].is_zero() {
            if rows[pivot_row][c].is_negative() {
                for x in rows[pivot_row].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            let (head, tail) = rows.split_at_mut(pivot_row);
            let pivot = &tail[0];
            for r in head.iter_mut() {
                let q = r[c].div_floor(&pivot[c]);
                axpy(r, &q, pivot);
            }
            pivot_row += 1;
        }
    }
    rows.truncate(pivot_row);
    rows
}

/// Basis (in HNF) of `{x in Z^ncols : r . x = 0 for every row r}`.
pub fn integer_kernel(rows: &[IntVector], ncols: usize) -> Vec<IntVector> {
    let reduced = hnf(rows.to_vec(), ncols);
    let p = reduced.len();
    if p == 0 {
        return identity_rows(ncols);
    }
    // Augmented [R^T | I]; rows whose R^T part vanishes after echelon
    // reduction carry kernel vectors in their identity part.
    let augmented: Vec<IntVector> = (0..ncols)
        .map(|j| {
            let mut row: IntVector = reduced.iter().map(|r| r[j].clone()).collect();
            row.extend((0..ncols).map(|k| if k == j { BigInt::one() } else { BigInt::zero() }));
            row
        })
        .collect();
    let echelon = hnf(augmented, p + ncols);
    let kernel: Vec<IntVector> =
        echelon.into_iter().filter(|r| r[..p].iter().all(Zero::is_zero)).map(|r| r[p..].to_vec()).collect();
    hnf(kernel, ncols)
}

fn identity_rows(n: usize) -> Vec<IntVector> {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

/// Smith normal form `P A Q = D` of an `m x n` matrix, keeping the column
/// transform `Q` and its inverse.
#[derive(Clone, Debug)]
pub struct SmithForm {
    /// Non-zero diagonal entries `d_1 | d_2 | ...`, all positive.
    pub invariants: Vec<BigInt>,
    pub col_transform: IntMatrix,
    pub col_transform_inv: IntMatrix,
}

pub fn smith(rows: &[IntVector], ncols: usize) -> SmithForm {
    let mut a: Vec<IntVector> = rows.to_vec();
    let m = a.len();
    let n = ncols;
    let mut q = identity_rows(n);
    let mut q_inv = identity_rows(n);

    // column op: col_j -= k * col_t, mirrored on Q and (inversely) on Q^-1
    fn col_sub(a: &mut [IntVector], q: &mut [IntVector], q_inv: &mut [IntVector], j: usize, t: usize, k: &BigInt) {
        if k.is_zero() {
            return;
        }
        for row in a.iter_mut().chain(q.iter_mut()) {
            let delta = k * &row[t];
            row[j] -= delta;
        }
        let src = q_inv[j].clone();
        for (x, s) in q_inv[t].iter_mut().zip(&src) {
            *x += k * s;
        }
    }
    fn col_swap(a: &mut [IntVector], q: &mut [IntVector], q_inv: &mut [IntVector], i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in a.iter_mut().chain(q.iter_mut()) {
            row.swap(i, j);
        }
        q_inv.swap(i, j);
    }

    let mut t = 0;
    while t < m.min(n) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j].is_zero() {
                    continue;
                }
                if best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        col_swap(&mut a, &mut q, &mut q_inv, t, bj);
        loop {
            let mut clean = true;
            for i in t + 1..m {
                if a[i][t].is_zero() {
                    continue;
                }
                let k = a[i][t].div_floor(&a[t][t]);
                let pivot = a[t].clone();
                axpy(&mut a[i], &k, &pivot);
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..n {
                if a[t][j].is_zero() {
                    continue;
                }
                let k = a[t][j].div_floor(&a[t][t]);
                col_sub(&mut a, &mut q, &mut q_inv, j, t, &k);
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // move the smallest remaining entry of the pivot cross to (t, t)
                let mut bi = t;
                let mut bj = t;
                for i in t + 1..m {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[bi][bj].abs() {
                        (bi, bj) = (i, t);
                    }
                }
                for j in t + 1..n {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[bi][bj].abs() {
                        (bi, bj) = (t, j);
                    }
                }
                a.swap(t, bi);
                col_swap(&mut a, &mut q, &mut q_inv, t, bj);
                continue;
            }
            let offender = (t + 1..m).find(|&i| (t + 1..n).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    let src = a[i].clone();
                    for (x, s) in a[t].iter_mut().zip(&src) {
                        *x += s;
                    }
                }
                None => break,
            }
        }
        if a[t][t].is_negative() {
            for x in a[t].iter_mut() {
                *x = -std::mem::take(x);
            }
        }
        t += 1;
    }
    let invariants = (0..t).map(|i| a[i][i].clone()).collect();
    SmithForm { invariants, col_transform: IntMatrix::from_rows(&q), col_transform_inv: IntMatrix::from_rows(&q_inv) }
}

/// A sublattice of `Z^d`, stored by its Hermite basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntegerLattice {
    ambient_dim: usize,
    basis: Vec<IntVector>,
}

impl IntegerLattice {
    pub fn zero(dim: usize) -> Self {
        Self { ambient_dim: dim, basis: Vec::new() }
    }

    pub fn full(dim: usize) -> Self {
        Self { ambient_dim: dim, basis: identity_rows(dim) }
    }

    pub fn from_generators(dim: usize, generators: Vec<IntVector>) -> Self {
        Self { ambient_dim: dim, basis: hnf(generators, dim) }
    }

    pub fn from_i64_generators(dim: usize, generators: &[Vec<i64>]) -> Self {
        Self::from_generators(dim, generators.iter().map(|g| to_big(g)).collect())
    }

    /// The lattice of integer vectors orthogonal to every row.
    pub fn kernel_of(dim: usize, rows: &[IntVector]) -> Self {
        Self { ambient_dim: dim, basis: integer_kernel(rows, dim) }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[IntVector] {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Membership by reduction against the Hermite basis.
    pub fn contains(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient_dim);
        let mut r = v.to_vec();
        for b in &self.basis {
            let c = b.iter().position(|x| !x.is_zero()).expect("non-zero basis row");
            if r[..c].iter().any(|x| !x.is_zero()) {
                return false;
            }
            let (q, rem) = r[c].div_rem(&b[c]);
            if !rem.is_zero() {
                return false;
            }
            axpy(&mut r, &q, b);
        }
        r.iter().all(Zero::is_zero)
    }

    pub fn contains_lattice(&self, other: &IntegerLattice) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &IntegerLattice) -> IntegerLattice {
        let gens = self.basis.iter().chain(&other.basis).cloned().collect();
        Self::from_generators(self.ambient_dim, gens)
    }

    /// `{ M v : v in self }` for a square endomorphism acting on columns.
    pub fn image(&self, endo: &IntMatrix) -> IntegerLattice {
        let gens = self.basis.iter().map(|b| endo.mul_vec(b)).collect();
        Self::from_generators(endo.rows(), gens)
    }

    /// `{ v : M v in self }`.
    pub fn preimage(&self, endo: &IntMatrix) -> IntegerLattice {
        let d = endo.cols();
        assert_eq!(endo.rows(), self.ambient_dim);
        let r = self.rank();
        // kernel of [M | -B^T] in the variables (v, c); project onto v
        let rows: Vec<IntVector> = (0..self.ambient_dim)
            .map(|i| {
                let mut row = endo.row(i).to_vec();
                row.extend(self.basis.iter().map(|b| -b[i].clone()));
                row
            })
            .collect();
        let kernel = integer_kernel(&rows, d + r);
        Self::from_generators(d, kernel.into_iter().map(|k| k[..d].to_vec()).collect())
    }

    /// `Z^d` intersected with the rational span of the lattice.
    pub fn saturation(&self) -> IntegerLattice {
        let orth = integer_kernel(&self.basis, self.ambient_dim);
        Self::kernel_of(self.ambient_dim, &orth)
    }

    pub fn is_invariant_under(&self, endo: &IntMatrix) -> bool {
        self.basis.iter().all(|b| self.contains(&endo.mul_vec(b)))
    }
}

/// Presentation of `Z^d / L` as `Z^free_rank + torsion`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientPresentation {
    pub ambient_dim: usize,
    pub relations: IntegerLattice,
    pub free_rank: usize,
    /// Invariant factors greater than one, each dividing the next.
    pub torsion: Vec<BigInt>,
}

pub fn quotient(dim: usize, relations: &IntegerLattice) -> QuotientPresentation {
    assert_eq!(relations.ambient_dim(), dim);
    let snf = smith(relations.basis(), dim);
    QuotientPresentation {
        ambient_dim: dim,
        relations: relations.clone(),
        free_rank: dim - snf.invariants.len(),
        torsion: snf.invariants.into_iter().filter(|d| !d.is_one()).collect(),
    }
}

/// Does `endo` map `relations` into itself (so it induces a map on the quotient)?
pub fn induced_endo_check(endo: &IntMatrix, relations: &IntegerLattice) -> bool {
    endo.is_square() && endo.rows() == relations.ambient_dim() && relations.is_invariant_under(endo)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(dim: usize, gens: &[Vec<i64>]) -> IntegerLattice {
        IntegerLattice::from_i64_generators(dim, gens)
    }

    #[test]
    fn hnf_is_canonical() {
        let a = lat(3, &[vec![2, 4, 6], vec![1, 1, 1]]);
        let b = lat(3, &[vec![1, 1, 1], vec![0, 2, 4], vec![3, 5, 7]]);
        assert_eq!(a, b);
        assert_eq!(a.basis(), &[to_big(&[1, 1, 1]), to_big(&[0, 2, 4])]);
    }

    #[test]
    fn membership() {
        let l = lat(2, &[vec![2, 0], vec![0, 3]]);
        assert!(l.contains(&to_big(&[4, -9])));
        assert!(!l.contains(&to_big(&[1, 0])));
        assert!(l.contains(&to_big(&[0, 0])));
        assert!(IntegerLattice::zero(2).contains(&to_big(&[0, 0])));
        assert!(!IntegerLattice::zero(2).contains(&to_big(&[0, 1])));
    }

    #[test]
    fn kernel_basics() {
        let k = integer_kernel(&[to_big(&[1, 1, 1])], 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert_eq!(v.iter().sum::<BigInt>(), BigInt::zero());
        }
        // primitive kernel: 2x - 4y = 0 -> (2, 1)
        let k = integer_kernel(&[to_big(&[2, -4])], 2);
        assert_eq!(k, vec![to_big(&[2, 1])]);
        assert_eq!(integer_kernel(&[], 2).len(), 2);
    }

    #[test]
    fn quotient_examples() {
        let q = quotient(3, &IntegerLattice::zero(3));
        assert_eq!((q.free_rank, q.torsion.len()), (3, 0));
        let q = quotient(1, &lat(1, &[vec![2]]));
        assert_eq!(q.free_rank, 0);
        assert_eq!(q.torsion, vec![BigInt::from(2)]);
        let q = quotient(2, &lat(2, &[vec![2, 0], vec![0, 3]]));
        assert_eq!(q.torsion, vec![BigInt::from(6)]);
    }

    #[test]
    fn smith_transforms_are_inverse() {
        let rows = vec![to_big(&[2, 4, 4]), to_big(&[-6, 6, 12]), to_big(&[10, 4, 16])];
        let s = smith(&rows, 3);
        assert_eq!(s.col_transform.mul(&s.col_transform_inv), IntMatrix::identity(3));
        assert_eq!(s.invariants, vec![BigInt::from(2), BigInt::from(2), BigInt::from(156)]);
    }

    #[test]
    fn preimage_and_saturation() {
        let l = lat(2, &[vec![1, 0]]);
        let swap = IntMatrix::from_rows(&[vec![0, 1], vec![1, 0]]);
        assert!(!induced_endo_check(&swap, &l));
        assert!(induced_endo_check(&IntMatrix::identity(2), &l));
        assert_eq!(l.preimage(&swap), lat(2, &[vec![0, 1]]));
        let l2 = lat(2, &[vec![2, 2]]);
        assert_eq!(l2.saturation(), lat(2, &[vec![1, 1]]));
        let doubling = IntMatrix::from_rows(&[vec![2, 0], vec![0, 2]]);
        assert_eq!(l2.preimage(&doubling), lat(2, &[vec![1, 1]]));
    }
}
