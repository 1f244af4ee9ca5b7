//! Stationary inductive limits `Z^d/L -> Z^d/L -> ...` of ordered groups.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use super::perron::{perron_data, PerronData};
use crate::lattice::{
    induced_endo_check, integer_kernel, quotient, smith, IntVector, IntegerLattice, QuotientPresentation,
};
use crate::matrix::{IntMatrix, Polynomial};

pub const DEFAULT_KERNEL_CAP: usize = 32;
pub const PERRON_TOLERANCE: f64 = 1e-9;
pub const CERTIFICATE_MAX_POWER: u32 = 12;
pub const CERTIFICATE_COEFFICIENT_BOUND: i64 = 10_000;
const PAIR_COEFFICIENT_BOUND: i64 = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LimitError {
    #[error("endomorphism does not map the relation lattice into itself")]
    EndoNotInduced,
    #[error("dimension mismatch: endomorphism is {rows}x{cols}, relations live in Z^{dim}")]
    DimensionMismatch { rows: usize, cols: usize, dim: usize },
    #[error("eventual kernel did not stabilize within {0} preimage steps")]
    KernelCap(usize),
}

/// The class of `vector` placed at stage `level`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupElement {
    pub level: usize,
    pub vector: IntVector,
}

impl GroupElement {
    pub fn new(level: usize, vector: IntVector) -> Self {
        Self { level, vector }
    }

    pub fn neg(&self) -> Self {
        Self { level: self.level, vector: self.vector.iter().map(|x| -x).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Positivity {
    Positive,
    Zero,
    Negative,
    Indeterminate,
}

impl fmt::Display for Positivity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Positivity::Positive => "positive",
            Positivity::Zero => "zero",
            Positivity::Negative => "negative",
            Positivity::Indeterminate => "indeterminate",
        })
    }
}

/// Isomorphism invariants used to compare limit groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariants {
    pub stable_rank: usize,
    pub torsion: Vec<BigInt>,
    pub char_poly: Polynomial,
}

impl fmt::Display for Invariants {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let torsion: Vec<String> = self.torsion.iter().map(ToString::to_string).collect();
        write!(f, "rank {}, torsion [{}], char poly {}", self.stable_rank, torsion.join(", "), self.char_poly)
    }
}

#[derive(Clone, Debug)]
pub struct LimitGroup {
    pub stage: QuotientPresentation,
    pub endo: IntMatrix,
    /// Vectors eventually mapped into the relations.
    pub eventual_kernel: IntegerLattice,
    pub kernel_steps: usize,
    pub stable_rank: usize,
    pub stable_torsion: Vec<BigInt>,
    /// The induced injective map on the free part of `Z^d / eventual_kernel`,
    /// acting on the coordinates given by [`LimitGroup::free_coordinates`].
    pub stable_matrix: IntMatrix,
    pub order_unit: GroupElement,
    pub perron: Option<PerronData>,
    col_transform: IntMatrix,
    kernel_rank: usize,
}

pub fn direct_limit(dim: usize, relations: &IntegerLattice, endo: &IntMatrix) -> Result<LimitGroup, LimitError> {
    direct_limit_with_cap(dim, relations, endo, DEFAULT_KERNEL_CAP)
}

pub fn direct_limit_with_cap(
    dim: usize,
    relations: &IntegerLattice,
    endo: &IntMatrix,
    cap: usize,
) -> Result<LimitGroup, LimitError> {
    if endo.rows() != dim || endo.cols() != dim || relations.ambient_dim() != dim {
        return Err(LimitError::DimensionMismatch { rows: endo.rows(), cols: endo.cols(), dim });
    }
    if !induced_endo_check(endo, relations) {
        return Err(LimitError::EndoNotInduced);
    }
    let mut kernel = relations.clone();
    let mut steps = 0;
    loop {
        let next = kernel.preimage(endo);
        if next == kernel {
            break;
        }
        steps += 1;
        if steps > cap {
            return Err(LimitError::KernelCap(cap));
        }
        kernel = next;
    }

    let snf = smith(kernel.basis(), dim);
    let r = snf.invariants.len();
    let q = snf.col_transform;
    let n = snf.col_transform_inv.mul(&endo.transpose()).mul(&q);
    let stable_matrix = n.trailing_block(r).transpose();
    let stable_torsion = snf.invariants.into_iter().filter(|d| !d.is_one()).collect();

    Ok(LimitGroup {
        stage: quotient(dim, relations),
        endo: endo.clone(),
        eventual_kernel: kernel,
        kernel_steps: steps,
        stable_rank: dim - r,
        stable_torsion,
        stable_matrix,
        order_unit: GroupElement::new(1, vec![BigInt::one(); dim]),
        perron: perron_data(endo),
        col_transform: q,
        kernel_rank: r,
    })
}

impl LimitGroup {
    pub fn dim(&self) -> usize {
        self.endo.rows()
    }

    pub fn invariants(&self) -> Invariants {
        Invariants {
            stable_rank: self.stable_rank,
            torsion: self.stable_torsion.clone(),
            char_poly: self.stable_matrix.char_poly(),
        }
    }

    pub fn order_unit(&self) -> &GroupElement {
        &self.order_unit
    }

    /// Coordinates of the class of `v` on the free part of the stable
    /// quotient. `stable_matrix` acts on these.
    pub fn free_coordinates(&self, v: &[BigInt]) -> Vec<BigInt> {
        (self.kernel_rank..self.dim())
            .map(|j| v.iter().zip(self.col_transform.column(j)).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `endo^(level - x.level) x.vector`.
    pub fn promote(&self, x: &GroupElement, level: usize) -> IntVector {
        assert!(level >= x.level);
        assert_eq!(x.vector.len(), self.dim());
        (x.level..level).fold(x.vector.clone(), |v, _| self.endo.mul_vec(&v))
    }

    pub fn element_eq(&self, x: &GroupElement, y: &GroupElement) -> bool {
        let level = x.level.max(y.level);
        let diff: IntVector = self.promote(x, level).iter().zip(self.promote(y, level)).map(|(a, b)| a - b).collect();
        self.eventual_kernel.contains(&diff)
    }

    /// `⟨λ, x⟩ / ρ^level` for the normalized left Perron eigenvector `λ`.
    pub fn perron_value(&self, x: &GroupElement) -> Option<f64> {
        let p = self.perron.as_ref()?;
        let raw: f64 = p.left_eigenvector.iter().zip(&x.vector).map(|(l, v)| l * to_f64(v)).sum();
        Some(raw / p.eigenvalue.powi(x.level as i32))
    }

    pub fn is_positive(&self, x: &GroupElement) -> Positivity {
        if self.eventual_kernel.contains(&x.vector) {
            return Positivity::Zero;
        }
        if let Some(p) = &self.perron {
            let tau: f64 = p.left_eigenvector.iter().zip(&x.vector).map(|(l, v)| l * to_f64(v)).sum();
            let scale: f64 = x.vector.iter().map(|v| to_f64(v).abs()).sum();
            if tau > PERRON_TOLERANCE * scale {
                return Positivity::Positive;
            }
            if tau < -PERRON_TOLERANCE * scale {
                return Positivity::Negative;
            }
        }
        let mut y = x.vector.clone();
        for _ in 0..=CERTIFICATE_MAX_POWER {
            if nonnegative_shift(&y, self.eventual_kernel.basis()).is_some() {
                return Positivity::Positive;
            }
            let neg: IntVector = y.iter().map(|v| -v).collect();
            if nonnegative_shift(&neg, self.eventual_kernel.basis()).is_some() {
                return Positivity::Negative;
            }
            y = self.endo.mul_vec(&y);
        }
        Positivity::Indeterminate
    }
}

fn to_f64(v: &BigInt) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    if r.is_zero() {
        q
    } else {
        q + 1
    }
}

/// Integer `c` with `|c| <= bound`, `y + c b >= 0` and `y + c b != 0`.
fn single_shift(y: &[BigInt], b: &[BigInt], bound: i64) -> Option<BigInt> {
    let mut lo = BigInt::from(-bound);
    let mut hi = BigInt::from(bound);
    for (yi, bi) in y.iter().zip(b) {
        if bi.is_positive() {
            lo = lo.max(ceil_div(&-yi, bi));
        } else if bi.is_negative() {
            hi = hi.min(yi.div_floor(&-bi));
        } else if yi.is_negative() {
            return None;
        }
    }
    let mut c = lo;
    while c <= hi {
        if y.iter().zip(b).any(|(yi, bi)| !(yi + &c * bi).is_zero()) {
            return Some(c);
        }
        c += 1;
    }
    None
}

/// A non-zero non-negative vector in `y + span_Z(basis)` reachable with one
/// basis coefficient up to the certificate bound, or two with the second up
/// to a small bound.
pub fn nonnegative_shift(y: &[BigInt], basis: &[IntVector]) -> Option<IntVector> {
    let axpy =
        |c: &BigInt, b: &[BigInt], y: &[BigInt]| -> IntVector { y.iter().zip(b).map(|(a, x)| a + c * x).collect() };
    if y.iter().all(|v| !v.is_negative()) && y.iter().any(|v| !v.is_zero()) {
        return Some(y.to_vec());
    }
    for b in basis {
        if let Some(c) = single_shift(y, b, CERTIFICATE_COEFFICIENT_BOUND) {
            return Some(axpy(&c, b, y));
        }
    }
    for (i, bi) in basis.iter().enumerate() {
        for c1 in (-PAIR_COEFFICIENT_BOUND..=PAIR_COEFFICIENT_BOUND).filter(|&c| c != 0) {
            let y1 = axpy(&BigInt::from(c1), bi, y);
            for (j, bj) in basis.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(c2) = single_shift(&y1, bj, CERTIFICATE_COEFFICIENT_BOUND) {
                    return Some(axpy(&c2, bj, &y1));
                }
            }
        }
    }
    None
}

/// Evidence that a relation lattice meets the non-negative orthant only at 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderAxiomReport {
    /// Strictly positive integer vector orthogonal to every relation; its
    /// existence proves the claim exactly.
    pub separating_functional: Option<IntVector>,
    /// Non-negative non-zero relation found by the bounded search.
    pub orthant_witness: Option<IntVector>,
    pub order_unit: Positivity,
    pub negated_order_unit: Positivity,
}

impl OrderAxiomReport {
    pub fn holds(&self) -> bool {
        self.separating_functional.is_some()
            && self.orthant_witness.is_none()
            && self.order_unit == Positivity::Positive
            && self.negated_order_unit == Positivity::Negative
    }
}

/// Rounds the least-squares projection of `approx` onto the orthogonal
/// complement of `lattice` to an integer vector and keeps it if it is
/// strictly positive.
pub fn separating_functional(lattice: &IntegerLattice, approx: &[f64]) -> Option<IntVector> {
    let d = lattice.ambient_dim();
    let orth = integer_kernel(lattice.basis(), d);
    if orth.is_empty() {
        return None;
    }
    let w = DMatrix::from_fn(d, orth.len(), |i, j| to_f64(&orth[j][i]));
    let target = DVector::from_column_slice(approx);
    let coeffs = w.clone().svd(true, true).solve(&target, 1e-12).ok()?;
    for scale in [1e3, 1e6, 1e9, 1e12] {
        let rounded: Vec<BigInt> = coeffs.iter().map(|c| BigInt::from((c * scale).round() as i64)).collect();
        let y: IntVector = (0..d).map(|i| orth.iter().zip(&rounded).map(|(w, c)| &w[i] * c).sum()).collect();
        if y.iter().all(Signed::is_positive) {
            return Some(y);
        }
    }
    None
}

pub fn order_axioms(g: &LimitGroup) -> OrderAxiomReport {
    let relations = &g.stage.relations;
    let approx = g.perron.as_ref().map(|p| p.left_eigenvector.clone()).unwrap_or_else(|| vec![1.0; g.dim()]);
    let zero = vec![BigInt::zero(); g.dim()];
    OrderAxiomReport {
        separating_functional: separating_functional(relations, &approx),
        orthant_witness: nonnegative_shift(&zero, relations.basis()),
        order_unit: g.is_positive(&g.order_unit),
        negated_order_unit: g.is_positive(&g.order_unit.neg()),
    }
}
