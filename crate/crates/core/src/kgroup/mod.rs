//! Dimension groups of substitution systems.
//!
//! The ordered K⁰ group of a primitive aperiodic substitution `σ` is the
//! inductive limit of `Z^{A^Q} / Δ` under the incidence map `β^Q` of the
//! 3-block substitution. [`substitution_kgroup`] computes its invariants;
//! [`classical_dimension_group`] is the plain limit of `Z^A` under the
//! incidence map, which agrees with it for proper substitutions.

pub mod boundary;
pub mod delta;
pub mod limit;
pub mod perron;
pub mod report;

use num_bigint::BigInt;
use thiserror::Error;

pub use boundary::{b_subgroup, return_word_kernel, BSubgroup, DEFAULT_B_DEPTH_CAP};
pub use delta::{delta, delta_generators, delta_subgroup, pair_index, phi_prime};
pub use limit::{
    direct_limit, direct_limit_with_cap, order_axioms, GroupElement, Invariants, LimitError, LimitGroup,
    OrderAxiomReport, Positivity,
};
pub use perron::{perron_data, PerronData};

use crate::bratteli::{tripled_substitution, TripledSubstitution};
use crate::lattice::IntegerLattice;
use crate::matrix::IntMatrix;
use crate::substitution::{Periodicity, Substitution};

/// Longest factor length inspected by the aperiodicity gate.
pub const PERIODICITY_WINDOW: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum KGroupError {
    #[error("substitution is not primitive")]
    NotPrimitive,
    #[error("periodic substitution (least period {0})")]
    Periodic(usize),
    #[error(transparent)]
    Limit(#[from] LimitError),
}

/// Refuses non-primitive and periodic input.
pub fn check_preconditions(s: &Substitution) -> Result<(), KGroupError> {
    if !s.is_primitive() {
        return Err(KGroupError::NotPrimitive);
    }
    if let Periodicity::Periodic(p) = s.periodicity(PERIODICITY_WINDOW) {
        return Err(KGroupError::Periodic(p));
    }
    Ok(())
}

/// Limit of `Z^A` under the incidence map, without quotienting.
pub fn classical_dimension_group(s: &Substitution) -> Result<LimitGroup, KGroupError> {
    if !s.is_primitive() {
        return Err(KGroupError::NotPrimitive);
    }
    let a = s.incidence_matrix().level_map();
    Ok(direct_limit(s.size(), &IntegerLattice::zero(s.size()), &a)?)
}

/// Everything computed on the way to the K⁰ group.
#[derive(Clone, Debug)]
pub struct SubstitutionK0 {
    pub tripled: TripledSubstitution,
    pub beta: IntMatrix,
    pub delta: IntegerLattice,
    pub limit: LimitGroup,
}

pub fn substitution_k0(s: &Substitution) -> Result<SubstitutionK0, KGroupError> {
    check_preconditions(s)?;
    let tripled = tripled_substitution(s);
    let beta = tripled.substitution.incidence_matrix().level_map();
    let delta = delta_subgroup(&tripled.triples, s.size());
    let limit = direct_limit(tripled.triples.len(), &delta, &beta)?;
    Ok(SubstitutionK0 { tripled, beta, delta, limit })
}

pub fn substitution_kgroup(s: &Substitution) -> Result<LimitGroup, KGroupError> {
    substitution_k0(s).map(|k| k.limit)
}

/// `β^Q δ(φ) = δ(φ')` on every pair indicator, hence for all `φ`.
pub fn commuting_square_holds(s: &Substitution, tripled: &TripledSubstitution, beta: &IntMatrix) -> bool {
    let n = s.size();
    (0..n * n).all(|k| {
        let mut phi = vec![BigInt::from(0); n * n];
        phi[k] = BigInt::from(1);
        beta.mul_vec(&delta(&tripled.triples, n, &phi)) == delta(&tripled.triples, n, &phi_prime(s, &phi))
    })
}

/// For each basis vector `v` of `b`, the least `k <= max_k` with
/// `endo^k v` in `target`.
pub fn absorption_exponents(
    endo: &IntMatrix,
    target: &IntegerLattice,
    b: &IntegerLattice,
    max_k: usize,
) -> Vec<Option<usize>> {
    b.basis()
        .iter()
        .map(|v| {
            let mut w = v.clone();
            for k in 0..=max_k {
                if target.contains(&w) {
                    return Some(k);
                }
                w = endo.mul_vec(&w);
            }
            None
        })
        .collect()
}
