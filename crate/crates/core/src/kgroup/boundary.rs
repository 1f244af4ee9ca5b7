//! The subgroup `B` of vectors whose source sums vanish on every path
//! interval with common source and range.
//!
//! In the source sequence `W` of paths into a vertex, an interval with
//! common source is a segment `W[i..j)` with `W[i] = W[j]`. Every such
//! segment splits into first-return segments, so those generate the same
//! constraints. Over all depths the first-return segments are exactly the
//! return words of the diagram's substitution, which gives a finite target
//! rank for the depth iteration.

use std::collections::BTreeSet;

use crate::bratteli::StationaryOrderedDiagram;
use crate::lattice::{hnf, IntVector, IntegerLattice};
use crate::substitution::Substitution;

pub const DEFAULT_B_DEPTH_CAP: usize = 6;
const RETURN_WORD_LENGTH_CAP: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BSubgroup {
    pub lattice: IntegerLattice,
    /// Deepest level span whose constraints were collected.
    pub depth_reached: usize,
    /// Whether the collected constraints reached the return-word rank.
    pub stabilized: bool,
}

fn parikh(dim: usize, segment: &[usize]) -> Vec<i64> {
    let mut v = vec![0i64; dim];
    for &x in segment {
        v[x] += 1;
    }
    v
}

/// Source-count rows of the first-return intervals of paths spanning
/// exactly `depth` levels.
pub fn interval_constraints(d: &StationaryOrderedDiagram, depth: usize) -> BTreeSet<Vec<i64>> {
    let dim = d.vertex_count();
    let mut rows = BTreeSet::new();
    for v in 0..dim {
        let w = d.source_sequence(v, depth);
        let mut next = vec![usize::MAX; dim];
        for i in (0..w.len()).rev() {
            if next[w[i]] != usize::MAX {
                rows.insert(parikh(dim, &w[i..next[w[i]]]));
            }
            next[w[i]] = i;
        }
    }
    rows
}

/// Parikh vectors of all return words of `s`, or `None` if some letter
/// has no return within the length cap.
///
/// With `m` the shortest image length of `σ^k`, every factor of length at
/// most `m + 1` occurs in some `σ^k(xy)` with `xy` a 2-block. Once every
/// window of length `m + 1` in those words contains a second copy of its
/// first letter, all return words have length at most `m` and appear as
/// first-return segments there.
pub fn return_word_vectors(s: &Substitution) -> Option<BTreeSet<Vec<i64>>> {
    let dim = s.size();
    let pairs = s.language_blocks(2);
    let mut power = s.clone();
    loop {
        let m = power.min_image_len();
        if m > RETURN_WORD_LENGTH_CAP {
            return None;
        }
        let mut rows = BTreeSet::new();
        let mut complete = true;
        for xy in &pairs {
            let w: Vec<usize> = power.apply(xy).iter().map(|l| l.0).collect();
            let mut next = vec![usize::MAX; dim];
            for i in (0..w.len()).rev() {
                match next[w[i]] {
                    usize::MAX => complete &= i + m >= w.len(),
                    j => {
                        complete &= i + m >= w.len() || j <= i + m;
                        rows.insert(parikh(dim, &w[i..j]));
                    }
                }
                next[w[i]] = i;
            }
        }
        if complete {
            return Some(rows);
        }
        power = power.compose(s);
    }
}

fn to_rows(rows: &BTreeSet<Vec<i64>>) -> Vec<IntVector> {
    rows.iter().map(|r| crate::lattice::to_big(r)).collect()
}

/// `B` computed directly as the kernel of the return-word Parikh vectors.
pub fn return_word_kernel(d: &StationaryOrderedDiagram) -> Option<IntegerLattice> {
    let rows = return_word_vectors(&d.to_substitution())?;
    Some(IntegerLattice::kernel_of(d.vertex_count(), &to_rows(&rows)))
}

/// Collects interval constraints over `1..=n_levels` levels, then keeps
/// adding deeper levels until the constraint rank matches the return-word
/// rank or `cap` levels are reached.
pub fn b_subgroup(d: &StationaryOrderedDiagram, n_levels: usize, cap: usize) -> BSubgroup {
    assert!(n_levels >= 1);
    let dim = d.vertex_count();
    let target = return_word_vectors(&d.to_substitution()).map(|r| hnf(to_rows(&r), dim).len());
    let mut rows = BTreeSet::new();
    let mut depth = 0;
    let rank = |rows: &BTreeSet<Vec<i64>>| hnf(to_rows(rows), dim).len();
    while depth < n_levels {
        depth += 1;
        rows.extend(interval_constraints(d, depth));
    }
    let mut current = rank(&rows);
    while Some(current) != target && depth < cap.max(n_levels) {
        depth += 1;
        rows.extend(interval_constraints(d, depth));
        current = rank(&rows);
    }
    BSubgroup {
        lattice: IntegerLattice::kernel_of(dim, &to_rows(&rows)),
        depth_reached: depth,
        stabilized: Some(current) == target,
    }
}
