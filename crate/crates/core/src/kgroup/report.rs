//! Machine-readable summary of a K⁰ computation.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{
    absorption_exponents, b_subgroup, commuting_square_holds, order_axioms, substitution_k0, KGroupError,
    SubstitutionK0, DEFAULT_B_DEPTH_CAP,
};
use crate::bratteli::StationaryOrderedDiagram;
use crate::matrix::IntMatrix;
use crate::substitution::Substitution;

pub const SCHEMA_VERSION: u32 = 1;

/// Integer that serializes as a JSON number when it fits in `i64` and as a
/// decimal string otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Int(pub BigInt);

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self.0.to_i64() {
            Some(v) => s.serialize_i64(v),
            None => s.serialize_str(&self.0.to_string()),
        }
    }
}

impl<'de> Deserialize<'de> for Int {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(i64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Int(v.into())),
            Repr::Str(s) => s.parse().map(Int).map_err(serde::de::Error::custom),
        }
    }
}

fn ints(v: &[BigInt]) -> Vec<Int> {
    v.iter().cloned().map(Int).collect()
}

fn matrix(m: &IntMatrix) -> Vec<Vec<Int>> {
    m.row_vecs().iter().map(|r| ints(r)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    /// Every Δ generator satisfies every collected interval constraint.
    pub delta_in_b: bool,
    /// `β^Q δ(φ) = δ(φ')` for all `φ`.
    pub commuting_square: bool,
    /// Largest number of `β^Q` steps a B basis vector needs to enter Δ;
    /// `None` if some vector does not make it within `max_k`.
    pub absorption_max_k: Option<usize>,
    pub order_axioms: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KGroupReport {
    pub schema_version: u32,
    pub alphabet: Vec<String>,
    pub triples: Vec<String>,
    pub beta_matrix: Vec<Vec<Int>>,
    pub delta_rank: usize,
    pub b_rank: usize,
    pub b_depth: usize,
    pub b_stabilized: bool,
    pub stable_rank: usize,
    pub torsion: Vec<Int>,
    pub char_poly: String,
    pub stable_matrix: Vec<Vec<Int>>,
    pub order_unit: Vec<Int>,
    pub perron_eigenvalue: Option<f64>,
    pub checks: Checks,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    /// Level span the B constraints start from.
    pub levels: usize,
    pub b_cap: usize,
    pub max_k: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self { levels: 3, b_cap: DEFAULT_B_DEPTH_CAP, max_k: 8 }
    }
}

impl KGroupReport {
    /// Whether a configured cap cut the computation short.
    pub fn cap_exceeded(&self) -> bool {
        !self.b_stabilized || self.checks.absorption_max_k.is_none()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "alphabet: {}", self.alphabet.join(" "));
        let _ = writeln!(out, "3-blocks: {} ({})", self.triples.len(), self.triples.join(" "));
        let _ = writeln!(out, "rank of Δ: {}", self.delta_rank);
        let _ = writeln!(
            out,
            "rank of B: {} (levels 1..={}, {})",
            self.b_rank,
            self.b_depth,
            if self.b_stabilized { "stabilized" } else { "not stabilized" }
        );
        let torsion: Vec<String> = self.torsion.iter().map(|t| t.0.to_string()).collect();
        let _ = writeln!(out, "stable rank: {}", self.stable_rank);
        let _ = writeln!(out, "torsion: [{}]", torsion.join(", "));
        let _ = writeln!(out, "characteristic polynomial: {}", self.char_poly);
        if let Some(p) = self.perron_eigenvalue {
            let _ = writeln!(out, "Perron eigenvalue: {p}");
        }
        let c = &self.checks;
        let _ = writeln!(out, "Δ inside B: {}", c.delta_in_b);
        let _ = writeln!(out, "β^Q δ(φ) = δ(φ'): {}", c.commuting_square);
        match c.absorption_max_k {
            Some(k) => {
                let _ = writeln!(out, "B absorbed into Δ after {k} step(s)");
            }
            None => out.push_str("B not absorbed into Δ within the step cap\n"),
        }
        let _ = writeln!(out, "order axioms: {}", c.order_axioms);
        out
    }
}

pub fn kgroup_report(s: &Substitution, opts: ReportOptions) -> Result<KGroupReport, KGroupError> {
    let k = substitution_k0(s)?;
    Ok(build_report(s, &k, opts))
}

pub fn build_report(s: &Substitution, k: &SubstitutionK0, opts: ReportOptions) -> KGroupReport {
    let diagram = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
    let b = b_subgroup(&diagram, opts.levels, opts.b_cap);
    let absorption = absorption_exponents(&k.beta, &k.delta, &b.lattice, opts.max_k);
    let absorption_max_k = absorption.iter().try_fold(0usize, |acc, k| k.map(|k| acc.max(k)));
    let g = &k.limit;
    KGroupReport {
        schema_version: SCHEMA_VERSION,
        alphabet: s.alphabet().symbols().to_vec(),
        triples: k.tripled.substitution.alphabet().symbols().to_vec(),
        beta_matrix: matrix(&k.beta),
        delta_rank: k.delta.rank(),
        b_rank: b.lattice.rank(),
        b_depth: b.depth_reached,
        b_stabilized: b.stabilized,
        stable_rank: g.stable_rank,
        torsion: ints(&g.stable_torsion),
        char_poly: g.stable_matrix.char_poly().to_string(),
        stable_matrix: matrix(&g.stable_matrix),
        order_unit: ints(&g.order_unit.vector),
        perron_eigenvalue: g.perron.as_ref().map(|p| p.eigenvalue),
        checks: Checks {
            delta_in_b: b.lattice.contains_lattice(&k.delta),
            commuting_square: commuting_square_holds(s, &k.tripled, &k.beta),
            absorption_max_k,
            order_axioms: order_axioms(g).holds(),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::named::*;

    #[test]
    fn thue_morse_report() {
        let r = kgroup_report(&thue_morse(), ReportOptions::default()).unwrap();
        assert_eq!(r.triples.len(), 6);
        assert_eq!(r.delta_rank, 3);
        assert_eq!(r.stable_rank, 2);
        assert_eq!(r.char_poly, "x^2 - x - 2");
        assert!(r.checks.delta_in_b && r.checks.commuting_square && r.checks.order_axioms);
        assert!(r.checks.absorption_max_k.is_some());
        assert!(!r.cap_exceeded());
        let json = r.to_json();
        let back: KGroupReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        assert!(json.find("\"schema_version\"").unwrap() < json.find("\"checks\"").unwrap());
    }

    #[test]
    fn big_integers_round_trip_as_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let json = serde_json::to_string(&Int(big.clone())).unwrap();
        assert_eq!(json, "\"123456789012345678901234567890\"");
        assert_eq!(serde_json::from_str::<Int>(&json).unwrap(), Int(big));
        assert_eq!(serde_json::to_string(&Int(BigInt::from(-4))).unwrap(), "-4");
    }
}
