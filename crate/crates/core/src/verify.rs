//! Finite-level checks tying the substitution, its diagrams and the
//! computed groups together.

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bratteli::{tripled_substitution, FinitePath, ProperOrder, StationaryOrderedDiagram};
use crate::corpus::DEFAULT_SEED;
use crate::kgroup::{
    absorption_exponents, b_subgroup, classical_dimension_group, commuting_square_holds, delta, order_axioms,
    phi_prime, substitution_k0, Invariants, KGroupError,
};
use crate::lattice::IntVector;
use crate::substitution::Substitution;

pub const VERSHIK_STEP_CAP: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum VerifyError {
    #[error("diagram is not properly ordered")]
    NotProper,
    #[error("substitution is not proper (first and last letters of images must be constant)")]
    SubstitutionNotProper,
    #[error("path is not a valid path from the top vertex")]
    InvalidPath,
    #[error("Vershik orbit exceeded {0} steps")]
    StepCap(usize),
    #[error("Vershik orbit revisited a path before closing the cycle")]
    NotACycle,
    #[error(transparent)]
    KGroup(#[from] KGroupError),
}

/// The floors of the tower over `vertex` at some level, bottom first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerView {
    pub vertex: usize,
    pub floors: Vec<FinitePath>,
}

impl TowerView {
    pub fn new(d: &StationaryOrderedDiagram, vertex: usize, level: usize) -> Self {
        Self { vertex, floors: d.paths_from_top(vertex, level) }
    }

    pub fn height(&self) -> usize {
        self.floors.len()
    }
}

/// Successor map on the paths from the top vertex to a fixed level of a
/// properly ordered stationary diagram.
#[derive(Clone, Debug)]
pub struct VershikMap<'a> {
    diagram: &'a StationaryOrderedDiagram,
    /// Towers in the order in which the orbit visits them.
    tower_cycle: Vec<usize>,
}

impl<'a> VershikMap<'a> {
    pub fn new(diagram: &'a StationaryOrderedDiagram) -> Result<Self, VerifyError> {
        let ProperOrder::Proper { min_vertex, max_vertex } = diagram.proper_order() else {
            return Err(VerifyError::NotProper);
        };
        let mut tower_cycle = vec![min_vertex];
        tower_cycle.extend((0..diagram.vertex_count()).filter(|&v| v != min_vertex && v != max_vertex));
        if max_vertex != min_vertex {
            tower_cycle.push(max_vertex);
        }
        Ok(Self { diagram, tower_cycle })
    }

    /// Replaces the first non-maximal edge by its successor and everything
    /// above it by the minimal path. A top floor moves to the bottom floor
    /// of the next tower in the cycle; the all-maximal path, which sits in
    /// the last tower, goes to the all-minimal path in the first.
    pub fn step(&self, p: &FinitePath) -> Result<FinitePath, VerifyError> {
        let d = self.diagram;
        if !p.is_valid(d) {
            return Err(VerifyError::InvalidPath);
        }
        match p.edges.iter().position(|&e| !d.is_max_edge(e)) {
            Some(i) => {
                let f = d.successor(p.edges[i]).expect("non-maximal edge has a successor");
                let mut next = d.min_path_to(d.edge(f).source, i + 1);
                next.edges.push(f);
                next.edges.extend_from_slice(&p.edges[i + 1..]);
                Ok(next)
            }
            None => {
                let v = p.range(d);
                let at = self.tower_cycle.iter().position(|&t| t == v).expect("every vertex is a tower");
                let next = self.tower_cycle[(at + 1) % self.tower_cycle.len()];
                Ok(d.min_path_to(next, p.level()))
            }
        }
    }

    /// Length of the orbit of the all-minimal path at `level`, checking that
    /// no path repeats before the orbit closes.
    pub fn cycle_length(&self, level: usize, cap: usize) -> Result<usize, VerifyError> {
        let start = self.diagram.min_path_to(self.tower_cycle[0], level);
        let mut seen = HashSet::new();
        let mut p = start.clone();
        loop {
            if !seen.insert(p.clone()) {
                return Err(VerifyError::NotACycle);
            }
            if seen.len() > cap {
                return Err(VerifyError::StepCap(cap));
            }
            p = self.step(&p)?;
            if p == start {
                return Ok(seen.len());
            }
        }
    }
}

pub fn vershik_step(d: &StationaryOrderedDiagram, p: &FinitePath) -> Result<FinitePath, VerifyError> {
    VershikMap::new(d)?.step(p)
}

/// Total number of paths from the top vertex to `level`.
pub fn path_count(d: &StationaryOrderedDiagram, level: usize) -> u128 {
    (0..d.vertex_count()).map(|v| d.path_count_from_top(v, level)).sum()
}

/// The 3-blocks are closed under the 3-block substitution and tripling the
/// diagram of `s` gives the diagram of the 3-block substitution.
pub fn three_block_equivalence(s: &Substitution) -> bool {
    let blocks = s.language_blocks(3);
    let q = tripled_substitution(s);
    let closed = q.substitution.alphabet().letters().flat_map(|t| q.substitution.image(t).to_vec()).all(|l| {
        let t = q.triples[l.0];
        blocks.binary_search(&t.to_vec()).is_ok()
    });
    let d = StationaryOrderedDiagram::from_substitution(s);
    closed
        && d.triple(&q.triple_indices()).as_ref() == Ok(&StationaryOrderedDiagram::from_substitution(&q.substitution))
}

/// `triple(telescope(d, k)) = telescope(triple(d), k)` on the 3-blocks.
pub fn tripling_commutes_with_telescoping(s: &Substitution, k: usize) -> bool {
    let blocks = tripled_substitution(s).triple_indices();
    let d = StationaryOrderedDiagram::from_substitution(s);
    let left = d.telescope(k).and_then(|t| t.triple(&blocks));
    let right = d.triple(&blocks).and_then(|t| t.telescope(k));
    left.is_ok() && left == right
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CollapseReport {
    /// Power of `s` used so that every image has length at least 2.
    pub power: usize,
    pub b_rank: usize,
    /// A B basis vector not killed by two steps of `β^Q`, if any.
    pub annihilation_witness: Option<IntVector>,
    pub kgroup: Invariants,
    pub classical: Invariants,
}

impl CollapseReport {
    pub fn annihilates(&self) -> bool {
        self.annihilation_witness.is_none()
    }

    pub fn invariants_match(&self) -> bool {
        self.kgroup == self.classical
    }

    pub fn holds(&self) -> bool {
        self.annihilates() && self.invariants_match()
    }
}

/// For a proper substitution, two steps of `β^Q` kill the B lattice, and
/// the K⁰ invariants equal those of the classical dimension group.
pub fn verify_proper_collapse(s: &Substitution, levels: usize) -> Result<CollapseReport, VerifyError> {
    if !s.is_proper() {
        return Err(VerifyError::SubstitutionNotProper);
    }
    let power = (1..).find(|&k| s.power(k).min_image_len() >= 2).expect("primitive images grow");
    collapse_at_power(s, power, levels)
}

pub fn collapse_at_power(s: &Substitution, power: usize, levels: usize) -> Result<CollapseReport, VerifyError> {
    if !s.is_proper() {
        return Err(VerifyError::SubstitutionNotProper);
    }
    let t = s.power(power);
    let k = substitution_k0(&t)?;
    let d = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
    let b = b_subgroup(&d, levels, levels.max(crate::kgroup::DEFAULT_B_DEPTH_CAP));
    let beta2 = k.beta.pow(2);
    let annihilation_witness =
        b.lattice.basis().iter().find(|v| beta2.mul_vec(v).iter().any(|x| x != &0.into())).cloned();
    Ok(CollapseReport {
        power,
        b_rank: b.lattice.rank(),
        annihilation_witness,
        kgroup: substitution_k0(s)?.limit.invariants(),
        classical: classical_dimension_group(s)?.invariants(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorptionReport {
    pub max_k: usize,
    pub b_stabilized: bool,
    /// Per B basis vector, the least number of steps into Δ.
    pub exponents: Vec<Option<usize>>,
}

impl AbsorptionReport {
    pub fn passed(&self) -> bool {
        self.exponents.iter().all(Option::is_some)
    }

    pub fn worst(&self) -> Option<usize> {
        self.exponents.iter().try_fold(0, |acc, k| k.map(|k| acc.max(k)))
    }
}

pub fn verify_absorption(s: &Substitution, max_k: usize, levels: usize) -> Result<AbsorptionReport, VerifyError> {
    let k = substitution_k0(s)?;
    let d = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
    let b = b_subgroup(&d, levels, levels.max(crate::kgroup::DEFAULT_B_DEPTH_CAP));
    Ok(AbsorptionReport {
        max_k,
        b_stabilized: b.stabilized,
        exponents: absorption_exponents(&k.beta, &k.delta, &b.lattice, max_k),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckLine {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub alphabet: Vec<String>,
    pub checks: Vec<CheckLine>,
}

impl VerificationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let tag = match c.status {
                CheckStatus::Pass => "PASS",
                CheckStatus::Fail => "FAIL",
                CheckStatus::Skip => "SKIP",
            };
            let _ = writeln!(out, "{tag} {}: {}", c.name, c.detail);
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct VerifyOptions {
    pub levels: usize,
    pub max_k: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { levels: 4, max_k: 8, seed: DEFAULT_SEED }
    }
}

/// Checks `β^Q δ(φ) = δ(φ')` for `count` random `φ` with entries in
/// `-9..=9`; returns the first failing `φ`.
pub fn random_commuting_square(s: &Substitution, seed: u64, count: usize) -> Option<Vec<BigInt>> {
    let q = tripled_substitution(s);
    let beta = q.substitution.incidence_matrix().level_map();
    let n = s.size();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| (0..n * n).map(|_| BigInt::from(rng.gen_range(-9i64..=9))).collect::<Vec<_>>())
        .find(|phi| beta.mul_vec(&delta(&q.triples, n, phi)) != delta(&q.triples, n, &phi_prime(s, phi)))
}

fn line(name: &'static str, ok: bool, detail: String) -> CheckLine {
    CheckLine { name, status: if ok { CheckStatus::Pass } else { CheckStatus::Fail }, detail }
}

fn skip(name: &'static str, detail: &str) -> CheckLine {
    CheckLine { name, status: CheckStatus::Skip, detail: detail.to_string() }
}

/// Runs every check that applies to `s`.
pub fn run_verification(s: &Substitution, opts: VerifyOptions) -> Result<VerificationReport, VerifyError> {
    let k = substitution_k0(s)?;
    let mut checks = Vec::new();

    checks.push(line(
        "three_block_equivalence",
        three_block_equivalence(s),
        "tripled diagram equals 3-block diagram".into(),
    ));
    let tele: Vec<usize> = [2, 3].into_iter().filter(|&j| !tripling_commutes_with_telescoping(s, j)).collect();
    checks.push(line(
        "tripling_commutes_with_telescoping",
        tele.is_empty(),
        if tele.is_empty() { "k = 2, 3".into() } else { format!("fails for k = {tele:?}") },
    ));

    let d = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
    let b = b_subgroup(&d, opts.levels, opts.levels.max(crate::kgroup::DEFAULT_B_DEPTH_CAP));
    let outside = k.delta.basis().iter().position(|g| !b.lattice.contains(g));
    checks.push(line(
        "delta_in_b",
        outside.is_none(),
        match outside {
            None => format!("rank Δ = {}, rank B = {}", k.delta.rank(), b.lattice.rank()),
            Some(i) => format!("Δ basis vector {:?} violates a constraint", k.delta.basis()[i]),
        },
    ));
    checks.push(line("b_stabilized", b.stabilized, format!("constraints over levels 1..={}", b.depth_reached)));
    checks.push(line(
        "commuting_square",
        commuting_square_holds(s, &k.tripled, &k.beta),
        "β^Q δ(φ) = δ(φ') on all pair indicators".into(),
    ));
    let bad_phi = random_commuting_square(s, opts.seed, 50);
    checks.push(line(
        "commuting_square_random",
        bad_phi.is_none(),
        match bad_phi {
            None => format!("50 random φ, seed {}", opts.seed),
            Some(phi) => format!("fails for φ = {phi:?}"),
        },
    ));
    let exps = absorption_exponents(&k.beta, &k.delta, &b.lattice, opts.max_k);
    let worst = exps.iter().try_fold(0, |acc: usize, k| k.map(|k| acc.max(k)));
    checks.push(line(
        "absorption",
        worst.is_some(),
        match worst {
            Some(w) => format!("every B basis vector enters Δ within {w} step(s)"),
            None => {
                let i = exps.iter().position(Option::is_none).unwrap_or(0);
                format!("B basis vector {:?} not absorbed within {} steps", b.lattice.basis()[i], opts.max_k)
            }
        },
    ));
    let order = order_axioms(&k.limit);
    checks.push(line(
        "order_axioms",
        order.holds(),
        format!(
            "separating functional {}, order unit {}, negation {}",
            if order.separating_functional.is_some() { "found" } else { "missing" },
            order.order_unit,
            order.negated_order_unit
        ),
    ));

    if s.is_proper() {
        let c = verify_proper_collapse(s, opts.levels)?;
        checks.push(line(
            "proper_collapse",
            c.holds(),
            match &c.annihilation_witness {
                Some(w) => format!("(β^Q)^2 does not kill B vector {w:?}"),
                None => format!("power {}: (β^Q)^2 kills B; K0 {} vs classical {}", c.power, c.kgroup, c.classical),
            },
        ));
    } else {
        checks.push(skip("proper_collapse", "substitution is not proper"));
    }

    let base = StationaryOrderedDiagram::from_substitution(s);
    match VershikMap::new(&base) {
        Ok(map) => {
            let mut bad = None;
            for level in 1..=opts.levels {
                let expected = path_count(&base, level);
                match map.cycle_length(level, VERSHIK_STEP_CAP) {
                    Ok(n) if n as u128 == expected => {}
                    Ok(n) => {
                        bad = Some(format!("level {level}: cycle {n}, paths {expected}"));
                        break;
                    }
                    Err(e) => {
                        bad = Some(format!("level {level}: {e}"));
                        break;
                    }
                }
            }
            checks.push(line(
                "vershik_cycle",
                bad.is_none(),
                bad.unwrap_or_else(|| format!("single cycle through all paths at levels 1..={}", opts.levels)),
            ));
        }
        Err(_) => checks.push(skip("vershik_cycle", "diagram is not properly ordered")),
    }

    Ok(VerificationReport { schema_version: 1, alphabet: s.alphabet().symbols().to_vec(), checks })
}
