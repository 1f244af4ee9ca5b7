//! Acceptance suite. Runs every criterion in order and prints one
//! PASS/FAIL line each, then a summary line.

use std::time::{Duration, Instant};

use substitution_k0::bratteli::{tripled_substitution, StationaryOrderedDiagram};
use substitution_k0::corpus::{acceptance_corpus, DEFAULT_SEED};
use substitution_k0::kgroup::{
    absorption_exponents, b_subgroup, classical_dimension_group, delta_generators, order_axioms, substitution_k0,
    substitution_kgroup, DEFAULT_B_DEPTH_CAP,
};
use substitution_k0::matrix::Polynomial;
use substitution_k0::substitution::named;
use substitution_k0::verify::{
    collapse_at_power, path_count, random_commuting_square, three_block_equivalence,
    tripling_commutes_with_telescoping, VershikMap, VERSHIK_STEP_CAP,
};

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome { ok: true, detail: detail.into() }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome { ok: false, detail: detail.into() }
}

fn within(o: Outcome, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    match limit {
        Some(l) if elapsed > l => fail(format!("{} (took {elapsed:.2?}, limit {l:?})", o.detail)),
        _ => o,
    }
}

/// Every δ of a pair indicator has zero source sum on every path interval
/// with common source and range, over 4 levels of the tripled diagram.
fn interval_constraints_kill_delta() -> Outcome {
    let mut intervals = 0usize;
    for (name, s) in acceptance_corpus() {
        let q = tripled_substitution(&s);
        let d = StationaryOrderedDiagram::from_substitution(&q.substitution);
        let gens: Vec<Vec<i64>> = delta_generators(&q.triples, s.size())
            .iter()
            .map(|g| g.iter().map(|x| i64::try_from(x).unwrap()).collect())
            .collect();
        let mut bad = None;
        d.for_each_path_interval(4, |iv| {
            intervals += 1;
            if bad.is_some() {
                return;
            }
            for g in &gens {
                let sum: i64 = iv.source_counts.iter().zip(g).map(|(&c, &x)| c as i64 * x).sum();
                if sum != 0 {
                    bad = Some(format!("{name}: generator {g:?} sums to {sum} on depth-{} interval", iv.depth));
                }
            }
        });
        if let Some(b) = bad {
            return fail(b);
        }
    }
    pass(format!("23 substitutions, {intervals} intervals"))
}

fn commuting_square_random() -> Outcome {
    for (i, (name, s)) in acceptance_corpus().into_iter().enumerate() {
        if let Some(phi) = random_commuting_square(&s, DEFAULT_SEED + i as u64, 50) {
            return fail(format!("{name}: φ = {phi:?}"));
        }
    }
    pass("50 seeded φ on each of 23 substitutions")
}

fn absorption() -> Outcome {
    let mut worst = 0;
    for (name, s) in acceptance_corpus() {
        let k = substitution_k0(&s).unwrap();
        let d = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
        let b = b_subgroup(&d, 4, DEFAULT_B_DEPTH_CAP);
        if !b.stabilized {
            return fail(format!("{name}: B constraints did not stabilize"));
        }
        for (v, e) in b.lattice.basis().iter().zip(absorption_exponents(&k.beta, &k.delta, &b.lattice, 8)) {
            match e {
                Some(e) => worst = worst.max(e),
                None => return fail(format!("{name}: {v:?} not in Δ after 8 steps")),
            }
        }
    }
    pass(format!("largest exponent {worst}"))
}

fn proper_collapse() -> Outcome {
    let s = named::proper_aab_abb();
    let expected = Polynomial::from_i64(&[3, -4, 1]);
    for power in [1, 2] {
        let c = collapse_at_power(&s, power, 4).unwrap();
        if let Some(w) = c.annihilation_witness {
            return fail(format!("σ^{power}: (β^Q)^2 does not kill {w:?}"));
        }
    }
    let k = substitution_kgroup(&s).unwrap().invariants();
    let c = classical_dimension_group(&s).unwrap().invariants();
    if k != c || k.stable_rank != 2 || !k.torsion.is_empty() || k.char_poly != expected {
        return fail(format!("K0 {k} vs classical {c}"));
    }
    pass(format!("(β^Q)^2 kills B for σ and σ^2; {k}"))
}

fn fixture(s: substitution_k0::substitution::Substitution, expected: Polynomial) -> Outcome {
    let g = substitution_kgroup(&s).unwrap();
    let inv = g.invariants();
    if inv.stable_rank == 2 && inv.torsion.is_empty() && inv.char_poly == expected {
        pass(inv.to_string())
    } else {
        fail(format!("expected rank 2, no torsion, {expected}; computed {inv}"))
    }
}

fn tripling_coherence() -> Outcome {
    for (name, s) in acceptance_corpus() {
        if !three_block_equivalence(&s) {
            return fail(format!("{name}: tripled diagram differs from 3-block diagram"));
        }
    }
    for s in [named::thue_morse(), named::fibonacci()] {
        for k in [2, 3] {
            if !tripling_commutes_with_telescoping(&s, k) {
                return fail(format!("{s}: tripling and telescoping by {k} do not commute"));
            }
        }
    }
    pass("23 substitutions; telescoping by 2 and 3")
}

fn vershik() -> Outcome {
    let odometer = StationaryOrderedDiagram::from_substitution(&named::doubling());
    let proper = StationaryOrderedDiagram::from_substitution(&named::proper_aab_abb()).telescope(2).unwrap();
    for (name, d) in [("odometer", &odometer), ("aab_abb telescoped", &proper)] {
        let map = VershikMap::new(d).unwrap();
        let ProperOrderPair { min, max } = extremal(d);
        for level in 1..=4 {
            let all: Vec<_> = (0..d.vertex_count()).flat_map(|v| d.paths_from_top(v, level)).collect();
            let images: std::collections::HashSet<_> = all.iter().map(|p| map.step(p).unwrap()).collect();
            if images.len() != all.len() || !all.iter().all(|p| images.contains(p)) {
                return fail(format!("{name}: not a bijection at level {level}"));
            }
            let n = map.cycle_length(level, VERSHIK_STEP_CAP).unwrap();
            if n as u128 != path_count(d, level) {
                return fail(format!("{name}: cycle {n} at level {level}, {} paths", path_count(d, level)));
            }
            let top = d.max_path_to(max, level);
            if map.step(&top).unwrap() != d.min_path_to(min, level) {
                return fail(format!("{name}: maximal path does not map to minimal path at level {level}"));
            }
        }
    }
    pass("single cycles of length = path count at levels 1..=4")
}

struct ProperOrderPair {
    min: usize,
    max: usize,
}

fn extremal(d: &StationaryOrderedDiagram) -> ProperOrderPair {
    match d.proper_order() {
        substitution_k0::bratteli::ProperOrder::Proper { min_vertex, max_vertex } => {
            ProperOrderPair { min: min_vertex, max: max_vertex }
        }
        other => panic!("expected a proper diagram, got {other:?}"),
    }
}

fn order_axioms_hold() -> Outcome {
    for (name, s) in acceptance_corpus() {
        let g = substitution_kgroup(&s).unwrap();
        let r = order_axioms(&g);
        if !r.holds() {
            return fail(format!("{name}: {r:?}"));
        }
    }
    pass("separating functional found, no orthant witness, order unit positive, negation negative")
}

fn main() {
    type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 9] = [
        (1, "interval constraints kill Δ", interval_constraints_kill_delta, Some(Duration::from_secs(60))),
        (2, "β^Q δ(φ) = δ(φ') for random φ", commuting_square_random, None),
        (3, "B absorbed into Δ within 8 steps", absorption, None),
        (4, "proper collapse for a→aab, b→abb", proper_collapse, None),
        (
            5,
            "Thue–Morse fixture",
            || fixture(named::thue_morse(), Polynomial::from_roots(&[2, 1])),
            Some(Duration::from_secs(5)),
        ),
        (6, "Fibonacci fixture", || fixture(named::fibonacci(), Polynomial::from_i64(&[-1, -1, 1])), None),
        (7, "tripling coherence", tripling_coherence, None),
        (8, "Vershik sanity", vershik, Some(Duration::from_secs(1))),
        (9, "order axioms", order_axioms_hold, None),
    ];
    let mut failures = 0;
    for (n, name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let outcome = within(outcome, start.elapsed(), limit);
        let tag = if outcome.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {n} ({name}): {} [{:.2?}]", outcome.detail, start.elapsed());
        if !outcome.ok {
            failures += 1;
        }
    }
    println!("{} of 9 criteria passed", 9 - failures);
}
