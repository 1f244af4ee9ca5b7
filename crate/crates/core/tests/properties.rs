use std::collections::HashSet;

use num_bigint::BigInt;
use proptest::prelude::*;

use substitution_k0::bratteli::{tripled_substitution, StationaryOrderedDiagram};
use substitution_k0::corpus::acceptance_corpus;
use substitution_k0::kgroup::{
    absorption_exponents, b_subgroup, check_preconditions, commuting_square_holds, delta, phi_prime, substitution_k0,
    substitution_kgroup, GroupElement,
};
use substitution_k0::lattice::{hnf, smith, IntVector};
use substitution_k0::matrix::IntMatrix;
use substitution_k0::substitution::{Alphabet, Letter, Substitution};
use substitution_k0::verify::{path_count, tripling_commutes_with_telescoping, VershikMap};

const SYMBOLS: [&str; 3] = ["a", "b", "c"];

fn build(images: Vec<Vec<usize>>) -> Substitution {
    let n = images.len();
    let alphabet = Alphabet::new(SYMBOLS[..n].iter().copied()).unwrap();
    Substitution::new(alphabet, images.into_iter().map(|w| w.into_iter().map(Letter).collect()).collect()).unwrap()
}

fn images(n: usize, min_len: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    prop::collection::vec(prop::collection::vec(0..n, min_len..=4), n)
}

fn any_substitution() -> impl Strategy<Value = Substitution> {
    (2usize..=3).prop_flat_map(|n| images(n, 1)).prop_map(build)
}

fn primitive() -> impl Strategy<Value = Substitution> {
    any_substitution().prop_filter("primitive", Substitution::is_primitive)
}

/// Primitive and aperiodic, the input class of the K0 pipeline.
fn admissible() -> impl Strategy<Value = Substitution> {
    primitive().prop_filter("aperiodic", |s| check_preconditions(s).is_ok())
}

/// Every image starts with `a` and ends with `b`.
fn proper() -> impl Strategy<Value = Substitution> {
    (2usize..=3)
        .prop_flat_map(|n| prop::collection::vec(prop::collection::vec(0..n, 0..=2), n))
        .prop_map(|middles| build(middles.into_iter().map(|m| [vec![0], m, vec![1]].concat()).collect()))
        .prop_filter("primitive", Substitution::is_primitive)
}

fn word(n: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((0..n).prop_map(Letter), 0..12)
}

fn big_rows(rows: &[Vec<i64>]) -> Vec<IntVector> {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[derive(Clone, Debug)]
enum RowOp {
    Swap(usize, usize),
    Negate(usize),
    AddMultiple { from: usize, to: usize, factor: i64 },
}

fn row_op(m: usize) -> impl Strategy<Value = RowOp> {
    prop_oneof![
        (0..m, 0..m).prop_map(|(i, j)| RowOp::Swap(i, j)),
        (0..m).prop_map(RowOp::Negate),
        (0..m, 0..m, -3i64..=3).prop_map(|(from, to, factor)| RowOp::AddMultiple { from, to, factor }),
    ]
}

fn apply_ops(rows: &mut [Vec<i64>], ops: &[RowOp]) {
    for op in ops {
        match *op {
            RowOp::Swap(i, j) => rows.swap(i, j),
            RowOp::Negate(i) => rows[i].iter_mut().for_each(|x| *x = -*x),
            RowOp::AddMultiple { from, to, factor } if from != to => {
                let src = rows[from].clone();
                rows[to].iter_mut().zip(src).for_each(|(x, y)| *x += factor * y);
            }
            RowOp::AddMultiple { .. } => {}
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn substitution_is_a_monoid_morphism(s in any_substitution(), u in word(3), v in word(3)) {
        let n = s.size();
        let u: Vec<Letter> = u.into_iter().filter(|l| l.0 < n).collect();
        let v: Vec<Letter> = v.into_iter().filter(|l| l.0 < n).collect();
        let uv = [u.clone(), v.clone()].concat();
        prop_assert_eq!(s.apply(&uv), [s.apply(&u), s.apply(&v)].concat());
        prop_assert!(s.apply(&[]).is_empty());
    }

    #[test]
    fn incidence_of_square_is_square_of_incidence(s in any_substitution()) {
        let m = s.incidence_matrix().0;
        prop_assert_eq!(s.compose(&s).incidence_matrix().0, m.mul(&m));
        prop_assert_eq!(s.power(3).incidence_matrix().0, m.pow(3));
    }

    #[test]
    fn language_is_factorial_and_invariant(s in primitive(), n in 2usize..=4) {
        let blocks: HashSet<_> = s.language_blocks(n).into_iter().collect();
        let shorter: HashSet<_> = s.language_blocks(n - 1).into_iter().collect();
        for b in &blocks {
            prop_assert!(shorter.contains(&b[..n - 1]));
            prop_assert!(shorter.contains(&b[1..]));
            let image = s.apply(b);
            for f in image.windows(n) {
                prop_assert!(blocks.contains(f));
            }
        }
    }

    #[test]
    fn tripling_commutes_with_squaring(s in admissible()) {
        prop_assert!(tripling_commutes_with_telescoping(&s, 2));
    }

    #[test]
    fn tripled_images_lift_the_middle_image(s in admissible()) {
        let q = tripled_substitution(&s);
        for (t, triple) in q.triples.iter().enumerate() {
            let image = q.substitution.image(Letter(t));
            // column sums of the tripled incidence depend only on the middle letter
            prop_assert_eq!(image.len(), s.image(triple[1]).len());
            let middles: Vec<Letter> = image.iter().map(|l| q.triples[l.0][1]).collect();
            prop_assert_eq!(middles.as_slice(), s.image(triple[1]));
            for w in image.windows(2) {
                let (x, y) = (q.triples[w[0].0], q.triples[w[1].0]);
                prop_assert_eq!((x[1], x[2]), (y[0], y[1]));
            }
        }
    }

    #[test]
    fn hnf_and_smith_are_row_operation_invariants(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 4), 3),
        ops in prop::collection::vec(row_op(3), 0..10),
    ) {
        let mut moved = rows.clone();
        apply_ops(&mut moved, &ops);
        prop_assert_eq!(hnf(big_rows(&rows), 4), hnf(big_rows(&moved), 4));
        prop_assert_eq!(smith(&big_rows(&rows), 4).invariants, smith(&big_rows(&moved), 4).invariants);
    }

    #[test]
    fn smith_invariants_ignore_column_operations(
        rows in prop::collection::vec(prop::collection::vec(-6i64..=6, 3), 3),
        ops in prop::collection::vec(row_op(3), 0..10),
    ) {
        let mut t: Vec<Vec<i64>> = (0..3).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        apply_ops(&mut t, &ops);
        let moved: Vec<Vec<i64>> = (0..3).map(|i| t.iter().map(|c| c[i]).collect()).collect();
        prop_assert_eq!(smith(&big_rows(&rows), 3).invariants, smith(&big_rows(&moved), 3).invariants);
    }

    #[test]
    fn element_equality_is_an_equivalence(
        which in 0usize..3,
        xs in prop::collection::vec((1usize..=3, prop::collection::vec(-3i64..=3, 64)), 3),
    ) {
        let (_, s) = acceptance_corpus().swap_remove(which);
        let g = substitution_kgroup(&s).unwrap();
        let d = g.dim();
        let elems: Vec<GroupElement> = xs
            .iter()
            .map(|(level, v)| GroupElement::new(*level, v[..d].iter().map(|&x| BigInt::from(x)).collect()))
            .collect();
        for x in &elems {
            prop_assert!(g.element_eq(x, x));
            let lifted = GroupElement::new(x.level + 1, g.promote(x, x.level + 1));
            prop_assert!(g.element_eq(x, &lifted));
            for y in &elems {
                prop_assert_eq!(g.element_eq(x, y), g.element_eq(y, x));
                for z in &elems {
                    if g.element_eq(x, y) && g.element_eq(y, z) {
                        prop_assert!(g.element_eq(x, z));
                    }
                }
            }
        }
    }

    #[test]
    fn delta_lies_in_b_and_is_absorbed(s in admissible()) {
        let k = substitution_k0(&s).unwrap();
        prop_assert!(commuting_square_holds(&s, &k.tripled, &k.beta));
        let d = StationaryOrderedDiagram::from_substitution(&k.tripled.substitution);
        // slowly growing substitutions need deeper levels than the default cap
        let cap = (1..=24).take_while(|&k| path_count(&d, k) <= 100_000).last().unwrap_or(1);
        let b = b_subgroup(&d, 3, cap);
        prop_assert!(b.stabilized);
        prop_assert!(b.lattice.contains_lattice(&k.delta));
        for e in absorption_exponents(&k.beta, &k.delta, &b.lattice, 8) {
            prop_assert!(e.is_some());
        }
    }

    #[test]
    fn beta_maps_delta_phi_to_delta_phi_prime(s in admissible(), seed in prop::collection::vec(-9i64..=9, 9)) {
        let q = tripled_substitution(&s);
        let n = s.size();
        let phi: Vec<BigInt> = seed[..n * n].iter().map(|&x| BigInt::from(x)).collect();
        let beta: IntMatrix = q.substitution.incidence_matrix().level_map();
        prop_assert_eq!(
            beta.mul_vec(&delta(&q.triples, n, &phi)),
            delta(&q.triples, n, &phi_prime(&s, &phi))
        );
    }

    #[test]
    fn vershik_map_is_one_cycle_on_proper_diagrams(s in proper()) {
        let d = StationaryOrderedDiagram::from_substitution(&s);
        let map = VershikMap::new(&d).unwrap();
        for level in 1..=3 {
            prop_assert_eq!(map.cycle_length(level, 1_000_000).unwrap() as u128, path_count(&d, level));
        }
    }
}
