//! The coboundary subgroup `Δ = δ(Z^{A×A})` inside `Z^{A^Q}`.

use num_bigint::BigInt;

use crate::lattice::{IntVector, IntegerLattice};
use crate::substitution::{Letter, Substitution};

/// Index of the 2-block `(x, y)` in a function on `A × A`.
pub fn pair_index(n_letters: usize, x: Letter, y: Letter) -> usize {
    x.0 * n_letters + y.0
}

/// `δφ(a, b, c) = φ(b, c) - φ(a, b)`.
pub fn delta(triples: &[[Letter; 3]], n_letters: usize, phi: &[BigInt]) -> IntVector {
    assert_eq!(phi.len(), n_letters * n_letters);
    triples.iter().map(|&[a, b, c]| &phi[pair_index(n_letters, b, c)] - &phi[pair_index(n_letters, a, b)]).collect()
}

/// `δ` of the indicator of each pair, in pair-index order.
pub fn delta_generators(triples: &[[Letter; 3]], n_letters: usize) -> Vec<IntVector> {
    (0..n_letters * n_letters)
        .map(|k| {
            let mut phi = vec![BigInt::from(0); n_letters * n_letters];
            phi[k] = BigInt::from(1);
            delta(triples, n_letters, &phi)
        })
        .collect()
}

pub fn delta_subgroup(triples: &[[Letter; 3]], n_letters: usize) -> IntegerLattice {
    IntegerLattice::from_generators(triples.len(), delta_generators(triples, n_letters))
}

/// `φ'(u, v) = φ(last letter of σ(u), first letter of σ(v))`.
pub fn phi_prime(s: &Substitution, phi: &[BigInt]) -> Vec<BigInt> {
    let n = s.size();
    assert_eq!(phi.len(), n * n);
    let mut out = Vec::with_capacity(n * n);
    for u in s.alphabet().letters() {
        for v in s.alphabet().letters() {
            out.push(phi[pair_index(n, s.last_letter(u), s.first_letter(v))].clone());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bratteli::tripled_substitution;
    use crate::substitution::named::*;

    #[test]
    fn constant_phi_has_zero_coboundary() {
        let q = tripled_substitution(&thue_morse());
        let phi = vec![BigInt::from(7); 4];
        assert!(delta(&q.triples, 2, &phi).iter().all(|x| *x == BigInt::from(0)));
    }

    #[test]
    fn delta_ranks() {
        let tm = tripled_substitution(&thue_morse());
        assert_eq!(tm.triples.len(), 6);
        assert_eq!(delta_subgroup(&tm.triples, 2).rank(), 3);
        let fib = tripled_substitution(&fibonacci());
        assert_eq!(fib.triples.len(), 4);
        assert_eq!(delta_subgroup(&fib.triples, 2).rank(), 2);
    }

    #[test]
    fn phi_prime_of_indicator() {
        let s = thue_morse();
        let (a, b) = (Letter(0), Letter(1));
        let mut phi = vec![BigInt::from(0); 4];
        phi[pair_index(2, b, b)] = BigInt::from(1);
        let p = phi_prime(&s, &phi);
        let ones: Vec<usize> = (0..4).filter(|&k| p[k] == BigInt::from(1)).collect();
        assert_eq!(ones, vec![pair_index(2, a, b)]);
        assert_eq!(
            phi_prime(&s, &[BigInt::from(3), BigInt::from(3), BigInt::from(3), BigInt::from(3)]),
            vec![BigInt::from(3); 4]
        );
    }
}
