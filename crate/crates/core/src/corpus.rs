//! Seeded random primitive aperiodic substitutions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::kgroup::check_preconditions;
use crate::substitution::{named, Alphabet, Letter, Substitution};

pub const DEFAULT_SEED: u64 = 20_240_917;
pub const CORPUS_SIZE: usize = 20;
pub const MAX_LETTERS: usize = 3;
pub const MAX_IMAGE_LEN: usize = 4;

/// `count` distinct primitive aperiodic substitutions on 2 or 3 letters
/// with images of length at most 4.
pub fn random_substitutions(seed: u64, count: usize) -> Vec<Substitution> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Substitution> = Vec::with_capacity(count);
    while out.len() < count {
        let n = rng.gen_range(2..=MAX_LETTERS);
        let alphabet = Alphabet::new(["a", "b", "c"].into_iter().take(n)).expect("distinct letters");
        let rules = (0..n)
            .map(|_| {
                let len = rng.gen_range(1..=MAX_IMAGE_LEN);
                (0..len).map(|_| Letter(rng.gen_range(0..n))).collect()
            })
            .collect();
        let s = Substitution::new(alphabet, rules).expect("non-empty images");
        if check_preconditions(&s).is_ok() && !out.contains(&s) {
            out.push(s);
        }
    }
    out
}

/// The named examples followed by the default random corpus.
pub fn acceptance_corpus() -> Vec<(String, Substitution)> {
    let mut out = vec![
        ("thue_morse".to_string(), named::thue_morse()),
        ("fibonacci".to_string(), named::fibonacci()),
        ("aab_abb".to_string(), named::proper_aab_abb()),
    ];
    out.extend(
        random_substitutions(DEFAULT_SEED, CORPUS_SIZE)
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("random_{i:02}"), s)),
    );
    out
}
