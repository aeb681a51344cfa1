//! Randomized structural properties of the word problem in PSL2(Z).

use nc7::permgroup::{matrix_to_word, UnimodularMatrix, WordLetter};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn matrix_to_word_roundtrips_on_random_words() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let letters = [
        WordLetter::S,
        WordLetter::T,
        WordLetter::TInv,
        WordLetter::R,
        WordLetter::RInv,
    ];
    for _ in 0..500 {
        let len = rng.gen_range(0..=30);
        let word: Vec<WordLetter> =
            (0..len).map(|_| letters[rng.gen_range(0..letters.len())]).collect();
        let m = UnimodularMatrix::from_word(&word);
        let back = UnimodularMatrix::from_word(&matrix_to_word(&m));
        assert!(
            back.eq_up_to_sign(&m),
            "word {word:?} decomposed to a different matrix: {m} vs {back}"
        );
    }
}
