use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Corpus;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusSplit {
    pub train: Corpus,
    pub validation: Corpus,
    pub test: Corpus,
}

/// Splits by story into 80/10/10. Validation and test each receive
/// `floor(n / 10)` stories chosen by a seeded shuffle; the remainder goes to
/// training. Each part keeps the corpus order.
pub fn split_corpus(corpus: &Corpus, seed: u64) -> Result<CorpusSplit> {
    let n = corpus.len();
    if n < 10 {
        return Err(Error::invalid(format!(
            "need at least 10 stories to split, got {n}"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let held = n / 10;
    let mut part = vec![0u8; n];
    for &i in &order[..held] {
        part[i] = 1;
    }
    for &i in &order[held..2 * held] {
        part[i] = 2;
    }

    let pick = |which: u8| Corpus {
        stories: corpus
            .stories
            .iter()
            .zip(&part)
            .filter(|(_, &p)| p == which)
            .map(|(s, _)| s.clone())
            .collect(),
    };
    Ok(CorpusSplit {
        train: pick(0),
        validation: pick(1),
        test: pick(2),
    })
}
