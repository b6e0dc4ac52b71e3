#![allow(dead_code)]

use std::path::PathBuf;

use eventweave::corpus::{parse_conllu, Corpus, ParsedSentence, Story};
use eventweave::lexicon::Lexicons;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

pub fn lexicons() -> Lexicons {
    Lexicons::load(fixtures().join("wordnet"), fixtures().join("verbnet")).unwrap()
}

pub fn golden() -> Corpus {
    parse_conllu(&std::fs::read_to_string(fixtures().join("golden.conllu")).unwrap()).unwrap()
}

pub fn story<'a>(corpus: &'a Corpus, id: &str) -> &'a Story {
    corpus.stories.iter().find(|s| s.id == id).unwrap()
}

pub fn sentence<'a>(corpus: &'a Corpus, id: &str) -> &'a ParsedSentence {
    &story(corpus, id).sentences[0]
}

/// 300 documents drawn from 3 disjoint 50-word vocabularies; returns the
/// documents and their planted topic.
pub fn planted_topics(seed: u64) -> (Vec<Vec<String>>, Vec<usize>) {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for d in 0..300 {
        let topic = d % 3;
        let len = rng.gen_range(30..60);
        docs.push(
            (0..len)
                .map(|_| format!("t{topic}w{:02}", rng.gen_range(0..50)))
                .collect(),
        );
        labels.push(topic);
    }
    (docs, labels)
}

/// Fraction of items whose cluster's majority label matches their own.
pub fn purity(clusters: &[usize], labels: &[usize]) -> f64 {
    let mut table = std::collections::HashMap::<usize, std::collections::HashMap<usize, usize>>::new();
    for (&c, &l) in clusters.iter().zip(labels) {
        *table.entry(c).or_default().entry(l).or_default() += 1;
    }
    let majority: usize = table.values().map(|m| m.values().max().copied().unwrap_or(0)).sum();
    majority as f64 / labels.len() as f64
}

/// Event-to-event (original words) and event-to-sentence (original
/// sentence) models trained on all of `corpus`.
pub fn original_models(
    corpus: &Corpus,
    lex: &Lexicons,
) -> (
    eventweave::seqmodel::ConditionalSequenceModel,
    eventweave::seqmodel::ConditionalSequenceModel,
) {
    use eventweave::dataset::{build_e2e, build_e2s, E2ECondition, E2SCondition};
    use eventweave::seqmodel::{ConditionalSequenceModel, DEFAULT_K};
    let e2e = build_e2e(corpus, E2ECondition::OriginalWords, lex, None).unwrap();
    let e2s = build_e2s(corpus, E2SCondition::OrigEventOrigSent, lex);
    (
        ConditionalSequenceModel::train(&e2e.pairs, 3, DEFAULT_K).unwrap(),
        ConditionalSequenceModel::train(&e2s.pairs, 3, DEFAULT_K).unwrap(),
    )
}
