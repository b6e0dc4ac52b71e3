mod common;

use common::{golden, lexicons, sentence};
use eventweave::corpus::detokenize;
use eventweave::eventify::NeTable;
use eventweave::sentgen::{fill_placeholders, generalize_sentence, merged_tokens, WorkingMemory};

#[test]
fn droid_sentence_partial_generalization() {
    let corpus = golden();
    let g = generalize_sentence(sentence(&corpus, "droid"), &lexicons(), &mut NeTable::new());
    assert_eq!(
        detokenize(&g.tokens),
        "The remaining activity.n.01 launches a happening.n.01 droid at the ORGANIZATION 1 7 0 \
         which property.n.01 near the person.n.01 enlisted_person.n.01 rear skilled_worker.n.01 \
         who uses a instrumentality.n.03 of happening.n.01 chemical.n.01 to dislodge the \
         device.n.01."
    );
}

#[test]
fn function_words_only_unchanged() {
    let corpus = golden();
    let lex = lexicons();
    let s = sentence(&corpus, "dog");
    let g = generalize_sentence(s, &lex, &mut NeTable::new());
    assert_eq!(g.tokens.len(), merged_tokens(s).len());
    assert_eq!(g.tokens[2], "sleeps");
}

#[test]
fn generalize_then_fill_restores_every_golden_sentence() {
    let corpus = golden();
    let lex = lexicons();
    for s in corpus.sentences() {
        let g = generalize_sentence(s, &lex, &mut NeTable::new());
        let mut memory = WorkingMemory::from_generalized(&g);
        assert_eq!(fill_placeholders(&g.tokens, &mut memory), merged_tokens(s));
    }
}

#[test]
fn boy_is_restored_from_memory() {
    let corpus = golden();
    let lex = lexicons();
    let g = generalize_sentence(sentence(&corpus, "boy"), &lex, &mut NeTable::new());
    let mut memory = WorkingMemory::from_generalized(&g);
    let placeholder = g.tokens[1].clone();
    assert_ne!(placeholder, "boy");
    assert_eq!(fill_placeholders(&[placeholder.as_str(), "runs"], &mut memory), ["boy", "runs"]);
}
