//! Split-and-prune sentence simplification over dependency parses.
//!
//! Prepositional phrases (`obl`/`nmod` with a `case` marker) are removed,
//! clause-level conjuncts with their own subject are split off without
//! their conjunction, and finite subordinate clauses that do not open
//! with a pronoun are detached without their first word.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::corpus::{detokenize, ParsedSentence, Token, NER_OUTSIDE};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceFragment {
    /// Surface words, capitalized and terminated with ".".
    pub tokens: Vec<String>,
    pub story_id: String,
    pub position: usize,
    pub index: usize,
    /// The source parse restricted to this fragment.
    pub parse: ParsedSentence,
}

impl SentenceFragment {
    pub fn text(&self) -> String {
        detokenize(&self.tokens)
    }

    pub fn record(&self) -> FragmentRecord {
        FragmentRecord {
            story: self.story_id.clone(),
            sent: self.position,
            frag: self.index,
            tokens: self.tokens.clone(),
            text: self.text(),
        }
    }
}

/// JSON-lines form of a fragment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub story: String,
    pub sent: usize,
    pub frag: usize,
    pub tokens: Vec<String>,
    pub text: String,
}

const RELATIVE_PRONOUNS: [&str; 4] = ["who", "whom", "whose", "which"];

fn is_predicate(sentence: &ParsedSentence, t: &Token) -> bool {
    t.upos == "VERB" || sentence.children(t.index).any(|c| c.base_deprel() == "cop")
}

fn has_subject(sentence: &ParsedSentence, t: &Token) -> bool {
    sentence.children(t.index).any(|c| c.base_deprel() == "nsubj")
}

fn is_pronoun(t: &Token) -> bool {
    t.upos == "PRON" || RELATIVE_PRONOUNS.contains(&t.norm_lemma().as_str())
}

fn is_prepositional_phrase(sentence: &ParsedSentence, t: &Token) -> bool {
    matches!(t.deprel.as_str(), "obl" | "nmod")
        && sentence.children(t.index).any(|c| c.base_deprel() == "case")
}

enum Split {
    Conjunct,
    Subordinate(usize),
}

fn split_kind(sentence: &ParsedSentence, t: &Token, pruned: &BTreeSet<usize>) -> Option<Split> {
    if t.head == 0 || !is_predicate(sentence, t) || !has_subject(sentence, t) {
        return None;
    }
    if t.base_deprel() == "conj" && is_predicate(sentence, sentence.token(t.head)) {
        return Some(Split::Conjunct);
    }
    if matches!(t.deprel.as_str(), "ccomp" | "advcl" | "acl:relcl") {
        let first = sentence
            .subtree(t.index)
            .into_iter()
            .map(|i| sentence.token(i))
            .find(|w| w.upos != "PUNCT" && !pruned.contains(&w.index))?;
        if !is_pronoun(first) && first.index != t.index {
            return Some(Split::Subordinate(first.index));
        }
    }
    None
}

/// Splits and prunes one sentence into simple fragments ordered by the
/// position of their head.
pub fn split_and_prune(sentence: &ParsedSentence) -> Vec<SentenceFragment> {
    let Some(root) = sentence.root() else {
        return Vec::new();
    };
    let mut pruned = BTreeSet::new();
    for t in &sentence.tokens {
        if is_prepositional_phrase(sentence, t) {
            pruned.extend(sentence.subtree(t.index));
        }
    }

    let mut heads = vec![root.index];
    let mut dropped = BTreeSet::new();
    for t in &sentence.tokens {
        if pruned.contains(&t.index) {
            continue;
        }
        match split_kind(sentence, t, &pruned) {
            Some(Split::Conjunct) => {
                heads.push(t.index);
                dropped.extend(
                    sentence
                        .children(t.index)
                        .filter(|c| c.base_deprel() == "cc")
                        .map(|c| c.index),
                );
            }
            Some(Split::Subordinate(first)) => {
                heads.push(t.index);
                dropped.insert(first);
            }
            None => {}
        }
    }
    heads.sort_unstable();

    let mut fragments = Vec::new();
    for &h in &heads {
        let mut keep: BTreeSet<usize> = sentence.subtree(h).into_iter().collect();
        for &other in &heads {
            if other != h && sentence.dominates(h, other) {
                for i in sentence.subtree(other) {
                    keep.remove(&i);
                }
            }
        }
        keep.retain(|i| !pruned.contains(i) && !dropped.contains(i));
        if let Some(parse) = project(sentence, h, &keep) {
            fragments.push(SentenceFragment {
                tokens: parse.tokens.iter().map(|t| t.surface.clone()).collect(),
                story_id: sentence.story_id.clone(),
                position: sentence.position,
                index: fragments.len(),
                parse,
            });
        }
    }
    fragments
}

/// Restricts a parse to `keep`, rooted at `head`: edge punctuation is
/// dropped, the first word capitalized and a final period appended.
fn project(sentence: &ParsedSentence, head: usize, keep: &BTreeSet<usize>) -> Option<ParsedSentence> {
    let mut kept: Vec<usize> = keep.iter().copied().collect();
    let is_punct = |i: usize| sentence.token(i).upos == "PUNCT" && i != head;
    while kept.first().is_some_and(|&i| is_punct(i)) {
        kept.remove(0);
    }
    while kept.last().is_some_and(|&i| is_punct(i)) {
        kept.pop();
    }
    if kept.iter().all(|&i| is_punct(i)) {
        return None;
    }

    let new_index = |old: usize| kept.iter().position(|&k| k == old).map(|p| p + 1);
    let root_new = new_index(head)?;
    let mut tokens: Vec<Token> = kept
        .iter()
        .enumerate()
        .map(|(p, &old)| {
            let t = sentence.token(old);
            let (head, deprel) = if old == head {
                (0, "root".to_string())
            } else {
                (new_index(t.head).unwrap_or(root_new), t.deprel.clone())
            };
            Token {
                index: p + 1,
                head,
                deprel,
                ..t.clone()
            }
        })
        .collect();
    tokens[0].surface = capitalize(&tokens[0].surface);
    tokens.push(Token {
        index: tokens.len() + 1,
        surface: ".".into(),
        lemma: ".".into(),
        upos: "PUNCT".into(),
        head: root_new,
        deprel: "punct".into(),
        ner: NER_OUTSIDE.into(),
    });
    let raw_text = detokenize(&tokens.iter().map(|t| &t.surface).collect::<Vec<_>>());
    Some(ParsedSentence {
        tokens,
        story_id: sentence.story_id.clone(),
        position: sentence.position,
        raw_text,
    })
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}
