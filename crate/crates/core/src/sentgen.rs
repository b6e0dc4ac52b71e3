//! Partially generalized sentences (names and nouns abstracted, everything
//! else verbatim) and the working memory that fills placeholders back in.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::ParsedSentence;
use crate::eventify::{ne_span, ne_tag, parse_ne_tag, person_name, NeTable};
use crate::lexicon::{Lexicons, SynsetId};

/// Literal used for a name placeholder with no remembered name.
pub const UNKNOWN_NAME: &str = "someone";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedSentence {
    pub tokens: Vec<String>,
    pub ne_table: NeTable,
    /// (token position, placeholder, original word) for every abstracted
    /// noun or non-person entity, in surface order.
    pub noun_table: Vec<(usize, String, String)>,
}

/// Surface tokens with each named-entity run merged into one token
/// (words joined by a space). This is the tokenization
/// [`generalize_sentence`] substitutes into one-for-one.
pub fn merged_tokens(sentence: &ParsedSentence) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while i <= sentence.tokens.len() {
        let t = sentence.token(i);
        if t.is_named_entity() {
            let (_, hi) = ne_span(sentence, i);
            out.push(
                (i..=hi)
                    .map(|j| sentence.token(j).surface.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            );
            i = hi + 1;
        } else {
            out.push(t.surface.clone());
            i += 1;
        }
    }
    out
}

/// PERSON runs become `<NE>n` (numbered through `ne_table`), other named
/// entities their NER category, and common nouns the synset two hypernym
/// links up. Nouns unknown to WordNet and all other words are kept.
pub fn generalize_sentence(
    sentence: &ParsedSentence,
    lex: &Lexicons,
    ne_table: &mut NeTable,
) -> GeneralizedSentence {
    let mut tokens = Vec::new();
    let mut noun_table = Vec::new();
    let mut i = 1;
    while i <= sentence.tokens.len() {
        let t = sentence.token(i);
        let pos = tokens.len();
        if t.is_named_entity() {
            let (_, hi) = ne_span(sentence, i);
            let name = person_name(sentence, i);
            if t.is_person() {
                tokens.push(ne_tag(ne_table.assign(&name)));
            } else {
                noun_table.push((pos, t.ner.clone(), name));
                tokens.push(t.ner.clone());
            }
            i = hi + 1;
            continue;
        }
        let synset = (t.upos == "NOUN")
            .then(|| lex.hypernym_ancestor(&t.norm_lemma(), 2))
            .flatten();
        match synset {
            Some(s) => {
                let s = s.to_string();
                noun_table.push((pos, s.clone(), t.surface.clone()));
                tokens.push(s);
            }
            None => tokens.push(t.surface.clone()),
        }
        i += 1;
    }
    GeneralizedSentence {
        tokens,
        ne_table: ne_table.clone(),
        noun_table,
    }
}

/// Names per `<NE>` index and words per placeholder, in the order they
/// were seen. Filling hands out the k-th remembered word to the k-th
/// occurrence of a placeholder, reusing the last one once they run out.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorkingMemory {
    names: BTreeMap<usize, String>,
    words: HashMap<String, Vec<String>>,
}

impl WorkingMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Memory holding exactly what `g` abstracted.
    pub fn from_generalized(g: &GeneralizedSentence) -> Self {
        let mut m = Self::new();
        m.absorb(g);
        m
    }

    /// Records the names and words of a newly generalized sentence,
    /// replacing earlier entries for the same placeholders.
    pub fn absorb(&mut self, g: &GeneralizedSentence) {
        for (n, name) in g.ne_table.names().iter().enumerate() {
            self.names.insert(n, name.clone());
        }
        let mut fresh: HashMap<String, Vec<String>> = HashMap::new();
        for (_, placeholder, word) in &g.noun_table {
            fresh.entry(placeholder.clone()).or_default().push(word.clone());
        }
        self.words.extend(fresh);
    }

    pub fn remember_name(&mut self, index: usize, name: &str) {
        self.names.insert(index, name.to_string());
    }

    pub fn remember_word(&mut self, placeholder: &str, word: &str) {
        self.words
            .insert(placeholder.to_string(), vec![word.to_string()]);
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(&index).map(String::as_str)
    }

    pub fn names(&self) -> &BTreeMap<usize, String> {
        &self.names
    }

    pub fn word(&self, placeholder: &str) -> Option<&str> {
        self.words
            .get(placeholder)
            .and_then(|v| v.last())
            .map(String::as_str)
    }
}

/// Replaces placeholders in generated tokens.
///
/// `<NE>n` takes the remembered name, or [`UNKNOWN_NAME`] (which is then
/// remembered for n). Synset renderings and NER categories take the
/// remembered word; an unremembered synset becomes its head lemma with
/// spaces, an unremembered category stays as is.
pub fn fill_placeholders<S: AsRef<str>>(tokens: &[S], memory: &mut WorkingMemory) -> Vec<String> {
    let mut seen: HashMap<&str, usize> = HashMap::new();
    let mut out = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let tok = tok.as_ref();
        if let Some(n) = parse_ne_tag(tok) {
            let name = memory
                .name(n)
                .map(str::to_string)
                .unwrap_or_else(|| UNKNOWN_NAME.to_string());
            memory.names.entry(n).or_insert_with(|| name.clone());
            out.push(name);
            continue;
        }
        if let Some(words) = memory.words.get(tok).filter(|w| !w.is_empty()) {
            let k = seen.entry(tok).or_insert(0);
            out.push(words[(*k).min(words.len() - 1)].clone());
            *k += 1;
            continue;
        }
        match tok.parse::<SynsetId>() {
            Ok(s) => out.push(s.display_lemma()),
            Err(_) => out.push(tok.to_string()),
        }
    }
    out
}
