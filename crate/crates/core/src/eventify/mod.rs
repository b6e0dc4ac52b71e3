//! Event tuples ⟨s, v, o, m⟩ extracted from dependency parses, and the
//! representation variants built on top of them.

mod extract;
mod generalize;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::corpus::{ParsedSentence, NER_PERSON};
use crate::lexicon::Lexicons;

pub use extract::{extract_events, ExtractedEvent};
pub use generalize::{generalize_event, is_generalized, pronoun_synset};

/// Filler for an object or modifier slot that could not be identified.
pub const EMPTY: &str = "EmptyParameter";

/// Prefix of numbered person-name tags, e.g. `<NE>0`.
pub const NE_PREFIX: &str = "<NE>";

pub const GENRE_PREFIX: &str = "GENRE_";

pub fn ne_tag(n: usize) -> String {
    format!("{NE_PREFIX}{n}")
}

/// Index carried by an `<NE>n` tag.
pub fn parse_ne_tag(token: &str) -> Option<usize> {
    token.strip_prefix(NE_PREFIX)?.parse().ok()
}

pub fn genre_token(g: u32) -> String {
    format!("{GENRE_PREFIX}{g}")
}

pub fn is_genre_token(token: &str) -> bool {
    token
        .strip_prefix(GENRE_PREFIX)
        .is_some_and(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Event {
    pub s: String,
    pub v: String,
    pub o: String,
    pub m: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genre: Option<u32>,
}

impl Event {
    pub fn new(s: &str, v: &str, o: &str, m: &str) -> Self {
        Event {
            s: s.to_string(),
            v: v.to_string(),
            o: o.to_string(),
            m: m.to_string(),
            genre: None,
        }
    }

    pub fn slots(&self) -> [&str; 4] {
        [&self.s, &self.v, &self.o, &self.m]
    }

    pub fn slot_mut(&mut self, i: usize) -> &mut String {
        match i {
            0 => &mut self.s,
            1 => &mut self.v,
            2 => &mut self.o,
            3 => &mut self.m,
            _ => panic!("slot {i} out of range"),
        }
    }

    pub fn with_genre(mut self, genre: Option<u32>) -> Self {
        self.genre = genre;
        self
    }

    /// Serialized slot tokens: s v o m, then the genre token if present.
    pub fn tokens(&self) -> Vec<String> {
        let mut out: Vec<String> = self.slots().iter().map(|s| s.to_string()).collect();
        if let Some(g) = self.genre {
            out.push(genre_token(g));
        }
        out
    }

    /// Builds an event from 4 or 5 slot tokens. Missing slots are padded
    /// with [`EMPTY`]; a trailing `GENRE_g` token becomes the genre.
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let slot = |i: usize| {
            tokens
                .get(i)
                .map(|t| t.as_ref())
                .filter(|t| !is_genre_token(t))
                .unwrap_or(EMPTY)
                .to_string()
        };
        let genre = tokens
            .iter()
            .map(|t| t.as_ref())
            .find(|t| is_genre_token(t))
            .and_then(|t| t[GENRE_PREFIX.len()..].parse().ok());
        Event {
            s: slot(0),
            v: slot(1),
            o: slot(2),
            m: slot(3),
            genre,
        }
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |s: &str| if s == EMPTY { "∅".to_string() } else { s.to_string() };
        write!(f, "⟨{}, {}, {}, {}", show(&self.s), show(&self.v), show(&self.o), show(&self.m))?;
        if let Some(g) = self.genre {
            write!(f, ", {g}")?;
        }
        write!(f, "⟩")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordMode {
    Original,
    OriginalWithNe,
    Generalized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NeScope {
    /// A fresh table for every sentence.
    PerSentence,
    /// One table across both sentences of an input/output pair.
    Continued,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RepresentationConfig {
    pub word_mode: WordMode,
    pub ne_numbering: NeScope,
    pub include_genre: bool,
}

impl RepresentationConfig {
    pub const ORIGINAL: Self = Self::new(WordMode::Original);
    pub const ORIGINAL_WITH_NE: Self = Self::new(WordMode::OriginalWithNe);
    pub const GENERALIZED: Self = Self::new(WordMode::Generalized);

    pub const fn new(word_mode: WordMode) -> Self {
        RepresentationConfig {
            word_mode,
            ne_numbering: NeScope::PerSentence,
            include_genre: false,
        }
    }

    pub const fn continued(mut self) -> Self {
        self.ne_numbering = NeScope::Continued;
        self
    }

    pub const fn with_genre(mut self) -> Self {
        self.include_genre = true;
        self
    }
}

impl Default for RepresentationConfig {
    fn default() -> Self {
        Self::ORIGINAL
    }
}

/// Person names in order of first mention, numbered densely from 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NeTable {
    names: Vec<String>,
}

impl NeTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// Index of `name`, assigning the next free one on first sight.
    pub fn assign(&mut self, name: &str) -> usize {
        match self.index_of(name) {
            Some(i) => i,
            None => {
                self.names.push(name.to_string());
                self.names.len() - 1
            }
        }
    }

    pub fn extend<S: AsRef<str>>(&mut self, names: &[S]) {
        for n in names {
            self.assign(n.as_ref());
        }
    }

    pub fn name(&self, index: usize) -> Option<&str> {
        self.names.get(index).map(String::as_str)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

/// Numbers names by order of first occurrence.
pub fn assign_ne_indices<S: AsRef<str>>(names: &[S]) -> NeTable {
    let mut t = NeTable::new();
    t.extend(names);
    t
}

/// Token-index span (inclusive, 1-based) of the named-entity run that
/// contains `index`: the maximal stretch of adjacent tokens sharing its tag.
pub fn ne_span(sentence: &ParsedSentence, index: usize) -> (usize, usize) {
    let tag = &sentence.token(index).ner;
    let mut lo = index;
    while lo > 1 && sentence.token(lo - 1).ner == *tag {
        lo -= 1;
    }
    let mut hi = index;
    while hi < sentence.tokens.len() && sentence.token(hi + 1).ner == *tag {
        hi += 1;
    }
    (lo, hi)
}

/// Surface form of a PERSON run, used as the name key in an [`NeTable`].
pub fn person_name(sentence: &ParsedSentence, index: usize) -> String {
    let (lo, hi) = ne_span(sentence, index);
    (lo..=hi)
        .map(|i| sentence.token(i).surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// PERSON mentions of a sentence in surface order (contiguous runs merged).
pub fn person_mentions(sentence: &ParsedSentence) -> Vec<String> {
    let mut out = Vec::new();
    let mut i = 1;
    while i <= sentence.tokens.len() {
        if sentence.token(i).ner == NER_PERSON {
            let (_, hi) = ne_span(sentence, i);
            out.push(person_name(sentence, i));
            i = hi + 1;
        } else {
            i += 1;
        }
    }
    out
}

/// Extracts and renders a sentence's events under `config`. The caller
/// owns `ne_table` so that its scope can span a pair of sentences;
/// mentions of this sentence are registered before any event is rendered.
pub fn eventify_sentence(
    sentence: &ParsedSentence,
    config: &RepresentationConfig,
    ne_table: &mut NeTable,
    lex: &Lexicons,
    genre: Option<u32>,
) -> Vec<Event> {
    ne_table.extend(&person_mentions(sentence));
    extract_events(sentence)
        .iter()
        .map(|e| {
            generalize_event(e, sentence, config, ne_table, lex)
                .with_genre(if config.include_genre { genre } else { None })
        })
        .collect()
}

/// One line of an events JSON-lines file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EventRecord {
    pub story: String,
    pub sent: usize,
    pub idx: usize,
    pub s: String,
    pub v: String,
    pub o: String,
    pub m: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<u32>,
}

impl EventRecord {
    pub fn event(&self) -> Event {
        Event {
            s: self.s.clone(),
            v: self.v.clone(),
            o: self.o.clone(),
            m: self.m.clone(),
            genre: self.g,
        }
    }
}

/// Eventifies every sentence of every story, in corpus order. With
/// [`NeScope::Continued`] each sentence's table also holds the names of
/// the sentence before it, as the output side of a pair would see them.
pub fn eventify_story(
    story: &crate::corpus::Story,
    config: &RepresentationConfig,
    lex: &Lexicons,
    genre: Option<u32>,
) -> Vec<EventRecord> {
    let mut out = Vec::new();
    for (k, sentence) in story.sentences.iter().enumerate() {
        let mut table = NeTable::new();
        if config.ne_numbering == NeScope::Continued && k > 0 {
            table.extend(&person_mentions(&story.sentences[k - 1]));
        }
        for (idx, e) in eventify_sentence(sentence, config, &mut table, lex, genre)
            .into_iter()
            .enumerate()
        {
            out.push(EventRecord {
                story: story.id.clone(),
                sent: sentence.position,
                idx,
                s: e.s,
                v: e.v,
                o: e.o,
                m: e.m,
                g: e.genre,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn token_round_trip_with_genre() {
        let e = Event::new("a", "b", EMPTY, "d").with_genre(Some(7));
        assert_eq!(e.tokens(), ["a", "b", EMPTY, "d", "GENRE_7"]);
        assert_eq!(Event::from_tokens(&e.tokens()), e);
        assert_eq!(Event::from_tokens(&["x"]), Event::new("x", EMPTY, EMPTY, EMPTY));
    }

    #[test]
    fn display_uses_empty_symbol() {
        assert_eq!(
            Event::new("john", "go", "store", EMPTY).to_string(),
            "⟨john, go, store, ∅⟩"
        );
    }

    #[test]
    fn ne_table_numbers_by_first_mention() {
        let t = assign_ne_indices(&["Ann", "Bob", "Ann"]);
        assert_eq!(t.index_of("Ann"), Some(0));
        assert_eq!(t.index_of("Bob"), Some(1));
        assert_eq!(t.len(), 2);
        assert_eq!(parse_ne_tag(&ne_tag(12)), Some(12));
        assert_eq!(parse_ne_tag("<NE>x"), None);
    }

    #[test]
    fn genre_tokens() {
        assert!(is_genre_token("GENRE_0"));
        assert!(!is_genre_token("GENRE_"));
        assert!(!is_genre_token("genre_1"));
    }
}
