//! Dependency-parsed story corpora: data model, CoNLL-U I/O, wiki-markup
//! cleaning and the by-story train/validation/test split.

mod clean;
mod conllu;
mod split;

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::binfmt::{BinReader, BinWriter};
use crate::error::{Error, Result};

pub use clean::clean_text;
pub use conllu::{parse_conllu, write_conllu};
pub use split::{split_corpus, CorpusSplit};

/// NER tag for tokens outside any named entity.
pub const NER_OUTSIDE: &str = "O";
pub const NER_PERSON: &str = "PERSON";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    /// 1-based position in the sentence.
    pub index: usize,
    pub surface: String,
    pub lemma: String,
    pub upos: String,
    /// Index of the syntactic head, 0 for the root.
    pub head: usize,
    pub deprel: String,
    pub ner: String,
}

impl Token {
    pub fn is_named_entity(&self) -> bool {
        self.ner != NER_OUTSIDE
    }

    pub fn is_person(&self) -> bool {
        self.ner == NER_PERSON
    }

    /// Universal relation without its subtype (`nsubj:pass` -> `nsubj`).
    pub fn base_deprel(&self) -> &str {
        self.deprel.split(':').next().unwrap_or("")
    }

    /// Lowercased lemma, falling back to the surface form when the lemma
    /// column was left empty (`_`).
    pub fn norm_lemma(&self) -> String {
        let lemma = if self.lemma.is_empty() || self.lemma == "_" {
            &self.surface
        } else {
            &self.lemma
        };
        lemma.to_lowercase()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedSentence {
    pub tokens: Vec<Token>,
    pub story_id: String,
    /// 0-based index within the story.
    pub position: usize,
    pub raw_text: String,
}

impl ParsedSentence {
    /// Token by 1-based index.
    pub fn token(&self, index: usize) -> &Token {
        &self.tokens[index - 1]
    }

    pub fn root(&self) -> Option<&Token> {
        self.tokens.iter().find(|t| t.head == 0)
    }

    /// Direct dependents of `head`, in surface order.
    pub fn children(&self, head: usize) -> impl Iterator<Item = &Token> {
        self.tokens.iter().filter(move |t| t.head == head)
    }

    /// Indices of all tokens dominated by `index` (inclusive), sorted.
    pub fn subtree(&self, index: usize) -> Vec<usize> {
        let mut out = vec![index];
        let mut i = 0;
        while i < out.len() {
            let h = out[i];
            out.extend(self.children(h).map(|t| t.index));
            i += 1;
        }
        out.sort_unstable();
        out
    }

    /// True if `ancestor` dominates `index` (reflexive).
    pub fn dominates(&self, ancestor: usize, mut index: usize) -> bool {
        for _ in 0..=self.tokens.len() {
            if index == ancestor {
                return true;
            }
            if index == 0 {
                return false;
            }
            index = self.token(index).head;
        }
        false
    }

    pub fn surfaces(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.surface.as_str()).collect()
    }

    /// Structural checks: 1-based contiguous indices, heads in range,
    /// a single root and no cycles.
    pub fn validate(&self) -> Result<()> {
        if self.tokens.is_empty() {
            return Err(Error::invalid("sentence has no tokens"));
        }
        let n = self.tokens.len();
        for (i, t) in self.tokens.iter().enumerate() {
            if t.index != i + 1 {
                return Err(Error::invalid(format!(
                    "token {} out of sequence (expected {})",
                    t.index,
                    i + 1
                )));
            }
            if t.head > n {
                return Err(Error::invalid(format!(
                    "token {} has head {} beyond sentence length {n}",
                    t.index, t.head
                )));
            }
        }
        let roots = self.tokens.iter().filter(|t| t.head == 0).count();
        if roots != 1 {
            return Err(Error::invalid(format!("expected one root, found {roots}")));
        }
        for t in &self.tokens {
            if !self.dominates(0, t.index) {
                return Err(Error::invalid(format!(
                    "token {} is not connected to the root",
                    t.index
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Story {
    pub id: String,
    pub sentences: Vec<ParsedSentence>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Corpus {
    pub stories: Vec<Story>,
}

impl Corpus {
    /// Builds a corpus, enforcing unique story ids and contiguous sentence
    /// positions.
    pub fn new(stories: Vec<Story>) -> Result<Self> {
        let mut seen = HashSet::new();
        for story in &stories {
            if !seen.insert(story.id.as_str()) {
                return Err(Error::invalid(format!("duplicate story id {}", story.id)));
            }
            for (k, s) in story.sentences.iter().enumerate() {
                if s.position != k || s.story_id != story.id {
                    return Err(Error::invalid(format!(
                        "story {}: sentence {k} carries position {} of story {}",
                        story.id, s.position, s.story_id
                    )));
                }
            }
        }
        Ok(Corpus { stories })
    }

    pub fn len(&self) -> usize {
        self.stories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stories.is_empty()
    }

    pub fn sentences(&self) -> impl Iterator<Item = &ParsedSentence> {
        self.stories.iter().flat_map(|s| s.sentences.iter())
    }

    pub fn sentence_count(&self) -> usize {
        self.stories.iter().map(|s| s.sentences.len()).sum()
    }

    pub fn write_bin<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BinWriter::new(out);
        w.header(CORPUS_MAGIC, CORPUS_VERSION)?;
        w.len(self.stories.len())?;
        for story in &self.stories {
            w.str(&story.id)?;
            w.len(story.sentences.len())?;
            for s in &story.sentences {
                w.str(&s.raw_text)?;
                w.len(s.tokens.len())?;
                for t in &s.tokens {
                    w.str(&t.surface)?;
                    w.str(&t.lemma)?;
                    w.str(&t.upos)?;
                    w.len(t.head)?;
                    w.str(&t.deprel)?;
                    w.str(&t.ner)?;
                }
            }
        }
        w.finish()?;
        Ok(())
    }

    pub fn read_bin<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.header(CORPUS_MAGIC, CORPUS_VERSION)?;
        let n_stories = r.len()?;
        let mut stories = Vec::with_capacity(n_stories);
        for _ in 0..n_stories {
            let id = r.str()?;
            let n_sent = r.len()?;
            let mut sentences = Vec::with_capacity(n_sent);
            for position in 0..n_sent {
                let raw_text = r.str()?;
                let n_tok = r.len()?;
                let mut tokens = Vec::with_capacity(n_tok);
                for i in 0..n_tok {
                    tokens.push(Token {
                        index: i + 1,
                        surface: r.str()?,
                        lemma: r.str()?,
                        upos: r.str()?,
                        head: r.len()?,
                        deprel: r.str()?,
                        ner: r.str()?,
                    });
                }
                let sentence = ParsedSentence {
                    tokens,
                    story_id: id.clone(),
                    position,
                    raw_text,
                };
                sentence
                    .validate()
                    .map_err(|e| Error::Format(format!("story {id}: {e}")))?;
                sentences.push(sentence);
            }
            stories.push(Story { id, sentences });
        }
        Corpus::new(stories)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_bin(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::load(path, e.to_string()))?;
        Corpus::read_bin(BufReader::new(file))
    }
}

const CORPUS_MAGIC: &[u8; 8] = b"EWCORPUS";
const CORPUS_VERSION: u32 = 1;

/// Joins tokens into display text: no space before closing punctuation or
/// clitics (`'s`, `n't`).
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    let mut out = String::new();
    for tok in tokens {
        let tok = tok.as_ref();
        let attach = matches!(tok, "." | "," | ";" | ":" | "!" | "?" | ")" | "%")
            || tok.starts_with('\'')
            || tok == "n't";
        if !out.is_empty() && !attach && !out.ends_with('(') {
            out.push(' ');
        }
        out.push_str(tok);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tok(index: usize, surface: &str, head: usize, deprel: &str) -> Token {
        Token {
            index,
            surface: surface.into(),
            lemma: surface.to_lowercase(),
            upos: "X".into(),
            head,
            deprel: deprel.into(),
            ner: NER_OUTSIDE.into(),
        }
    }

    fn sentence(tokens: Vec<Token>) -> ParsedSentence {
        ParsedSentence {
            tokens,
            story_id: "s".into(),
            position: 0,
            raw_text: String::new(),
        }
    }

    #[test]
    fn subtree_and_dominance() {
        let s = sentence(vec![
            tok(1, "The", 2, "det"),
            tok(2, "dog", 3, "nsubj"),
            tok(3, "sleeps", 0, "root"),
            tok(4, ".", 3, "punct"),
        ]);
        s.validate().unwrap();
        assert_eq!(s.subtree(2), vec![1, 2]);
        assert_eq!(s.subtree(3), vec![1, 2, 3, 4]);
        assert!(s.dominates(3, 1));
        assert!(!s.dominates(2, 4));
    }

    #[test]
    fn validate_rejects_cycles_and_double_roots() {
        let cyclic = sentence(vec![
            tok(1, "a", 2, "dep"),
            tok(2, "b", 1, "dep"),
            tok(3, "c", 0, "root"),
        ]);
        assert!(cyclic.validate().is_err());
        let two_roots = sentence(vec![tok(1, "a", 0, "root"), tok(2, "b", 0, "root")]);
        assert!(two_roots.validate().is_err());
    }

    #[test]
    fn corpus_rejects_duplicate_ids() {
        let story = Story {
            id: "x".into(),
            sentences: vec![],
        };
        assert!(Corpus::new(vec![story.clone(), story]).is_err());
    }

    #[test]
    fn detokenize_attaches_punctuation() {
        assert_eq!(
            detokenize(&["Mary", ",", "who", "ran", ",", "fell", "."]),
            "Mary, who ran, fell."
        );
        assert_eq!(detokenize(&["he", "'s", "here"]), "he's here");
        assert_eq!(detokenize::<&str>(&[]), "");
    }
}
