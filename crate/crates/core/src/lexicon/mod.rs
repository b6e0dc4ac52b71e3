//! Lexical resources used for generalization: WordNet for nouns, VerbNet
//! for verbs.

mod verbnet;
mod wordnet;

use std::path::Path;

use crate::error::Result;

pub use verbnet::{is_class_id, VerbNetIndex};
pub use wordnet::{Pos, SynsetId, WordNetIndex};

/// Both lexicons, loaded once and shared read-only.
#[derive(Clone, Debug, Default)]
pub struct Lexicons {
    pub wordnet: WordNetIndex,
    pub verbnet: VerbNetIndex,
}

impl Lexicons {
    pub fn load(wordnet_dir: impl AsRef<Path>, verbnet_path: impl AsRef<Path>) -> Result<Self> {
        Ok(Lexicons {
            wordnet: WordNetIndex::load(wordnet_dir)?,
            verbnet: VerbNetIndex::load(verbnet_path)?,
        })
    }

    /// Noun generalization: the ancestor `levels` hypernym links above the
    /// first sense of `lemma`.
    pub fn hypernym_ancestor(&self, lemma: &str, levels: usize) -> Option<SynsetId> {
        self.wordnet.hypernym_ancestor(lemma, Pos::Noun, levels)
    }

    /// Verb generalization. Inflected forms are reduced with WordNet's
    /// verb morphology when the form itself is not a class member.
    pub fn verb_class(&self, lemma: &str) -> Option<&str> {
        if let Some(c) = self.verbnet.verb_class(lemma) {
            return Some(c);
        }
        self.wordnet
            .morphy(lemma, Pos::Verb)
            .iter()
            .find_map(|base| self.verbnet.verb_class(base))
    }
}
