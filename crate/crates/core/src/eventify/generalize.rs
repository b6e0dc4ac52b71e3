use crate::corpus::{ParsedSentence, Token};
use crate::lexicon::{is_class_id, Lexicons, SynsetId};

use super::{ne_tag, person_name, Event, ExtractedEvent, NeTable, RepresentationConfig, WordMode,
    EMPTY, NE_PREFIX};

/// Fixed synsets for third-person pronouns. First and second person are
/// not generalized.
pub fn pronoun_synset(lemma: &str) -> Option<&'static str> {
    match lemma {
        "he" | "him" | "his" | "himself" => Some("male.n.02"),
        "she" | "her" | "hers" | "herself" => Some("female.n.02"),
        "it" | "its" | "itself" => Some("thing.n.08"),
        "they" | "them" | "their" | "themselves" => Some("group.n.01"),
        _ => None,
    }
}

/// True for values that generalization produces and must leave alone:
/// synset renderings, VerbNet class ids, `<NE>` tags and NER categories.
pub fn is_generalized(value: &str) -> bool {
    SynsetId::is_rendering(value)
        || is_class_id(value)
        || value.starts_with(NE_PREFIX)
        || (value.len() > 1 && value.bytes().all(|b| b.is_ascii_uppercase() || b == b'_'))
}

fn generalize_token(t: &Token, lex: &Lexicons, verb_slot: bool) -> Option<String> {
    if t.is_named_entity() {
        return Some(t.ner.clone());
    }
    let lemma = t.norm_lemma();
    if t.upos == "PRON" {
        return pronoun_synset(&lemma).map(str::to_string);
    }
    if verb_slot || matches!(t.upos.as_str(), "VERB" | "AUX") {
        return lex.verb_class(&lemma).map(str::to_string);
    }
    if matches!(t.upos.as_str(), "NOUN" | "PROPN") {
        return lex.hypernym_ancestor(&lemma, 2).map(|s| s.to_string());
    }
    None
}

/// Applies the configured word mode to an extracted event.
///
/// PERSON fillers become `<NE>n` (registering unseen names in `ne_table`).
/// In generalized mode other named entities become their NER category,
/// pronouns map through [`pronoun_synset`], nouns climb two hypernym links
/// and verbs become their VerbNet class. Lexicon misses keep the word.
pub fn generalize_event(
    extracted: &ExtractedEvent,
    sentence: &ParsedSentence,
    config: &RepresentationConfig,
    ne_table: &mut NeTable,
    lex: &Lexicons,
) -> Event {
    let mut event = extracted.event.clone();
    if config.word_mode == WordMode::Original {
        return event;
    }
    for (slot, anchor) in extracted.anchors.iter().enumerate() {
        let value = event.slot_mut(slot);
        let Some(anchor) = *anchor else { continue };
        if value == EMPTY || is_generalized(value) {
            continue;
        }
        let t = sentence.token(anchor);
        let replacement = if t.is_person() {
            Some(ne_tag(ne_table.assign(&person_name(sentence, anchor))))
        } else if config.word_mode == WordMode::Generalized {
            generalize_token(t, lex, slot == 1)
        } else {
            None
        };
        if let Some(r) = replacement {
            *value = r;
        }
    }
    event
}
