use crate::corpus::{ParsedSentence, Token};

use super::{ne_span, Event, EMPTY};

/// An event in original-word form together with the token each slot was
/// read from (`None` for [`EMPTY`] slots).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtractedEvent {
    pub event: Event,
    pub anchors: [Option<usize>; 4],
}

/// Relations along which further event heads are found.
const CLAUSAL: [&str; 4] = ["conj", "ccomp", "advcl", "parataxis"];

/// Relations with a fixed role; dependents under any other relation count
/// as unclassified modifiers.
const CLASSIFIED: [&str; 28] = [
    "nsubj", "csubj", "obj", "iobj", "obl", "ccomp", "xcomp", "conj", "advcl", "parataxis",
    "cc", "punct", "det", "case", "mark", "aux", "cop", "advmod", "amod", "compound", "flat",
    "fixed", "acl", "appos", "nummod", "nmod", "expl", "discourse",
];

/// The verb token of a predicate: the token itself when verbal, its copula
/// when nominal or adjectival.
fn verb_of(sentence: &ParsedSentence, t: &Token) -> Option<usize> {
    if t.upos == "VERB" {
        return Some(t.index);
    }
    sentence
        .children(t.index)
        .find(|c| c.base_deprel() == "cop")
        .map(|c| c.index)
}

/// Predicates reachable from the root through clausal relations, as
/// (predicate, verb) index pairs ordered by verb position.
fn event_heads(sentence: &ParsedSentence) -> Vec<(usize, usize)> {
    let Some(root) = sentence.root() else {
        return Vec::new();
    };
    let mut heads = Vec::new();
    let mut stack = vec![root.index];
    while let Some(i) = stack.pop() {
        let t = sentence.token(i);
        if let Some(v) = verb_of(sentence, t) {
            heads.push((i, v));
        }
        stack.extend(
            sentence
                .children(i)
                .filter(|c| CLAUSAL.contains(&c.base_deprel()))
                .map(|c| c.index),
        );
    }
    heads.sort_by_key(|&(_, v)| v);
    heads
}

/// Subject tokens of a predicate: its nsubj plus that subject's conjuncts,
/// or those of the clause it is conjoined to.
fn subjects(sentence: &ParsedSentence, head: usize) -> Vec<usize> {
    let mut h = head;
    for _ in 0..sentence.tokens.len() {
        if let Some(subj) = sentence.children(h).find(|c| c.base_deprel() == "nsubj") {
            let mut out = vec![subj.index];
            out.extend(
                sentence
                    .children(subj.index)
                    .filter(|c| c.base_deprel() == "conj")
                    .map(|c| c.index),
            );
            return out;
        }
        let t = sentence.token(h);
        if t.base_deprel() != "conj" || t.head == 0 {
            break;
        }
        h = t.head;
    }
    Vec::new()
}

/// A prepositional dependent: an `obl` nominal carrying a case marker.
fn is_prepositional(sentence: &ParsedSentence, t: &Token) -> bool {
    t.deprel == "obl" && sentence.children(t.index).any(|c| c.base_deprel() == "case")
}

/// Original-word filler: the lowercased lemma, or the underscore-joined
/// lemmas of a multiword named entity.
pub(crate) fn filler(sentence: &ParsedSentence, index: usize) -> String {
    let t = sentence.token(index);
    if !t.is_named_entity() {
        return t.norm_lemma();
    }
    let (lo, hi) = ne_span(sentence, index);
    (lo..=hi)
        .map(|i| sentence.token(i).norm_lemma())
        .collect::<Vec<_>>()
        .join("_")
}

/// Extracts one event per verbal or copular clause, and one per conjoined
/// subject. Clauses without a recoverable subject are skipped.
pub fn extract_events(sentence: &ParsedSentence) -> Vec<ExtractedEvent> {
    let heads = event_heads(sentence);
    let is_head = |i: usize| heads.iter().any(|&(h, _)| h == i);
    let mut events = Vec::new();

    for &(head, verb) in &heads {
        let subjects = subjects(sentence, head);
        if subjects.is_empty() {
            continue;
        }
        let kids: Vec<&Token> = sentence.children(head).collect();

        let object = if head != verb {
            Some(head)
        } else {
            kids.iter()
                .find(|c| c.base_deprel() == "obj")
                .or_else(|| kids.iter().find(|c| is_prepositional(sentence, c)))
                .map(|c| c.index)
        };
        let modifier = kids
            .iter()
            .find(|c| is_prepositional(sentence, c) && Some(c.index) != object)
            .or_else(|| kids.iter().find(|c| c.base_deprel() == "iobj"))
            .or_else(|| {
                kids.iter().find(|c| {
                    matches!(c.base_deprel(), "xcomp" | "ccomp") && !is_head(c.index)
                })
            })
            .or_else(|| {
                kids.iter().find(|c| {
                    matches!(c.upos.as_str(), "NOUN" | "PROPN")
                        && !CLASSIFIED.contains(&c.base_deprel())
                })
            })
            .map(|c| c.index);

        let value = |slot: Option<usize>| slot.map_or(EMPTY.to_string(), |i| filler(sentence, i));
        let v = sentence.token(verb).norm_lemma();
        for s in subjects {
            events.push(ExtractedEvent {
                event: Event {
                    s: filler(sentence, s),
                    v: v.clone(),
                    o: value(object),
                    m: value(modifier),
                    genre: None,
                },
                anchors: [Some(s), Some(verb), object, modifier],
            });
        }
    }
    events
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::parse_conllu;

    fn parse(rows: &[(&str, &str, &str, usize, &str)]) -> ParsedSentence {
        let text: String = rows
            .iter()
            .enumerate()
            .map(|(i, (form, lemma, upos, head, rel))| {
                format!("{}\t{form}\t{lemma}\t{upos}\t_\t_\t{head}\t{rel}\t_\t_\n", i + 1)
            })
            .collect();
        parse_conllu(&text).unwrap().stories[0].sentences[0].clone()
    }

    fn events(s: &ParsedSentence) -> Vec<String> {
        extract_events(s).iter().map(|e| e.event.to_string()).collect()
    }

    #[test]
    fn verbless_sentence_has_no_events() {
        let s = parse(&[("Birds", "bird", "NOUN", 0, "root"), (".", ".", "PUNCT", 1, "punct")]);
        assert!(extract_events(&s).is_empty());
    }

    #[test]
    fn iobj_fills_modifier_when_no_prepositional_phrase() {
        let s = parse(&[
            ("Ann", "Ann", "PROPN", 2, "nsubj"),
            ("gives", "give", "VERB", 0, "root"),
            ("Bob", "Bob", "PROPN", 2, "iobj"),
            ("cake", "cake", "NOUN", 2, "obj"),
        ]);
        assert_eq!(events(&s), ["⟨ann, give, cake, bob⟩"]);
    }

    #[test]
    fn conjoined_verb_inherits_subject() {
        let s = parse(&[
            ("He", "he", "PRON", 2, "nsubj"),
            ("turns", "turn", "VERB", 0, "root"),
            ("and", "and", "CCONJ", 4, "cc"),
            ("fires", "fire", "VERB", 2, "conj"),
        ]);
        assert_eq!(events(&s), ["⟨he, turn, ∅, ∅⟩", "⟨he, fire, ∅, ∅⟩"]);
    }

    #[test]
    fn subjectless_clause_is_dropped() {
        let s = parse(&[("Run", "run", "VERB", 0, "root"), ("!", "!", "PUNCT", 1, "punct")]);
        assert!(extract_events(&s).is_empty());
    }

    #[test]
    fn copular_clause_uses_be() {
        let s = parse(&[
            ("She", "she", "PRON", 3, "nsubj"),
            ("is", "be", "AUX", 3, "cop"),
            ("happy", "happy", "ADJ", 0, "root"),
        ]);
        let e = &extract_events(&s)[0];
        assert_eq!(e.event.to_string(), "⟨she, be, happy, ∅⟩");
        assert_eq!(e.anchors[1], Some(2));
    }
}
