mod common;

use common::{golden, lexicons, sentence, story};
use eventweave::eventify::{
    eventify_sentence, extract_events, generalize_event, person_mentions, Event, NeTable,
    RepresentationConfig, EMPTY,
};

fn original(id: &str) -> Vec<Event> {
    let corpus = golden();
    extract_events(sentence(&corpus, id))
        .into_iter()
        .map(|e| e.event)
        .collect()
}

#[test]
fn conjoined_subjects_give_one_event_each() {
    assert_eq!(
        original("store"),
        [
            Event::new("john", "go", "store", EMPTY),
            Event::new("mary", "go", "store", EMPTY)
        ]
    );
}

#[test]
fn complement_clause_does_not_fill_modifier() {
    assert_eq!(original("mission")[0], Event::new("he", "think", EMPTY, EMPTY));
}

#[test]
fn fully_generalized_uncle_event() {
    let corpus = golden();
    let s = sentence(&corpus, "uncle");
    let lex = lexicons();
    let events = eventify_sentence(s, &RepresentationConfig::GENERALIZED, &mut NeTable::new(), &lex, None);
    assert_eq!(
        events,
        [Event::new("relative.n.01", "characterize-29.2", "male.n.02", "feeling.n.01")]
    );
}

#[test]
fn person_becomes_numbered_tag() {
    let corpus = golden();
    let s = sentence(&corpus, "pox");
    let lex = lexicons();
    let extracted = extract_events(s);
    assert_eq!(extracted[0].event, Event::new("john", "unleash", "pox", EMPTY));
    let mut table = NeTable::new();
    let ne = generalize_event(&extracted[0], s, &RepresentationConfig::ORIGINAL_WITH_NE, &mut table, &lex);
    assert_eq!(ne, Event::new("<NE>0", "unleash", "pox", EMPTY));
    let gen = generalize_event(&extracted[0], s, &RepresentationConfig::GENERALIZED, &mut table, &lex);
    assert_eq!(
        gen,
        Event::new("<NE>0", "disassemble-23.3", "contagious_disease.n.01", EMPTY)
    );
}

#[test]
fn original_mode_is_identity() {
    let corpus = golden();
    let lex = lexicons();
    for s in corpus.sentences() {
        for e in extract_events(s) {
            let out = generalize_event(&e, s, &RepresentationConfig::ORIGINAL, &mut NeTable::new(), &lex);
            assert_eq!(out, e.event);
        }
    }
}

#[test]
fn generalization_is_idempotent() {
    let corpus = golden();
    let lex = lexicons();
    for s in corpus.sentences() {
        for mut e in extract_events(s) {
            let mut table = NeTable::new();
            let once = generalize_event(&e, s, &RepresentationConfig::GENERALIZED, &mut table, &lex);
            e.event = once.clone();
            let twice = generalize_event(&e, s, &RepresentationConfig::GENERALIZED, &mut table, &lex);
            assert_eq!(once, twice);
        }
    }
}

#[test]
fn verbs_map_back_to_verb_tokens() {
    let corpus = golden();
    for s in corpus.sentences() {
        for e in extract_events(s) {
            let v = s.token(e.anchors[1].unwrap());
            assert!(matches!(v.upos.as_str(), "VERB" | "AUX"), "{}", e.event);
            assert_eq!(v.norm_lemma(), e.event.v);
        }
    }
}

#[test]
fn verbless_sentence() {
    assert!(original("birds").is_empty());
}

#[test]
fn ne_numbering_scopes() {
    let corpus = golden();
    let lex = lexicons();
    let kendall = story(&corpus, "kendall");
    let (a, b) = (&kendall.sentences[0], &kendall.sentences[1]);

    let mut pair = NeTable::new();
    let cfg = RepresentationConfig::ORIGINAL_WITH_NE.continued();
    let ea = eventify_sentence(a, &cfg, &mut pair, &lex, None);
    let eb = eventify_sentence(b, &cfg, &mut pair, &lex, None);
    assert_eq!(ea[0].s, "<NE>0");
    assert_eq!(eb[0].s, "<NE>0");
    assert_eq!(pair.len(), 1);

    let cfg = RepresentationConfig::ORIGINAL_WITH_NE;
    let ea = eventify_sentence(a, &cfg, &mut NeTable::new(), &lex, None);
    let eb = eventify_sentence(b, &cfg, &mut NeTable::new(), &lex, None);
    assert_eq!((ea[0].s.as_str(), eb[0].s.as_str()), ("<NE>0", "<NE>0"));

    let meet = sentence(&corpus, "meet");
    assert_eq!(person_mentions(meet), ["Ann", "Bob"]);
    let e = eventify_sentence(meet, &cfg, &mut NeTable::new(), &lex, None);
    assert_eq!(e[0], Event::new("<NE>0", "meet", "<NE>1", EMPTY));
}

#[test]
fn lenny_sentence_events() {
    let got: Vec<String> = original("lenny").iter().map(|e| e.to_string()).collect();
    assert_eq!(
        got,
        [
            "⟨lenny, begin, ∅, walk⟩",
            "⟨sam, insult, he, ∅⟩",
            "⟨he, turn, ∅, ∅⟩",
            "⟨he, fire, ∅, ∅⟩",
            "⟨gun, explode, hand, ∅⟩",
        ]
    );
}
