mod common;

use common::{golden, lexicons, original_models, sentence};
use eventweave::corpus::detokenize;
use eventweave::dataset::{build_e2e, build_e2s, E2ECondition, E2SCondition};
use eventweave::eventify::{eventify_sentence, parse_ne_tag, NeTable, RepresentationConfig, EMPTY};
use eventweave::pipeline::{run_pipeline, PipelineConfig, PipelineState};
use eventweave::seqmodel::ConditionalSequenceModel;
use eventweave::synth::{memorization_corpus, synth_corpus, SynthConfig};

#[test]
fn one_step_reproduces_the_successor() {
    let lex = lexicons();
    let corpus = memorization_corpus(1, 2);
    let (e2e, e2s) = original_models(&corpus, &lex);
    let story = &corpus.stories[0];
    let t = run_pipeline(&story.sentences[0], &e2e, &e2s, 1, &PipelineConfig::default(), &lex).unwrap();
    assert_eq!(t.steps.len(), 1);
    let gold = eventify_sentence(&story.sentences[1], &RepresentationConfig::ORIGINAL, &mut NeTable::new(), &lex, None);
    assert_eq!(t.steps[0].events, gold);
    assert_eq!(t.steps[0].sentence, story.sentences[1].raw_text);
}

#[test]
fn multi_step_run_follows_the_story() {
    let lex = lexicons();
    let corpus = memorization_corpus(3, 5);
    let (e2e, e2s) = original_models(&corpus, &lex);
    for story in &corpus.stories {
        let t = run_pipeline(&story.sentences[0], &e2e, &e2s, 4, &PipelineConfig::default(), &lex).unwrap();
        let got: Vec<&str> = t.steps.iter().map(|s| s.sentence.as_str()).collect();
        let want: Vec<&str> = story.sentences[1..].iter().map(|s| s.raw_text.as_str()).collect();
        assert_eq!(got, want);
        assert_eq!(t.to_jsonl().unwrap().lines().count(), 4);
    }
}

#[test]
fn zero_steps_and_eventless_seeds_are_rejected() {
    let lex = lexicons();
    let corpus = memorization_corpus(1, 2);
    let (e2e, e2s) = original_models(&corpus, &lex);
    let cfg = PipelineConfig::default();
    assert!(run_pipeline(&corpus.stories[0].sentences[0], &e2e, &e2s, 0, &cfg, &lex).is_err());
    let birds = sentence(&golden(), "birds").clone();
    assert!(run_pipeline(&birds, &e2e, &e2s, 1, &cfg, &lex).is_err());
}

#[test]
fn mission_seed_has_expected_shape() {
    let lex = lexicons();
    let corpus = synth_corpus(&SynthConfig {
        stories: 40,
        seed: 8,
        ..Default::default()
    });
    let (e2e, e2s) = original_models(&corpus, &lex);
    let seed = sentence(&golden(), "mission").clone();
    let t = run_pipeline(&seed, &e2e, &e2s, 3, &PipelineConfig::default(), &lex).unwrap();
    assert_eq!(t.seed_events[0].to_string(), format!("⟨he, think, ∅, ∅⟩"));
    assert!(!t.steps.is_empty());
    for step in &t.steps {
        assert!(step.events.iter().all(|e| e.tokens().len() == 4));
        assert!(!step.sentence.is_empty());
    }
}

#[test]
fn generalized_run_remembers_every_surfaced_name() {
    let lex = lexicons();
    let corpus = synth_corpus(&SynthConfig {
        stories: 40,
        seed: 2,
        ..Default::default()
    });
    let e2e = build_e2e(&corpus, E2ECondition::Generalized, &lex, None).unwrap();
    let e2s = build_e2s(&corpus, E2SCondition::GenEventGenSent, &lex);
    let e2e = ConditionalSequenceModel::train(&e2e.pairs, 3, 0.01).unwrap();
    let e2s = ConditionalSequenceModel::train(&e2s.pairs, 3, 0.01).unwrap();
    let config = PipelineConfig {
        representation: RepresentationConfig::GENERALIZED,
        ..Default::default()
    };
    let seed = &corpus.stories[0].sentences[0];
    let mut state = PipelineState::new(seed, &e2e, &e2s, &lex, config).unwrap();
    for _ in 0..5 {
        if !state.step().unwrap() {
            break;
        }
        let step = state.transcript.steps.last().unwrap();
        for tok in &step.raw_tokens {
            if let Some(n) = parse_ne_tag(tok) {
                assert!(state.memory.name(n).is_some(), "{tok} not remembered");
            }
        }
        assert!(step.events.iter().all(|e| e.slots().iter().all(|s| !s.is_empty())));
    }
    assert!(state.transcript.steps.iter().all(|s| !s.sentence.contains("<NE>")));
}

#[test]
fn reeventified_loop_uses_parsed_sentences() {
    let lex = lexicons();
    let corpus = memorization_corpus(2, 4);
    let (e2e, e2s) = original_models(&corpus, &lex);
    let lookup = |text: &str| {
        corpus
            .sentences()
            .find(|s| s.raw_text == text)
            .cloned()
            .ok_or_else(|| eventweave::Error::Invalid(format!("unparsed: {text}")))
    };
    let story = &corpus.stories[1];
    let mut state = PipelineState::new(&story.sentences[0], &e2e, &e2s, &lex, PipelineConfig::default())
        .unwrap()
        .reeventify(&lookup);
    for _ in 0..3 {
        assert!(state.step().unwrap());
    }
    let got: Vec<String> = state.transcript.steps.iter().map(|s| s.sentence.clone()).collect();
    let want: Vec<String> = story.sentences[1..].iter().map(|s| detokenize(&s.surfaces())).collect();
    assert_eq!(got, want);
    assert_ne!(state.events[0].o, EMPTY);
}
