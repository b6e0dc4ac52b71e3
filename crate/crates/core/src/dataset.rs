//! Training pairs for event-to-event and event-to-sentence models.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use itertools::Itertools;
use log::warn;
use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, ParsedSentence, Story};
use crate::error::{Error, Result};
use crate::eventify::{
    eventify_sentence, is_genre_token, person_mentions, Event, NeTable, RepresentationConfig,
    WordMode,
};
use crate::genre::GenreAssignment;
use crate::lexicon::Lexicons;
use crate::sentgen::generalize_sentence;
use crate::splitprune::split_and_prune;

/// Condition 10 skips sentence pairs with more events than this.
pub const MAX_PERMUTED_EVENTS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SequencePair {
    pub input: Vec<String>,
    pub output: Vec<String>,
    pub story: String,
    /// Sentence positions the pair was built from.
    pub sentences: Vec<usize>,
}

impl SequencePair {
    /// Drops `GENRE_g` tokens from both sides.
    pub fn strip_genre(&self) -> SequencePair {
        let keep = |v: &[String]| v.iter().filter(|t| !is_genre_token(t)).cloned().collect();
        SequencePair {
            input: keep(&self.input),
            output: keep(&self.output),
            ..self.clone()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum E2ECondition {
    OriginalSentences,
    OriginalWords,
    OriginalWithNe,
    Generalized,
    GeneralizedContNe,
    GeneralizedGenre,
    GeneralizedBigram,
    GeneralizedBigramContNe,
    GeneralizedBigramGenre,
    MultiSequential,
    MultiAnyOrder,
    MultiAllToAll,
}

impl E2ECondition {
    pub const ALL: [E2ECondition; 12] = [
        Self::OriginalSentences,
        Self::OriginalWords,
        Self::OriginalWithNe,
        Self::Generalized,
        Self::GeneralizedContNe,
        Self::GeneralizedGenre,
        Self::GeneralizedBigram,
        Self::GeneralizedBigramContNe,
        Self::GeneralizedBigramGenre,
        Self::MultiSequential,
        Self::MultiAnyOrder,
        Self::MultiAllToAll,
    ];

    pub fn id(self) -> u8 {
        self as u8
    }

    pub fn from_id(id: u8) -> Option<Self> {
        Self::ALL.get(id as usize).copied()
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::OriginalSentences => "Original Sentences",
            Self::OriginalWords => "Original Words",
            Self::OriginalWithNe => "Original Words with <NE>s",
            Self::Generalized => "Generalized",
            Self::GeneralizedContNe => "Generalized, Continued <NE>s",
            Self::GeneralizedGenre => "Generalized + Genre",
            Self::GeneralizedBigram => "Generalized Bigram",
            Self::GeneralizedBigramContNe => "Generalized Bigram, Continued <NE>s",
            Self::GeneralizedBigramGenre => "Generalized Bigram + Genre",
            Self::MultiSequential => "Generalized Multiple, Sequential",
            Self::MultiAnyOrder => "Generalized Multiple, Any Order",
            Self::MultiAllToAll => "Generalized Multiple, All to All",
        }
    }

    /// Event representation, `None` for raw sentences.
    pub fn config(self) -> Option<RepresentationConfig> {
        use RepresentationConfig as R;
        Some(match self {
            Self::OriginalSentences => return None,
            Self::OriginalWords => R::ORIGINAL,
            Self::OriginalWithNe => R::ORIGINAL_WITH_NE,
            Self::GeneralizedContNe | Self::GeneralizedBigramContNe => R::GENERALIZED.continued(),
            Self::GeneralizedGenre | Self::GeneralizedBigramGenre => R::GENERALIZED.with_genre(),
            _ => R::GENERALIZED,
        })
    }

    pub fn uses_genre(self) -> bool {
        matches!(self, Self::GeneralizedGenre | Self::GeneralizedBigramGenre)
    }

    pub fn is_bigram(self) -> bool {
        matches!(
            self,
            Self::GeneralizedBigram | Self::GeneralizedBigramContNe | Self::GeneralizedBigramGenre
        )
    }

    /// Whether every event of a sentence is used rather than the first.
    pub fn is_multi(self) -> bool {
        matches!(self, Self::MultiSequential | Self::MultiAnyOrder | Self::MultiAllToAll)
    }
}

impl fmt::Display for E2ECondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) {}", self.id(), self.label())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum E2SCondition {
    OrigEventOrigSent,
    GenEventGenSent,
    AllGenEventsGenSent,
    OrigEventSpSent,
    GenEventSpGenSent,
    AllGenEventsSpGenSent,
}

impl E2SCondition {
    pub const ALL: [E2SCondition; 6] = [
        Self::OrigEventOrigSent,
        Self::GenEventGenSent,
        Self::AllGenEventsGenSent,
        Self::OrigEventSpSent,
        Self::GenEventSpGenSent,
        Self::AllGenEventsSpGenSent,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Self::OrigEventOrigSent => "Original Words Event → Original Sentence",
            Self::GenEventGenSent => "Generalized Event → Generalized Sentence",
            Self::AllGenEventsGenSent => "All Generalized Events → Generalized Sentence",
            Self::OrigEventSpSent => "Original Words Event → S+P Sentence",
            Self::GenEventSpGenSent => "Generalized Event → Generalized S+P Sentence",
            Self::AllGenEventsSpGenSent => "All Generalized Events → Generalized S+P Sentence",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::OrigEventOrigSent => "orig-orig",
            Self::GenEventGenSent => "gen-gen",
            Self::AllGenEventsGenSent => "allgen-gen",
            Self::OrigEventSpSent => "orig-sp",
            Self::GenEventSpGenSent => "gen-spgen",
            Self::AllGenEventsSpGenSent => "allgen-spgen",
        }
    }

    fn generalized(self) -> bool {
        !matches!(self, Self::OrigEventOrigSent | Self::OrigEventSpSent)
    }

    fn all_events(self) -> bool {
        matches!(self, Self::AllGenEventsGenSent | Self::AllGenEventsSpGenSent)
    }

    fn split_prune(self) -> bool {
        matches!(
            self,
            Self::OrigEventSpSent | Self::GenEventSpGenSent | Self::AllGenEventsSpGenSent
        )
    }
}

impl FromStr for E2SCondition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::invalid(format!("unknown event-to-sentence condition {s:?}")))
    }
}

impl fmt::Display for E2SCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub kind: String,
    pub condition: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub pairs: usize,
    pub stories: usize,
    /// Sentence pairs dropped by the condition-10 permutation guard.
    pub skipped: usize,
    pub strip_genre: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    pub pairs: Vec<SequencePair>,
    pub manifest: Manifest,
}

fn concat(events: &[Event]) -> Vec<String> {
    events.iter().flat_map(|e| e.tokens()).collect()
}

/// Events of one sentence under `config`, each sentence with a fresh
/// NE table.
fn sentence_events(
    s: &ParsedSentence,
    config: &RepresentationConfig,
    lex: &Lexicons,
    genre: Option<u32>,
) -> Vec<Event> {
    eventify_sentence(s, config, &mut NeTable::new(), lex, genre)
}

/// Events of several sentences sharing one NE table, numbered in the
/// order the sentences are given.
fn shared_table_events(
    sentences: &[&ParsedSentence],
    config: &RepresentationConfig,
    lex: &Lexicons,
    genre: Option<u32>,
) -> Vec<Vec<Event>> {
    let mut table = NeTable::new();
    for s in sentences {
        table.extend(&person_mentions(s));
    }
    sentences
        .iter()
        .map(|s| eventify_sentence(s, config, &mut table, lex, genre))
        .collect()
}

fn story_genre(condition: E2ECondition, story: &Story, genres: Option<&GenreAssignment>) -> Result<Option<u32>> {
    if !condition.uses_genre() {
        return Ok(None);
    }
    let genres = genres.ok_or_else(|| Error::invalid(format!("condition {condition} needs a genre model")))?;
    genres
        .get(&story.id)
        .copied()
        .map(Some)
        .ok_or_else(|| Error::invalid(format!("no genre assigned to story {}", story.id)))
}

/// Builds event-to-event pairs. Conditions 0–8 use the first event of each
/// sentence, skipping sentences without events; 9–11 use all events.
/// A genre assignment must be given exactly for conditions 5 and 8.
pub fn build_e2e(
    corpus: &Corpus,
    condition: E2ECondition,
    lex: &Lexicons,
    genres: Option<&GenreAssignment>,
) -> Result<Dataset> {
    if genres.is_some() && !condition.uses_genre() {
        return Err(Error::invalid(format!(
            "condition {condition} does not take a genre model"
        )));
    }
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for story in &corpus.stories {
        let genre = story_genre(condition, story, genres)?;
        skipped += story_e2e(story, condition, lex, genre, &mut pairs);
    }
    Ok(Dataset {
        manifest: Manifest {
            kind: "event2event".into(),
            condition: condition.to_string(),
            seed: None,
            pairs: pairs.len(),
            stories: corpus.len(),
            skipped,
            strip_genre: condition.uses_genre(),
        },
        pairs,
    })
}

fn story_e2e(
    story: &Story,
    condition: E2ECondition,
    lex: &Lexicons,
    genre: Option<u32>,
    pairs: &mut Vec<SequencePair>,
) -> usize {
    let id = &story.id;
    let pair = |input: Vec<String>, output: Vec<String>, sentences: Vec<usize>| SequencePair {
        input,
        output,
        story: id.clone(),
        sentences,
    };

    let Some(config) = condition.config() else {
        for w in story.sentences.windows(2) {
            pairs.push(pair(
                w[0].surfaces().iter().map(|s| s.to_string()).collect(),
                w[1].surfaces().iter().map(|s| s.to_string()).collect(),
                vec![w[0].position, w[1].position],
            ));
        }
        return 0;
    };

    let per_sentence: Vec<(usize, Vec<Event>)> = story
        .sentences
        .iter()
        .map(|s| (s.position, sentence_events(s, &config, lex, genre)))
        .filter(|(_, e)| !e.is_empty())
        .collect();
    let eventful: Vec<&ParsedSentence> = story
        .sentences
        .iter()
        .filter(|s| per_sentence.iter().any(|(p, _)| *p == s.position))
        .collect();
    let continued = config.ne_numbering == crate::eventify::NeScope::Continued;

    let mut skipped = 0;
    match condition {
        E2ECondition::MultiSequential => {
            let flat: Vec<(usize, &Event)> = per_sentence
                .iter()
                .flat_map(|(p, es)| es.iter().map(move |e| (*p, e)))
                .collect();
            for w in flat.windows(2) {
                pairs.push(pair(w[0].1.tokens(), w[1].1.tokens(), vec![w[0].0, w[1].0]));
            }
        }
        E2ECondition::MultiAnyOrder => {
            for w in per_sentence.windows(2) {
                let (a, b) = (&w[0].1, &w[1].1);
                if a.len() > MAX_PERMUTED_EVENTS || b.len() > MAX_PERMUTED_EVENTS {
                    warn!(
                        "story {id}: sentences {} and {} have {} and {} events; skipping permutations",
                        w[0].0,
                        w[1].0,
                        a.len(),
                        b.len()
                    );
                    skipped += 1;
                    continue;
                }
                for pa in a.iter().permutations(a.len()) {
                    for pb in b.iter().permutations(b.len()) {
                        let input = pa.iter().flat_map(|e| e.tokens()).collect();
                        let output = pb.iter().flat_map(|e| e.tokens()).collect();
                        pairs.push(pair(input, output, vec![w[0].0, w[1].0]));
                    }
                }
            }
        }
        E2ECondition::MultiAllToAll => {
            for w in per_sentence.windows(2) {
                pairs.push(pair(concat(&w[0].1), concat(&w[1].1), vec![w[0].0, w[1].0]));
            }
        }
        _ if condition.is_bigram() => {
            for k in 0..eventful.len().saturating_sub(3) {
                let window = &eventful[k..k + 4];
                let events: Vec<Event> = if continued {
                    shared_table_events(window, &config, lex, genre)
                        .into_iter()
                        .map(|es| es[0].clone())
                        .collect()
                } else {
                    per_sentence[k..k + 4].iter().map(|(_, es)| es[0].clone()).collect()
                };
                pairs.push(pair(
                    concat(&events[..2]),
                    concat(&events[2..]),
                    window.iter().map(|s| s.position).collect(),
                ));
            }
        }
        _ => {
            for k in 0..eventful.len().saturating_sub(1) {
                let window = &eventful[k..k + 2];
                let events: Vec<Event> = if continued {
                    shared_table_events(window, &config, lex, genre)
                        .into_iter()
                        .map(|es| es[0].clone())
                        .collect()
                } else {
                    per_sentence[k..k + 2].iter().map(|(_, es)| es[0].clone()).collect()
                };
                pairs.push(pair(
                    events[0].tokens(),
                    events[1].tokens(),
                    window.iter().map(|s| s.position).collect(),
                ));
            }
        }
    }
    skipped
}

/// Builds event-to-sentence pairs: each sentence (or split-and-pruned
/// fragment) paired with its first event or all its events. Generalized
/// targets share the events' NE numbering. Units without events are
/// skipped.
pub fn build_e2s(corpus: &Corpus, condition: E2SCondition, lex: &Lexicons) -> Dataset {
    let config = if condition.generalized() {
        RepresentationConfig::GENERALIZED
    } else {
        RepresentationConfig::ORIGINAL
    };
    let mut pairs = Vec::new();
    for story in &corpus.stories {
        for sentence in &story.sentences {
            let units: Vec<ParsedSentence> = if condition.split_prune() {
                split_and_prune(sentence).into_iter().map(|f| f.parse).collect()
            } else {
                vec![sentence.clone()]
            };
            for unit in &units {
                let mut table = NeTable::new();
                let events = eventify_sentence(unit, &config, &mut table, lex, None);
                if events.is_empty() {
                    continue;
                }
                let input = if condition.all_events() {
                    concat(&events)
                } else {
                    events[0].tokens()
                };
                let output = if config.word_mode == WordMode::Generalized {
                    generalize_sentence(unit, lex, &mut table).tokens
                } else {
                    unit.surfaces().iter().map(|s| s.to_string()).collect()
                };
                pairs.push(SequencePair {
                    input,
                    output,
                    story: story.id.clone(),
                    sentences: vec![sentence.position],
                });
            }
        }
    }
    Dataset {
        manifest: Manifest {
            kind: "event2sentence".into(),
            condition: condition.name().into(),
            seed: None,
            pairs: pairs.len(),
            stories: corpus.len(),
            skipped: 0,
            strip_genre: false,
        },
        pairs,
    }
}

/// Tokens joined by single spaces; embedded whitespace becomes `_`.
fn join(tokens: &[String]) -> String {
    tokens
        .iter()
        .map(|t| t.split_whitespace().collect::<Vec<_>>().join("_"))
        .join(" ")
}

pub fn write_tsv<W: Write>(pairs: &[SequencePair], mut out: W) -> Result<()> {
    for p in pairs {
        writeln!(out, "{}\t{}", join(&p.input), join(&p.output))?;
    }
    Ok(())
}

/// Reads a two-column pair file. Provenance is not stored in the file, so
/// `story` is empty and `sentences` holds the line number.
pub fn read_tsv(text: &str) -> Result<Vec<SequencePair>> {
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (input, output) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(i + 1, "expected input<TAB>output"))?;
        let split = |s: &str| s.split_whitespace().map(str::to_string).collect::<Vec<_>>();
        let (input, output) = (split(input), split(output));
        if input.is_empty() || output.is_empty() {
            return Err(Error::parse(i + 1, "empty input or output"));
        }
        pairs.push(SequencePair {
            input,
            output,
            story: String::new(),
            sentences: vec![i + 1],
        });
    }
    Ok(pairs)
}

impl Dataset {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.manifest.seed = Some(seed);
        self
    }

    /// Writes `<stem>.tsv` and `<stem>.json` into `dir`.
    pub fn save(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        let mut tsv = Vec::new();
        write_tsv(&self.pairs, &mut tsv)?;
        fs::write(dir.join(format!("{stem}.tsv")), tsv)?;
        fs::write(
            dir.join(format!("{stem}.json")),
            serde_json::to_string_pretty(&self.manifest)?,
        )?;
        Ok(())
    }
}
