//! Story generation loop: seed sentence → events → successor events →
//! sentence → filled sentence, with the successor events fed back in.

use serde::{Deserialize, Serialize};

use crate::corpus::{detokenize, ParsedSentence};
use crate::error::{Error, Result};
use crate::eventify::{eventify_sentence, Event, NeTable, RepresentationConfig};
use crate::lexicon::Lexicons;
use crate::sentgen::{fill_placeholders, generalize_sentence, WorkingMemory};
use crate::seqmodel::{ConditionalSequenceModel, DEFAULT_BEAM, MAX_EVENT_LEN, MAX_SENTENCE_LEN};

/// Splits decoded tokens into events of `slots_per_event` (4 or 5) tokens.
/// A trailing partial group is padded with the empty parameter.
pub fn parse_event_tokens<S: AsRef<str>>(tokens: &[S], slots_per_event: usize) -> Vec<Event> {
    assert!(
        matches!(slots_per_event, 4 | 5),
        "events have 4 or 5 slots, got {slots_per_event}"
    );
    tokens
        .chunks(slots_per_event)
        .map(|chunk| {
            let mut e = Event::from_tokens(&chunk[..chunk.len().min(4)]);
            if let Some(g) = chunk.get(4).and_then(|g| Event::from_tokens(&[g]).genre) {
                e.genre = Some(g);
            }
            e
        })
        .collect()
}

/// Which decoded events feed the next step.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feed {
    /// Only the first event (single-event event2event models).
    #[default]
    First,
    /// All events concatenated (models trained on whole stories).
    All,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub representation: RepresentationConfig,
    pub genre: Option<u32>,
    pub feed: Feed,
    /// Beam width for event2event; 1 is greedy decoding.
    pub event_beam: usize,
    pub sentence_beam: usize,
    /// Shortest decodes allowed; training outputs are never empty.
    pub event_min_len: usize,
    pub sentence_min_len: usize,
    pub event_max_len: usize,
    pub sentence_max_len: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            representation: RepresentationConfig::ORIGINAL,
            genre: None,
            feed: Feed::First,
            event_beam: 1,
            sentence_beam: DEFAULT_BEAM,
            event_min_len: 1,
            sentence_min_len: 1,
            event_max_len: MAX_EVENT_LEN,
            sentence_max_len: MAX_SENTENCE_LEN,
        }
    }
}

/// One line of a transcript.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub step: usize,
    pub events: Vec<Event>,
    /// event2sentence output before placeholders were filled.
    pub raw_tokens: Vec<String>,
    pub sentence: String,
    /// Set when several events were decoded but only the first was surfaced.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub first_event_only: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub seed_events: Vec<Event>,
    pub steps: Vec<Step>,
    /// Why generation stopped early, if it did.
    pub aborted: Option<String>,
}

impl Transcript {
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&serde_json::to_string(s)?);
            out.push('\n');
        }
        Ok(out)
    }
}

/// Parses a surfaced sentence; see [`PipelineState::reeventify`].
pub type Parser<'a> = dyn Fn(&str) -> Result<ParsedSentence> + 'a;

pub struct PipelineState<'a> {
    pub events: Vec<Event>,
    pub memory: WorkingMemory,
    pub transcript: Transcript,
    e2e: &'a ConditionalSequenceModel,
    e2s: &'a ConditionalSequenceModel,
    lex: &'a Lexicons,
    config: PipelineConfig,
    reparse: Option<&'a Parser<'a>>,
}

impl<'a> PipelineState<'a> {
    /// Eventifies the seed and stores its names and nouns in working memory.
    pub fn new(
        seed: &ParsedSentence,
        e2e: &'a ConditionalSequenceModel,
        e2s: &'a ConditionalSequenceModel,
        lex: &'a Lexicons,
        config: PipelineConfig,
    ) -> Result<Self> {
        let mut state = PipelineState {
            events: Vec::new(),
            memory: WorkingMemory::new(),
            transcript: Transcript::default(),
            e2e,
            e2s,
            lex,
            config,
            reparse: None,
        };
        state.events = state.absorb(seed)?;
        state.transcript.seed_events = state.events.clone();
        Ok(state)
    }

    /// Re-eventifies each surfaced sentence through `parser` and feeds
    /// those events forward instead of the decoded ones.
    pub fn reeventify(mut self, parser: &'a Parser<'a>) -> Self {
        self.reparse = Some(parser);
        self
    }

    fn absorb(&mut self, sentence: &ParsedSentence) -> Result<Vec<Event>> {
        let mut table = NeTable::new();
        let rep = &self.config.representation;
        let events = eventify_sentence(sentence, rep, &mut table, self.lex, self.config.genre);
        if events.is_empty() {
            return Err(Error::invalid(format!(
                "no events in sentence {:?}",
                sentence.raw_text
            )));
        }
        self.memory
            .absorb(&generalize_sentence(sentence, self.lex, &mut table));
        Ok(events)
    }

    fn slots(&self) -> usize {
        if self.config.representation.include_genre {
            5
        } else {
            4
        }
    }

    /// Runs one step. Returns false (and records why) when the event
    /// model produced nothing usable.
    pub fn step(&mut self) -> Result<bool> {
        let input: Vec<String> = match self.config.feed {
            Feed::First => self.events[0].tokens(),
            Feed::All => self.events.iter().flat_map(Event::tokens).collect(),
        };
        let c = &self.config;
        let decoded = self
            .e2e
            .beam_decode_bounded(&input, c.event_beam, c.event_min_len, c.event_max_len);
        let events = parse_event_tokens(&decoded, self.slots());
        if events.is_empty() {
            let why = format!("step {}: event model produced no event", self.transcript.steps.len() + 1);
            log::warn!("{why}");
            self.transcript.aborted = Some(why);
            return Ok(false);
        }
        let c = &self.config;
        let raw_tokens = self.e2s.beam_decode_bounded(
            &events[0].tokens(),
            c.sentence_beam,
            c.sentence_min_len,
            c.sentence_max_len,
        );
        let filled = fill_placeholders(&raw_tokens, &mut self.memory);
        let sentence = detokenize(&filled);
        self.transcript.steps.push(Step {
            step: self.transcript.steps.len() + 1,
            first_event_only: events.len() > 1,
            events: events.clone(),
            raw_tokens,
            sentence: sentence.clone(),
        });
        self.events = match self.reparse {
            Some(parse) => self.absorb(&parse(&sentence)?)?,
            None => events,
        };
        Ok(true)
    }
}

/// Generates `steps` sentences after `seed`.
pub fn run_pipeline(
    seed: &ParsedSentence,
    e2e: &ConditionalSequenceModel,
    e2s: &ConditionalSequenceModel,
    steps: usize,
    config: &PipelineConfig,
    lex: &Lexicons,
) -> Result<Transcript> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    let mut state = PipelineState::new(seed, e2e, e2s, lex, config.clone())?;
    for _ in 0..steps {
        if !state.step()? {
            break;
        }
    }
    Ok(state.transcript)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eventify::EMPTY;

    #[test]
    fn chunks_and_padding() {
        let e = parse_event_tokens(&["a", "b", "c", "d", "e", "f", "g", "h"], 4);
        assert_eq!(e, [Event::new("a", "b", "c", "d"), Event::new("e", "f", "g", "h")]);
        assert_eq!(parse_event_tokens(&["a", "b", "c"], 4), [Event::new("a", "b", "c", EMPTY)]);
        assert!(parse_event_tokens(&[] as &[&str], 4).is_empty());
    }

    #[test]
    fn five_slot_events_carry_genre() {
        let e = parse_event_tokens(&["a", "b", "c", "d", "GENRE_3", "e", "f"], 5);
        assert_eq!(e[0], Event::new("a", "b", "c", "d").with_genre(Some(3)));
        assert_eq!(e[1], Event::new("e", "f", EMPTY, EMPTY));
    }
}
