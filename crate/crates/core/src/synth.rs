//! Synthetic dependency-parsed stories for tests, benchmarks and demos.
//!
//! Sentences are built from templates over a small vocabulary of names,
//! person nouns, object nouns and verbs, with conjoined subjects,
//! coordinated clauses, prepositional phrases and location entities.
//! Parses follow Universal Dependencies conventions.

use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{detokenize, Corpus, ParsedSentence, Story, Token, NER_OUTSIDE, NER_PERSON};

pub const NAMES: &[&str] = &[
    "Anna", "Ben", "Clara", "David", "Elena", "Frank", "Grace", "Henry", "Iris", "Jack", "Kendall",
    "Leo", "Maya", "Nora", "Oscar", "Paul", "Quinn", "Rosa", "Sam", "Tara", "Uma", "Victor",
    "Wendy", "Xavier", "Yara", "Zoe", "Adam", "Bella", "Carl", "Dora", "Ethan", "Fiona", "Gus",
    "Hana", "Ivan", "Julia", "Karl", "Lena", "Milo", "Nina",
];

pub const SURNAMES: &[&str] = &["Berg", "Cole", "Diaz", "Frost", "Hale", "Kim", "Lund", "Moss"];

pub const LOCATIONS: &[&str] = &["Paris", "London", "Rome", "Texas", "Chicago", "Cairo", "Oslo"];

pub const PERSON_NOUNS: &[&str] = &[
    "uncle", "aunt", "father", "mother", "brother", "sister", "son", "daughter", "king", "queen",
    "soldier", "doctor", "teacher", "thief", "detective", "farmer", "priest", "woman", "man",
    "girl", "boy", "child", "stranger", "friend", "enemy",
];

pub const OBJECT_NOUNS: &[&str] = &[
    "car", "truck", "bus", "bicycle", "dog", "cat", "wolf", "lion", "horse", "cow", "sword",
    "knife", "gun", "rifle", "pistol", "house", "palace", "tower", "church", "ship", "boat",
    "letter", "book", "map", "money", "gold", "ring", "necklace", "key", "door", "window",
    "table", "chair", "bed", "treasure", "weapon", "bomb", "phone", "camera", "film",
    "photograph", "song", "poem", "coin", "mirror", "lamp",
];

pub const PLACE_NOUNS: &[&str] = &[
    "city", "village", "forest", "river", "mountain", "island", "bridge", "road", "prison",
    "hospital", "school", "bank", "store", "market", "yard",
];

/// (lemma, past tense, takes an object)
pub const VERBS: &[(&str, &str, bool)] = &[
    ("go", "went", false),
    ("come", "came", false),
    ("arrive", "arrived", false),
    ("leave", "left", true),
    ("return", "returned", false),
    ("escape", "escaped", false),
    ("flee", "fled", false),
    ("enter", "entered", true),
    ("run", "ran", false),
    ("walk", "walked", false),
    ("wander", "wandered", false),
    ("hurry", "hurried", false),
    ("hit", "hit", true),
    ("kick", "kicked", true),
    ("strike", "struck", true),
    ("punch", "punched", true),
    ("slap", "slapped", true),
    ("kill", "killed", true),
    ("murder", "murdered", true),
    ("chase", "chased", true),
    ("follow", "followed", true),
    ("pursue", "pursued", true),
    ("see", "saw", true),
    ("notice", "noticed", true),
    ("discover", "discovered", true),
    ("hear", "heard", true),
    ("steal", "stole", true),
    ("grab", "grabbed", true),
    ("seize", "seized", true),
    ("snatch", "snatched", true),
    ("buy", "bought", true),
    ("find", "found", true),
    ("win", "won", true),
    ("give", "gave", true),
    ("sell", "sold", true),
    ("lend", "lent", true),
    ("regard", "regarded", true),
    ("describe", "described", true),
    ("meet", "met", true),
    ("marry", "married", true),
    ("destroy", "destroyed", true),
    ("ruin", "ruined", true),
    ("wreck", "wrecked", true),
    ("love", "loved", true),
    ("hate", "hated", true),
    ("fear", "feared", true),
    ("admire", "admired", true),
    ("frighten", "frightened", true),
    ("amuse", "amused", true),
    ("surprise", "surprised", true),
    ("help", "helped", true),
    ("assist", "assisted", true),
    ("unlock", "unlocked", true),
    ("untie", "untied", true),
    ("transfer", "transferred", true),
    ("donate", "donated", true),
    ("hide", "hid", true),
    ("sleep", "slept", false),
    ("insult", "insulted", true),
    ("fire", "fired", true),
    ("explode", "exploded", false),
    ("fall", "fell", false),
    ("launch", "launched", true),
    ("use", "used", true),
    ("dislodge", "dislodged", true),
];

const PREPOSITIONS: &[&str] = &["to", "in", "at", "near", "with", "from"];

/// A noun phrase to place in a sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Np {
    /// A PERSON name of one or more words.
    Name(Vec<String>),
    /// "the" + common noun.
    Def(String),
    /// (surface, lemma)
    Pron(String, String),
    /// A single-word LOCATION entity.
    Place(String),
}

/// One clause: subjects (several means a conjoined subject), verb,
/// optional object and optional prepositional phrase.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub subjects: Vec<Np>,
    pub verb: (String, String),
    pub object: Option<Np>,
    pub pp: Option<(String, Np)>,
}

struct Builder {
    tokens: Vec<Token>,
}

impl Builder {
    fn push(&mut self, surface: &str, lemma: &str, upos: &str, head: usize, deprel: &str, ner: &str) -> usize {
        let index = self.tokens.len() + 1;
        self.tokens.push(Token {
            index,
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            upos: upos.to_string(),
            head,
            deprel: deprel.to_string(),
            ner: ner.to_string(),
        });
        index
    }

    fn set_head(&mut self, index: usize, head: usize) {
        self.tokens[index - 1].head = head;
    }

    /// Emits a noun phrase with a placeholder head; returns the indices
    /// whose head must point at the governor (the phrase head first).
    fn np(&mut self, np: &Np, deprel: &str) -> usize {
        match np {
            Np::Name(words) => {
                let head = self.push(&words[0], &words[0], "PROPN", 0, deprel, NER_PERSON);
                for w in &words[1..] {
                    self.push(w, w, "PROPN", head, "flat", NER_PERSON);
                }
                head
            }
            Np::Def(noun) => {
                let det = self.push("the", "the", "DET", 0, "det", NER_OUTSIDE);
                let head = self.push(noun, noun, "NOUN", 0, deprel, NER_OUTSIDE);
                self.set_head(det, head);
                head
            }
            Np::Pron(surface, lemma) => self.push(surface, lemma, "PRON", 0, deprel, NER_OUTSIDE),
            Np::Place(name) => self.push(name, name, "PROPN", 0, deprel, "LOCATION"),
        }
    }

    fn clause(&mut self, c: &Clause, governor: usize) -> usize {
        let mut subject_heads = Vec::new();
        for (i, s) in c.subjects.iter().enumerate() {
            if i > 0 {
                let cc = self.push("and", "and", "CCONJ", 0, "cc", NER_OUTSIDE);
                let h = self.np(s, "conj");
                self.set_head(cc, h);
                subject_heads.push(h);
            } else {
                subject_heads.push(self.np(s, "nsubj"));
            }
        }
        let deprel = if governor == 0 { "root" } else { "conj" };
        let verb = self.push(&c.verb.1, &c.verb.0, "VERB", governor, deprel, NER_OUTSIDE);
        for (i, &h) in subject_heads.iter().enumerate() {
            self.set_head(h, if i == 0 { verb } else { subject_heads[0] });
        }
        if let Some(o) = &c.object {
            let h = self.np(o, "obj");
            self.set_head(h, verb);
        }
        if let Some((prep, np)) = &c.pp {
            let case = self.push(prep, prep, "ADP", 0, "case", NER_OUTSIDE);
            let h = self.np(np, "obl");
            self.set_head(case, h);
            self.set_head(h, verb);
        }
        verb
    }
}

/// Builds a parsed sentence from coordinated clauses
/// ("A verbed X, and B verbed Y.").
pub fn build_sentence(clauses: &[Clause], story_id: &str, position: usize) -> ParsedSentence {
    let mut b = Builder { tokens: Vec::new() };
    let mut root = 0;
    for (i, c) in clauses.iter().enumerate() {
        if i > 0 {
            let comma = b.push(",", ",", "PUNCT", 0, "punct", NER_OUTSIDE);
            let cc = b.push("and", "and", "CCONJ", 0, "cc", NER_OUTSIDE);
            let v = b.clause(c, root);
            b.set_head(comma, v);
            b.set_head(cc, v);
        } else {
            root = b.clause(c, 0);
        }
    }
    b.push(".", ".", "PUNCT", root, "punct", NER_OUTSIDE);
    finish(b.tokens, story_id, position)
}

/// A verbless sentence such as "Silence."
pub fn build_fragment(noun: &str, story_id: &str, position: usize) -> ParsedSentence {
    let tokens = vec![
        Token {
            index: 1,
            surface: noun.to_string(),
            lemma: noun.to_string(),
            upos: "NOUN".into(),
            head: 0,
            deprel: "root".into(),
            ner: NER_OUTSIDE.into(),
        },
        Token {
            index: 2,
            surface: ".".into(),
            lemma: ".".into(),
            upos: "PUNCT".into(),
            head: 1,
            deprel: "punct".into(),
            ner: NER_OUTSIDE.into(),
        },
    ];
    finish(tokens, story_id, position)
}

fn finish(mut tokens: Vec<Token>, story_id: &str, position: usize) -> ParsedSentence {
    let first = &mut tokens[0].surface;
    let mut chars = first.chars();
    if let Some(c) = chars.next() {
        *first = c.to_uppercase().chain(chars).collect();
    }
    let raw_text = detokenize(&tokens.iter().map(|t| &t.surface).collect::<Vec<_>>());
    ParsedSentence {
        tokens,
        story_id: story_id.to_string(),
        position,
        raw_text,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SynthConfig {
    pub stories: usize,
    pub sentences: RangeInclusive<usize>,
    pub seed: u64,
    /// Probability that a clause has a conjoined subject.
    pub p_conjoined_subject: f64,
    /// Probability of each additional coordinated clause (at most 3).
    pub p_extra_clause: f64,
    pub p_verbless: f64,
    pub p_pp: f64,
    /// Probability that a name is two words.
    pub p_full_name: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            stories: 50,
            sentences: 3..=8,
            seed: 0,
            p_conjoined_subject: 0.15,
            p_extra_clause: 0.3,
            p_verbless: 0.05,
            p_pp: 0.4,
            p_full_name: 0.1,
        }
    }
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a SynthConfig,
}

impl Gen<'_> {
    fn pick<'v>(&mut self, xs: &'v [&'v str]) -> &'v str {
        xs.choose(&mut self.rng).expect("nonempty vocabulary")
    }

    fn name(&mut self) -> Np {
        let mut words = vec![self.pick(NAMES).to_string()];
        if self.rng.gen_bool(self.cfg.p_full_name) {
            words.push(self.pick(SURNAMES).to_string());
        }
        Np::Name(words)
    }

    fn subject(&mut self) -> Np {
        match self.rng.gen_range(0..10) {
            0..=4 => self.name(),
            5..=7 => Np::Def(self.pick(PERSON_NOUNS).to_string()),
            _ => {
                let (s, l) = *[("he", "he"), ("she", "she"), ("they", "they")]
                    .choose(&mut self.rng)
                    .unwrap();
                Np::Pron(s.into(), l.into())
            }
        }
    }

    fn object(&mut self) -> Np {
        match self.rng.gen_range(0..10) {
            0..=5 => Np::Def(self.pick(OBJECT_NOUNS).to_string()),
            6..=7 => self.name(),
            8 => Np::Def(self.pick(PERSON_NOUNS).to_string()),
            _ => {
                let (s, l) = *[("him", "he"), ("her", "she"), ("them", "they")]
                    .choose(&mut self.rng)
                    .unwrap();
                Np::Pron(s.into(), l.into())
            }
        }
    }

    fn clause(&mut self) -> Clause {
        let mut subjects = vec![self.subject()];
        if self.rng.gen_bool(self.cfg.p_conjoined_subject) {
            subjects.push(self.subject());
        }
        let &(lemma, past, transitive) = VERBS.choose(&mut self.rng).unwrap();
        let object = transitive.then(|| self.object());
        let pp = self.rng.gen_bool(self.cfg.p_pp).then(|| {
            let prep = self.pick(PREPOSITIONS).to_string();
            let np = if self.rng.gen_bool(0.25) {
                Np::Place(self.pick(LOCATIONS).to_string())
            } else {
                Np::Def(self.pick(PLACE_NOUNS).to_string())
            };
            (prep, np)
        });
        Clause {
            subjects,
            verb: (lemma.to_string(), past.to_string()),
            object,
            pp,
        }
    }

    fn sentence(&mut self, story_id: &str, position: usize) -> ParsedSentence {
        if self.rng.gen_bool(self.cfg.p_verbless) {
            let noun = self.pick(&["Silence", "Darkness", "Chaos", "Morning"]).to_string();
            return build_fragment(&noun, story_id, position);
        }
        let mut clauses = vec![self.clause()];
        while clauses.len() < 3 && self.rng.gen_bool(self.cfg.p_extra_clause) {
            clauses.push(self.clause());
        }
        build_sentence(&clauses, story_id, position)
    }
}

/// Random stories drawn from the templates.
pub fn synth_corpus(cfg: &SynthConfig) -> Corpus {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        cfg,
    };
    let stories = (0..cfg.stories)
        .map(|i| {
            let id = format!("synth-{i:04}");
            let n = g.rng.gen_range(cfg.sentences.clone());
            let sentences = (0..n).map(|p| g.sentence(&id, p)).collect();
            Story { id, sentences }
        })
        .collect();
    Corpus { stories }
}

/// Deterministic stories in which every sentence has one event and no
/// event occurs twice in the corpus, so each event has exactly one
/// successor and one surface realization.
pub fn memorization_corpus(stories: usize, sentences: usize) -> Corpus {
    let transitive: Vec<_> = VERBS.iter().filter(|v| v.2).collect();
    let stories = (0..stories)
        .map(|i| {
            let id = format!("memo-{i:03}");
            let name = NAMES[i % NAMES.len()];
            let sentences = (0..sentences)
                .map(|p| {
                    let k = i * sentences + p;
                    let &&(lemma, past, _) = &transitive[k % transitive.len()];
                    let noun = OBJECT_NOUNS[(k * 7 + i) % OBJECT_NOUNS.len()];
                    let clause = Clause {
                        subjects: vec![Np::Name(vec![name.to_string()])],
                        verb: (lemma.to_string(), past.to_string()),
                        object: Some(Np::Def(noun.to_string())),
                        pp: None,
                    };
                    build_sentence(&[clause], &id, p)
                })
                .collect();
            Story { id, sentences }
        })
        .collect();
    Corpus { stories }
}
