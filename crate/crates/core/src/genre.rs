//! Story genres from an LDA topic model trained by collapsed Gibbs
//! sampling. Documents are whole stories; words are lowercased content
//! lemmas with stopwords removed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use log::warn;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::function::gamma::ln_gamma;

use crate::binfmt::{BinReader, BinWriter};
use crate::corpus::{Corpus, Story};
use crate::error::{Error, Result};

/// Story id → genre number.
pub type GenreAssignment = BTreeMap<String, u32>;

/// Fold-in sweeps used by [`TopicModel::assign`].
pub const FOLD_IN_SWEEPS: usize = 20;

#[rustfmt::skip]
const STOPWORDS: &[&str] = &[
    "a", "about", "above", "after", "again", "against", "all", "also", "am", "an", "and", "any",
    "are", "as", "at", "be", "because", "been", "before", "being", "below", "between", "both",
    "but", "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "even",
    "ever", "few", "for", "from", "further", "get", "had", "has", "have", "having", "he", "her",
    "here", "hers", "herself", "him", "himself", "his", "how", "i", "if", "in", "into", "is",
    "it", "its", "itself", "just", "later", "may", "me", "might", "more", "most", "much", "must",
    "my", "myself", "no", "nor", "not", "now", "of", "off", "on", "once", "one", "only", "or",
    "other", "our", "ours", "ourselves", "out", "over", "own", "same", "shall", "she", "should",
    "so", "some", "such", "than", "that", "the", "their", "theirs", "them", "themselves", "then",
    "there", "these", "they", "this", "those", "though", "through", "to", "too", "under",
    "until", "up", "upon", "us", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "whose", "why", "will", "with", "would", "yet", "you", "your",
    "yours", "yourself", "yourselves",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}

/// Topic-model words of a story: lowercased lemmas containing a letter,
/// minus punctuation, numbers and stopwords.
pub fn story_words(story: &Story) -> Vec<String> {
    story
        .sentences
        .iter()
        .flat_map(|s| s.tokens.iter())
        .filter(|t| !matches!(t.upos.as_str(), "PUNCT" | "NUM" | "SYM" | "X"))
        .map(|t| t.norm_lemma())
        .filter(|w| w.chars().any(char::is_alphabetic) && !is_stopword(w))
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct LdaConfig {
    pub topics: usize,
    pub iterations: usize,
    /// Defaults to 50 / topics.
    pub alpha: Option<f64>,
    pub beta: f64,
    pub seed: u64,
}

impl Default for LdaConfig {
    fn default() -> Self {
        LdaConfig {
            topics: 100,
            iterations: 1000,
            alpha: None,
            beta: 0.01,
            seed: 13,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TopicModel {
    pub topics: usize,
    pub alpha: f64,
    pub beta: f64,
    pub seed: u64,
    /// Sorted vocabulary; position is the word id.
    pub vocabulary: Vec<String>,
    word_ids: HashMap<String, usize>,
    /// Row-major `topics × V`.
    topic_word: Vec<u32>,
    topic_totals: Vec<u64>,
}

/// Collapsed Gibbs sampler state. Exposed so training can be observed
/// sweep by sweep; [`train_lda`] is the usual entry point.
pub struct LdaSampler {
    k: usize,
    alpha: f64,
    beta: f64,
    seed: u64,
    vocabulary: Vec<String>,
    docs: Vec<Vec<usize>>,
    z: Vec<Vec<usize>>,
    doc_topic: Vec<Vec<u32>>,
    topic_word: Vec<u32>,
    topic_totals: Vec<u64>,
    rng: ChaCha8Rng,
    weights: Vec<f64>,
}

impl LdaSampler {
    pub fn new<S: AsRef<str>>(docs: &[Vec<S>], config: &LdaConfig) -> Result<Self> {
        let k = config.topics;
        if k < 2 {
            return Err(Error::invalid(format!("need at least 2 topics, got {k}")));
        }
        if config.beta <= 0.0 || config.alpha.is_some_and(|a| a <= 0.0) {
            return Err(Error::invalid("priors must be positive"));
        }
        let vocabulary: Vec<String> = docs
            .iter()
            .flatten()
            .map(|w| w.as_ref().to_string())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if vocabulary.is_empty() {
            return Err(Error::invalid("topic model vocabulary is empty"));
        }
        let ids: HashMap<&str, usize> = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_str(), i))
            .collect();
        let docs: Vec<Vec<usize>> = docs
            .iter()
            .map(|d| d.iter().map(|w| ids[w.as_ref()]).collect())
            .collect();

        let v = vocabulary.len();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut z = Vec::with_capacity(docs.len());
        let mut doc_topic = vec![vec![0u32; k]; docs.len()];
        let mut topic_word = vec![0u32; k * v];
        let mut topic_totals = vec![0u64; k];
        for (d, doc) in docs.iter().enumerate() {
            let zs: Vec<usize> = doc.iter().map(|_| rng.gen_range(0..k)).collect();
            for (&w, &t) in doc.iter().zip(&zs) {
                doc_topic[d][t] += 1;
                topic_word[t * v + w] += 1;
                topic_totals[t] += 1;
            }
            z.push(zs);
        }
        Ok(LdaSampler {
            k,
            alpha: config.alpha.unwrap_or(50.0 / k as f64),
            beta: config.beta,
            seed: config.seed,
            vocabulary,
            docs,
            z,
            doc_topic,
            topic_word,
            topic_totals,
            rng,
            weights: vec![0.0; k],
        })
    }

    /// One full Gibbs sweep over every token.
    pub fn sweep(&mut self) {
        let (k, v) = (self.k, self.vocabulary.len());
        let vbeta = v as f64 * self.beta;
        for d in 0..self.docs.len() {
            for i in 0..self.docs[d].len() {
                let w = self.docs[d][i];
                let old = self.z[d][i];
                self.doc_topic[d][old] -= 1;
                self.topic_word[old * v + w] -= 1;
                self.topic_totals[old] -= 1;

                let mut total = 0.0;
                for t in 0..k {
                    let p = (self.doc_topic[d][t] as f64 + self.alpha)
                        * (self.topic_word[t * v + w] as f64 + self.beta)
                        / (self.topic_totals[t] as f64 + vbeta);
                    total += p;
                    self.weights[t] = total;
                }
                let u = self.rng.gen::<f64>() * total;
                let new = self.weights.iter().position(|&c| u < c).unwrap_or(k - 1);

                self.z[d][i] = new;
                self.doc_topic[d][new] += 1;
                self.topic_word[new * v + w] += 1;
                self.topic_totals[new] += 1;
            }
        }
    }

    /// Joint log-likelihood log p(w, z) of the current state.
    pub fn log_likelihood(&self) -> f64 {
        let (k, v) = (self.k, self.vocabulary.len());
        let (a, b) = (self.alpha, self.beta);
        let mut ll = 0.0;
        for t in 0..k {
            ll += ln_gamma(v as f64 * b) - ln_gamma(self.topic_totals[t] as f64 + v as f64 * b);
            for w in 0..v {
                let n = self.topic_word[t * v + w];
                if n > 0 {
                    ll += ln_gamma(n as f64 + b) - ln_gamma(b);
                }
            }
        }
        for (d, doc) in self.docs.iter().enumerate() {
            ll += ln_gamma(k as f64 * a) - ln_gamma(doc.len() as f64 + k as f64 * a);
            for t in 0..k {
                let n = self.doc_topic[d][t];
                if n > 0 {
                    ll += ln_gamma(n as f64 + a) - ln_gamma(a);
                }
            }
        }
        ll
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    /// Most frequent topic of each training document (ties to smaller k).
    pub fn document_topics(&self) -> Vec<usize> {
        self.doc_topic.iter().map(|c| argmax(c.iter().map(|&n| n as f64))).collect()
    }

    pub fn into_model(self) -> TopicModel {
        TopicModel::from_parts(
            self.k,
            self.alpha,
            self.beta,
            self.seed,
            self.vocabulary,
            self.topic_word,
        )
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, x) in values.enumerate() {
        if x > best.1 {
            best = (i, x);
        }
    }
    best.0
}

/// Trains on pre-tokenized documents.
pub fn train_lda<S: AsRef<str>>(docs: &[Vec<S>], config: &LdaConfig) -> Result<TopicModel> {
    if config.iterations == 0 {
        return Err(Error::invalid("iterations must be at least 1"));
    }
    let mut sampler = LdaSampler::new(docs, config)?;
    for _ in 0..config.iterations {
        sampler.sweep();
    }
    Ok(sampler.into_model())
}

/// Trains on a corpus, one document per story.
pub fn train_lda_corpus(corpus: &Corpus, config: &LdaConfig) -> Result<TopicModel> {
    if corpus.is_empty() {
        return Err(Error::invalid("cannot train a topic model on an empty corpus"));
    }
    let docs: Vec<Vec<String>> = corpus.stories.iter().map(story_words).collect();
    train_lda(&docs, config)
}

/// Result of folding a document into a trained model.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Genre {
    pub genre: u32,
    /// Set when the document had no in-vocabulary words.
    pub empty: bool,
}

impl TopicModel {
    fn from_parts(
        topics: usize,
        alpha: f64,
        beta: f64,
        seed: u64,
        vocabulary: Vec<String>,
        topic_word: Vec<u32>,
    ) -> Self {
        let v = vocabulary.len();
        let topic_totals = (0..topics)
            .map(|t| topic_word[t * v..(t + 1) * v].iter().map(|&n| n as u64).sum())
            .collect();
        let word_ids = vocabulary
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i))
            .collect();
        TopicModel {
            topics,
            alpha,
            beta,
            seed,
            vocabulary,
            word_ids,
            topic_word,
            topic_totals,
        }
    }

    pub fn vocab_size(&self) -> usize {
        self.vocabulary.len()
    }

    pub fn count(&self, topic: usize, word: usize) -> u32 {
        self.topic_word[topic * self.vocab_size() + word]
    }

    pub fn topic_totals(&self) -> &[u64] {
        &self.topic_totals
    }

    /// Smoothed p(w | topic) over the whole vocabulary.
    pub fn topic_distribution(&self, topic: usize) -> Result<Vec<f64>> {
        self.check_topic(topic)?;
        let v = self.vocab_size();
        let denom = self.topic_totals[topic] as f64 + v as f64 * self.beta;
        Ok((0..v)
            .map(|w| (self.count(topic, w) as f64 + self.beta) / denom)
            .collect())
    }

    /// The `n` most probable words of a topic (ties in vocabulary order).
    pub fn top_words(&self, topic: usize, n: usize) -> Result<Vec<String>> {
        self.check_topic(topic)?;
        let mut ids: Vec<usize> = (0..self.vocab_size()).collect();
        ids.sort_by(|&a, &b| self.count(topic, b).cmp(&self.count(topic, a)).then(a.cmp(&b)));
        Ok(ids
            .into_iter()
            .take(n)
            .map(|w| self.vocabulary[w].clone())
            .collect())
    }

    fn check_topic(&self, topic: usize) -> Result<()> {
        if topic >= self.topics {
            return Err(Error::invalid(format!(
                "topic {topic} out of range for {} topics",
                self.topics
            )));
        }
        Ok(())
    }

    /// Genre of a document: argmax of its smoothed topic proportions after
    /// [`FOLD_IN_SWEEPS`] Gibbs sweeps with the model counts frozen.
    pub fn assign<S: AsRef<str>>(&self, words: &[S], seed: u64) -> Genre {
        let v = self.vocab_size();
        let doc: Vec<usize> = words
            .iter()
            .filter_map(|w| self.word_ids.get(w.as_ref()).copied())
            .collect();
        if doc.is_empty() {
            return Genre {
                genre: 0,
                empty: true,
            };
        }
        let k = self.topics;
        let vbeta = v as f64 * self.beta;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut z: Vec<usize> = doc.iter().map(|_| rng.gen_range(0..k)).collect();
        let mut counts = vec![0u32; k];
        for &t in &z {
            counts[t] += 1;
        }
        let mut weights = vec![0.0; k];
        for _ in 0..FOLD_IN_SWEEPS {
            for (i, &w) in doc.iter().enumerate() {
                counts[z[i]] -= 1;
                let mut total = 0.0;
                for t in 0..k {
                    total += (counts[t] as f64 + self.alpha) * (self.count(t, w) as f64 + self.beta)
                        / (self.topic_totals[t] as f64 + vbeta);
                    weights[t] = total;
                }
                let u = rng.gen::<f64>() * total;
                z[i] = weights.iter().position(|&c| u < c).unwrap_or(k - 1);
                counts[z[i]] += 1;
            }
        }
        Genre {
            genre: argmax(counts.iter().map(|&n| n as f64)) as u32,
            empty: false,
        }
    }

    /// Genre of a story, folded in with the model's own seed.
    pub fn assign_story(&self, story: &Story) -> Genre {
        let g = self.assign(&story_words(story), self.seed);
        if g.empty {
            warn!("story {} has no in-vocabulary words; genre 0", story.id);
        }
        g
    }

    pub fn assign_corpus(&self, corpus: &Corpus) -> GenreAssignment {
        corpus
            .stories
            .iter()
            .map(|s| (s.id.clone(), self.assign_story(s).genre))
            .collect()
    }

    pub fn write_bin<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BinWriter::new(out);
        w.header(LDA_MAGIC, LDA_VERSION)?;
        w.len(self.topics)?;
        w.len(self.vocab_size())?;
        w.f64(self.alpha)?;
        w.f64(self.beta)?;
        w.u64(self.seed)?;
        for word in &self.vocabulary {
            w.str(word)?;
        }
        for &total in &self.topic_totals {
            w.u64(total)?;
        }
        for &n in &self.topic_word {
            w.u32(n)?;
        }
        w.finish()?;
        Ok(())
    }

    pub fn read_bin<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.header(LDA_MAGIC, LDA_VERSION)?;
        let topics = r.len()?;
        let v = r.len()?;
        let alpha = r.f64()?;
        let beta = r.f64()?;
        let seed = r.u64()?;
        if topics < 2 || v == 0 {
            return Err(Error::Format(format!("bad model shape {topics}×{v}")));
        }
        let vocabulary = (0..v).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        let totals = (0..topics).map(|_| r.u64()).collect::<Result<Vec<_>>>()?;
        let topic_word = (0..topics * v).map(|_| r.u32()).collect::<Result<Vec<_>>>()?;
        let model = TopicModel::from_parts(topics, alpha, beta, seed, vocabulary, topic_word);
        if model.topic_totals != totals {
            return Err(Error::Format("topic totals do not match counts".into()));
        }
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        self.write_bin(BufWriter::new(File::create(path)?))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::load(path, e.to_string()))?;
        Self::read_bin(BufReader::new(file))
    }
}

const LDA_MAGIC: &[u8; 8] = b"EWLDAMOD";
const LDA_VERSION: u32 = 1;

#[cfg(test)]
mod tests {
    use super::*;

    fn docs() -> Vec<Vec<&'static str>> {
        vec![
            vec!["ship", "sea", "sail", "ship"],
            vec!["sword", "castle", "king"],
            vec!["sea", "sail", "wave"],
            vec!["king", "castle", "sword", "knight"],
        ]
    }

    fn config(iterations: usize) -> LdaConfig {
        LdaConfig {
            topics: 2,
            iterations,
            alpha: None,
            beta: 0.01,
            seed: 5,
        }
    }

    #[test]
    fn stopword_list_is_sorted() {
        assert!(STOPWORDS.windows(2).all(|w| w[0] < w[1]));
        assert!(is_stopword("the"));
        assert!(!is_stopword("ship"));
    }

    #[test]
    fn rejects_bad_shapes() {
        let mut c = config(5);
        c.topics = 1;
        assert!(train_lda(&docs(), &c).is_err());
        assert!(train_lda::<&str>(&[vec![]], &config(5)).is_err());
        assert!(train_lda(&docs(), &config(0)).is_err());
    }

    #[test]
    fn sweeps_conserve_token_count() {
        let mut s = LdaSampler::new(&docs(), &config(1)).unwrap();
        for _ in 0..10 {
            s.sweep();
            assert_eq!(s.topic_totals().iter().sum::<u64>(), 14);
        }
    }

    #[test]
    fn single_document_model() {
        let m = train_lda(&[vec!["alpha", "beta"]], &config(3)).unwrap();
        assert!(m.assign(&["alpha"], 1).genre < 2);
    }

    #[test]
    fn empty_story_gets_genre_zero_with_flag() {
        let m = train_lda(&docs(), &config(10)).unwrap();
        assert_eq!(m.assign::<&str>(&[], 1), Genre { genre: 0, empty: true });
        assert!(m.assign(&["unknown"], 1).empty);
    }

    #[test]
    fn top_words_clamp_and_range() {
        let m = train_lda(&docs(), &config(10)).unwrap();
        assert!(m.top_words(0, 0).unwrap().is_empty());
        assert_eq!(m.top_words(1, 100).unwrap().len(), m.vocab_size());
        assert!(m.top_words(2, 1).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let m = train_lda(&docs(), &config(10)).unwrap();
        let mut buf = Vec::new();
        m.write_bin(&mut buf).unwrap();
        assert_eq!(TopicModel::read_bin(&buf[..]).unwrap(), m);
        buf[8] = 9;
        assert!(TopicModel::read_bin(&buf[..]).is_err());
    }
}
