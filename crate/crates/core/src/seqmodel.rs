//! Count-based conditional sequence model with greedy and beam decoding.
//!
//! Next-token counts are kept per (input bucket, output context), per
//! output context alone, and as output unigrams. A distribution comes from
//! the first of these three levels with any observations, add-k smoothed
//! over the output vocabulary plus [`SEQ_END`]. The input bucket hashes the
//! sorted input tokens, so inputs that are permutations of each other
//! share statistics.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::hash::Hasher;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use fnv::FnvHasher;

use crate::binfmt::{BinReader, BinWriter};
use crate::dataset::SequencePair;
use crate::error::{Error, Result};

pub const SEQ_START: &str = "<s>";
pub const SEQ_END: &str = "</s>";

const START: u32 = 0;
const END: u32 = 1;

pub const DEFAULT_K: f64 = 0.01;
pub const DEFAULT_BEAM: usize = 5;
pub const MAX_EVENT_LEN: usize = 16;
pub const MAX_SENTENCE_LEN: usize = 48;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Counts {
    total: u64,
    next: BTreeMap<u32, u64>,
}

impl Counts {
    fn add(&mut self, id: u32, n: u64) {
        self.total += n;
        *self.next.entry(id).or_insert(0) += n;
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalSequenceModel {
    order: usize,
    k: f64,
    /// id → token; ids 0 and 1 are [`SEQ_START`] and [`SEQ_END`], the rest
    /// are the output tokens in sorted order.
    vocab: Vec<String>,
    ids: HashMap<String, u32>,
    conditioned: HashMap<(u64, Vec<u32>), Counts>,
    global: HashMap<Vec<u32>, Counts>,
    unigram: Counts,
}

/// A partial or finished output during beam search.
#[derive(Clone, Debug, PartialEq)]
pub struct Hypothesis {
    pub tokens: Vec<String>,
    pub logprob: f64,
    pub finished: bool,
}

/// Order-insensitive hash of an input sequence.
pub fn input_bucket<S: AsRef<str>>(input: &[S]) -> u64 {
    let mut sorted: Vec<&str> = input.iter().map(AsRef::as_ref).collect();
    sorted.sort_unstable();
    let mut h = FnvHasher::default();
    for t in sorted {
        h.write(t.as_bytes());
        h.write_u8(0xff);
    }
    h.finish()
}

#[derive(Clone)]
struct Hyp {
    ids: Vec<u32>,
    logprob: f64,
    finished: bool,
}

impl ConditionalSequenceModel {
    pub fn train(pairs: &[SequencePair], order: usize, k: f64) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::invalid("no training pairs"));
        }
        if order == 0 {
            return Err(Error::invalid("order must be at least 1"));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::invalid(format!("smoothing constant {k} must be positive")));
        }
        let mut words: Vec<&str> = pairs
            .iter()
            .flat_map(|p| p.output.iter().map(String::as_str))
            .collect();
        if let Some(bad) = words.iter().find(|w| **w == SEQ_START || **w == SEQ_END) {
            return Err(Error::invalid(format!("reserved token {bad} in output")));
        }
        words.sort_unstable();
        words.dedup();
        let vocab: Vec<String> = [SEQ_START, SEQ_END]
            .into_iter()
            .chain(words)
            .map(str::to_string)
            .collect();
        let mut model = ConditionalSequenceModel {
            order,
            k,
            ids: index_of(&vocab),
            vocab,
            conditioned: HashMap::new(),
            global: HashMap::new(),
            unigram: Counts::default(),
        };
        for p in pairs {
            model.observe(p);
        }
        Ok(model)
    }

    fn observe(&mut self, pair: &SequencePair) {
        let bucket = input_bucket(&pair.input);
        let mut ctx = vec![START; self.order - 1];
        let ids: Vec<u32> = pair.output.iter().map(|t| self.ids[t.as_str()]).collect();
        for id in ids.into_iter().chain([END]) {
            self.conditioned
                .entry((bucket, ctx.clone()))
                .or_default()
                .add(id, 1);
            self.global.entry(ctx.clone()).or_default().add(id, 1);
            self.unigram.add(id, 1);
            if !ctx.is_empty() {
                ctx.remove(0);
                ctx.push(id);
            }
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn smoothing(&self) -> f64 {
        self.k
    }

    /// Output tokens, excluding the start and end markers.
    pub fn vocabulary(&self) -> &[String] {
        &self.vocab[2..]
    }

    /// Training output token counts (the output stream seen in training).
    pub fn output_counts(&self) -> BTreeMap<String, u64> {
        self.unigram
            .next
            .iter()
            .filter(|(&id, _)| id != END)
            .map(|(&id, &n)| (self.vocab[id as usize].clone(), n))
            .collect()
    }

    fn context_ids<S: AsRef<str>>(&self, context: &[S]) -> Vec<u32> {
        let ids: Vec<u32> = context
            .iter()
            .map(|t| self.ids.get(t.as_ref()).copied().unwrap_or(u32::MAX))
            .collect();
        self.window(&ids)
    }

    fn window(&self, ids: &[u32]) -> Vec<u32> {
        let n = self.order - 1;
        let mut ctx = vec![START; n.saturating_sub(ids.len())];
        ctx.extend_from_slice(&ids[ids.len().saturating_sub(n)..]);
        ctx
    }

    /// Probabilities indexed by token id (START gets 0).
    fn probs(&self, bucket: u64, ctx: &[u32]) -> Vec<f64> {
        let counts = self
            .conditioned
            .get(&(bucket, ctx.to_vec()))
            .or_else(|| self.global.get(ctx))
            .filter(|c| c.total > 0)
            .unwrap_or(&self.unigram);
        let support = (self.vocab.len() - 1) as f64;
        let denom = counts.total as f64 + self.k * support;
        let mut p = vec![self.k / denom; self.vocab.len()];
        p[START as usize] = 0.0;
        for (&id, &c) in &counts.next {
            p[id as usize] = (c as f64 + self.k) / denom;
        }
        p
    }

    /// Smoothed distribution over the vocabulary and [`SEQ_END`] after
    /// `context` (the output so far) given `input`.
    pub fn next_distribution<S: AsRef<str>, T: AsRef<str>>(
        &self,
        input: &[S],
        context: &[T],
    ) -> BTreeMap<String, f64> {
        let p = self.probs(input_bucket(input), &self.context_ids(context));
        self.vocab
            .iter()
            .zip(p)
            .skip(1)
            .map(|(t, p)| (t.clone(), p))
            .collect()
    }

    /// Log probability of `output` followed by [`SEQ_END`], accumulated
    /// token by token in order.
    pub fn sequence_logprob<S: AsRef<str>, T: AsRef<str>>(&self, input: &[S], output: &[T]) -> f64 {
        let bucket = input_bucket(input);
        let ids: Vec<u32> = output
            .iter()
            .map(|t| self.ids.get(t.as_ref()).copied().unwrap_or(u32::MAX))
            .collect();
        let mut lp = 0.0;
        for i in 0..=ids.len() {
            let p = self.probs(bucket, &self.window(&ids[..i]));
            let id = if i == ids.len() { END } else { ids[i] };
            lp += p.get(id as usize).copied().unwrap_or(0.0).ln();
        }
        lp
    }

    fn token_order(&self, a: u32, b: u32) -> Ordering {
        self.vocab[a as usize].cmp(&self.vocab[b as usize])
    }

    /// Ids ranked by probability, ties to the smaller token string.
    fn ranked(&self, p: &[f64]) -> Vec<u32> {
        let mut ids: Vec<u32> = (1..self.vocab.len() as u32).collect();
        ids.sort_by(|&a, &b| {
            p[b as usize]
                .total_cmp(&p[a as usize])
                .then_with(|| self.token_order(a, b))
        });
        ids
    }

    fn tokens(&self, ids: &[u32]) -> Vec<String> {
        ids.iter().map(|&i| self.vocab[i as usize].clone()).collect()
    }

    /// Appends the most probable token until [`SEQ_END`] or `max_len`
    /// tokens.
    pub fn greedy_decode<S: AsRef<str>>(&self, input: &[S], max_len: usize) -> Vec<String> {
        let bucket = input_bucket(input);
        let mut out = Vec::new();
        while out.len() < max_len {
            let p = self.probs(bucket, &self.window(&out));
            let best = self.ranked(&p)[0];
            if best == END {
                break;
            }
            out.push(best);
        }
        self.tokens(&out)
    }

    fn hyp_order(&self, a: &Hyp, b: &Hyp) -> Ordering {
        b.logprob.total_cmp(&a.logprob).then_with(|| {
            a.ids
                .iter()
                .zip(&b.ids)
                .map(|(&x, &y)| self.token_order(x, y))
                .find(|o| o.is_ne())
                .unwrap_or_else(|| a.ids.len().cmp(&b.ids.len()))
        })
    }

    /// Final beam of width `beam`, best first. Each step expands every live
    /// hypothesis by its `beam` most probable tokens and keeps the global
    /// top `beam` among expansions and finished hypotheses. A hypothesis
    /// with `max_len` tokens can only be closed with [`SEQ_END`].
    pub fn beam_search<S: AsRef<str>>(&self, input: &[S], beam: usize, max_len: usize) -> Vec<Hypothesis> {
        self.beam_search_bounded(input, beam, 0, max_len)
    }

    /// [`Self::beam_search`] with [`SEQ_END`] excluded before `min_len`
    /// tokens.
    pub fn beam_search_bounded<S: AsRef<str>>(
        &self,
        input: &[S],
        beam: usize,
        min_len: usize,
        max_len: usize,
    ) -> Vec<Hypothesis> {
        let beam = beam.max(1);
        let min_len = min_len.min(max_len);
        let bucket = input_bucket(input);
        let mut hyps = vec![Hyp {
            ids: Vec::new(),
            logprob: 0.0,
            finished: false,
        }];
        while hyps.iter().any(|h| !h.finished) {
            let mut next = Vec::with_capacity(hyps.len() * beam);
            for h in hyps {
                if h.finished {
                    next.push(h);
                    continue;
                }
                let p = self.probs(bucket, &self.window(&h.ids));
                let choices = if h.ids.len() >= max_len {
                    vec![END]
                } else {
                    let early = h.ids.len() < min_len && self.vocab.len() > 2;
                    self.ranked(&p)
                        .into_iter()
                        .filter(|&id| !(early && id == END))
                        .take(beam)
                        .collect()
                };
                for id in choices {
                    let mut e = h.clone();
                    e.logprob += p[id as usize].ln();
                    if id == END {
                        e.finished = true;
                    } else {
                        e.ids.push(id);
                    }
                    next.push(e);
                }
            }
            next.sort_by(|a, b| self.hyp_order(a, b));
            next.truncate(beam);
            hyps = next;
        }
        hyps.into_iter()
            .map(|h| Hypothesis {
                tokens: self.tokens(&h.ids),
                logprob: h.logprob,
                finished: h.finished,
            })
            .collect()
    }

    /// Best hypothesis of a width-`beam` search.
    pub fn beam_decode<S: AsRef<str>>(&self, input: &[S], beam: usize, max_len: usize) -> Vec<String> {
        self.beam_decode_bounded(input, beam, 0, max_len)
    }

    pub fn beam_decode_bounded<S: AsRef<str>>(
        &self,
        input: &[S],
        beam: usize,
        min_len: usize,
        max_len: usize,
    ) -> Vec<String> {
        self.beam_search_bounded(input, beam, min_len, max_len)
            .into_iter()
            .next()
            .map(|h| h.tokens)
            .unwrap_or_default()
    }

    pub fn write_bin<W: Write>(&self, out: W) -> Result<()> {
        let mut w = BinWriter::new(out);
        w.header(SEQ_MAGIC, SEQ_VERSION)?;
        w.len(self.order)?;
        w.f64(self.k)?;
        w.len(self.vocab.len())?;
        w.u32(START)?;
        w.u32(END)?;
        for t in &self.vocab {
            w.str(t)?;
        }
        let mut cond: Vec<_> = self.conditioned.iter().collect();
        cond.sort_by(|a, b| a.0.cmp(b.0));
        w.len(cond.len())?;
        for ((bucket, ctx), counts) in cond {
            w.u64(*bucket)?;
            write_context(&mut w, ctx)?;
            write_counts(&mut w, counts)?;
        }
        let mut global: Vec<_> = self.global.iter().collect();
        global.sort_by(|a, b| a.0.cmp(b.0));
        w.len(global.len())?;
        for (ctx, counts) in global {
            write_context(&mut w, ctx)?;
            write_counts(&mut w, counts)?;
        }
        write_counts(&mut w, &self.unigram)?;
        w.finish()?;
        Ok(())
    }

    pub fn read_bin<R: Read>(input: R) -> Result<Self> {
        let mut r = BinReader::new(input);
        r.header(SEQ_MAGIC, SEQ_VERSION)?;
        let order = r.len()?;
        let k = r.f64()?;
        let v = r.len()?;
        if order == 0 || !(k > 0.0) || v < 2 || r.u32()? != START || r.u32()? != END {
            return Err(Error::Format("bad sequence model header".into()));
        }
        let vocab = (0..v).map(|_| r.str()).collect::<Result<Vec<_>>>()?;
        if vocab[0] != SEQ_START || vocab[1] != SEQ_END {
            return Err(Error::Format("special tokens out of place".into()));
        }
        let n = r.len()?;
        let mut conditioned = HashMap::with_capacity(n);
        for _ in 0..n {
            let bucket = r.u64()?;
            let ctx = read_context(&mut r, order, v)?;
            conditioned.insert((bucket, ctx), read_counts(&mut r, v)?);
        }
        let n = r.len()?;
        let mut global = HashMap::with_capacity(n);
        for _ in 0..n {
            let ctx = read_context(&mut r, order, v)?;
            global.insert(ctx, read_counts(&mut r, v)?);
        }
        let unigram = read_counts(&mut r, v)?;
        Ok(ConditionalSequenceModel {
            order,
            k,
            ids: index_of(&vocab),
            vocab,
            conditioned,
            global,
            unigram,
        })
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

const SEQ_MAGIC: &[u8; 8] = b"EWSEQMOD";
const SEQ_VERSION: u32 = 1;

fn index_of(vocab: &[String]) -> HashMap<String, u32> {
    vocab
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i as u32))
        .collect()
}

fn write_context<W: Write>(w: &mut BinWriter<W>, ctx: &[u32]) -> Result<()> {
    ctx.iter().try_for_each(|&id| w.u32(id))
}

fn read_context<R: Read>(r: &mut BinReader<R>, order: usize, v: usize) -> Result<Vec<u32>> {
    (1..order).map(|_| checked_id(r.u32()?, v)).collect()
}

fn write_counts<W: Write>(w: &mut BinWriter<W>, c: &Counts) -> Result<()> {
    w.len(c.next.len())?;
    for (&id, &n) in &c.next {
        w.u32(id)?;
        w.u64(n)?;
    }
    Ok(())
}

fn read_counts<R: Read>(r: &mut BinReader<R>, v: usize) -> Result<Counts> {
    let mut c = Counts::default();
    for _ in 0..r.len()? {
        let id = checked_id(r.u32()?, v)?;
        c.add(id, r.u64()?);
    }
    Ok(c)
}

fn checked_id(id: u32, v: usize) -> Result<u32> {
    if (id as usize) < v {
        Ok(id)
    } else {
        Err(Error::Format(format!("token id {id} out of range")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(input: &str, output: &str) -> SequencePair {
        SequencePair {
            input: input.split_whitespace().map(str::to_string).collect(),
            output: output.split_whitespace().map(str::to_string).collect(),
            story: String::new(),
            sentences: Vec::new(),
        }
    }

    #[test]
    fn single_pair_is_memorized() {
        let m = ConditionalSequenceModel::train(&[pair("a b", "c d")], 2, DEFAULT_K).unwrap();
        let d = m.next_distribution(&["a", "b"], &[] as &[&str]);
        assert!(d["c"] > 0.97);
        assert!(m.next_distribution(&["a", "b"], &["c"])["d"] > 0.97);
        assert!(m.next_distribution(&["b", "a"], &["c", "d"])[SEQ_END] > 0.97);
        assert_eq!(m.greedy_decode(&["a", "b"], 16), ["c", "d"]);
        assert_eq!(m.greedy_decode(&["a", "b"], 1), ["c"]);
        assert_eq!(m.beam_decode(&["a", "b"], 5, 16), ["c", "d"]);
    }

    #[test]
    fn add_k_estimate() {
        let k = 0.5;
        let m = ConditionalSequenceModel::train(&[pair("x", "c"), pair("x", "e")], 2, k).unwrap();
        let d = m.next_distribution(&["x"], &[] as &[&str]);
        let expected = (1.0 + k) / (2.0 + 3.0 * k);
        assert!((d["c"] - expected).abs() < 1e-12);
        assert!((d["e"] - expected).abs() < 1e-12);
        assert!((d[SEQ_END] - k / (2.0 + 3.0 * k)).abs() < 1e-12);
    }

    #[test]
    fn unseen_input_backs_off() {
        let pairs = [pair("a", "c c"), pair("b", "d")];
        let m = ConditionalSequenceModel::train(&pairs, 1, 1.0).unwrap();
        let d = m.next_distribution(&["zzz"], &[] as &[&str]);
        // unigram counts: c 2, d 1, END 2; support 3
        assert!((d["c"] - 3.0 / 8.0).abs() < 1e-12);
        assert!((d["d"] - 2.0 / 8.0).abs() < 1e-12);
    }

    #[test]
    fn immediate_end() {
        let m = ConditionalSequenceModel::train(&[pair("a", ""), pair("b", "x")], 2, 1e-6).unwrap();
        assert!(m.beam_decode(&["a"], 5, 10).is_empty());
        assert!(m.greedy_decode(&["a"], 10).is_empty());
        assert_eq!(m.beam_decode_bounded(&["a"], 5, 1, 10), ["x"]);
        let bare = ConditionalSequenceModel::train(&[pair("a", "")], 2, 1e-6).unwrap();
        assert!(bare.beam_decode_bounded(&["a"], 5, 1, 10).is_empty());
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(ConditionalSequenceModel::train(&[], 2, 0.1).is_err());
        assert!(ConditionalSequenceModel::train(&[pair("a", "b")], 0, 0.1).is_err());
        assert!(ConditionalSequenceModel::train(&[pair("a", "b")], 2, 0.0).is_err());
        assert!(ConditionalSequenceModel::train(&[pair("a", "</s>")], 2, 0.1).is_err());
    }

    #[test]
    fn binary_round_trip() {
        let pairs = [pair("a b", "c d e"), pair("q", "c e"), pair("b a", "d")];
        let m = ConditionalSequenceModel::train(&pairs, 3, 0.2).unwrap();
        let mut buf = Vec::new();
        m.write_bin(&mut buf).unwrap();
        let back = ConditionalSequenceModel::read_bin(&buf[..]).unwrap();
        assert_eq!(back, m);
        assert!(ConditionalSequenceModel::read_bin(&buf[..buf.len() - 3]).is_err());
    }
}
