//! Unigram perplexity, corpus BLEU and per-condition evaluation reports.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::dataset::SequencePair;
use crate::error::{Error, Result};
use crate::eventify::is_genre_token;
use crate::seqmodel::{ConditionalSequenceModel, DEFAULT_BEAM, MAX_SENTENCE_LEN};

pub const DEFAULT_FLOOR: f64 = 1e-6;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnigramTable {
    pub counts: BTreeMap<String, u64>,
    pub total: u64,
}

impl UnigramTable {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S]) -> Self {
        let mut t = UnigramTable::default();
        for tok in tokens {
            t.add(tok.as_ref(), 1);
        }
        t
    }

    pub fn from_counts(counts: BTreeMap<String, u64>) -> Self {
        let total = counts.values().sum();
        UnigramTable { counts, total }
    }

    pub fn add(&mut self, token: &str, n: u64) {
        *self.counts.entry(token.to_string()).or_insert(0) += n;
        self.total += n;
    }

    pub fn probability(&self, token: &str) -> Option<f64> {
        self.counts
            .get(token)
            .map(|&c| c as f64 / self.total as f64)
    }
}

/// 2 to the cross-entropy of the test stream's empirical distribution
/// against the reference unigram distribution. Test tokens absent from the
/// reference get probability `floor`, after which the distribution is
/// renormalized. With `test == reference` this is 2 to the entropy.
pub fn unigram_perplexity<S: AsRef<str>, T: AsRef<str>>(reference: &[S], test: &[T], floor: f64) -> Result<f64> {
    perplexity_against(&UnigramTable::from_tokens(reference), test, floor)
}

pub fn perplexity_against<T: AsRef<str>>(reference: &UnigramTable, test: &[T], floor: f64) -> Result<f64> {
    if reference.total == 0 {
        return Err(Error::invalid("empty reference stream"));
    }
    if test.is_empty() {
        return Err(Error::invalid("empty test stream"));
    }
    if !(floor > 0.0) {
        return Err(Error::invalid("floor must be positive"));
    }
    let q = UnigramTable::from_tokens(test);
    let unseen = q
        .counts
        .keys()
        .filter(|t| !reference.counts.contains_key(*t))
        .count();
    let z = 1.0 + floor * unseen as f64;
    let n = q.total as f64;
    let h: f64 = q
        .counts
        .iter()
        .map(|(tok, &c)| {
            let p = reference.probability(tok).unwrap_or(floor) / z;
            -(c as f64 / n) * p.log2()
        })
        .sum();
    Ok(h.exp2())
}

fn ngrams<S: AsRef<str>>(seq: &[S], n: usize) -> HashMap<Vec<&str>, usize> {
    let mut out = HashMap::new();
    if seq.len() >= n {
        for w in seq.windows(n) {
            *out.entry(w.iter().map(AsRef::as_ref).collect()).or_insert(0) += 1;
        }
    }
    out
}

/// Corpus-level BLEU with one reference per candidate: clipped n-gram
/// precisions for n = 1..=`max_n`, uniform geometric mean, brevity penalty.
/// Any order with no matches gives 0 unless `smooth` adds one to every
/// order's matches and totals.
pub fn bleu<S: AsRef<str>, T: AsRef<str>>(
    candidates: &[Vec<S>],
    references: &[Vec<T>],
    max_n: usize,
    smooth: bool,
) -> Result<f64> {
    if candidates.len() != references.len() {
        return Err(Error::invalid(format!(
            "{} candidates for {} references",
            candidates.len(),
            references.len()
        )));
    }
    if candidates.is_empty() || max_n == 0 {
        return Err(Error::invalid("bleu needs at least one pair and n ≥ 1"));
    }
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut c_len, mut r_len) = (0usize, 0usize);
    for (c, r) in candidates.iter().zip(references) {
        c_len += c.len();
        r_len += r.len();
        for n in 1..=max_n {
            let rc = ngrams(r, n);
            for (g, k) in ngrams(c, n) {
                matches[n - 1] += k.min(rc.get(&g).copied().unwrap_or(0));
                totals[n - 1] += k;
            }
        }
    }
    if c_len == 0 {
        return Ok(0.0);
    }
    let add = if smooth { 1.0 } else { 0.0 };
    let mut log_sum = 0.0;
    for (&m, &t) in matches.iter().zip(&totals) {
        let (m, t) = (m as f64 + add, t as f64 + add);
        if m == 0.0 || t == 0.0 {
            return Ok(0.0);
        }
        log_sum += (m / t).ln();
    }
    let bp = if c_len > r_len {
        1.0
    } else {
        (1.0 - r_len as f64 / c_len as f64).exp()
    };
    Ok(bp * (log_sum / max_n as f64).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub condition: String,
    /// Perplexity of the decoded outputs against the training output stream.
    pub perplexity: f64,
    /// Perplexity of the held-out gold outputs against the same stream.
    pub gold_perplexity: f64,
    pub bleu: f64,
    pub pairs: usize,
    pub vocab_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EvalOptions {
    pub strip_genre: bool,
    pub beam: usize,
    pub max_len: usize,
    pub floor: f64,
    pub smooth_bleu: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            strip_genre: false,
            beam: DEFAULT_BEAM,
            max_len: MAX_SENTENCE_LEN,
            floor: DEFAULT_FLOOR,
            smooth_bleu: false,
        }
    }
}

fn strip(tokens: Vec<String>, on: bool) -> Vec<String> {
    if on {
        tokens.into_iter().filter(|t| !is_genre_token(t)).collect()
    } else {
        tokens
    }
}

/// Decodes every held-out input with beam search and scores the outputs.
/// Genre tokens are removed from decoded, gold and training streams when
/// `strip_genre` is set; inputs keep them, since the model was trained
/// on them.
pub fn evaluate_condition(
    model: &ConditionalSequenceModel,
    pairs: &[SequencePair],
    condition: &str,
    opts: &EvalOptions,
) -> Result<EvalReport> {
    if pairs.is_empty() {
        return Err(Error::invalid("empty held-out set"));
    }
    let mut reference = UnigramTable::default();
    for (tok, n) in model.output_counts() {
        if !(opts.strip_genre && is_genre_token(&tok)) {
            reference.add(&tok, n);
        }
    }
    let mut decoded = Vec::with_capacity(pairs.len());
    let mut gold = Vec::with_capacity(pairs.len());
    for p in pairs {
        let out = model.beam_decode(&p.input, opts.beam, opts.max_len);
        decoded.push(strip(out, opts.strip_genre));
        gold.push(strip(p.output.clone(), opts.strip_genre));
    }
    let flat = |v: &[Vec<String>]| v.iter().flatten().cloned().collect::<Vec<_>>();
    let decoded_stream = flat(&decoded);
    let gold_stream = flat(&gold);
    let perplexity = if decoded_stream.is_empty() {
        f64::NAN
    } else {
        perplexity_against(&reference, &decoded_stream, opts.floor)?
    };
    let gold_perplexity = if gold_stream.is_empty() {
        f64::NAN
    } else {
        perplexity_against(&reference, &gold_stream, opts.floor)?
    };
    Ok(EvalReport {
        condition: condition.to_string(),
        perplexity,
        gold_perplexity,
        bleu: bleu(&decoded, &gold, 4, opts.smooth_bleu)?,
        pairs: pairs.len(),
        vocab_size: reference.counts.len(),
    })
}

/// Aligned text table, one row per report.
pub fn format_table(reports: &[EvalReport]) -> String {
    let headers = ["Experiment", "Perplexity", "Gold perplexity", "BLEU", "Pairs", "Vocab"];
    let rows: Vec<[String; 6]> = reports
        .iter()
        .map(|r| {
            [
                r.condition.clone(),
                format!("{:.3}", r.perplexity),
                format!("{:.3}", r.gold_perplexity),
                format!("{:.4}", r.bleu),
                r.pairs.to_string(),
                r.vocab_size.to_string(),
            ]
        })
        .collect();
    let mut widths = headers.map(|h| h.chars().count());
    for row in &rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let line = |out: &mut String, cells: &[String]| {
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i == 0 {
                let _ = write!(out, "{cell:<w$}");
            } else {
                let _ = write!(out, "  {cell:>w$}");
            }
        }
        out.push('\n');
    };
    line(&mut out, &headers.map(String::from));
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut out, &rule);
    for row in &rows {
        line(&mut out, row);
    }
    out
}
