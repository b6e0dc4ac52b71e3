use std::fmt::Write as _;

use super::{detokenize, Corpus, ParsedSentence, Story, Token, NER_OUTSIDE};
use crate::error::{Error, Result};

/// Reads a CoNLL-U document into a corpus.
///
/// Stories are delimited by `# newdoc id = <id>` comments; sentences that
/// appear before the first such comment form a story named `doc-0`. The
/// NER tag is read from the MISC column (`NER=PERSON`), defaulting to `O`.
/// Multiword-token ranges (`3-4`) and empty nodes (`5.1`) are skipped.
pub fn parse_conllu(text: &str) -> Result<Corpus> {
    let mut stories: Vec<Story> = Vec::new();
    let mut pending: Vec<(usize, Token)> = Vec::new();
    let mut raw_text: Option<String> = None;

    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut stories, &mut pending, &mut raw_text)?;
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(rest) = comment.strip_prefix("newdoc") {
                flush(&mut stories, &mut pending, &mut raw_text)?;
                let id = comment_value(rest, "id")
                    .unwrap_or_else(|| format!("doc-{}", stories.len()));
                if stories.iter().any(|s| s.id == id) {
                    return Err(Error::parse(line_no, format!("duplicate story id {id}")));
                }
                stories.push(Story {
                    id,
                    sentences: Vec::new(),
                });
            } else if let Some(value) = comment_value(comment, "text") {
                raw_text = Some(value);
            }
            continue;
        }
        if let Some(token) = parse_token_line(line, line_no)? {
            pending.push((line_no, token));
        }
    }
    flush(&mut stories, &mut pending, &mut raw_text)?;
    Corpus::new(stories)
}

/// `key = value` or `key=value` inside a comment.
fn comment_value(comment: &str, key: &str) -> Option<String> {
    let rest = comment.trim().strip_prefix(key)?;
    let value = rest.trim_start().strip_prefix('=')?;
    Some(value.trim().to_string())
}

fn parse_token_line(line: &str, line_no: usize) -> Result<Option<Token>> {
    let fields: Vec<&str> = line.split('\t').collect();
    if fields.len() != 10 {
        return Err(Error::parse(
            line_no,
            format!("expected 10 tab-separated fields, found {}", fields.len()),
        ));
    }
    if fields[0].contains('-') || fields[0].contains('.') {
        return Ok(None);
    }
    let index = fields[0]
        .parse::<usize>()
        .map_err(|_| Error::parse(line_no, format!("bad token id {:?}", fields[0])))?;
    let head = fields[6]
        .parse::<usize>()
        .map_err(|_| Error::parse(line_no, format!("bad head {:?}", fields[6])))?;
    let ner = fields[9]
        .split('|')
        .find_map(|item| item.strip_prefix("NER="))
        .unwrap_or(NER_OUTSIDE)
        .to_string();
    Ok(Some(Token {
        index,
        surface: fields[1].to_string(),
        lemma: fields[2].to_string(),
        upos: fields[3].to_string(),
        head,
        deprel: fields[7].to_string(),
        ner,
    }))
}

fn flush(
    stories: &mut Vec<Story>,
    pending: &mut Vec<(usize, Token)>,
    raw_text: &mut Option<String>,
) -> Result<()> {
    if pending.is_empty() {
        *raw_text = None;
        return Ok(());
    }
    let n = pending.len();
    for (k, (line_no, t)) in pending.iter().enumerate() {
        if t.index != k + 1 {
            return Err(Error::parse(
                *line_no,
                format!("token id {} out of sequence (expected {})", t.index, k + 1),
            ));
        }
        if t.head > n {
            return Err(Error::parse(
                *line_no,
                format!("head {} out of range for {n}-token sentence", t.head),
            ));
        }
    }
    let first_line = pending[0].0;
    if stories.is_empty() {
        stories.push(Story {
            id: "doc-0".into(),
            sentences: Vec::new(),
        });
    }
    let story = stories.last_mut().expect("story pushed above");
    let tokens: Vec<Token> = pending.drain(..).map(|(_, t)| t).collect();
    let raw = raw_text
        .take()
        .unwrap_or_else(|| detokenize(&tokens.iter().map(|t| &t.surface).collect::<Vec<_>>()));
    let sentence = ParsedSentence {
        tokens,
        story_id: story.id.clone(),
        position: story.sentences.len(),
        raw_text: raw,
    };
    sentence
        .validate()
        .map_err(|e| Error::parse(first_line, e.to_string()))?;
    story.sentences.push(sentence);
    Ok(())
}

/// Serializes a corpus as CoNLL-U. XPOS, FEATS and DEPS are written as `_`;
/// NER tags other than `O` go to MISC.
pub fn write_conllu(corpus: &Corpus) -> String {
    let mut out = String::new();
    for story in &corpus.stories {
        let _ = writeln!(out, "# newdoc id = {}", story.id);
        for s in &story.sentences {
            let _ = writeln!(out, "# sent_id = {}-{}", story.id, s.position);
            let _ = writeln!(out, "# text = {}", s.raw_text);
            for t in &s.tokens {
                let misc = if t.ner == NER_OUTSIDE {
                    "_".to_string()
                } else {
                    format!("NER={}", t.ner)
                };
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\t{}\t_\t_\t{}\t{}\t_\t{}",
                    t.index, t.surface, t.lemma, t.upos, t.head, t.deprel, misc
                );
            }
            out.push('\n');
        }
    }
    out
}
