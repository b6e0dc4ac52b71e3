//! Princeton WordNet 3.x database files (`index.*`, `data.*`, `*.exc`).
//!
//! Only what generalization needs is kept: synset member words, hypernym
//! pointers (`@` and `@i`, same part of speech), the lemma index in sense
//! order and the morphological exception lists.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn as_char(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
        }
    }

    pub fn from_char(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' | 's' => Some(Pos::Adj),
            'r' => Some(Pos::Adv),
            _ => None,
        }
    }

    fn file_suffix(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

/// A synset rendered as `lemma.pos.NN`, e.g. `car.n.01`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SynsetId {
    pub lemma: String,
    pub pos: Pos,
    pub sense: u32,
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{:02}", self.lemma, self.pos.as_char(), self.sense)
    }
}

fn synset_grammar() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"^[a-z0-9_'.-]+\.[nvar]\.[0-9]{2}$").unwrap())
}

impl SynsetId {
    /// True if `s` has the `word.pos.NN` shape.
    pub fn is_rendering(s: &str) -> bool {
        synset_grammar().is_match(s)
    }

    /// Head lemma with underscores turned into spaces.
    pub fn display_lemma(&self) -> String {
        self.lemma.replace('_', " ")
    }
}

impl FromStr for SynsetId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if !Self::is_rendering(s) {
            return Err(Error::invalid(format!("not a synset id: {s:?}")));
        }
        let mut parts = s.rsplitn(3, '.');
        let sense = parts.next().unwrap_or_default();
        let pos = parts.next().unwrap_or_default();
        let lemma = parts.next().unwrap_or_default();
        Ok(SynsetId {
            lemma: lemma.to_string(),
            pos: pos.chars().next().and_then(Pos::from_char).expect("grammar checked"),
            sense: sense.parse().expect("grammar checked"),
        })
    }
}

#[derive(Clone, Debug)]
struct Synset {
    words: Vec<String>,
    hypernyms: Vec<u32>,
}

#[derive(Clone, Debug, Default)]
struct PosTables {
    synsets: HashMap<u32, Synset>,
    /// Lemma -> synset offsets in sense order.
    lemmas: HashMap<String, Vec<u32>>,
    exceptions: HashMap<String, Vec<String>>,
}

#[derive(Clone, Debug, Default)]
pub struct WordNetIndex {
    tables: [PosTables; 4],
}

/// Normalizes a query word to WordNet's lemma spelling.
fn normalize(word: &str) -> String {
    word.trim().to_lowercase().replace(' ', "_")
}

impl WordNetIndex {
    /// Loads a WordNet database directory. Noun and verb `index`/`data`
    /// files are required; adjective/adverb files and exception lists are
    /// read when present.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::load(dir, "not a WordNet database directory"));
        }
        let mut index = WordNetIndex::default();
        for pos in Pos::ALL {
            let required = matches!(pos, Pos::Noun | Pos::Verb);
            let data_path = dir.join(format!("data.{}", pos.file_suffix()));
            let index_path = dir.join(format!("index.{}", pos.file_suffix()));
            if !required && !(data_path.exists() && index_path.exists()) {
                continue;
            }
            let tables = &mut index.tables[pos.index()];
            tables.synsets = parse_data(&read(&data_path)?, pos)
                .map_err(|msg| Error::load(&data_path, msg))?;
            tables.lemmas =
                parse_index(&read(&index_path)?).map_err(|msg| Error::load(&index_path, msg))?;
            let exc_path = dir.join(format!("{}.exc", pos.file_suffix()));
            if exc_path.exists() {
                tables.exceptions = parse_exceptions(&read(&exc_path)?);
            }
            check_acyclic(tables).map_err(|msg| Error::load(&data_path, msg))?;
        }
        Ok(index)
    }

    fn table(&self, pos: Pos) -> &PosTables {
        &self.tables[pos.index()]
    }

    pub fn synset_count(&self, pos: Pos) -> usize {
        self.table(pos).synsets.len()
    }

    /// True if the exact lemma appears in the index for `pos`.
    pub fn contains(&self, lemma: &str, pos: Pos) -> bool {
        self.table(pos).lemmas.contains_key(&normalize(lemma))
    }

    /// First (most frequent) sense of an indexed lemma. No morphology is
    /// applied; see [`WordNetIndex::morphy`].
    pub fn lookup(&self, lemma: &str, pos: Pos) -> Option<SynsetId> {
        let offset = self.first_offset(&normalize(lemma), pos)?;
        self.synset_id(offset, pos)
    }

    fn first_offset(&self, lemma: &str, pos: Pos) -> Option<u32> {
        let table = self.table(pos);
        // dangling offsets (possible in excerpts) are skipped
        table
            .lemmas
            .get(lemma)?
            .iter()
            .copied()
            .find(|o| table.synsets.contains_key(o))
    }

    fn synset_id(&self, offset: u32, pos: Pos) -> Option<SynsetId> {
        let table = self.table(pos);
        let head = table.synsets.get(&offset)?.words.first()?;
        let head = strip_marker(head).to_lowercase();
        let sense = table
            .lemmas
            .get(&head)
            .and_then(|offs| offs.iter().position(|&o| o == offset))
            .map_or(1, |p| p as u32 + 1);
        Some(SynsetId {
            lemma: head,
            pos,
            sense,
        })
    }

    /// Base forms of `word` present in the index, in preference order:
    /// exception-list entries first, then the word itself, then the
    /// results of WordNet's suffix detachment rules.
    pub fn morphy(&self, word: &str, pos: Pos) -> Vec<String> {
        let word = normalize(word);
        let table = self.table(pos);
        let mut candidates = Vec::new();
        if let Some(bases) = table.exceptions.get(&word) {
            candidates.push(word.clone());
            candidates.extend(bases.iter().cloned());
        } else {
            candidates.push(word.clone());
            for (suffix, ending) in detachment_rules(pos) {
                if let Some(stem) = word.strip_suffix(suffix) {
                    if !stem.is_empty() {
                        candidates.push(format!("{stem}{ending}"));
                    }
                }
            }
        }
        let mut out: Vec<String> = Vec::new();
        for c in candidates {
            if table.lemmas.contains_key(&c) && !out.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    /// Preferred base form, if any: the word itself when indexed, else the
    /// first morphological candidate.
    pub fn lemmatize(&self, word: &str, pos: Pos) -> Option<String> {
        let forms = self.morphy(word, pos);
        let norm = normalize(word);
        if forms.contains(&norm) && !self.table(pos).exceptions.contains_key(&norm) {
            return Some(norm);
        }
        forms.into_iter().find(|f| *f != norm).or_else(|| {
            self.table(pos)
                .lemmas
                .contains_key(&norm)
                .then_some(norm)
        })
    }

    /// Walks `levels` first-hypernym links up from the first sense of
    /// `lemma`.
    ///
    /// When the chain is too short the walk stops at the deepest ancestor
    /// strictly below the hierarchy root; a synset whose only ancestor is
    /// the root (or that is the root) is returned unchanged. The lemma is
    /// lemmatized first when it is not indexed as given.
    pub fn hypernym_ancestor(&self, lemma: &str, pos: Pos, levels: usize) -> Option<SynsetId> {
        let base = self.lemmatize(lemma, pos)?;
        let start = self.first_offset(&base, pos)?;
        let path = self.hypernym_path(start, pos);
        let depth_to_root = path.len() - 1;
        let pick = if levels < depth_to_root {
            levels
        } else {
            depth_to_root.saturating_sub(1)
        };
        self.synset_id(path[pick], pos)
    }

    /// First-hypernym chain from `start` up to a synset without hypernyms.
    fn hypernym_path(&self, start: u32, pos: Pos) -> Vec<u32> {
        let table = self.table(pos);
        let mut path = vec![start];
        let mut current = start;
        while let Some(&next) = table
            .synsets
            .get(&current)
            .and_then(|s| s.hypernyms.first())
        {
            if !table.synsets.contains_key(&next) || path.contains(&next) {
                break;
            }
            path.push(next);
            current = next;
        }
        path
    }
}

fn strip_marker(word: &str) -> &str {
    // Adjective entries carry syntactic markers such as "(a)" or "(p)".
    match word.find('(') {
        Some(i) if word.ends_with(')') => &word[..i],
        _ => word,
    }
}

fn detachment_rules(pos: Pos) -> &'static [(&'static str, &'static str)] {
    match pos {
        Pos::Noun => &[
            ("s", ""),
            ("ses", "s"),
            ("xes", "x"),
            ("zes", "z"),
            ("ches", "ch"),
            ("shes", "sh"),
            ("men", "man"),
            ("ies", "y"),
        ],
        Pos::Verb => &[
            ("s", ""),
            ("ies", "y"),
            ("es", "e"),
            ("es", ""),
            ("ed", "e"),
            ("ed", ""),
            ("ing", "e"),
            ("ing", ""),
        ],
        Pos::Adj => &[("er", ""), ("est", ""), ("er", "e"), ("est", "e")],
        Pos::Adv => &[],
    }
}

fn read(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::load(path, e.to_string()))?;
    // The Princeton files are Latin-1; every byte maps to one char.
    Ok(match String::from_utf8(bytes) {
        Ok(s) => s,
        Err(e) => e.into_bytes().iter().map(|&b| b as char).collect(),
    })
}

fn is_license_line(line: &str) -> bool {
    line.starts_with("  ") || line.trim().is_empty()
}

fn parse_data(text: &str, pos: Pos) -> std::result::Result<HashMap<u32, Synset>, String> {
    let mut synsets = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if is_license_line(line) {
            continue;
        }
        let body = line.split(" | ").next().unwrap_or(line);
        let f: Vec<&str> = body.split_whitespace().collect();
        let bad = |what: &str| format!("line {}: {what}", i + 1);
        if f.len() < 6 {
            return Err(bad("truncated synset record"));
        }
        let offset: u32 = f[0].parse().map_err(|_| bad("bad synset offset"))?;
        let w_cnt = usize::from_str_radix(f[3], 16).map_err(|_| bad("bad word count"))?;
        let words_end = 4 + 2 * w_cnt;
        if f.len() <= words_end {
            return Err(bad("word list runs past end of record"));
        }
        let words = (0..w_cnt).map(|k| f[4 + 2 * k].to_string()).collect();
        let p_cnt: usize = f[words_end].parse().map_err(|_| bad("bad pointer count"))?;
        if f.len() < words_end + 1 + 4 * p_cnt {
            return Err(bad("pointer list runs past end of record"));
        }
        let mut hypernyms = Vec::new();
        for k in 0..p_cnt {
            let p = &f[words_end + 1 + 4 * k..words_end + 5 + 4 * k];
            let same_pos = p[2].chars().next().and_then(Pos::from_char) == Some(pos);
            if (p[0] == "@" || p[0] == "@i") && same_pos {
                hypernyms.push(p[1].parse().map_err(|_| bad("bad pointer offset"))?);
            }
        }
        synsets.insert(offset, Synset { words, hypernyms });
    }
    Ok(synsets)
}

fn parse_index(text: &str) -> std::result::Result<HashMap<String, Vec<u32>>, String> {
    let mut lemmas = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        if is_license_line(line) {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let bad = |what: &str| format!("line {}: {what}", i + 1);
        if f.len() < 4 {
            return Err(bad("truncated index record"));
        }
        let synset_cnt: usize = f[2].parse().map_err(|_| bad("bad synset count"))?;
        let p_cnt: usize = f[3].parse().map_err(|_| bad("bad pointer count"))?;
        let first = 4 + p_cnt + 2;
        if f.len() != first + synset_cnt || synset_cnt == 0 {
            return Err(bad("synset offset count does not match header"));
        }
        let offsets = f[first..]
            .iter()
            .map(|o| o.parse::<u32>().map_err(|_| bad("bad synset offset")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        lemmas.insert(f[0].to_string(), offsets);
    }
    Ok(lemmas)
}

fn parse_exceptions(text: &str) -> HashMap<String, Vec<String>> {
    text.lines()
        .filter_map(|line| {
            let mut f = line.split_whitespace();
            let inflected = f.next()?;
            let bases: Vec<String> = f.map(str::to_string).collect();
            (!bases.is_empty()).then(|| (inflected.to_string(), bases))
        })
        .collect()
}

fn check_acyclic(tables: &PosTables) -> std::result::Result<(), String> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state: HashMap<u32, u8> = HashMap::with_capacity(tables.synsets.len());
    let mut offsets: Vec<u32> = tables.synsets.keys().copied().collect();
    offsets.sort_unstable();
    for start in offsets {
        if state.get(&start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack: Vec<(u32, usize)> = vec![(start, 0)];
        state.insert(start, 1);
        while let Some((node, next_child)) = stack.pop() {
            let children = tables
                .synsets
                .get(&node)
                .map_or(&[][..], |s| s.hypernyms.as_slice());
            if next_child < children.len() {
                stack.push((node, next_child + 1));
                let child = children[next_child];
                if !tables.synsets.contains_key(&child) {
                    continue;
                }
                match state.get(&child).copied().unwrap_or(0) {
                    0 => {
                        state.insert(child, 1);
                        stack.push((child, 0));
                    }
                    1 => return Err(format!("hypernym cycle through offset {child:08}")),
                    _ => {}
                }
            } else {
                state.insert(node, 2);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const DATA: &str = "  license line\n\
00000001 03 n 01 root 0 000 | top\n\
00000002 03 n 02 mid 0 middle 0 001 @ 00000001 n 0000 | middle\n\
00000003 03 n 01 leaf 0 001 @ 00000002 n 0000 | leaf\n\
00000004 03 n 01 twig 0 001 @ 00000003 n 0000 | twig\n";

    const INDEX: &str = "  license line\n\
leaf n 1 1 @ 1 0 00000003\n\
mid n 2 1 @ 2 0 00000009 00000002\n\
middle n 1 1 @ 1 0 00000002\n\
root n 1 0 1 0 00000001\n\
twig n 1 1 @ 1 0 00000004\n";

    fn tiny() -> WordNetIndex {
        let mut wn = WordNetIndex::default();
        let t = &mut wn.tables[Pos::Noun.index()];
        t.synsets = parse_data(DATA, Pos::Noun).unwrap();
        t.lemmas = parse_index(INDEX).unwrap();
        t.exceptions = parse_exceptions("twigs twig\n");
        wn
    }

    #[test]
    fn synset_rendering_and_parsing() {
        let id: SynsetId = "self-propelled_vehicle.n.01".parse().unwrap();
        assert_eq!(id.lemma, "self-propelled_vehicle");
        assert_eq!(id.pos, Pos::Noun);
        assert_eq!(id.sense, 1);
        assert_eq!(id.to_string(), "self-propelled_vehicle.n.01");
        assert!("car.n.1".parse::<SynsetId>().is_err());
        assert!(!SynsetId::is_rendering("escape-51.1"));
    }

    #[test]
    fn sense_number_comes_from_head_word_index() {
        let wn = tiny();
        // "mid" lists an unknown offset first, so its synset is sense 2
        assert_eq!(wn.lookup("middle", Pos::Noun).unwrap().to_string(), "mid.n.02");
    }

    #[test]
    fn ancestor_walk_and_shallow_fallback() {
        let wn = tiny();
        let up = |w: &str, l: usize| wn.hypernym_ancestor(w, Pos::Noun, l).unwrap().to_string();
        assert_eq!(up("twig", 2), "mid.n.02");
        assert_eq!(up("twig", 0), "twig.n.01");
        // chain twig->leaf->mid->root has 3 links: 3 levels would hit root
        assert_eq!(up("twig", 3), "mid.n.02");
        assert_eq!(up("leaf", 2), "mid.n.02");
        assert_eq!(up("mid", 2), "mid.n.02");
        assert_eq!(up("root", 2), "root.n.01");
        assert!(wn.hypernym_ancestor("qzx", Pos::Noun, 2).is_none());
    }

    #[test]
    fn exceptions_and_detachment() {
        let wn = tiny();
        assert_eq!(wn.lemmatize("twigs", Pos::Noun).as_deref(), Some("twig"));
        assert_eq!(wn.lemmatize("leaves", Pos::Noun), None);
        assert_eq!(wn.morphy("roots", Pos::Noun), vec!["root".to_string()]);
    }

    #[test]
    fn cycle_is_rejected() {
        let data = "00000001 03 n 01 a 0 001 @ 00000002 n 0000 | a\n\
00000002 03 n 01 b 0 001 @ 00000001 n 0000 | b\n";
        let tables = PosTables {
            synsets: parse_data(data, Pos::Noun).unwrap(),
            ..Default::default()
        };
        assert!(check_acyclic(&tables).is_err());
    }

    #[test]
    fn corrupt_records_are_reported() {
        assert!(parse_data("00000001 03 n 02 a 0 | x\n", Pos::Noun).is_err());
        assert!(parse_index("leaf n 2 0 1 0 00000003\n").is_err());
    }
}
