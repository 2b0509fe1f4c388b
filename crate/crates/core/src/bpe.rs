//! Byte-pair encoding: greedy merge training and tokenization.
//!
//! Words are symbolized as their characters followed by a separate
//! end-of-word marker symbol, so a token learned at a word boundary (say
//! "fox</w>") stays distinct from the same letters word-internally.
//! Training repeatedly merges the most frequent adjacent symbol pair,
//! breaking ties lexicographically, and stops when no pair occurs at
//! least twice. The marker convention is recorded in the model file
//! header so mismatched models fail loudly.

use std::collections::BTreeMap;

use thiserror::Error;

pub const DEFAULT_NUM_MERGES: usize = 5000;
pub const WORD_BOUNDARY_MARKER: &str = "</w>";

const FILE_HEADER_PREFIX: &str = "#bpe suffix-marker ";

#[derive(Debug, Error)]
pub enum BpeError {
    #[error("training corpus is empty")]
    EmptyCorpus,
    #[error("word {0:?} contains the boundary marker {1:?}")]
    MarkerInWord(String, String),
    #[error("bad model header; expected {FILE_HEADER_PREFIX:?}<marker> on the first line")]
    BadHeader,
    #[error("malformed merge line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("duplicate merge pair ({0} {1})")]
    DuplicateMerge(String, String),
}

/// An ordered merge list. Order is training order and doubles as the
/// priority order during tokenization.
#[derive(Debug, Clone, PartialEq)]
pub struct BpeModel {
    merges: Vec<(String, String)>,
    marker: String,
}

/// Trains a merge list on a word-frequency table.
pub fn train(corpus: &BTreeMap<String, u64>, num_merges: usize) -> Result<BpeModel, BpeError> {
    if corpus.is_empty() {
        return Err(BpeError::EmptyCorpus);
    }
    let marker = WORD_BOUNDARY_MARKER.to_string();
    let mut words: Vec<(Vec<String>, u64)> = Vec::with_capacity(corpus.len());
    for (word, &count) in corpus {
        if word.contains(marker.as_str()) {
            return Err(BpeError::MarkerInWord(word.clone(), marker));
        }
        let mut symbols: Vec<String> = word.chars().map(String::from).collect();
        symbols.push(marker.clone());
        words.push((symbols, count));
    }

    let mut merges = Vec::new();
    while merges.len() < num_merges {
        let mut counts: BTreeMap<(&str, &str), u64> = BTreeMap::new();
        for (symbols, count) in &words {
            for pair in symbols.windows(2) {
                *counts.entry((&pair[0], &pair[1])).or_insert(0) += count;
            }
        }
        // BTreeMap iterates pairs in lexicographic order, so the first
        // maximum is the tie-break winner.
        let best = counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&(l, r), &c)| (l.to_string(), r.to_string(), c));
        let (left, right, count) = match best {
            Some(b) => b,
            None => break,
        };
        if count < 2 {
            break;
        }
        for (symbols, _) in &mut words {
            merge_pass(symbols, &left, &right);
        }
        merges.push((left, right));
    }
    Ok(BpeModel { merges, marker })
}

/// One in-place pass replacing adjacent (left, right) with their
/// concatenation, repeated until stable.
fn merge_pass(symbols: &mut Vec<String>, left: &str, right: &str) {
    loop {
        let mut changed = false;
        let mut i = 0;
        while i + 1 < symbols.len() {
            if symbols[i] == left && symbols[i + 1] == right {
                let joined = format!("{}{}", symbols[i], symbols[i + 1]);
                symbols[i] = joined;
                symbols.remove(i + 1);
                changed = true;
            }
            i += 1;
        }
        if !changed {
            break;
        }
    }
}

impl BpeModel {
    pub fn from_merges(merges: Vec<(String, String)>) -> Result<Self, BpeError> {
        let mut seen = std::collections::HashSet::new();
        for (l, r) in &merges {
            if !seen.insert((l.clone(), r.clone())) {
                return Err(BpeError::DuplicateMerge(l.clone(), r.clone()));
            }
        }
        Ok(BpeModel {
            merges,
            marker: WORD_BOUNDARY_MARKER.to_string(),
        })
    }

    pub fn merges(&self) -> &[(String, String)] {
        &self.merges
    }

    pub fn marker(&self) -> &str {
        &self.marker
    }

    /// Splits a word into subword tokens: characters plus the boundary
    /// marker, merges applied in model order, and a still-unmerged
    /// trailing marker folded onto the final token. Concatenating the
    /// tokens (minus the marker) reproduces the word.
    pub fn tokenize(&self, word: &str) -> Vec<String> {
        if word.is_empty() {
            return Vec::new();
        }
        let mut symbols: Vec<String> = word.chars().map(String::from).collect();
        symbols.push(self.marker.clone());
        for (left, right) in &self.merges {
            merge_pass(&mut symbols, left, right);
        }
        if symbols.len() >= 2 && symbols.last().map(String::as_str) == Some(self.marker.as_str()) {
            let marker = symbols.pop().unwrap();
            symbols.last_mut().unwrap().push_str(&marker);
        }
        symbols
    }

    /// Inverse of [`tokenize`](Self::tokenize).
    pub fn detokenize(&self, tokens: &[String]) -> String {
        let joined: String = tokens.concat();
        match joined.strip_suffix(self.marker.as_str()) {
            Some(stripped) => stripped.to_string(),
            None => joined,
        }
    }

    /// Merge-list file: a header recording the marker convention, then one
    /// "left right" pair per line in priority order.
    pub fn write_text(&self) -> String {
        let mut out = format!("{FILE_HEADER_PREFIX}{}\n", self.marker);
        for (l, r) in &self.merges {
            out.push_str(l);
            out.push(' ');
            out.push_str(r);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, BpeError> {
        let mut lines = text.lines().enumerate();
        let marker = match lines.next() {
            Some((_, header)) => header
                .strip_prefix(FILE_HEADER_PREFIX)
                .ok_or(BpeError::BadHeader)?
                .trim()
                .to_string(),
            None => return Err(BpeError::BadHeader),
        };
        if marker.is_empty() {
            return Err(BpeError::BadHeader);
        }
        let mut merges = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (idx, raw) in lines {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (l, r) = match (fields.next(), fields.next(), fields.next()) {
                (Some(l), Some(r), None) => (l.to_string(), r.to_string()),
                _ => {
                    return Err(BpeError::MalformedLine {
                        line: idx + 1,
                        text: line.to_string(),
                    })
                }
            };
            if !seen.insert((l.clone(), r.clone())) {
                return Err(BpeError::DuplicateMerge(l, r));
            }
            merges.push((l, r));
        }
        Ok(BpeModel { merges, marker })
    }
}
