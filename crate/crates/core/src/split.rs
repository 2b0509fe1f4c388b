//! High-OOV train/test splits from an utterance manifest.
//!
//! Test = every utterance containing at least one word outside the
//! vocabulary; train = the remainder minus utterances whose speaker also
//! appears in test. Text is expected to be normalized already; a
//! normalization pre-pass (lowercase, strip leading/trailing punctuation
//! per token) is provided separately.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SplitError {
    #[error("malformed manifest line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("duplicate utterance id {0:?}")]
    DuplicateId(String),
    #[error("manifest is empty")]
    EmptyManifest,
    #[error("vocabulary is empty")]
    EmptyVocab,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Utterance {
    pub id: String,
    pub speaker: String,
    pub duration: Option<f64>,
    pub words: Vec<String>,
}

/// Lowercases a token and strips leading/trailing ASCII punctuation.
/// Returns None when nothing is left.
pub fn normalize_token(token: &str) -> Option<String> {
    let stripped = token.trim_matches(|c: char| c.is_ascii_punctuation());
    if stripped.is_empty() {
        None
    } else {
        Some(stripped.to_lowercase())
    }
}

pub fn normalize_text(text: &str) -> Vec<String> {
    text.split_whitespace().filter_map(normalize_token).collect()
}

/// Parses "utt_id<TAB>speaker<TAB>duration<TAB>transcript" lines; the
/// duration field may be empty.
pub fn parse_manifest(text: &str, normalize: bool) -> Result<Vec<Utterance>, SplitError> {
    let mut utterances = Vec::new();
    let mut seen = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let malformed = || SplitError::MalformedLine {
            line: idx + 1,
            text: raw.to_string(),
        };
        let fields: Vec<&str> = raw.splitn(4, '\t').collect();
        if fields.len() != 4 {
            return Err(malformed());
        }
        let id = fields[0].trim().to_string();
        if id.is_empty() {
            return Err(malformed());
        }
        if !seen.insert(id.clone()) {
            return Err(SplitError::DuplicateId(id));
        }
        let duration = match fields[2].trim() {
            "" => None,
            d => Some(d.parse().map_err(|_| malformed())?),
        };
        let words = if normalize {
            normalize_text(fields[3])
        } else {
            fields[3].split_whitespace().map(str::to_string).collect()
        };
        utterances.push(Utterance {
            id,
            speaker: fields[1].trim().to_string(),
            duration,
            words,
        });
    }
    Ok(utterances)
}

pub fn write_manifest(utterances: &[Utterance]) -> String {
    let mut out = String::new();
    for utt in utterances {
        let duration = utt
            .duration
            .map(|d| format!("{d}"))
            .unwrap_or_default();
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            utt.id,
            utt.speaker,
            duration,
            utt.words.join(" ")
        ));
    }
    out
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitResult {
    pub train: Vec<Utterance>,
    pub test: Vec<Utterance>,
    /// Utterances dropped from train because their speaker is in test.
    pub excluded: Vec<Utterance>,
    /// OOV word -> occurrence count over the test set.
    pub oov_types: BTreeMap<String, u64>,
}

impl SplitResult {
    pub fn test_tokens(&self) -> usize {
        self.test.iter().map(|u| u.words.len()).sum()
    }

    pub fn oov_tokens(&self) -> u64 {
        self.oov_types.values().sum()
    }

    /// OOV tokens / total test tokens; absent when test is empty.
    pub fn oov_token_ratio(&self) -> Option<f64> {
        let total = self.test_tokens();
        if total == 0 {
            return None;
        }
        Some(self.oov_tokens() as f64 / total as f64)
    }

    /// OOV types / total distinct test words; absent when test is empty.
    pub fn oov_type_ratio(&self) -> Option<f64> {
        let types: BTreeSet<&str> = self
            .test
            .iter()
            .flat_map(|u| u.words.iter().map(String::as_str))
            .collect();
        if types.is_empty() {
            return None;
        }
        Some(self.oov_types.len() as f64 / types.len() as f64)
    }

    fn hours(utts: &[Utterance]) -> Option<f64> {
        let durations: Vec<f64> = utts.iter().filter_map(|u| u.duration).collect();
        if durations.len() != utts.len() || utts.is_empty() {
            return None;
        }
        Some(durations.iter().sum::<f64>() / 3600.0)
    }

    pub fn train_hours(&self) -> Option<f64> {
        Self::hours(&self.train)
    }

    pub fn test_hours(&self) -> Option<f64> {
        Self::hours(&self.test)
    }
}

/// Splits a manifest against a vocabulary. Output order is independent of
/// manifest order (stable sort by utterance id).
pub fn make_split(
    manifest: &[Utterance],
    vocab: &BTreeSet<String>,
) -> Result<SplitResult, SplitError> {
    if manifest.is_empty() {
        return Err(SplitError::EmptyManifest);
    }
    if vocab.is_empty() {
        return Err(SplitError::EmptyVocab);
    }
    let mut sorted: Vec<&Utterance> = manifest.iter().collect();
    sorted.sort_by(|a, b| a.id.cmp(&b.id));

    let mut test = Vec::new();
    let mut rest = Vec::new();
    let mut oov_types: BTreeMap<String, u64> = BTreeMap::new();
    for utt in sorted {
        let oov: Vec<&String> = utt.words.iter().filter(|w| !vocab.contains(*w)).collect();
        if oov.is_empty() {
            rest.push(utt.clone());
        } else {
            for word in oov {
                *oov_types.entry(word.clone()).or_insert(0) += 1;
            }
            test.push(utt.clone());
        }
    }
    let test_speakers: HashSet<&str> = test.iter().map(|u| u.speaker.as_str()).collect();
    let (excluded, train): (Vec<Utterance>, Vec<Utterance>) = rest
        .into_iter()
        .partition(|u| test_speakers.contains(u.speaker.as_str()));
    Ok(SplitResult {
        train,
        test,
        excluded,
        oov_types,
    })
}

/// Text report: header stats, then "word count" lines sorted by count
/// descending and lexicographically within ties.
pub fn oov_report(split: &SplitResult) -> String {
    let mut out = String::new();
    out.push_str(&format!("# test_utterances {}\n", split.test.len()));
    out.push_str(&format!("# train_utterances {}\n", split.train.len()));
    out.push_str(&format!("# excluded_utterances {}\n", split.excluded.len()));
    out.push_str(&format!("# oov_type_count {}\n", split.oov_types.len()));
    match split.oov_token_ratio() {
        Some(r) => out.push_str(&format!("# oov_token_ratio {r:.3}\n")),
        None => out.push_str("# oov_token_ratio absent\n"),
    }
    match split.oov_type_ratio() {
        Some(r) => out.push_str(&format!("# oov_type_ratio {r:.3}\n")),
        None => out.push_str("# oov_type_ratio absent\n"),
    }
    if let Some(h) = split.train_hours() {
        out.push_str(&format!("# train_hours {h:.3}\n"));
    }
    if let Some(h) = split.test_hours() {
        out.push_str(&format!("# test_hours {h:.3}\n"));
    }
    let mut types: Vec<(&String, &u64)> = split.oov_types.iter().collect();
    types.sort_by(|a, b| b.1.cmp(a.1).then(a.0.cmp(b.0)));
    for (word, count) in types {
        out.push_str(&format!("{word} {count}\n"));
    }
    out
}
