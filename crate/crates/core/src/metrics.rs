//! Character-aware reference/hypothesis alignment and error rates.
//!
//! The aligner minimizes word-level errors first and, among word-optimal
//! alignments, the summed character edit distance of substituted pairs.
//! Both criteria are integers, so the DP is exact. OOV-CER scores each
//! reference occurrence of an OOV word against its aligned hypothesis
//! word after merging immediately adjacent insertions into it.

use std::collections::BTreeSet;

use serde::Serialize;

/// Levenshtein distance with unit costs, over characters.
pub fn char_edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, &ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = diag + usize::from(ca != cb);
            diag = row[j + 1];
            row[j + 1] = sub.min(diag + 1).min(row[j] + 1);
        }
    }
    row[b.len()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairKind {
    Match,
    Substitution,
    Insertion,
    Deletion,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlignedPair {
    pub ref_word: Option<String>,
    pub hyp_word: Option<String>,
    pub kind: PairKind,
}

impl AlignedPair {
    fn matched(word: &str) -> Self {
        AlignedPair {
            ref_word: Some(word.to_string()),
            hyp_word: Some(word.to_string()),
            kind: PairKind::Match,
        }
    }

    fn substitution(r: &str, h: &str) -> Self {
        AlignedPair {
            ref_word: Some(r.to_string()),
            hyp_word: Some(h.to_string()),
            kind: PairKind::Substitution,
        }
    }

    fn insertion(h: &str) -> Self {
        AlignedPair {
            ref_word: None,
            hyp_word: Some(h.to_string()),
            kind: PairKind::Insertion,
        }
    }

    fn deletion(r: &str) -> Self {
        AlignedPair {
            ref_word: Some(r.to_string()),
            hyp_word: None,
            kind: PairKind::Deletion,
        }
    }
}

/// DP cost: word errors first, then summed character distance of
/// substitutions. Lexicographic and integer, so comparisons are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Cost(u32, u32);

impl Cost {
    const ZERO: Cost = Cost(0, 0);
    fn add(self, other: Cost) -> Cost {
        Cost(self.0 + other.0, self.1 + other.1)
    }
}

/// Aligns two word sequences. Deterministic: on exact cost ties an
/// insertion is preferred over a deletion over a substitution as the
/// later operation, which keeps split-word hypotheses next to the
/// reference word they split from.
pub fn align(ref_words: &[String], hyp_words: &[String]) -> Vec<AlignedPair> {
    let n = ref_words.len();
    let m = hyp_words.len();
    let idx = |i: usize, j: usize| i * (m + 1) + j;
    let mut cost = vec![Cost::ZERO; (n + 1) * (m + 1)];
    // 0 = stop, 1 = insertion (left), 2 = deletion (up), 3 = diagonal.
    let mut step = vec![0u8; (n + 1) * (m + 1)];
    for j in 1..=m {
        cost[idx(0, j)] = Cost(j as u32, 0);
        step[idx(0, j)] = 1;
    }
    for i in 1..=n {
        cost[idx(i, 0)] = Cost(i as u32, 0);
        step[idx(i, 0)] = 2;
    }
    for i in 1..=n {
        for j in 1..=m {
            let sub_cost = if ref_words[i - 1] == hyp_words[j - 1] {
                Cost::ZERO
            } else {
                Cost(
                    1,
                    char_edit_distance(&ref_words[i - 1], &hyp_words[j - 1]) as u32,
                )
            };
            let mut best = cost[idx(i, j - 1)].add(Cost(1, 0));
            let mut op = 1u8;
            let del = cost[idx(i - 1, j)].add(Cost(1, 0));
            if del < best {
                best = del;
                op = 2;
            }
            let diag = cost[idx(i - 1, j - 1)].add(sub_cost);
            if diag < best {
                best = diag;
                op = 3;
            }
            cost[idx(i, j)] = best;
            step[idx(i, j)] = op;
        }
    }
    let mut pairs = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        match step[idx(i, j)] {
            1 => {
                j -= 1;
                pairs.push(AlignedPair::insertion(&hyp_words[j]));
            }
            2 => {
                i -= 1;
                pairs.push(AlignedPair::deletion(&ref_words[i]));
            }
            _ => {
                i -= 1;
                j -= 1;
                if ref_words[i] == hyp_words[j] {
                    pairs.push(AlignedPair::matched(&ref_words[i]));
                } else {
                    pairs.push(AlignedPair::substitution(&ref_words[i], &hyp_words[j]));
                }
            }
        }
    }
    pairs.reverse();
    pairs
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ErrorCounts {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub ref_words: usize,
    pub char_edits: usize,
    pub ref_chars: usize,
    pub oov_char_edits: usize,
    pub oov_ref_chars: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OovDetail {
    pub ref_word: String,
    pub candidate: String,
    pub char_edits: usize,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ErrorReport {
    pub counts: ErrorCounts,
    pub per_oov: Vec<OovDetail>,
    #[serde(skip)]
    pub pairs: Vec<AlignedPair>,
}

impl ErrorReport {
    /// (substitutions + insertions + deletions) / reference words; absent
    /// for an empty reference.
    pub fn wer(&self) -> Option<f64> {
        if self.counts.ref_words == 0 {
            return None;
        }
        let errors = self.counts.substitutions + self.counts.insertions + self.counts.deletions;
        Some(errors as f64 / self.counts.ref_words as f64)
    }

    /// Character Levenshtein over the concatenated sentences (separators
    /// excluded) divided by reference characters.
    pub fn cer(&self) -> Option<f64> {
        if self.counts.ref_chars == 0 {
            return None;
        }
        Some(self.counts.char_edits as f64 / self.counts.ref_chars as f64)
    }

    /// Summed OOV character edits over summed OOV reference lengths;
    /// absent when the reference contains no OOV occurrence.
    pub fn oov_cer(&self) -> Option<f64> {
        if self.counts.oov_ref_chars == 0 {
            return None;
        }
        Some(self.counts.oov_char_edits as f64 / self.counts.oov_ref_chars as f64)
    }

    /// Accumulates another utterance's report into this one.
    pub fn merge(&mut self, other: &ErrorReport) {
        self.counts.substitutions += other.counts.substitutions;
        self.counts.insertions += other.counts.insertions;
        self.counts.deletions += other.counts.deletions;
        self.counts.ref_words += other.counts.ref_words;
        self.counts.char_edits += other.counts.char_edits;
        self.counts.ref_chars += other.counts.ref_chars;
        self.counts.oov_char_edits += other.counts.oov_char_edits;
        self.counts.oov_ref_chars += other.counts.oov_ref_chars;
        self.per_oov.extend(other.per_oov.iter().cloned());
    }
}

/// Scores one utterance. Each reference occurrence of an OOV word is
/// paired with its aligned hypothesis word; hypothesis words aligned to
/// nothing right next to it are prepended (left side) or appended (right
/// side) before the character distance is taken. Each insertion merges
/// into at most one occurrence, consumed left to right.
pub fn score(ref_words: &[String], hyp_words: &[String], oov_words: &BTreeSet<String>) -> ErrorReport {
    let pairs = align(ref_words, hyp_words);
    let mut counts = ErrorCounts {
        ref_words: ref_words.len(),
        ..Default::default()
    };
    for pair in &pairs {
        match pair.kind {
            PairKind::Match => {}
            PairKind::Substitution => counts.substitutions += 1,
            PairKind::Insertion => counts.insertions += 1,
            PairKind::Deletion => counts.deletions += 1,
        }
    }
    let ref_joined: String = ref_words.concat();
    let hyp_joined: String = hyp_words.concat();
    counts.char_edits = char_edit_distance(&ref_joined, &hyp_joined);
    counts.ref_chars = ref_joined.chars().count();

    let mut per_oov = Vec::new();
    let mut consumed = vec![false; pairs.len()];
    for (i, pair) in pairs.iter().enumerate() {
        let ref_word = match &pair.ref_word {
            Some(w) if oov_words.contains(w) => w,
            _ => continue,
        };
        let mut candidate = String::new();
        // Adjacent insertions to the left, nearest last, unless an earlier
        // occurrence already claimed them.
        let mut left = Vec::new();
        let mut k = i;
        while k > 0 && pairs[k - 1].kind == PairKind::Insertion && !consumed[k - 1] {
            left.push(k - 1);
            k -= 1;
        }
        for &k in left.iter().rev() {
            consumed[k] = true;
            candidate.push_str(pairs[k].hyp_word.as_deref().unwrap_or(""));
        }
        candidate.push_str(pair.hyp_word.as_deref().unwrap_or(""));
        let mut k = i + 1;
        while k < pairs.len() && pairs[k].kind == PairKind::Insertion && !consumed[k] {
            consumed[k] = true;
            candidate.push_str(pairs[k].hyp_word.as_deref().unwrap_or(""));
            k += 1;
        }
        let char_edits = char_edit_distance(ref_word, &candidate);
        counts.oov_char_edits += char_edits;
        counts.oov_ref_chars += ref_word.chars().count();
        per_oov.push(OovDetail {
            ref_word: ref_word.clone(),
            candidate,
            char_edits,
        });
    }

    ErrorReport {
        counts,
        per_oov,
        pairs,
    }
}
