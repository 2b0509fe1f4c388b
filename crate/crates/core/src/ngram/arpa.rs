//! ARPA text format parsing (base-10 logs).

use std::collections::HashSet;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ArpaError {
    #[error("missing \\data\\ header")]
    MissingData,
    #[error("missing \\end\\ marker")]
    MissingEnd,
    #[error("malformed line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("header declares {declared} {order}-grams but section has {found}")]
    CountMismatch {
        order: usize,
        declared: usize,
        found: usize,
    },
    #[error("{order}-gram section present but not declared in the header")]
    UndeclaredSection { order: usize },
    #[error("dangling history: {0:?} has no stored {1}-gram prefix")]
    DanglingHistory(String, usize),
}

#[derive(Debug, Clone)]
pub struct NgramEntry {
    pub tokens: Vec<String>,
    pub log_prob10: f64,
    pub backoff10: Option<f64>,
}

/// A parsed backoff model. Entries keep file order per section; every
/// k-gram's first k-1 tokens are guaranteed to exist as a (k-1)-gram.
#[derive(Debug, Clone)]
pub struct ArpaModel {
    order: usize,
    ngrams: Vec<Vec<NgramEntry>>,
}

impl ArpaModel {
    pub fn order(&self) -> usize {
        self.order
    }

    /// All stored k-grams, 1-based `k`.
    pub fn ngrams(&self, k: usize) -> &[NgramEntry] {
        &self.ngrams[k - 1]
    }

    pub fn lookup(&self, tokens: &[&str]) -> Option<&NgramEntry> {
        if tokens.is_empty() || tokens.len() > self.order {
            return None;
        }
        self.ngrams(tokens.len())
            .iter()
            .find(|e| e.tokens.iter().map(String::as_str).eq(tokens.iter().copied()))
    }

    /// Vocabulary in file order: every distinct unigram token.
    pub fn vocab(&self) -> Vec<&str> {
        self.ngrams(1).iter().map(|e| e.tokens[0].as_str()).collect()
    }

    pub fn parse(text: &str) -> Result<Self, ArpaError> {
        #[derive(PartialEq)]
        enum Section {
            Preamble,
            Counts,
            Grams(usize),
            Done,
        }

        let mut declared: Vec<(usize, usize)> = Vec::new();
        let mut ngrams: Vec<Vec<NgramEntry>> = Vec::new();
        let mut section = Section::Preamble;

        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let malformed = || ArpaError::MalformedLine {
                line: idx + 1,
                text: line.to_string(),
            };
            if line.is_empty() {
                continue;
            }
            if line == "\\data\\" {
                section = Section::Counts;
                continue;
            }
            if line == "\\end\\" {
                section = Section::Done;
                continue;
            }
            if let Some(rest) = line.strip_suffix("-grams:") {
                let rest = rest.strip_prefix('\\').ok_or_else(malformed)?;
                let order: usize = rest.parse().map_err(|_| malformed())?;
                if section == Section::Preamble {
                    return Err(ArpaError::MissingData);
                }
                if !declared.iter().any(|&(k, _)| k == order) {
                    return Err(ArpaError::UndeclaredSection { order });
                }
                while ngrams.len() < order {
                    ngrams.push(Vec::new());
                }
                section = Section::Grams(order);
                continue;
            }
            match section {
                Section::Preamble => continue,
                Section::Counts => {
                    let rest = line.strip_prefix("ngram ").ok_or_else(malformed)?;
                    let (order, count) = rest.split_once('=').ok_or_else(malformed)?;
                    let order: usize = order.trim().parse().map_err(|_| malformed())?;
                    let count: usize = count.trim().parse().map_err(|_| malformed())?;
                    declared.push((order, count));
                }
                Section::Grams(order) => {
                    let fields: Vec<&str> = line.split_whitespace().collect();
                    if fields.len() != order + 1 && fields.len() != order + 2 {
                        return Err(malformed());
                    }
                    let log_prob10: f64 = fields[0].parse().map_err(|_| malformed())?;
                    let tokens: Vec<String> =
                        fields[1..=order].iter().map(|s| s.to_string()).collect();
                    let backoff10 = match fields.get(order + 1) {
                        Some(b) => Some(b.parse().map_err(|_| malformed())?),
                        None => None,
                    };
                    ngrams[order - 1].push(NgramEntry {
                        tokens,
                        log_prob10,
                        backoff10,
                    });
                }
                Section::Done => continue,
            }
        }

        if declared.is_empty() {
            return Err(ArpaError::MissingData);
        }
        if section != Section::Done {
            return Err(ArpaError::MissingEnd);
        }
        let order = declared.iter().map(|&(k, _)| k).max().unwrap();
        while ngrams.len() < order {
            ngrams.push(Vec::new());
        }
        for &(k, count) in &declared {
            let found = ngrams[k - 1].len();
            if found != count {
                return Err(ArpaError::CountMismatch {
                    order: k,
                    declared: count,
                    found,
                });
            }
        }

        // Closure under history: each k-gram's first k-1 tokens must be a
        // stored (k-1)-gram.
        for k in 2..=order {
            let lower: HashSet<&[String]> =
                ngrams[k - 2].iter().map(|e| e.tokens.as_slice()).collect();
            for entry in &ngrams[k - 1] {
                if !lower.contains(&entry.tokens[..k - 1]) {
                    return Err(ArpaError::DanglingHistory(entry.tokens.join(" "), k - 1));
                }
            }
        }

        Ok(ArpaModel { order, ngrams })
    }
}
