//! Rendering an ARPA model as a G acceptor and modifying it in place.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{ArpaModel, BiasConfig, BACKOFF_SYMBOL, SENTENCE_BEGIN, SENTENCE_END};
use crate::bpe::BpeModel;
use crate::fst::{Arc, Fst, Label, StateId, SymbolTable, Weight, EPSILON};

#[derive(Debug, Error)]
pub enum GError {
    #[error("token {0:?} absent from the symbol table")]
    TokenNotInSymbols(String),
    #[error("{0:?}: <s> may only appear sentence-initially")]
    MisplacedSentenceBegin(String),
    #[error("{0:?}: </s> may only appear sentence-finally")]
    MisplacedSentenceEnd(String),
    #[error("[unk] is not in the symbol table")]
    UnkNotInSymbols,
    #[error("no [unk] arcs found; is this the right G?")]
    NoUnkArcs,
    #[error("OOV word list is empty")]
    EmptyOovList,
    #[error("subword {0:?} has no unigram state; malformed G")]
    MissingUnigramState(String),
}

/// Converts a base-10 log probability to a cost in nats, guarding the
/// result against -0.0.
pub fn nats(log_prob10: f64) -> f64 {
    let w = -log_prob10 * std::f64::consts::LN_10;
    if w.abs() < 1e-12 {
        0.0
    } else {
        w
    }
}

/// A G acceptor with its state/history bookkeeping. Arc labels are word
/// ids in `word_syms`; backoff arcs carry the `#0` input symbol with an
/// epsilon output.
#[derive(Debug, Clone)]
pub struct GGraph {
    pub fst: Fst,
    pub word_syms: SymbolTable,
    pub backoff_state: StateId,
    histories: Vec<Vec<String>>,
    state_of: HashMap<Vec<String>, StateId>,
}

/// Builds the G acceptor. Every non-marker token must already be in
/// `syms`; `#0` is interned if missing. An ngram becomes a state when it
/// can be continued (it has a backoff weight or is the prefix history of
/// a stored longer ngram); arcs land on the state of the longest stored
/// suffix of the extended history.
pub fn arpa_to_g(model: &ArpaModel, syms: &SymbolTable) -> Result<GGraph, GError> {
    let order = model.order();
    for k in 1..=order {
        for entry in model.ngrams(k) {
            for (i, token) in entry.tokens.iter().enumerate() {
                match token.as_str() {
                    SENTENCE_BEGIN => {
                        if i != 0 {
                            return Err(GError::MisplacedSentenceBegin(entry.tokens.join(" ")));
                        }
                    }
                    SENTENCE_END => {
                        if i + 1 != entry.tokens.len() {
                            return Err(GError::MisplacedSentenceEnd(entry.tokens.join(" ")));
                        }
                    }
                    other => {
                        if !syms.contains(other) {
                            return Err(GError::TokenNotInSymbols(other.to_string()));
                        }
                    }
                }
            }
        }
    }

    let mut word_syms = syms.clone();
    word_syms.add_symbol(BACKOFF_SYMBOL);

    let mut graph = GGraph {
        fst: Fst::new(),
        word_syms,
        backoff_state: 0,
        histories: Vec::new(),
        state_of: HashMap::new(),
    };
    graph.new_state(Vec::new());
    for k in 1..order {
        let continuable: HashSet<&[String]> = model
            .ngrams(k + 1)
            .iter()
            .map(|e| &e.tokens[..k])
            .collect();
        for entry in model.ngrams(k) {
            if entry.backoff10.is_some() || continuable.contains(entry.tokens.as_slice()) {
                graph.new_state(entry.tokens.clone());
            }
        }
    }

    let mut has_sentence_end = false;
    for k in 1..=order {
        for entry in model.ngrams(k) {
            let last = entry.tokens[k - 1].as_str();
            match last {
                SENTENCE_BEGIN => continue,
                SENTENCE_END => {
                    has_sentence_end = true;
                    let src = graph
                        .state_of(&entry.tokens[..k - 1])
                        .expect("histories are closed");
                    graph
                        .fst
                        .set_final(src, Weight::new(nats(entry.log_prob10)));
                }
                _ => {
                    let src = graph
                        .state_of(&entry.tokens[..k - 1])
                        .expect("histories are closed");
                    let dst = graph.longest_suffix_state(&entry.tokens);
                    let label = graph.word_syms.label(last).expect("validated token");
                    graph.fst.add_arc(
                        src,
                        Arc::new(label, label, Weight::new(nats(entry.log_prob10)), dst),
                    );
                }
            }
        }
    }

    // Backoff arcs for every nonempty-history state.
    let backoff_label = graph.word_syms.label(BACKOFF_SYMBOL).unwrap();
    for state in 1..graph.histories.len() {
        let history = graph.histories[state].clone();
        let tokens: Vec<&str> = history.iter().map(String::as_str).collect();
        let entry = model.lookup(&tokens).expect("states come from stored ngrams");
        let weight = Weight::new(nats(entry.backoff10.unwrap_or(0.0)));
        let dst = graph.longest_suffix_state(&history[1..]);
        graph
            .fst
            .add_arc(state, Arc::new(backoff_label, EPSILON, weight, dst));
    }

    let start = graph
        .state_of(&[SENTENCE_BEGIN])
        .unwrap_or(graph.backoff_state);
    graph.fst.set_start(start);

    // A model with no </s> anywhere accepts sentence ends for free.
    if !has_sentence_end {
        for state in 0..graph.fst.num_states() {
            graph.fst.set_final(state, Weight::one());
        }
    }
    Ok(graph)
}

impl GGraph {
    fn new_state(&mut self, history: Vec<String>) -> StateId {
        let id = self.fst.add_state();
        self.state_of.insert(history.clone(), id);
        self.histories.push(history);
        id
    }

    /// The n-gram history a state represents.
    pub fn history_of(&self, state: StateId) -> Option<&[String]> {
        self.histories.get(state).map(Vec::as_slice)
    }

    pub fn state_of<S: AsRef<str>>(&self, history: &[S]) -> Option<StateId> {
        let key: Vec<String> = history.iter().map(|s| s.as_ref().to_string()).collect();
        self.state_of.get(&key).copied()
    }

    /// The state whose history is exactly `[token]`.
    pub fn unigram_state(&self, token: &str) -> Option<StateId> {
        self.state_of(&[token])
    }

    fn longest_suffix_state(&self, tokens: &[String]) -> StateId {
        for i in 0..tokens.len() {
            if let Some(&s) = self.state_of.get(&tokens[i..]) {
                return s;
            }
        }
        self.backoff_state
    }

    /// Replaces every `[unk]` arc with one arc per OOV word between the
    /// same states, each inheriting the former weight plus `cfg.penalty`.
    /// Returns the number of `[unk]` arcs replaced.
    pub fn replace_unk(&mut self, oov_words: &[String], cfg: &BiasConfig) -> Result<usize, GError> {
        if oov_words.is_empty() {
            return Err(GError::EmptyOovList);
        }
        let unk = self
            .word_syms
            .label(crate::lexicon::UNK_WORD)
            .ok_or(GError::UnkNotInSymbols)?;
        let total: usize = (0..self.fst.num_states())
            .map(|s| self.fst.arcs(s).iter().filter(|a| a.ilabel == unk).count())
            .sum();
        if total == 0 {
            return Err(GError::NoUnkArcs);
        }
        let labels: Vec<Label> = oov_words
            .iter()
            .map(|w| self.word_syms.add_symbol(w))
            .collect();
        for state in 0..self.fst.num_states() {
            let arcs = self.fst.arcs_mut(state);
            if !arcs.iter().any(|a| a.ilabel == unk) {
                continue;
            }
            let mut rebuilt = Vec::with_capacity(arcs.len());
            for arc in arcs.iter() {
                if arc.ilabel == unk {
                    for &label in &labels {
                        rebuilt.push(Arc::new(
                            label,
                            label,
                            Weight::new(arc.weight.value() + cfg.penalty),
                            arc.nextstate,
                        ));
                    }
                } else {
                    rebuilt.push(*arc);
                }
            }
            *arcs = rebuilt;
        }
        Ok(total)
    }

    /// Deterministic existence walk from the backoff state: follows the
    /// arc matching each label in turn, never taking backoff arcs. Returns
    /// the states reached (starting with the backoff state) and whether
    /// the whole sequence exists as explicit arcs.
    pub fn walk_sequence(&self, labels: &[Label]) -> (Vec<StateId>, bool) {
        let mut reached = vec![self.backoff_state];
        let mut current = self.backoff_state;
        for &label in labels {
            match self.fst.arcs(current).iter().find(|a| a.ilabel == label) {
                Some(arc) => {
                    current = arc.nextstate;
                    reached.push(current);
                }
                None => return (reached, false),
            }
        }
        (reached, true)
    }

    /// Biases the graph towards each OOV word's subword sequence: walking
    /// from the backoff state, existing arcs are discounted by
    /// `cfg.discount` (floored at 0) and missing ones added with weight
    /// `cfg.boost_cost`. A missing final arc lands on the last subword's
    /// unigram state; every state created along the way gets a `#0`
    /// backoff arc to the unigram state of the subword that led into it.
    pub fn mod_subwords(
        &mut self,
        oov_words: &[String],
        bpe: &BpeModel,
        cfg: &BiasConfig,
    ) -> Result<ModGReport, GError> {
        let tokenized: Vec<(String, Vec<String>)> = oov_words
            .iter()
            .map(|w| (w.clone(), bpe.tokenize(w)))
            .collect();
        self.mod_subwords_labeled(&tokenized, cfg)
    }

    /// Same surgery on pre-tokenized words. Words with subwords missing
    /// from the symbol table are reported and skipped; a subword without a
    /// unigram state is an error and leaves the graph untouched.
    pub fn mod_subwords_labeled(
        &mut self,
        words: &[(String, Vec<String>)],
        cfg: &BiasConfig,
    ) -> Result<ModGReport, GError> {
        let mut report = ModGReport::default();
        let mut accepted: Vec<(&String, &Vec<String>, Vec<Label>)> = Vec::new();
        for (word, tokens) in words {
            let mut labels = Vec::with_capacity(tokens.len());
            let mut missing = None;
            for token in tokens {
                match self.word_syms.label(token) {
                    Some(l) => labels.push(l),
                    None => {
                        missing = Some(token.clone());
                        break;
                    }
                }
            }
            match missing {
                Some(token) => report.skipped.push((word.clone(), token)),
                None => accepted.push((word, tokens, labels)),
            }
        }
        for (_, tokens, _) in &accepted {
            for token in tokens.iter() {
                if self.unigram_state(token).is_none() {
                    return Err(GError::MissingUnigramState(token.clone()));
                }
            }
        }

        let backoff_label = self
            .word_syms
            .label(BACKOFF_SYMBOL)
            .expect("interned at build");
        for (word, tokens, labels) in accepted {
            let n = labels.len();
            let mut current = self.backoff_state;
            for i in 0..n {
                let label = labels[i];
                let existing = self.fst.arcs(current).iter().position(|a| a.ilabel == label);
                match existing {
                    Some(idx) => {
                        let arc = &mut self.fst.arcs_mut(current)[idx];
                        arc.weight = Weight::new((arc.weight.value() - cfg.discount).max(0.0));
                        current = arc.nextstate;
                        report.arcs_discounted += 1;
                    }
                    None => {
                        let dst = if i + 1 == n {
                            self.unigram_state(&tokens[i]).expect("validated above")
                        } else {
                            let mut history = self.histories[current].clone();
                            history.push(tokens[i].clone());
                            let fresh = self.new_state(history);
                            let unigram = self.unigram_state(&tokens[i]).expect("validated above");
                            self.fst.add_arc(
                                fresh,
                                Arc::new(backoff_label, EPSILON, Weight::one(), unigram),
                            );
                            report.states_added += 1;
                            fresh
                        };
                        self.fst.add_arc(
                            current,
                            Arc::new(label, label, Weight::new(cfg.boost_cost), dst),
                        );
                        report.arcs_added += 1;
                        current = dst;
                    }
                }
            }
            report.modified.push(word.clone());
        }
        Ok(report)
    }
}

#[derive(Debug, Default, Clone)]
pub struct ModGReport {
    pub modified: Vec<String>,
    pub skipped: Vec<(String, String)>,
    pub arcs_added: usize,
    pub arcs_discounted: usize,
    pub states_added: usize,
}
