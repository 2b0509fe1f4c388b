//! Shared fixtures and independent oracles for the integration suites.
//! Everything here recomputes expectations from first principles and never
//! calls into the graph-construction code paths it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;

use oovfst::fst::{compose, shortest_path, EPS_SYMBOL};
use oovfst::ngram::{nats, SENTENCE_BEGIN, SENTENCE_END};
use oovfst::{Arc, ArpaModel, Fst, GGraph, LGraph, Label, LinearPath, SymbolTable, Weight};

/// Direct backoff evaluation straight off the parsed ARPA entries:
/// P(w|h) uses the longest stored ngram, otherwise backoff weight times
/// the shorter history, with backoff 1 for unstored histories.
pub fn arpa_sentence_cost(model: &ArpaModel, words: &[&str]) -> f64 {
    let mut history: Vec<String> = if model.lookup(&[SENTENCE_BEGIN]).is_some() {
        vec![SENTENCE_BEGIN.to_string()]
    } else {
        Vec::new()
    };
    let mut total = 0.0;
    for &word in words {
        total += conditional_cost(model, &history, word);
        history.push(word.to_string());
        while history.len() > model.order().saturating_sub(1) {
            history.remove(0);
        }
    }
    let has_end = (1..=model.order()).any(|k| {
        model
            .ngrams(k)
            .iter()
            .any(|e| e.tokens.last().map(String::as_str) == Some(SENTENCE_END))
    });
    if has_end {
        total += conditional_cost(model, &history, SENTENCE_END);
    }
    total
}

fn conditional_cost(model: &ArpaModel, history: &[String], word: &str) -> f64 {
    let mut start = 0;
    let mut backoff_total = 0.0;
    loop {
        let mut ngram: Vec<&str> = history[start..].iter().map(String::as_str).collect();
        ngram.push(word);
        if let Some(entry) = model.lookup(&ngram) {
            return backoff_total + nats(entry.log_prob10);
        }
        if start == history.len() {
            return f64::INFINITY;
        }
        let h: Vec<&str> = history[start..].iter().map(String::as_str).collect();
        if let Some(entry) = model.lookup(&h) {
            backoff_total += nats(entry.backoff10.unwrap_or(0.0));
        }
        start += 1;
    }
}

/// Acceptor for a label sequence with self-loops for every disambiguation
/// symbol, so `#0` backoff arcs and `#k` lexicon arcs can pass through
/// composition at every position.
pub fn acceptor_with_disambig_loops(labels: &[Label], syms: &SymbolTable) -> Fst {
    let disambig: Vec<Label> = syms
        .iter()
        .filter(|(_, name)| name.starts_with('#'))
        .map(|(id, _)| id)
        .collect();
    let mut fst = Fst::new();
    let mut cur = fst.add_state();
    fst.set_start(cur);
    for &d in &disambig {
        fst.add_arc(cur, Arc::new(d, d, Weight::one(), cur));
    }
    for &label in labels {
        let next = fst.add_state();
        fst.add_arc(cur, Arc::new(label, label, Weight::one(), next));
        cur = next;
        for &d in &disambig {
            fst.add_arc(cur, Arc::new(d, d, Weight::one(), cur));
        }
    }
    fst.set_final(cur, Weight::one());
    fst
}

pub fn labels_for(syms: &SymbolTable, tokens: &[&str]) -> Vec<Label> {
    tokens
        .iter()
        .map(|t| syms.label(t).unwrap_or_else(|| panic!("symbol {t} missing")))
        .collect()
}

/// Shortest-path cost of a sentence through G, or None when G rejects it.
pub fn g_sentence_cost(g: &GGraph, sentence: &[&str]) -> Option<f64> {
    let labels: Option<Vec<Label>> = sentence.iter().map(|w| g.word_syms.label(w)).collect();
    let acceptor = acceptor_with_disambig_loops(&labels?, &g.word_syms);
    let composed = compose(&acceptor, &g.fst);
    shortest_path(&composed).ok().map(|p| p.total_weight.value())
}

/// Shortest path for a phone string through a composed L.G, or None.
pub fn lg_phone_path(l: &LGraph, lg: &Fst, phones: &[&str]) -> Option<LinearPath> {
    let labels = labels_for(&l.phone_syms, phones);
    let acceptor = acceptor_with_disambig_loops(&labels, &l.phone_syms);
    let composed = compose(&acceptor, lg);
    shortest_path(&composed).ok()
}

/// Resolved output words of a path, disambiguation symbols dropped.
pub fn path_words(path: &LinearPath, word_syms: &SymbolTable) -> Vec<String> {
    path.output_labels()
        .into_iter()
        .filter(|&l| !word_syms.is_disambig(l))
        .map(|l| word_syms.symbol(l).unwrap().to_string())
        .collect()
}

/// Exhaustive path enumeration: minimum weight per (input labels, output
/// labels) pair over all accepting paths with at most `max_arcs` arcs.
pub fn enumerate_min_weights(fst: &Fst, max_arcs: usize) -> BTreeMap<(Vec<Label>, Vec<Label>), f64> {
    let mut out = BTreeMap::new();
    let start = match fst.start() {
        Some(s) => s,
        None => return out,
    };
    let mut stack = vec![(start, Vec::new(), Vec::new(), 0.0f64, 0usize)];
    while let Some((state, ins, outs, cost, depth)) = stack.pop() {
        if let Some(w) = fst.final_weight(state) {
            let total = cost + w.value();
            let entry = out
                .entry((ins.clone(), outs.clone()))
                .or_insert(f64::INFINITY);
            if total < *entry {
                *entry = total;
            }
        }
        if depth == max_arcs {
            continue;
        }
        for arc in fst.arcs(state) {
            let mut ins = ins.clone();
            let mut outs = outs.clone();
            if arc.ilabel != 0 {
                ins.push(arc.ilabel);
            }
            if arc.olabel != 0 {
                outs.push(arc.olabel);
            }
            stack.push((arc.nextstate, ins, outs, cost + arc.weight.value(), depth + 1));
        }
    }
    out
}

/// Word lexicon shared by the biasing fixtures. Phones cover the OOV
/// pronunciations used in the tests.
pub fn base_lexicon_text() -> &'static str {
    "the t ah\ncat k ae t\nfire f ay r\nfox f aa k s\nsat s ae t\n"
}

/// OOV entries whose phone strings have no in-vocabulary decomposition.
pub fn oov_lexicon_text() -> &'static str {
    "firefox f ay r aa k s\ncatfox k ae t aa k s\n"
}

/// Bigram model with [unk] restricted to ngram-final position, so every
/// [unk] arc shares one destination.
pub fn unk_arpa_text() -> &'static str {
    "\\data\\\n\
     ngram 1=8\n\
     ngram 2=7\n\
     \n\
     \\1-grams:\n\
     -99\t<s>\t-0.5\n\
     -1.0\t</s>\n\
     -0.7\tthe\t-0.4\n\
     -0.9\tcat\t-0.35\n\
     -1.0\tfire\t-0.3\n\
     -1.1\tfox\t-0.3\n\
     -1.2\tsat\t-0.3\n\
     -0.9\t[unk]\n\
     \n\
     \\2-grams:\n\
     -0.3\t<s> the\n\
     -0.5\tthe cat\n\
     -0.6\tcat sat\n\
     -0.4\tsat </s>\n\
     -0.7\tthe [unk]\n\
     -0.8\t<s> [unk]\n\
     -0.6\tfire fox\n\
     \n\
     \\end\\\n"
}

/// Trigram model over five words for the scoring-oracle comparison.
pub fn trigram_arpa_text() -> &'static str {
    "\\data\\\n\
     ngram 1=7\n\
     ngram 2=6\n\
     ngram 3=4\n\
     \n\
     \\1-grams:\n\
     -99\t<s>\t-0.7\n\
     -0.9\t</s>\n\
     -0.8\ta\t-0.4\n\
     -0.9\tb\t-0.35\n\
     -1.0\tc\t-0.3\n\
     -1.1\td\t-0.25\n\
     -1.2\te\t-0.2\n\
     \n\
     \\2-grams:\n\
     -0.4\t<s> a\t-0.3\n\
     -0.5\ta b\t-0.25\n\
     -0.6\tb c\t-0.2\n\
     -0.7\tc d\t-0.15\n\
     -0.5\td </s>\n\
     -0.8\te a\t-0.1\n\
     \n\
     \\3-grams:\n\
     -0.2\t<s> a b\n\
     -0.3\ta b c\n\
     -0.4\tb c d\n\
     -0.5\tc d </s>\n\
     \n\
     \\end\\\n"
}

pub fn word_table(words: &[&str]) -> SymbolTable {
    let mut syms = SymbolTable::new();
    for w in words {
        syms.add_symbol(w);
    }
    syms
}

/// Transition model file over the fixture phones, ids dense from 1.
pub fn transition_model_text() -> String {
    let phones = ["aa", "ae", "ah", "ay", "f", "jnk", "k", "r", "s", "t"];
    phones
        .iter()
        .enumerate()
        .map(|(i, p)| format!("{p}\t{}\n", i + 1))
        .collect()
}

pub fn eps_free(tokens: &[String]) -> Vec<String> {
    tokens.iter().filter(|t| *t != EPS_SYMBOL).cloned().collect()
}
