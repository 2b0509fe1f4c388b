//! Deterministic synthetic fixtures shared by the benchmarks. Everything
//! is derived from indices so runs are reproducible without an RNG.

use std::collections::BTreeMap;

use oovfst::lexicon::build_l;
use oovfst::ngram::arpa_to_g;
use oovfst::{ArpaModel, GGraph, LGraph, Lexicon};

pub const PHONES: [&str; 6] = ["aa", "eh", "iy", "k", "s", "t"];

fn pronunciation(index: usize) -> Vec<String> {
    let len = 3 + index % 4;
    (0..len)
        .map(|k| PHONES[(index / (k + 1) + k) % PHONES.len()].to_string())
        .collect()
}

pub fn word(index: usize) -> String {
    format!("w{index:03}")
}

/// Lexicon of `n` synthetic words over a six-phone inventory.
pub fn demo_lexicon(n: usize) -> Lexicon {
    let mut lex = Lexicon::new();
    for i in 0..n {
        lex.push(word(i), pronunciation(i)).expect("unique entries");
    }
    lex
}

/// Bigram ARPA over the same words plus [unk]: all unigrams, plus a
/// bigram linking each word to its successor.
pub fn demo_arpa(n: usize) -> String {
    let mut out = String::from("\\data\\\n");
    out.push_str(&format!("ngram 1={}\n", n + 3));
    out.push_str(&format!("ngram 2={}\n\n", n + 1));
    out.push_str("\\1-grams:\n-99\t<s>\t-0.5\n-1.1\t</s>\n-0.9\t[unk]\n");
    for i in 0..n {
        let lp = -0.6 - (i % 10) as f64 * 0.05;
        out.push_str(&format!("{lp:.2}\t{}\t-0.30\n", word(i)));
    }
    out.push_str("\n\\2-grams:\n");
    out.push_str(&format!("-0.40\t<s> {}\n", word(0)));
    for i in 0..n.saturating_sub(1) {
        out.push_str(&format!("-0.45\t{} {}\n", word(i), word(i + 1)));
    }
    out.push_str(&format!("-0.50\t{} </s>\n", word(n - 1)));
    out.push_str("\n\\end\\\n");
    out
}

pub fn demo_graphs(n: usize) -> (LGraph, GGraph) {
    let lex = demo_lexicon(n);
    let l = build_l(&lex, true).expect("lexicon is non-empty");
    let model = ArpaModel::parse(&demo_arpa(n)).expect("generated ARPA is valid");
    let g = arpa_to_g(&model, &l.word_syms).expect("tokens are interned");
    (l, g)
}

/// Word-frequency table with heavy pair overlap for BPE training.
pub fn demo_corpus(n: usize) -> BTreeMap<String, u64> {
    let stems = ["fire", "water", "light", "stone", "wind"];
    let suffixes = ["", "s", "ing", "ed", "fox", "man"];
    let mut corpus = BTreeMap::new();
    for i in 0..n {
        let w = format!(
            "{}{}",
            stems[i % stems.len()],
            suffixes[(i / stems.len()) % suffixes.len()]
        );
        *corpus.entry(w).or_insert(0) += 1 + (i % 7) as u64;
    }
    corpus
}

/// A pair of word sequences with scattered differences, for the aligner.
pub fn demo_transcripts(len: usize) -> (Vec<String>, Vec<String>) {
    let reference: Vec<String> = (0..len).map(|i| word(i % 23)).collect();
    let hypothesis: Vec<String> = (0..len)
        .filter(|i| i % 11 != 3)
        .map(|i| {
            if i % 7 == 2 {
                format!("{}x", word(i % 23))
            } else {
                word(i % 23)
            }
        })
        .collect();
    (reference, hypothesis)
}
