//! Pronunciation lexicons and the L transducer.
//!
//! The L graph maps phone strings to words. Its layout is a closure: every
//! pronunciation is a fresh arc chain from the start state to a shared
//! pronunciation-end state, the word label rides the first arc of its
//! chain, and the end state loops back to the start with an epsilon arc.
//! Conflicting pronunciations (shared by several words, or a prefix of a
//! longer one) get a `#k` disambiguation symbol appended as an extra input
//! arc so the machine stays determinizable. A `#0:#0` self-loop at the
//! start state lets the grammar's backoff symbol pass through composition.

use thiserror::Error;

use crate::fst::{Arc, Fst, Label, StateId, SymbolTable, Weight, EPSILON};

pub const UNK_WORD: &str = "[unk]";
pub const JNK_PHONE: &str = "jnk";

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("blank pronunciation for word {0:?} on line {1}")]
    BlankPronunciation(String, usize),
    #[error("duplicate lexicon entry for {word:?} /{pron}/")]
    DuplicateEntry { word: String, pron: String },
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("unknown phone {phone} in {word}")]
    UnknownPhone { phone: String, word: String },
    #[error("no jnk pronunciation arc to splice over")]
    MissingJnkArc,
    #[error("unk phone LM has no start state")]
    UnkLmNoStart,
    #[error("unk phone LM is not an acceptor (arc {ilabel}:{olabel})")]
    UnkLmNotAcceptor { ilabel: Label, olabel: Label },
    #[error("unk phone LM uses label {0} which is not a phone in the lexicon's table")]
    UnkLmBadPhone(Label),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexEntry {
    pub word: String,
    pub pron: Vec<String>,
}

/// Ordered list of (word, pronunciation) entries. Exact duplicates are
/// rejected; the same word may carry several distinct pronunciations.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: Vec<LexEntry>,
}

impl Lexicon {
    pub fn new() -> Self {
        Lexicon::default()
    }

    /// Parses "word p1 p2 ..." lines, one entry per line.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-empty line").to_string();
            let pron: Vec<String> = fields.map(str::to_string).collect();
            if pron.is_empty() {
                return Err(LexiconError::BlankPronunciation(word, idx + 1));
            }
            lex.push(word, pron)?;
        }
        Ok(lex)
    }

    pub fn push(&mut self, word: String, pron: Vec<String>) -> Result<(), LexiconError> {
        assert!(!pron.is_empty(), "pronunciations must have at least one phone");
        if self.entries.iter().any(|e| e.word == word && e.pron == pron) {
            return Err(LexiconError::DuplicateEntry {
                word,
                pron: pron.join(" "),
            });
        }
        self.entries.push(LexEntry { word, pron });
        Ok(())
    }

    pub fn entries(&self) -> &[LexEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Words in first-appearance order, deduplicated.
    pub fn words(&self) -> Vec<String> {
        let mut seen = std::collections::HashSet::new();
        self.entries
            .iter()
            .filter(|e| seen.insert(e.word.as_str()))
            .map(|e| e.word.clone())
            .collect()
    }
}

#[derive(Debug, Clone)]
struct BuiltEntry {
    word: String,
    pron: Vec<String>,
    disambig: Option<u32>,
}

/// The L transducer plus the bookkeeping needed to modify it in place.
#[derive(Debug, Clone)]
pub struct LGraph {
    pub fst: Fst,
    pub phone_syms: SymbolTable,
    pub word_syms: SymbolTable,
    pub pron_end_state: StateId,
    entries: Vec<BuiltEntry>,
}

/// Builds the L closure from a lexicon. With `add_unk`, a `jnk:[unk]`
/// chain is included so the unknown word is pronounceable.
pub fn build_l(lex: &Lexicon, add_unk: bool) -> Result<LGraph, LexiconError> {
    if lex.is_empty() {
        return Err(LexiconError::EmptyLexicon);
    }
    let mut phone_syms = SymbolTable::new();
    let mut word_syms = SymbolTable::new();
    for entry in lex.entries() {
        word_syms.add_symbol(&entry.word);
        for phone in &entry.pron {
            phone_syms.add_symbol(phone);
        }
    }
    if add_unk {
        phone_syms.add_symbol(JNK_PHONE);
        word_syms.add_symbol(UNK_WORD);
    }
    phone_syms.add_symbol("#0");
    word_syms.add_symbol("#0");

    let mut fst = Fst::new();
    let start = fst.add_state();
    let pron_end = fst.add_state();
    fst.set_start(start);
    fst.set_final(start, Weight::one());

    let mut graph = LGraph {
        fst,
        phone_syms,
        word_syms,
        pron_end_state: pron_end,
        entries: Vec::new(),
    };

    let marks = conflict_marks(lex.entries());
    let mut per_pron_seen: std::collections::HashMap<&[String], u32> =
        std::collections::HashMap::new();
    for (idx, entry) in lex.entries().iter().enumerate() {
        let disambig = if marks[idx] {
            let ordinal = per_pron_seen.entry(&entry.pron).or_insert(0);
            *ordinal += 1;
            Some(*ordinal)
        } else {
            None
        };
        graph.emit_chain(&entry.word, &entry.pron, disambig);
        graph.entries.push(BuiltEntry {
            word: entry.word.clone(),
            pron: entry.pron.clone(),
            disambig,
        });
    }
    if add_unk {
        graph.emit_chain(UNK_WORD, &[JNK_PHONE.to_string()], None);
    }
    let backoff_pass = graph.phone_syms.label("#0").unwrap();
    let backoff_word = graph.word_syms.label("#0").unwrap();
    graph
        .fst
        .add_arc(start, Arc::new(backoff_pass, backoff_word, Weight::one(), start));
    graph
        .fst
        .add_arc(pron_end, Arc::new(EPSILON, EPSILON, Weight::one(), start));
    Ok(graph)
}

/// Which entries need a disambiguation symbol: pronunciations shared by
/// two or more entries, or that are a proper prefix of another entry's
/// pronunciation.
fn conflict_marks(entries: &[LexEntry]) -> Vec<bool> {
    let all_prons: Vec<&[String]> = entries.iter().map(|e| e.pron.as_slice()).collect();
    entries
        .iter()
        .map(|entry| {
            let shared = all_prons
                .iter()
                .filter(|p| **p == entry.pron.as_slice())
                .count()
                >= 2;
            let prefix = all_prons
                .iter()
                .any(|p| p.len() > entry.pron.len() && p.starts_with(&entry.pron));
            shared || prefix
        })
        .collect()
}

impl LGraph {
    fn emit_chain(&mut self, word: &str, pron: &[String], disambig: Option<u32>) {
        let word_label = self.word_syms.add_symbol(word);
        let mut inputs: Vec<Label> = pron
            .iter()
            .map(|p| self.phone_syms.add_symbol(p))
            .collect();
        if let Some(k) = disambig {
            inputs.push(self.phone_syms.add_symbol(&format!("#{k}")));
        }
        let mut cur = self.fst.start().expect("L has a start state");
        for (i, &ilabel) in inputs.iter().enumerate() {
            let olabel = if i == 0 { word_label } else { EPSILON };
            let next = if i + 1 == inputs.len() {
                self.pron_end_state
            } else {
                self.fst.add_state()
            };
            self.fst.add_arc(cur, Arc::new(ilabel, olabel, Weight::one(), next));
            cur = next;
        }
    }

    /// Adds new (OOV) words as fresh chains. New words must not introduce
    /// new phones. Existing states and arcs are left untouched;
    /// disambiguation ordinals continue past the ones already assigned to
    /// the affected pronunciation sets.
    pub fn add_words(&mut self, oov: &Lexicon) -> Result<(), LexiconError> {
        for entry in oov.entries() {
            for phone in &entry.pron {
                if !self.phone_syms.contains(phone) {
                    return Err(LexiconError::UnknownPhone {
                        phone: phone.clone(),
                        word: entry.word.clone(),
                    });
                }
            }
            if self
                .entries
                .iter()
                .any(|e| e.word == entry.word && e.pron == entry.pron)
            {
                return Err(LexiconError::DuplicateEntry {
                    word: entry.word.clone(),
                    pron: entry.pron.join(" "),
                });
            }
        }
        for entry in oov.entries() {
            let same_pron: Vec<&BuiltEntry> = self
                .entries
                .iter()
                .filter(|e| e.pron == entry.pron)
                .collect();
            let shared = !same_pron.is_empty();
            let prefix = self
                .entries
                .iter()
                .any(|e| e.pron.len() > entry.pron.len() && e.pron.starts_with(&entry.pron));
            let disambig = if shared || prefix {
                let used = same_pron
                    .iter()
                    .map(|e| e.disambig.unwrap_or(0))
                    .max()
                    .unwrap_or(0);
                Some(used.max(same_pron.len() as u32) + 1)
            } else {
                None
            };
            self.emit_chain(&entry.word, &entry.pron, disambig);
            self.entries.push(BuiltEntry {
                word: entry.word.clone(),
                pron: entry.pron.clone(),
                disambig,
            });
        }
        Ok(())
    }

    /// Replaces the `jnk:[unk]` pronunciation with a copy of the phone LM
    /// `p`: one `[unk]`-emitting connector from the start into p's start,
    /// and one connector per final state of p back to the pronunciation
    /// end, carrying that final's weight. Connectors get fresh `#u`
    /// disambiguation inputs. `p` itself is left untouched.
    pub fn splice_unk_lm(&mut self, p: &Fst) -> Result<(), LexiconError> {
        let jnk = self
            .phone_syms
            .label(JNK_PHONE)
            .ok_or(LexiconError::MissingJnkArc)?;
        let unk = self
            .word_syms
            .label(UNK_WORD)
            .ok_or(LexiconError::MissingJnkArc)?;
        let p_start = p.start().ok_or(LexiconError::UnkLmNoStart)?;
        for s in p.state_ids() {
            for arc in p.arcs(s) {
                if arc.ilabel != arc.olabel {
                    return Err(LexiconError::UnkLmNotAcceptor {
                        ilabel: arc.ilabel,
                        olabel: arc.olabel,
                    });
                }
                if arc.ilabel as usize >= self.phone_syms.len() {
                    return Err(LexiconError::UnkLmBadPhone(arc.ilabel));
                }
            }
        }

        let start = self.fst.start().expect("L has a start state");
        let before = self.fst.arcs(start).len();
        self.fst.arcs_mut(start).retain(|a| a.ilabel != jnk);
        if self.fst.arcs(start).len() == before {
            return Err(LexiconError::MissingJnkArc);
        }

        let offset = self.fst.num_states();
        for _ in p.state_ids() {
            self.fst.add_state();
        }
        for s in p.state_ids() {
            for arc in p.arcs(s) {
                self.fst.add_arc(
                    s + offset,
                    Arc::new(arc.ilabel, EPSILON, arc.weight, arc.nextstate + offset),
                );
            }
        }
        let entry_sym = self.phone_syms.add_symbol("#u1");
        let exit_sym = self.phone_syms.add_symbol("#u2");
        self.fst
            .add_arc(start, Arc::new(entry_sym, unk, Weight::one(), p_start + offset));
        for (s, w) in p.finals() {
            self.fst
                .add_arc(s + offset, Arc::new(exit_sym, EPSILON, w, self.pron_end_state));
        }
        Ok(())
    }

    /// Full disambiguated input string of every entry, paired with its
    /// word. Two distinct words must never share one.
    pub fn disambiguated_inputs(&self) -> Vec<(Vec<String>, String)> {
        self.entries
            .iter()
            .map(|e| {
                let mut input = e.pron.clone();
                if let Some(k) = e.disambig {
                    input.push(format!("#{k}"));
                }
                (input, e.word.clone())
            })
            .collect()
    }
}
