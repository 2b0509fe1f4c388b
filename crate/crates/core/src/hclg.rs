//! Toy monophone decoding graphs (transition-ids in, words out) and the
//! `[unk]` replacement that splices an HCL built from an OOV lexicon into
//! an already composed graph.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fst::{compose, Arc, Fst, Label, StateId, SymbolTable, Weight, EPSILON};
use crate::lexicon::{LGraph, Lexicon, UNK_WORD};
use crate::ngram::{BiasConfig, GGraph};

#[derive(Debug, Error)]
pub enum HclgError {
    #[error("malformed transition model line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("transition ids must be dense from 1; problem near id {0}")]
    NonDenseIds(u32),
    #[error("duplicate transition id {0}")]
    DuplicateId(u32),
    #[error("duplicate phone {0:?}")]
    DuplicatePhone(String),
    #[error("phone {0:?} has no transition id")]
    PhoneWithoutTid(String),
    #[error("word tables of L and G differ; build them from the same sources")]
    WordTableMismatch,
    #[error("graph uses context-dependent phones; only monophone graphs can be modified")]
    ContextDependent,
    #[error("no [unk] arcs found; is this the right graph?")]
    NoUnkArcs,
    #[error("[unk] arcs lead to {0} distinct states; the model must limit unk history")]
    UnkDestinationsDiffer(usize),
}

/// Single-HMM-state transition inventory: one transition id per phone,
/// dense from 1, plus one per self-loop when loops are enabled
/// (`self_loop_prob < 1.0`; a value of exactly 1.0 means "no loops").
#[derive(Debug, Clone)]
pub struct TransitionModel {
    tids: BTreeMap<String, u32>,
    pub self_loop_prob: f64,
    pub context_dependent: bool,
}

impl TransitionModel {
    pub fn new(
        phones: impl IntoIterator<Item = (String, u32)>,
        self_loop_prob: f64,
    ) -> Result<Self, HclgError> {
        let mut tids = BTreeMap::new();
        let mut seen = std::collections::BTreeSet::new();
        for (phone, tid) in phones {
            if !seen.insert(tid) {
                return Err(HclgError::DuplicateId(tid));
            }
            if tids.insert(phone.clone(), tid).is_some() {
                return Err(HclgError::DuplicatePhone(phone));
            }
        }
        for (i, &tid) in seen.iter().enumerate() {
            if tid != i as u32 + 1 {
                return Err(HclgError::NonDenseIds(tid));
            }
        }
        Ok(TransitionModel {
            tids,
            self_loop_prob,
            context_dependent: false,
        })
    }

    /// Parses "phone<TAB>tid" lines.
    pub fn parse(text: &str, self_loop_prob: f64) -> Result<Self, HclgError> {
        let mut phones = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (phone, tid) = match (fields.next(), fields.next(), fields.next()) {
                (Some(p), Some(t), None) => (p, t),
                _ => {
                    return Err(HclgError::MalformedLine {
                        line: idx + 1,
                        text: line.to_string(),
                    })
                }
            };
            let tid: u32 = tid.parse().map_err(|_| HclgError::MalformedLine {
                line: idx + 1,
                text: line.to_string(),
            })?;
            phones.push((phone.to_string(), tid));
        }
        TransitionModel::new(phones, self_loop_prob)
    }

    pub fn tid(&self, phone: &str) -> Option<u32> {
        self.tids.get(phone).copied()
    }

    pub fn num_phones(&self) -> usize {
        self.tids.len()
    }

    /// Transition id of the self-loop attached to a phone's HMM state.
    pub fn loop_tid(&self, phone: &str) -> Option<u32> {
        self.tid(phone).map(|t| t + self.num_phones() as u32)
    }

    pub fn loops_enabled(&self) -> bool {
        self.self_loop_prob < 1.0
    }

    pub fn phones(&self) -> impl Iterator<Item = (&str, u32)> {
        self.tids.iter().map(|(p, &t)| (p.as_str(), t))
    }

    /// Symbol table over transition ids, usable for text I/O of decoding
    /// graphs: phone names for entry transitions, name+"_loop" for loops.
    pub fn tid_symbols(&self) -> SymbolTable {
        let mut by_tid: Vec<(u32, &str)> = self.tids.iter().map(|(p, &t)| (t, p.as_str())).collect();
        by_tid.sort_unstable();
        let mut table = SymbolTable::new();
        for &(_, phone) in &by_tid {
            table.add_symbol(phone);
        }
        for &(_, phone) in &by_tid {
            table.add_symbol(&format!("{phone}_loop"));
        }
        assert_eq!(
            table.len(),
            2 * self.tids.len() + 1,
            "phone names collide with generated loop names"
        );
        table
    }
}

/// A composed decoding graph: transition-id inputs, word outputs.
#[derive(Debug, Clone)]
pub struct DecodingGraph {
    pub fst: Fst,
    pub tm: TransitionModel,
    pub word_syms: SymbolTable,
}

/// Composes L with G and maps phone inputs to transition ids, dropping
/// disambiguation symbols and inserting self-loop gadgets when enabled.
/// For any accepted word sequence the cost is the LM cost plus the
/// self-loop exit costs, or exactly the LM cost with loops disabled.
pub fn build_hclg(l: &LGraph, g: &GGraph, tm: &TransitionModel) -> Result<DecodingGraph, HclgError> {
    if l.word_syms.symbols() != g.word_syms.symbols() {
        // G interns "#0" itself; allow L's table to equal G's minus that.
        let mut with_backoff = l.word_syms.clone();
        with_backoff.add_symbol(crate::ngram::BACKOFF_SYMBOL);
        if with_backoff.symbols() != g.word_syms.symbols() {
            return Err(HclgError::WordTableMismatch);
        }
    }
    let composed = compose(&l.fst, &g.fst);
    let mut fst = Fst::new();
    for _ in 0..composed.num_states() {
        fst.add_state();
    }
    if let Some(start) = composed.start() {
        fst.set_start(start);
    }
    for (s, w) in composed.finals() {
        fst.set_final(s, w);
    }
    for s in composed.state_ids() {
        for arc in composed.arcs(s) {
            emit_acoustic_arc(&mut fst, tm, &l.phone_syms, s, arc)?;
        }
    }
    Ok(DecodingGraph {
        fst,
        tm: tm.clone(),
        word_syms: g.word_syms.clone(),
    })
}

/// Adds `arc` to `fst` with its phone input mapped to a transition id.
/// Disambiguation symbols become epsilon. With self-loops enabled a phone
/// arc expands into entry arc + loop state + epsilon exit.
fn emit_acoustic_arc(
    fst: &mut Fst,
    tm: &TransitionModel,
    phone_syms: &SymbolTable,
    src: StateId,
    arc: &Arc,
) -> Result<(), HclgError> {
    if arc.ilabel == EPSILON || phone_syms.is_disambig(arc.ilabel) {
        fst.add_arc(src, Arc::new(EPSILON, arc.olabel, arc.weight, arc.nextstate));
        return Ok(());
    }
    let phone = phone_syms
        .symbol(arc.ilabel)
        .ok_or_else(|| HclgError::PhoneWithoutTid(format!("label {}", arc.ilabel)))?;
    let tid = tm
        .tid(phone)
        .ok_or_else(|| HclgError::PhoneWithoutTid(phone.to_string()))?;
    emit_tid_arc(fst, tm, phone, tid, src, arc.olabel, arc.weight, arc.nextstate);
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn emit_tid_arc(
    fst: &mut Fst,
    tm: &TransitionModel,
    phone: &str,
    tid: u32,
    src: StateId,
    olabel: Label,
    weight: Weight,
    dst: StateId,
) {
    if !tm.loops_enabled() {
        fst.add_arc(src, Arc::new(tid, olabel, weight, dst));
        return;
    }
    let p = tm.self_loop_prob;
    let loop_tid = tm.loop_tid(phone).expect("phone has a tid");
    let hmm_state = fst.add_state();
    fst.add_arc(src, Arc::new(tid, olabel, weight, hmm_state));
    fst.add_arc(hmm_state, Arc::new(loop_tid, EPSILON, Weight::new(-p.ln()), hmm_state));
    fst.add_arc(
        hmm_state,
        Arc::new(EPSILON, EPSILON, Weight::new(-(1.0 - p).ln()), dst),
    );
}

/// Builds an HCL from the OOV lexicon, appends it once, and redirects all
/// `[unk]`-output arcs into it with `cfg.penalty` added on the entry
/// connector. Word-final exits merge into one state connected to the
/// former (shared) `[unk]` destination.
pub fn mod_hclg(
    dg: &mut DecodingGraph,
    oov_lex: &Lexicon,
    cfg: &BiasConfig,
) -> Result<(), HclgError> {
    if dg.tm.context_dependent {
        return Err(HclgError::ContextDependent);
    }
    let unk = dg.word_syms.label(UNK_WORD).ok_or(HclgError::NoUnkArcs)?;
    let mut unk_arcs: Vec<(StateId, usize)> = Vec::new();
    let mut destinations: Vec<StateId> = Vec::new();
    for s in dg.fst.state_ids() {
        for (i, arc) in dg.fst.arcs(s).iter().enumerate() {
            if arc.olabel == unk {
                unk_arcs.push((s, i));
                if !destinations.contains(&arc.nextstate) {
                    destinations.push(arc.nextstate);
                }
            }
        }
    }
    if unk_arcs.is_empty() {
        return Err(HclgError::NoUnkArcs);
    }
    if destinations.len() != 1 {
        return Err(HclgError::UnkDestinationsDiffer(destinations.len()));
    }
    let shared_dst = destinations[0];
    for entry in oov_lex.entries() {
        for phone in &entry.pron {
            if dg.tm.tid(phone).is_none() {
                return Err(HclgError::PhoneWithoutTid(phone.clone()));
            }
        }
    }

    let hcl_start = dg.fst.add_state();
    let hcl_exit = dg.fst.add_state();
    for entry in oov_lex.entries() {
        let word = dg.word_syms.add_symbol(&entry.word);
        let mut cur = hcl_start;
        let n = entry.pron.len();
        for (i, phone) in entry.pron.iter().enumerate() {
            let olabel = if i == 0 { word } else { EPSILON };
            let next = if i + 1 == n { hcl_exit } else { dg.fst.add_state() };
            let tid = dg.tm.tid(phone).expect("validated above");
            emit_tid_arc(&mut dg.fst, &dg.tm, phone, tid, cur, olabel, Weight::one(), next);
            cur = next;
        }
    }
    dg.fst
        .add_arc(hcl_exit, Arc::new(EPSILON, EPSILON, Weight::one(), shared_dst));
    for (s, i) in unk_arcs {
        let weight = dg.fst.arcs(s)[i].weight;
        dg.fst.arcs_mut(s)[i] = Arc::new(
            EPSILON,
            EPSILON,
            Weight::new(weight.value() + cfg.penalty),
            hcl_start,
        );
    }
    Ok(())
}
