//! Mutable weighted FSTs over the tropical semiring.
//!
//! States are dense indices. Surgery operations elsewhere in the crate
//! append states but never renumber existing ones, so maps keyed on state
//! ids stay valid across modifications.

mod compose;
mod connect;
mod io;
mod path;
mod shortest;
mod symbol;

pub use compose::compose;
pub use connect::connect;
pub use io::{read_fst_text, write_fst_text, FstIoError};
pub use path::{extract_unk_spans, LinearPath};
pub use shortest::{shortest_path, ShortestPathError};
pub use symbol::{SymbolTable, SymbolTableError, EPS_SYMBOL};

use std::collections::BTreeMap;

pub type StateId = usize;
pub type Label = u32;

/// Label id reserved for epsilon on both tapes.
pub const EPSILON: Label = 0;

/// Tropical weight: a cost in nats (-ln probability). `plus` is min,
/// `times` is addition, zero is +inf and one is 0.0.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Weight(f64);

impl Weight {
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Weight(value)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Additive identity: no path.
    pub fn zero() -> Self {
        Weight(f64::INFINITY)
    }

    /// Multiplicative identity: a free transition.
    pub fn one() -> Self {
        Weight(0.0)
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn plus(self, other: Weight) -> Weight {
        Weight(self.0.min(other.0))
    }

    pub fn times(self, other: Weight) -> Weight {
        Weight(self.0 + other.0)
    }

    pub fn approx_eq(self, other: Weight, tol: f64) -> bool {
        (self.0 - other.0).abs() <= tol || (self.is_zero() && other.is_zero())
    }
}

impl std::fmt::Display for Weight {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:.6}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arc {
    pub ilabel: Label,
    pub olabel: Label,
    pub weight: Weight,
    pub nextstate: StateId,
}

impl Arc {
    pub fn new(ilabel: Label, olabel: Label, weight: Weight, nextstate: StateId) -> Self {
        Arc {
            ilabel,
            olabel,
            weight,
            nextstate,
        }
    }
}

/// A weighted transducer. A non-empty machine has exactly one start state;
/// final weights live in a map so iteration over them is deterministic.
#[derive(Debug, Clone, Default)]
pub struct Fst {
    states: Vec<Vec<Arc>>,
    start: Option<StateId>,
    finals: BTreeMap<StateId, Weight>,
}

impl Fst {
    pub fn new() -> Self {
        Fst::default()
    }

    pub fn add_state(&mut self) -> StateId {
        self.states.push(Vec::new());
        self.states.len() - 1
    }

    /// Grows the machine so that `id` is a valid state.
    pub fn ensure_state(&mut self, id: StateId) {
        while self.states.len() <= id {
            self.states.push(Vec::new());
        }
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_arcs(&self) -> usize {
        self.states.iter().map(Vec::len).sum()
    }

    pub fn set_start(&mut self, state: StateId) {
        assert!(state < self.states.len(), "start state out of range");
        self.start = Some(state);
    }

    pub fn start(&self) -> Option<StateId> {
        self.start
    }

    pub fn set_final(&mut self, state: StateId, weight: Weight) {
        assert!(state < self.states.len(), "final state out of range");
        self.finals.insert(state, weight);
    }

    pub fn clear_final(&mut self, state: StateId) {
        self.finals.remove(&state);
    }

    pub fn final_weight(&self, state: StateId) -> Option<Weight> {
        self.finals.get(&state).copied()
    }

    pub fn is_final(&self, state: StateId) -> bool {
        self.finals.contains_key(&state)
    }

    pub fn finals(&self) -> impl Iterator<Item = (StateId, Weight)> + '_ {
        self.finals.iter().map(|(&s, &w)| (s, w))
    }

    pub fn add_arc(&mut self, state: StateId, arc: Arc) {
        assert!(state < self.states.len(), "source state out of range");
        assert!(arc.nextstate < self.states.len(), "arc target out of range");
        self.states[state].push(arc);
    }

    pub fn arcs(&self, state: StateId) -> &[Arc] {
        &self.states[state]
    }

    pub fn arcs_mut(&mut self, state: StateId) -> &mut Vec<Arc> {
        &mut self.states[state]
    }

    pub fn state_ids(&self) -> impl Iterator<Item = StateId> {
        0..self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}
