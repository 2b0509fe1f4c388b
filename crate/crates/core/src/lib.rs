//! Toolkit for recognizing out-of-vocabulary words with WFST-based speech
//! recognition systems.
//!
//! The crate bundles the pieces needed to bias a decoding setup towards a
//! known list of OOV words and to measure how well they are recognized:
//!
//! - [`fst`]: a small weighted FST library over the tropical semiring with
//!   AT&T text I/O, composition, shortest path and trimming. It doubles as
//!   the verification oracle for every graph surgery below.
//! - [`lexicon`]: lexicon parsing, L graph construction with disambiguation
//!   symbols, adding new words, and splicing a phone LM in place of the
//!   `jnk` pronunciation of `[unk]`.
//! - [`ngram`]: ARPA parsing, backoff G construction with a retained
//!   state/history map, word-level `[unk]` replacement and subword-sequence
//!   boosting.
//! - [`bpe`]: byte-pair encoding training and tokenization.
//! - [`hclg`]: toy monophone decoding graphs and the once-inserted HCL
//!   replacement of `[unk]` arcs.
//! - [`metrics`]: character-aware alignment, WER/CER and OOV-CER scoring.
//! - [`split`]: high-OOV train/test splits with speaker disjointness.

pub mod bpe;
pub mod fst;
pub mod hclg;
pub mod lexicon;
pub mod metrics;
pub mod ngram;
pub mod split;

pub use bpe::BpeModel;
pub use fst::{Arc, Fst, Label, LinearPath, StateId, SymbolTable, Weight, EPSILON};
pub use hclg::{DecodingGraph, TransitionModel};
pub use lexicon::{LGraph, Lexicon};
pub use ngram::{ArpaModel, BiasConfig, GGraph};
