//! Backoff n-gram language models: ARPA parsing, rendering as a G
//! acceptor, and the two G-level biasing surgeries (word-level `[unk]`
//! replacement and subword-sequence boosting).

mod arpa;
mod graph;

pub use arpa::{ArpaError, ArpaModel, NgramEntry};
pub use graph::{arpa_to_g, nats, GError, GGraph, ModGReport};

pub const SENTENCE_BEGIN: &str = "<s>";
pub const SENTENCE_END: &str = "</s>";
pub const BACKOFF_SYMBOL: &str = "#0";

/// Costs used by the biasing surgeries, all in nats.
///
/// `penalty` is added on top of the former `[unk]` weight when OOV words
/// replace it. `boost_cost` is the weight of newly added subword arcs and
/// `discount` is subtracted from existing ones (floored at zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasConfig {
    pub penalty: f64,
    pub boost_cost: f64,
    pub discount: f64,
}

impl Default for BiasConfig {
    fn default() -> Self {
        BiasConfig {
            penalty: 2.3,
            boost_cost: 0.1,
            discount: 0.5,
        }
    }
}

impl BiasConfig {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("penalty", self.penalty),
            ("boost_cost", self.boost_cost),
            ("discount", self.discount),
        ] {
            if v.is_nan() || v < 0.0 {
                return Err(format!("{name} must be nonnegative, got {v}"));
            }
        }
        Ok(())
    }
}
