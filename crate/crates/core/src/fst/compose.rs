//! Composition with an epsilon filter.
//!
//! Epsilon moves are coordinated through three logical filter states so
//! that every valid pairing survives exactly once and no weight is
//! counted twice:
//!
//! - filter 0: anything goes; a joint epsilon move (both sides advance)
//!   stays here.
//! - filter 1: only the left machine may keep advancing on epsilon output.
//! - filter 2: only the right machine may keep advancing on epsilon input.
//!
//! A non-epsilon match resets the filter to 0 from anywhere.

use std::collections::{HashMap, VecDeque};

use super::{Arc, Fst, StateId, EPSILON};

const FILTER_FREE: u8 = 0;
const FILTER_LEFT_ONLY: u8 = 1;
const FILTER_RIGHT_ONLY: u8 = 2;

/// Composes two machines that share the middle symbol table. Accepts
/// exactly the relation pairs `(x, z)` for which some `y` is an output of
/// `a` on `x` and an input of `b` producing `z`, with path weights
/// combined by `times`.
pub fn compose(a: &Fst, b: &Fst) -> Fst {
    let mut result = Fst::new();
    let (a_start, b_start) = match (a.start(), b.start()) {
        (Some(x), Some(y)) => (x, y),
        _ => return result,
    };

    let mut ids: HashMap<(StateId, StateId, u8), StateId> = HashMap::new();
    let mut queue: VecDeque<(StateId, StateId, u8)> = VecDeque::new();

    let start_key = (a_start, b_start, FILTER_FREE);
    ids.insert(start_key, result.add_state());
    result.set_start(0);
    queue.push_back(start_key);

    while let Some(key) = queue.pop_front() {
        let (sa, sb, filter) = key;
        let here = ids[&key];

        if let (Some(wa), Some(wb)) = (a.final_weight(sa), b.final_weight(sb)) {
            result.set_final(here, wa.times(wb));
        }

        let mut moves: Vec<(Arc, (StateId, StateId, u8))> = Vec::new();
        for arc_a in a.arcs(sa) {
            if arc_a.olabel == EPSILON {
                // Left machine advances alone.
                if filter != FILTER_RIGHT_ONLY {
                    moves.push((
                        Arc::new(arc_a.ilabel, EPSILON, arc_a.weight, 0),
                        (arc_a.nextstate, sb, FILTER_LEFT_ONLY),
                    ));
                }
                for arc_b in b.arcs(sb) {
                    // Joint epsilon move, only from the free state.
                    if arc_b.ilabel == EPSILON && filter == FILTER_FREE {
                        moves.push((
                            Arc::new(arc_a.ilabel, arc_b.olabel, arc_a.weight.times(arc_b.weight), 0),
                            (arc_a.nextstate, arc_b.nextstate, FILTER_FREE),
                        ));
                    }
                }
            } else {
                for arc_b in b.arcs(sb) {
                    if arc_b.ilabel == arc_a.olabel {
                        moves.push((
                            Arc::new(arc_a.ilabel, arc_b.olabel, arc_a.weight.times(arc_b.weight), 0),
                            (arc_a.nextstate, arc_b.nextstate, FILTER_FREE),
                        ));
                    }
                }
            }
        }
        if filter != FILTER_LEFT_ONLY {
            for arc_b in b.arcs(sb) {
                if arc_b.ilabel == EPSILON {
                    // Right machine advances alone.
                    moves.push((
                        Arc::new(EPSILON, arc_b.olabel, arc_b.weight, 0),
                        (sa, arc_b.nextstate, FILTER_RIGHT_ONLY),
                    ));
                }
            }
        }

        for (template, next_key) in moves {
            let next_id = match ids.get(&next_key) {
                Some(&id) => id,
                None => {
                    let id = result.add_state();
                    ids.insert(next_key, id);
                    queue.push_back(next_key);
                    id
                }
            };
            result.add_arc(here, Arc::new(template.ilabel, template.olabel, template.weight, next_id));
        }
    }
    result
}
