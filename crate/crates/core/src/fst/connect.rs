use std::collections::VecDeque;

use super::{Arc, Fst, StateId};

/// Trims states that are not on some start-to-final path. Surviving states
/// are renumbered densely in ascending old-id order; the weighted language
/// is unchanged. May return the empty machine.
pub fn connect(fst: &Fst) -> Fst {
    let start = match fst.start() {
        Some(s) => s,
        None => return Fst::new(),
    };
    let n = fst.num_states();

    let mut accessible = vec![false; n];
    let mut queue = VecDeque::from([start]);
    accessible[start] = true;
    while let Some(s) = queue.pop_front() {
        for arc in fst.arcs(s) {
            if !accessible[arc.nextstate] {
                accessible[arc.nextstate] = true;
                queue.push_back(arc.nextstate);
            }
        }
    }

    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        for arc in fst.arcs(s) {
            reverse[arc.nextstate].push(s);
        }
    }
    let mut coaccessible = vec![false; n];
    let mut queue: VecDeque<StateId> = fst.finals().map(|(s, _)| s).collect();
    for &s in &queue {
        coaccessible[s] = true;
    }
    while let Some(s) = queue.pop_front() {
        for &prev in &reverse[s] {
            if !coaccessible[prev] {
                coaccessible[prev] = true;
                queue.push_back(prev);
            }
        }
    }

    let mut remap = vec![usize::MAX; n];
    let mut result = Fst::new();
    for s in 0..n {
        if accessible[s] && coaccessible[s] {
            remap[s] = result.add_state();
        }
    }
    if remap[start] == usize::MAX {
        return Fst::new();
    }
    result.set_start(remap[start]);
    for s in 0..n {
        if remap[s] == usize::MAX {
            continue;
        }
        for arc in fst.arcs(s) {
            if remap[arc.nextstate] != usize::MAX {
                result.add_arc(
                    remap[s],
                    Arc::new(arc.ilabel, arc.olabel, arc.weight, remap[arc.nextstate]),
                );
            }
        }
    }
    for (s, w) in fst.finals() {
        if remap[s] != usize::MAX {
            result.set_final(remap[s], w);
        }
    }
    result
}
