//! Single-source shortest path under the tropical semiring.

use thiserror::Error;

use super::{Arc, Fst, LinearPath, StateId, Weight};

#[derive(Debug, Error, PartialEq)]
pub enum ShortestPathError {
    #[error("empty language: no accepting path")]
    EmptyLanguage,
    #[error("shortest path undefined: negative-weight cycle")]
    NegativeCycle,
}

/// Returns a minimum-weight path from the start to a final state.
///
/// Ties are broken deterministically: among minimum-weight paths the one
/// with the lexicographically smallest state-id sequence wins (a stopped
/// path counts as a prefix of its extensions). If a zero-weight cycle lies
/// on the optimal subgraph no lexicographic minimum exists; the walk then
/// restarts preferring fewer hops first, which is still deterministic.
pub fn shortest_path(fst: &Fst) -> Result<LinearPath, ShortestPathError> {
    let start = fst.start().ok_or(ShortestPathError::EmptyLanguage)?;
    let n = fst.num_states();

    // Cost-to-accept for every state, computed by relaxation so negative
    // arc weights (positive-probability backoffs) are handled.
    let mut to_accept = vec![f64::INFINITY; n];
    for (s, w) in fst.finals() {
        to_accept[s] = w.value();
    }
    let mut changed = true;
    let mut rounds = 0usize;
    while changed {
        changed = false;
        rounds += 1;
        if rounds > n + 1 {
            return Err(ShortestPathError::NegativeCycle);
        }
        for s in 0..n {
            for arc in fst.arcs(s) {
                let cand = arc.weight.value() + to_accept[arc.nextstate];
                if cand < to_accept[s] {
                    to_accept[s] = cand;
                    changed = true;
                }
            }
        }
    }
    if to_accept[start].is_infinite() {
        return Err(ShortestPathError::EmptyLanguage);
    }

    if let Some(path) = greedy_walk(fst, start, &to_accept, None) {
        return Ok(path);
    }
    // Zero-weight cycle on the optimal subgraph: minimize hops first.
    let hops = optimal_hops(fst, &to_accept);
    let path = greedy_walk(fst, start, &to_accept, Some(&hops))
        .expect("hop-guided walk terminates on the optimal subgraph");
    Ok(path)
}

fn stop_is_optimal(fst: &Fst, state: StateId, to_accept: &[f64]) -> bool {
    fst.final_weight(state)
        .is_some_and(|w| w.value() == to_accept[state])
}

fn arc_is_optimal(arc: &Arc, state: StateId, to_accept: &[f64]) -> bool {
    arc.weight.value() + to_accept[arc.nextstate] == to_accept[state]
}

/// Minimum number of arcs from each state to an accepting stop using only
/// optimal arcs. BFS from the stoppable states over reversed optimal arcs.
fn optimal_hops(fst: &Fst, to_accept: &[f64]) -> Vec<usize> {
    let n = fst.num_states();
    let mut reverse: Vec<Vec<StateId>> = vec![Vec::new(); n];
    for s in 0..n {
        if to_accept[s].is_infinite() {
            continue;
        }
        for arc in fst.arcs(s) {
            if arc_is_optimal(arc, s, to_accept) {
                reverse[arc.nextstate].push(s);
            }
        }
    }
    let mut hops = vec![usize::MAX; n];
    let mut queue = std::collections::VecDeque::new();
    for (s, h) in hops.iter_mut().enumerate() {
        if stop_is_optimal(fst, s, to_accept) {
            *h = 0;
            queue.push_back(s);
        }
    }
    while let Some(s) = queue.pop_front() {
        for &prev in &reverse[s] {
            if hops[prev] == usize::MAX {
                hops[prev] = hops[s] + 1;
                queue.push_back(prev);
            }
        }
    }
    hops
}

fn greedy_walk(
    fst: &Fst,
    start: StateId,
    to_accept: &[f64],
    hops: Option<&[usize]>,
) -> Option<LinearPath> {
    let mut arcs: Vec<Arc> = Vec::new();
    let mut current = start;
    let limit = fst.num_states();
    loop {
        if stop_is_optimal(fst, current, to_accept) {
            return Some(LinearPath {
                start,
                arcs,
                total_weight: Weight::new(to_accept[start]),
            });
        }
        let mut best: Option<&Arc> = None;
        for arc in fst.arcs(current) {
            if !arc_is_optimal(arc, current, to_accept) {
                continue;
            }
            if let Some(h) = hops {
                // Hop-guided mode: insist on strict progress.
                if h[arc.nextstate] != h[current].wrapping_sub(1) {
                    continue;
                }
            }
            let better = match best {
                None => true,
                Some(b) => {
                    let key = |a: &Arc| (a.nextstate, a.ilabel, a.olabel, a.weight.value().to_bits());
                    key(arc) < key(b)
                }
            };
            if better {
                best = Some(arc);
            }
        }
        let arc = *best?;
        arcs.push(arc);
        current = arc.nextstate;
        if hops.is_none() && arcs.len() >= limit {
            // A lexicographic minimum would be a simple path; give up and
            // let the caller retry hop-guided.
            return None;
        }
    }
}
