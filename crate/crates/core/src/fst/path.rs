use super::{Arc, Label, StateId, SymbolTable, Weight, EPSILON};

/// A single start-to-final path. Arcs are connected in order: the first
/// leaves `start` and each `nextstate` is the source of the following arc.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearPath {
    pub start: StateId,
    pub arcs: Vec<Arc>,
    pub total_weight: Weight,
}

impl LinearPath {
    pub fn input_labels(&self) -> Vec<Label> {
        self.arcs
            .iter()
            .map(|a| a.ilabel)
            .filter(|&l| l != EPSILON)
            .collect()
    }

    pub fn output_labels(&self) -> Vec<Label> {
        self.arcs
            .iter()
            .map(|a| a.olabel)
            .filter(|&l| l != EPSILON)
            .collect()
    }
}

/// Collects, for every arc emitting `unk_label`, the input labels consumed
/// from that arc up to (not including) the next arc with a non-epsilon
/// output. Epsilon and disambiguation inputs never appear in a span.
pub fn extract_unk_spans(
    path: &LinearPath,
    isyms: &SymbolTable,
    unk_label: Label,
) -> Vec<Vec<Label>> {
    let mut spans = Vec::new();
    let mut current: Option<Vec<Label>> = None;
    for arc in &path.arcs {
        if arc.olabel == unk_label {
            if let Some(span) = current.take() {
                spans.push(span);
            }
            current = Some(Vec::new());
        } else if arc.olabel != EPSILON {
            if let Some(span) = current.take() {
                spans.push(span);
            }
        }
        if let Some(span) = current.as_mut() {
            if arc.ilabel != EPSILON && !isyms.is_disambig(arc.ilabel) {
                span.push(arc.ilabel);
            }
        }
    }
    if let Some(span) = current.take() {
        spans.push(span);
    }
    spans
}

#[cfg(test)]
mod tests {
    use super::*;

    fn syms(names: &[&str]) -> SymbolTable {
        let mut table = SymbolTable::new();
        for name in names {
            table.add_symbol(name);
        }
        table
    }

    fn path_from(arcs: Vec<(Label, Label)>) -> LinearPath {
        let arcs = arcs
            .into_iter()
            .enumerate()
            .map(|(i, (il, ol))| Arc::new(il, ol, Weight::one(), i + 1))
            .collect();
        LinearPath {
            start: 0,
            arcs,
            total_weight: Weight::one(),
        }
    }

    #[test]
    fn span_covers_phones_until_next_output() {
        let isyms = syms(&["f", "ay", "r", "th", "ah", "k", "ae", "t", "#1"]);
        let osyms = syms(&["the", "[unk]", "cat"]);
        let unk = osyms.label("[unk]").unwrap();
        let the = osyms.label("the").unwrap();
        let cat = osyms.label("cat").unwrap();
        let l = |s: &str| isyms.label(s).unwrap();
        // the(th ah) [unk](f ay r) cat(k ae t)
        let path = path_from(vec![
            (l("th"), the),
            (l("ah"), EPSILON),
            (l("f"), unk),
            (l("ay"), EPSILON),
            (l("r"), EPSILON),
            (l("#1"), EPSILON),
            (l("k"), cat),
            (l("ae"), EPSILON),
            (l("t"), EPSILON),
        ]);
        let spans = extract_unk_spans(&path, &isyms, unk);
        assert_eq!(spans, vec![vec![l("f"), l("ay"), l("r")]]);
    }

    #[test]
    fn no_unk_arcs_gives_empty_list() {
        let isyms = syms(&["a"]);
        let osyms = syms(&["w"]);
        let path = path_from(vec![(1, 1)]);
        assert!(extract_unk_spans(&path, &isyms, osyms.label("w").unwrap() + 7).is_empty());
    }

    #[test]
    fn char_lexicon_span_joins_to_recovered_word() {
        let isyms = syms(&["f", "i", "r", "e", "o", "x", "#u1", "#u2"]);
        let osyms = syms(&["[unk]"]);
        let unk = osyms.label("[unk]").unwrap();
        let l = |s: &str| isyms.label(s).unwrap();
        let path = path_from(vec![
            (l("#u1"), unk),
            (l("f"), EPSILON),
            (l("i"), EPSILON),
            (l("r"), EPSILON),
            (l("e"), EPSILON),
            (l("f"), EPSILON),
            (l("o"), EPSILON),
            (l("x"), EPSILON),
            (l("#u2"), EPSILON),
        ]);
        let spans = extract_unk_spans(&path, &isyms, unk);
        assert_eq!(spans.len(), 1);
        let joined: String = spans[0]
            .iter()
            .map(|&l| isyms.symbol(l).unwrap())
            .collect();
        assert_eq!(joined, "firefox");
    }

    #[test]
    fn spans_never_contain_epsilon_or_disambig() {
        let isyms = syms(&["p", "#0", "#u1"]);
        let osyms = syms(&["[unk]"]);
        let unk = osyms.label("[unk]").unwrap();
        let l = |s: &str| isyms.label(s).unwrap();
        let path = path_from(vec![
            (l("#u1"), unk),
            (EPSILON, EPSILON),
            (l("p"), EPSILON),
            (l("#0"), EPSILON),
        ]);
        let spans = extract_unk_spans(&path, &isyms, unk);
        assert_eq!(spans, vec![vec![l("p")]]);
    }

    #[test]
    fn adjacent_unk_arcs_open_separate_spans() {
        let isyms = syms(&["p", "q"]);
        let osyms = syms(&["[unk]"]);
        let unk = osyms.label("[unk]").unwrap();
        let l = |s: &str| isyms.label(s).unwrap();
        let path = path_from(vec![(l("p"), unk), (l("q"), unk)]);
        let spans = extract_unk_spans(&path, &isyms, unk);
        assert_eq!(spans, vec![vec![l("p")], vec![l("q")]]);
    }
}
