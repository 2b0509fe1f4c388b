use std::collections::HashMap;

use thiserror::Error;

use super::Label;

pub const EPS_SYMBOL: &str = "<eps>";

#[derive(Debug, Error)]
pub enum SymbolTableError {
    #[error("malformed symbol table line {line}: {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("duplicate symbol {0:?}")]
    DuplicateSymbol(String),
    #[error("duplicate label id {0}")]
    DuplicateId(Label),
    #[error("symbol ids must be dense from 0; missing id {0}")]
    MissingId(Label),
    #[error("id 0 must map to {EPS_SYMBOL}, got {0:?}")]
    BadEpsilon(String),
}

/// Bidirectional symbol <-> label map. Label 0 is always `<eps>`.
/// Symbols whose names start with `#` are treated as disambiguation
/// symbols by the graph operations.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    symbols: Vec<String>,
    ids: HashMap<String, Label>,
}

impl Default for SymbolTable {
    fn default() -> Self {
        Self::new()
    }
}

impl SymbolTable {
    pub fn new() -> Self {
        let mut table = SymbolTable {
            symbols: Vec::new(),
            ids: HashMap::new(),
        };
        table.add_symbol(EPS_SYMBOL);
        table
    }

    /// Interns a symbol, returning its (possibly existing) label.
    pub fn add_symbol(&mut self, symbol: &str) -> Label {
        if let Some(&id) = self.ids.get(symbol) {
            return id;
        }
        let id = self.symbols.len() as Label;
        self.symbols.push(symbol.to_string());
        self.ids.insert(symbol.to_string(), id);
        id
    }

    pub fn label(&self, symbol: &str) -> Option<Label> {
        self.ids.get(symbol).copied()
    }

    pub fn symbol(&self, label: Label) -> Option<&str> {
        self.symbols.get(label as usize).map(String::as_str)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.ids.contains_key(symbol)
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn iter(&self) -> impl Iterator<Item = (Label, &str)> {
        self.symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (i as Label, s.as_str()))
    }

    /// Disambiguation symbols are ordinary symbols named with a `#` prefix.
    pub fn is_disambig(&self, label: Label) -> bool {
        self.symbol(label).is_some_and(|s| s.starts_with('#'))
    }

    /// Parses "symbol<TAB>id" lines. Ids must be dense from 0 and id 0 must
    /// be `<eps>`.
    pub fn read_text(text: &str) -> Result<Self, SymbolTableError> {
        let mut entries: Vec<(String, Label)> = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split_whitespace();
            let (sym, id) = match (fields.next(), fields.next(), fields.next()) {
                (Some(sym), Some(id), None) => (sym, id),
                _ => {
                    return Err(SymbolTableError::MalformedLine {
                        line: idx + 1,
                        text: line.to_string(),
                    })
                }
            };
            let id: Label = id.parse().map_err(|_| SymbolTableError::MalformedLine {
                line: idx + 1,
                text: line.to_string(),
            })?;
            entries.push((sym.to_string(), id));
        }
        let mut symbols: Vec<Option<String>> = vec![None; entries.len()];
        for (sym, id) in entries {
            let slot = symbols
                .get_mut(id as usize)
                .ok_or(SymbolTableError::MissingId(id))?;
            if slot.is_some() {
                return Err(SymbolTableError::DuplicateId(id));
            }
            *slot = Some(sym);
        }
        let mut table = SymbolTable {
            symbols: Vec::new(),
            ids: HashMap::new(),
        };
        for (id, sym) in symbols.into_iter().enumerate() {
            let sym = sym.ok_or(SymbolTableError::MissingId(id as Label))?;
            if table.ids.contains_key(&sym) {
                return Err(SymbolTableError::DuplicateSymbol(sym));
            }
            table.ids.insert(sym.clone(), id as Label);
            table.symbols.push(sym);
        }
        match table.symbols.first() {
            Some(s) if s == EPS_SYMBOL => Ok(table),
            Some(s) => Err(SymbolTableError::BadEpsilon(s.clone())),
            None => Err(SymbolTableError::MissingId(0)),
        }
    }

    pub fn write_text(&self) -> String {
        let mut out = String::new();
        for (id, sym) in self.iter() {
            out.push_str(sym);
            out.push('\t');
            out.push_str(&id.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epsilon_is_reserved() {
        let table = SymbolTable::new();
        assert_eq!(table.label(EPS_SYMBOL), Some(0));
        assert_eq!(table.symbol(0), Some(EPS_SYMBOL));
    }

    #[test]
    fn interning_is_idempotent() {
        let mut table = SymbolTable::new();
        let a = table.add_symbol("a");
        assert_eq!(table.add_symbol("a"), a);
        assert_eq!(table.len(), 2);
    }

    #[test]
    fn disambig_by_name_prefix() {
        let mut table = SymbolTable::new();
        let d = table.add_symbol("#1");
        let a = table.add_symbol("a");
        assert!(table.is_disambig(d));
        assert!(!table.is_disambig(a));
        assert!(!table.is_disambig(0));
    }

    #[test]
    fn round_trips_through_text() {
        let mut table = SymbolTable::new();
        table.add_symbol("ah");
        table.add_symbol("#0");
        let text = table.write_text();
        let back = SymbolTable::read_text(&text).unwrap();
        assert_eq!(table, back);
    }

    #[test]
    fn read_rejects_missing_epsilon() {
        assert!(SymbolTable::read_text("a\t0\nb\t1\n").is_err());
    }

    #[test]
    fn read_rejects_gaps() {
        assert!(SymbolTable::read_text("<eps>\t0\nb\t2\n").is_err());
    }
}
