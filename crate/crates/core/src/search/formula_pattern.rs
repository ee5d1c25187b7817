use std::collections::BTreeMap;

use crate::chem::{Element, MolecularFormula};

use super::SearchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountPattern {
    Exact(u32),
    /// `?`: any count of at least one.
    Any,
}

/// Parsed formula query such as `C?H11`. Element order is irrelevant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaPattern {
    terms: BTreeMap<Element, CountPattern>,
}

impl FormulaPattern {
    pub fn parse(pattern: &str) -> Result<Self, SearchError> {
        let bad = |msg: String| SearchError::FormulaPattern(msg);
        let s = pattern.trim();
        if s.is_empty() {
            return Err(bad("empty formula".into()));
        }
        let bytes = s.as_bytes();
        let mut terms = BTreeMap::new();
        let mut i = 0;
        while i < bytes.len() {
            if !bytes[i].is_ascii_uppercase() {
                return Err(bad(format!("expected an element symbol at position {i} in '{s}'")));
            }
            let mut end = i + 1;
            if end < bytes.len() && bytes[end].is_ascii_lowercase() {
                end += 1;
            }
            let symbol = &s[i..end];
            let element =
                Element::from_symbol(symbol).ok_or_else(|| bad(format!("unknown element '{symbol}' in '{s}'")))?;
            let count = if end < bytes.len() && bytes[end] == b'?' {
                end += 1;
                CountPattern::Any
            } else {
                let start = end;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if start == end {
                    CountPattern::Exact(1)
                } else {
                    let n: u32 = s[start..end]
                        .parse()
                        .map_err(|_| bad(format!("count too large in '{s}'")))?;
                    if n == 0 {
                        return Err(bad(format!("zero count for {symbol} in '{s}'")));
                    }
                    CountPattern::Exact(n)
                }
            };
            if terms.insert(element, count).is_some() {
                return Err(bad(format!("element {symbol} appears twice in '{s}'")));
            }
            i = end;
        }
        Ok(FormulaPattern { terms })
    }

    /// The formula holds exactly the pattern's elements with matching counts.
    pub fn matches(&self, formula: &MolecularFormula) -> bool {
        formula.counts().len() == self.terms.len()
            && self.terms.iter().all(|(e, c)| match (c, formula.count(*e)) {
                (_, 0) => false,
                (CountPattern::Any, _) => true,
                (CountPattern::Exact(n), m) => *n == m,
            })
    }

    pub fn has_wildcard(&self) -> bool {
        self.terms.values().any(|c| *c == CountPattern::Any)
    }
}
