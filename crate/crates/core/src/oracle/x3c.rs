//! Exact cover by 3-sets.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::tokenized_lines;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct X3CInstance {
    pub elements: Vec<String>,
    /// Named triples of element indices.
    pub triples: Vec<(String, [usize; 3])>,
}

/// Largest ground set [`solve_x3c`] accepts.
pub const MAX_X3C_ELEMENTS: usize = 12;

impl X3CInstance {
    pub fn new(elements: Vec<String>, triples: Vec<(String, [usize; 3])>) -> Result<Self> {
        if !elements.len().is_multiple_of(3) {
            return Err(Error::Malformed(format!(
                "ground set size {} is not divisible by 3",
                elements.len()
            )));
        }
        for (name, t) in &triples {
            if t.iter().any(|&e| e >= elements.len()) || t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(Error::Malformed(format!("triple {name} is not 3 distinct elements")));
            }
        }
        Ok(X3CInstance { elements, triples })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut elements = Vec::new();
        let mut index = HashMap::new();
        let mut triples = Vec::new();
        for (line, toks) in tokenized_lines(text) {
            match (toks[0], toks.len()) {
                ("element", 2) => {
                    if index.insert(toks[1].to_string(), elements.len()).is_some() {
                        return Err(Error::DuplicateVertex(toks[1].to_string()));
                    }
                    elements.push(toks[1].to_string());
                }
                ("set", 5) => {
                    let mut t = [0usize; 3];
                    for (slot, tok) in t.iter_mut().zip(&toks[2..]) {
                        *slot = *index
                            .get(*tok)
                            .ok_or_else(|| Error::UnknownVertex(tok.to_string()))?;
                    }
                    triples.push((toks[1].to_string(), t));
                }
                _ => {
                    return Err(Error::Syntax {
                        line,
                        message: "expected `element <id>` or `set <name> <e1> <e2> <e3>`".into(),
                    })
                }
            }
        }
        Self::new(elements, triples)
    }

    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for e in &self.elements {
            writeln!(out, "element {e}").unwrap();
        }
        for (name, t) in &self.triples {
            let [x, y, z] = t.map(|i| self.elements[i].as_str());
            writeln!(out, "set {name} {x} {y} {z}").unwrap();
        }
        out
    }

    /// True when the triples at `chosen` partition the ground set.
    pub fn is_exact_cover(&self, chosen: &[usize]) -> bool {
        let mut hit = vec![0u32; self.elements.len()];
        for &i in chosen {
            for &e in &self.triples[i].1 {
                hit[e] += 1;
            }
        }
        hit.iter().all(|&c| c == 1)
    }
}

/// Returns indices of triples forming an exact cover, or `None`.
///
/// Exhaustive backtracking: the smallest uncovered element is covered by
/// each compatible triple in turn.
pub fn solve_x3c(x: &X3CInstance) -> Result<Option<Vec<usize>>> {
    if x.elements.len() > MAX_X3C_ELEMENTS {
        return Err(Error::SizeLimit(format!(
            "{} elements (limit {MAX_X3C_ELEMENTS})",
            x.elements.len()
        )));
    }
    fn rec(x: &X3CInstance, covered: &mut [bool], chosen: &mut Vec<usize>) -> bool {
        let Some(next) = covered.iter().position(|&c| !c) else {
            return true;
        };
        for (i, (_, t)) in x.triples.iter().enumerate() {
            if t.contains(&next) && t.iter().all(|&e| !covered[e]) {
                t.iter().for_each(|&e| covered[e] = true);
                chosen.push(i);
                if rec(x, covered, chosen) {
                    return true;
                }
                chosen.pop();
                t.iter().for_each(|&e| covered[e] = false);
            }
        }
        false
    }
    let mut covered = vec![false; x.elements.len()];
    let mut chosen = Vec::new();
    if rec(x, &mut covered, &mut chosen) {
        chosen.sort_unstable();
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}
