//! 3-CNF formulas in DIMACS form and a truth-table solver.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::io::parse_int;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CnfFormula {
    pub variable_count: usize,
    /// Nonzero literals; `-v` is the negation of variable `v`.
    pub clauses: Vec<[i32; 3]>,
}

/// Largest variable count [`solve_3sat`] accepts.
pub const MAX_SAT_VARIABLES: usize = 20;

impl CnfFormula {
    pub fn new(variable_count: usize, clauses: Vec<[i32; 3]>) -> Result<Self> {
        for c in &clauses {
            if c.iter().any(|&l| l == 0 || l.unsigned_abs() as usize > variable_count) {
                return Err(Error::Malformed(format!("clause {c:?} has an out-of-range literal")));
            }
        }
        Ok(CnfFormula { variable_count, clauses })
    }

    /// Reads DIMACS CNF restricted to clauses of exactly three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut vars = None;
        let mut clauses = Vec::new();
        let mut current = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let t = line.trim();
            if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
                continue;
            }
            if t.starts_with('p') {
                let toks: Vec<&str> = t.split_whitespace().collect();
                if toks.len() != 4 || toks[1] != "cnf" {
                    return Err(Error::Syntax { line: line_no, message: "expected `p cnf <vars> <clauses>`".into() });
                }
                vars = Some(parse_int(line_no, toks[2])? as usize);
                continue;
            }
            for tok in t.split_whitespace() {
                let lit = parse_int(line_no, tok)?;
                if lit == 0 {
                    let c: [i32; 3] = current.as_slice().try_into().map_err(|_| Error::Syntax {
                        line: line_no,
                        message: format!("clause has {} literals, expected 3", current.len()),
                    })?;
                    clauses.push(c);
                    current.clear();
                } else {
                    current.push(lit as i32);
                }
            }
        }
        if !current.is_empty() {
            return Err(Error::Malformed("unterminated clause".into()));
        }
        let vars = vars.ok_or_else(|| Error::Malformed("missing `p cnf` header".into()))?;
        Self::new(vars, clauses)
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.variable_count, self.clauses.len());
        for [x, y, z] in &self.clauses {
            writeln!(out, "{x} {y} {z} 0").unwrap();
        }
        out
    }

    /// `assign[v - 1]` is the value of variable `v`.
    pub fn is_satisfied_by(&self, assign: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|&l| assign[l.unsigned_abs() as usize - 1] == (l > 0))
        })
    }
}

/// First satisfying assignment in truth-table order, or `None`.
pub fn solve_3sat(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    if f.variable_count > MAX_SAT_VARIABLES {
        return Err(Error::SizeLimit(format!(
            "{} variables (limit {MAX_SAT_VARIABLES})",
            f.variable_count
        )));
    }
    for bits in 0u32..1 << f.variable_count {
        let assign: Vec<bool> = (0..f.variable_count).map(|i| bits >> i & 1 == 1).collect();
        if f.is_satisfied_by(&assign) {
            return Ok(Some(assign));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let forced = CnfFormula::new(1, vec![[1, 1, 1]]).unwrap();
        assert_eq!(solve_3sat(&forced).unwrap(), Some(vec![true]));
        let mixed = CnfFormula::new(3, vec![[1, 2, 3], [-1, -2, -3]]).unwrap();
        let a = solve_3sat(&mixed).unwrap().unwrap();
        assert!(a.iter().any(|&v| v) && a.iter().any(|&v| !v));
        let contra = CnfFormula::new(1, vec![[1, 1, 1], [-1, -1, -1]]).unwrap();
        assert_eq!(solve_3sat(&contra).unwrap(), None);
    }

    #[test]
    fn dimacs() {
        let f = CnfFormula::parse_dimacs("c hi\np cnf 3 2\n1 -2 3 0\n-1 2\n3 0\n").unwrap();
        assert_eq!(f.clauses, vec![[1, -2, 3], [-1, 2, 3]]);
        assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
        assert!(CnfFormula::parse_dimacs("p cnf 2 1\n1 2 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("p cnf 2 1\n1 2 3 0\n").is_err());
        assert!(CnfFormula::parse_dimacs("1 2 3 0\n").is_err());
        assert!(solve_3sat(&CnfFormula::new(21, vec![]).unwrap()).is_err());
    }
}
