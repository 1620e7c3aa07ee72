//! Exhaustive definitional ground truth.
//!
//! Everything here follows the definitions literally: enumerate every
//! b-matching and compare. Nothing in this module consults the
//! certifier.

mod enumerate;
pub mod sat;
pub mod x3c;

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::Result;
use crate::instance::{AgentId, BMatching, Instance};
use crate::Mode;

pub use enumerate::{enumerate_b_matchings, enumeration_bound, BMatchingIter, DEFAULT_BUDGET};
pub use sat::{solve_3sat, CnfFormula};
pub use x3c::{solve_x3c, X3CInstance};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleVerdict {
    pub holds: bool,
    /// A matching beating the query, present iff `holds` is false.
    pub counterexample: Option<BMatching>,
}

/// Signature comparison of `a` in `x` against `y` on raw membership slices.
fn agent_preference(inst: &Instance, x: &[bool], y: &[bool], a: AgentId) -> Ordering {
    let edges = inst.agent_edges(a);
    let mut i = edges.start;
    while i < edges.end {
        let rank = inst.edge(i).rank;
        let mut diff = 0i64;
        while i < edges.end && inst.edge(i).rank == rank {
            diff += x[i] as i64 - y[i] as i64;
            i += 1;
        }
        if diff != 0 {
            return diff.cmp(&0);
        }
    }
    Ordering::Equal
}

/// Normalized gain of `a` moving from `y` to `x` (see [`crate::agent_gain`]).
fn agent_gain_raw(inst: &Instance, x: &[bool], y: &[bool], a: AgentId) -> i64 {
    let edges = inst.agent_edges(a);
    let pad = inst.max_rank() + 1;
    let mut only_x = edges.clone().filter(|&e| x[e] && !y[e]).map(|e| inst.edge(e).rank);
    let mut only_y = edges.filter(|&e| y[e] && !x[e]).map(|e| inst.edge(e).rank);
    let mut sum = 0i64;
    loop {
        match (only_x.next(), only_y.next()) {
            (None, None) => break,
            (p, q) => {
                let (p, q) = (p.unwrap_or(pad) as i64, q.unwrap_or(pad) as i64);
                sum += (p - q).signum();
            }
        }
    }
    -sum
}

/// True when `cand` is more popular (or more weakly popular) than `base`.
pub fn beats(inst: &Instance, cand: &BMatching, base: &BMatching, mode: Mode) -> bool {
    let (x, y) = (cand.members(), base.members());
    match mode {
        Mode::Popular => {
            let mut score = 0i64;
            for a in 0..inst.num_agents() {
                match agent_preference(inst, x, y, a) {
                    Ordering::Greater => score += 1,
                    Ordering::Less => score -= 1,
                    Ordering::Equal => {}
                }
            }
            score > 0
        }
        Mode::Weak => (0..inst.num_agents())
            .map(|a| agent_gain_raw(inst, x, y, a))
            .sum::<i64>()
            > 0,
    }
}

fn verdict(counterexample: Option<BMatching>) -> OracleVerdict {
    OracleVerdict {
        holds: counterexample.is_none(),
        counterexample,
    }
}

/// Decides (weak) popularity of `m` by comparing against every b-matching;
/// returns the first beating matching in enumeration order.
pub fn brute_check(inst: &Instance, m: &BMatching, mode: Mode, budget: u128) -> Result<OracleVerdict> {
    let found = enumerate_b_matchings(inst, budget)?.find(|cand| beats(inst, cand, m, mode));
    Ok(verdict(found))
}

/// Parallel [`brute_check`]; reports the same counterexample.
pub fn brute_check_par(inst: &Instance, m: &BMatching, mode: Mode, budget: u128) -> Result<OracleVerdict> {
    let all: Vec<BMatching> = enumerate_b_matchings(inst, budget)?.collect();
    let pos = all.par_iter().position_first(|cand| beats(inst, cand, m, mode));
    Ok(verdict(pos.map(|i| all[i].clone())))
}

/// For each matching of `all`, the index of its first beater in `all`.
///
/// Beaters found for earlier candidates are tried first, which only
/// changes how fast a beater is found, not whether one exists; the
/// reported index is then refined to the first one in order.
pub fn first_beaters(inst: &Instance, all: &[BMatching], mode: Mode) -> Vec<Option<usize>> {
    let mut recent: Vec<usize> = Vec::new();
    all.iter()
        .map(|m| {
            let quick = recent.iter().copied().find(|&i| beats(inst, &all[i], m, mode));
            let hit = match quick {
                Some(q) => (0..q).find(|&i| beats(inst, &all[i], m, mode)).or(Some(q)),
                None => (0..all.len()).find(|&i| beats(inst, &all[i], m, mode)),
            };
            if let Some(i) = hit {
                if !recent.contains(&i) {
                    recent.insert(0, i);
                    recent.truncate(16);
                }
            }
            hit
        })
        .collect()
}

/// Returns the first b-matching (in enumeration order) that no other
/// b-matching beats, or `None`.
pub fn brute_find(inst: &Instance, mode: Mode, budget: u128) -> Result<Option<BMatching>> {
    let all: Vec<BMatching> = enumerate_b_matchings(inst, budget)?.collect();
    let mut recent: Vec<usize> = Vec::new();
    for m in &all {
        let quick = recent.iter().copied().find(|&i| beats(inst, &all[i], m, mode));
        if quick.is_some() {
            continue;
        }
        match (0..all.len()).find(|&i| beats(inst, &all[i], m, mode)) {
            None => return Ok(Some(m.clone())),
            Some(i) => {
                recent.insert(0, i);
                recent.truncate(16);
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::{more_popular, more_weakly_popular, Verdict};

    fn pair_instance() -> Instance {
        Instance::from_parts(&[1], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap()
    }

    fn m(inst: &Instance, ids: &[usize]) -> BMatching {
        BMatching::from_edge_ids(inst, ids.iter().copied()).unwrap()
    }

    #[test]
    fn brute_check_examples() {
        let inst = pair_instance();
        for mode in [Mode::Popular, Mode::Weak] {
            assert!(brute_check(&inst, &m(&inst, &[0]), mode, DEFAULT_BUDGET).unwrap().holds);
            let v = brute_check(&inst, &m(&inst, &[1]), mode, DEFAULT_BUDGET).unwrap();
            assert!(!v.holds);
            assert_eq!(v.counterexample, Some(m(&inst, &[0])));
            let v = brute_check(&inst, &BMatching::empty(&inst), mode, DEFAULT_BUDGET).unwrap();
            assert!(!v.holds);
            let par = brute_check_par(&inst, &BMatching::empty(&inst), mode, DEFAULT_BUDGET).unwrap();
            assert_eq!(par, v);
        }
    }

    #[test]
    fn brute_find_examples() {
        let one = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        assert_eq!(brute_find(&one, Mode::Popular, DEFAULT_BUDGET).unwrap(), Some(m(&one, &[0])));
        let inst = pair_instance();
        assert_eq!(brute_find(&inst, Mode::Weak, DEFAULT_BUDGET).unwrap(), Some(m(&inst, &[0])));
        // three agents with identical strict preferences over three houses
        let edges: Vec<_> = (0..3).flat_map(|a| (0..3).map(move |h| (a, h, h as u32 + 1))).collect();
        let clash = Instance::from_parts(&[1; 3], &[1; 3], &edges).unwrap();
        assert_eq!(brute_find(&clash, Mode::Popular, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn raw_comparisons_match_instance_core() {
        let edges = [(0, 0, 1), (0, 1, 2), (1, 0, 1), (1, 2, 2), (2, 1, 1), (2, 2, 3)];
        let inst = Instance::from_parts(&[2, 1, 2], &[1, 2, 1], &edges).unwrap();
        let all: Vec<_> = enumerate_b_matchings(&inst, DEFAULT_BUDGET).unwrap().collect();
        for x in &all {
            for y in &all {
                assert_eq!(
                    beats(&inst, x, y, Mode::Popular),
                    more_popular(&inst, x, y).verdict == Verdict::FirstMorePopular
                );
                assert_eq!(
                    beats(&inst, x, y, Mode::Weak),
                    more_weakly_popular(&inst, x, y).verdict == Verdict::FirstMorePopular
                );
            }
        }
        let fb = first_beaters(&inst, &all, Mode::Popular);
        for (j, hit) in fb.iter().enumerate() {
            let direct = (0..all.len()).find(|&i| beats(&inst, &all[i], &all[j], Mode::Popular));
            assert_eq!(*hit, direct);
        }
    }
}
