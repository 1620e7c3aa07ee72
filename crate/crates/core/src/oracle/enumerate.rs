use crate::error::{Error, Result};
use crate::instance::{BMatching, EdgeId, Instance};

/// Default cap on the house-choice product bound.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Subsets of `edges` with at most `cap` elements: empty first, then by
/// size, each size in lexicographic order.
fn bounded_subsets(edges: &[EdgeId], cap: usize) -> Vec<Vec<EdgeId>> {
    fn rec(edges: &[EdgeId], start: usize, k: usize, cur: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..edges.len() {
            cur.push(edges[i]);
            rec(edges, i + 1, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in 0..=cap.min(edges.len()) {
        rec(edges, 0, k, &mut Vec::new(), &mut out);
    }
    out
}

/// Number of per-house choices multiplied over houses; an upper bound on
/// the number of b-matchings.
pub fn enumeration_bound(inst: &Instance) -> u128 {
    (0..inst.num_houses())
        .map(|h| {
            let n = inst.house_degree(h) as u128;
            let cap = inst.house_capacity(h) as u128;
            let mut total = 0u128;
            let mut binom = 1u128;
            for k in 0..=cap.min(n) {
                total += binom;
                binom = binom * (n - k) / (k + 1);
            }
            total
        })
        .fold(1u128, |acc, x| acc.saturating_mul(x))
}

/// Lazily yields every capacity-feasible edge subset exactly once.
///
/// Houses are processed in declaration order; for each house the
/// incident-edge choices are tried in [`bounded_subsets`] order and any
/// choice overflowing an agent capacity is pruned.
pub struct BMatchingIter<'a> {
    inst: &'a Instance,
    options: Vec<Vec<Vec<EdgeId>>>,
    pos: Vec<usize>,
    load: Vec<u32>,
    members: Vec<bool>,
    level: usize,
    started: bool,
    done: bool,
}

impl<'a> BMatchingIter<'a> {
    fn fits(&self, h: usize, opt: usize) -> bool {
        self.options[h][opt].iter().all(|&e| {
            let a = self.inst.edge(e).agent;
            let extra = self.options[h][opt]
                .iter()
                .filter(|&&f| self.inst.edge(f).agent == a)
                .count() as u32;
            self.load[a] + extra <= self.inst.agent_capacity(a)
        })
    }

    fn place(&mut self, h: usize, opt: usize, on: bool) {
        for i in 0..self.options[h][opt].len() {
            let e = self.options[h][opt][i];
            let a = self.inst.edge(e).agent;
            self.members[e] = on;
            if on {
                self.load[a] += 1;
            } else {
                self.load[a] -= 1;
            }
        }
    }
}

impl Iterator for BMatchingIter<'_> {
    type Item = BMatching;

    fn next(&mut self) -> Option<BMatching> {
        if self.done {
            return None;
        }
        let n = self.options.len();
        if !self.started {
            self.started = true;
            self.level = 0;
            if n > 0 {
                self.pos[0] = 0;
            }
        } else {
            if n == 0 {
                self.done = true;
                return None;
            }
            self.level = n - 1;
            let (k, p) = (self.level, self.pos[self.level]);
            self.place(k, p, false);
            self.pos[k] += 1;
        }
        loop {
            let k = self.level;
            if k == n {
                return Some(BMatching::from_members_unchecked(self.members.clone()));
            }
            while self.pos[k] < self.options[k].len() && !self.fits(k, self.pos[k]) {
                self.pos[k] += 1;
            }
            if self.pos[k] < self.options[k].len() {
                self.place(k, self.pos[k], true);
                self.level += 1;
                if self.level < n {
                    self.pos[self.level] = 0;
                }
            } else {
                if k == 0 {
                    self.done = true;
                    return None;
                }
                self.level -= 1;
                let (k, p) = (self.level, self.pos[self.level]);
                self.place(k, p, false);
                self.pos[k] += 1;
            }
        }
    }
}

/// Streams all b-matchings of `inst` after checking the budget.
pub fn enumerate_b_matchings(inst: &Instance, budget: u128) -> Result<BMatchingIter<'_>> {
    let bound = enumeration_bound(inst);
    if bound > budget {
        return Err(Error::BudgetExceeded { bound, budget });
    }
    let options: Vec<_> = (0..inst.num_houses())
        .map(|h| bounded_subsets(inst.house_edges(h), inst.house_capacity(h) as usize))
        .collect();
    Ok(BMatchingIter {
        inst,
        pos: vec![0; options.len()],
        options,
        load: vec![0; inst.num_agents()],
        members: vec![false; inst.num_edges()],
        level: 0,
        started: false,
        done: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn count(inst: &Instance) -> usize {
        enumerate_b_matchings(inst, DEFAULT_BUDGET).unwrap().count()
    }

    #[test]
    fn small_counts() {
        let one = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        let all: Vec<_> = enumerate_b_matchings(&one, DEFAULT_BUDGET).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert!(all[0].is_empty());
        let two = |cap| Instance::from_parts(&[cap], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        assert_eq!(count(&two(1)), 3);
        assert_eq!(count(&two(2)), 4);
        let none = Instance::from_parts(&[1], &[], &[]).unwrap();
        assert_eq!(count(&none), 1);
    }

    #[test]
    fn budget_enforced() {
        let inst = Instance::from_parts(&[1; 4], &[1], &[(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 0, 1)]).unwrap();
        assert_eq!(enumeration_bound(&inst), 5);
        assert!(matches!(
            enumerate_b_matchings(&inst, 4),
            Err(Error::BudgetExceeded { bound: 5, budget: 4 })
        ));
    }

    /// Independent count: filter the full powerset by capacities.
    fn powerset_count(inst: &Instance) -> usize {
        let n = inst.num_edges();
        (0u32..1 << n)
            .filter(|mask| {
                let ids = (0..n).filter(|i| mask >> i & 1 == 1);
                BMatching::from_edge_ids(inst, ids).is_ok()
            })
            .count()
    }

    proptest! {
        #[test]
        fn enumeration_complete(
            caps in prop::collection::vec(1u32..3, 6),
            present in prop::collection::vec(any::<bool>(), 9),
        ) {
            let edges: Vec<_> = present.iter().enumerate().filter(|(_, &p)| p)
                .map(|(i, _)| (i / 3, i % 3, 1 + (i % 2) as u32)).take(8).collect();
            let inst = Instance::from_parts(&caps[..3], &caps[3..], &edges).unwrap();
            let all: Vec<_> = enumerate_b_matchings(&inst, DEFAULT_BUDGET).unwrap().collect();
            let distinct: std::collections::HashSet<_> = all.iter().cloned().collect();
            prop_assert_eq!(distinct.len(), all.len());
            prop_assert_eq!(all.len(), powerset_count(&inst));
            prop_assert!(all.iter().all(|m| m.check_capacities(&inst).is_ok()));
        }
    }
}
