//! Popularity and weak-popularity comparison of two b-matchings.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::instance::{AgentId, BMatching, EdgeId, Instance};

/// Per-rank counts of an agent's matched edges; `counts[i]` is the number
/// of rank `i + 1` edges.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<u32>);

/// Sorted ranks of an edge set at one agent, padded with `max_rank + 1`
/// up to `max_agent_degree` positions.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankTuple(pub Vec<u32>);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    FirstMorePopular,
    SecondMorePopular,
    Tie,
}

impl Verdict {
    fn from_scores(first: i64, second: i64) -> Self {
        match first.cmp(&second) {
            Ordering::Greater => Verdict::FirstMorePopular,
            Ordering::Less => Verdict::SecondMorePopular,
            Ordering::Equal => Verdict::Tie,
        }
    }

    pub fn mirrored(self) -> Self {
        match self {
            Verdict::FirstMorePopular => Verdict::SecondMorePopular,
            Verdict::SecondMorePopular => Verdict::FirstMorePopular,
            Verdict::Tie => Verdict::Tie,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PopularityComparison {
    pub prefer_first: usize,
    pub prefer_second: usize,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakComparison {
    /// Indexed by agent; positive when the agent does better in the first matching.
    pub per_agent_gain: Vec<i64>,
    pub total: i64,
    pub verdict: Verdict,
}

fn check_agent(inst: &Instance, a: AgentId) -> Result<()> {
    if a >= inst.num_agents() {
        return Err(Error::UnknownAgent(format!("#{a}")));
    }
    Ok(())
}

pub fn signature(inst: &Instance, m: &BMatching, a: AgentId) -> Result<Signature> {
    check_agent(inst, a)?;
    let mut counts = vec![0u32; inst.max_rank() as usize];
    for e in inst.agent_edges(a).filter(|&e| m.contains(e)) {
        counts[inst.edge(e).rank as usize - 1] += 1;
    }
    Ok(Signature(counts))
}

/// `Greater` when `s1` is lexicographically preferred to `s2`.
pub fn compare_signatures(s1: &Signature, s2: &Signature) -> Result<Ordering> {
    if s1.0.len() != s2.0.len() {
        return Err(Error::LengthMismatch(s1.0.len(), s2.0.len()));
    }
    Ok(s1.0.cmp(&s2.0))
}

pub fn more_popular(inst: &Instance, m1: &BMatching, m2: &BMatching) -> PopularityComparison {
    let (mut first, mut second) = (0, 0);
    for a in 0..inst.num_agents() {
        let s1 = signature(inst, m1, a).expect("agent in range");
        let s2 = signature(inst, m2, a).expect("agent in range");
        match s1.0.cmp(&s2.0) {
            Ordering::Greater => first += 1,
            Ordering::Less => second += 1,
            Ordering::Equal => {}
        }
    }
    PopularityComparison {
        prefer_first: first,
        prefer_second: second,
        verdict: Verdict::from_scores(first as i64, second as i64),
    }
}

pub fn rank_tuple(inst: &Instance, a: AgentId, edge_set: &[EdgeId]) -> Result<RankTuple> {
    check_agent(inst, a)?;
    let mut ranks = Vec::with_capacity(edge_set.len());
    for &e in edge_set {
        let edge = inst.edge(e);
        if edge.agent != a {
            return Err(Error::NotIncident {
                agent: inst.agent_name(edge.agent).to_string(),
                house: inst.house_name(edge.house).to_string(),
                expected: inst.agent_name(a).to_string(),
            });
        }
        ranks.push(edge.rank);
    }
    Ok(RankTuple(padded_ranks(
        ranks,
        inst.max_agent_degree(),
        inst.max_rank() + 1,
    )))
}

fn padded_ranks(mut ranks: Vec<u32>, len: usize, pad: u32) -> Vec<u32> {
    ranks.sort_unstable();
    ranks.resize(len.max(ranks.len()), pad);
    ranks
}

/// Sum of signum over positions of `t1 - t2`.
pub fn tuple_difference(t1: &RankTuple, t2: &RankTuple) -> i64 {
    t1.0.iter()
        .zip(&t2.0)
        .map(|(x, y)| (*x as i64 - *y as i64).signum())
        .sum()
}

/// Normalized gain of `a` when moving from `m2` to `m1`: positive when
/// the agent's edges exclusive to `m1` rank better than those exclusive
/// to `m2`.
pub fn agent_gain(inst: &Instance, m1: &BMatching, m2: &BMatching, a: AgentId) -> Result<i64> {
    check_agent(inst, a)?;
    let only1: Vec<EdgeId> = inst
        .agent_edges(a)
        .filter(|&e| m1.contains(e) && !m2.contains(e))
        .collect();
    let only2: Vec<EdgeId> = inst
        .agent_edges(a)
        .filter(|&e| m2.contains(e) && !m1.contains(e))
        .collect();
    let t1 = rank_tuple(inst, a, &only1)?;
    let t2 = rank_tuple(inst, a, &only2)?;
    Ok(-tuple_difference(&t1, &t2))
}

pub fn more_weakly_popular(inst: &Instance, m1: &BMatching, m2: &BMatching) -> WeakComparison {
    let per_agent_gain: Vec<i64> = (0..inst.num_agents())
        .map(|a| agent_gain(inst, m1, m2, a).expect("agent in range"))
        .collect();
    let total = per_agent_gain.iter().sum();
    WeakComparison {
        per_agent_gain,
        total,
        verdict: Verdict::from_scores(total, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn m(inst: &Instance, ids: &[EdgeId]) -> BMatching {
        BMatching::from_edge_ids(inst, ids.iter().copied()).unwrap()
    }

    #[test]
    fn signatures() {
        let inst = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        assert_eq!(signature(&inst, &m(&inst, &[0, 1]), 0).unwrap().0, vec![1, 1]);
        let inst3 = Instance::from_parts(&[1], &[1], &[(0, 0, 3)]).unwrap();
        assert_eq!(signature(&inst3, &BMatching::empty(&inst3), 0).unwrap().0, vec![0, 0, 0]);
        let tie = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 2), (0, 1, 2)]).unwrap();
        assert_eq!(signature(&tie, &m(&tie, &[0, 1]), 0).unwrap().0, vec![0, 2]);
        assert!(matches!(signature(&tie, &BMatching::empty(&tie), 4), Err(Error::UnknownAgent(_))));
    }

    #[test]
    fn lexicographic_order() {
        let s = |v: &[u32]| Signature(v.to_vec());
        assert_eq!(compare_signatures(&s(&[1, 0]), &s(&[0, 1])).unwrap(), Ordering::Greater);
        assert_eq!(compare_signatures(&s(&[2, 1]), &s(&[2, 1])).unwrap(), Ordering::Equal);
        assert_eq!(compare_signatures(&s(&[0, 2]), &s(&[1, 0])).unwrap(), Ordering::Less);
        assert_eq!(compare_signatures(&s(&[1]), &s(&[1, 0])), Err(Error::LengthMismatch(1, 2)));
    }

    #[test]
    fn popularity_counts() {
        let inst = Instance::from_parts(&[1], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        let (m1, m2) = (m(&inst, &[0]), m(&inst, &[1]));
        let same = more_popular(&inst, &m1, &m1);
        assert_eq!((same.prefer_first, same.prefer_second, same.verdict), (0, 0, Verdict::Tie));
        let c = more_popular(&inst, &m1, &m2);
        assert_eq!((c.prefer_first, c.prefer_second, c.verdict), (1, 0, Verdict::FirstMorePopular));

        // two agents trading one rank-1 house
        let swap = Instance::from_parts(&[1, 1], &[1], &[(0, 0, 1), (1, 0, 1)]).unwrap();
        let c = more_popular(&swap, &m(&swap, &[0]), &m(&swap, &[1]));
        assert_eq!((c.prefer_first, c.prefer_second, c.verdict), (1, 1, Verdict::Tie));
    }

    #[test]
    fn rank_tuples() {
        // d = 3, r = 2
        let inst = Instance::from_parts(&[3], &[1, 1, 1], &[(0, 0, 1), (0, 1, 2), (0, 2, 2)]).unwrap();
        assert_eq!(rank_tuple(&inst, 0, &[1, 0]).unwrap().0, vec![1, 2, 3]);
        // d = 2, r = 2
        let inst = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        assert_eq!(rank_tuple(&inst, 0, &[]).unwrap().0, vec![3, 3]);
        // d = 2, r = 3
        let inst = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 3), (0, 1, 1)]).unwrap();
        let e3 = inst.find_edge(0, 0).unwrap();
        assert_eq!(rank_tuple(&inst, 0, &[e3]).unwrap().0, vec![3, 4]);
        let two = Instance::from_parts(&[1, 1], &[1], &[(0, 0, 1), (1, 0, 1)]).unwrap();
        assert!(matches!(rank_tuple(&two, 0, &[1]), Err(Error::NotIncident { .. })));
    }

    #[test]
    fn agent_gains() {
        // d = 2, r = 2
        let inst = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        assert_eq!(agent_gain(&inst, &m(&inst, &[0]), &m(&inst, &[1]), 0).unwrap(), 1);
        assert_eq!(agent_gain(&inst, &m(&inst, &[0]), &m(&inst, &[0]), 0).unwrap(), 0);
        assert_eq!(agent_gain(&inst, &m(&inst, &[0, 1]), &BMatching::empty(&inst), 0).unwrap(), 2);
    }

    #[test]
    fn weak_totals() {
        let inst = Instance::from_parts(&[1, 1], &[1, 1], &[(0, 0, 1), (0, 1, 2), (1, 1, 1)]).unwrap();
        let base = m(&inst, &[1]);
        let same = more_weakly_popular(&inst, &base, &base);
        assert_eq!((same.total, same.verdict), (0, Verdict::Tie));
        // agent 0 moves from rank 2 to rank 1, agent 1 untouched
        let better = m(&inst, &[0]);
        let c = more_weakly_popular(&inst, &better, &base);
        assert_eq!((c.total, c.verdict), (1, Verdict::FirstMorePopular));

        // x (cap 2) gains two rank-1 houses, y loses one of them
        let inst = Instance::from_parts(
            &[2, 1],
            &[1, 1],
            &[(0, 0, 1), (0, 1, 1), (1, 0, 1)],
        )
        .unwrap();
        let before = m(&inst, &[2]);
        let after = m(&inst, &[0, 1]);
        let c = more_weakly_popular(&inst, &after, &before);
        assert_eq!(c.per_agent_gain, vec![2, -1]);
        assert_eq!((c.total, c.verdict), (1, Verdict::FirstMorePopular));
        // head-count popularity sees a tie here
        assert_eq!(more_popular(&inst, &after, &before).verdict, Verdict::Tie);
    }

    fn small_case() -> impl Strategy<Value = (Instance, Vec<bool>, Vec<bool>)> {
        prop::collection::vec(0u32..4, 6).prop_flat_map(|ranks| {
            let edges: Vec<_> = ranks
                .iter()
                .enumerate()
                .filter(|(_, &r)| r > 0)
                .map(|(i, &r)| (i / 3, i % 3, r))
                .collect();
            let inst = Instance::from_parts(&[2, 2], &[2, 2, 2], &edges).unwrap();
            let n = inst.num_edges();
            (
                Just(inst),
                prop::collection::vec(any::<bool>(), n),
                prop::collection::vec(any::<bool>(), n),
            )
        })
    }

    proptest! {
        #[test]
        fn comparisons_are_antisymmetric((inst, x, y) in small_case()) {
            let m1 = BMatching::from_members_unchecked(x);
            let m2 = BMatching::from_members_unchecked(y);
            prop_assume!(m1.check_capacities(&inst).is_ok() && m2.check_capacities(&inst).is_ok());
            prop_assert_eq!(more_popular(&inst, &m1, &m2).verdict,
                more_popular(&inst, &m2, &m1).verdict.mirrored());
            for a in 0..inst.num_agents() {
                prop_assert_eq!(agent_gain(&inst, &m1, &m2, a).unwrap(),
                    -agent_gain(&inst, &m2, &m1, a).unwrap());
                let t = rank_tuple(&inst, a, &m1.edge_ids().filter(|&e| inst.edge(e).agent == a).collect::<Vec<_>>()).unwrap();
                prop_assert_eq!(t.0.len(), inst.max_agent_degree());
                prop_assert!(t.0.windows(2).all(|w| w[0] <= w[1]));
            }
        }
    }
}
