//! Weakly popular b-matchings on instances with ranks 1 and 2 where every
//! agent has capacity 2 and at most one rank-1 edge.
//!
//! Both solvers split the edges by rank, choose a rank-1 matching that
//! backs every agent whose rank-2 edge could otherwise be displaced, and
//! assemble the two halves. Every result is checked by the certifier
//! before it is returned.

use std::fmt::Write as _;

use crate::certifier::verify;
use crate::engine::{
    alternating_reach, eou_labels, max_b_matching, partition_matching, saturating_max_matching,
    z_partition_matching, Component, EdgeSet, Graph, Label, PartitionSpec, ZSpec,
};
use crate::error::{Error, Result};
use crate::instance::{AgentId, BMatching, EdgeId, HouseId, Instance};
use crate::io::serialize_matching;
use crate::Mode;

/// Rank-1 and rank-2 subgraphs with unit agent capacities. House
/// capacities are `b(h)` at rank 1 and `max(0, b(h) - deg_E1(h))` at
/// rank 2.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankSplit {
    pub g1: Graph,
    pub g2: Graph,
}

pub fn split_ranks(inst: &Instance) -> Result<RankSplit> {
    if let Some(e) = inst.edges().iter().find(|e| e.rank > 2) {
        return Err(Error::Precondition(format!(
            "edge ({}, {}) has rank {}; only ranks 1 and 2 are supported",
            inst.agent_name(e.agent),
            inst.house_name(e.house),
            e.rank
        )));
    }
    let deg1 = |h: HouseId| inst.house_edges(h).iter().filter(|&&e| inst.edge(e).rank == 1).count() as u32;
    let b1 = (0..inst.num_houses()).map(|h| inst.house_capacity(h)).collect();
    let b2 = (0..inst.num_houses()).map(|h| inst.house_capacity(h).saturating_sub(deg1(h))).collect();
    let na = inst.num_agents();
    Ok(RankSplit {
        g1: Graph::from_instance(inst, |e| inst.edge(e).rank == 1, vec![1; na], b1),
        g2: Graph::from_instance(inst, |e| inst.edge(e).rank == 2, vec![1; na], b2),
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverReport {
    pub result: Option<BMatching>,
    pub trace: Vec<String>,
}

impl SolverReport {
    /// Matching file (empty when there is none) followed by the trace as
    /// `#` comments.
    pub fn serialize(&self, inst: &Instance) -> String {
        let mut out = match &self.result {
            Some(m) => serialize_matching(inst, m),
            None => String::new(),
        };
        out.push_str("# trace:\n");
        for line in &self.trace {
            writeln!(out, "#   {line}").unwrap();
        }
        out
    }
}

fn agent_list(inst: &Instance, agents: &[AgentId]) -> String {
    agents.iter().map(|&a| inst.agent_name(a)).collect::<Vec<_>>().join(" ")
}

fn check_capacity_two(inst: &Instance) -> Result<()> {
    for a in 0..inst.num_agents() {
        if inst.agent_capacity(a) != 2 {
            return Err(Error::Precondition(format!("agent {} must have capacity 2", inst.agent_name(a))));
        }
        let ones = inst.agent_edges(a).filter(|&e| inst.edge(e).rank == 1).count();
        if ones > 1 {
            return Err(Error::Precondition(format!("agent {} has more than one rank-1 edge", inst.agent_name(a))));
        }
    }
    Ok(())
}

fn to_instance_edges<'a>(g: &'a Graph, m: &'a [bool]) -> impl Iterator<Item = EdgeId> + 'a {
    m.iter().enumerate().filter(|(_, &x)| x).map(|(e, _)| g.origin(e).expect("graph built from the instance"))
}

/// Certifier gate: a rejected result is a solver defect, never repaired.
fn certified(inst: &Instance, edges: Vec<EdgeId>, trace: &mut Vec<String>) -> Result<BMatching> {
    let m = BMatching::from_edge_ids(inst, edges)?;
    trace.push(format!("assembly: {} edges", m.len()));
    if let Some(w) = verify(inst, &m, Mode::Weak).witness {
        return Err(Error::Discrepancy(format!(
            "assembled matching is not weakly popular ({} witness)",
            w.kind
        )));
    }
    Ok(m)
}

/// Two ranks, no ties, every agent of capacity 2.
pub fn algorithm_a(inst: &Instance) -> Result<SolverReport> {
    check_capacity_two(inst)?;
    let split = split_ranks(inst)?;
    for a in 0..inst.num_agents() {
        if inst.agent_edges(a).filter(|&e| inst.edge(e).rank == 2).count() > 1 {
            return Err(Error::Precondition(format!("agent {} has tied rank-2 edges", inst.agent_name(a))));
        }
    }
    let (g1, g2) = (&split.g1, &split.g2);
    let mut trace = vec![format!("split: {} rank-1 edges, {} rank-2 edges", g1.num_edges(), g2.num_edges())];
    let crowded: Vec<HouseId> = (0..inst.num_houses())
        .filter(|&h| g2.house_edges(h).len() as u32 > g2.house_cap(h))
        .collect();
    if crowded.is_empty() {
        trace.push("crowded houses: none".into());
        let (m1, m2) = (max_b_matching(g1), max_b_matching(g2));
        let edges = to_instance_edges(g1, &m1).chain(to_instance_edges(g2, &m2)).collect();
        let m = certified(inst, edges, &mut trace)?;
        return Ok(SolverReport { result: Some(m), trace });
    }
    trace.push(format!(
        "crowded houses: {}",
        crowded.iter().map(|&h| inst.house_name(h)).collect::<Vec<_>>().join(" ")
    ));
    let mut classes = Vec::new();
    let mut quotas = Vec::new();
    let mut names = Vec::new();
    let mut in_class = vec![false; inst.num_agents()];
    for &h in &crowded {
        let class: Vec<AgentId> = g2.house_edges(h).iter().map(|&e| g2.edge(e).0).collect();
        for &a in &class {
            in_class[a] = true;
        }
        trace.push(format!("class {}: k={} agents {}", inst.house_name(h), g2.house_cap(h), agent_list(inst, &class)));
        names.push(inst.house_name(h).to_string());
        classes.push(class);
        quotas.push(g2.house_cap(h) as usize);
    }
    let rest: Vec<AgentId> = (0..inst.num_agents()).filter(|&a| !in_class[a]).collect();
    names.push("rest".into());
    classes.push(rest.clone());
    quotas.push(0);
    let spec = PartitionSpec::new(inst.num_agents(), names, classes, quotas)?;
    let Some(m1) = partition_matching(g1, &spec)? else {
        trace.push("partition matching: does not exist".into());
        return Ok(SolverReport { result: None, trace });
    };
    trace.push(format!("partition matching: {} edges", Graph::size(&m1)));
    let matched = g1.matched_agents(&m1);
    let mut edges: Vec<EdgeId> = to_instance_edges(g1, &m1).collect();
    for (i, &h) in crowded.iter().enumerate() {
        let mut chosen: Vec<AgentId> = spec.classes[i].iter().copied().filter(|&a| matched[a]).collect();
        chosen.sort_unstable();
        chosen.truncate(spec.quotas[i]);
        for a in chosen {
            edges.push(inst.find_edge(a, h).unwrap());
        }
    }
    for a in rest {
        edges.extend(inst.agent_edges(a).filter(|&e| inst.edge(e).rank == 2));
    }
    let m = certified(inst, edges, &mut trace)?;
    Ok(SolverReport { result: Some(m), trace })
}

/// The z-partition input built from a maximum rank-2 matching `m2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct APrimePartition {
    pub zspec: ZSpec,
    pub m2: EdgeSet,
    /// Houses of each class's component (the remainder class has none).
    pub houses: Vec<Vec<HouseId>>,
}

/// Groups the E- and O-agents of the rank-2 graph: two agents share a
/// class when some house is reachable from both by alternating paths.
/// Each class gets the rank-2 graph on its agents and reachable houses as
/// its component; U-agents form a remainder class with quota 0.
pub fn build_aprime_partition(inst: &Instance) -> Result<APrimePartition> {
    check_capacity_two(inst)?;
    let split = split_ranks(inst)?;
    let g2 = &split.g2;
    let m2 = max_b_matching(g2);
    let labels = eou_labels(g2, &m2)?;
    let na = inst.num_agents();
    let mut houses_of: Vec<Vec<bool>> = vec![Vec::new(); na];
    for a in 0..na {
        if labels.agents[a] == Label::U {
            continue;
        }
        // alternating paths may leave a by either kind of edge
        let (_, mut hs) = alternating_reach(g2, &m2, a, false);
        let (_, more) = alternating_reach(g2, &m2, a, true);
        hs.iter_mut().zip(more).for_each(|(x, y)| *x |= y);
        houses_of[a] = hs;
    }
    // union agents sharing a reachable house
    let mut parent: Vec<usize> = (0..na).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let mut owner: Vec<Option<AgentId>> = vec![None; inst.num_houses()];
    for a in 0..na {
        for h in 0..houses_of[a].len() {
            if houses_of[a][h] {
                match owner[h] {
                    None => owner[h] = Some(a),
                    Some(b) => {
                        let (x, y) = (find(&mut parent, a), find(&mut parent, b));
                        parent[x] = y;
                    }
                }
            }
        }
    }
    let mut roots: Vec<usize> = Vec::new();
    let mut classes: Vec<Vec<AgentId>> = Vec::new();
    let mut rest = Vec::new();
    for a in 0..na {
        if labels.agents[a] == Label::U || !houses_of[a].contains(&true) {
            rest.push(a);
            continue;
        }
        let r = find(&mut parent, a);
        match roots.iter().position(|&x| x == r) {
            Some(i) => classes[i].push(a),
            None => {
                roots.push(r);
                classes.push(vec![a]);
            }
        }
    }
    let mut components = Vec::new();
    let mut houses = Vec::new();
    let mut quotas = Vec::new();
    let mut names = Vec::new();
    for class in &classes {
        let mut hs: Vec<HouseId> = (0..inst.num_houses())
            .filter(|&h| class.iter().any(|&a| houses_of[a][h]))
            .collect();
        hs.sort_unstable();
        let local_edges: Vec<(usize, usize)> = class
            .iter()
            .enumerate()
            .flat_map(|(i, &a)| g2.agent_edges(a).iter().map(move |&e| (i, g2.edge(e).1)))
            .filter_map(|(i, h)| hs.iter().position(|&x| x == h).map(|j| (i, j)))
            .collect();
        let caps = hs.iter().map(|&h| g2.house_cap(h)).collect();
        let graph = Graph::new(vec![1; class.len()], caps, local_edges)?;
        quotas.push(class.iter().map(|&a| g2.agent_degree(&m2, a) as usize).sum());
        names.push(format!("c{}", names.len() + 1));
        components.push(Component { agents: class.clone(), graph });
        houses.push(hs);
    }
    names.push("rest".into());
    quotas.push(0);
    components.push(Component::trivial(rest.clone()));
    houses.push(Vec::new());
    classes.push(rest);
    let partition = PartitionSpec::new(na, names, classes, quotas)?;
    let zspec = ZSpec::new(partition, components)?;
    Ok(APrimePartition { zspec, m2, houses })
}

/// Two ranks with ties allowed at rank 2, every agent of capacity 2 with
/// at most one rank-1 edge.
pub fn algorithm_a_prime(inst: &Instance) -> Result<SolverReport> {
    let split = split_ranks(inst)?;
    let part = build_aprime_partition(inst)?;
    let (g1, g2) = (&split.g1, &split.g2);
    let spec = &part.zspec;
    let mut trace = vec![format!("split: {} rank-1 edges, {} rank-2 edges", g1.num_edges(), g2.num_edges())];
    trace.push(format!("rank-2 maximum matching: {} edges", Graph::size(&part.m2)));
    for (i, class) in spec.partition.classes.iter().enumerate() {
        trace.push(format!(
            "class {}: k={} agents {}",
            spec.partition.names[i],
            spec.targets[i],
            agent_list(inst, class)
        ));
    }
    let Some(m1) = z_partition_matching(g1, spec)? else {
        trace.push("z-partition matching: does not exist".into());
        return Ok(SolverReport { result: None, trace });
    };
    trace.push(format!("z-partition matching: {} edges", Graph::size(&m1)));
    let matched = g1.matched_agents(&m1);
    let mut edges: Vec<EdgeId> = to_instance_edges(g1, &m1).collect();
    let last = spec.components.len() - 1;
    for (i, comp) in spec.components.iter().enumerate() {
        if i == last {
            for &a in &comp.agents {
                edges.extend(g2.agent_edges(a).iter().filter(|&&e| part.m2[e]).map(|&e| g2.origin(e).unwrap()));
            }
            continue;
        }
        let local: Vec<bool> = comp.agents.iter().map(|&a| matched[a]).collect();
        let (_, cm) = saturating_max_matching(&comp.graph, &local);
        for (e, &inside) in cm.iter().enumerate() {
            if inside {
                let (la, lh) = comp.graph.edge(e);
                edges.push(inst.find_edge(comp.agents[la], part.houses[i][lh]).unwrap());
            }
        }
    }
    let m = certified(inst, edges, &mut trace)?;
    Ok(SolverReport { result: Some(m), trace })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::brute_find;

    #[test]
    fn split_examples() {
        let inst = Instance::from_parts(&[2], &[1], &[(0, 0, 1)]).unwrap();
        let s = split_ranks(&inst).unwrap();
        assert_eq!((s.g1.num_edges(), s.g2.num_edges()), (1, 0));

        let inst = Instance::from_parts(&[2, 2], &[1], &[(0, 0, 1), (1, 0, 2)]).unwrap();
        assert_eq!(split_ranks(&inst).unwrap().g2.house_cap(0), 0);

        let inst = Instance::from_parts(&[2], &[3], &[(0, 0, 1)]).unwrap();
        assert_eq!(split_ranks(&inst).unwrap().g2.house_cap(0), 2);

        let inst = Instance::from_parts(&[2], &[1], &[(0, 0, 3)]).unwrap();
        assert!(split_ranks(&inst).is_err());
    }

    #[test]
    fn crowded_house_gets_backed_agent() {
        // a1: h1 r1, h2 r2; a2: h3 r1, h2 r2
        let inst = Instance::from_parts(&[2, 2], &[1, 1, 1], &[(0, 0, 1), (0, 1, 2), (1, 2, 1), (1, 1, 2)]).unwrap();
        let r = algorithm_a(&inst).unwrap();
        let m = r.result.unwrap();
        assert_eq!(m.len(), 3);
        assert!(m.contains(inst.find_edge(0, 0).unwrap()) && m.contains(inst.find_edge(1, 2).unwrap()));
        assert!(crate::oracle::brute_check(&inst, &m, Mode::Weak, crate::oracle::DEFAULT_BUDGET).unwrap().holds);
        assert!(r.trace.iter().any(|l| l.starts_with("crowded houses: h2")));
    }

    #[test]
    fn uncrowded_is_union_of_maxima() {
        let inst = Instance::from_parts(&[2, 2], &[1, 1, 1], &[(0, 0, 1), (0, 1, 2), (1, 2, 2)]).unwrap();
        let r = algorithm_a(&inst).unwrap();
        assert_eq!(r.result.unwrap().len(), 3);
        assert!(r.trace.contains(&"crowded houses: none".to_string()));
    }

    #[test]
    fn unbackable_quota_gives_none() {
        // four agents want two rank-2 seats at h1 but only one can be backed
        // through the single rank-1 seat at h2
        let mut edges = vec![(4, 1, 1)];
        for a in 0..4 {
            edges.extend([(a, 1, 1), (a, 0, 2)]);
        }
        let inst = Instance::from_parts(&[2; 5], &[2, 1], &edges).unwrap();
        let r = algorithm_a(&inst).unwrap();
        assert_eq!(r.result, None);
        assert_eq!(r.trace.last().unwrap(), "partition matching: does not exist");
        assert_eq!(brute_find(&inst, Mode::Weak, crate::oracle::DEFAULT_BUDGET).unwrap(), None);
        assert_eq!(algorithm_a_prime(&inst).unwrap().result, None);
    }

    #[test]
    fn none_can_miss_a_weakly_popular_matching() {
        // three agents: rank 1 at h1 (cap 1), rank 2 at h2 (cap 2). The quota
        // of two backed agents is unreachable, yet {a1h1, a2h2, a3h2} is
        // weakly popular: every alternative trades one agent's gain for
        // another's loss.
        let mut edges = Vec::new();
        for a in 0..3 {
            edges.extend([(a, 0, 1), (a, 1, 2)]);
        }
        let inst = Instance::from_parts(&[2; 3], &[1, 2], &edges).unwrap();
        assert_eq!(algorithm_a(&inst).unwrap().result, None);
        let m = BMatching::from_edge_ids(&inst, [0, 3, 5]).unwrap();
        assert!(crate::oracle::brute_check(&inst, &m, Mode::Weak, crate::oracle::DEFAULT_BUDGET).unwrap().holds);
    }

    #[test]
    fn preconditions() {
        let inst = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        assert!(matches!(algorithm_a(&inst), Err(Error::Precondition(_))));
        let tied = Instance::from_parts(&[2], &[1, 1], &[(0, 0, 2), (0, 1, 2)]).unwrap();
        assert!(algorithm_a(&tied).is_err());
        assert!(build_aprime_partition(&tied).is_ok());
    }

    #[test]
    fn aprime_without_rank_two() {
        let inst = Instance::from_parts(&[2, 2], &[1], &[(0, 0, 1), (1, 0, 1)]).unwrap();
        let p = build_aprime_partition(&inst).unwrap();
        assert_eq!(p.zspec.partition.num_classes(), 1);
        assert_eq!(p.zspec.partition.quotas, vec![0]);
        assert_eq!(algorithm_a_prime(&inst).unwrap().result.unwrap().len(), 1);
    }

    #[test]
    fn aprime_groups_shared_house() {
        let inst = Instance::from_parts(&[2, 2], &[1, 1, 1], &[(0, 0, 1), (0, 1, 2), (1, 2, 1), (1, 1, 2)]).unwrap();
        let p = build_aprime_partition(&inst).unwrap();
        assert_eq!(p.zspec.partition.classes[0], vec![0, 1]);
        assert_eq!(p.zspec.targets[0], 1);
        let r = algorithm_a_prime(&inst).unwrap();
        assert_eq!(r.result, algorithm_a(&inst).unwrap().result);
    }

    #[test]
    fn report_text() {
        let inst = Instance::from_parts(&[2], &[1], &[(0, 0, 1)]).unwrap();
        let text = algorithm_a(&inst).unwrap().serialize(&inst);
        assert!(text.starts_with("a1 h1\n# trace:\n#   split:"));
    }
}
