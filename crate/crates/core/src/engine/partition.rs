use std::collections::VecDeque;

use super::graph::{max_b_matching, EdgeSet, Graph};
use crate::error::{Error, Result};
use crate::instance::{AgentId, Instance};
use crate::io::{parse_int, tokenized_lines};

/// Partition of the agents into classes, each with a lower bound on the
/// number of its matched agents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartitionSpec {
    pub names: Vec<String>,
    pub classes: Vec<Vec<AgentId>>,
    pub quotas: Vec<usize>,
    class_of: Vec<usize>,
}

impl PartitionSpec {
    /// Checks disjointness, coverage of `0..num_agents` and `k_i <= |A_i|`.
    pub fn new(num_agents: usize, names: Vec<String>, classes: Vec<Vec<AgentId>>, quotas: Vec<usize>) -> Result<Self> {
        if names.len() != classes.len() || quotas.len() != classes.len() {
            return Err(Error::LengthMismatch(classes.len(), quotas.len()));
        }
        let mut class_of = vec![usize::MAX; num_agents];
        for (i, class) in classes.iter().enumerate() {
            if quotas[i] > class.len() {
                return Err(Error::Precondition(format!(
                    "quota {} of class {} exceeds its {} agents",
                    quotas[i],
                    names[i],
                    class.len()
                )));
            }
            for &a in class {
                if a >= num_agents {
                    return Err(Error::UnknownAgent(a.to_string()));
                }
                if class_of[a] != usize::MAX {
                    return Err(Error::Precondition(format!("agent {a} is in two classes")));
                }
                class_of[a] = i;
            }
        }
        if let Some(a) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::Precondition(format!("agent {a} is in no class")));
        }
        Ok(PartitionSpec { names, classes, quotas, class_of })
    }

    pub fn class_of(&self, a: AgentId) -> usize {
        self.class_of[a]
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    /// Matched agents per class.
    pub fn counts(&self, g: &Graph, m: &[bool]) -> Vec<usize> {
        let mut counts = vec![0; self.classes.len()];
        for (a, matched) in g.matched_agents(m).into_iter().enumerate() {
            if matched {
                counts[self.class_of[a]] += 1;
            }
        }
        counts
    }

    pub fn is_satisfied(&self, g: &Graph, m: &[bool]) -> bool {
        self.counts(g, m).iter().zip(&self.quotas).all(|(c, k)| c >= k)
    }
}

/// Reads `class <name> <k> <agent...>` lines. Agents not listed go to an
/// implicit remainder class with quota 0.
pub fn parse_partition_spec(inst: &Instance, text: &str) -> Result<PartitionSpec> {
    let mut names = Vec::new();
    let mut classes = Vec::new();
    let mut quotas = Vec::new();
    let mut listed = vec![false; inst.num_agents()];
    for (line, toks) in tokenized_lines(text) {
        if toks[0] != "class" || toks.len() < 3 {
            return Err(Error::Syntax { line, message: "expected `class <name> <k> <agent...>`".into() });
        }
        let k = parse_int(line, toks[2])?;
        if k < 0 {
            return Err(Error::NonPositive { what: "quota", value: k });
        }
        let mut class = Vec::new();
        for name in &toks[3..] {
            let a = inst.agent_by_name(name).ok_or_else(|| Error::UnknownAgent(name.to_string()))?;
            if std::mem::replace(&mut listed[a], true) {
                return Err(Error::Precondition(format!("agent {name} is in two classes")));
            }
            class.push(a);
        }
        names.push(toks[1].to_string());
        classes.push(class);
        quotas.push(k as usize);
    }
    let rest: Vec<AgentId> = (0..inst.num_agents()).filter(|&a| !listed[a]).collect();
    if !rest.is_empty() {
        names.push("rest".into());
        classes.push(rest);
        quotas.push(0);
    }
    PartitionSpec::new(inst.num_agents(), names, classes, quotas)
}

/// One alternating path of an improving sequence: starts at `start` with a
/// non-matching edge and ends at `end` with a matching edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequencePath {
    pub start: AgentId,
    pub end: AgentId,
    pub edges: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImprovingSequence {
    pub paths: Vec<SequencePath>,
}

impl ImprovingSequence {
    pub fn edges(&self) -> impl Iterator<Item = usize> + '_ {
        self.paths.iter().flat_map(|p| p.edges.iter().copied())
    }

    pub fn apply(&self, m: &[bool]) -> EdgeSet {
        let mut out = m.to_vec();
        for e in self.edges() {
            out[e] = !out[e];
        }
        out
    }
}

/// Node of the search digraph: agents, then houses.
#[derive(Clone, Copy)]
enum Step {
    Edge(usize),
    Jump,
}

/// Breadth-first search in the digraph with arcs agent -> house along
/// non-matching edges, house -> agent along matching edges and, inside a
/// class, matched agent -> unmatched agent. A simple path from an
/// unmatched agent of a deficient class to a matched agent of a class
/// above its quota is an improving sequence.
pub fn find_improving_sequence(g: &Graph, m: &[bool], spec: &PartitionSpec) -> Result<Option<ImprovingSequence>> {
    let counts = spec.counts(g, m);
    let deficient: Vec<bool> = counts.iter().zip(&spec.quotas).map(|(c, k)| c < k).collect();
    if !deficient.contains(&true) {
        return Err(Error::Precondition("every class already meets its quota".into()));
    }
    let over: Vec<bool> = counts.iter().zip(&spec.quotas).map(|(c, k)| c > k).collect();
    let matched = g.matched_agents(m);
    let na = g.num_agents();
    let mut pred: Vec<Option<(usize, Step)>> = vec![None; na + g.num_houses()];
    let mut seen = vec![false; na + g.num_houses()];
    let mut queue = VecDeque::new();
    for a in 0..na {
        if !matched[a] && deficient[spec.class_of(a)] {
            seen[a] = true;
            queue.push_back(a);
        }
    }
    while let Some(v) = queue.pop_front() {
        if v < na {
            if matched[v] && over[spec.class_of(v)] {
                return Ok(Some(trace(g, &pred, v)));
            }
            for &e in g.agent_edges(v) {
                let w = na + g.edge(e).1;
                if !m[e] && !seen[w] {
                    seen[w] = true;
                    pred[w] = Some((v, Step::Edge(e)));
                    queue.push_back(w);
                }
            }
            if matched[v] {
                for &z in &spec.classes[spec.class_of(v)] {
                    if !matched[z] && !seen[z] {
                        seen[z] = true;
                        pred[z] = Some((v, Step::Jump));
                        queue.push_back(z);
                    }
                }
            }
        } else {
            for &e in g.house_edges(v - na) {
                let w = g.edge(e).0;
                if m[e] && !seen[w] {
                    seen[w] = true;
                    pred[w] = Some((v, Step::Edge(e)));
                    queue.push_back(w);
                }
            }
        }
    }
    Ok(None)
}

fn trace(g: &Graph, pred: &[Option<(usize, Step)>], end: AgentId) -> ImprovingSequence {
    let mut paths = Vec::new();
    let mut cur = SequencePath { start: end, end, edges: Vec::new() };
    let mut v = end;
    while let Some((u, step)) = pred[v] {
        match step {
            Step::Edge(e) => cur.edges.push(e),
            Step::Jump => {
                cur.edges.reverse();
                paths.push(std::mem::replace(&mut cur, SequencePath { start: u, end: u, edges: Vec::new() }));
            }
        }
        if u < g.num_agents() {
            cur.start = u;
        }
        v = u;
    }
    cur.edges.reverse();
    paths.push(cur);
    paths.reverse();
    ImprovingSequence { paths }
}

/// A maximum matching meeting every quota, or `None` when an improving
/// sequence runs out first.
pub fn partition_matching(g: &Graph, spec: &PartitionSpec) -> Result<Option<EdgeSet>> {
    if (0..g.num_agents()).any(|a| g.agent_cap(a) != 1) {
        return Err(Error::Precondition("partition matching needs unit agent capacities".into()));
    }
    let mut m = max_b_matching(g);
    while !spec.is_satisfied(g, &m) {
        match find_improving_sequence(g, &m, spec)? {
            Some(seq) => m = seq.apply(&m),
            None => return Ok(None),
        }
    }
    Ok(Some(m))
}
