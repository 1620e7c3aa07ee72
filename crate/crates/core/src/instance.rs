//! Bipartite preference systems and their b-matchings.
//!
//! Vertex names are opaque strings at the boundary and dense indices
//! inside. Edges are stored sorted by `(agent, rank, house)`, so the edges
//! of one agent form a contiguous block ordered from best to worst rank.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

pub type AgentId = usize;
pub type HouseId = usize;
pub type EdgeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Vertex {
    Agent(AgentId),
    House(HouseId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub agent: AgentId,
    pub house: HouseId,
    pub rank: u32,
}

/// A bipartite agent/house graph with capacities and edge ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    agent_names: Vec<String>,
    house_names: Vec<String>,
    agent_cap: Vec<u32>,
    house_cap: Vec<u32>,
    edges: Vec<Edge>,
    agent_start: Vec<usize>,
    house_edges: Vec<Vec<EdgeId>>,
    pair_index: HashMap<(AgentId, HouseId), EdgeId>,
    max_rank: u32,
    max_agent_degree: usize,
    has_ties: bool,
}

impl Instance {
    /// Builds an instance from index-based parts. Agents are named
    /// `a1, a2, ...` and houses `h1, h2, ...`.
    pub fn from_parts(
        agent_cap: &[u32],
        house_cap: &[u32],
        edges: &[(AgentId, HouseId, u32)],
    ) -> Result<Self> {
        let mut b = InstanceBuilder::new();
        for (i, &c) in agent_cap.iter().enumerate() {
            b.agent(&format!("a{}", i + 1), c as i64)?;
        }
        for (i, &c) in house_cap.iter().enumerate() {
            b.house(&format!("h{}", i + 1), c as i64)?;
        }
        for &(a, h, r) in edges {
            b.edge_by_index(a, h, r as i64)?;
        }
        b.build()
    }

    pub fn num_agents(&self) -> usize {
        self.agent_names.len()
    }

    pub fn num_houses(&self) -> usize {
        self.house_names.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: EdgeId) -> Edge {
        self.edges[e]
    }

    pub fn agent_name(&self, a: AgentId) -> &str {
        &self.agent_names[a]
    }

    pub fn house_name(&self, h: HouseId) -> &str {
        &self.house_names[h]
    }

    pub fn vertex_name(&self, v: Vertex) -> &str {
        match v {
            Vertex::Agent(a) => self.agent_name(a),
            Vertex::House(h) => self.house_name(h),
        }
    }

    pub fn agent_names(&self) -> &[String] {
        &self.agent_names
    }

    pub fn house_names(&self) -> &[String] {
        &self.house_names
    }

    pub fn agent_by_name(&self, name: &str) -> Option<AgentId> {
        self.agent_names.iter().position(|n| n == name)
    }

    pub fn house_by_name(&self, name: &str) -> Option<HouseId> {
        self.house_names.iter().position(|n| n == name)
    }

    pub fn agent_capacity(&self, a: AgentId) -> u32 {
        self.agent_cap[a]
    }

    pub fn house_capacity(&self, h: HouseId) -> u32 {
        self.house_cap[h]
    }

    pub fn capacity(&self, v: Vertex) -> u32 {
        match v {
            Vertex::Agent(a) => self.agent_cap[a],
            Vertex::House(h) => self.house_cap[h],
        }
    }

    /// Edge ids at `a`, ordered by rank then house.
    pub fn agent_edges(&self, a: AgentId) -> std::ops::Range<EdgeId> {
        self.agent_start[a]..self.agent_start[a + 1]
    }

    pub fn house_edges(&self, h: HouseId) -> &[EdgeId] {
        &self.house_edges[h]
    }

    pub fn find_edge(&self, a: AgentId, h: HouseId) -> Option<EdgeId> {
        self.pair_index.get(&(a, h)).copied()
    }

    /// Largest rank on any edge (0 for an edgeless instance).
    pub fn max_rank(&self) -> u32 {
        self.max_rank
    }

    /// Largest number of incident edges over agents.
    pub fn max_agent_degree(&self) -> usize {
        self.max_agent_degree
    }

    pub fn has_ties(&self) -> bool {
        self.has_ties
    }

    pub fn agent_degree(&self, a: AgentId) -> usize {
        self.agent_edges(a).len()
    }

    pub fn house_degree(&self, h: HouseId) -> usize {
        self.house_edges[h].len()
    }
}

/// Incremental constructor enforcing the instance invariants.
#[derive(Debug, Default)]
pub struct InstanceBuilder {
    agent_names: Vec<String>,
    house_names: Vec<String>,
    agent_cap: Vec<u32>,
    house_cap: Vec<u32>,
    agent_ix: HashMap<String, AgentId>,
    house_ix: HashMap<String, HouseId>,
    edges: Vec<Edge>,
    pairs: HashMap<(AgentId, HouseId), ()>,
}

fn positive(what: &'static str, value: i64) -> Result<u32> {
    if value < 1 || value > u32::MAX as i64 {
        return Err(Error::NonPositive { what, value });
    }
    Ok(value as u32)
}

impl InstanceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn agent(&mut self, name: &str, capacity: i64) -> Result<AgentId> {
        let cap = positive("capacity", capacity)?;
        if self.agent_ix.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let id = self.agent_names.len();
        self.agent_ix.insert(name.to_string(), id);
        self.agent_names.push(name.to_string());
        self.agent_cap.push(cap);
        Ok(id)
    }

    pub fn house(&mut self, name: &str, capacity: i64) -> Result<HouseId> {
        let cap = positive("capacity", capacity)?;
        if self.house_ix.contains_key(name) {
            return Err(Error::DuplicateVertex(name.to_string()));
        }
        let id = self.house_names.len();
        self.house_ix.insert(name.to_string(), id);
        self.house_names.push(name.to_string());
        self.house_cap.push(cap);
        Ok(id)
    }

    pub fn edge(&mut self, agent: &str, house: &str, rank: i64) -> Result<()> {
        let a = *self
            .agent_ix
            .get(agent)
            .ok_or_else(|| Error::UnknownVertex(agent.to_string()))?;
        let h = *self
            .house_ix
            .get(house)
            .ok_or_else(|| Error::UnknownVertex(house.to_string()))?;
        self.edge_by_index(a, h, rank)
    }

    pub fn edge_by_index(&mut self, a: AgentId, h: HouseId, rank: i64) -> Result<()> {
        if a >= self.agent_names.len() {
            return Err(Error::UnknownVertex(format!("agent #{a}")));
        }
        if h >= self.house_names.len() {
            return Err(Error::UnknownVertex(format!("house #{h}")));
        }
        let rank = positive("rank", rank)?;
        if self.pairs.insert((a, h), ()).is_some() {
            return Err(Error::DuplicateEdge {
                agent: self.agent_names[a].clone(),
                house: self.house_names[h].clone(),
            });
        }
        self.edges.push(Edge { agent: a, house: h, rank });
        Ok(())
    }

    pub fn build(self) -> Result<Instance> {
        let mut edges = self.edges;
        edges.sort_by_key(|e| (e.agent, e.rank, e.house));
        let n_agents = self.agent_names.len();
        let mut agent_start = vec![0usize; n_agents + 1];
        for e in &edges {
            agent_start[e.agent + 1] += 1;
        }
        for i in 0..n_agents {
            agent_start[i + 1] += agent_start[i];
        }
        let mut house_edges = vec![Vec::new(); self.house_names.len()];
        let mut pair_index = HashMap::with_capacity(edges.len());
        for (id, e) in edges.iter().enumerate() {
            house_edges[e.house].push(id);
            pair_index.insert((e.agent, e.house), id);
        }
        let max_rank = edges.iter().map(|e| e.rank).max().unwrap_or(0);
        let max_agent_degree = (0..n_agents)
            .map(|a| agent_start[a + 1] - agent_start[a])
            .max()
            .unwrap_or(0);
        let has_ties = edges
            .windows(2)
            .any(|w| w[0].agent == w[1].agent && w[0].rank == w[1].rank);
        Ok(Instance {
            agent_names: self.agent_names,
            house_names: self.house_names,
            agent_cap: self.agent_cap,
            house_cap: self.house_cap,
            edges,
            agent_start,
            house_edges,
            pair_index,
            max_rank,
            max_agent_degree,
            has_ties,
        })
    }
}

/// An edge subset of an [`Instance`] respecting every capacity.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BMatching {
    members: Vec<bool>,
}

impl fmt::Debug for BMatching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.edge_ids()).finish()
    }
}

impl BMatching {
    pub fn empty(inst: &Instance) -> Self {
        BMatching {
            members: vec![false; inst.num_edges()],
        }
    }

    /// Builds a matching from edge ids, checking capacities.
    pub fn from_edge_ids(inst: &Instance, ids: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut m = Self::empty(inst);
        for e in ids {
            if e >= inst.num_edges() {
                return Err(Error::Malformed(format!("edge id {e} out of range")));
            }
            if m.members[e] {
                let edge = inst.edge(e);
                return Err(Error::DuplicatePair {
                    agent: inst.agent_name(edge.agent).to_string(),
                    house: inst.house_name(edge.house).to_string(),
                });
            }
            m.members[e] = true;
        }
        m.check_capacities(inst)?;
        Ok(m)
    }

    /// Wraps a membership vector without capacity checks.
    pub(crate) fn from_members_unchecked(members: Vec<bool>) -> Self {
        BMatching { members }
    }

    pub(crate) fn check_capacities(&self, inst: &Instance) -> Result<()> {
        for a in 0..inst.num_agents() {
            if self.agent_degree(inst, a) > inst.agent_capacity(a) as usize {
                return Err(Error::CapacityExceeded(inst.agent_name(a).to_string()));
            }
        }
        for h in 0..inst.num_houses() {
            if self.house_degree(inst, h) > inst.house_capacity(h) as usize {
                return Err(Error::CapacityExceeded(inst.house_name(h).to_string()));
            }
        }
        Ok(())
    }

    pub fn contains(&self, e: EdgeId) -> bool {
        self.members[e]
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter_map(|(i, &b)| b.then_some(i))
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn agent_degree(&self, inst: &Instance, a: AgentId) -> usize {
        inst.agent_edges(a).filter(|&e| self.members[e]).count()
    }

    pub fn house_degree(&self, inst: &Instance, h: HouseId) -> usize {
        inst.house_edges(h)
            .iter()
            .filter(|&&e| self.members[e])
            .count()
    }

    pub fn degree(&self, inst: &Instance, v: Vertex) -> usize {
        match v {
            Vertex::Agent(a) => self.agent_degree(inst, a),
            Vertex::House(h) => self.house_degree(inst, h),
        }
    }

    pub fn is_saturated(&self, inst: &Instance, v: Vertex) -> bool {
        self.degree(inst, v) >= inst.capacity(v) as usize
    }

    /// `self ⊕ edges`, capacity-checked.
    pub fn toggled(&self, inst: &Instance, edges: impl IntoIterator<Item = EdgeId>) -> Result<Self> {
        let mut members = self.members.clone();
        for e in edges {
            members[e] = !members[e];
        }
        let m = BMatching { members };
        m.check_capacities(inst)?;
        Ok(m)
    }

    /// Agent/house name pairs in edge order.
    pub fn pairs<'a>(&'a self, inst: &'a Instance) -> Vec<(&'a str, &'a str)> {
        self.edge_ids()
            .map(|e| {
                let edge = inst.edge(e);
                (inst.agent_name(edge.agent), inst.house_name(edge.house))
            })
            .collect()
    }
}

/// Resolves named pairs into a capacity-feasible [`BMatching`].
pub fn validate_matching<S: AsRef<str>>(inst: &Instance, pairs: &[(S, S)]) -> Result<BMatching> {
    let mut ids = Vec::with_capacity(pairs.len());
    for (agent, house) in pairs {
        let (agent, house) = (agent.as_ref(), house.as_ref());
        let non_edge = || Error::NonEdge {
            agent: agent.to_string(),
            house: house.to_string(),
        };
        let a = inst.agent_by_name(agent).ok_or_else(non_edge)?;
        let h = inst.house_by_name(house).ok_or_else(non_edge)?;
        ids.push(inst.find_edge(a, h).ok_or_else(non_edge)?);
    }
    BMatching::from_edge_ids(inst, ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_house(cap_a: u32) -> Instance {
        Instance::from_parts(&[cap_a], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap()
    }

    #[test]
    fn derived_fields() {
        let inst = Instance::from_parts(&[2, 1], &[1, 1], &[(0, 1, 2), (0, 0, 2), (1, 0, 1)]).unwrap();
        assert_eq!(inst.max_rank(), 2);
        assert_eq!(inst.max_agent_degree(), 2);
        assert!(inst.has_ties());
        // sorted by (agent, rank, house)
        assert_eq!(inst.edge(0).house, 0);
        assert_eq!(inst.edge(1).house, 1);
        assert!(!two_house(1).has_ties());
    }

    #[test]
    fn rejects_bad_parts() {
        assert!(matches!(
            Instance::from_parts(&[0], &[1], &[]),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            Instance::from_parts(&[1], &[1], &[(0, 0, 0)]),
            Err(Error::NonPositive { .. })
        ));
        assert!(matches!(
            Instance::from_parts(&[1], &[1], &[(0, 0, 1), (0, 0, 2)]),
            Err(Error::DuplicateEdge { .. })
        ));
        assert!(matches!(
            Instance::from_parts(&[1], &[1], &[(0, 3, 1)]),
            Err(Error::UnknownVertex(_))
        ));
    }

    #[test]
    fn validate_matching_cases() {
        let empty: [(&str, &str); 0] = [];
        assert!(validate_matching(&two_house(1), &empty).unwrap().is_empty());
        assert_eq!(
            validate_matching(&two_house(1), &[("a1", "h1"), ("a1", "h2")]),
            Err(Error::CapacityExceeded("a1".into()))
        );
        let m = validate_matching(&two_house(2), &[("a1", "h1"), ("a1", "h2")]).unwrap();
        assert_eq!(m.len(), 2);
        assert!(matches!(
            validate_matching(&two_house(2), &[("a1", "h3")]),
            Err(Error::NonEdge { .. })
        ));
        assert!(matches!(
            validate_matching(&two_house(2), &[("a1", "h1"), ("a1", "h1")]),
            Err(Error::DuplicatePair { .. })
        ));
    }
}
