use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::instance::{AgentId, EdgeId, HouseId, Instance};

/// Capacitated bipartite graph used by the matching procedures. Unlike
/// [`Instance`], capacities may be zero and there are no ranks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    agent_caps: Vec<u32>,
    house_caps: Vec<u32>,
    edges: Vec<(AgentId, HouseId)>,
    agent_adj: Vec<Vec<usize>>,
    house_adj: Vec<Vec<usize>>,
    /// Instance edge each graph edge was taken from, when built from one.
    origin: Vec<Option<EdgeId>>,
}

/// Membership vector over graph edges.
pub type EdgeSet = Vec<bool>;

impl Graph {
    pub fn new(agent_caps: Vec<u32>, house_caps: Vec<u32>, edges: Vec<(AgentId, HouseId)>) -> Result<Graph> {
        let mut agent_adj = vec![Vec::new(); agent_caps.len()];
        let mut house_adj = vec![Vec::new(); house_caps.len()];
        for (i, &(a, h)) in edges.iter().enumerate() {
            if a >= agent_caps.len() || h >= house_caps.len() {
                return Err(Error::Malformed(format!("edge ({a}, {h}) out of range")));
            }
            if agent_adj[a].iter().any(|&j: &usize| edges[j].1 == h) {
                return Err(Error::DuplicateEdge { agent: a.to_string(), house: h.to_string() });
            }
            agent_adj[a].push(i);
            house_adj[h].push(i);
        }
        let origin = vec![None; edges.len()];
        Ok(Graph { agent_caps, house_caps, edges, agent_adj, house_adj, origin })
    }

    /// Subgraph of `inst` on the edges accepted by `keep`, with the given
    /// capacities.
    pub fn from_instance(
        inst: &Instance,
        keep: impl Fn(EdgeId) -> bool,
        agent_caps: Vec<u32>,
        house_caps: Vec<u32>,
    ) -> Graph {
        let ids: Vec<EdgeId> = (0..inst.num_edges()).filter(|&e| keep(e)).collect();
        let edges = ids.iter().map(|&e| (inst.edge(e).agent, inst.edge(e).house)).collect();
        let mut g = Graph::new(agent_caps, house_caps, edges).expect("instance edges are well formed");
        g.origin = ids.into_iter().map(Some).collect();
        g
    }

    /// All edges of `inst` with unit agent capacities and the instance's
    /// house capacities.
    pub fn unit_agents(inst: &Instance) -> Graph {
        Graph::from_instance(
            inst,
            |_| true,
            vec![1; inst.num_agents()],
            (0..inst.num_houses()).map(|h| inst.house_capacity(h)).collect(),
        )
    }

    pub fn num_agents(&self) -> usize {
        self.agent_caps.len()
    }

    pub fn num_houses(&self) -> usize {
        self.house_caps.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> (AgentId, HouseId) {
        self.edges[e]
    }

    pub fn edges(&self) -> &[(AgentId, HouseId)] {
        &self.edges
    }

    pub fn origin(&self, e: usize) -> Option<EdgeId> {
        self.origin[e]
    }

    pub fn agent_cap(&self, a: AgentId) -> u32 {
        self.agent_caps[a]
    }

    pub fn house_cap(&self, h: HouseId) -> u32 {
        self.house_caps[h]
    }

    pub fn agent_edges(&self, a: AgentId) -> &[usize] {
        &self.agent_adj[a]
    }

    pub fn house_edges(&self, h: HouseId) -> &[usize] {
        &self.house_adj[h]
    }

    pub fn find_edge(&self, a: AgentId, h: HouseId) -> Option<usize> {
        self.agent_adj[a].iter().copied().find(|&e| self.edges[e].1 == h)
    }

    pub fn empty_set(&self) -> EdgeSet {
        vec![false; self.edges.len()]
    }

    pub fn agent_degree(&self, m: &[bool], a: AgentId) -> u32 {
        self.agent_adj[a].iter().filter(|&&e| m[e]).count() as u32
    }

    pub fn house_degree(&self, m: &[bool], h: HouseId) -> u32 {
        self.house_adj[h].iter().filter(|&&e| m[e]).count() as u32
    }

    pub fn is_feasible(&self, m: &[bool]) -> bool {
        m.len() == self.edges.len()
            && (0..self.num_agents()).all(|a| self.agent_degree(m, a) <= self.agent_caps[a])
            && (0..self.num_houses()).all(|h| self.house_degree(m, h) <= self.house_caps[h])
    }

    pub fn size(m: &[bool]) -> usize {
        m.iter().filter(|&&x| x).count()
    }

    /// Agents with at least one matching edge.
    pub fn matched_agents(&self, m: &[bool]) -> Vec<bool> {
        (0..self.num_agents()).map(|a| self.agent_degree(m, a) > 0).collect()
    }

    /// Restriction to the agents accepted by `keep` (houses unchanged).
    pub fn restrict_agents(&self, keep: impl Fn(AgentId) -> bool) -> Graph {
        let mut caps = self.agent_caps.clone();
        for (a, c) in caps.iter_mut().enumerate() {
            if !keep(a) {
                *c = 0;
            }
        }
        Graph { agent_caps: caps, ..self.clone() }
    }

    /// Shortest augmenting path from unsaturated agent `a`, as edge ids.
    fn augmenting_path(&self, m: &[bool], a: AgentId) -> Option<Vec<usize>> {
        let mut agent_pred: Vec<Option<usize>> = vec![None; self.num_agents()];
        let mut house_pred: Vec<Option<usize>> = vec![None; self.num_houses()];
        let mut seen_agent = vec![false; self.num_agents()];
        seen_agent[a] = true;
        let mut queue = VecDeque::from([a]);
        while let Some(x) = queue.pop_front() {
            for &e in &self.agent_adj[x] {
                let h = self.edges[e].1;
                if m[e] || house_pred[h].is_some() || self.house_caps[h] == 0 {
                    continue;
                }
                house_pred[h] = Some(e);
                if self.house_degree(m, h) < self.house_caps[h] {
                    let mut path = vec![e];
                    let mut agent = x;
                    while let Some(back) = agent_pred[agent] {
                        let fwd = house_pred[self.edges[back].1].unwrap();
                        path.push(back);
                        path.push(fwd);
                        agent = self.edges[fwd].0;
                    }
                    path.reverse();
                    return Some(path);
                }
                for &f in &self.house_adj[h] {
                    let y = self.edges[f].0;
                    if m[f] && !seen_agent[y] {
                        seen_agent[y] = true;
                        agent_pred[y] = Some(f);
                        queue.push_back(y);
                    }
                }
            }
        }
        None
    }

    /// Grows `m` by augmenting paths from unsaturated agents, scanned in
    /// declaration order, until none remain.
    pub fn augment_to_maximum(&self, mut m: EdgeSet) -> EdgeSet {
        loop {
            let mut grew = false;
            for a in 0..self.num_agents() {
                while self.agent_degree(&m, a) < self.agent_caps[a] {
                    let Some(path) = self.augmenting_path(&m, a) else { break };
                    for e in path {
                        m[e] = !m[e];
                    }
                    grew = true;
                }
            }
            if !grew {
                return m;
            }
        }
    }

    pub fn is_maximum(&self, m: &[bool]) -> bool {
        (0..self.num_agents()).all(|a| self.agent_degree(m, a) >= self.agent_caps[a] || self.augmenting_path(m, a).is_none())
    }
}

/// A maximum b-matching by repeated augmenting-path search.
pub fn max_b_matching(g: &Graph) -> EdgeSet {
    g.augment_to_maximum(g.empty_set())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    E,
    O,
    U,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EouLabeling {
    pub agents: Vec<Label>,
    pub houses: Vec<Label>,
}

/// E/O/U labels with respect to maximum matching `m`: E when some even
/// alternating path from an unsaturated vertex reaches the vertex, O when
/// only odd ones do, U otherwise. Paths leave even positions by
/// non-matching edges and odd positions by matching edges.
pub fn eou_labels(g: &Graph, m: &[bool]) -> Result<EouLabeling> {
    if !g.is_feasible(m) || !g.is_maximum(m) {
        return Err(Error::Precondition("matching is not maximum".into()));
    }
    let (na, nh) = (g.num_agents(), g.num_houses());
    // reach[v][parity], agents first then houses
    let mut reach = vec![[false; 2]; na + nh];
    let mut queue = VecDeque::new();
    for a in 0..na {
        if g.agent_degree(m, a) < g.agent_cap(a) {
            reach[a][0] = true;
            queue.push_back((a, 0usize));
        }
    }
    for h in 0..nh {
        if g.house_degree(m, h) < g.house_cap(h) {
            reach[na + h][0] = true;
            queue.push_back((na + h, 0));
        }
    }
    while let Some((v, parity)) = queue.pop_front() {
        let want_matched = parity == 1;
        let (edges, is_agent) = if v < na { (g.agent_edges(v), true) } else { (g.house_edges(v - na), false) };
        for &e in edges {
            if m[e] != want_matched {
                continue;
            }
            let (a, h) = g.edge(e);
            let w = if is_agent { na + h } else { a };
            let p = 1 - parity;
            if !reach[w][p] {
                reach[w][p] = true;
                queue.push_back((w, p));
            }
        }
    }
    let label = |r: [bool; 2]| if r[0] { Label::E } else if r[1] { Label::O } else { Label::U };
    Ok(EouLabeling {
        agents: reach[..na].iter().map(|&r| label(r)).collect(),
        houses: reach[na..].iter().map(|&r| label(r)).collect(),
    })
}

/// Vertices reachable from agent `a` by alternating paths whose first edge
/// is a matching edge iff `first_matched`, as (agents, houses) membership.
pub fn alternating_reach(g: &Graph, m: &[bool], a: AgentId, first_matched: bool) -> (Vec<bool>, Vec<bool>) {
    let (na, nh) = (g.num_agents(), g.num_houses());
    let mut agents = vec![false; na];
    let mut houses = vec![false; nh];
    // state: (vertex, arrived by matching edge?)
    let mut seen = vec![[false; 2]; na + nh];
    let start = usize::from(!first_matched);
    let mut queue = VecDeque::from([(a, start)]);
    seen[a][start] = true;
    agents[a] = true;
    while let Some((v, by_m)) = queue.pop_front() {
        let leave_matched = by_m == 0;
        let (edges, is_agent) = if v < na { (g.agent_edges(v), true) } else { (g.house_edges(v - na), false) };
        for &e in edges {
            if m[e] != leave_matched {
                continue;
            }
            let (x, h) = g.edge(e);
            let w = if is_agent { na + h } else { x };
            let s = usize::from(m[e]);
            if !seen[w][s] {
                seen[w][s] = true;
                if w < na {
                    agents[w] = true;
                } else {
                    houses[w - na] = true;
                }
                queue.push_back((w, s));
            }
        }
    }
    (agents, houses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(na: usize, nh: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(vec![1; na], vec![1; nh], edges.to_vec()).unwrap()
    }

    #[test]
    fn maximum_sizes() {
        assert_eq!(Graph::size(&max_b_matching(&unit(1, 1, &[(0, 0)]))), 1);
        assert_eq!(Graph::size(&max_b_matching(&unit(2, 1, &[(0, 0), (1, 0)]))), 1);
        let g = unit(2, 2, &[(0, 0), (0, 1), (1, 0)]);
        let m = max_b_matching(&g);
        assert_eq!(Graph::size(&m), 2);
        assert!(g.is_feasible(&m) && g.is_maximum(&m));
    }

    #[test]
    fn zero_capacity_house_is_skipped() {
        let g = Graph::new(vec![1], vec![0, 1], vec![(0, 0), (0, 1)]).unwrap();
        let m = max_b_matching(&g);
        assert_eq!(m, vec![false, true]);
    }

    #[test]
    fn capacitated_augmentation() {
        let g = Graph::new(vec![2, 1, 1], vec![2, 1], vec![(0, 0), (0, 1), (1, 0), (2, 1)]).unwrap();
        assert_eq!(Graph::size(&max_b_matching(&g)), 3);
    }

    #[test]
    fn eou_examples() {
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        let l = eou_labels(&g, &[true, false]).unwrap();
        assert_eq!(l.agents, vec![Label::E, Label::E]);
        assert_eq!(l.houses, vec![Label::O]);

        let g = unit(1, 1, &[(0, 0)]);
        let l = eou_labels(&g, &[true]).unwrap();
        assert_eq!((l.agents[0], l.houses[0]), (Label::U, Label::U));

        let g = unit(1, 0, &[]);
        assert_eq!(eou_labels(&g, &[]).unwrap().agents, vec![Label::E]);

        assert!(eou_labels(&unit(1, 1, &[(0, 0)]), &[false]).is_err());
    }

    #[test]
    fn reach_follows_alternation() {
        // a0 -h0- a1 (matched) -h1- a2 (matched)
        let g = unit(3, 2, &[(0, 0), (1, 0), (1, 1), (2, 1)]);
        let m = vec![false, true, false, true];
        let (agents, houses) = alternating_reach(&g, &m, 0, false);
        assert_eq!(agents, vec![true, true, true]);
        assert_eq!(houses, vec![true, true]);
        let (agents, _) = alternating_reach(&g, &m, 2, false);
        assert_eq!(agents, vec![false, false, true]);
        let (agents, houses) = alternating_reach(&g, &m, 2, true);
        assert_eq!(agents, vec![true, true, true]);
        assert_eq!(houses, vec![true, true]);
    }
}
