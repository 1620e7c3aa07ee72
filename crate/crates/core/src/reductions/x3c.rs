//! Exact cover by 3-sets compiled into a popular b-matching instance.
//!
//! Per triple T_i there are agents a_{i,1..5} and houses h_i, h'_i:
//!
//! ```text
//!   a_{i,j} --1-- v_k      (j = 1..3, k the j-th element of T_i)
//!   a_{i,j} --2-- h_i
//!   a_{i,4} --1-- h_i,  a_{i,4} --2-- h'_i     (b(a_{i,4}) = 2)
//!   a_{i,5} --2-- h'_i, a_{i,5} --1-- g_1 .. g_{m-|K|/3}
//! ```
//!
//! Every other capacity is 1.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{AgentId, BMatching, HouseId, Instance, InstanceBuilder};
use crate::oracle::X3CInstance;

/// Rank of the (a_{i,5}, h'_i) edge. It must exceed the rank of the
/// a_{i,5} g-house edges, otherwise a set agent a_{i,4} left off h'_i has
/// no alternating path that displaces another a_{i',5} from its g-house.
const A5_TO_H_PRIME: i64 = 2;

#[derive(Clone, Debug)]
pub struct X3CGadget {
    pub instance: Instance,
    pub source: X3CInstance,
    /// House v_k for each element.
    pub element_house: Vec<HouseId>,
    /// a_{i,1..5} for each triple.
    pub set_agents: Vec<[AgentId; 5]>,
    /// (h_i, h'_i) for each triple.
    pub set_houses: Vec<(HouseId, HouseId)>,
    pub g_houses: Vec<HouseId>,
}

pub fn build_x3c_gadget(x: &X3CInstance) -> Result<X3CGadget> {
    let m = x.triples.len();
    let third = x.elements.len() / 3;
    if m < third {
        return Err(Error::Malformed(format!(
            "{m} triples cannot cover {} elements",
            x.elements.len()
        )));
    }
    let mut b = InstanceBuilder::new();
    let element_house = x
        .elements
        .iter()
        .map(|e| b.house(&format!("v_{e}"), 1))
        .collect::<Result<Vec<_>>>()?;
    let mut set_agents = Vec::with_capacity(m);
    let mut set_houses = Vec::with_capacity(m);
    for (name, _) in &x.triples {
        let mut agents = [0; 5];
        for (j, slot) in agents.iter_mut().enumerate() {
            *slot = b.agent(&format!("a_{name}_{}", j + 1), if j == 3 { 2 } else { 1 })?;
        }
        set_agents.push(agents);
        set_houses.push((b.house(&format!("h_{name}"), 1)?, b.house(&format!("hp_{name}"), 1)?));
    }
    let g_houses = (1..=m - third)
        .map(|k| b.house(&format!("g{k}"), 1))
        .collect::<Result<Vec<_>>>()?;
    for (i, (_, t)) in x.triples.iter().enumerate() {
        let a = set_agents[i];
        let (h, hp) = set_houses[i];
        for j in 0..3 {
            b.edge_by_index(a[j], element_house[t[j]], 1)?;
            b.edge_by_index(a[j], h, 2)?;
        }
        b.edge_by_index(a[3], h, 1)?;
        b.edge_by_index(a[3], hp, 2)?;
        b.edge_by_index(a[4], hp, A5_TO_H_PRIME)?;
        for &g in &g_houses {
            b.edge_by_index(a[4], g, 1)?;
        }
    }
    let instance = b.build()?;
    assert_eq!(instance.num_agents(), 5 * m);
    assert_eq!(instance.num_houses(), x.elements.len() + 2 * m + (m - third));
    Ok(X3CGadget { instance, source: x.clone(), element_house, set_agents, set_houses, g_houses })
}

impl X3CGadget {
    /// The matching built from an exact cover: the element edges of every
    /// covering triple, both a_{i,4} edges of every triple, and one g-house
    /// per non-covering triple in index order.
    pub fn cover_to_matching(&self, cover: &[usize]) -> Result<BMatching> {
        if cover.iter().any(|&i| i >= self.set_agents.len()) || !self.source.is_exact_cover(cover) {
            return Err(Error::Precondition("the chosen triples are not an exact cover".into()));
        }
        let inst = &self.instance;
        let edge = |a: AgentId, h: HouseId| inst.find_edge(a, h).expect("gadget edge");
        let mut edges = Vec::new();
        let mut g = self.g_houses.iter();
        for (i, agents) in self.set_agents.iter().enumerate() {
            let (h, hp) = self.set_houses[i];
            edges.push(edge(agents[3], h));
            edges.push(edge(agents[3], hp));
            if cover.contains(&i) {
                for (j, &e) in self.source.triples[i].1.iter().enumerate() {
                    edges.push(edge(agents[j], self.element_house[e]));
                }
            } else {
                let &gh = g.next().expect("one g-house per non-covering triple");
                edges.push(edge(agents[4], gh));
            }
        }
        BMatching::from_edge_ids(inst, edges)
    }

    /// Triples whose three element agents all hold their rank-1 edge. Fails
    /// with a discrepancy when they do not form an exact cover.
    pub fn matching_to_cover(&self, m: &BMatching) -> Result<Vec<usize>> {
        let inst = &self.instance;
        let cover: Vec<usize> = (0..self.set_agents.len())
            .filter(|&i| {
                self.set_agents[i][..3]
                    .iter()
                    .all(|&a| inst.agent_edges(a).any(|e| m.contains(e) && inst.edge(e).rank == 1))
            })
            .collect();
        if !self.source.is_exact_cover(&cover) {
            return Err(Error::Discrepancy(format!(
                "triples {} extracted from the matching are not an exact cover",
                cover.iter().map(|&i| self.source.triples[i].0.as_str()).collect::<Vec<_>>().join(" ")
            )));
        }
        Ok(cover)
    }

    /// `# map:` comment lines tying source objects to gadget vertices.
    pub fn map_lines(&self) -> String {
        let inst = &self.instance;
        let mut out = String::new();
        for (k, e) in self.source.elements.iter().enumerate() {
            writeln!(out, "# map: element {e} -> house {}", inst.house_name(self.element_house[k])).unwrap();
        }
        for (i, (name, _)) in self.source.triples.iter().enumerate() {
            let agents: Vec<&str> = self.set_agents[i].iter().map(|&a| inst.agent_name(a)).collect();
            let (h, hp) = self.set_houses[i];
            writeln!(
                out,
                "# map: set {name} -> agents {} houses {} {}",
                agents.join(" "),
                inst.house_name(h),
                inst.house_name(hp)
            )
            .unwrap();
        }
        for &g in &self.g_houses {
            writeln!(out, "# map: spare house {}", inst.house_name(g)).unwrap();
        }
        out
    }
}
