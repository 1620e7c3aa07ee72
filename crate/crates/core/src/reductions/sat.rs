//! 3-CNF formulas compiled into weakly popular b-matching instances.
//!
//! Variable i with r = max(#positive, #negative occurrences) gets a ring of
//! 2r agents x_{i,1..2r} of capacity 3. Odd agents take rank 1 at p_{i,·},
//! even agents at q_{i,·} (the negated houses), neighbours (2j-1, 2j) share
//! b_{i,j} at rank 2 and neighbours (2j, 2j+1 mod 2r) share g_{i,j} at
//! rank 3. Clause l gets agents c_{l,1..3} of capacity 2, each with rank 1
//! at a private p or q house of its literal and rank 2 at h_l.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::instance::{AgentId, BMatching, HouseId, Instance, InstanceBuilder};
use crate::oracle::CnfFormula;

#[derive(Clone, Debug)]
pub struct SatGadget {
    pub instance: Instance,
    pub formula: CnfFormula,
    /// r(i) per variable.
    pub ring: Vec<usize>,
    pub var_agents: Vec<Vec<AgentId>>,
    pub p: Vec<Vec<HouseId>>,
    pub q: Vec<Vec<HouseId>>,
    pub b: Vec<Vec<HouseId>>,
    pub g: Vec<Vec<HouseId>>,
    pub clause_agents: Vec<[AgentId; 3]>,
    pub clause_house: Vec<HouseId>,
    /// Rank-1 house of each clause agent.
    pub occurrence: Vec<[HouseId; 3]>,
}

pub fn build_3sat_gadget(f: &CnfFormula) -> Result<SatGadget> {
    let nv = f.variable_count;
    let mut pos = vec![0usize; nv];
    let mut neg = vec![0usize; nv];
    for &l in f.clauses.iter().flatten() {
        let v = l.unsigned_abs() as usize - 1;
        if l > 0 {
            pos[v] += 1;
        } else {
            neg[v] += 1;
        }
    }
    if let Some(v) = (0..nv).find(|&v| pos[v] + neg[v] == 0) {
        return Err(Error::Malformed(format!("variable {} does not occur", v + 1)));
    }
    let ring: Vec<usize> = (0..nv).map(|v| pos[v].max(neg[v])).collect();

    let mut bld = InstanceBuilder::new();
    let houses = |prefix: &str, v: usize, r: usize, bld: &mut InstanceBuilder| {
        (1..=r).map(|j| bld.house(&format!("{prefix}{}_{j}", v + 1), 1)).collect::<Result<Vec<_>>>()
    };
    let (mut p, mut q, mut b, mut g, mut var_agents) = (vec![], vec![], vec![], vec![], vec![]);
    for (v, &r) in ring.iter().enumerate() {
        p.push(houses("p", v, r, &mut bld)?);
        q.push(houses("q", v, r, &mut bld)?);
        b.push(houses("b", v, r, &mut bld)?);
        g.push(houses("g", v, r, &mut bld)?);
        var_agents.push((1..=2 * r).map(|j| bld.agent(&format!("x{}_{j}", v + 1), 3)).collect::<Result<Vec<_>>>()?);
    }
    for (v, &r) in ring.iter().enumerate() {
        let x = &var_agents[v];
        // 0-based index j stands for agent j + 1
        for j in 0..2 * r {
            let first = if j % 2 == 0 { p[v][j / 2] } else { q[v][j / 2] };
            bld.edge_by_index(x[j], first, 1)?;
            bld.edge_by_index(x[j], b[v][j / 2], 2)?;
        }
        for j in (1..2 * r).step_by(2) {
            bld.edge_by_index(x[j], g[v][j / 2], 3)?;
            bld.edge_by_index(x[(j + 1) % (2 * r)], g[v][j / 2], 3)?;
        }
    }
    let mut next_p = vec![0usize; nv];
    let mut next_q = vec![0usize; nv];
    let mut clause_agents = Vec::new();
    let mut clause_house = Vec::new();
    let mut occurrence = Vec::new();
    for (l, clause) in f.clauses.iter().enumerate() {
        let h = bld.house(&format!("h{}", l + 1), 1)?;
        let mut agents = [0; 3];
        let mut occ = [0; 3];
        for (k, &lit) in clause.iter().enumerate() {
            let v = lit.unsigned_abs() as usize - 1;
            let (slots, next) = if lit > 0 { (&p[v], &mut next_p[v]) } else { (&q[v], &mut next_q[v]) };
            occ[k] = slots[*next];
            *next += 1;
            agents[k] = bld.agent(&format!("c{}_{}", l + 1, k + 1), 2)?;
            bld.edge_by_index(agents[k], occ[k], 1)?;
            bld.edge_by_index(agents[k], h, 2)?;
        }
        clause_agents.push(agents);
        clause_house.push(h);
        occurrence.push(occ);
    }
    let instance = bld.build()?;
    let total: usize = ring.iter().sum();
    assert_eq!(instance.num_agents(), 2 * total + 3 * f.clauses.len());
    assert_eq!(instance.num_houses(), 4 * total + f.clauses.len());
    assert!(!instance.has_ties());
    Ok(SatGadget {
        instance,
        formula: f.clone(),
        ring,
        var_agents,
        p,
        q,
        b,
        g,
        clause_agents,
        clause_house,
        occurrence,
    })
}

impl SatGadget {
    /// The matching built from a satisfying assignment: every edge of the
    /// even ring agents of a true variable (odd ones of a false variable),
    /// both edges of the first true literal's agent in each clause, then
    /// every rank-1 edge whose endpoints both still have room.
    pub fn assignment_to_matching(&self, assign: &[bool]) -> Result<BMatching> {
        if assign.len() != self.formula.variable_count || !self.formula.is_satisfied_by(assign) {
            return Err(Error::Precondition("the assignment does not satisfy the formula".into()));
        }
        let inst = &self.instance;
        let mut chosen = vec![false; inst.num_edges()];
        for (v, agents) in self.var_agents.iter().enumerate() {
            let parity = usize::from(assign[v]);
            for &a in agents.iter().skip(parity).step_by(2) {
                inst.agent_edges(a).for_each(|e| chosen[e] = true);
            }
        }
        for (l, clause) in self.formula.clauses.iter().enumerate() {
            let k = clause
                .iter()
                .position(|&lit| assign[lit.unsigned_abs() as usize - 1] == (lit > 0))
                .expect("satisfied clause");
            inst.agent_edges(self.clause_agents[l][k]).for_each(|e| chosen[e] = true);
        }
        let mut agent_deg: Vec<u32> = (0..inst.num_agents())
            .map(|a| inst.agent_edges(a).filter(|&e| chosen[e]).count() as u32)
            .collect();
        let mut house_deg: Vec<u32> = (0..inst.num_houses())
            .map(|h| inst.house_edges(h).iter().filter(|&&e| chosen[e]).count() as u32)
            .collect();
        for e in 0..inst.num_edges() {
            let edge = inst.edge(e);
            if edge.rank == 1
                && !chosen[e]
                && agent_deg[edge.agent] < inst.agent_capacity(edge.agent)
                && house_deg[edge.house] < inst.house_capacity(edge.house)
            {
                chosen[e] = true;
                agent_deg[edge.agent] += 1;
                house_deg[edge.house] += 1;
            }
        }
        BMatching::from_edge_ids(inst, (0..chosen.len()).filter(|&e| chosen[e]))
    }

    /// Variable i is true iff every q_{i,·} is held by a ring agent. Fails
    /// with a discrepancy when the result does not satisfy the formula.
    pub fn matching_to_assignment(&self, m: &BMatching) -> Result<Vec<bool>> {
        let inst = &self.instance;
        let assign: Vec<bool> = (0..self.formula.variable_count)
            .map(|v| {
                self.q[v].iter().all(|&h| {
                    inst.house_edges(h)
                        .iter()
                        .any(|&e| m.contains(e) && self.var_agents[v].contains(&inst.edge(e).agent))
                })
            })
            .collect();
        if !self.formula.is_satisfied_by(&assign) {
            return Err(Error::Discrepancy("assignment extracted from the matching falsifies the formula".into()));
        }
        Ok(assign)
    }

    /// `# map:` comment lines tying variables, clauses and literal
    /// occurrences to gadget vertices.
    pub fn map_lines(&self) -> String {
        let inst = &self.instance;
        let names = |hs: &[HouseId]| hs.iter().map(|&h| inst.house_name(h)).collect::<Vec<_>>().join(" ");
        let mut out = String::new();
        for v in 0..self.formula.variable_count {
            let agents: Vec<&str> = self.var_agents[v].iter().map(|&a| inst.agent_name(a)).collect();
            writeln!(
                out,
                "# map: variable {} -> agents {} houses {} {} {} {}",
                v + 1,
                agents.join(" "),
                names(&self.p[v]),
                names(&self.q[v]),
                names(&self.b[v]),
                names(&self.g[v])
            )
            .unwrap();
        }
        for (l, clause) in self.formula.clauses.iter().enumerate() {
            for (k, &lit) in clause.iter().enumerate() {
                writeln!(
                    out,
                    "# map: clause {} literal {lit} -> agent {} house {} clause house {}",
                    l + 1,
                    inst.agent_name(self.clause_agents[l][k]),
                    inst.house_name(self.occurrence[l][k]),
                    inst.house_name(self.clause_house[l])
                )
                .unwrap();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certifier::verify;
    use crate::Mode;

    #[test]
    fn gadget_sizes() {
        let f = CnfFormula::new(3, vec![[1, -2, 3]]).unwrap();
        let g = build_3sat_gadget(&f).unwrap();
        assert_eq!((g.instance.num_agents(), g.instance.num_houses()), (9, 13));
        assert_eq!(g.instance.max_rank(), 3);
        let f = CnfFormula::new(1, vec![[1, 1, -1]]).unwrap();
        let g = build_3sat_gadget(&f).unwrap();
        assert_eq!(g.ring, vec![2]);
        assert_eq!(g.var_agents[0].len(), 4);
        assert_eq!(g.instance.num_houses(), 8 + 1);
        assert!(build_3sat_gadget(&CnfFormula::new(2, vec![[1, 1, 1]]).unwrap()).is_err());
    }

    #[test]
    fn ring_wiring() {
        let f = CnfFormula::new(1, vec![[1, 1, -1]]).unwrap();
        let g = build_3sat_gadget(&f).unwrap();
        let inst = &g.instance;
        let x = &g.var_agents[0];
        let rank = |a, h| inst.find_edge(a, h).map(|e| inst.edge(e).rank);
        assert_eq!(rank(x[0], g.p[0][0]), Some(1));
        assert_eq!(rank(x[1], g.q[0][0]), Some(1));
        assert_eq!(rank(x[1], g.b[0][0]), Some(2));
        assert_eq!(rank(x[2], g.b[0][1]), Some(2));
        assert_eq!(rank(x[1], g.g[0][0]), Some(3));
        assert_eq!(rank(x[2], g.g[0][0]), Some(3));
        // the ring closes: x_4 and x_1 share g_2
        assert_eq!(rank(x[3], g.g[0][1]), Some(3));
        assert_eq!(rank(x[0], g.g[0][1]), Some(3));
        // occurrences go to distinct houses in increasing order
        assert_eq!(g.occurrence[0], [g.p[0][0], g.p[0][1], g.q[0][0]]);
    }

    #[test]
    fn assignment_round_trip() {
        let f = CnfFormula::new(3, vec![[1, -2, 3]]).unwrap();
        let g = build_3sat_gadget(&f).unwrap();
        for assign in [vec![true, true, false], vec![false, false, false], vec![true, false, true]] {
            let m = g.assignment_to_matching(&assign).unwrap();
            assert!(verify(&g.instance, &m, Mode::Weak).holds);
            let back = g.matching_to_assignment(&m).unwrap();
            assert!(f.is_satisfied_by(&back));
        }
        assert!(g.assignment_to_matching(&[false, true, false]).is_err());
    }

    #[test]
    fn true_variable_fills_even_agents() {
        let f = CnfFormula::new(1, vec![[1, 1, 1]]).unwrap();
        let g = build_3sat_gadget(&f).unwrap();
        let m = g.assignment_to_matching(&[true]).unwrap();
        for &a in g.var_agents[0].iter().skip(1).step_by(2) {
            assert_eq!(m.agent_degree(&g.instance, a), 3);
        }
        assert_eq!(g.matching_to_assignment(&m).unwrap(), vec![true]);
    }
}
