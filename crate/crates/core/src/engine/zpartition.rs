use std::collections::VecDeque;

use super::graph::{max_b_matching, EdgeSet, Graph};
use super::partition::{ImprovingSequence, PartitionSpec, SequencePath};
use crate::error::{Error, Result};
use crate::instance::{AgentId, Instance};
use crate::io::{parse_instance, tokenized_lines};

/// Graph of one class: local agent `i` is global agent `agents[i]`.
/// Agent capacities are 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub agents: Vec<AgentId>,
    pub graph: Graph,
}

impl Component {
    /// Component with no houses: its only saturable set is empty.
    pub fn trivial(agents: Vec<AgentId>) -> Component {
        let n = agents.len();
        Component { agents, graph: Graph::new(vec![1; n], Vec::new(), Vec::new()).unwrap() }
    }

    fn local_mask(&self, global: &[bool]) -> Vec<bool> {
        self.agents.iter().map(|&a| global[a]).collect()
    }
}

/// Largest number of agents of `subset` (local membership) saturated
/// together by one maximum matching of `g`, with such a matching.
///
/// Starts from any maximum matching and repeatedly flips an even
/// alternating path from an unmatched `subset` agent to a matched agent
/// outside `subset`.
pub fn saturating_max_matching(g: &Graph, subset: &[bool]) -> (usize, EdgeSet) {
    let mut m = max_b_matching(g);
    loop {
        let matched = g.matched_agents(&m);
        let mut flipped = false;
        for a in 0..g.num_agents() {
            if !subset[a] || matched[a] || g.agent_cap(a) == 0 {
                continue;
            }
            if let Some(path) = path_to_outsider(g, &m, a, subset) {
                for e in path {
                    m[e] = !m[e];
                }
                flipped = true;
                break;
            }
        }
        if !flipped {
            let matched = g.matched_agents(&m);
            let d = (0..g.num_agents()).filter(|&a| subset[a] && matched[a]).count();
            return (d, m);
        }
    }
}

fn path_to_outsider(g: &Graph, m: &[bool], a: AgentId, subset: &[bool]) -> Option<Vec<usize>> {
    let mut pred: Vec<Option<(AgentId, usize, usize)>> = vec![None; g.num_agents()];
    let mut seen_agent = vec![false; g.num_agents()];
    let mut seen_house = vec![false; g.num_houses()];
    seen_agent[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(x) = queue.pop_front() {
        for &e in g.agent_edges(x) {
            let h = g.edge(e).1;
            if m[e] || seen_house[h] {
                continue;
            }
            seen_house[h] = true;
            for &f in g.house_edges(h) {
                let y = g.edge(f).0;
                if !m[f] || seen_agent[y] {
                    continue;
                }
                seen_agent[y] = true;
                pred[y] = Some((x, e, f));
                if !subset[y] {
                    let mut path = Vec::new();
                    let mut v = y;
                    while let Some((u, e, f)) = pred[v] {
                        path.push(f);
                        path.push(e);
                        v = u;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(y);
            }
        }
    }
    None
}

/// `d(A')`: the size of the largest subset of `subset` contained in some
/// saturable set of `g`.
pub fn compute_d(g: &Graph, subset: &[bool]) -> usize {
    saturating_max_matching(g, subset).0
}

/// Whether `z` is exactly the agent set saturated by some maximum matching.
pub fn z_membership(g: &Graph, z: &[bool]) -> bool {
    let size = z.iter().filter(|&&x| x).count();
    size == Graph::size(&max_b_matching(g))
        && Graph::size(&max_b_matching(&g.restrict_agents(|a| z[a]))) == size
}

/// Partition whose class `i` must contain, among its matched agents, a set
/// saturated by some maximum matching of `components[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZSpec {
    pub partition: PartitionSpec,
    pub components: Vec<Component>,
    /// Common size of the saturable sets of each component.
    pub targets: Vec<usize>,
}

impl ZSpec {
    pub fn new(partition: PartitionSpec, components: Vec<Component>) -> Result<ZSpec> {
        if components.len() != partition.num_classes() {
            return Err(Error::LengthMismatch(partition.num_classes(), components.len()));
        }
        for (i, c) in components.iter().enumerate() {
            let mut a = c.agents.clone();
            let mut b = partition.classes[i].clone();
            a.sort_unstable();
            b.sort_unstable();
            if a != b || c.graph.num_agents() != c.agents.len() {
                return Err(Error::Precondition(format!(
                    "component of class {} does not cover exactly its agents",
                    partition.names[i]
                )));
            }
        }
        let targets = components.iter().map(|c| Graph::size(&max_b_matching(&c.graph))).collect();
        Ok(ZSpec { partition, components, targets })
    }

    /// Every quota-`k` set of a class is saturable: one house of capacity
    /// `k` adjacent to all class agents.
    pub fn from_partition(spec: &PartitionSpec) -> ZSpec {
        let components = spec
            .classes
            .iter()
            .zip(&spec.quotas)
            .map(|(class, &k)| {
                let edges = (0..class.len()).map(|i| (i, 0)).collect();
                let graph = Graph::new(vec![1; class.len()], vec![k as u32], edges).unwrap();
                Component { agents: class.clone(), graph }
            })
            .collect();
        ZSpec::new(spec.clone(), components).expect("components mirror the partition")
    }

    fn d_all(&self, matched: &[bool]) -> Vec<usize> {
        self.components.iter().map(|c| compute_d(&c.graph, &c.local_mask(matched))).collect()
    }

    /// Whether the matched agents of every class contain a saturable set.
    pub fn is_satisfied(&self, g: &Graph, m: &[bool]) -> bool {
        let matched = g.matched_agents(m);
        self.d_all(&matched).iter().zip(&self.targets).all(|(d, t)| d >= t)
    }

    fn potential(&self, matched: &[bool]) -> usize {
        self.d_all(matched).iter().zip(&self.targets).map(|(&d, &t)| d.min(t)).sum()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Standing {
    Equal,
    Deficient,
    Excessive,
    Both,
}

struct ZSearch<'a> {
    g: &'a Graph,
    m: &'a [bool],
    spec: &'a ZSpec,
    standing: Vec<Standing>,
    base_potential: usize,
    matched: Vec<bool>,
    used_edge: Vec<bool>,
    used_agent: Vec<bool>,
    paths: Vec<SequencePath>,
}

impl ZSearch<'_> {
    fn class(&self, a: AgentId) -> usize {
        self.spec.partition.class_of(a)
    }

    /// Extends the current (last) path from agent `x`.
    fn extend(&mut self, x: AgentId) -> bool {
        let g = self.g;
        for &e in g.agent_edges(x) {
            if self.m[e] || self.used_edge[e] {
                continue;
            }
            let h = g.edge(e).1;
            for &f in g.house_edges(h) {
                if !self.m[f] || self.used_edge[f] {
                    continue;
                }
                let y = g.edge(f).0;
                if self.used_agent[y] {
                    continue;
                }
                self.used_edge[e] = true;
                self.used_edge[f] = true;
                self.used_agent[y] = true;
                self.paths.last_mut().unwrap().edges.extend([e, f]);
                if self.arrive(y) {
                    return true;
                }
                let p = self.paths.last_mut().unwrap();
                p.edges.truncate(p.edges.len() - 2);
                self.used_edge[e] = false;
                self.used_edge[f] = false;
                self.used_agent[y] = false;
            }
        }
        false
    }

    /// At matched agent `y`, which the current path has just reached by
    /// its matching edge.
    fn arrive(&mut self, y: AgentId) -> bool {
        let t = self.class(y);
        let saved_end = self.paths.last().unwrap().end;
        self.paths.last_mut().unwrap().end = y;
        if matches!(self.standing[t], Standing::Excessive | Standing::Both) {
            self.matched[y] = false;
            if self.spec.potential(&self.matched) > self.base_potential {
                return true;
            }
            self.matched[y] = true;
        }
        if self.extend(y) {
            return true;
        }
        if self.standing[t] == Standing::Equal {
            let class = self.spec.partition.classes[t].clone();
            let comp = &self.spec.components[t];
            for z in class {
                if self.matched[z] || self.used_agent[z] {
                    continue;
                }
                self.matched[y] = false;
                self.matched[z] = true;
                if z_membership(&comp.graph, &comp.local_mask(&self.matched)) {
                    self.used_agent[z] = true;
                    self.paths.push(SequencePath { start: z, end: z, edges: Vec::new() });
                    if self.extend(z) {
                        return true;
                    }
                    self.paths.pop();
                    self.used_agent[z] = false;
                }
                self.matched[y] = true;
                self.matched[z] = false;
            }
        }
        self.paths.last_mut().unwrap().end = saved_end;
        false
    }
}

/// Depth-first search over edge-disjoint path sequences from an unmatched
/// agent of a deficient class to a matched agent of an excessive class,
/// linking only through equal classes with saturable hand-offs. A sequence
/// is accepted only if it raises the total of `min(d_i, |Z_i|)`, so the
/// driver loop always terminates.
pub fn find_z_improving_sequence(g: &Graph, m: &[bool], spec: &ZSpec) -> Result<Option<ImprovingSequence>> {
    let matched = g.matched_agents(m);
    let d = spec.d_all(&matched);
    let standing: Vec<Standing> = (0..spec.partition.num_classes())
        .map(|i| {
            let size = spec.partition.classes[i].iter().filter(|&&a| matched[a]).count();
            match (d[i] < spec.targets[i], size > d[i]) {
                (false, false) => Standing::Equal,
                (true, false) => Standing::Deficient,
                (false, true) => Standing::Excessive,
                (true, true) => Standing::Both,
            }
        })
        .collect();
    if !standing.iter().any(|s| matches!(s, Standing::Deficient | Standing::Both)) {
        return Err(Error::Precondition("no deficient class".into()));
    }
    let base_potential = d.iter().zip(&spec.targets).map(|(&d, &t)| d.min(t)).sum();
    let mut search = ZSearch {
        g,
        m,
        spec,
        standing,
        base_potential,
        matched,
        used_edge: vec![false; g.num_edges()],
        used_agent: vec![false; g.num_agents()],
        paths: Vec::new(),
    };
    for a in 0..g.num_agents() {
        let c = search.class(a);
        if search.matched[a] || !matches!(search.standing[c], Standing::Deficient | Standing::Both) {
            continue;
        }
        search.matched[a] = true;
        search.used_agent[a] = true;
        search.paths.push(SequencePath { start: a, end: a, edges: Vec::new() });
        if search.extend(a) {
            return Ok(Some(ImprovingSequence { paths: search.paths }));
        }
        search.paths.pop();
        search.used_agent[a] = false;
        search.matched[a] = false;
    }
    Ok(None)
}

/// A maximum matching satisfying `spec`, or `None` when no z-improving
/// sequence is left.
pub fn z_partition_matching(g: &Graph, spec: &ZSpec) -> Result<Option<EdgeSet>> {
    if (0..g.num_agents()).any(|a| g.agent_cap(a) != 1) {
        return Err(Error::Precondition("z-partition matching needs unit agent capacities".into()));
    }
    let mut m = max_b_matching(g);
    while !spec.is_satisfied(g, &m) {
        match find_z_improving_sequence(g, &m, spec)? {
            Some(seq) => m = seq.apply(&m),
            None => return Ok(None),
        }
    }
    Ok(Some(m))
}

/// Reads a partition file whose classes are each followed by
/// `component <name> <instance-file>` lines naming their graphs; `load`
/// resolves file names. Classes without a component get a trivial one.
pub fn parse_zspec(inst: &Instance, text: &str, load: impl Fn(&str) -> Result<String>) -> Result<ZSpec> {
    let mut class_lines = String::new();
    let mut refs = Vec::new();
    for (line, toks) in tokenized_lines(text) {
        match toks.as_slice() {
            ["component", name, file] => refs.push((line, name.to_string(), file.to_string())),
            ["class", ..] => {
                class_lines.push_str(&toks.join(" "));
                class_lines.push('\n');
            }
            _ => return Err(Error::Syntax { line, message: "expected `class` or `component`".into() }),
        }
    }
    let partition = super::partition::parse_partition_spec(inst, &class_lines)?;
    let mut components: Vec<Option<Component>> = vec![None; partition.num_classes()];
    for (line, name, file) in refs {
        let i = partition
            .names
            .iter()
            .position(|n| *n == name)
            .ok_or_else(|| Error::Syntax { line, message: format!("no class named {name}") })?;
        let sub = parse_instance(&load(&file)?)?;
        let mut agents = (0..sub.num_agents())
            .map(|a| inst.agent_by_name(sub.agent_name(a)).ok_or_else(|| Error::UnknownAgent(sub.agent_name(a).into())))
            .collect::<Result<Vec<_>>>()?;
        // class agents absent from the file are isolated in the component
        for &a in &partition.classes[i] {
            if !agents.contains(&a) {
                agents.push(a);
            }
        }
        let edges = sub.edges().iter().map(|e| (e.agent, e.house)).collect();
        let house_caps = (0..sub.num_houses()).map(|h| sub.house_capacity(h)).collect();
        let graph = Graph::new(vec![1; agents.len()], house_caps, edges)?;
        components[i] = Some(Component { agents, graph });
    }
    let components = components
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.unwrap_or_else(|| Component::trivial(partition.classes[i].clone())))
        .collect();
    let spec = ZSpec::new(partition, components)?;
    for (i, (&k, &t)) in spec.partition.quotas.iter().zip(&spec.targets).enumerate() {
        if k != t {
            return Err(Error::Precondition(format!(
                "class {} states {} but its component's maximum matching has size {}",
                spec.partition.names[i], k, t
            )));
        }
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::partition::partition_matching;

    fn unit(na: usize, nh: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::new(vec![1; na], vec![1; nh], edges.to_vec()).unwrap()
    }

    #[test]
    fn d_examples() {
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        assert_eq!(compute_d(&g, &[false, false]), 0);
        assert_eq!(compute_d(&g, &[true, true]), 1);
        assert_eq!(compute_d(&g, &[false, true]), 1);
        let g = unit(2, 2, &[(0, 0), (1, 1)]);
        assert_eq!(compute_d(&g, &[true, true]), 2);
    }

    #[test]
    fn d_needs_exchange() {
        // max matching may pick a0-h0; A' = {a1} forces the swap to a1-h0
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        let (d, m) = saturating_max_matching(&g, &[false, true]);
        assert_eq!(d, 1);
        assert_eq!(m, vec![false, true]);
    }

    #[test]
    fn membership_examples() {
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        assert!(z_membership(&g, &[true, false]));
        assert!(z_membership(&g, &[false, true]));
        assert!(!z_membership(&g, &[true, true]));
        assert!(!z_membership(&g, &[false, false]));
        let m = max_b_matching(&g);
        assert!(z_membership(&g, &g.matched_agents(&m)));
    }

    #[test]
    fn degenerate_spec_matches_partition() {
        let g = unit(3, 2, &[(0, 0), (1, 0), (1, 1), (2, 1)]);
        for quotas in [[1, 0, 0], [0, 1, 1], [1, 1, 1], [1, 0, 1]] {
            let spec = PartitionSpec::new(
                3,
                vec!["x".into(), "y".into(), "z".into()],
                vec![vec![0], vec![1], vec![2]],
                quotas.to_vec(),
            )
            .unwrap();
            let plain = partition_matching(&g, &spec).unwrap();
            let z = z_partition_matching(&g, &ZSpec::from_partition(&spec)).unwrap();
            assert_eq!(plain.is_some(), z.is_some(), "quotas {quotas:?}");
            if let Some(z) = z {
                assert!(spec.is_satisfied(&g, &z));
            }
        }
    }

    #[test]
    fn singleton_saturable_sets_force_agents() {
        // class {a0, a1} must have a0 matched: component a0-h only
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        let partition = PartitionSpec::new(2, vec!["c".into()], vec![vec![0, 1]], vec![1]).unwrap();
        let comp = Component { agents: vec![0, 1], graph: unit(2, 1, &[(0, 0)]) };
        let spec = ZSpec::new(partition.clone(), vec![comp]).unwrap();
        assert_eq!(z_partition_matching(&g, &spec).unwrap(), Some(vec![true, false]));

        // same but the graph cannot match a0 at all
        let g = unit(2, 1, &[(1, 0)]);
        let comp = Component { agents: vec![0, 1], graph: unit(2, 1, &[(0, 0)]) };
        let spec = ZSpec::new(partition, vec![comp]).unwrap();
        assert_eq!(z_partition_matching(&g, &spec).unwrap(), None);
    }

    #[test]
    fn trivial_spec_accepts_any_maximum() {
        let g = unit(2, 1, &[(0, 0), (1, 0)]);
        let partition = PartitionSpec::new(2, vec!["c".into()], vec![vec![0, 1]], vec![0]).unwrap();
        let spec = ZSpec::new(partition, vec![Component::trivial(vec![0, 1])]).unwrap();
        assert_eq!(Graph::size(&z_partition_matching(&g, &spec).unwrap().unwrap()), 1);
    }

    #[test]
    fn zspec_file() {
        let inst = Instance::from_parts(&[1, 1], &[1], &[(0, 0, 1), (1, 0, 1)]).unwrap();
        let text = "class c 1 a1 a2\ncomponent c comp.txt\n";
        let spec = parse_zspec(&inst, text, |_| Ok("agent a1 1\nhouse x 1\nedge a1 x 1\n".into())).unwrap();
        assert_eq!(spec.targets, vec![1]);
        assert_eq!(spec.components[0].agents, vec![0, 1]);
        let wrong = Component::trivial(vec![0]);
        assert!(ZSpec::new(spec.partition.clone(), vec![wrong]).is_err());
        assert!(parse_zspec(&inst, "class c 0 a1 a2\ncomponent c f\n", |_| Ok("agent a1 1\nhouse x 1\nedge a1 x 1\n".into())).is_err());
    }
}
