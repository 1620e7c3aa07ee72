//! Alternating-path certificates of (weak) non-popularity.
//!
//! An *even path* starts at an agent with a non-matching edge, alternates
//! matching and non-matching edges, never repeats an edge, and at every
//! interior agent leaves on an edge of the same rank as the matching edge
//! it arrived on. Vertices may repeat.
//!
//! A matching is popular iff none of the four witness configurations
//! below exists, and weakly popular iff none of types 1, 3 and 4 exists.
//! A start agent is *eligible* when it is unsaturated or holds a matching
//! edge (outside the witness) ranked worse than its first path edge; that
//! edge is then the witness's `aux_edge` and is dropped when the witness
//! is applied.
//!
//! * Type 1: an even path into agent `a_k` by a matching edge, a strictly
//!   better non-matching edge `(a_k, h_k)`, then a matching edge
//!   `(h_k, a_{k+1})`. Either the start agent, `a_k` and `a_{k+1}` are
//!   pairwise different and the start is eligible, or `a_{k+1}` is the
//!   start agent and `(h_k, a_1)` ranks worse than the first edge.
//! * Type 2: two edge-disjoint even paths from eligible agents ending at a
//!   common third agent through distinct matching edges.
//! * Type 3: an even path from an eligible agent to an unsaturated house.
//! * Type 4: an even path closing back at its start agent through a
//!   matching edge ranked worse than the first edge.
//!
//! Detection is exhaustive depth-first search over edge-simple paths,
//! one search per non-matching start edge.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::ops::ControlFlow;

use crate::compare::{more_popular, more_weakly_popular, Verdict};
use crate::error::{Error, Result};
use crate::instance::{AgentId, BMatching, EdgeId, HouseId, Instance, Vertex};
use crate::io::tokenized_lines;
use crate::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WitnessKind {
    Type1,
    Type2,
    Type3,
    Type4,
}

impl WitnessKind {
    pub fn number(self) -> u8 {
        match self {
            WitnessKind::Type1 => 1,
            WitnessKind::Type2 => 2,
            WitnessKind::Type3 => 3,
            WitnessKind::Type4 => 4,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        Some(match n {
            1 => WitnessKind::Type1,
            2 => WitnessKind::Type2,
            3 => WitnessKind::Type3,
            4 => WitnessKind::Type4,
            _ => return None,
        })
    }

    /// Whether a witness of this kind refutes the given mode.
    pub fn refutes(self, mode: Mode) -> bool {
        mode == Mode::Popular || self != WitnessKind::Type2
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "type {}", self.number())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub kind: WitnessKind,
    /// Edge sequence starting with the non-matching edge at the start agent.
    pub path: Vec<EdgeId>,
    /// Matching edge at the start agent given up to make room.
    pub aux_edge: Option<EdgeId>,
    /// Type 2 only: the second even path, from its own start agent to the
    /// shared terminal agent.
    pub second_path: Option<Vec<EdgeId>>,
    pub second_aux: Option<EdgeId>,
}

impl Witness {
    pub fn start_agent(&self, inst: &Instance) -> AgentId {
        inst.edge(self.path[0]).agent
    }

    /// All edges toggled when the witness is applied.
    pub fn toggled_edges(&self) -> Vec<EdgeId> {
        let mut out = self.path.clone();
        out.extend(self.aux_edge);
        if let Some(p) = &self.second_path {
            out.extend(p);
        }
        out.extend(self.second_aux);
        out
    }
}

/// Vertex sequence of an agent-first edge path.
pub fn path_vertices(inst: &Instance, path: &[EdgeId]) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(path.len() + 1);
    let Some(&first) = path.first() else {
        return out;
    };
    out.push(Vertex::Agent(inst.edge(first).agent));
    for (i, &e) in path.iter().enumerate() {
        let edge = inst.edge(e);
        out.push(if i % 2 == 0 {
            Vertex::House(edge.house)
        } else {
            Vertex::Agent(edge.agent)
        });
    }
    out
}

/// Per-vertex reachability by even paths from one start edge.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EvenPathReach {
    /// First path found reaching each vertex.
    pub paths: BTreeMap<Vertex, Vec<EdgeId>>,
}

impl EvenPathReach {
    pub fn reaches(&self, v: Vertex) -> bool {
        self.paths.contains_key(&v)
    }
}

/// A completed even path ending at an agent through a matching edge,
/// kept for pairing into type 2 witnesses.
struct Arrival {
    start: AgentId,
    first_rank: u32,
    terminal: AgentId,
    path: Vec<EdgeId>,
    mask: Vec<u64>,
}

fn mask_of(n: usize, edges: &[EdgeId]) -> Vec<u64> {
    let mut mask = vec![0u64; n.div_ceil(64)];
    for &e in edges {
        mask[e / 64] |= 1 << (e % 64);
    }
    mask
}

#[derive(Clone, Copy)]
enum Goal {
    Reach,
    Type1,
    Type3,
    Type4,
    Arrivals,
}

struct Walker<'a> {
    inst: &'a Instance,
    m: &'a BMatching,
    goal: Goal,
    start: AgentId,
    first_rank: u32,
    used: Vec<bool>,
    path: Vec<EdgeId>,
    mode: Mode,
    reach: EvenPathReach,
    arrivals: Vec<Arrival>,
}

type Flow = ControlFlow<Witness>;

impl<'a> Walker<'a> {
    fn new(inst: &'a Instance, m: &'a BMatching, goal: Goal, mode: Mode, start_edge: EdgeId) -> Self {
        let e = inst.edge(start_edge);
        Walker {
            inst,
            m,
            goal,
            start: e.agent,
            first_rank: e.rank,
            used: vec![false; inst.num_edges()],
            path: Vec::new(),
            mode,
            reach: EvenPathReach::default(),
            arrivals: Vec::new(),
        }
    }

    fn run(&mut self, start_edge: EdgeId) -> Flow {
        self.push(start_edge);
        let flow = self.at_house(self.inst.edge(start_edge).house);
        self.pop();
        flow
    }

    fn push(&mut self, e: EdgeId) {
        self.used[e] = true;
        self.path.push(e);
    }

    fn pop(&mut self) {
        let e = self.path.pop().expect("nonempty path");
        self.used[e] = false;
    }

    /// Room for the start agent's new edge: `Some(None)` when unsaturated,
    /// `Some(Some(e))` when a worse matching edge outside the path exists.
    fn room(&self) -> Option<Option<EdgeId>> {
        start_room(self.inst, self.m, self.start, self.first_rank, |e| self.used[e])
    }

    fn witness(&self, kind: WitnessKind, extra: &[EdgeId], aux_edge: Option<EdgeId>) -> Option<Witness> {
        let mut path = self.path.clone();
        path.extend_from_slice(extra);
        let w = Witness {
            kind,
            path,
            aux_edge,
            second_path: None,
            second_aux: None,
        };
        improves(self.inst, self.m, &w, self.mode).then_some(w)
    }

    fn record(&mut self, v: Vertex) {
        if !self.reach.paths.contains_key(&v) {
            self.reach.paths.insert(v, self.path.clone());
        }
    }

    fn at_house(&mut self, h: HouseId) -> Flow {
        let (inst, m) = (self.inst, self.m);
        match self.goal {
            Goal::Reach => self.record(Vertex::House(h)),
            Goal::Type3 => {
                if !m.is_saturated(inst, Vertex::House(h)) {
                    if let Some(w) = self.room().and_then(|aux| self.witness(WitnessKind::Type3, &[], aux)) {
                        return ControlFlow::Break(w);
                    }
                }
            }
            Goal::Type4 => {
                for &g in inst.house_edges(h) {
                    let edge = inst.edge(g);
                    if m.contains(g) && !self.used[g] && edge.agent == self.start && edge.rank > self.first_rank {
                        if let Some(w) = self.witness(WitnessKind::Type4, &[g], None) {
                            return ControlFlow::Break(w);
                        }
                    }
                }
            }
            _ => {}
        }
        for &g in inst.house_edges(h) {
            if m.contains(g) && !self.used[g] {
                self.push(g);
                let flow = self.at_agent(inst.edge(g).agent, inst.edge(g).rank);
                self.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }

    /// At agent `a`, having arrived on a matching edge of rank `rank`.
    fn at_agent(&mut self, a: AgentId, rank: u32) -> Flow {
        let (inst, m) = (self.inst, self.m);
        match self.goal {
            Goal::Reach => self.record(Vertex::Agent(a)),
            Goal::Type1 if a != self.start => {
                for f in inst.agent_edges(a) {
                    if m.contains(f) || self.used[f] || inst.edge(f).rank >= rank {
                        continue;
                    }
                    let hk = inst.edge(f).house;
                    for &g in inst.house_edges(hk) {
                        if !m.contains(g) || self.used[g] {
                            continue;
                        }
                        let next = inst.edge(g).agent;
                        if next == a {
                            continue;
                        }
                        if next == self.start {
                            if inst.edge(g).rank > self.first_rank {
                                if let Some(w) = self.witness(WitnessKind::Type1, &[f, g], None) {
                                    return ControlFlow::Break(w);
                                }
                            }
                            continue;
                        }
                        self.used[f] = true;
                        self.used[g] = true;
                        let room = self.room();
                        self.used[f] = false;
                        self.used[g] = false;
                        if let Some(w) = room.and_then(|aux| self.witness(WitnessKind::Type1, &[f, g], aux)) {
                            return ControlFlow::Break(w);
                        }
                    }
                }
            }
            Goal::Arrivals if a != self.start => {
                self.arrivals.push(Arrival {
                    start: self.start,
                    first_rank: self.first_rank,
                    terminal: a,
                    path: self.path.clone(),
                    mask: mask_of(inst.num_edges(), &self.path),
                });
            }
            _ => {}
        }
        for f in inst.agent_edges(a) {
            if !m.contains(f) && !self.used[f] && inst.edge(f).rank == rank {
                self.push(f);
                let flow = self.at_house(inst.edge(f).house);
                self.pop();
                flow?;
            }
        }
        ControlFlow::Continue(())
    }
}

fn start_room(
    inst: &Instance,
    m: &BMatching,
    start: AgentId,
    first_rank: u32,
    excluded: impl Fn(EdgeId) -> bool,
) -> Option<Option<EdgeId>> {
    if !m.is_saturated(inst, Vertex::Agent(start)) {
        return Some(None);
    }
    inst.agent_edges(start)
        .find(|&e| m.contains(e) && !excluded(e) && inst.edge(e).rank > first_rank)
        .map(Some)
}

fn start_edges<'a>(inst: &'a Instance, m: &'a BMatching) -> impl Iterator<Item = EdgeId> + 'a {
    (0..inst.num_edges()).filter(move |&e| !m.contains(e))
}

/// Vertices reachable from `start_edge` by even paths, each with the
/// first path found.
pub fn find_even_paths(inst: &Instance, m: &BMatching, start_edge: EdgeId) -> Result<EvenPathReach> {
    if m.contains(start_edge) {
        let e = inst.edge(start_edge);
        return Err(Error::Precondition(format!(
            "start edge ({}, {}) is in the matching",
            inst.agent_name(e.agent),
            inst.house_name(e.house)
        )));
    }
    let mut w = Walker::new(inst, m, Goal::Reach, Mode::Popular, start_edge);
    let _ = w.run(start_edge);
    Ok(w.reach)
}

fn detect_type2(inst: &Instance, m: &BMatching, mode: Mode) -> Option<Witness> {
    let mut arrivals = Vec::new();
    for s in start_edges(inst, m) {
        let mut w = Walker::new(inst, m, Goal::Arrivals, mode, s);
        let _ = w.run(s);
        arrivals.append(&mut w.arrivals);
    }
    for (i, p) in arrivals.iter().enumerate() {
        for q in &arrivals[i + 1..] {
            if p.terminal != q.terminal || p.start == q.start {
                continue;
            }
            if p.mask.iter().zip(&q.mask).any(|(x, y)| x & y != 0) {
                continue;
            }
            let in_union = |e: EdgeId| (p.mask[e / 64] | q.mask[e / 64]) >> (e % 64) & 1 == 1;
            let (Some(aux1), Some(aux2)) = (
                start_room(inst, m, p.start, p.first_rank, in_union),
                start_room(inst, m, q.start, q.first_rank, in_union),
            ) else {
                continue;
            };
            let w = Witness {
                kind: WitnessKind::Type2,
                path: p.path.clone(),
                aux_edge: aux1,
                second_path: Some(q.path.clone()),
                second_aux: aux2,
            };
            if improves(inst, m, &w, mode) {
                return Some(w);
            }
        }
    }
    None
}

/// Whether toggling the witness edges beats `m` under `mode`.
///
/// The path conditions alone suffice for head-count popularity. Under the
/// weak comparison an agent visited twice can lose more tuple positions
/// than the local exchanges suggest, so candidates are checked outright.
fn improves(inst: &Instance, m: &BMatching, w: &Witness, mode: Mode) -> bool {
    let Ok(next) = m.toggled(inst, w.toggled_edges()) else {
        return false;
    };
    let verdict = match mode {
        Mode::Popular => more_popular(inst, &next, m).verdict,
        Mode::Weak => more_weakly_popular(inst, &next, m).verdict,
    };
    verdict == Verdict::FirstMorePopular
}

/// Searches exhaustively for a witness of the given kind whose application
/// beats `m` under `mode`; start edges are tried in edge order.
pub fn detect_witness(inst: &Instance, m: &BMatching, kind: WitnessKind, mode: Mode) -> Option<Witness> {
    let goal = match kind {
        WitnessKind::Type1 => Goal::Type1,
        WitnessKind::Type3 => Goal::Type3,
        WitnessKind::Type4 => Goal::Type4,
        WitnessKind::Type2 => return detect_type2(inst, m, mode),
    };
    for s in start_edges(inst, m) {
        let mut w = Walker::new(inst, m, goal, mode, s);
        if let ControlFlow::Break(found) = w.run(s) {
            return Some(found);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub holds: bool,
    pub witness: Option<Witness>,
}

/// Decides (weak) popularity of `m`; witness kinds are tried in the order
/// 3, 4, 1, 2 and type 2 is skipped in weak mode.
pub fn verify(inst: &Instance, m: &BMatching, mode: Mode) -> Certificate {
    let order = [
        WitnessKind::Type3,
        WitnessKind::Type4,
        WitnessKind::Type1,
        WitnessKind::Type2,
    ];
    for kind in order.into_iter().filter(|k| k.refutes(mode)) {
        if let Some(w) = detect_witness(inst, m, kind, mode) {
            return Certificate {
                holds: false,
                witness: Some(w),
            };
        }
    }
    Certificate {
        holds: true,
        witness: None,
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidWitness(msg.into())
}

/// Checks that `path` is an even path whose rank-equality condition holds
/// at every interior agent except those listed in `free_agents`
/// (positions into the agent sequence).
fn check_even(inst: &Instance, m: &BMatching, path: &[EdgeId], free_agents: &[usize]) -> Result<()> {
    if path.is_empty() {
        return Err(invalid("empty path"));
    }
    let mut seen = vec![false; inst.num_edges()];
    for (i, &e) in path.iter().enumerate() {
        if e >= inst.num_edges() {
            return Err(invalid("edge out of range"));
        }
        if std::mem::replace(&mut seen[e], true) {
            return Err(invalid("edge repeated"));
        }
        if m.contains(e) != (i % 2 == 1) {
            return Err(invalid("path does not alternate from a non-matching edge"));
        }
        if i > 0 {
            let (prev, cur) = (inst.edge(path[i - 1]), inst.edge(e));
            let linked = if i % 2 == 1 { prev.house == cur.house } else { prev.agent == cur.agent };
            if !linked {
                return Err(invalid("consecutive edges do not share a vertex"));
            }
            // leaving an interior agent: agent index i / 2
            if i % 2 == 0 && !free_agents.contains(&(i / 2)) && prev.rank != cur.rank {
                return Err(invalid("rank changes at an interior agent"));
            }
        }
    }
    Ok(())
}

fn check_room(
    inst: &Instance,
    m: &BMatching,
    start: AgentId,
    first_rank: u32,
    aux: Option<EdgeId>,
    toggled: &[EdgeId],
) -> Result<()> {
    let saturated = m.is_saturated(inst, Vertex::Agent(start));
    match (saturated, aux) {
        (false, None) => Ok(()),
        (false, Some(_)) => Err(invalid("aux edge given for an unsaturated start agent")),
        (true, None) => Err(invalid("start agent is saturated and no aux edge is given")),
        (true, Some(e)) => {
            let edge = inst.edge(e);
            if edge.agent != start || !m.contains(e) || edge.rank <= first_rank || toggled.contains(&e) {
                return Err(invalid("aux edge is not a worse matching edge of the start agent"));
            }
            Ok(())
        }
    }
}

/// Verifies every structural condition of `w` against `m`.
pub fn check_witness(inst: &Instance, m: &BMatching, w: &Witness) -> Result<()> {
    let p = &w.path;
    if p.is_empty() || p.iter().any(|&e| e >= inst.num_edges()) {
        return Err(invalid("bad path"));
    }
    let start = inst.edge(p[0]).agent;
    let first_rank = inst.edge(p[0]).rank;
    let all = w.toggled_edges();
    if w.kind != WitnessKind::Type2 && (w.second_path.is_some() || w.second_aux.is_some()) {
        return Err(invalid("second path on a single-path witness"));
    }
    match w.kind {
        WitnessKind::Type3 => {
            check_even(inst, m, p, &[])?;
            if p.len().is_multiple_of(2) {
                return Err(invalid("type 3 path must end at a house"));
            }
            let h = inst.edge(*p.last().unwrap()).house;
            if m.is_saturated(inst, Vertex::House(h)) {
                return Err(invalid("type 3 terminal house is saturated"));
            }
            check_room(inst, m, start, first_rank, w.aux_edge, p)
        }
        WitnessKind::Type4 => {
            check_even(inst, m, p, &[p.len() / 2])?;
            let last = inst.edge(*p.last().unwrap());
            if p.len() % 2 == 1 || last.agent != start || last.rank <= first_rank {
                return Err(invalid("type 4 path must close at its start through a worse matching edge"));
            }
            if w.aux_edge.is_some() {
                return Err(invalid("type 4 takes no aux edge"));
            }
            Ok(())
        }
        WitnessKind::Type1 => {
            let n = p.len();
            if n < 4 || n % 2 == 1 {
                return Err(invalid("type 1 path has the wrong length"));
            }
            // agent positions: a_k is n/2 - 1, a_{k+1} is n/2
            check_even(inst, m, p, &[n / 2 - 1, n / 2])?;
            let into_k = inst.edge(p[n - 3]);
            let out_k = inst.edge(p[n - 2]);
            if into_k.rank <= out_k.rank {
                return Err(invalid("type 1 needs a strict improvement at a_k"));
            }
            let ak = into_k.agent;
            let ak1 = inst.edge(p[n - 1]).agent;
            let closing_rank = inst.edge(p[n - 1]).rank;
            if ak == start || ak == ak1 {
                return Err(invalid("type 1 agents must differ"));
            }
            if ak1 == start {
                if closing_rank <= first_rank {
                    return Err(invalid("type 1 closing edge must rank worse than the first edge"));
                }
                if w.aux_edge.is_some() {
                    return Err(invalid("closed type 1 takes no aux edge"));
                }
                Ok(())
            } else {
                check_room(inst, m, start, first_rank, w.aux_edge, p)
            }
        }
        WitnessKind::Type2 => {
            let q = w.second_path.as_ref().ok_or_else(|| invalid("type 2 needs two paths"))?;
            for path in [p, q] {
                if path.len() < 2 || path.len() % 2 == 1 {
                    return Err(invalid("type 2 paths must end at an agent"));
                }
                check_even(inst, m, path, &[path.len() / 2])?;
            }
            if p.iter().any(|e| q.contains(e)) {
                return Err(invalid("type 2 paths share an edge"));
            }
            let (a1, b1) = (start, inst.edge(q[0]).agent);
            let t1 = inst.edge(*p.last().unwrap()).agent;
            let t2 = inst.edge(*q.last().unwrap()).agent;
            if t1 != t2 || a1 == b1 || a1 == t1 || b1 == t1 {
                return Err(invalid("type 2 agents must be pairwise different with a shared terminal"));
            }
            let union: Vec<EdgeId> = p.iter().chain(q).copied().collect();
            check_room(inst, m, a1, first_rank, w.aux_edge, &union)?;
            check_room(inst, m, b1, inst.edge(q[0]).rank, w.second_aux, &union)?;
            if all.len() != all.iter().collect::<std::collections::HashSet<_>>().len() {
                return Err(invalid("aux edges overlap"));
            }
            Ok(())
        }
    }
}

/// `m ⊕ (witness edges)` after checking the witness.
pub fn apply_witness(inst: &Instance, m: &BMatching, w: &Witness) -> Result<BMatching> {
    check_witness(inst, m, w)?;
    m.toggled(inst, w.toggled_edges())
}

/// True when `w` is structurally valid and applying it beats `m` under
/// `mode`.
pub fn witness_is_sound(inst: &Instance, m: &BMatching, w: &Witness, mode: Mode) -> bool {
    check_witness(inst, m, w).is_ok() && w.kind.refutes(mode) && improves(inst, m, w, mode)
}

fn write_edges(out: &mut String, inst: &Instance, m: &BMatching, edges: &[EdgeId]) {
    for &e in edges {
        let edge = inst.edge(e);
        let flag = if m.contains(e) { 'M' } else { 'N' };
        writeln!(
            out,
            "{} {} {} rank={}",
            inst.agent_name(edge.agent),
            inst.house_name(edge.house),
            flag,
            edge.rank
        )
        .unwrap();
    }
}

pub fn serialize_witness(inst: &Instance, m: &BMatching, w: &Witness) -> String {
    let mut out = format!("kind={}\n", w.kind.number());
    let blocks = [(Some(&w.path), w.aux_edge), (w.second_path.as_ref(), w.second_aux)];
    for (path, aux) in blocks {
        let Some(path) = path else { continue };
        out.push_str("path:\n");
        write_edges(&mut out, inst, m, path);
        if let Some(a) = aux {
            out.push_str("aux:\n");
            write_edges(&mut out, inst, m, &[a]);
        }
    }
    out
}

/// Reads the output of [`serialize_witness`]; flags must agree with `m`.
pub fn parse_witness(inst: &Instance, m: &BMatching, text: &str) -> Result<Witness> {
    let mut kind = None;
    let mut paths: Vec<(Vec<EdgeId>, Option<EdgeId>)> = Vec::new();
    let mut in_aux = false;
    for (line, toks) in tokenized_lines(text) {
        let syntax = |message: &str| Error::Syntax { line, message: message.to_string() };
        match toks.as_slice() {
            [k] if k.starts_with("kind=") => {
                let n: u8 = k[5..].parse().map_err(|_| syntax("bad kind"))?;
                kind = Some(WitnessKind::from_number(n).ok_or_else(|| syntax("kind must be 1-4"))?);
            }
            ["path:"] => {
                paths.push((Vec::new(), None));
                in_aux = false;
            }
            ["aux:"] => in_aux = true,
            [a, h, flag, rank] => {
                let edge = inst
                    .agent_by_name(a)
                    .zip(inst.house_by_name(h))
                    .and_then(|(a, h)| inst.find_edge(a, h))
                    .ok_or_else(|| Error::NonEdge { agent: a.to_string(), house: h.to_string() })?;
                let want = if m.contains(edge) { "M" } else { "N" };
                if *flag != want || *rank != format!("rank={}", inst.edge(edge).rank) {
                    return Err(syntax("edge flag or rank does not match the instance and matching"));
                }
                let block = paths.last_mut().ok_or_else(|| syntax("edge before `path:`"))?;
                if in_aux {
                    if block.1.replace(edge).is_some() {
                        return Err(syntax("more than one aux edge"));
                    }
                } else {
                    block.0.push(edge);
                }
            }
            _ => return Err(syntax("unrecognized witness line")),
        }
    }
    let kind = kind.ok_or_else(|| Error::Malformed("missing kind line".into()))?;
    let mut it = paths.into_iter();
    let (path, aux_edge) = it.next().ok_or_else(|| Error::Malformed("missing path".into()))?;
    let (second_path, second_aux) = match it.next() {
        Some((p, a)) => (Some(p), a),
        None => (None, None),
    };
    Ok(Witness { kind, path, aux_edge, second_path, second_aux })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(inst: &Instance, ids: &[EdgeId]) -> BMatching {
        BMatching::from_edge_ids(inst, ids.iter().copied()).unwrap()
    }

    fn e(inst: &Instance, a: usize, h: usize) -> EdgeId {
        inst.find_edge(a, h).unwrap()
    }

    #[test]
    fn even_path_reach() {
        let inst = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        let r = find_even_paths(&inst, &BMatching::empty(&inst), 0).unwrap();
        assert_eq!(r.paths.len(), 1);
        assert_eq!(r.paths[&Vertex::House(0)], vec![0]);
        assert!(find_even_paths(&inst, &m(&inst, &[0]), 0).is_err());

        for (rank2, reaches_h2) in [(1, true), (2, false)] {
            let inst = Instance::from_parts(&[1, 1], &[1, 1], &[(0, 0, 1), (1, 0, 1), (1, 1, rank2)]).unwrap();
            let mm = m(&inst, &[e(&inst, 1, 0)]);
            let r = find_even_paths(&inst, &mm, e(&inst, 0, 0)).unwrap();
            assert!(r.reaches(Vertex::House(0)));
            assert!(r.reaches(Vertex::Agent(1)));
            assert_eq!(r.reaches(Vertex::House(1)), reaches_h2);
        }
    }

    #[test]
    fn type3_examples() {
        let inst = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        let w = detect_witness(&inst, &BMatching::empty(&inst), WitnessKind::Type3, Mode::Popular).unwrap();
        assert_eq!((w.path.clone(), w.aux_edge), (vec![0], None));
        assert_eq!(apply_witness(&inst, &BMatching::empty(&inst), &w).unwrap(), m(&inst, &[0]));

        let inst = Instance::from_parts(&[1], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        let base = m(&inst, &[e(&inst, 0, 1)]);
        let w = detect_witness(&inst, &base, WitnessKind::Type3, Mode::Popular).unwrap();
        assert_eq!(w.path, vec![e(&inst, 0, 0)]);
        assert_eq!(w.aux_edge, Some(e(&inst, 0, 1)));
        let next = apply_witness(&inst, &base, &w).unwrap();
        assert_eq!(next, m(&inst, &[e(&inst, 0, 0)]));
        let c = more_popular(&inst, &next, &base);
        assert_eq!((c.prefer_first, c.prefer_second), (1, 0));
        for mode in [Mode::Popular, Mode::Weak] {
            let cert = verify(&inst, &base, mode);
            assert!(!cert.holds);
            assert_eq!(cert.witness.unwrap().kind, WitnessKind::Type3);
        }
    }

    #[test]
    fn type1_chain() {
        // a1-h1 (2, N), h1-a2 (2, M), a2-h2 (1, N), h2-a3 (1, M)
        let inst = Instance::from_parts(&[1, 1, 1], &[1, 1], &[(0, 0, 2), (1, 0, 2), (1, 1, 1), (2, 1, 1)]).unwrap();
        let base = m(&inst, &[e(&inst, 1, 0), e(&inst, 2, 1)]);
        let w = detect_witness(&inst, &base, WitnessKind::Type1, Mode::Popular).unwrap();
        check_witness(&inst, &base, &w).unwrap();
        assert_eq!(w.path, vec![e(&inst, 0, 0), e(&inst, 1, 0), e(&inst, 1, 1), e(&inst, 2, 1)]);
        let next = apply_witness(&inst, &base, &w).unwrap();
        let c = more_popular(&inst, &next, &base);
        assert_eq!((c.prefer_first, c.prefer_second), (2, 1));
        assert!(witness_is_sound(&inst, &base, &w, Mode::Popular));
    }

    #[test]
    fn maximum_single_edge_is_popular() {
        let inst = Instance::from_parts(&[1], &[1], &[(0, 0, 1)]).unwrap();
        for mode in [Mode::Popular, Mode::Weak] {
            assert!(verify(&inst, &m(&inst, &[0]), mode).holds);
        }
    }

    #[test]
    fn type2_only_separates_modes() {
        // two agents whose rank-1 houses are both held by a capacity-2 agent
        let inst = Instance::from_parts(&[1, 1, 2], &[1, 1], &[(0, 0, 1), (1, 1, 1), (2, 0, 1), (2, 1, 1)]).unwrap();
        let base = m(&inst, &[e(&inst, 2, 0), e(&inst, 2, 1)]);
        assert!(verify(&inst, &base, Mode::Weak).holds);
        let cert = verify(&inst, &base, Mode::Popular);
        let w = cert.witness.unwrap();
        assert_eq!(w.kind, WitnessKind::Type2);
        assert!(witness_is_sound(&inst, &base, &w, Mode::Popular));
    }

    #[test]
    fn witness_text_round_trip() {
        let inst = Instance::from_parts(&[1, 1, 2], &[1, 1], &[(0, 0, 1), (1, 1, 1), (2, 0, 1), (2, 1, 1)]).unwrap();
        let base = m(&inst, &[e(&inst, 2, 0), e(&inst, 2, 1)]);
        let w = detect_witness(&inst, &base, WitnessKind::Type2, Mode::Popular).unwrap();
        let text = serialize_witness(&inst, &base, &w);
        assert!(text.starts_with("kind=2\npath:\n"));
        assert_eq!(parse_witness(&inst, &base, &text).unwrap(), w);
        assert!(parse_witness(&inst, &base, "kind=9\n").is_err());
    }

    #[test]
    fn rejects_broken_witnesses() {
        let inst = Instance::from_parts(&[1], &[1, 1], &[(0, 0, 1), (0, 1, 2)]).unwrap();
        let base = m(&inst, &[e(&inst, 0, 1)]);
        let bad = Witness {
            kind: WitnessKind::Type3,
            path: vec![e(&inst, 0, 0)],
            aux_edge: None,
            second_path: None,
            second_aux: None,
        };
        assert!(matches!(apply_witness(&inst, &base, &bad), Err(Error::InvalidWitness(_))));
        let in_matching = Witness { path: vec![e(&inst, 0, 1)], ..bad };
        assert!(check_witness(&inst, &base, &in_matching).is_err());
    }
}
