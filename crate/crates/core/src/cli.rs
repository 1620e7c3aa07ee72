//! Command-line front end.
//!
//! Exit codes: 0 when the answer is yes or something was found, 1 when it
//! is no or nothing exists, 2 for usage and input errors, 3 when two
//! independent deciders disagree or a solver output fails certification.
//!
//! Deciding commands print one verdict line (`POPULAR`, `NOT_POPULAR`,
//! `WEAKLY_POPULAR`, `NOT_WEAKLY_POPULAR`, `FOUND`, `NONE`) followed by
//! their payload. `reduce`, `translate`, `eou` and `sample` print the
//! payload only so that stdout parses directly as the produced file.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::certifier::{serialize_witness, verify};
use crate::engine::{
    eou_labels, max_b_matching, parse_partition_spec, parse_zspec, partition_matching, z_partition_matching,
    EdgeSet, Graph,
};
use crate::error::{Error, Result};
use crate::instance::{BMatching, Instance, InstanceBuilder};
use crate::io::{parse_instance, parse_matching, serialize_instance, serialize_matching, tokenized_lines};
use crate::oracle::{brute_check, brute_check_par, brute_find, CnfFormula, OracleVerdict, X3CInstance, DEFAULT_BUDGET};
use crate::reductions::{build_3sat_gadget, build_x3c_gadget};
use crate::solvers::{algorithm_a, algorithm_a_prime, SolverReport};
use crate::Mode;

/// What a command produced. `main` prints the streams and exits with the
/// code; tests inspect them directly.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl CommandOutcome {
    fn new(exit_code: i32, stdout: String) -> Self {
        CommandOutcome { exit_code, stdout, stderr: String::new() }
    }

    fn error(e: &Error) -> Self {
        let code = if matches!(e, Error::Discrepancy(_)) { 3 } else { 2 };
        CommandOutcome { exit_code: code, stdout: String::new(), stderr: format!("error: {e}\n") }
    }
}

#[derive(Parser, Debug)]
#[command(name = "popmatch", version, about = "Popular and weakly popular b-matchings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Popular,
    Weak,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Popular => Mode::Popular,
            ModeArg::Weak => Mode::Weak,
        }
    }
}

#[derive(Args, Debug)]
struct OracleOpts {
    /// Largest enumeration bound the oracle may attempt.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    budget: u128,
    /// Worker threads for the oracle.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Decide (weak) popularity with alternating-path witnesses.
    Verify {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        /// Also run the exhaustive oracle and exit 3 if it disagrees.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Decide (weak) popularity by comparing against every b-matching.
    BruteCheck {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        matching: PathBuf,
        #[command(flatten)]
        oracle: OracleOpts,
    },
    /// Search every b-matching for a (weakly) popular one.
    BruteFind {
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: u128,
    },
    /// Weakly popular matching for two ranks without ties.
    SolveA {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Weakly popular matching for two ranks with ties at rank 2.
    SolveAprime {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Maximum matching meeting per-class quotas (unit agent capacities).
    PartitionMatch {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, conflicts_with = "zspec", required_unless_present = "zspec")]
        spec: Option<PathBuf>,
        /// Class file with `component` lines; component paths are relative
        /// to this file.
        #[arg(long)]
        zspec: Option<PathBuf>,
    },
    /// E/O/U labels of every vertex with respect to a maximum matching.
    Eou {
        #[arg(long)]
        instance: PathBuf,
        /// Maximum matching to label against; one is computed if absent.
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// Compile a hardness gadget.
    Reduce {
        #[arg(value_enum)]
        kind: ReduceKind,
        #[arg(long = "in")]
        input: PathBuf,
        /// Instance file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Sidecar map file; defaults to `<out>.map` when --out is given.
        #[arg(long)]
        map: Option<PathBuf>,
    },
    /// Translate solutions between a source problem and its gadget.
    Translate {
        #[command(subcommand)]
        what: TranslateKind,
    },
    /// Random instance for experiments.
    Sample {
        #[arg(long, default_value_t = 3)]
        agents: usize,
        #[arg(long, default_value_t = 3)]
        houses: usize,
        #[arg(long, default_value_t = 2)]
        max_rank: u32,
        #[arg(long, default_value_t = 2)]
        max_capacity: u32,
        /// Probability of each agent-house edge.
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ReduceKind {
    X3c,
    #[value(name = "3sat")]
    Sat,
}

#[derive(Subcommand, Debug)]
enum TranslateKind {
    /// Exact cover to gadget matching (--cover) or back (--matching).
    Cover {
        #[arg(long)]
        x3c: PathBuf,
        #[arg(long, conflicts_with = "matching", required_unless_present = "matching")]
        cover: Option<PathBuf>,
        #[arg(long)]
        matching: Option<PathBuf>,
    },
    /// Satisfying assignment to gadget matching (--assignment) or back
    /// (--matching).
    Assignment {
        #[arg(long)]
        cnf: PathBuf,
        #[arg(long, conflicts_with = "matching", required_unless_present = "matching")]
        assignment: Option<PathBuf>,
        #[arg(long)]
        matching: Option<PathBuf>,
    },
}

/// Parses `argv` (program name first) and runs the command.
pub fn run(argv: &[String]) -> CommandOutcome {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => CommandOutcome::new(0, e.to_string()),
                _ => {
                    let first = e.to_string().lines().next().unwrap_or("usage error").to_string();
                    CommandOutcome { exit_code: 2, stdout: String::new(), stderr: format!("{first}\n") }
                }
            };
        }
    };
    dispatch(cli.command).unwrap_or_else(|e| CommandOutcome::error(&e))
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Malformed(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::Malformed(format!("cannot write {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance> {
    parse_instance(&read(path)?)
}

fn load_matching(inst: &Instance, path: &Path) -> Result<BMatching> {
    parse_matching(inst, &read(path)?)
}

fn verdict_word(mode: Mode, holds: bool) -> &'static str {
    match (mode, holds) {
        (Mode::Popular, true) => "POPULAR",
        (Mode::Popular, false) => "NOT_POPULAR",
        (Mode::Weak, true) => "WEAKLY_POPULAR",
        (Mode::Weak, false) => "NOT_WEAKLY_POPULAR",
    }
}

fn oracle_check(inst: &Instance, m: &BMatching, mode: Mode, opts: &OracleOpts) -> Result<OracleVerdict> {
    if opts.jobs <= 1 {
        return brute_check(inst, m, mode, opts.budget);
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs)
        .build()
        .map_err(|e| Error::Malformed(format!("cannot start {} workers: {e}", opts.jobs)))?;
    pool.install(|| brute_check_par(inst, m, mode, opts.budget))
}

/// Matching lines turned into `#` comments, for dumps next to a verdict.
fn commented(text: &str) -> String {
    text.lines().map(|l| format!("# {l}\n")).collect()
}

fn to_edge_set(g: &Graph, m: &BMatching) -> EdgeSet {
    (0..g.num_edges()).map(|e| m.contains(g.origin(e).expect("graph built from the instance"))).collect()
}

fn from_edge_set(inst: &Instance, g: &Graph, m: &[bool]) -> Result<BMatching> {
    BMatching::from_edge_ids(inst, (0..m.len()).filter(|&e| m[e]).filter_map(|e| g.origin(e)))
}

fn full_graph(inst: &Instance) -> Graph {
    Graph::from_instance(
        inst,
        |_| true,
        (0..inst.num_agents()).map(|a| inst.agent_capacity(a)).collect(),
        (0..inst.num_houses()).map(|h| inst.house_capacity(h)).collect(),
    )
}

fn solver_outcome(inst: &Instance, report: SolverReport) -> CommandOutcome {
    let found = report.result.is_some();
    let word = if found { "FOUND" } else { "NONE" };
    CommandOutcome::new(if found { 0 } else { 1 }, format!("{word}\n{}", report.serialize(inst)))
}

fn dispatch(command: Command) -> Result<CommandOutcome> {
    match command {
        Command::Verify { mode, instance, matching, cross_check, oracle } => {
            let mode = Mode::from(mode);
            let inst = load_instance(&instance)?;
            let m = load_matching(&inst, &matching)?;
            let cert = verify(&inst, &m, mode);
            let mut out = format!("{}\n", verdict_word(mode, cert.holds));
            if let Some(w) = &cert.witness {
                out.push_str(&serialize_witness(&inst, &m, w));
            }
            let mut outcome = CommandOutcome::new(if cert.holds { 0 } else { 1 }, out);
            if cross_check {
                match oracle_check(&inst, &m, mode, &oracle) {
                    Ok(v) if v.holds != cert.holds => {
                        outcome.exit_code = 3;
                        outcome.stdout.push_str(&format!("# oracle: {}\n", verdict_word(mode, v.holds)));
                        if let Some(c) = &v.counterexample {
                            outcome.stdout.push_str("# oracle counterexample:\n");
                            outcome.stdout.push_str(&commented(&serialize_matching(&inst, c)));
                        }
                        outcome.stderr = "discrepancy: certifier and oracle disagree\n".into();
                    }
                    Ok(_) => {}
                    Err(Error::BudgetExceeded { bound, budget }) => {
                        outcome.stderr = format!("note: cross-check skipped, enumeration bound {bound} > budget {budget}\n");
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(outcome)
        }
        Command::BruteCheck { mode, instance, matching, oracle } => {
            let mode = Mode::from(mode);
            let inst = load_instance(&instance)?;
            let m = load_matching(&inst, &matching)?;
            let v = oracle_check(&inst, &m, mode, &oracle)?;
            let mut out = format!("{}\n", verdict_word(mode, v.holds));
            if let Some(c) = &v.counterexample {
                out.push_str(&serialize_matching(&inst, c));
            }
            Ok(CommandOutcome::new(if v.holds { 0 } else { 1 }, out))
        }
        Command::BruteFind { mode, instance, budget } => {
            let inst = load_instance(&instance)?;
            Ok(match brute_find(&inst, mode.into(), budget)? {
                Some(m) => CommandOutcome::new(0, format!("FOUND\n{}", serialize_matching(&inst, &m))),
                None => CommandOutcome::new(1, "NONE\n".into()),
            })
        }
        Command::SolveA { instance } => {
            let inst = load_instance(&instance)?;
            let report = algorithm_a(&inst)?;
            Ok(solver_outcome(&inst, report))
        }
        Command::SolveAprime { instance } => {
            let inst = load_instance(&instance)?;
            let report = algorithm_a_prime(&inst)?;
            Ok(solver_outcome(&inst, report))
        }
        Command::PartitionMatch { instance, spec, zspec } => {
            let inst = load_instance(&instance)?;
            let g = full_graph(&inst);
            let result = match (spec, zspec) {
                (Some(path), _) => partition_matching(&g, &parse_partition_spec(&inst, &read(&path)?)?)?,
                (None, Some(path)) => {
                    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
                    let zs = parse_zspec(&inst, &read(&path)?, |file| read(&dir.join(file)))?;
                    z_partition_matching(&g, &zs)?
                }
                (None, None) => unreachable!("clap requires one of --spec and --zspec"),
            };
            Ok(match result {
                Some(m) => {
                    let m = from_edge_set(&inst, &g, &m)?;
                    CommandOutcome::new(0, format!("FOUND\n{}", serialize_matching(&inst, &m)))
                }
                None => CommandOutcome::new(1, "NONE\n".into()),
            })
        }
        Command::Eou { instance, matching } => {
            let inst = load_instance(&instance)?;
            let g = full_graph(&inst);
            let m = match matching {
                Some(path) => to_edge_set(&g, &load_matching(&inst, &path)?),
                None => max_b_matching(&g),
            };
            let labels = eou_labels(&g, &m)?;
            let mut out = String::new();
            for (a, l) in labels.agents.iter().enumerate() {
                writeln!(out, "agent {} {l:?}", inst.agent_name(a)).unwrap();
            }
            for (h, l) in labels.houses.iter().enumerate() {
                writeln!(out, "house {} {l:?}", inst.house_name(h)).unwrap();
            }
            Ok(CommandOutcome::new(0, out))
        }
        Command::Reduce { kind, input, out, map } => {
            let text = read(&input)?;
            let (inst, map_text) = match kind {
                ReduceKind::X3c => {
                    let g = build_x3c_gadget(&X3CInstance::parse(&text)?)?;
                    (g.instance.clone(), g.map_lines())
                }
                ReduceKind::Sat => {
                    let g = build_3sat_gadget(&CnfFormula::parse_dimacs(&text)?)?;
                    (g.instance.clone(), g.map_lines())
                }
            };
            let body = serialize_instance(&inst);
            match out {
                Some(path) => {
                    write(&path, &body)?;
                    let map_path = map.unwrap_or_else(|| {
                        let mut p = path.clone().into_os_string();
                        p.push(".map");
                        PathBuf::from(p)
                    });
                    write(&map_path, &map_text)?;
                    Ok(CommandOutcome::new(0, String::new()))
                }
                None => {
                    if let Some(path) = map {
                        write(&path, &map_text)?;
                    }
                    Ok(CommandOutcome::new(0, format!("{body}{map_text}")))
                }
            }
        }
        Command::Translate { what } => translate(what),
        Command::Sample { agents, houses, max_rank, max_capacity, density, seed } => {
            if max_rank == 0 || max_capacity == 0 || !(0.0..=1.0).contains(&density) {
                return Err(Error::Precondition(
                    "--max-rank and --max-capacity must be positive and --density in [0, 1]".into(),
                ));
            }
            let inst = sample_instance(agents, houses, max_rank, max_capacity, density, seed)?;
            Ok(CommandOutcome::new(0, serialize_instance(&inst)))
        }
    }
}

fn translate(what: TranslateKind) -> Result<CommandOutcome> {
    match what {
        TranslateKind::Cover { x3c, cover, matching } => {
            let x = X3CInstance::parse(&read(&x3c)?)?;
            let g = build_x3c_gadget(&x)?;
            if let Some(path) = cover {
                let mut chosen = Vec::new();
                for (_, toks) in tokenized_lines(&read(&path)?) {
                    for name in toks {
                        let i = x
                            .triples
                            .iter()
                            .position(|(n, _)| n == name)
                            .ok_or_else(|| Error::Malformed(format!("unknown set {name}")))?;
                        chosen.push(i);
                    }
                }
                let m = g.cover_to_matching(&chosen)?;
                return Ok(CommandOutcome::new(0, serialize_matching(&g.instance, &m)));
            }
            let path = matching.expect("clap requires one of --cover and --matching");
            let m = load_matching(&g.instance, &path)?;
            let cover = g.matching_to_cover(&m)?;
            let out: String = cover.iter().map(|&i| format!("{}\n", x.triples[i].0)).collect();
            Ok(CommandOutcome::new(0, out))
        }
        TranslateKind::Assignment { cnf, assignment, matching } => {
            let f = CnfFormula::parse_dimacs(&read(&cnf)?)?;
            let g = build_3sat_gadget(&f)?;
            if let Some(path) = assignment {
                let assign = parse_assignment(&f, &read(&path)?)?;
                let m = g.assignment_to_matching(&assign)?;
                return Ok(CommandOutcome::new(0, serialize_matching(&g.instance, &m)));
            }
            let path = matching.expect("clap requires one of --assignment and --matching");
            let m = load_matching(&g.instance, &path)?;
            let assign = g.matching_to_assignment(&m)?;
            let lits: Vec<String> =
                assign.iter().enumerate().map(|(v, &b)| if b { format!("{}", v + 1) } else { format!("-{}", v + 1) }).collect();
            Ok(CommandOutcome::new(0, format!("{} 0\n", lits.join(" "))))
        }
    }
}

/// Signed literals, one per variable, optionally ending in `0`.
fn parse_assignment(f: &CnfFormula, text: &str) -> Result<Vec<bool>> {
    let mut assign: Vec<Option<bool>> = vec![None; f.variable_count];
    for (line, toks) in tokenized_lines(text) {
        for tok in toks {
            let lit: i64 = tok.parse().map_err(|_| Error::Syntax { line, message: format!("bad literal {tok}") })?;
            if lit == 0 {
                continue;
            }
            let v = lit.unsigned_abs() as usize;
            if v > f.variable_count {
                return Err(Error::Malformed(format!("variable {v} out of range")));
            }
            if assign[v - 1].replace(lit > 0).is_some() {
                return Err(Error::Malformed(format!("variable {v} assigned twice")));
            }
        }
    }
    assign
        .iter()
        .enumerate()
        .map(|(v, b)| b.ok_or_else(|| Error::Malformed(format!("variable {} unassigned", v + 1))))
        .collect()
}

fn sample_instance(
    agents: usize,
    houses: usize,
    max_rank: u32,
    max_capacity: u32,
    density: f64,
    seed: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = InstanceBuilder::new();
    for a in 1..=agents {
        b.agent(&format!("a{a}"), rng.gen_range(1..=max_capacity) as i64)?;
    }
    for h in 1..=houses {
        b.house(&format!("h{h}"), rng.gen_range(1..=max_capacity) as i64)?;
    }
    for a in 0..agents {
        for h in 0..houses {
            if rng.gen_bool(density) {
                b.edge_by_index(a, h, rng.gen_range(1..=max_rank) as i64)?;
            }
        }
    }
    b.build()
}
