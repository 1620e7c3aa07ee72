//! Popular and weakly popular b-matchings in bipartite preference systems.
//!
//! Agents rank houses (lower rank is better), every vertex carries a
//! capacity, and a b-matching is compared against others either by
//! head-count ([`compare::more_popular`]) or by summed per-agent
//! positional gains ([`compare::more_weakly_popular`]).
//!
//! * [`certifier`] decides (weak) popularity through forbidden
//!   alternating-path witnesses and can apply a witness to obtain a
//!   better matching.
//! * [`oracle`] is the exhaustive definitional ground truth.
//! * [`engine`] holds the matching machinery: maximum b-matchings,
//!   partition matchings, E/O/U labels and the saturable-set procedures.
//! * [`solvers`] constructs weakly popular matchings on two-rank inputs.
//! * [`reductions`] compiles exact-cover and 3-CNF instances into
//!   hardness gadgets and translates solutions both ways.

pub mod certifier;
pub mod cli;
pub mod compare;
pub mod engine;
pub mod error;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod reductions;
pub mod solvers;

pub use compare::{
    agent_gain, compare_signatures, more_popular, more_weakly_popular, rank_tuple, signature,
    PopularityComparison, RankTuple, Signature, Verdict, WeakComparison,
};
pub use error::{Error, Result};
pub use instance::{
    validate_matching, AgentId, BMatching, Edge, EdgeId, HouseId, Instance, InstanceBuilder,
    Vertex,
};

/// Which comparison a popularity question refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Popular,
    Weak,
}
