//! Maximum b-matchings, E/O/U labels and quota-constrained matchings.

mod graph;
mod partition;
mod zpartition;

pub use graph::{alternating_reach, eou_labels, max_b_matching, EdgeSet, EouLabeling, Graph, Label};
pub use partition::{
    find_improving_sequence, parse_partition_spec, partition_matching, ImprovingSequence, PartitionSpec,
    SequencePath,
};
pub use zpartition::{
    compute_d, find_z_improving_sequence, parse_zspec, saturating_max_matching, z_membership,
    z_partition_matching, Component, ZSpec,
};
