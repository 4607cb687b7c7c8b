//! Pillowcase-tiled surfaces as permutation triples: canonical forms, braid
//! orbits, 1-cylinder certification, monodromy groups and small-degree
//! censuses.

pub mod braid;
pub mod census;
pub mod cli;
pub mod error;
pub mod family;
pub mod grouper;
pub mod perm;
pub mod triple;

#[cfg(test)]
mod testutil;

pub use braid::{
    certify_one_cylinder, BraidOrbit, BraidWord, CylinderCertificate, Letter, Mode, Verdict,
};
pub use census::{run_census, Census, CensusBudget, CensusRow, GroupHistogram};
pub use error::{Error, Result};
pub use family::{build_family, even_degree_impossible, verify_counterexample, FamilyInstance};
pub use grouper::{identify, GroupName, GroupReport, StabilizerChain};
pub use perm::{CycleType, Permutation};
pub use triple::{CanonicalKey, CoverTopology, PtsTriple};
