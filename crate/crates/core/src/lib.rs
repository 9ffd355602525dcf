//! Three-way merging of MJ programs and information-flow based estimation of
//! interference between the two merged contributions.

pub mod lang;
pub mod graph;
pub mod ifc;
pub mod merge;
pub mod harness;
