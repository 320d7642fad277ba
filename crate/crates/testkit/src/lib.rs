//! Random generators and reference oracles for testing `rivalkit`.

pub mod fuzz;
pub mod gen;
pub mod oracle;
pub mod partition;
