//! Generators, oracles and fixtures shared by the test suites.

pub mod fixtures;
pub mod gen;
pub mod oracle;
pub mod tasks;
