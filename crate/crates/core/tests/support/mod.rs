//! Shared test helpers: a block vocabulary restated independently of the engine, a
//! compact workspace notation, a seeded workspace generator, oracles and the scenario
//! runner.
#![allow(dead_code)]

pub mod defs;
pub mod dsl;
pub mod fixtures;
pub mod gen;
pub mod oracle;
pub mod programs;
pub mod scenario;
