//! Oracles and random generators shared by the integration tests.
#![allow(dead_code)]

pub mod monodromy;
pub mod samplers;
pub mod specs;
