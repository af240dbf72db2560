pub mod exec;
pub mod harness;
pub mod rng;
pub mod schedule;
pub mod sim;
pub mod workload;
