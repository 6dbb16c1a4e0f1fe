//! Fixtures, reports, oracle batches and command implementations for
//! the splitfold command line.

pub mod commands;
pub mod fixture;
pub mod oracle;
pub mod report;

use splitfold::Envelope;

/// The working envelope, overridable through `SPLITFOLD_MAX_EDGES`.
pub fn envelope_from_env() -> Envelope {
    let mut env = Envelope::default();
    if let Ok(raw) = std::env::var("SPLITFOLD_MAX_EDGES") {
        if let Ok(v) = raw.trim().parse::<usize>() {
            env.max_edges = v;
        }
    }
    env
}
