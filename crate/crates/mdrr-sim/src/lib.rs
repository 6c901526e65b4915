//! Scenario files, report writers, parameter sweeps and the command line for
//! the `mdrr-core` uplink scheduling simulator.
//!
//! The core crate simulates; this crate feeds it and reads it back out:
//! [`scenario`] parses and writes the TOML scenario format (four ready-made
//! scenarios ship inside the binary), [`report`] renders a finished run into
//! CSV and text files, [`sweep`] repeats one scenario across the values of a
//! single key, and [`cli`] wires all of it into the `mdrr-sim` executable.

pub mod cli;
pub mod report;
pub mod scenario;
pub mod sweep;
