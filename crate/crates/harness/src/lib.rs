//! Config-driven experiments for `onet-core`: each experiment writes CSV tables (and
//! optionally SVG charts) and reports pass/fail checks against its predicted rate band.

pub mod config;
pub mod error;
pub mod experiments;
pub mod fit;
pub mod output;
pub mod suite;
