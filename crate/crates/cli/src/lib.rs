//! Experiment driver for `crowdsched`: file formats, benchmark and online runs, reports.

pub mod bench;
pub mod files;
pub mod online;
pub mod records;
pub mod report;
