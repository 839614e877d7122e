//! Batch front end for `tilespec-core`: instance files, condition reports,
//! parallel searches and self-tests.

pub mod app;
pub mod instance;
pub mod report;
pub mod selftest;
pub mod tasks;
