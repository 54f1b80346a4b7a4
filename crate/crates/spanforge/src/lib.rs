//! File formats, reports, parallel oracles and the command line tool
//! around `spanforge-core`.

pub mod cli;
pub mod io;
pub mod par;
pub mod report;
pub mod tables;
