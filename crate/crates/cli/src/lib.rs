//! Command-line front end for the diadem analyses: dataset ingestion,
//! preprocessing chains, analysis dispatch, structured text reports with CSV
//! sidecars, and SVG factor maps.

pub mod config;
pub mod dataset;
pub mod error;
pub mod preprocess;
pub mod report;
pub mod runner;
pub mod svg;
