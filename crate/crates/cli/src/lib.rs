//! Command-line front end: dataset generation and ingestion, BSA, tangent
//! PCA and polygon embeddings, with JSON reports carrying CSV plot tables.

pub mod commands;
pub mod report;
