//! Editorial forensics for mega-journal corpora.
//!
//! The crate turns raw article metadata into editor power, activity and
//! citation-renumeration metrics, fits editor fixed-effects panel
//! regressions with cluster-robust inference, and generates synthetic
//! corpora with known ground truth for validation.

pub mod corpus;
pub mod econometrics;
pub mod editor_metrics;
pub mod impact;
pub mod linalg;
pub mod pipeline;
pub mod renumeration;
pub mod report;
pub mod social;
pub mod stats;
pub mod synth;
pub mod taxonomy;
