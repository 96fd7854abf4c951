//! Intrinsic quality metrics for knowledge-graph concept embeddings.
//!
//! The crate evaluates pre-trained embedding tables against a knowledge-graph
//! slice along three axes:
//!
//! - **categorization** — how well a concept vector stands in for the mean of
//!   its instances, plus a pooled nearest-neighbor coherence score;
//! - **hierarchy** — agreement between embedding cosine and path-based
//!   ontology similarity (Wu-Palmer or inverse path length), with rank
//!   correlation scaffolding for judged relatedness;
//! - **relations** — how closely `domain + property` lands on `range` in the
//!   embedding space, plus selectional-preference inventory generation.
//!
//! Supporting modules load standard embedding formats (word2vec text/binary,
//! GloVe, TSV), ingest N-Triples/TSV knowledge-graph slices, export 2-D
//! projections (PCA and exact t-SNE), generate seeded synthetic fixtures with
//! planted answer keys, and emit JSON/CSV/markdown reports.

pub mod categorization;
pub mod embedding;
pub mod error;
pub mod fixtures;
pub mod hierarchy;
pub mod kg;
pub mod projection;
pub mod relational;
pub mod report;

pub use error::{Error, Result};
