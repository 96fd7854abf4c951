//! Embedding tables: identifiers mapped to fixed-dimension real vectors.
//!
//! Vectors are stored as `f64` regardless of the file format they came from, so
//! metric computations accumulate at 64-bit precision throughout. The word2vec
//! binary format remains an `f32` container: values are widened on load and
//! narrowed on write.

mod io;

pub use io::{
    load_glove_text, load_tsv, load_word2vec_binary, load_word2vec_text, write_word2vec_binary,
    write_word2vec_text, LoadOptions, PrefixMap,
};

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a multi-token identifier is collapsed into a single vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositionMode {
    Average,
    Sum,
}

impl std::str::FromStr for CompositionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "avg" | "average" => Ok(CompositionMode::Average),
            "sum" => Ok(CompositionMode::Sum),
            other => Err(Error::InvalidInput(format!(
                "unknown composition mode `{other}` (expected avg or sum)"
            ))),
        }
    }
}

impl std::fmt::Display for CompositionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CompositionMode::Average => write!(f, "average"),
            CompositionMode::Sum => write!(f, "sum"),
        }
    }
}

/// Provenance of a loaded table, echoed into reports.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub composition: Option<CompositionMode>,
    #[serde(default)]
    pub lowercased: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prefix_map: Option<String>,
}

/// Immutable vocabulary of identifiers with one `dimension`-length vector each.
///
/// Insertion order is preserved, which keeps file round-trips and report output
/// deterministic. Shared references are safe to use from multiple threads.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dimension: usize,
    entries: IndexMap<String, Vec<f64>>,
    source_meta: SourceMeta,
}

impl EmbeddingTable {
    /// Create an empty table of the given dimension.
    pub fn new(dimension: usize) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidInput("dimension must be at least 1".into()));
        }
        Ok(EmbeddingTable {
            dimension,
            entries: IndexMap::new(),
            source_meta: SourceMeta::default(),
        })
    }

    /// Insert one entry, enforcing the table invariants: unique non-empty
    /// identifier, exact dimension, finite components.
    pub fn insert(&mut self, id: impl Into<String>, vector: Vec<f64>) -> Result<()> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::InvalidInput("empty identifier".into()));
        }
        if vector.len() != self.dimension {
            return Err(Error::LengthMismatch { left: vector.len(), right: self.dimension });
        }
        if let Some(bad) = vector.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("vector for `{id}` (value {bad})")));
        }
        if self.entries.contains_key(&id) {
            return Err(Error::InvalidInput(format!("duplicate identifier `{id}`")));
        }
        self.entries.insert(id, vector);
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, id: &str) -> bool {
        self.entries.contains_key(id)
    }

    pub fn get(&self, id: &str) -> Option<&[f64]> {
        self.entries.get(id).map(Vec::as_slice)
    }

    /// Like [`get`](Self::get) but failing with the identifier name.
    pub fn vector(&self, id: &str) -> Result<&[f64]> {
        self.get(id).ok_or_else(|| Error::UnknownIdentifier(id.to_string()))
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    /// Cosine similarity between two stored vectors, naming the offending
    /// identifier on lookup or zero-norm failure.
    pub fn cosine_between(&self, a: &str, b: &str) -> Result<f64> {
        let va = self.vector(a)?;
        let vb = self.vector(b)?;
        if norm(va) == 0.0 {
            return Err(Error::ZeroNorm(a.to_string()));
        }
        if norm(vb) == 0.0 {
            return Err(Error::ZeroNorm(b.to_string()));
        }
        cosine(va, vb)
    }

    pub fn source_meta(&self) -> &SourceMeta {
        &self.source_meta
    }

    pub fn set_source_meta(&mut self, meta: SourceMeta) {
        self.source_meta = meta;
    }
}

/// Euclidean norm, accumulated in f64.
pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cosine similarity `u·v / (|u||v|)`, clamped to `[-1, 1]` against rounding.
///
/// A zero-norm operand is reported as [`Error::ZeroNorm`] with no identifier;
/// callers that know the identifier attach it via [`Error::named`].
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    let nu = norm(u);
    let nv = norm(v);
    if nu == 0.0 || nv == 0.0 {
        return Err(Error::ZeroNorm(String::new()));
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    Ok((dot / (nu * nv)).clamp(-1.0, 1.0))
}

/// Element-wise sum or average of the vectors for `tokens`.
pub fn compose<S: AsRef<str>>(
    table: &EmbeddingTable,
    tokens: &[S],
    mode: CompositionMode,
) -> Result<Vec<f64>> {
    if tokens.is_empty() {
        return Err(Error::EmptyInput("token list".into()));
    }
    let mut acc = vec![0.0f64; table.dimension()];
    for token in tokens {
        let v = table.vector(token.as_ref())?;
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    if mode == CompositionMode::Average {
        let n = tokens.len() as f64;
        for a in &mut acc {
            *a /= n;
        }
    }
    Ok(acc)
}
