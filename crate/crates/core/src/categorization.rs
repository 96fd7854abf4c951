//! Categorization and coherence metrics.
//!
//! `categorization` scores a concept by the cosine between its own vector and
//! the mean vector of its typed entities. `coherence` scores a concept by how
//! many of its `n` nearest pooled entities carry it as their background
//! concept. Pools are seeded, mixed batches sampled per concept.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::{cosine, norm, EmbeddingTable};
use crate::error::{Error, Result};
use crate::kg::{KnowledgeSlice, TypingMode};

/// Mean vector over the entities that have an embedding, with used/skipped
/// bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedVector {
    pub vector: Vec<f64>,
    pub n_used: usize,
    pub n_skipped_oov: usize,
}

/// Component-wise mean of the embeddings of `entities`. Out-of-vocabulary
/// entities are skipped and counted, never silently dropped.
pub fn averaged_entity_vector<S: AsRef<str>>(
    table: &EmbeddingTable,
    entities: &[S],
) -> Result<AveragedVector> {
    let mut acc = vec![0.0f64; table.dimension()];
    let mut used = 0usize;
    for e in entities {
        if let Some(v) = table.get(e.as_ref()) {
            for (a, x) in acc.iter_mut().zip(v) {
                *a += x;
            }
            used += 1;
        }
    }
    if used == 0 {
        return Err(Error::NoResolvableEntities("<entity list>".to_string()));
    }
    for a in &mut acc {
        *a /= used as f64;
    }
    Ok(AveragedVector { vector: acc, n_used: used, n_skipped_oov: entities.len() - used })
}

/// Outcome of the categorization metric for one concept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategorizationResult {
    pub concept: String,
    pub score: f64,
    pub n_entities_used: usize,
    pub n_entities_skipped_oov: usize,
}

/// Cosine between a concept's vector and the mean vector of its entities.
pub fn categorization(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    concept: &str,
    mode: TypingMode,
) -> Result<CategorizationResult> {
    let concept_vec = table.vector(concept)?;
    if norm(concept_vec) == 0.0 {
        return Err(Error::ZeroNorm(concept.to_string()));
    }
    let entities = slice.entities_of(concept, mode)?;
    let avg = averaged_entity_vector(table, &entities)
        .map_err(|_| Error::NoResolvableEntities(concept.to_string()))?;
    if norm(&avg.vector) == 0.0 {
        return Err(Error::ZeroNorm(format!("averaged entities of {concept}")));
    }
    let score = cosine(&avg.vector, concept_vec)?;
    Ok(CategorizationResult {
        concept: concept.to_string(),
        score,
        n_entities_used: avg.n_used,
        n_entities_skipped_oov: avg.n_skipped_oov,
    })
}

/// Categorization for several concepts in parallel; output order follows input
/// order and per-concept failures do not abort the batch.
pub fn categorization_batch(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    concepts: &[String],
    mode: TypingMode,
) -> Vec<(String, Result<CategorizationResult>)> {
    concepts
        .par_iter()
        .map(|c| (c.clone(), categorization(table, slice, c, mode)))
        .collect()
}

/// One pooled entity with its assigned background concept.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolMember {
    pub entity: String,
    pub concept: String,
}

/// A mixed, seeded sample of labeled entities: per target concept, a uniform
/// sample without replacement of its embeddable entities, all batches
/// concatenated.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntityPool {
    pub members: Vec<PoolMember>,
    pub batch_size: usize,
    pub seed: u64,
    pub typing_mode: TypingMode,
}

impl EntityPool {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Write as TSV (`entity TAB concept`) with header comments carrying the
    /// seed, batch size, and typing mode.
    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        writeln!(w, "# seed: {}", self.seed).map_err(io_err)?;
        writeln!(w, "# batch_size: {}", self.batch_size).map_err(io_err)?;
        writeln!(w, "# typing: {}", self.typing_mode).map_err(io_err)?;
        for m in &self.members {
            writeln!(w, "{}\t{}", m.entity, m.concept).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }

    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut seed: Option<u64> = None;
        let mut batch_size: Option<usize> = None;
        let mut typing_mode = TypingMode::Direct;
        let mut members = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("seed:") {
                    seed = v.trim().parse().ok();
                } else if let Some(v) = rest.strip_prefix("batch_size:") {
                    batch_size = v.trim().parse().ok();
                } else if let Some(v) = rest.strip_prefix("typing:") {
                    typing_mode = v.trim().parse()?;
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [entity, concept] if !entity.is_empty() && !concept.is_empty() => {
                    if members.iter().any(|m: &PoolMember| m.entity == *entity) {
                        return Err(Error::Duplicate {
                            path: path.to_path_buf(),
                            line: idx + 1,
                            id: entity.to_string(),
                        });
                    }
                    members.push(PoolMember {
                        entity: entity.to_string(),
                        concept: concept.to_string(),
                    });
                }
                _ => return Err(Error::parse(path, idx + 1, "expected `entity TAB concept`")),
            }
        }
        let seed = seed.ok_or_else(|| Error::format(path, "missing `# seed:` header"))?;
        let batch_size =
            batch_size.ok_or_else(|| Error::format(path, "missing `# batch_size:` header"))?;
        Ok(EntityPool { members, batch_size, seed, typing_mode })
    }
}

/// Build a mixed pool: for each concept in input order, sample
/// `min(batch_size, available)` of its embeddable entities without
/// replacement. An entity typed by several target concepts joins the first
/// batch that samples it and is excluded from later batches.
pub fn build_pool(
    slice: &KnowledgeSlice,
    table: &EmbeddingTable,
    concepts: &[String],
    batch_size: usize,
    seed: u64,
    mode: TypingMode,
) -> Result<EntityPool> {
    if batch_size == 0 {
        return Err(Error::InvalidInput("batch_size must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<PoolMember> = Vec::new();
    let mut taken: std::collections::HashSet<String> = std::collections::HashSet::new();
    for concept in concepts {
        let entities = slice.entities_of(concept, mode)?;
        let embeddable: Vec<&String> = entities.iter().filter(|e| table.contains(e)).collect();
        if embeddable.is_empty() {
            return Err(Error::NoResolvableEntities(concept.clone()));
        }
        let mut candidates: Vec<&String> =
            embeddable.into_iter().filter(|e| !taken.contains(e.as_str())).collect();
        if candidates.is_empty() {
            return Err(Error::InvalidInput(format!(
                "all embeddable entities of `{concept}` were already sampled by earlier batches"
            )));
        }
        let k = batch_size.min(candidates.len());
        // partial Fisher-Yates: the first k slots end up a uniform sample
        for i in 0..k {
            let j = rng.random_range(i..candidates.len());
            candidates.swap(i, j);
        }
        for e in &candidates[..k] {
            taken.insert((*e).clone());
            members.push(PoolMember { entity: (*e).clone(), concept: concept.clone() });
        }
    }
    Ok(EntityPool { members, batch_size, seed, typing_mode: mode })
}

#[derive(PartialEq)]
struct Ranked {
    score: f64,
    entity: String,
}

impl Eq for Ranked {}

// Greater = worse rank (lower score, then larger identifier), so a max-heap
// keeps the k best with the disposable candidate on top.
impl Ord for Ranked {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.score
            .total_cmp(&other.score)
            .reverse()
            .then_with(|| self.entity.cmp(&other.entity))
    }
}

impl PartialOrd for Ranked {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// The `k` pool entities closest to the concept by cosine, descending; ties
/// broken by ascending entity identifier. Asking for more than the pool holds
/// returns the whole pool.
pub fn top_k_entities(
    table: &EmbeddingTable,
    pool: &EntityPool,
    concept: &str,
    k: usize,
) -> Result<Vec<String>> {
    if k == 0 {
        return Err(Error::Insufficient { what: "requested neighbors", needed: 1, got: 0 });
    }
    let concept_vec = table.vector(concept)?;
    if norm(concept_vec) == 0.0 {
        return Err(Error::ZeroNorm(concept.to_string()));
    }
    let mut heap: std::collections::BinaryHeap<Ranked> = std::collections::BinaryHeap::new();
    for member in &pool.members {
        let v = table.vector(&member.entity)?;
        let score = cosine(v, concept_vec).map_err(|e| e.named(&member.entity))?;
        let candidate = Ranked { score, entity: member.entity.clone() };
        if heap.len() < k {
            heap.push(candidate);
        } else if candidate < *heap.peek().expect("heap non-empty") {
            heap.pop();
            heap.push(candidate);
        }
    }
    Ok(heap.into_sorted_vec().into_iter().map(|r| r.entity).collect())
}

/// How coherence decides that a pooled entity "belongs" to the concept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchMode {
    /// The pool-assigned background concept equals the query concept. This is
    /// the default and matches how pools are constructed.
    StrictLabel,
    /// The entity's direct typing set contains the query concept.
    AnyType,
}

impl std::str::FromStr for MatchMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" | "strict_label" => Ok(MatchMode::StrictLabel),
            "any" | "any_type" => Ok(MatchMode::AnyType),
            other => Err(Error::InvalidInput(format!(
                "unknown match mode `{other}` (expected strict or any)"
            ))),
        }
    }
}

/// Fraction of the `n` pool entities nearest to the concept that belong to it.
/// When `n` exceeds the pool, the whole pool is used and the denominator
/// shrinks accordingly.
pub fn coherence(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    pool: &EntityPool,
    concept: &str,
    n: usize,
    match_mode: MatchMode,
) -> Result<f64> {
    if pool.is_empty() {
        return Err(Error::EmptyInput("entity pool".into()));
    }
    let effective = n.min(pool.len());
    let top = top_k_entities(table, pool, concept, effective)?;
    let label_of: std::collections::HashMap<&str, &str> = pool
        .members
        .iter()
        .map(|m| (m.entity.as_str(), m.concept.as_str()))
        .collect();
    let matches = top
        .iter()
        .filter(|entity| match match_mode {
            MatchMode::StrictLabel => label_of.get(entity.as_str()) == Some(&concept),
            MatchMode::AnyType => slice
                .types_of(entity)
                .is_some_and(|types| types.contains(concept)),
        })
        .count();
    Ok(matches as f64 / effective as f64)
}

/// Coherence for several concepts in parallel, input order preserved.
pub fn coherence_batch(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    pool: &EntityPool,
    concepts: &[String],
    n: usize,
    match_mode: MatchMode,
) -> Vec<(String, Result<f64>)> {
    concepts
        .par_iter()
        .map(|c| (c.clone(), coherence(table, slice, pool, c, n, match_mode)))
        .collect()
}
