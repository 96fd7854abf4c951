//! Relational metrics: transition distance over domain/range declarations and
//! selectional-preference inventory generation.
//!
//! The transition distance of a property is the cosine between
//! `V_domain + V_property` and `V_range`. Properties declared with several
//! domains or ranges are evaluated over the Cartesian product, one result per
//! pair. Shared domain/range concepts are known to inflate the score, so each
//! result carries a `domain_equals_range` flag.

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
use crate::kg::KnowledgeSlice;

/// Transition distance of one (domain, range) pair of a property.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransitionResult {
    pub property: String,
    pub domain: String,
    pub range: String,
    pub score: f64,
    pub domain_equals_range: bool,
}

/// Cosine between `V_domain + V_property` and `V_range` for every declared
/// (domain, range) pair of the property.
///
/// A zero-norm property vector is fine as long as the sum is nonzero; only a
/// zero-norm sum or range vector is rejected.
pub fn transition_distance(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    property: &str,
) -> Result<Vec<TransitionResult>> {
    let schema = slice
        .schema_of(property)
        .ok_or_else(|| Error::MissingSchema(property.to_string()))?;
    if schema.domains.is_empty() || schema.ranges.is_empty() {
        return Err(Error::MissingSchema(property.to_string()));
    }
    let v_prop = table.vector(property)?;
    let mut out = Vec::with_capacity(schema.domains.len() * schema.ranges.len());
    for domain in &schema.domains {
        let v_dom = table.vector(domain)?;
        if v_dom.len() != v_prop.len() {
            return Err(Error::LengthMismatch { left: v_dom.len(), right: v_prop.len() });
        }
        let sum: Vec<f64> = v_dom.iter().zip(v_prop).map(|(d, p)| d + p).collect();
        for range in &schema.ranges {
            let v_range = table.vector(range)?;
            if norm(&sum) == 0.0 {
                return Err(Error::ZeroNorm(format!("{domain} + {property}")));
            }
            if norm(v_range) == 0.0 {
                return Err(Error::ZeroNorm(range.clone()));
            }
            let score = cosine(&sum, v_range)?;
            out.push(TransitionResult {
                property: property.to_string(),
                domain: domain.clone(),
                range: range.clone(),
                score,
                domain_equals_range: domain == range,
            });
        }
    }
    Ok(out)
}

/// Batch transition distances; per-property failures are collected, not fatal.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TransitionBatch {
    pub rows: Vec<TransitionResult>,
    /// `(property, reason)` for properties that could not be evaluated.
    pub errors: Vec<(String, String)>,
}

pub fn transition_table(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    properties: &[String],
) -> TransitionBatch {
    let outcomes: Vec<(String, Result<Vec<TransitionResult>>)> = properties
        .par_iter()
        .map(|p| (p.clone(), transition_distance(table, slice, p)))
        .collect();
    let mut batch = TransitionBatch::default();
    for (property, outcome) in outcomes {
        match outcome {
            Ok(rows) => batch.rows.extend(rows),
            Err(e) => batch.errors.push((property, e.to_string())),
        }
    }
    batch
}

/// Judged compatibility of a concept with a property slot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compatibility {
    Compatible,
    Incompatible,
}

impl std::fmt::Display for Compatibility {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Compatibility::Compatible => write!(f, "compatible"),
            Compatibility::Incompatible => write!(f, "incompatible"),
        }
    }
}

/// One row of a selectional-preference inventory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreferenceRow {
    pub concept: String,
    pub property: String,
    pub label: Compatibility,
}

/// Build a selectional-preference inventory: per property, its declared
/// domain and range concepts labeled `compatible`, plus `negatives_per_property`
/// seeded samples from outside the domain/range concepts and their ancestors
/// and descendants, labeled `incompatible`.
pub fn selectional_preference_inventory(
    slice: &KnowledgeSlice,
    properties: &[String],
    negatives_per_property: usize,
    seed: u64,
) -> Result<Vec<PreferenceRow>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all_concepts: Vec<&str> = {
        let mut v: Vec<&str> = slice.concepts().collect();
        v.sort_unstable();
        v
    };
    let mut rows = Vec::new();
    for property in properties {
        let schema = slice
            .schema_of(property)
            .ok_or_else(|| Error::MissingSchema(property.clone()))?;
        if schema.domains.is_empty() || schema.ranges.is_empty() {
            return Err(Error::MissingSchema(property.clone()));
        }

        let mut compatible: Vec<&String> = Vec::new();
        for c in schema.domains.iter().chain(&schema.ranges) {
            if !compatible.contains(&c) {
                compatible.push(c);
            }
        }
        let mut excluded: std::collections::HashSet<String> = std::collections::HashSet::new();
        for c in &compatible {
            excluded.extend(slice.ancestors(c)?);
            excluded.extend(slice.descendants(c)?);
        }
        for c in &compatible {
            rows.push(PreferenceRow {
                concept: (*c).clone(),
                property: property.clone(),
                label: Compatibility::Compatible,
            });
        }

        let mut candidates: Vec<&str> = all_concepts
            .iter()
            .copied()
            .filter(|c| !excluded.contains(*c))
            .collect();
        if candidates.len() < negatives_per_property {
            return Err(Error::NotEnoughNegatives {
                property: property.clone(),
                needed: negatives_per_property,
                available: candidates.len(),
            });
        }
        for i in 0..negatives_per_property {
            let j = rng.random_range(i..candidates.len());
            candidates.swap(i, j);
        }
        for c in &candidates[..negatives_per_property] {
            rows.push(PreferenceRow {
                concept: (*c).to_string(),
                property: property.clone(),
                label: Compatibility::Incompatible,
            });
        }
    }
    Ok(rows)
}

/// Write the judge-facing inventory (`concept TAB property TAB` with the label
/// column left blank) and the hidden answer key alongside it.
pub fn write_preference_inventory(
    rows: &[PreferenceRow],
    inventory_path: impl AsRef<Path>,
    key_path: impl AsRef<Path>,
) -> Result<()> {
    let inventory_path = inventory_path.as_ref();
    let key_path = key_path.as_ref();
    let inv = fs::File::create(inventory_path).map_err(|e| Error::io(inventory_path, e))?;
    let mut inv = BufWriter::new(inv);
    let key = fs::File::create(key_path).map_err(|e| Error::io(key_path, e))?;
    let mut key = BufWriter::new(key);
    for row in rows {
        writeln!(inv, "{}\t{}\t", row.concept, row.property)
            .map_err(|e| Error::io(inventory_path, e))?;
        writeln!(key, "{}\t{}\t{}", row.concept, row.property, row.label)
            .map_err(|e| Error::io(key_path, e))?;
    }
    inv.flush().map_err(|e| Error::io(inventory_path, e))?;
    key.flush().map_err(|e| Error::io(key_path, e))
}

/// Fraction of responses matching the answer key (by concept and property).
pub fn score_against_key(responses: &[PreferenceRow], key: &[PreferenceRow]) -> Result<f64> {
    if key.is_empty() {
        return Err(Error::EmptyInput("answer key".into()));
    }
    let lookup: std::collections::HashMap<(&str, &str), Compatibility> = key
        .iter()
        .map(|r| ((r.concept.as_str(), r.property.as_str()), r.label))
        .collect();
    let mut correct = 0usize;
    for r in responses {
        if lookup.get(&(r.concept.as_str(), r.property.as_str())) == Some(&r.label) {
            correct += 1;
        }
    }
    Ok(correct as f64 / key.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::KnowledgeSliceBuilder;

    fn schema_slice() -> KnowledgeSlice {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("capital", "PopulatedPlace", "City");
        b.add_subclass("City", "PopulatedPlace");
        b.add_subclass("PopulatedPlace", "Place");
        b.add_subclass("Person", "Agent");
        b.add_subclass("Organisation", "Agent");
        b.add_schema("spouse", "Person", "Person");
        b.finalize().unwrap()
    }

    fn simple_table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("PopulatedPlace", vec![1.0, 0.0]).unwrap();
        t.insert("capital", vec![-1.0, 1.0]).unwrap();
        t.insert("City", vec![0.0, 1.0]).unwrap();
        t.insert("Person", vec![0.5, 0.5]).unwrap();
        t.insert("spouse", vec![0.5, 0.5]).unwrap();
        t
    }

    #[test]
    fn exact_translation_scores_one() {
        let s = schema_slice();
        let t = simple_table();
        let rows = transition_distance(&t, &s, "capital").unwrap();
        assert_eq!(rows.len(), 1);
        assert!((rows[0].score - 1.0).abs() < 1e-12);
        assert!(!rows[0].domain_equals_range);
    }

    #[test]
    fn zero_property_vector_ok_when_sum_nonzero() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("p", "D", "R");
        let s = b.finalize().unwrap();
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("D", vec![1.0, 0.0]).unwrap();
        t.insert("p", vec![0.0, 0.0]).unwrap();
        t.insert("R", vec![1.0, 0.0]).unwrap();
        let rows = transition_distance(&t, &s, "p").unwrap();
        assert!((rows[0].score - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_sum_vector_rejected() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("p", "D", "R");
        let s = b.finalize().unwrap();
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("D", vec![1.0, 0.0]).unwrap();
        t.insert("p", vec![-1.0, 0.0]).unwrap();
        t.insert("R", vec![1.0, 0.0]).unwrap();
        assert!(matches!(transition_distance(&t, &s, "p"), Err(Error::ZeroNorm(_))));
    }

    #[test]
    fn missing_schema_and_oov_errors() {
        let s = schema_slice();
        let t = simple_table();
        assert!(matches!(
            transition_distance(&t, &s, "unknown"),
            Err(Error::MissingSchema(_))
        ));
        // spouse resolves Person but the table lacks nothing here; remove Person
        let mut t2 = EmbeddingTable::new(2).unwrap();
        t2.insert("spouse", vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            transition_distance(&t2, &s, "spouse"),
            Err(Error::UnknownIdentifier(_))
        ));
    }

    #[test]
    fn domain_equals_range_flag() {
        let s = schema_slice();
        let t = simple_table();
        let rows = transition_distance(&t, &s, "spouse").unwrap();
        assert!(rows[0].domain_equals_range);
    }

    #[test]
    fn cartesian_product_over_multiple_declarations() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_domain("p", "D1");
        b.add_domain("p", "D2");
        b.add_range("p", "R1");
        b.add_range("p", "R2");
        let s = b.finalize().unwrap();
        let mut t = EmbeddingTable::new(2).unwrap();
        for (id, v) in [
            ("p", vec![0.1, 0.2]),
            ("D1", vec![1.0, 0.0]),
            ("D2", vec![0.0, 1.0]),
            ("R1", vec![1.0, 1.0]),
            ("R2", vec![-1.0, 1.0]),
        ] {
            t.insert(id, v).unwrap();
        }
        let rows = transition_distance(&t, &s, "p").unwrap();
        assert_eq!(rows.len(), 4);
        let pairs: Vec<(String, String)> =
            rows.iter().map(|r| (r.domain.clone(), r.range.clone())).collect();
        assert!(pairs.contains(&("D1".to_string(), "R2".to_string())));
    }

    #[test]
    fn batch_collects_errors_and_matches_single_calls() {
        let s = schema_slice();
        let t = simple_table();
        let props = vec!["capital".to_string(), "ghost".to_string(), "spouse".to_string()];
        let batch = transition_table(&t, &s, &props);
        assert_eq!(batch.errors.len(), 1);
        assert_eq!(batch.errors[0].0, "ghost");
        let direct = transition_distance(&t, &s, "capital").unwrap();
        assert_eq!(batch.rows[0], direct[0]);

        let empty = transition_table(&t, &s, &[]);
        assert!(empty.rows.is_empty() && empty.errors.is_empty());
    }

    #[test]
    fn inventory_compatible_rows_and_exclusion() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("capital", "PopulatedPlace", "City");
        b.add_subclass("City", "PopulatedPlace");
        for i in 0..8 {
            b.add_subclass(&format!("Other{i}"), "Thing");
        }
        let s = b.finalize().unwrap();
        let rows = selectional_preference_inventory(
            &s,
            &["capital".to_string()],
            3,
            42,
        )
        .unwrap();
        let compatible: Vec<&PreferenceRow> =
            rows.iter().filter(|r| r.label == Compatibility::Compatible).collect();
        assert_eq!(compatible.len(), 2);
        assert_eq!(compatible[0].concept, "PopulatedPlace");
        assert_eq!(compatible[1].concept, "City");
        for r in rows.iter().filter(|r| r.label == Compatibility::Incompatible) {
            assert!(r.concept != "PopulatedPlace" && r.concept != "City");
        }
        // determinism
        let again =
            selectional_preference_inventory(&s, &["capital".to_string()], 3, 42).unwrap();
        assert_eq!(rows, again);
    }

    #[test]
    fn inventory_errors_when_negatives_exhausted() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("p", "D", "R");
        let s = b.finalize().unwrap();
        assert!(matches!(
            selectional_preference_inventory(&s, &["p".to_string()], 1, 0),
            Err(Error::NotEnoughNegatives { .. })
        ));
    }

    #[test]
    fn inventory_files_and_scoring() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_schema("p", "D", "R");
        for i in 0..5 {
            b.add_subclass(&format!("N{i}"), "Thing");
        }
        let s = b.finalize().unwrap();
        let rows = selectional_preference_inventory(&s, &["p".to_string()], 2, 7).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let inv = dir.path().join("inventory.tsv");
        let key = dir.path().join("key.tsv");
        write_preference_inventory(&rows, &inv, &key).unwrap();
        let inv_text = fs::read_to_string(&inv).unwrap();
        assert!(inv_text.lines().all(|l| l.ends_with('\t')));
        let key_text = fs::read_to_string(&key).unwrap();
        assert!(key_text.contains("compatible"));

        assert_eq!(score_against_key(&rows, &rows).unwrap(), 1.0);
        let mut flipped = rows.clone();
        for r in &mut flipped {
            r.label = match r.label {
                Compatibility::Compatible => Compatibility::Incompatible,
                Compatibility::Incompatible => Compatibility::Compatible,
            };
        }
        assert_eq!(score_against_key(&flipped, &rows).unwrap(), 0.0);
    }
}
