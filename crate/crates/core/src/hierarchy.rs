//! Hierarchy metrics: ontology similarity, absolute semantic error, and rank
//! correlation against judged relatedness.
//!
//! The ontology similarity `s'` is a required, report-recorded parameter with
//! two implementations: Wu-Palmer `2*depth(lca) / (depth(a) + depth(b))` with
//! roots at depth 1, and inverse path length `1 / (1 + distance)`. The
//! absolute semantic error is `|s'(a,b) - cosine(V_a, V_b)|`; cosine is not
//! rescaled, so the error ranges over `[0, 2]`.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::embedding::EmbeddingTable;
use crate::error::{Error, Result};
use crate::kg::KnowledgeSlice;

/// Path-based ontology similarity, mapping concept pairs into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimilarityMethod {
    WuPalmer,
    InversePath,
}

impl std::str::FromStr for SimilarityMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wu_palmer" | "wu-palmer" => Ok(SimilarityMethod::WuPalmer),
            "inverse_path" | "inverse-path" => Ok(SimilarityMethod::InversePath),
            other => Err(Error::InvalidInput(format!(
                "unknown similarity method `{other}` (expected wu_palmer or inverse_path)"
            ))),
        }
    }
}

impl std::fmt::Display for SimilarityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimilarityMethod::WuPalmer => write!(f, "wu_palmer"),
            SimilarityMethod::InversePath => write!(f, "inverse_path"),
        }
    }
}

/// Ontology similarity `s'` of two concepts.
pub fn semantic_similarity(
    slice: &KnowledgeSlice,
    a: &str,
    b: &str,
    method: SimilarityMethod,
) -> Result<f64> {
    match method {
        SimilarityMethod::WuPalmer => {
            let lca = slice.lowest_common_ancestor(a, b)?;
            let d_lca = slice.depth(&lca)? as f64;
            let da = slice.depth(a)? as f64;
            let db = slice.depth(b)? as f64;
            // On multi-parent DAGs the minimum-depth convention can place a
            // common ancestor deeper than min(depth(a), depth(b)); clamp so
            // the similarity stays in [0, 1].
            Ok((2.0 * d_lca / (da + db)).min(1.0))
        }
        SimilarityMethod::InversePath => {
            let d = slice.path_distance(a, b)? as f64;
            Ok(1.0 / (1.0 + d))
        }
    }
}

/// `|s'(a,b) - cosine(V_a, V_b)|`.
pub fn absolute_semantic_error(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    a: &str,
    b: &str,
    method: SimilarityMethod,
) -> Result<f64> {
    let s_prime = semantic_similarity(slice, a, b, method)?;
    let s_emb = table.cosine_between(a, b)?;
    Ok((s_prime - s_emb).abs())
}

/// A concept pair the matrix computation skipped, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedPair {
    pub a: String,
    pub b: String,
    pub reason: String,
}

/// Symmetric matrix of absolute semantic errors with a zero diagonal.
/// Per-pair failures are skipped and reported, never fatal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorMatrix {
    pub concepts: Vec<String>,
    /// `values[i][j]` is the error for `(concepts[i], concepts[j])`; `None`
    /// marks a skipped pair.
    pub values: Vec<Vec<Option<f64>>>,
    pub skipped: Vec<SkippedPair>,
    /// Mean over the computed unordered off-diagonal pairs.
    pub mean: f64,
    /// Maximum over the computed unordered off-diagonal pairs.
    pub max: f64,
}

/// Batch form of [`absolute_semantic_error`] over all concept pairs.
pub fn pairwise_error_matrix(
    table: &EmbeddingTable,
    slice: &KnowledgeSlice,
    concepts: &[String],
    method: SimilarityMethod,
) -> Result<ErrorMatrix> {
    if concepts.len() < 2 {
        return Err(Error::Insufficient { what: "concepts", needed: 2, got: concepts.len() });
    }
    let n = concepts.len();
    let upper: Vec<((usize, usize), Result<f64>)> = {
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        pairs
            .into_par_iter()
            .map(|(i, j)| {
                ((i, j), absolute_semantic_error(table, slice, &concepts[i], &concepts[j], method))
            })
            .collect()
    };

    let mut values = vec![vec![None; n]; n];
    for (i, row) in values.iter_mut().enumerate() {
        row[i] = Some(0.0);
    }
    let mut skipped = Vec::new();
    let mut sum = 0.0;
    let mut max = f64::NEG_INFINITY;
    let mut computed = 0usize;
    for ((i, j), outcome) in upper {
        match outcome {
            Ok(v) => {
                values[i][j] = Some(v);
                values[j][i] = Some(v);
                sum += v;
                max = max.max(v);
                computed += 1;
            }
            Err(e) => skipped.push(SkippedPair {
                a: concepts[i].clone(),
                b: concepts[j].clone(),
                reason: e.to_string(),
            }),
        }
    }
    if computed == 0 {
        return Err(Error::Insufficient { what: "computable concept pairs", needed: 1, got: 0 });
    }
    Ok(ErrorMatrix {
        concepts: concepts.to_vec(),
        values,
        skipped,
        mean: sum / computed as f64,
        max,
    })
}

fn validate_series(xs: &[f64], ys: &[f64]) -> Result<()> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch { left: xs.len(), right: ys.len() });
    }
    if xs.len() < 3 {
        return Err(Error::Insufficient { what: "observations", needed: 3, got: xs.len() });
    }
    if xs.iter().chain(ys).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("correlation input".into()));
    }
    Ok(())
}

/// Pearson correlation `cov / (sigma_x * sigma_y)`. The denominator is
/// computed as `sqrt(sxx * syy)` so that exact rank data stays exact.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    validate_series(xs, ys)?;
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = x - mean_x;
        let dy = y - mean_y;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ConstantInput);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional ranks (1-based); ties receive the average of their positions.
fn fractional_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the average rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman correlation: Pearson over fractional ranks with average ties.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64> {
    validate_series(xs, ys)?;
    pearson(&fractional_ranks(xs), &fractional_ranks(ys))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrelationKind {
    Spearman,
    Pearson,
}

impl std::str::FromStr for CorrelationKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spearman" => Ok(CorrelationKind::Spearman),
            "pearson" => Ok(CorrelationKind::Pearson),
            other => Err(Error::InvalidInput(format!(
                "unknown correlation `{other}` (expected spearman or pearson)"
            ))),
        }
    }
}

impl std::fmt::Display for CorrelationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CorrelationKind::Spearman => write!(f, "spearman"),
            CorrelationKind::Pearson => write!(f, "pearson"),
        }
    }
}

/// One judged concept pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeRow {
    pub concept_a: String,
    pub concept_b: String,
    pub score: f64,
}

/// Judged relatedness scores on a declared scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgeInventory {
    pub rows: Vec<JudgeRow>,
    /// Inclusive score scale `(lo, hi)`.
    pub scale: (f64, f64),
}

impl JudgeInventory {
    pub fn new(rows: Vec<JudgeRow>, scale: (f64, f64)) -> Result<Self> {
        if scale.0 >= scale.1 {
            return Err(Error::InvalidInput(format!(
                "judge scale lo {} must be below hi {}",
                scale.0, scale.1
            )));
        }
        for row in &rows {
            if row.score < scale.0 || row.score > scale.1 || !row.score.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "judge score {} for ({}, {}) is outside the scale [{}, {}]",
                    row.score, row.concept_a, row.concept_b, scale.0, scale.1
                )));
            }
        }
        Ok(JudgeInventory { rows, scale })
    }

    /// Load `concept_a TAB concept_b TAB score` rows; the first line must be a
    /// `# scale <lo> <hi>` header.
    pub fn load_tsv(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut scale: Option<(f64, f64)> = None;
        let mut rows = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(v) = rest.strip_prefix("scale") {
                    let parts: Vec<&str> = v.split_whitespace().collect();
                    if let [lo, hi] = parts.as_slice() {
                        match (lo.parse(), hi.parse()) {
                            (Ok(lo), Ok(hi)) => scale = Some((lo, hi)),
                            _ => {
                                return Err(Error::parse(path, idx + 1, "malformed scale header"))
                            }
                        }
                    } else {
                        return Err(Error::parse(path, idx + 1, "malformed scale header"));
                    }
                }
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [a, b, s] if !a.is_empty() && !b.is_empty() => {
                    let score: f64 = s.parse().map_err(|_| {
                        Error::parse(path, idx + 1, format!("invalid score `{s}`"))
                    })?;
                    rows.push(JudgeRow {
                        concept_a: a.to_string(),
                        concept_b: b.to_string(),
                        score,
                    });
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected `concept_a TAB concept_b TAB score`",
                    ))
                }
            }
        }
        let scale = scale.ok_or_else(|| Error::format(path, "missing `# scale lo hi` header"))?;
        JudgeInventory::new(rows, scale)
    }

    pub fn save_tsv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = BufWriter::new(file);
        let io_err = |e| Error::io(path, e);
        writeln!(w, "# scale {} {}", self.scale.0, self.scale.1).map_err(io_err)?;
        for row in &self.rows {
            writeln!(w, "{}\t{}\t{}", row.concept_a, row.concept_b, row.score).map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

/// Correlation between judge scores and embedding cosines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelatednessResult {
    pub correlation: f64,
    pub n_used: usize,
    /// Pairs dropped for missing embeddings or zero norms, with reasons.
    pub dropped: Vec<SkippedPair>,
}

/// Correlate judged relatedness with embedding cosine over the resolvable
/// pairs; needs at least 3.
pub fn relatedness_correlation(
    table: &EmbeddingTable,
    inventory: &JudgeInventory,
    kind: CorrelationKind,
) -> Result<RelatednessResult> {
    let mut judged = Vec::new();
    let mut cosines = Vec::new();
    let mut dropped = Vec::new();
    for row in &inventory.rows {
        match table.cosine_between(&row.concept_a, &row.concept_b) {
            Ok(c) => {
                judged.push(row.score);
                cosines.push(c);
            }
            Err(e) => dropped.push(SkippedPair {
                a: row.concept_a.clone(),
                b: row.concept_b.clone(),
                reason: e.to_string(),
            }),
        }
    }
    if judged.len() < 3 {
        return Err(Error::Insufficient {
            what: "resolvable judged pairs",
            needed: 3,
            got: judged.len(),
        });
    }
    let correlation = match kind {
        CorrelationKind::Spearman => spearman(&judged, &cosines)?,
        CorrelationKind::Pearson => pearson(&judged, &cosines)?,
    };
    Ok(RelatednessResult { correlation, n_used: judged.len(), dropped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::KnowledgeSliceBuilder;

    fn fork_slice() -> KnowledgeSlice {
        // root -> A -> {B, C}
        let mut b = KnowledgeSliceBuilder::default();
        b.add_subclass("A", "root");
        b.add_subclass("B", "A");
        b.add_subclass("C", "A");
        b.finalize().unwrap()
    }

    #[test]
    fn similarity_is_one_on_identical_concepts() {
        let s = fork_slice();
        for method in [SimilarityMethod::WuPalmer, SimilarityMethod::InversePath] {
            assert_eq!(semantic_similarity(&s, "B", "B", method).unwrap(), 1.0);
        }
    }

    #[test]
    fn similarity_fork_values() {
        let s = fork_slice();
        // depths: root 1, A 2, B = C = 3; lca(B, C) = A
        let wp = semantic_similarity(&s, "B", "C", SimilarityMethod::WuPalmer).unwrap();
        assert!((wp - 2.0 / 3.0).abs() < 1e-12);
        let ip = semantic_similarity(&s, "B", "C", SimilarityMethod::InversePath).unwrap();
        assert!((ip - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_symmetric_and_decreasing_along_chain() {
        let mut b = KnowledgeSliceBuilder::default();
        for i in 1..6 {
            b.add_subclass(&format!("n{i}"), &format!("n{}", i - 1));
        }
        let s = b.finalize().unwrap();
        for method in [SimilarityMethod::WuPalmer, SimilarityMethod::InversePath] {
            let mut last = f64::INFINITY;
            for i in 1..6 {
                let fwd = semantic_similarity(&s, "n0", &format!("n{i}"), method).unwrap();
                let rev = semantic_similarity(&s, &format!("n{i}"), "n0", method).unwrap();
                assert_eq!(fwd, rev);
                assert!(fwd <= last);
                last = fwd;
            }
        }
    }

    #[test]
    fn disconnected_pair_is_an_error() {
        let mut b = KnowledgeSliceBuilder::default();
        b.add_subclass("A", "root1");
        b.add_subclass("B", "root2");
        let s = b.finalize().unwrap();
        assert!(semantic_similarity(&s, "A", "B", SimilarityMethod::WuPalmer).is_err());
        assert!(semantic_similarity(&s, "A", "B", SimilarityMethod::InversePath).is_err());
    }

    fn fork_table() -> EmbeddingTable {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("root", vec![1.0, 1.0]).unwrap();
        t.insert("A", vec![1.0, 0.5]).unwrap();
        t.insert("B", vec![1.0, 0.0]).unwrap();
        t.insert("C", vec![0.0, 1.0]).unwrap();
        t
    }

    #[test]
    fn absolute_error_examples() {
        let s = fork_slice();
        let t = fork_table();
        // identical concept: both terms are 1
        let d = absolute_semantic_error(&t, &s, "B", "B", SimilarityMethod::WuPalmer).unwrap();
        assert!(d.abs() < 1e-12);
        // orthogonal embeddings, s' = 2/6... here 2*2/(3+3) = 2/3, cosine = 0
        let d = absolute_semantic_error(&t, &s, "B", "C", SimilarityMethod::WuPalmer).unwrap();
        assert!((d - 2.0 / 3.0).abs() < 1e-12);
        // symmetry
        let rev = absolute_semantic_error(&t, &s, "C", "B", SimilarityMethod::WuPalmer).unwrap();
        assert_eq!(d, rev);
    }

    #[test]
    fn absolute_error_on_disjoint_branches() {
        // root -> {A1, A2}, B under A1, C under A2: lca(B, C) is the root,
        // so s' = 2*1/(3+3) = 1/3; with orthogonal embeddings the error is 1/3
        let mut b = KnowledgeSliceBuilder::default();
        b.add_subclass("A1", "root");
        b.add_subclass("A2", "root");
        b.add_subclass("B", "A1");
        b.add_subclass("C", "A2");
        let s = b.finalize().unwrap();
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("B", vec![1.0, 0.0]).unwrap();
        t.insert("C", vec![0.0, 1.0]).unwrap();
        let d = absolute_semantic_error(&t, &s, "B", "C", SimilarityMethod::WuPalmer).unwrap();
        assert!((d - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn error_matrix_consistent_with_per_pair_calls() {
        let s = fork_slice();
        let t = fork_table();
        let concepts: Vec<String> =
            ["root", "A", "B", "C"].iter().map(|s| s.to_string()).collect();
        let m = pairwise_error_matrix(&t, &s, &concepts, SimilarityMethod::WuPalmer).unwrap();
        let n = concepts.len();
        let mut sum = 0.0;
        let mut max: f64 = f64::NEG_INFINITY;
        let mut count = 0;
        for i in 0..n {
            assert_eq!(m.values[i][i], Some(0.0));
            for j in i + 1..n {
                let direct =
                    absolute_semantic_error(&t, &s, &concepts[i], &concepts[j], SimilarityMethod::WuPalmer)
                        .unwrap();
                assert_eq!(m.values[i][j], Some(direct));
                assert_eq!(m.values[j][i], Some(direct));
                sum += direct;
                max = max.max(direct);
                count += 1;
            }
        }
        assert!((m.mean - sum / count as f64).abs() < 1e-12);
        assert_eq!(m.max, max);
        assert!(m.skipped.is_empty());
    }

    #[test]
    fn error_matrix_skips_bad_pairs() {
        let s = fork_slice();
        let mut t = fork_table();
        t.insert("island", vec![1.0, 2.0]).unwrap();
        let concepts: Vec<String> =
            ["B", "C", "island"].iter().map(|s| s.to_string()).collect();
        let m = pairwise_error_matrix(&t, &s, &concepts, SimilarityMethod::WuPalmer).unwrap();
        assert_eq!(m.skipped.len(), 2); // island is not a known concept
        assert_eq!(m.values[0][2], None);
    }

    #[test]
    fn spearman_and_pearson_basics() {
        let xs = [1.0, 2.0, 3.0];
        assert_eq!(spearman(&xs, &xs).unwrap(), 1.0);
        assert_eq!(pearson(&xs, &xs).unwrap(), 1.0);
        let rev = [3.0, 2.0, 1.0];
        assert_eq!(spearman(&xs, &rev).unwrap(), -1.0);
    }

    #[test]
    fn spearman_hand_computed_example() {
        // ranks differ by d = (0, 1, 1, 0): 1 - 6*2/(4*15) = 0.8
        let r = spearman(&[1.0, 2.0, 3.0, 4.0], &[1.0, 3.0, 2.0, 4.0]).unwrap();
        assert_eq!(r, 0.8);
    }

    #[test]
    fn spearman_average_ties() {
        // tied xs get rank 1.5 each
        let r = spearman(&[1.0, 1.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let ranks_x = [1.5, 1.5, 3.0, 4.0];
        let ranks_y = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(r, pearson(&ranks_x, &ranks_y).unwrap());
    }

    #[test]
    fn correlation_error_paths() {
        assert!(matches!(
            pearson(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Insufficient { .. })
        ));
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(Error::ConstantInput)
        ));
        assert!(matches!(
            pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn relatedness_correlation_paths() {
        let mut t = EmbeddingTable::new(2).unwrap();
        t.insert("a", vec![1.0, 0.0]).unwrap();
        t.insert("b", vec![1.0, 0.2]).unwrap();
        t.insert("c", vec![0.2, 1.0]).unwrap();
        t.insert("d", vec![-1.0, 0.1]).unwrap();
        let pairs = [("a", "b"), ("a", "c"), ("a", "d"), ("b", "c")];
        let cosines: Vec<f64> =
            pairs.iter().map(|(x, y)| t.cosine_between(x, y).unwrap()).collect();

        // judge scores equal to the cosines: pearson is exactly 1
        let rows: Vec<JudgeRow> = pairs
            .iter()
            .zip(&cosines)
            .map(|((x, y), c)| JudgeRow {
                concept_a: x.to_string(),
                concept_b: y.to_string(),
                score: *c,
            })
            .collect();
        let inv = JudgeInventory::new(rows, (-1.0, 1.0)).unwrap();
        let r = relatedness_correlation(&t, &inv, CorrelationKind::Pearson).unwrap();
        assert!((r.correlation - 1.0).abs() < 1e-12);

        // a strictly increasing transform keeps spearman at 1
        let rows: Vec<JudgeRow> = pairs
            .iter()
            .zip(&cosines)
            .map(|((x, y), c)| JudgeRow {
                concept_a: x.to_string(),
                concept_b: y.to_string(),
                score: c.exp(),
            })
            .collect();
        let inv = JudgeInventory::new(rows, (0.0, 3.0)).unwrap();
        let r = relatedness_correlation(&t, &inv, CorrelationKind::Spearman).unwrap();
        assert_eq!(r.correlation, 1.0);

        // unresolvable rows are dropped and reported
        let rows = vec![
            JudgeRow { concept_a: "a".into(), concept_b: "ghost".into(), score: 1.0 },
            JudgeRow { concept_a: "a".into(), concept_b: "b".into(), score: 2.0 },
            JudgeRow { concept_a: "a".into(), concept_b: "c".into(), score: 3.0 },
        ];
        let inv = JudgeInventory::new(rows, (0.0, 5.0)).unwrap();
        match relatedness_correlation(&t, &inv, CorrelationKind::Spearman) {
            Err(Error::Insufficient { got, .. }) => assert_eq!(got, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn judge_inventory_tsv_round_trip_and_validation() {
        let rows = vec![JudgeRow { concept_a: "a".into(), concept_b: "b".into(), score: 2.5 }];
        let inv = JudgeInventory::new(rows, (0.0, 5.0)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("judgments.tsv");
        inv.save_tsv(&p).unwrap();
        let back = JudgeInventory::load_tsv(&p).unwrap();
        assert_eq!(inv, back);

        let bad = vec![JudgeRow { concept_a: "a".into(), concept_b: "b".into(), score: 9.0 }];
        assert!(JudgeInventory::new(bad, (0.0, 5.0)).is_err());
    }
}
