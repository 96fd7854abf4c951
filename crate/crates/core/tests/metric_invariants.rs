//! Geometric invariance of the metrics: a common orthogonal transform of all
//! vectors must leave every cosine-based metric unchanged to 1e-9, and the
//! categorization/coherence scores must also survive positive uniform scaling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use concept_metrics_core::categorization::{
    build_pool, categorization, coherence, top_k_entities, MatchMode,
};
use concept_metrics_core::embedding::{cosine, EmbeddingTable};
use concept_metrics_core::fixtures::{generate, FixtureSpec, HierarchyShape};
use concept_metrics_core::hierarchy::{pairwise_error_matrix, SimilarityMethod};
use concept_metrics_core::kg::TypingMode;
use concept_metrics_core::relational::transition_table;

/// Random orthogonal matrix via Gram-Schmidt on a seeded Gaussian matrix.
fn random_orthogonal(dim: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gaussian = || {
        let u1: f64 = 1.0 - rng.random::<f64>();
        let u2: f64 = rng.random();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    };
    loop {
        let mut q: Vec<Vec<f64>> = (0..dim).map(|_| (0..dim).map(|_| gaussian()).collect()).collect();
        let mut ok = true;
        for i in 0..dim {
            for j in 0..i {
                let dot: f64 = (0..dim).map(|k| q[i][k] * q[j][k]).sum();
                for k in 0..dim {
                    q[i][k] -= dot * q[j][k];
                }
            }
            let norm: f64 = q[i].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for x in &mut q[i] {
                *x /= norm;
            }
        }
        if ok {
            return q;
        }
    }
}

fn apply(q: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    q.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn transform_table(table: &EmbeddingTable, q: &[Vec<f64>]) -> EmbeddingTable {
    let mut out = EmbeddingTable::new(table.dimension()).unwrap();
    for (id, v) in table.iter() {
        out.insert(id, apply(q, v)).unwrap();
    }
    out
}

fn scale_table(table: &EmbeddingTable, alpha: f64) -> EmbeddingTable {
    let mut out = EmbeddingTable::new(table.dimension()).unwrap();
    for (id, v) in table.iter() {
        out.insert(id, v.iter().map(|x| x * alpha).collect()).unwrap();
    }
    out
}

fn spec() -> FixtureSpec {
    FixtureSpec {
        n_concepts: 6,
        entities_per_concept: 10,
        dimension: 12,
        noise_sigma: 0.2,
        hierarchy_shape: HierarchyShape::Chain,
        translational_properties: 4,
        seed: 2024,
    }
}

#[test]
fn orthogonal_transform_preserves_cosines() {
    let f = generate(&spec()).unwrap();
    let q = random_orthogonal(f.spec.dimension, 5);
    let rotated = transform_table(&f.table, &q);
    let ids: Vec<&str> = f.table.ids().take(20).collect();
    for a in &ids {
        for b in &ids {
            let before = cosine(f.table.get(a).unwrap(), f.table.get(b).unwrap()).unwrap();
            let after = cosine(rotated.get(a).unwrap(), rotated.get(b).unwrap()).unwrap();
            assert!((before - after).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn all_metrics_invariant_under_orthogonal_transform() {
    let f = generate(&spec()).unwrap();
    let q = random_orthogonal(f.spec.dimension, 11);
    let rotated = transform_table(&f.table, &q);
    let concepts = f.concepts();
    let pool = f.full_pool();

    for c in &concepts {
        let before = categorization(&f.table, &f.slice, c, TypingMode::Direct).unwrap();
        let after = categorization(&rotated, &f.slice, c, TypingMode::Direct).unwrap();
        assert!((before.score - after.score).abs() < 1e-9, "categorization {c}");

        let before = coherence(&f.table, &f.slice, &pool, c, 10, MatchMode::StrictLabel).unwrap();
        let after = coherence(&rotated, &f.slice, &pool, c, 10, MatchMode::StrictLabel).unwrap();
        assert_eq!(before, after, "coherence {c}");
    }

    let before = pairwise_error_matrix(&f.table, &f.slice, &concepts, SimilarityMethod::WuPalmer)
        .unwrap();
    let after = pairwise_error_matrix(&rotated, &f.slice, &concepts, SimilarityMethod::WuPalmer)
        .unwrap();
    for (r1, r2) in before.values.iter().zip(&after.values) {
        for (a, b) in r1.iter().zip(r2) {
            assert!((a.unwrap() - b.unwrap()).abs() < 1e-9);
        }
    }

    let props = f.properties();
    let before = transition_table(&f.table, &f.slice, &props);
    let after = transition_table(&rotated, &f.slice, &props);
    for (a, b) in before.rows.iter().zip(&after.rows) {
        assert!((a.score - b.score).abs() < 1e-9, "transition {}", a.property);
    }
}

#[test]
fn categorization_and_coherence_invariant_under_uniform_scaling() {
    let f = generate(&spec()).unwrap();
    let scaled = scale_table(&f.table, 37.5);
    let pool = f.full_pool();
    for c in f.concepts() {
        let a = categorization(&f.table, &f.slice, &c, TypingMode::Direct).unwrap();
        let b = categorization(&scaled, &f.slice, &c, TypingMode::Direct).unwrap();
        assert!((a.score - b.score).abs() < 1e-9);
        let ca = coherence(&f.table, &f.slice, &pool, &c, 10, MatchMode::StrictLabel).unwrap();
        let cb = coherence(&scaled, &f.slice, &pool, &c, 10, MatchMode::StrictLabel).unwrap();
        assert_eq!(ca, cb);
    }
}

#[test]
fn top_k_matches_full_sort_oracle_on_large_pool() {
    let n = 5000;
    let dim = 8;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let mut table = EmbeddingTable::new(dim).unwrap();
    table
        .insert("query", (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<f64>>())
        .unwrap();
    let mut members = Vec::new();
    for i in 0..n {
        let id = format!("e{i:05}");
        // a quarter of the pool duplicates a shared vector to stress ties
        let v: Vec<f64> = if i % 4 == 0 {
            vec![0.5; dim]
        } else {
            (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()
        };
        table.insert(id.clone(), v).unwrap();
        members.push(concept_metrics_core::categorization::PoolMember {
            entity: id,
            concept: "c".to_string(),
        });
    }
    let pool = concept_metrics_core::categorization::EntityPool {
        members,
        batch_size: n,
        seed: 0,
        typing_mode: TypingMode::Direct,
    };
    let query_vec = table.get("query").unwrap().to_vec();
    let mut oracle: Vec<(f64, String)> = pool
        .members
        .iter()
        .map(|m| (cosine(table.get(&m.entity).unwrap(), &query_vec).unwrap(), m.entity.clone()))
        .collect();
    oracle.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(&b.1)));
    for k in [1, 10, 137, n] {
        let got = top_k_entities(&table, &pool, "query", k).unwrap();
        let expect: Vec<String> = oracle.iter().take(k).map(|(_, e)| e.clone()).collect();
        assert_eq!(got, expect, "k = {k}");
    }
}

#[test]
fn build_pool_deterministic_across_thread_counts() {
    // sampling is sequential from the seed; rayon never touches it
    let f = generate(&spec()).unwrap();
    let concepts = f.concepts();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let p1 = single.install(|| {
        build_pool(&f.slice, &f.table, &concepts, 5, 77, TypingMode::Direct).unwrap()
    });
    let p2 = build_pool(&f.slice, &f.table, &concepts, 5, 77, TypingMode::Direct).unwrap();
    assert_eq!(p1, p2);
}
