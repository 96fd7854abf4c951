//! Property tests for the embedding table formats and vector operations.

use std::collections::HashSet;

use proptest::prelude::*;

use concept_metrics_core::embedding::{
    compose, cosine, load_word2vec_binary, load_word2vec_text, write_word2vec_binary,
    write_word2vec_text, CompositionMode, EmbeddingTable, LoadOptions,
};

fn ids_and_vectors() -> impl Strategy<Value = (usize, Vec<(String, Vec<f64>)>)> {
    (1usize..5).prop_flat_map(|dim| {
        let entry = (
            "[a-z][a-z0-9_]{0,9}",
            prop::collection::vec((-1.0e3f32..1.0e3f32).prop_map(|x| x as f64), dim),
        );
        prop::collection::vec(entry, 1..12).prop_map(move |mut entries| {
            let mut seen = HashSet::new();
            entries.retain(|(id, _)| seen.insert(id.clone()));
            (dim, entries)
        })
    })
}

fn table_from(dim: usize, entries: &[(String, Vec<f64>)]) -> EmbeddingTable {
    let mut t = EmbeddingTable::new(dim).unwrap();
    for (id, v) in entries {
        t.insert(id.clone(), v.clone()).unwrap();
    }
    t
}

proptest! {
    #[test]
    fn text_and_binary_round_trips((dim, entries) in ids_and_vectors()) {
        let table = table_from(dim, &entries);
        let dir = tempfile::tempdir().unwrap();

        // text at full precision: exact equality
        let txt = dir.path().join("t.txt");
        write_word2vec_text(&table, &txt).unwrap();
        let back = load_word2vec_text(&txt, &LoadOptions::default()).unwrap();
        prop_assert_eq!(back.dimension(), table.dimension());
        for (id, v) in table.iter() {
            prop_assert_eq!(back.get(id).unwrap(), v);
        }

        // binary: f32-bit-exact (inputs are f32-representable, so exact here)
        let bin = dir.path().join("t.bin");
        write_word2vec_binary(&table, &bin).unwrap();
        let back = load_word2vec_binary(&bin, &LoadOptions::default()).unwrap();
        for (id, v) in table.iter() {
            let got = back.get(id).unwrap();
            for (a, b) in v.iter().zip(got) {
                prop_assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn cosine_symmetry_scaling_and_bound(
        (u, v, alpha) in (1usize..6).prop_flat_map(|d| {
            (
                prop::collection::vec(-100.0f64..100.0, d),
                prop::collection::vec(-100.0f64..100.0, d),
                0.001f64..1000.0,
            )
        })
    ) {
        let nz = |x: &[f64]| x.iter().map(|a| a * a).sum::<f64>().sqrt() > 1e-6;
        prop_assume!(nz(&u) && nz(&v));
        let c = cosine(&u, &v).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        prop_assert_eq!(c, cosine(&v, &u).unwrap());
        let scaled: Vec<f64> = u.iter().map(|x| x * alpha).collect();
        prop_assert!((cosine(&scaled, &v).unwrap() - c).abs() < 1e-12);
    }

    #[test]
    fn compose_is_permutation_invariant(
        (dim, entries) in ids_and_vectors(),
        seed in 0u64..1000,
    ) {
        let table = table_from(dim, &entries);
        let mut tokens: Vec<String> = entries.iter().map(|(id, _)| id.clone()).collect();
        let forward = tokens.clone();
        // deterministic shuffle
        let mut state = seed.wrapping_add(0x9e3779b97f4a7c15);
        for i in (1..tokens.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            tokens.swap(i, (state % (i as u64 + 1)) as usize);
        }
        for mode in [CompositionMode::Average, CompositionMode::Sum] {
            let a = compose(&table, &forward, mode).unwrap();
            let b = compose(&table, &tokens, mode).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
