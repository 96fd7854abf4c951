//! Seeded synthetic fixtures: a concept hierarchy, entity clouds around each
//! concept vector, and translational properties with `V_range` planted exactly
//! at `V_domain + V_property`.
//!
//! Generation is single-threaded and fully determined by the seed; writing the
//! same fixture twice produces byte-identical files. Entity vectors are left
//! un-normalized so cosine-vs-dot-product bugs stay visible downstream.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::categorization::{EntityPool, PoolMember};
use crate::embedding::{cosine, write_word2vec_binary, write_word2vec_text, EmbeddingTable};
use crate::error::{Error, Result};
use crate::kg::{KnowledgeSlice, TypingMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "shape")]
pub enum HierarchyShape {
    /// `c0 <- c1 <- ... <- c(n-1)`, each concept a subclass of the previous.
    Chain,
    /// Complete b-ary tree in heap layout; requires `n_concepts` to equal the
    /// full tree size `(b^depth - 1) / (b - 1)`.
    BalancedTree { branching: usize, depth: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureSpec {
    pub n_concepts: usize,
    pub entities_per_concept: usize,
    pub dimension: usize,
    pub noise_sigma: f64,
    pub hierarchy_shape: HierarchyShape,
    pub translational_properties: usize,
    pub seed: u64,
}

impl FixtureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_concepts == 0 || self.entities_per_concept == 0 || self.dimension == 0 {
            return Err(Error::InvalidInput(
                "n_concepts, entities_per_concept, and dimension must be positive".into(),
            ));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidInput("noise_sigma must be finite and >= 0".into()));
        }
        if let HierarchyShape::BalancedTree { branching, depth } = self.hierarchy_shape {
            if branching == 0 || depth == 0 {
                return Err(Error::InvalidInput(format!(
                    "impossible tree shape: branching {branching}, depth {depth}"
                )));
            }
            let expected = tree_size(branching, depth).ok_or_else(|| {
                Error::InvalidInput(format!(
                    "tree of branching {branching} and depth {depth} overflows"
                ))
            })?;
            if expected != self.n_concepts {
                return Err(Error::InvalidInput(format!(
                    "balanced tree of branching {branching} and depth {depth} has {expected} \
                     concepts, but n_concepts is {}",
                    self.n_concepts
                )));
            }
        }
        Ok(())
    }

    pub fn load_json(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: FixtureSpec = serde_json::from_str(&text)
            .map_err(|e| Error::format(path, format!("invalid fixture spec: {e}")))?;
        spec.validate()?;
        Ok(spec)
    }
}

fn tree_size(branching: usize, depth: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut level = 1usize;
    for _ in 0..depth {
        total = total.checked_add(level)?;
        level = level.checked_mul(branching)?;
    }
    Some(total)
}

/// Every planted quantity the generator knows to be true.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnswerKey {
    /// Per concept: cosine between the concept vector and the realized mean of
    /// its entity vectors.
    pub categorization: BTreeMap<String, f64>,
    /// Per concept: its `entities_per_concept` nearest entities over the whole
    /// entity set, by descending cosine then ascending identifier.
    pub nearest_entities: BTreeMap<String, Vec<String>>,
    /// Per translational property: the planted transition distance (1.0).
    pub transition: BTreeMap<String, f64>,
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub spec: FixtureSpec,
    pub table: EmbeddingTable,
    pub slice: KnowledgeSlice,
    pub answer_key: AnswerKey,
}

/// Standard normal via Box-Muller, consuming two uniforms per draw.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-9 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

fn id_width(count: usize) -> usize {
    count.saturating_sub(1).max(1).to_string().len().max(2)
}

pub fn generate(spec: &FixtureSpec) -> Result<Fixture> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let cw = id_width(spec.n_concepts);
    let ew = id_width(spec.entities_per_concept);
    let pw = id_width(spec.translational_properties);

    let mut table = EmbeddingTable::new(spec.dimension)?;
    let mut builder = KnowledgeSlice::builder();

    let concepts: Vec<String> =
        (0..spec.n_concepts).map(|i| format!("c{i:0cw$}")).collect();
    for id in &concepts {
        table.insert(id.clone(), unit_vector(&mut rng, spec.dimension))?;
    }

    let mut entities: Vec<(String, usize)> = Vec::new();
    for (ci, cid) in concepts.iter().enumerate() {
        let center = table.get(cid).unwrap().to_vec();
        for j in 0..spec.entities_per_concept {
            let eid = format!("{cid}_e{j:0ew$}");
            let v: Vec<f64> =
                center.iter().map(|c| c + spec.noise_sigma * gaussian(&mut rng)).collect();
            table.insert(eid.clone(), v)?;
            builder.add_typing(&eid, cid);
            entities.push((eid, ci));
        }
    }

    match spec.hierarchy_shape {
        HierarchyShape::Chain => {
            for i in 1..spec.n_concepts {
                builder.add_subclass(&concepts[i], &concepts[i - 1]);
            }
        }
        HierarchyShape::BalancedTree { branching, .. } => {
            for i in 1..spec.n_concepts {
                builder.add_subclass(&concepts[i], &concepts[(i - 1) / branching]);
            }
        }
    }

    let mut key = AnswerKey::default();
    for t in 0..spec.translational_properties {
        let pid = format!("p{t:0pw$}");
        let domain = &concepts[t % spec.n_concepts];
        let range_id = format!("{pid}_range");
        let prop_vec = unit_vector(&mut rng, spec.dimension);
        let range_vec: Vec<f64> =
            table.get(domain).unwrap().iter().zip(&prop_vec).map(|(d, p)| d + p).collect();
        table.insert(pid.clone(), prop_vec)?;
        table.insert(range_id.clone(), range_vec)?;
        builder.add_schema(&pid, domain, &range_id);
        key.transition.insert(pid, 1.0);
    }

    let slice = builder.finalize()?;

    // realized categorization scores, computed with plain loops here so the
    // metric code path stays independently checkable
    for (ci, cid) in concepts.iter().enumerate() {
        let mut mean = vec![0.0f64; spec.dimension];
        let mut count = 0usize;
        for (eid, owner) in &entities {
            if *owner == ci {
                for (m, x) in mean.iter_mut().zip(table.get(eid).unwrap()) {
                    *m += x;
                }
                count += 1;
            }
        }
        for m in &mut mean {
            *m /= count as f64;
        }
        key.categorization.insert(cid.clone(), cosine(&mean, table.get(cid).unwrap())?);
    }

    // exhaustive nearest-neighbor ranking per concept over all entities
    for cid in &concepts {
        let cv = table.get(cid).unwrap();
        let mut scored: Vec<(f64, &str)> = entities
            .iter()
            .map(|(eid, _)| (cosine(table.get(eid).unwrap(), cv).unwrap(), eid.as_str()))
            .collect();
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then_with(|| a.1.cmp(b.1)));
        key.nearest_entities.insert(
            cid.clone(),
            scored
                .into_iter()
                .take(spec.entities_per_concept)
                .map(|(_, e)| e.to_string())
                .collect(),
        );
    }

    Ok(Fixture { spec: spec.clone(), table, slice, answer_key: key })
}

/// Files written by [`Fixture::write_to_dir`].
#[derive(Debug, Clone, PartialEq)]
pub struct FixturePaths {
    pub embeddings_text: PathBuf,
    pub embeddings_binary: PathBuf,
    pub typing_tsv: PathBuf,
    pub schema_tsv: Option<PathBuf>,
    pub subclass_nt: PathBuf,
    pub answer_key: PathBuf,
    pub spec_json: PathBuf,
}

impl Fixture {
    pub fn concepts(&self) -> Vec<String> {
        (0..self.spec.n_concepts)
            .map(|i| format!("c{:0w$}", i, w = id_width(self.spec.n_concepts)))
            .collect()
    }

    pub fn properties(&self) -> Vec<String> {
        (0..self.spec.translational_properties)
            .map(|i| format!("p{:0w$}", i, w = id_width(self.spec.translational_properties)))
            .collect()
    }

    /// The whole entity set as a pool, each entity labeled with its generating
    /// concept.
    pub fn full_pool(&self) -> EntityPool {
        let mut members = Vec::new();
        for c in self.concepts() {
            for e in self.slice.entities_of(&c, TypingMode::Direct).unwrap_or_default() {
                members.push(PoolMember { entity: e, concept: c.clone() });
            }
        }
        EntityPool {
            members,
            batch_size: self.spec.entities_per_concept,
            seed: self.spec.seed,
            typing_mode: TypingMode::Direct,
        }
    }

    /// Write every format the loaders read, plus the answer key and the
    /// generation parameters.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<FixturePaths> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;

        let embeddings_text = dir.join("embeddings.txt");
        write_word2vec_text(&self.table, &embeddings_text)?;
        let embeddings_binary = dir.join("embeddings.bin");
        write_word2vec_binary(&self.table, &embeddings_binary)?;

        let typing_tsv = dir.join("typing.tsv");
        {
            let f = fs::File::create(&typing_tsv).map_err(|e| Error::io(&typing_tsv, e))?;
            let mut w = BufWriter::new(f);
            for c in self.concepts() {
                for e in self.slice.entities_of(&c, TypingMode::Direct)? {
                    writeln!(w, "{e}\t{c}").map_err(|e| Error::io(&typing_tsv, e))?;
                }
            }
            w.flush().map_err(|e| Error::io(&typing_tsv, e))?;
        }

        let subclass_nt = dir.join("subclass.nt");
        {
            let f = fs::File::create(&subclass_nt).map_err(|e| Error::io(&subclass_nt, e))?;
            let mut w = BufWriter::new(f);
            let concepts = self.concepts();
            for (i, c) in concepts.iter().enumerate().skip(1) {
                let parent = match self.spec.hierarchy_shape {
                    HierarchyShape::Chain => &concepts[i - 1],
                    HierarchyShape::BalancedTree { branching, .. } => &concepts[(i - 1) / branching],
                };
                writeln!(w, "<{c}> <rdfs:subClassOf> <{parent}> .")
                    .map_err(|e| Error::io(&subclass_nt, e))?;
            }
            w.flush().map_err(|e| Error::io(&subclass_nt, e))?;
        }

        let schema_tsv = if self.spec.translational_properties > 0 {
            let path = dir.join("schema.tsv");
            let f = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
            let mut w = BufWriter::new(f);
            for p in self.properties() {
                let schema = self.slice.schema_of(&p).expect("generated property has schema");
                for d in &schema.domains {
                    for r in &schema.ranges {
                        writeln!(w, "{p}\t{d}\t{r}").map_err(|e| Error::io(&path, e))?;
                    }
                }
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            Some(path)
        } else {
            None
        };

        let answer_key = dir.join("answer_key.json");
        let key_json = serde_json::to_string_pretty(&self.answer_key)
            .expect("answer key serializes");
        fs::write(&answer_key, key_json + "\n").map_err(|e| Error::io(&answer_key, e))?;

        let spec_json = dir.join("fixture_spec.json");
        let spec_text = serde_json::to_string_pretty(&self.spec).expect("spec serializes");
        fs::write(&spec_json, spec_text + "\n").map_err(|e| Error::io(&spec_json, e))?;

        Ok(FixturePaths {
            embeddings_text,
            embeddings_binary,
            typing_tsv,
            schema_tsv,
            subclass_nt,
            answer_key,
            spec_json,
        })
    }
}
