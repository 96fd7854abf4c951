//! Python bindings for the concept-metrics toolkit.
//!
//! The extension module mirrors the core library's main types and operations:
//! embedding tables, knowledge-graph slices, entity pools, the three metric
//! families, 2-D projections, and fixture generation.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::{PyIOError, PyKeyError, PyValueError};
use pyo3::prelude::*;

use concept_metrics_core::categorization as cat;
use concept_metrics_core::embedding as emb;
use concept_metrics_core::error::Error as CoreError;
use concept_metrics_core::fixtures;
use concept_metrics_core::hierarchy;
use concept_metrics_core::kg;
use concept_metrics_core::projection;
use concept_metrics_core::relational;

/// (id, x, y) rows of a 2-D projection.
type ScatterRows = Vec<(String, f64, f64)>;

fn to_py(e: CoreError) -> PyErr {
    match &e {
        CoreError::Io { .. } => PyIOError::new_err(e.to_string()),
        CoreError::UnknownIdentifier(_) => PyKeyError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load_options(lowercase: bool, prefix_map: Option<&str>) -> PyResult<emb::LoadOptions> {
    let prefix_map = match prefix_map {
        Some(p) => Some(emb::PrefixMap::load(p).map_err(to_py)?),
        None => None,
    };
    Ok(emb::LoadOptions { lowercase, prefix_map })
}

/// A vocabulary of identifiers mapped to fixed-dimension f64 vectors.
#[pyclass(frozen, name = "EmbeddingTable", module = "concept_metrics")]
struct PyEmbeddingTable {
    inner: Arc<emb::EmbeddingTable>,
}

#[pymethods]
impl PyEmbeddingTable {
    /// Build a table from (identifier, vector) pairs.
    #[new]
    fn new(entries: Vec<(String, Vec<f64>)>) -> PyResult<Self> {
        if entries.is_empty() {
            return Err(PyValueError::new_err("entries must be non-empty"));
        }
        let mut table = emb::EmbeddingTable::new(entries[0].1.len()).map_err(to_py)?;
        for (id, v) in entries {
            table.insert(id, v).map_err(to_py)?;
        }
        Ok(PyEmbeddingTable { inner: Arc::new(table) })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lowercase=false, prefix_map=None))]
    fn load_word2vec_text(path: &str, lowercase: bool, prefix_map: Option<&str>) -> PyResult<Self> {
        let opts = load_options(lowercase, prefix_map)?;
        let table = emb::load_word2vec_text(path, &opts).map_err(to_py)?;
        Ok(PyEmbeddingTable { inner: Arc::new(table) })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lowercase=false, prefix_map=None))]
    fn load_word2vec_binary(path: &str, lowercase: bool, prefix_map: Option<&str>) -> PyResult<Self> {
        let opts = load_options(lowercase, prefix_map)?;
        let table = emb::load_word2vec_binary(path, &opts).map_err(to_py)?;
        Ok(PyEmbeddingTable { inner: Arc::new(table) })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lowercase=false, prefix_map=None))]
    fn load_glove_text(path: &str, lowercase: bool, prefix_map: Option<&str>) -> PyResult<Self> {
        let opts = load_options(lowercase, prefix_map)?;
        let table = emb::load_glove_text(path, &opts).map_err(to_py)?;
        Ok(PyEmbeddingTable { inner: Arc::new(table) })
    }

    #[staticmethod]
    #[pyo3(signature = (path, lowercase=false, prefix_map=None))]
    fn load_tsv(path: &str, lowercase: bool, prefix_map: Option<&str>) -> PyResult<Self> {
        let opts = load_options(lowercase, prefix_map)?;
        let table = emb::load_tsv(path, &opts).map_err(to_py)?;
        Ok(PyEmbeddingTable { inner: Arc::new(table) })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __contains__(&self, id: &str) -> bool {
        self.inner.contains(id)
    }

    fn ids(&self) -> Vec<String> {
        self.inner.ids().map(str::to_string).collect()
    }

    fn vector(&self, id: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.vector(id).map_err(to_py)?.to_vec())
    }

    /// Cosine similarity between two stored identifiers.
    fn cosine(&self, a: &str, b: &str) -> PyResult<f64> {
        self.inner.cosine_between(a, b).map_err(to_py)
    }

    /// Element-wise average or sum of the vectors of `tokens`.
    #[pyo3(signature = (tokens, mode="average"))]
    fn compose(&self, tokens: Vec<String>, mode: &str) -> PyResult<Vec<f64>> {
        let mode: emb::CompositionMode = mode.parse().map_err(to_py)?;
        emb::compose(&self.inner, &tokens, mode).map_err(to_py)
    }

    fn write_word2vec_text(&self, path: &str) -> PyResult<()> {
        emb::write_word2vec_text(&self.inner, path).map_err(to_py)
    }

    fn write_word2vec_binary(&self, path: &str) -> PyResult<()> {
        emb::write_word2vec_binary(&self.inner, path).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("EmbeddingTable(len={}, dimension={})", self.inner.len(), self.inner.dimension())
    }
}

/// Typing assertions, subclass hierarchy, and property schema.
#[pyclass(frozen, name = "KnowledgeSlice", module = "concept_metrics")]
struct PyKnowledgeSlice {
    inner: Arc<kg::KnowledgeSlice>,
}

fn parse_typing(mode: &str) -> PyResult<kg::TypingMode> {
    mode.parse().map_err(to_py)
}

#[pymethods]
impl PyKnowledgeSlice {
    /// Load from an .nt file, a typing .tsv, or a fixture directory.
    #[staticmethod]
    #[pyo3(signature = (path, prefix_map=None))]
    fn load(path: &str, prefix_map: Option<&str>) -> PyResult<Self> {
        let map = match prefix_map {
            Some(p) => Some(emb::PrefixMap::load(p).map_err(to_py)?),
            None => None,
        };
        let slice = kg::load_kg_path(path, map.as_ref()).map_err(to_py)?;
        Ok(PyKnowledgeSlice { inner: Arc::new(slice) })
    }

    fn concepts(&self) -> Vec<String> {
        self.inner.concepts().map(str::to_string).collect()
    }

    fn entities(&self) -> Vec<String> {
        self.inner.entities().map(str::to_string).collect()
    }

    fn properties(&self) -> Vec<String> {
        self.inner.properties().map(str::to_string).collect()
    }

    fn depth(&self, concept: &str) -> PyResult<usize> {
        self.inner.depth(concept).map_err(to_py)
    }

    fn path_distance(&self, a: &str, b: &str) -> PyResult<usize> {
        self.inner.path_distance(a, b).map_err(to_py)
    }

    fn lowest_common_ancestor(&self, a: &str, b: &str) -> PyResult<String> {
        self.inner.lowest_common_ancestor(a, b).map_err(to_py)
    }

    #[pyo3(signature = (concept, typing="direct"))]
    fn entities_of(&self, concept: &str, typing: &str) -> PyResult<Vec<String>> {
        self.inner.entities_of(concept, parse_typing(typing)?).map_err(to_py)
    }

    fn types_of(&self, entity: &str) -> Option<Vec<String>> {
        self.inner.types_of(entity).map(|s| s.iter().cloned().collect())
    }

    /// (domains, ranges) declared for a property, if any.
    fn schema_of(&self, property: &str) -> Option<(Vec<String>, Vec<String>)> {
        self.inner.schema_of(property).map(|s| (s.domains.clone(), s.ranges.clone()))
    }

    fn __repr__(&self) -> String {
        format!(
            "KnowledgeSlice(concepts={}, entities={})",
            self.inner.n_concepts(),
            self.inner.n_entities()
        )
    }
}

/// A mixed, seeded sample of labeled entities.
#[pyclass(frozen, name = "EntityPool", module = "concept_metrics")]
struct PyEntityPool {
    inner: Arc<cat::EntityPool>,
}

#[pymethods]
impl PyEntityPool {
    #[staticmethod]
    fn load_tsv(path: &str) -> PyResult<Self> {
        Ok(PyEntityPool { inner: Arc::new(cat::EntityPool::load_tsv(path).map_err(to_py)?) })
    }

    fn save_tsv(&self, path: &str) -> PyResult<()> {
        self.inner.save_tsv(path).map_err(to_py)
    }

    fn members(&self) -> Vec<(String, String)> {
        self.inner.members.iter().map(|m| (m.entity.clone(), m.concept.clone())).collect()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn batch_size(&self) -> usize {
        self.inner.batch_size
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }
}

/// Sample `batch_size` embeddable entities per concept into one mixed pool.
#[pyfunction]
#[pyo3(signature = (slice, table, concepts, batch_size=20, seed=0, typing="direct"))]
fn build_pool(
    slice: PyRef<PyKnowledgeSlice>,
    table: PyRef<PyEmbeddingTable>,
    concepts: Vec<String>,
    batch_size: usize,
    seed: u64,
    typing: &str,
) -> PyResult<PyEntityPool> {
    let pool = cat::build_pool(
        &slice.inner,
        &table.inner,
        &concepts,
        batch_size,
        seed,
        parse_typing(typing)?,
    )
    .map_err(to_py)?;
    Ok(PyEntityPool { inner: Arc::new(pool) })
}

/// Returns (score, n_entities_used, n_entities_skipped_oov).
#[pyfunction]
#[pyo3(signature = (table, slice, concept, typing="direct"))]
fn categorization(
    table: PyRef<PyEmbeddingTable>,
    slice: PyRef<PyKnowledgeSlice>,
    concept: &str,
    typing: &str,
) -> PyResult<(f64, usize, usize)> {
    let r = cat::categorization(&table.inner, &slice.inner, concept, parse_typing(typing)?)
        .map_err(to_py)?;
    Ok((r.score, r.n_entities_used, r.n_entities_skipped_oov))
}

#[pyfunction]
#[pyo3(signature = (table, slice, pool, concept, n, match_mode="strict"))]
fn coherence(
    table: PyRef<PyEmbeddingTable>,
    slice: PyRef<PyKnowledgeSlice>,
    pool: PyRef<PyEntityPool>,
    concept: &str,
    n: usize,
    match_mode: &str,
) -> PyResult<f64> {
    let mode: cat::MatchMode = match_mode.parse().map_err(to_py)?;
    cat::coherence(&table.inner, &slice.inner, &pool.inner, concept, n, mode).map_err(to_py)
}

#[pyfunction]
fn top_k_entities(
    table: PyRef<PyEmbeddingTable>,
    pool: PyRef<PyEntityPool>,
    concept: &str,
    k: usize,
) -> PyResult<Vec<String>> {
    cat::top_k_entities(&table.inner, &pool.inner, concept, k).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (slice, a, b, method="wu_palmer"))]
fn semantic_similarity(
    slice: PyRef<PyKnowledgeSlice>,
    a: &str,
    b: &str,
    method: &str,
) -> PyResult<f64> {
    let method: hierarchy::SimilarityMethod = method.parse().map_err(to_py)?;
    hierarchy::semantic_similarity(&slice.inner, a, b, method).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (table, slice, a, b, method="wu_palmer"))]
fn absolute_semantic_error(
    table: PyRef<PyEmbeddingTable>,
    slice: PyRef<PyKnowledgeSlice>,
    a: &str,
    b: &str,
    method: &str,
) -> PyResult<f64> {
    let method: hierarchy::SimilarityMethod = method.parse().map_err(to_py)?;
    hierarchy::absolute_semantic_error(&table.inner, &slice.inner, a, b, method).map_err(to_py)
}

#[pyfunction]
fn spearman(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    hierarchy::spearman(&xs, &ys).map_err(to_py)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<f64> {
    hierarchy::pearson(&xs, &ys).map_err(to_py)
}

/// Transition distances of a property: one (domain, range, score,
/// domain_equals_range) tuple per declared pair.
#[pyfunction]
fn transition_distance(
    table: PyRef<PyEmbeddingTable>,
    slice: PyRef<PyKnowledgeSlice>,
    property: &str,
) -> PyResult<Vec<(String, String, f64, bool)>> {
    let rows = relational::transition_distance(&table.inner, &slice.inner, property)
        .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.domain, r.range, r.score, r.domain_equals_range))
        .collect())
}

/// Rows of (concept, property, "compatible" | "incompatible").
#[pyfunction]
#[pyo3(signature = (slice, properties, negatives_per_property, seed=0))]
fn selectional_preference_inventory(
    slice: PyRef<PyKnowledgeSlice>,
    properties: Vec<String>,
    negatives_per_property: usize,
    seed: u64,
) -> PyResult<Vec<(String, String, String)>> {
    let rows = relational::selectional_preference_inventory(
        &slice.inner,
        &properties,
        negatives_per_property,
        seed,
    )
    .map_err(to_py)?;
    Ok(rows
        .into_iter()
        .map(|r| (r.concept, r.property, r.label.to_string()))
        .collect())
}

#[pyfunction]
fn cosine(u: Vec<f64>, v: Vec<f64>) -> PyResult<f64> {
    emb::cosine(&u, &v).map_err(to_py)
}

/// PCA onto the top-2 principal components: rows of (id, x, y).
#[pyfunction]
fn pca_2d(items: Vec<(String, Vec<f64>)>) -> PyResult<ScatterRows> {
    let proj = projection::pca_2d(&items).map_err(to_py)?;
    Ok(proj.rows.into_iter().map(|r| (r.id, r.x, r.y)).collect())
}

/// Exact t-SNE. Returns (rows, kl_checkpoints) where rows are (id, x, y) and
/// kl_checkpoints are (iteration, kl).
#[pyfunction]
#[pyo3(signature = (items, perplexity=None, iterations=1000, seed=0))]
fn tsne_2d(
    items: Vec<(String, Vec<f64>)>,
    perplexity: Option<f64>,
    iterations: usize,
    seed: u64,
) -> PyResult<(ScatterRows, Vec<(usize, f64)>)> {
    let opts = projection::TsneOptions { perplexity, iterations, seed };
    let proj = projection::tsne_2d(&items, &opts).map_err(to_py)?;
    let kl = proj.params.kl_checkpoints.iter().map(|c| (c.iteration, c.kl)).collect();
    Ok((proj.rows.into_iter().map(|r| (r.id, r.x, r.y)).collect(), kl))
}

/// Write a scatter TSV + SVG for projected rows with group labels.
#[pyfunction]
fn export_scatter(
    rows: ScatterRows,
    labels: HashMap<String, String>,
    tsv_path: &str,
    svg_path: &str,
) -> PyResult<()> {
    let proj = projection::Projection2D {
        rows: rows
            .into_iter()
            .map(|(id, x, y)| projection::ProjectedPoint { id, x, y })
            .collect(),
        method: projection::ProjectionMethod::Pca,
        params: projection::ProjectionParams::default(),
    };
    projection::export_scatter(&proj, &labels, tsv_path, svg_path).map_err(to_py)
}

/// Generate a seeded fixture from a JSON spec string and write it to a
/// directory; returns the concept identifiers.
#[pyfunction]
fn generate_fixture(spec_json: &str, out_dir: &str) -> PyResult<Vec<String>> {
    let spec: fixtures::FixtureSpec = serde_json::from_str(spec_json)
        .map_err(|e| PyValueError::new_err(format!("invalid fixture spec: {e}")))?;
    let fixture = fixtures::generate(&spec).map_err(to_py)?;
    fixture.write_to_dir(out_dir).map_err(to_py)?;
    Ok(fixture.concepts())
}

#[pymodule]
fn concept_metrics(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEmbeddingTable>()?;
    m.add_class::<PyKnowledgeSlice>()?;
    m.add_class::<PyEntityPool>()?;
    m.add_function(wrap_pyfunction!(build_pool, m)?)?;
    m.add_function(wrap_pyfunction!(categorization, m)?)?;
    m.add_function(wrap_pyfunction!(coherence, m)?)?;
    m.add_function(wrap_pyfunction!(top_k_entities, m)?)?;
    m.add_function(wrap_pyfunction!(semantic_similarity, m)?)?;
    m.add_function(wrap_pyfunction!(absolute_semantic_error, m)?)?;
    m.add_function(wrap_pyfunction!(spearman, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(transition_distance, m)?)?;
    m.add_function(wrap_pyfunction!(selectional_preference_inventory, m)?)?;
    m.add_function(wrap_pyfunction!(cosine, m)?)?;
    m.add_function(wrap_pyfunction!(pca_2d, m)?)?;
    m.add_function(wrap_pyfunction!(tsne_2d, m)?)?;
    m.add_function(wrap_pyfunction!(export_scatter, m)?)?;
    m.add_function(wrap_pyfunction!(generate_fixture, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
