//! Command implementations: load inputs, run the metric, emit the report.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde_json::json;

use concept_metrics_core::categorization::{
    build_pool, categorization_batch, coherence_batch, MatchMode,
};
use concept_metrics_core::embedding::{
    compose, load_glove_text, load_tsv, load_word2vec_binary, load_word2vec_text,
    CompositionMode, EmbeddingTable, LoadOptions, PrefixMap,
};
use concept_metrics_core::fixtures;
use concept_metrics_core::hierarchy::{
    pairwise_error_matrix, relatedness_correlation, CorrelationKind, JudgeInventory,
    SimilarityMethod,
};
use concept_metrics_core::kg::{load_kg_path, KnowledgeSlice, TypingMode};
use concept_metrics_core::projection::{export_scatter, pca_2d, tsne_2d, ProjectionMethod, TsneOptions};
use concept_metrics_core::relational::transition_table;
use concept_metrics_core::report::{MetricReport, ReportFormat, ReportRow, RunMeta, Task};

use crate::{
    CategorizationArgs, CoherenceArgs, EmbeddingArgs, FixtureGenerateArgs, OutputArgs,
    ProjectArgs, RelatednessArgs, SemanticErrorArgs, TransitionArgs,
};

struct LoadedInputs {
    table: EmbeddingTable,
    prefix_map: Option<PrefixMap>,
    meta_base: RunMeta,
    notes: Vec<String>,
}

fn file_stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "embeddings".into())
}

/// Load the table per `--embedding-format` (with sniffing for `auto`) and fold
/// in composed vectors from the `--labels` file.
fn load_inputs(args: &EmbeddingArgs) -> Result<LoadedInputs> {
    let prefix_map = match &args.prefix_map {
        Some(p) => Some(PrefixMap::load(p).context("loading --prefix-map")?),
        None => None,
    };
    let opts = LoadOptions { lowercase: args.lowercase, prefix_map: prefix_map.clone() };
    let path = &args.embeddings;
    let format = resolve_format(&args.embedding_format, path)?;
    let mut table = match format.as_str() {
        "word2vec-text" => load_word2vec_text(path, &opts),
        "word2vec-binary" => load_word2vec_binary(path, &opts),
        "glove" => load_glove_text(path, &opts),
        "tsv" => load_tsv(path, &opts),
        other => bail!("unknown embedding format `{other}`"),
    }
    .with_context(|| format!("loading embeddings from {}", path.display()))?;

    let compose_mode: CompositionMode =
        args.compose.parse().context("parsing --compose")?;
    let mut notes = Vec::new();
    if let Some(labels_path) = &args.labels {
        let (added, skipped) = augment_with_labels(
            &mut table,
            labels_path,
            compose_mode,
            args.lowercase,
            prefix_map.as_ref(),
        )?;
        notes.push(format!(
            "labels: {added} identifiers composed ({}), {skipped} rows skipped for missing tokens",
            compose_mode
        ));
    }
    let mut meta = table.source_meta().clone();
    meta.composition = args.labels.as_ref().map(|_| compose_mode);
    meta.prefix_map = args.prefix_map.as_ref().map(|p| p.display().to_string());
    table.set_source_meta(meta);

    let stem = file_stem(path);
    let meta_base = RunMeta {
        dataset_label: args.dataset_label.clone().unwrap_or_else(|| stem.clone()),
        model_label: args.model_label.clone().unwrap_or(stem),
        embedding_source: path.display().to_string(),
        composition_mode: args.labels.as_ref().map(|_| compose_mode),
        prefix_map: args.prefix_map.as_ref().map(|p| p.display().to_string()),
        labels_source: args.labels.as_ref().map(|p| p.display().to_string()),
        tool_version: format!("concept-metrics {}", env!("CARGO_PKG_VERSION")),
        ..RunMeta::default()
    };
    Ok(LoadedInputs { table, prefix_map, meta_base, notes })
}

fn resolve_format(requested: &str, path: &Path) -> Result<String> {
    if requested != "auto" {
        return Ok(requested.to_string());
    }
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => return Ok("word2vec-binary".into()),
        Some("tsv") => return Ok("tsv".into()),
        _ => {}
    }
    // sniff: a word2vec text header is exactly two integers
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {} to detect its format", path.display()))?;
    let first = text.lines().next().unwrap_or_default();
    let fields: Vec<&str> = first.split_whitespace().collect();
    let is_header =
        fields.len() == 2 && fields.iter().all(|f| f.parse::<usize>().is_ok());
    Ok(if is_header { "word2vec-text".into() } else { "glove".into() })
}

/// `identifier TAB token token ...` lines; identifiers already present in the
/// table win. Returns (composed, skipped-for-missing-tokens).
fn augment_with_labels(
    table: &mut EmbeddingTable,
    path: &Path,
    mode: CompositionMode,
    lowercase: bool,
    prefix_map: Option<&PrefixMap>,
) -> Result<(usize, usize)> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading labels {}", path.display()))?;
    let mut added = 0usize;
    let mut skipped = 0usize;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, tokens) = line
            .split_once('\t')
            .with_context(|| format!("{}:{}: expected `identifier TAB tokens`", path.display(), idx + 1))?;
        let id = match prefix_map {
            Some(m) => m.expand(id),
            None => id.to_string(),
        };
        if table.contains(&id) {
            continue;
        }
        let tokens: Vec<String> = tokens
            .split_whitespace()
            .map(|t| if lowercase { t.to_lowercase() } else { t.to_string() })
            .collect();
        if tokens.is_empty() {
            bail!("{}:{}: no tokens for `{id}`", path.display(), idx + 1);
        }
        match compose(table, &tokens, mode) {
            Ok(vector) => {
                table.insert(id, vector)?;
                added += 1;
            }
            Err(_) => skipped += 1,
        }
    }
    Ok((added, skipped))
}

/// A comma list, or a file with one identifier per line.
fn parse_id_list(raw: &str, prefix_map: Option<&PrefixMap>) -> Result<Vec<String>> {
    let expand = |id: &str| match prefix_map {
        Some(m) => m.expand(id),
        None => id.to_string(),
    };
    let path = Path::new(raw);
    let ids: Vec<String> = if path.is_file() {
        fs::read_to_string(path)
            .with_context(|| format!("reading identifier list {}", path.display()))?
            .lines()
            .map(|l| l.trim())
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(expand)
            .collect()
    } else {
        raw.split(',').map(str::trim).filter(|s| !s.is_empty()).map(expand).collect()
    };
    if ids.is_empty() {
        bail!("empty identifier list `{raw}`");
    }
    Ok(ids)
}

fn load_kg(path: &Path, prefix_map: Option<&PrefixMap>) -> Result<KnowledgeSlice> {
    load_kg_path(path, prefix_map)
        .with_context(|| format!("loading knowledge graph from {}", path.display()))
}

fn now_rfc3339() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

fn write_report(mut report: MetricReport, output: &OutputArgs) -> Result<()> {
    report.generated_at = Some(now_rfc3339());
    let format: ReportFormat = output.format.parse()?;
    report
        .write(&output.out, format)
        .with_context(|| format!("writing report to {}", output.out.display()))?;
    Ok(())
}

pub fn categorization(args: CategorizationArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let slice = load_kg(&args.kg, inputs.prefix_map.as_ref())?;
    let concepts = parse_id_list(&args.concepts, inputs.prefix_map.as_ref())?;
    let typing: TypingMode = args.typing.parse()?;

    let mut meta = inputs.meta_base;
    meta.kg_source = Some(args.kg.display().to_string());
    meta.typing_mode = Some(typing);
    meta.notes = inputs.notes;

    let mut report = MetricReport::new(
        Task::Categorization,
        meta,
        vec!["score", "n_entities_used", "n_entities_skipped_oov"],
    );
    for (concept, outcome) in categorization_batch(&inputs.table, &slice, &concepts, typing) {
        report.rows.push(match outcome {
            Ok(r) => ReportRow::new(concept)
                .with("score", r.score)
                .with("n_entities_used", r.n_entities_used)
                .with("n_entities_skipped_oov", r.n_entities_skipped_oov),
            Err(e) => ReportRow::new(concept).with_error(e.to_string()),
        });
    }
    write_report(report, &args.output)
}

pub fn coherence(args: CoherenceArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let slice = load_kg(&args.kg, inputs.prefix_map.as_ref())?;
    let concepts = parse_id_list(&args.concepts, inputs.prefix_map.as_ref())?;
    let typing: TypingMode = args.typing.parse()?;
    let match_mode: MatchMode = args.match_mode.parse()?;

    let pool = build_pool(&slice, &inputs.table, &concepts, args.batch_size, args.seed, typing)
        .context("building the entity pool")?;
    let pool_path = sibling_path(&args.output.out, "pool.tsv");
    pool.save_tsv(&pool_path)
        .with_context(|| format!("writing pool to {}", pool_path.display()))?;

    let mut meta = inputs.meta_base;
    meta.kg_source = Some(args.kg.display().to_string());
    meta.typing_mode = Some(typing);
    meta.match_mode = Some(match_mode);
    meta.radius = Some(args.radius);
    meta.batch_size = Some(args.batch_size);
    meta.seed = Some(args.seed);
    meta.pool_path = Some(pool_path.display().to_string());
    meta.notes = inputs.notes;
    meta.notes.push("pool sampled from embeddable entities only".to_string());
    if args.radius > pool.len() {
        meta.notes.push(format!(
            "radius {} exceeds pool size {}; scored over the whole pool",
            args.radius,
            pool.len()
        ));
    }

    let mut report = MetricReport::new(Task::Coherence, meta, vec!["score"]);
    for (concept, outcome) in
        coherence_batch(&inputs.table, &slice, &pool, &concepts, args.radius, match_mode)
    {
        report.rows.push(match outcome {
            Ok(score) => ReportRow::new(concept).with("score", score),
            Err(e) => ReportRow::new(concept).with_error(e.to_string()),
        });
    }
    report.summary.insert("pool_size".into(), json!(pool.len()));
    write_report(report, &args.output)
}

pub fn semantic_error(args: SemanticErrorArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let slice = load_kg(&args.kg, inputs.prefix_map.as_ref())?;
    let concepts = parse_id_list(&args.concepts, inputs.prefix_map.as_ref())?;
    let method: SimilarityMethod = args.method.parse()?;

    let matrix = pairwise_error_matrix(&inputs.table, &slice, &concepts, method)
        .context("computing the semantic error matrix")?;

    let mut meta = inputs.meta_base;
    meta.kg_source = Some(args.kg.display().to_string());
    meta.similarity_method = Some(method);
    meta.notes = inputs.notes;
    meta.notes
        .push("cosine is not rescaled; errors range over [0, 2]".to_string());

    let columns: Vec<&str> = concepts.iter().map(String::as_str).collect();
    let mut report = MetricReport::new(Task::SemanticError, meta, columns);
    for (i, concept) in concepts.iter().enumerate() {
        let mut row = ReportRow::new(concept.clone());
        for (j, other) in concepts.iter().enumerate() {
            row.values.insert(
                other.clone(),
                match matrix.values[i][j] {
                    Some(v) => json!(v),
                    None => serde_json::Value::Null,
                },
            );
        }
        report.rows.push(row);
    }
    report.summary.insert("mean".into(), json!(matrix.mean));
    report.summary.insert("max".into(), json!(matrix.max));
    if !matrix.skipped.is_empty() {
        report.summary.insert(
            "skipped_pairs".into(),
            json!(matrix
                .skipped
                .iter()
                .map(|s| json!({ "a": s.a, "b": s.b, "reason": s.reason }))
                .collect::<Vec<_>>()),
        );
    }
    write_report(report, &args.output)
}

pub fn relatedness(args: RelatednessArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let mut inventory = JudgeInventory::load_tsv(&args.judgments)
        .with_context(|| format!("loading judgments from {}", args.judgments.display()))?;
    if let Some(map) = &inputs.prefix_map {
        for row in &mut inventory.rows {
            row.concept_a = map.expand(&row.concept_a);
            row.concept_b = map.expand(&row.concept_b);
        }
    }
    let corr: CorrelationKind = args.corr.parse()?;

    let result = relatedness_correlation(&inputs.table, &inventory, corr)
        .context("computing the relatedness correlation")?;

    let mut meta = inputs.meta_base;
    meta.correlation = Some(corr);
    meta.notes = inputs.notes;

    let mut report =
        MetricReport::new(Task::Relatedness, meta, vec!["correlation", "n_used", "n_dropped"]);
    report.rows.push(
        ReportRow::new("all_pairs")
            .with("correlation", result.correlation)
            .with("n_used", result.n_used)
            .with("n_dropped", result.dropped.len()),
    );
    if !result.dropped.is_empty() {
        report.summary.insert(
            "dropped_pairs".into(),
            json!(result
                .dropped
                .iter()
                .map(|s| json!({ "a": s.a, "b": s.b, "reason": s.reason }))
                .collect::<Vec<_>>()),
        );
    }
    report.summary.insert("scale".into(), json!([inventory.scale.0, inventory.scale.1]));
    write_report(report, &args.output)
}

pub fn transition(args: TransitionArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let slice = load_kg(&args.kg, inputs.prefix_map.as_ref())?;
    let properties = parse_id_list(&args.properties, inputs.prefix_map.as_ref())?;

    let batch = transition_table(&inputs.table, &slice, &properties);

    let mut meta = inputs.meta_base;
    meta.kg_source = Some(args.kg.display().to_string());
    meta.notes = inputs.notes;

    let mut report = MetricReport::new(
        Task::Transition,
        meta,
        vec!["domain", "range", "score", "domain_equals_range"],
    );
    let errors: std::collections::HashMap<&str, &str> =
        batch.errors.iter().map(|(p, e)| (p.as_str(), e.as_str())).collect();
    for property in &properties {
        if let Some(reason) = errors.get(property.as_str()) {
            report.rows.push(ReportRow::new(property.clone()).with_error(*reason));
            continue;
        }
        for row in batch.rows.iter().filter(|r| &r.property == property) {
            report.rows.push(
                ReportRow::new(property.clone())
                    .with("domain", row.domain.clone())
                    .with("range", row.range.clone())
                    .with("score", row.score)
                    .with("domain_equals_range", row.domain_equals_range),
            );
        }
    }
    write_report(report, &args.output)
}

pub fn project(args: ProjectArgs) -> Result<()> {
    let inputs = load_inputs(&args.embedding)?;
    let ids = parse_id_list(&args.ids, inputs.prefix_map.as_ref())?;
    let mut items = Vec::with_capacity(ids.len());
    for id in &ids {
        let v = inputs
            .table
            .vector(id)
            .with_context(|| format!("identifier `{id}` has no embedding"))?;
        items.push((id.clone(), v.to_vec()));
    }
    let method: ProjectionMethod = args.method.parse()?;
    let projection = match method {
        ProjectionMethod::Pca => pca_2d(&items)?,
        ProjectionMethod::Tsne => tsne_2d(
            &items,
            &TsneOptions {
                perplexity: args.perplexity,
                iterations: args.iterations,
                seed: args.seed,
            },
        )?,
    };
    let labels: HashMap<String, String> = match &args.groups {
        Some(path) => read_groups(path)?,
        None => HashMap::new(),
    };
    let svg_path = args.out.with_extension("svg");
    export_scatter(&projection, &labels, &args.out, &svg_path)?;
    println!("wrote {} and {}", args.out.display(), svg_path.display());
    Ok(())
}

fn read_groups(path: &Path) -> Result<HashMap<String, String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading groups {}", path.display()))?;
    let mut out = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (id, group) = line
            .split_once('\t')
            .with_context(|| format!("{}:{}: expected `id TAB group`", path.display(), idx + 1))?;
        out.insert(id.to_string(), group.to_string());
    }
    Ok(out)
}

pub fn fixture_generate(args: FixtureGenerateArgs) -> Result<()> {
    let spec = fixtures::FixtureSpec::load_json(&args.spec)
        .with_context(|| format!("loading fixture spec {}", args.spec.display()))?;
    let fixture = fixtures::generate(&spec)?;
    let paths = fixture.write_to_dir(&args.out)?;
    println!("wrote {}", paths.embeddings_text.display());
    println!("wrote {}", paths.embeddings_binary.display());
    println!("wrote {}", paths.typing_tsv.display());
    if let Some(p) = &paths.schema_tsv {
        println!("wrote {}", p.display());
    }
    println!("wrote {}", paths.subclass_nt.display());
    println!("wrote {}", paths.answer_key.display());
    println!("wrote {}", paths.spec_json.display());
    Ok(())
}

/// `report.json` -> `report.pool.tsv` in the same directory.
fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "report".into());
    out.with_file_name(format!("{stem}.{suffix}"))
}
