//! Deterministic 2-D projections of embedding vectors and plot-ready export.

mod pca;
mod tsne;

pub use pca::pca_2d;
pub use tsne::{tsne_2d, TsneOptions};

use std::collections::BTreeSet;
use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectionMethod {
    Pca,
    Tsne,
}

impl std::str::FromStr for ProjectionMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pca" => Ok(ProjectionMethod::Pca),
            "tsne" | "t-sne" => Ok(ProjectionMethod::Tsne),
            other => Err(Error::InvalidInput(format!(
                "unknown projection method `{other}` (expected pca or tsne)"
            ))),
        }
    }
}

impl std::fmt::Display for ProjectionMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProjectionMethod::Pca => write!(f, "pca"),
            ProjectionMethod::Tsne => write!(f, "tsne"),
        }
    }
}

/// KL divergence recorded at a gradient-descent checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KlCheckpoint {
    pub iteration: usize,
    pub kl: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ProjectionParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perplexity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iterations: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub kl_checkpoints: Vec<KlCheckpoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedPoint {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

/// Per-identifier 2-D coordinates plus the method and parameters that
/// produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Projection2D {
    pub rows: Vec<ProjectedPoint>,
    pub method: ProjectionMethod,
    pub params: ProjectionParams,
}

const PALETTE: [&str; 10] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
    "#bcbd22", "#17becf",
];

fn group_of<'a>(labels: &'a HashMap<String, String>, id: &str) -> &'a str {
    labels.get(id).map(String::as_str).unwrap_or("ungrouped")
}

/// Write a projection as TSV (`id TAB group TAB x TAB y`, header comments
/// carrying method/params/seed) plus a self-contained SVG scatter with one
/// color per group and a legend.
///
/// Each projection is normalized to its own bounding box in the SVG; scales
/// are not unified across exports.
pub fn export_scatter(
    proj: &Projection2D,
    labels: &HashMap<String, String>,
    tsv_path: impl AsRef<Path>,
    svg_path: impl AsRef<Path>,
) -> Result<()> {
    write_scatter_tsv(proj, labels, tsv_path.as_ref())?;
    write_scatter_svg(proj, labels, svg_path.as_ref())
}

fn write_scatter_tsv(
    proj: &Projection2D,
    labels: &HashMap<String, String>,
    path: &Path,
) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "# method: {}", proj.method).map_err(io_err)?;
    if let Some(p) = proj.params.perplexity {
        writeln!(w, "# perplexity: {p}").map_err(io_err)?;
    }
    if let Some(i) = proj.params.iterations {
        writeln!(w, "# iterations: {i}").map_err(io_err)?;
    }
    if let Some(s) = proj.params.seed {
        writeln!(w, "# seed: {s}").map_err(io_err)?;
    }
    for c in &proj.params.kl_checkpoints {
        writeln!(w, "# kl[{}]: {}", c.iteration, c.kl).map_err(io_err)?;
    }
    for row in &proj.rows {
        writeln!(w, "{}\t{}\t{}\t{}", row.id, group_of(labels, &row.id), row.x, row.y)
            .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Parse a scatter TSV back into a projection and its group labels.
pub fn read_scatter_tsv(path: impl AsRef<Path>) -> Result<(Projection2D, HashMap<String, String>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut method = ProjectionMethod::Pca;
    let mut params = ProjectionParams::default();
    let mut rows = Vec::new();
    let mut labels = HashMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("method:") {
                method = v.trim().parse()?;
            } else if let Some(v) = rest.strip_prefix("perplexity:") {
                params.perplexity = v.trim().parse().ok();
            } else if let Some(v) = rest.strip_prefix("iterations:") {
                params.iterations = v.trim().parse().ok();
            } else if let Some(v) = rest.strip_prefix("seed:") {
                params.seed = v.trim().parse().ok();
            } else if let Some(v) = rest.strip_prefix("kl[") {
                if let Some((iter_s, kl_s)) = v.split_once("]:") {
                    if let (Ok(iteration), Ok(kl)) =
                        (iter_s.trim().parse(), kl_s.trim().parse())
                    {
                        params.kl_checkpoints.push(KlCheckpoint { iteration, kl });
                    }
                }
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        match fields.as_slice() {
            [id, group, x, y] => {
                let x: f64 = x
                    .parse()
                    .map_err(|_| Error::parse(path, idx + 1, format!("invalid x `{x}`")))?;
                let y: f64 = y
                    .parse()
                    .map_err(|_| Error::parse(path, idx + 1, format!("invalid y `{y}`")))?;
                rows.push(ProjectedPoint { id: id.to_string(), x, y });
                labels.insert(id.to_string(), group.to_string());
            }
            _ => return Err(Error::parse(path, idx + 1, "expected `id TAB group TAB x TAB y`")),
        }
    }
    Ok((Projection2D { rows, method, params }, labels))
}

fn write_scatter_svg(
    proj: &Projection2D,
    labels: &HashMap<String, String>,
    path: &Path,
) -> Result<()> {
    const WIDTH: f64 = 640.0;
    const HEIGHT: f64 = 480.0;
    const MARGIN: f64 = 40.0;

    let groups: BTreeSet<&str> =
        proj.rows.iter().map(|r| group_of(labels, &r.id)).collect();
    let color_of: HashMap<&str, &str> = groups
        .iter()
        .enumerate()
        .map(|(i, g)| (*g, PALETTE[i % PALETTE.len()]))
        .collect();

    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for r in &proj.rows {
        min_x = min_x.min(r.x);
        max_x = max_x.max(r.x);
        min_y = min_y.min(r.y);
        max_y = max_y.max(r.y);
    }
    let span_x = if max_x > min_x { max_x - min_x } else { 1.0 };
    let span_y = if max_y > min_y { max_y - min_y } else { 1.0 };
    let sx = |x: f64| MARGIN + (x - min_x) / span_x * (WIDTH - 2.0 * MARGIN);
    // SVG y grows downward
    let sy = |y: f64| HEIGHT - MARGIN - (y - min_y) / span_y * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    svg.push_str(&format!(
        "  <rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\" \
         stroke=\"#cccccc\"/>\n"
    ));
    svg.push_str(&format!(
        "  <!-- method: {}; points: {} -->\n",
        proj.method,
        proj.rows.len()
    ));
    for r in &proj.rows {
        let g = group_of(labels, &r.id);
        svg.push_str(&format!(
            "  <circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\" fill=\"{}\" fill-opacity=\"0.8\">\
             <title>{}</title></circle>\n",
            sx(r.x),
            sy(r.y),
            color_of[g],
            xml_escape(&r.id),
        ));
    }
    for (i, g) in groups.iter().enumerate() {
        let ly = MARGIN / 2.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "  <g class=\"legend-entry\"><rect x=\"{x}\" y=\"{y}\" width=\"10\" height=\"10\" \
             fill=\"{color}\"/><text x=\"{tx}\" y=\"{ty}\" font-size=\"11\" \
             font-family=\"sans-serif\">{label}</text></g>\n",
            x = WIDTH - 150.0,
            y = ly,
            color = color_of[g],
            tx = WIDTH - 135.0,
            ty = ly + 9.0,
            label = xml_escape(g),
        ));
    }
    svg.push_str("</svg>\n");
    fs::write(path, svg).map_err(|e| Error::io(path, e))
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn demo_projection() -> (Projection2D, HashMap<String, String>) {
        let rows = vec![
            ProjectedPoint { id: "a1".into(), x: 0.0, y: 0.5 },
            ProjectedPoint { id: "a2".into(), x: 0.1, y: 0.4 },
            ProjectedPoint { id: "b1".into(), x: 5.0, y: -1.0 },
            ProjectedPoint { id: "c1".into(), x: -3.0, y: 2.0 },
        ];
        let mut labels = HashMap::new();
        labels.insert("a1".into(), "alpha".into());
        labels.insert("a2".into(), "alpha".into());
        labels.insert("b1".into(), "beta".into());
        labels.insert("c1".into(), "gamma".into());
        let proj = Projection2D {
            rows,
            method: ProjectionMethod::Tsne,
            params: ProjectionParams {
                perplexity: Some(2.5),
                iterations: Some(100),
                seed: Some(7),
                kl_checkpoints: vec![KlCheckpoint { iteration: 100, kl: 0.25 }],
            },
        };
        (proj, labels)
    }

    #[test]
    fn tsv_round_trip_and_svg_legend() {
        let (proj, labels) = demo_projection();
        let dir = tempfile::tempdir().unwrap();
        let tsv = dir.path().join("scatter.tsv");
        let svg = dir.path().join("scatter.svg");
        export_scatter(&proj, &labels, &tsv, &svg).unwrap();

        let text = fs::read_to_string(&tsv).unwrap();
        assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), proj.rows.len());

        let (back, back_labels) = read_scatter_tsv(&tsv).unwrap();
        assert_eq!(back, proj);
        assert_eq!(back_labels, labels);

        let svg_text = fs::read_to_string(&svg).unwrap();
        assert_eq!(svg_text.matches("legend-entry").count(), 3);
        assert!(svg_text.starts_with("<svg"));
    }

    #[test]
    fn missing_labels_fall_back_to_ungrouped() {
        let (proj, _) = demo_projection();
        let dir = tempfile::tempdir().unwrap();
        let tsv = dir.path().join("scatter.tsv");
        let svg = dir.path().join("scatter.svg");
        export_scatter(&proj, &HashMap::new(), &tsv, &svg).unwrap();
        let (_, labels) = read_scatter_tsv(&tsv).unwrap();
        assert!(labels.values().all(|g| g == "ungrouped"));
        let svg_text = fs::read_to_string(&svg).unwrap();
        assert_eq!(svg_text.matches("legend-entry").count(), 1);
    }
}
