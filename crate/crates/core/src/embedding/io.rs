//! Readers and writers for embedding file formats.
//!
//! Supported formats:
//! - word2vec text: header line `<count> <dim>`, then `<token> <f1> ... <fd>`
//!   with single-space separators.
//! - word2vec binary: ASCII header `<count> <dim>\n`, then per record the token
//!   bytes terminated by one 0x20, `dim` little-endian IEEE-754 f32 values, and
//!   an optional trailing 0x0A.
//! - GloVe text: headerless `<token> <floats>` lines; dimension inferred from
//!   the first row.
//! - TSV: tab-separated, identifier first; identifiers may contain spaces.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};

use super::{EmbeddingTable, SourceMeta};

/// Identifier prefix expansions (`prefix TAB expansion` lines), so that
/// `dbo:City` and the full IRI written out by another source unify.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PrefixMap {
    pairs: Vec<(String, String)>,
}

impl PrefixMap {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.splitn(2, '\t');
            let prefix = fields.next().unwrap_or_default();
            let expansion = fields.next().ok_or_else(|| {
                Error::parse(path, i + 1, "expected `prefix TAB expansion`")
            })?;
            if prefix.is_empty() {
                return Err(Error::parse(path, i + 1, "empty prefix"));
            }
            pairs.push((prefix.to_string(), expansion.to_string()));
        }
        Ok(PrefixMap { pairs })
    }

    pub fn from_pairs(pairs: Vec<(String, String)>) -> Self {
        PrefixMap { pairs }
    }

    /// Expand `prefix:rest` into `<expansion><rest>`; other identifiers pass
    /// through unchanged.
    pub fn expand(&self, id: &str) -> String {
        for (prefix, expansion) in &self.pairs {
            if let Some(rest) = id.strip_prefix(prefix) {
                if let Some(local) = rest.strip_prefix(':') {
                    return format!("{expansion}{local}");
                }
            }
        }
        id.to_string()
    }
}

/// Options shared by every embedding loader.
#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    /// Lowercase identifiers on load. Off by default so knowledge-graph IRIs
    /// keep their case; turn on for tables built from a lowercased corpus.
    pub lowercase: bool,
    pub prefix_map: Option<PrefixMap>,
}

impl LoadOptions {
    fn apply(&self, raw: &str) -> String {
        let id = if self.lowercase { raw.to_lowercase() } else { raw.to_string() };
        match &self.prefix_map {
            Some(map) => map.expand(&id),
            None => id,
        }
    }

    fn meta(&self, format: &str, path: &Path) -> SourceMeta {
        SourceMeta {
            format: Some(format.to_string()),
            path: Some(path.display().to_string()),
            composition: None,
            lowercased: self.lowercase,
            prefix_map: None,
        }
    }
}

fn parse_component(path: &Path, line_no: usize, field: &str) -> Result<f64> {
    let value: f64 = field
        .parse()
        .map_err(|_| Error::parse(path, line_no, format!("invalid float `{field}`")))?;
    if !value.is_finite() {
        return Err(Error::parse(path, line_no, format!("non-finite value `{field}`")));
    }
    Ok(value)
}

fn insert_row(
    table: &mut EmbeddingTable,
    path: &Path,
    line_no: usize,
    id: String,
    vector: Vec<f64>,
) -> Result<()> {
    if id.is_empty() {
        return Err(Error::parse(path, line_no, "empty identifier"));
    }
    if table.contains(&id) {
        return Err(Error::Duplicate { path: path.to_path_buf(), line: line_no, id });
    }
    table.insert(id, vector)
}

/// Load a word2vec text file (`<count> <dim>` header).
pub fn load_word2vec_text(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();

    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::format(path, "empty file"))?;
    let fields: Vec<&str> = header.trim_end_matches('\r').split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) => (c, d),
            _ => return Err(Error::parse(path, 1, format!("malformed header `{header}`"))),
        },
        _ => return Err(Error::parse(path, 1, format!("malformed header `{header}`"))),
    };
    if dim == 0 {
        return Err(Error::parse(path, 1, "dimension must be at least 1"));
    }

    let mut table = EmbeddingTable::new(dim)?;
    for (idx, line) in lines {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        if table.len() == count {
            return Err(Error::parse(
                path,
                line_no,
                format!("more rows than the declared {count} entries"),
            ));
        }
        let fields: Vec<&str> = line.split(' ').collect();
        if fields.len() != dim + 1 {
            return Err(Error::parse(
                path,
                line_no,
                format!("row arity {} does not match declared dim {dim}", fields.len() - 1),
            ));
        }
        let mut vector = Vec::with_capacity(dim);
        for field in &fields[1..] {
            vector.push(parse_component(path, line_no, field)?);
        }
        insert_row(&mut table, path, line_no, opts.apply(fields[0]), vector)?;
    }
    if table.len() != count {
        return Err(Error::format(
            path,
            format!("declared {count} entries, found {}", table.len()),
        ));
    }
    table.set_source_meta(opts.meta("word2vec-text", path));
    Ok(table)
}

/// Load a word2vec binary file. Float recovery is bit-exact: each stored f32 is
/// widened to f64 unchanged.
pub fn load_word2vec_binary(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.is_empty() {
        return Err(Error::format(path, "empty file"));
    }

    let header_end = bytes
        .iter()
        .position(|&b| b == 0x0A)
        .ok_or_else(|| Error::format(path, "missing header line"))?;
    let header = std::str::from_utf8(&bytes[..header_end])
        .map_err(|_| Error::format(path, "header is not ASCII"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (count, dim) = match fields.as_slice() {
        [c, d] => match (c.parse::<usize>(), d.parse::<usize>()) {
            (Ok(c), Ok(d)) => (c, d),
            _ => return Err(Error::format(path, format!("malformed header `{header}`"))),
        },
        _ => return Err(Error::format(path, format!("malformed header `{header}`"))),
    };
    if dim == 0 {
        return Err(Error::format(path, "dimension must be at least 1"));
    }

    let mut table = EmbeddingTable::new(dim)?;
    let mut pos = header_end + 1;
    for record in 0..count {
        let token_start = pos;
        while pos < bytes.len() && bytes[pos] != 0x20 {
            pos += 1;
        }
        if pos >= bytes.len() {
            let partial = String::from_utf8_lossy(&bytes[token_start..]).into_owned();
            return Err(Error::Truncated { path: path.to_path_buf(), token: partial });
        }
        let token = std::str::from_utf8(&bytes[token_start..pos])
            .map_err(|_| Error::format(path, format!("invalid UTF-8 token in record {}", record + 1)))?
            .to_string();
        if token.is_empty() {
            return Err(Error::format(path, format!("empty token in record {}", record + 1)));
        }
        pos += 1; // the 0x20 terminator

        let need = dim * 4;
        if bytes.len() - pos < need {
            return Err(Error::Truncated { path: path.to_path_buf(), token });
        }
        let mut vector = Vec::with_capacity(dim);
        for i in 0..dim {
            let at = pos + i * 4;
            let raw: [u8; 4] = bytes[at..at + 4].try_into().unwrap();
            let value = f32::from_le_bytes(raw) as f64;
            if !value.is_finite() {
                return Err(Error::format(path, format!("non-finite value for `{token}`")));
            }
            vector.push(value);
        }
        pos += need;
        if pos < bytes.len() && bytes[pos] == 0x0A {
            pos += 1;
        }
        insert_row(&mut table, path, record + 1, opts.apply(&token), vector)?;
    }
    if pos != bytes.len() {
        return Err(Error::format(path, "trailing data after the last record"));
    }
    table.set_source_meta(opts.meta("word2vec-binary", path));
    Ok(table)
}

fn load_delimited(
    path: &Path,
    opts: &LoadOptions,
    delim: char,
    format: &str,
) -> Result<EmbeddingTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut table: Option<EmbeddingTable> = None;
    let mut any = false;
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim_end_matches('\r');
        any = true;
        let fields: Vec<&str> = line.split(delim).collect();
        if fields.len() < 2 {
            return Err(Error::parse(path, line_no, "expected an identifier and at least one value"));
        }
        let dim = fields.len() - 1;
        if table.is_none() {
            table = Some(EmbeddingTable::new(dim)?);
        }
        let table = table.as_mut().expect("just initialized");
        if dim != table.dimension() {
            return Err(Error::parse(
                path,
                line_no,
                format!("row arity {dim} does not match inferred dim {}", table.dimension()),
            ));
        }
        let mut vector = Vec::with_capacity(dim);
        for field in &fields[1..] {
            vector.push(parse_component(path, line_no, field)?);
        }
        insert_row(table, path, line_no, opts.apply(fields[0]), vector)?;
    }
    if !any {
        return Err(Error::format(path, "empty file"));
    }
    let mut table = table.expect("at least one row parsed");
    table.set_source_meta(opts.meta(format, path));
    Ok(table)
}

/// Load a headerless GloVe text file (space-separated).
pub fn load_glove_text(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<EmbeddingTable> {
    load_delimited(path.as_ref(), opts, ' ', "glove-text")
}

/// Load a tab-separated table, identifier first. Identifiers may contain spaces.
pub fn load_tsv(path: impl AsRef<Path>, opts: &LoadOptions) -> Result<EmbeddingTable> {
    load_delimited(path.as_ref(), opts, '\t', "tsv")
}

fn check_writable_token(path: &Path, id: &str, forbidden: &[char]) -> Result<()> {
    if id.chars().any(|c| forbidden.contains(&c)) {
        return Err(Error::format(
            path,
            format!("identifier `{id}` contains a separator character and cannot be written"),
        ));
    }
    Ok(())
}

/// Write a table in word2vec text format at full round-trip f64 precision.
pub fn write_word2vec_text(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{} {}", table.len(), table.dimension()).map_err(io_err)?;
    for (id, vector) in table.iter() {
        check_writable_token(path, id, &[' ', '\n', '\r'])?;
        write!(w, "{id}").map_err(io_err)?;
        for x in vector {
            write!(w, " {x}").map_err(io_err)?;
        }
        writeln!(w).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Write a table in word2vec binary format. Values are narrowed to f32; tables
/// loaded from a word2vec binary file round-trip bit-exactly.
pub fn write_word2vec_binary(table: &EmbeddingTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e| Error::io(path, e);
    writeln!(w, "{} {}", table.len(), table.dimension()).map_err(io_err)?;
    for (id, vector) in table.iter() {
        check_writable_token(path, id, &[' ', '\n', '\r'])?;
        w.write_all(id.as_bytes()).map_err(io_err)?;
        w.write_all(&[0x20]).map_err(io_err)?;
        for x in vector {
            w.write_all(&(*x as f32).to_le_bytes()).map_err(io_err)?;
        }
        w.write_all(&[0x0A]).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}
