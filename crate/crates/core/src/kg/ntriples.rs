//! Line-oriented N-Triples subset reader.
//!
//! Each line is `<s> <p> <o> .` with IRIs in angle brackets. Lines whose object
//! is a literal are skipped (and counted); comment and blank lines are skipped.
//! Multi-line literals, blank nodes, and the rest of RDF 1.1 are out of scope.

use std::fs;
use std::path::Path;

use crate::embedding::PrefixMap;
use crate::error::{Error, Result};

use super::KnowledgeSliceBuilder;

/// Which predicates an N-Triples read ingests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NtMode {
    Typing,
    Subclass,
    Schema,
    All,
}

const RDF_TYPE: &str = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";
const RDFS_SUBCLASS: &str = "http://www.w3.org/2000/01/rdf-schema#subClassOf";
const RDFS_DOMAIN: &str = "http://www.w3.org/2000/01/rdf-schema#domain";
const RDFS_RANGE: &str = "http://www.w3.org/2000/01/rdf-schema#range";

fn is_type(p: &str) -> bool {
    p == RDF_TYPE || p == "rdf:type"
}

fn is_subclass(p: &str) -> bool {
    p == RDFS_SUBCLASS || p == "rdfs:subClassOf"
}

fn is_domain(p: &str) -> bool {
    p == RDFS_DOMAIN || p == "rdfs:domain"
}

fn is_range(p: &str) -> bool {
    p == RDFS_RANGE || p == "rdfs:range"
}

enum Line {
    Skip,
    LiteralObject,
    Triple { subject: String, predicate: String, object: String },
}

pub(super) fn read_into(
    builder: &mut KnowledgeSliceBuilder,
    path: &Path,
    mode: NtMode,
    prefix_map: Option<&PrefixMap>,
) -> Result<()> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let expand = |id: &str| match prefix_map {
        Some(m) => m.expand(id),
        None => id.to_string(),
    };
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        match parse_line(raw).map_err(|msg| Error::parse(path, line_no, msg))? {
            Line::Skip => {}
            Line::LiteralObject => builder.count_literal_skipped(),
            Line::Triple { subject, predicate, object } => {
                let p = predicate.as_str();
                let wanted = match mode {
                    NtMode::Typing => is_type(p),
                    NtMode::Subclass => is_subclass(p),
                    NtMode::Schema => is_domain(p) || is_range(p),
                    NtMode::All => is_type(p) || is_subclass(p) || is_domain(p) || is_range(p),
                };
                if !wanted {
                    builder.count_other_ignored();
                } else if is_type(p) {
                    builder.add_typing(&expand(&subject), &expand(&object));
                } else if is_subclass(p) {
                    builder.add_subclass(&expand(&subject), &expand(&object));
                } else if is_domain(p) {
                    builder.add_domain(&expand(&subject), &expand(&object));
                } else {
                    builder.add_range(&expand(&subject), &expand(&object));
                }
            }
        }
    }
    Ok(())
}

fn parse_line(raw: &str) -> std::result::Result<Line, String> {
    let line = raw.trim();
    if line.is_empty() || line.starts_with('#') {
        return Ok(Line::Skip);
    }
    let mut cursor = Cursor { bytes: line.as_bytes(), pos: 0 };

    let subject = cursor.iri()?;
    cursor.whitespace()?;
    let predicate = cursor.iri()?;
    cursor.whitespace()?;

    let literal = match cursor.peek() {
        Some(b'<') => {
            let object = cursor.iri()?;
            cursor.finish()?;
            return Ok(Line::Triple { subject, predicate, object });
        }
        Some(b'"') => {
            cursor.literal()?;
            cursor.finish()?;
            true
        }
        Some(b'_') => return Err("blank nodes are not supported".to_string()),
        _ => return Err("expected an IRI or literal object".to_string()),
    };
    debug_assert!(literal);
    Ok(Line::LiteralObject)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn iri(&mut self) -> std::result::Result<String, String> {
        if self.peek() != Some(b'<') {
            return Err("expected `<`".to_string());
        }
        let start = self.pos + 1;
        let mut end = start;
        while end < self.bytes.len() && self.bytes[end] != b'>' {
            end += 1;
        }
        if end == self.bytes.len() {
            return Err("unterminated IRI".to_string());
        }
        if end == start {
            return Err("empty IRI".to_string());
        }
        self.pos = end + 1;
        std::str::from_utf8(&self.bytes[start..end])
            .map(|s| s.to_string())
            .map_err(|_| "invalid UTF-8 in IRI".to_string())
    }

    fn literal(&mut self) -> std::result::Result<(), String> {
        debug_assert_eq!(self.peek(), Some(b'"'));
        self.pos += 1;
        let mut escaped = false;
        loop {
            match self.peek() {
                None => return Err("unterminated literal".to_string()),
                Some(b'\\') if !escaped => escaped = true,
                Some(b'"') if !escaped => {
                    self.pos += 1;
                    break;
                }
                Some(_) => escaped = false,
            }
            self.pos += 1;
        }
        // optional @lang or ^^<datatype>
        match self.peek() {
            Some(b'@') => {
                while let Some(c) = self.peek() {
                    if c == b' ' || c == b'\t' {
                        break;
                    }
                    self.pos += 1;
                }
            }
            Some(b'^') => {
                self.pos += 1;
                if self.peek() != Some(b'^') {
                    return Err("malformed datatype suffix".to_string());
                }
                self.pos += 1;
                self.iri()?;
            }
            _ => {}
        }
        Ok(())
    }

    fn whitespace(&mut self) -> std::result::Result<(), String> {
        let before = self.pos;
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
        if self.pos == before {
            return Err("expected whitespace".to_string());
        }
        Ok(())
    }

    /// Consume optional whitespace, the terminating `.`, and trailing whitespace.
    fn finish(&mut self) -> std::result::Result<(), String> {
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
        if self.peek() != Some(b'.') {
            return Err("missing terminating `.`".to_string());
        }
        self.pos += 1;
        while matches!(self.peek(), Some(b' ') | Some(b'\t')) {
            self.pos += 1;
        }
        if self.pos != self.bytes.len() {
            return Err("unexpected content after `.`".to_string());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kg::{KnowledgeSlice, TypingMode};
    use std::io::Write;

    fn load(content: &str, mode: NtMode) -> crate::error::Result<KnowledgeSlice> {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        let mut b = KnowledgeSlice::builder();
        b.read_ntriples(f.path(), mode, None)?;
        b.finalize()
    }

    #[test]
    fn typed_triples_populate_typing() {
        let s = load("<dbr:Berlin> <rdf:type> <dbo:City> .\n", NtMode::All).unwrap();
        assert_eq!(s.entities_of("dbo:City", TypingMode::Direct).unwrap(), vec!["dbr:Berlin"]);
    }

    #[test]
    fn subclass_and_schema_triples() {
        let content = "\
<dbo:City> <rdfs:subClassOf> <dbo:Place> .
<dbo:capital> <rdfs:domain> <dbo:PopulatedPlace> .
<dbo:capital> <rdfs:range> <dbo:City> .
";
        let s = load(content, NtMode::All).unwrap();
        assert_eq!(s.depth("dbo:Place").unwrap(), 1);
        assert_eq!(s.depth("dbo:City").unwrap(), 2);
        let schema = s.schema_of("dbo:capital").unwrap();
        assert_eq!(schema.domains, vec!["dbo:PopulatedPlace"]);
        assert_eq!(schema.ranges, vec!["dbo:City"]);
    }

    #[test]
    fn full_iri_predicates_recognized() {
        let content = "<e> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <C> .\n";
        let s = load(content, NtMode::Typing).unwrap();
        assert_eq!(s.entities_of("C", TypingMode::Direct).unwrap(), vec!["e"]);
    }

    #[test]
    fn literal_objects_skipped_and_counted() {
        let content = "\
<e> <rdf:type> <C> .
<e> <rdfs:label> \"Berlin\"@de .
<e> <dbo:population> \"3500000\"^^<http://www.w3.org/2001/XMLSchema#integer> .
";
        let s = load(content, NtMode::All).unwrap();
        assert_eq!(s.stats().literal_objects_skipped, 2);
        assert_eq!(s.stats().triples_ingested, 1);
    }

    #[test]
    fn other_predicates_counted() {
        let content = "<a> <dbo:mayor> <b> .\n<e> <rdf:type> <C> .\n";
        let s = load(content, NtMode::All).unwrap();
        assert_eq!(s.stats().other_predicates_ignored, 1);
    }

    #[test]
    fn mode_filters_predicates() {
        let content = "<e> <rdf:type> <C> .\n<C> <rdfs:subClassOf> <D> .\n";
        let s = load(content, NtMode::Subclass).unwrap();
        assert_eq!(s.stats().triples_ingested, 1);
        assert_eq!(s.stats().other_predicates_ignored, 1);
        assert!(s.types_of("e").is_none());
    }

    #[test]
    fn malformed_lines_carry_line_numbers() {
        for bad in [
            "<a> <b> <c>\n",            // no dot
            "<a> <b .\n",               // unterminated IRI
            "<a> <b> _:x .\n",          // blank node
            "just words\n",             // not a triple
            "<a> <b> \"open literal .\n", // unterminated literal
        ] {
            let content = format!("<e> <rdf:type> <C> .\n{bad}");
            match load(&content, NtMode::All).unwrap_err() {
                Error::Parse { line, .. } => assert_eq!(line, 2, "{bad:?}"),
                other => panic!("unexpected error {other:?} for {bad:?}"),
            }
        }
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let content = "# a comment\n\n<e> <rdf:type> <C> .\n";
        let s = load(content, NtMode::All).unwrap();
        assert_eq!(s.n_entities(), 1);
    }

    #[test]
    fn cycle_error_names_concepts() {
        let content = "<A> <rdfs:subClassOf> <B> .\n<B> <rdfs:subClassOf> <A> .\n";
        match load(content, NtMode::All).unwrap_err() {
            Error::CyclicHierarchy(x, y) => {
                assert!(["A", "B"].contains(&x.as_str()) && ["A", "B"].contains(&y.as_str()));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }
}
