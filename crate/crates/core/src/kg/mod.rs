//! Knowledge-graph slice: typing assertions, class hierarchy, property schema.
//!
//! A [`KnowledgeSlice`] is built through [`KnowledgeSliceBuilder`] (directly or
//! via the file readers) and is immutable after `finalize`, which checks that
//! the subclass graph is acyclic and precomputes concept depths. Structural
//! queries (path distance, lowest common ancestor, entity retrieval) use
//! per-call scratch space, so shared references are safe across threads.

mod ntriples;

pub use ntriples::NtMode;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fs;
use std::path::Path;

use indexmap::{IndexMap, IndexSet};
use serde::{Deserialize, Serialize};

use crate::embedding::PrefixMap;
use crate::error::{Error, Result};

/// Whether entity retrieval follows the subclass hierarchy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TypingMode {
    /// Entities carrying the concept itself in their typing set.
    Direct,
    /// Entities typed by the concept or any of its descendants.
    Transitive,
}

impl std::str::FromStr for TypingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(TypingMode::Direct),
            "transitive" => Ok(TypingMode::Transitive),
            other => Err(Error::InvalidInput(format!(
                "unknown typing mode `{other}` (expected direct or transitive)"
            ))),
        }
    }
}

impl std::fmt::Display for TypingMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TypingMode::Direct => write!(f, "direct"),
            TypingMode::Transitive => write!(f, "transitive"),
        }
    }
}

/// A concept together with its depth in the hierarchy (roots have depth 1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HierarchyPosition {
    pub concept: String,
    pub depth: usize,
}

/// Domain/range declarations for one property. DBpedia-style schemas may
/// declare several of each; metrics evaluate the Cartesian product.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PropertySchema {
    pub domains: Vec<String>,
    pub ranges: Vec<String>,
}

/// Counts of input lines that were recognized but not ingested.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct IngestStats {
    /// Triples whose object was a literal (datatype assertions are skipped).
    pub literal_objects_skipped: usize,
    /// Triples with a predicate outside the requested mode.
    pub other_predicates_ignored: usize,
    /// Triples actually stored.
    pub triples_ingested: usize,
}

/// Immutable view of a knowledge-graph slice.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeSlice {
    concepts: IndexSet<String>,
    entities: IndexSet<String>,
    properties: IndexSet<String>,
    typing: IndexMap<String, IndexSet<String>>,
    parents: IndexMap<String, IndexSet<String>>,
    children: IndexMap<String, IndexSet<String>>,
    schema: IndexMap<String, PropertySchema>,
    depth: HashMap<String, usize>,
    /// concept -> sorted entities carrying it directly
    direct_entities: HashMap<String, Vec<String>>,
    stats: IngestStats,
}

impl KnowledgeSlice {
    pub fn builder() -> KnowledgeSliceBuilder {
        KnowledgeSliceBuilder::default()
    }

    pub fn concepts(&self) -> impl Iterator<Item = &str> {
        self.concepts.iter().map(String::as_str)
    }

    pub fn entities(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(String::as_str)
    }

    pub fn properties(&self) -> impl Iterator<Item = &str> {
        self.properties.iter().map(String::as_str)
    }

    pub fn contains_concept(&self, c: &str) -> bool {
        self.concepts.contains(c)
    }

    pub fn n_concepts(&self) -> usize {
        self.concepts.len()
    }

    pub fn n_entities(&self) -> usize {
        self.entities.len()
    }

    pub fn stats(&self) -> IngestStats {
        self.stats
    }

    /// Direct typing set of an entity, if the entity carries any typing assertion.
    pub fn types_of(&self, entity: &str) -> Option<&IndexSet<String>> {
        self.typing.get(entity)
    }

    /// Direct parents of a concept in the subclass graph.
    pub fn parents_of(&self, concept: &str) -> Result<Vec<&str>> {
        self.require_concept(concept)?;
        Ok(self
            .parents
            .get(concept)
            .map(|s| s.iter().map(String::as_str).collect())
            .unwrap_or_default())
    }

    /// Domain/range declarations of a property.
    pub fn schema_of(&self, property: &str) -> Option<&PropertySchema> {
        self.schema.get(property)
    }

    /// Concepts with no parents.
    pub fn roots(&self) -> Vec<&str> {
        self.concepts
            .iter()
            .filter(|c| self.parents.get(*c).is_none_or(|p| p.is_empty()))
            .map(String::as_str)
            .collect()
    }

    fn require_concept(&self, c: &str) -> Result<()> {
        if self.contains_concept(c) {
            Ok(())
        } else {
            Err(Error::UnknownIdentifier(c.to_string()))
        }
    }

    /// Depth of a concept: roots are at depth 1, every other concept is one
    /// deeper than its shallowest parent.
    pub fn depth(&self, concept: &str) -> Result<usize> {
        self.require_concept(concept)?;
        Ok(self.depth[concept])
    }

    pub fn position(&self, concept: &str) -> Result<HierarchyPosition> {
        Ok(HierarchyPosition { concept: concept.to_string(), depth: self.depth(concept)? })
    }

    /// Length of the shortest undirected path between two concepts in the
    /// subclass graph. Disconnected pairs are an error, not infinity.
    pub fn path_distance(&self, a: &str, b: &str) -> Result<usize> {
        self.require_concept(a)?;
        self.require_concept(b)?;
        if a == b {
            return Ok(0);
        }
        let mut seen: HashSet<&str> = HashSet::new();
        let mut queue: VecDeque<(&str, usize)> = VecDeque::new();
        seen.insert(a);
        queue.push_back((a, 0));
        while let Some((node, d)) = queue.pop_front() {
            for next in self.undirected_neighbors(node) {
                if next == b {
                    return Ok(d + 1);
                }
                if seen.insert(next) {
                    queue.push_back((next, d + 1));
                }
            }
        }
        Err(Error::Disconnected(a.to_string(), b.to_string()))
    }

    fn undirected_neighbors<'a>(&'a self, node: &str) -> impl Iterator<Item = &'a str> {
        let up = self.parents.get(node).into_iter().flatten();
        let down = self.children.get(node).into_iter().flatten();
        up.chain(down).map(String::as_str)
    }

    /// All ancestors of a concept, including the concept itself.
    pub fn ancestors(&self, concept: &str) -> Result<HashSet<String>> {
        self.require_concept(concept)?;
        let mut out = HashSet::new();
        let mut queue = VecDeque::new();
        out.insert(concept.to_string());
        queue.push_back(concept.to_string());
        while let Some(node) = queue.pop_front() {
            for parent in self.parents.get(&node).into_iter().flatten() {
                if out.insert(parent.clone()) {
                    queue.push_back(parent.clone());
                }
            }
        }
        Ok(out)
    }

    /// All descendants of a concept, including the concept itself.
    pub fn descendants(&self, concept: &str) -> Result<HashSet<String>> {
        self.require_concept(concept)?;
        let mut out = HashSet::new();
        let mut queue = VecDeque::new();
        out.insert(concept.to_string());
        queue.push_back(concept.to_string());
        while let Some(node) = queue.pop_front() {
            for child in self.children.get(&node).into_iter().flatten() {
                if out.insert(child.clone()) {
                    queue.push_back(child.clone());
                }
            }
        }
        Ok(out)
    }

    /// Common ancestor of maximum depth; ties broken by lexicographically
    /// smallest identifier.
    pub fn lowest_common_ancestor(&self, a: &str, b: &str) -> Result<String> {
        let anc_a = self.ancestors(a)?;
        let anc_b = self.ancestors(b)?;
        let mut best: Option<(usize, &str)> = None;
        for c in anc_a.intersection(&anc_b) {
            let d = self.depth[c.as_str()];
            best = match best {
                None => Some((d, c)),
                Some((bd, bc)) => {
                    if d > bd || (d == bd && c.as_str() < bc) {
                        Some((d, c))
                    } else {
                        Some((bd, bc))
                    }
                }
            };
        }
        match best {
            Some((_, c)) => Ok(c.to_string()),
            None => Err(Error::NoCommonAncestor(a.to_string(), b.to_string())),
        }
    }

    /// Entities typed by a concept, sorted ascending for determinism.
    pub fn entities_of(&self, concept: &str, mode: TypingMode) -> Result<Vec<String>> {
        self.require_concept(concept)?;
        match mode {
            TypingMode::Direct => {
                Ok(self.direct_entities.get(concept).cloned().unwrap_or_default())
            }
            TypingMode::Transitive => {
                let mut out: Vec<String> = Vec::new();
                for c in self.descendants(concept)? {
                    if let Some(es) = self.direct_entities.get(&c) {
                        out.extend(es.iter().cloned());
                    }
                }
                out.sort();
                out.dedup();
                Ok(out)
            }
        }
    }
}

/// Accumulates assertions before validation.
#[derive(Debug, Default)]
pub struct KnowledgeSliceBuilder {
    slice: KnowledgeSlice,
}

impl KnowledgeSliceBuilder {
    fn touch_concept(&mut self, c: &str) {
        if !self.slice.concepts.contains(c) {
            self.slice.concepts.insert(c.to_string());
        }
    }

    pub fn add_typing(&mut self, entity: &str, concept: &str) -> &mut Self {
        self.touch_concept(concept);
        if !self.slice.entities.contains(entity) {
            self.slice.entities.insert(entity.to_string());
        }
        self.slice
            .typing
            .entry(entity.to_string())
            .or_default()
            .insert(concept.to_string());
        self.slice.stats.triples_ingested += 1;
        self
    }

    pub fn add_subclass(&mut self, child: &str, parent: &str) -> &mut Self {
        self.touch_concept(child);
        self.touch_concept(parent);
        self.slice
            .parents
            .entry(child.to_string())
            .or_default()
            .insert(parent.to_string());
        self.slice
            .children
            .entry(parent.to_string())
            .or_default()
            .insert(child.to_string());
        self.slice.stats.triples_ingested += 1;
        self
    }

    pub fn add_domain(&mut self, property: &str, domain: &str) -> &mut Self {
        self.touch_concept(domain);
        if !self.slice.properties.contains(property) {
            self.slice.properties.insert(property.to_string());
        }
        let entry = self.slice.schema.entry(property.to_string()).or_default();
        if !entry.domains.iter().any(|d| d == domain) {
            entry.domains.push(domain.to_string());
        }
        self.slice.stats.triples_ingested += 1;
        self
    }

    pub fn add_range(&mut self, property: &str, range: &str) -> &mut Self {
        self.touch_concept(range);
        if !self.slice.properties.contains(property) {
            self.slice.properties.insert(property.to_string());
        }
        let entry = self.slice.schema.entry(property.to_string()).or_default();
        if !entry.ranges.iter().any(|r| r == range) {
            entry.ranges.push(range.to_string());
        }
        self.slice.stats.triples_ingested += 1;
        self
    }

    pub fn add_schema(&mut self, property: &str, domain: &str, range: &str) -> &mut Self {
        self.add_domain(property, domain);
        self.add_range(property, range);
        self.slice.stats.triples_ingested -= 1; // one schema row, not two triples
        self
    }

    /// Ingest an N-Triples file; see [`NtMode`] for predicate filtering.
    pub fn read_ntriples(
        &mut self,
        path: impl AsRef<Path>,
        mode: NtMode,
        prefix_map: Option<&PrefixMap>,
    ) -> Result<&mut Self> {
        ntriples::read_into(self, path.as_ref(), mode, prefix_map)?;
        Ok(self)
    }

    /// Ingest `entity TAB concept` lines.
    pub fn read_typing_tsv(
        &mut self,
        path: impl AsRef<Path>,
        prefix_map: Option<&PrefixMap>,
    ) -> Result<&mut Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [entity, concept] if !entity.is_empty() && !concept.is_empty() => {
                    self.add_typing(&expand(prefix_map, entity), &expand(prefix_map, concept));
                }
                _ => {
                    return Err(Error::parse(path, idx + 1, "expected `entity TAB concept`"));
                }
            }
        }
        Ok(self)
    }

    /// Ingest `property TAB domain TAB range` lines.
    pub fn read_schema_tsv(
        &mut self,
        path: impl AsRef<Path>,
        prefix_map: Option<&PrefixMap>,
    ) -> Result<&mut Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            match fields.as_slice() {
                [p, d, r] if !p.is_empty() && !d.is_empty() && !r.is_empty() => {
                    self.add_schema(
                        &expand(prefix_map, p),
                        &expand(prefix_map, d),
                        &expand(prefix_map, r),
                    );
                }
                _ => {
                    return Err(Error::parse(
                        path,
                        idx + 1,
                        "expected `property TAB domain TAB range`",
                    ));
                }
            }
        }
        Ok(self)
    }

    pub(crate) fn count_literal_skipped(&mut self) {
        self.slice.stats.literal_objects_skipped += 1;
    }

    pub(crate) fn count_other_ignored(&mut self) {
        self.slice.stats.other_predicates_ignored += 1;
    }

    /// Validate (acyclic subclass graph) and precompute depths and the
    /// concept-to-entities index.
    pub fn finalize(self) -> Result<KnowledgeSlice> {
        let mut slice = self.slice;
        check_acyclic(&slice)?;
        slice.depth = compute_depths(&slice);

        let mut direct: HashMap<String, Vec<String>> = HashMap::new();
        for (entity, concepts) in &slice.typing {
            for c in concepts {
                direct.entry(c.clone()).or_default().push(entity.clone());
            }
        }
        for list in direct.values_mut() {
            list.sort();
            list.dedup();
        }
        slice.direct_entities = direct;
        Ok(slice)
    }
}

fn expand(prefix_map: Option<&PrefixMap>, id: &str) -> String {
    match prefix_map {
        Some(m) => m.expand(id),
        None => id.to_string(),
    }
}

/// DFS three-color cycle check over parent edges.
fn check_acyclic(slice: &KnowledgeSlice) -> Result<()> {
    #[derive(Clone, Copy, PartialEq)]
    enum State {
        Visiting,
        Done,
    }
    let mut state: HashMap<&str, State> = HashMap::new();
    for start in &slice.concepts {
        if state.contains_key(start.as_str()) {
            continue;
        }
        // stack of (node, next parent index)
        let mut stack: Vec<(&str, Vec<&str>, usize)> = Vec::new();
        state.insert(start.as_str(), State::Visiting);
        stack.push((start.as_str(), parent_list(slice, start), 0));
        while let Some((node, parents, idx)) = stack.last_mut() {
            let node = *node;
            if *idx < parents.len() {
                let next = parents[*idx];
                *idx += 1;
                match state.get(next) {
                    Some(State::Visiting) => {
                        return Err(Error::CyclicHierarchy(next.to_string(), node.to_string()));
                    }
                    Some(State::Done) => {}
                    None => {
                        state.insert(next, State::Visiting);
                        let next_parents = parent_list(slice, next);
                        stack.push((next, next_parents, 0));
                    }
                }
            } else {
                state.insert(node, State::Done);
                stack.pop();
            }
        }
    }
    Ok(())
}

fn parent_list<'a>(slice: &'a KnowledgeSlice, node: &str) -> Vec<&'a str> {
    slice
        .parents
        .get(node)
        .map(|s| s.iter().map(String::as_str).collect())
        .unwrap_or_default()
}

/// Multi-source BFS from the roots; depth is the minimum over parents plus one.
fn compute_depths(slice: &KnowledgeSlice) -> HashMap<String, usize> {
    let mut depth: HashMap<String, usize> = HashMap::new();
    let mut queue: VecDeque<&str> = VecDeque::new();
    for c in &slice.concepts {
        if slice.parents.get(c.as_str()).is_none_or(|p| p.is_empty()) {
            depth.insert(c.clone(), 1);
            queue.push_back(c.as_str());
        }
    }
    while let Some(node) = queue.pop_front() {
        let d = depth[node];
        for child in slice.children.get(node).into_iter().flatten() {
            if !depth.contains_key(child.as_str()) {
                depth.insert(child.clone(), d + 1);
                queue.push_back(child.as_str());
            }
        }
    }
    depth
}

/// Load a knowledge-graph slice from a path.
///
/// A file is dispatched on extension: `.nt`/`.ntriples` as N-Triples (all
/// predicates), `.tsv` as typing TSV. A directory is read as a fixture layout:
/// any of `typing.tsv`, `schema.tsv`, and `subclass.nt` that are present.
pub fn load_kg_path(path: impl AsRef<Path>, prefix_map: Option<&PrefixMap>) -> Result<KnowledgeSlice> {
    let path = path.as_ref();
    let mut builder = KnowledgeSlice::builder();
    if path.is_dir() {
        let typing = path.join("typing.tsv");
        let schema = path.join("schema.tsv");
        let subclass = path.join("subclass.nt");
        let mut any = false;
        if typing.is_file() {
            builder.read_typing_tsv(&typing, prefix_map)?;
            any = true;
        }
        if schema.is_file() {
            builder.read_schema_tsv(&schema, prefix_map)?;
            any = true;
        }
        if subclass.is_file() {
            builder.read_ntriples(&subclass, NtMode::All, prefix_map)?;
            any = true;
        }
        if !any {
            return Err(Error::format(
                path,
                "no typing.tsv, schema.tsv, or subclass.nt found in directory",
            ));
        }
    } else {
        match path.extension().and_then(|e| e.to_str()) {
            Some("nt") | Some("ntriples") => {
                builder.read_ntriples(path, NtMode::All, prefix_map)?;
            }
            Some("tsv") => {
                builder.read_typing_tsv(path, prefix_map)?;
            }
            _ => {
                return Err(Error::format(
                    path,
                    "unrecognized knowledge-graph input (expected .nt, .tsv, or a directory)",
                ));
            }
        }
    }
    builder.finalize()
}
