//! Finite semigeneric digraphs: loopless directed graphs in which
//! non-adjacency is an equivalence relation (the "columns") and every
//! pair of non-adjacent pairs spans an even number of forward edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = u32;

/// Relation between two distinct vertices.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Rel {
    Forward,
    Backward,
    Perp,
}

impl Rel {
    pub fn reverse(self) -> Rel {
        match self {
            Rel::Forward => Rel::Backward,
            Rel::Backward => Rel::Forward,
            Rel::Perp => Rel::Perp,
        }
    }
}

/// Raw input form: a vertex list plus directed edges. Non-adjacency is
/// implied by the absence of both `[u, v]` and `[v, u]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(Vertex, Vertex)>,
}

/// Why a raw digraph failed validation.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("self loop on vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("opposite edge pair between {0} and {1}")]
    OppositeEdgePair(Vertex, Vertex),
    #[error("edge endpoint {0} is not a listed vertex")]
    UnknownVertex(Vertex),
    #[error("perp not transitive: witness ({0}, {1}, {2})")]
    PerpNotTransitive(Vertex, Vertex, Vertex),
    #[error("parity violated on ({0}, {1}) vs ({2}, {3})")]
    Parity(Vertex, Vertex, Vertex, Vertex),
}

/// Errors from operations on an already valid graph.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum GraphOpError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("vertex {0} is not in the stated column")]
    VertexNotInColumn(Vertex),
    #[error("the two columns must be distinct")]
    ColumnsNotDistinct,
    #[error("column index {0} out of range")]
    NoSuchColumn(usize),
}

/// A validated member of the class: loopless, perp transitive, parity even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SemiDigraph {
    vertices: BTreeSet<Vertex>,
    edges: BTreeSet<(Vertex, Vertex)>,
}

impl SemiDigraph {
    pub fn empty() -> SemiDigraph {
        SemiDigraph {
            vertices: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }

    /// Validate raw data. Malformed input (loops, duplicates, opposite
    /// pairs, unknown endpoints) is reported before the class checks;
    /// class violations report the lexicographically first witness.
    pub fn validate(raw: &RawGraph) -> Result<SemiDigraph, Violation> {
        let vertices: BTreeSet<Vertex> = raw.vertices.iter().copied().collect();
        let mut edges = BTreeSet::new();
        for &(u, v) in &raw.edges {
            if u == v {
                return Err(Violation::SelfLoop(u));
            }
            if !vertices.contains(&u) {
                return Err(Violation::UnknownVertex(u));
            }
            if !vertices.contains(&v) {
                return Err(Violation::UnknownVertex(v));
            }
            if edges.contains(&(u, v)) {
                return Err(Violation::DuplicateEdge(u, v));
            }
            if edges.contains(&(v, u)) {
                return Err(Violation::OppositeEdgePair(v, u));
            }
            edges.insert((u, v));
        }
        let g = SemiDigraph { vertices, edges };
        g.check_class()?;
        Ok(g)
    }

    /// Class checks on an already well-formed edge set.
    pub(crate) fn check_class(&self) -> Result<(), Violation> {
        let vs: Vec<Vertex> = self.vertices.iter().copied().collect();
        // perp transitivity, lexicographically first (x, y, z)
        for &x in &vs {
            for &y in &vs {
                if y == x || !self.perp(x, y) {
                    continue;
                }
                for &z in &vs {
                    if z == x || z == y {
                        continue;
                    }
                    if self.perp(y, z) && !self.perp(x, z) {
                        return Err(Violation::PerpNotTransitive(x, y, z));
                    }
                }
            }
        }
        // parity: for each perp pair (x1, x2), the bit
        // (x1 -> y) xor (x2 -> y) must be constant on every other column
        for (a, &x1) in vs.iter().enumerate() {
            for &x2 in &vs[a + 1..] {
                if !self.perp(x1, x2) {
                    continue;
                }
                if self.parity_constant(x1, x2, &vs) {
                    continue;
                }
                // lexicographically first (y1, y2) witness for this pair
                for (b, &y1) in vs.iter().enumerate() {
                    if y1 == x1 || y1 == x2 || self.perp(y1, x1) {
                        continue;
                    }
                    for &y2 in &vs[b + 1..] {
                        if y2 == x1 || y2 == x2 || !self.perp(y1, y2) {
                            continue;
                        }
                        let d1 = self.forward(x1, y1) ^ self.forward(x2, y1);
                        let d2 = self.forward(x1, y2) ^ self.forward(x2, y2);
                        if d1 != d2 {
                            return Err(Violation::Parity(x1, x2, y1, y2));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// True when, per column, (x1 -> y) xor (x2 -> y) does not vary.
    fn parity_constant(&self, x1: Vertex, x2: Vertex, vs: &[Vertex]) -> bool {
        let mut seen: BTreeMap<Vertex, bool> = BTreeMap::new();
        for &y in vs {
            if y == x1 || y == x2 || self.perp(y, x1) {
                continue;
            }
            let d = self.forward(x1, y) ^ self.forward(x2, y);
            // key the column by its representative under perp
            let rep = self.column_rep(y, vs);
            match seen.get(&rep) {
                Some(&prev) if prev != d => return false,
                Some(_) => {}
                None => {
                    seen.insert(rep, d);
                }
            }
        }
        true
    }

    fn column_rep(&self, v: Vertex, vs: &[Vertex]) -> Vertex {
        for &w in vs {
            if w == v || self.perp(w, v) {
                return w;
            }
        }
        v
    }

    pub fn vertices(&self) -> &BTreeSet<Vertex> {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn edges(&self) -> &BTreeSet<(Vertex, Vertex)> {
        &self.edges
    }

    /// True iff the directed edge u -> v is present.
    pub fn forward(&self, u: Vertex, v: Vertex) -> bool {
        self.edges.contains(&(u, v))
    }

    pub fn perp(&self, u: Vertex, v: Vertex) -> bool {
        u == v || (!self.forward(u, v) && !self.forward(v, u))
    }

    pub fn rel(&self, u: Vertex, v: Vertex) -> Rel {
        debug_assert!(u != v && self.contains(u) && self.contains(v));
        if self.forward(u, v) {
            Rel::Forward
        } else if self.forward(v, u) {
            Rel::Backward
        } else {
            Rel::Perp
        }
    }

    /// Induced substructure on `set`. Heredity keeps it valid.
    pub fn induced(&self, set: &BTreeSet<Vertex>) -> Result<SemiDigraph, GraphOpError> {
        for &v in set {
            if !self.contains(v) {
                return Err(GraphOpError::UnknownVertex(v));
            }
        }
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&(u, v)| set.contains(&u) && set.contains(&v))
            .collect();
        Ok(SemiDigraph {
            vertices: set.clone(),
            edges,
        })
    }

    /// Build from parts without re-checking; callers must validate the
    /// result before handing it out.
    pub(crate) fn from_parts_untrusted(
        vertices: BTreeSet<Vertex>,
        edges: BTreeSet<(Vertex, Vertex)>,
    ) -> SemiDigraph {
        SemiDigraph { vertices, edges }
    }

    /// Build from parts, re-checking the class conditions. Used by
    /// constructions that should only ever produce members; the error
    /// case indicates a bug in the caller.
    pub(crate) fn try_from_parts(
        vertices: BTreeSet<Vertex>,
        edges: BTreeSet<(Vertex, Vertex)>,
    ) -> Result<SemiDigraph, Violation> {
        let g = SemiDigraph { vertices, edges };
        g.check_class()?;
        Ok(g)
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self.vertices.iter().copied().collect(),
            edges: self.edges.iter().copied().collect(),
        }
    }

    pub fn next_free_id(&self) -> Vertex {
        self.vertices.iter().next_back().map_or(0, |&m| m + 1)
    }

    /// DOT export; same-column vertices share a cluster.
    pub fn to_dot(&self) -> String {
        let view = ColumnView::new(self);
        let mut out = String::from("digraph semigen {\n");
        for (i, col) in view.columns().iter().enumerate() {
            out.push_str(&format!("  subgraph cluster_{i} {{\n    label=\"column {i}\";\n"));
            for v in col {
                out.push_str(&format!("    v{v};\n"));
            }
            out.push_str("  }\n");
        }
        for &(u, v) in &self.edges {
            out.push_str(&format!("  v{u} -> v{v};\n"));
        }
        out.push_str("}\n");
        out
    }
}

/// The perp-partition of a graph together with every pairwise split:
/// for columns P != Q, the partition of P into at most two classes of
/// vertices pointing the same way at all of Q.
#[derive(Clone, Debug)]
pub struct ColumnView {
    columns: Vec<Vec<Vertex>>,
    col_of: BTreeMap<Vertex, usize>,
    splits: BTreeMap<(usize, usize), Vec<Vec<Vertex>>>,
}

impl ColumnView {
    pub fn new(g: &SemiDigraph) -> ColumnView {
        let mut columns: Vec<Vec<Vertex>> = Vec::new();
        let mut col_of = BTreeMap::new();
        for &v in g.vertices() {
            // vertices come in ascending order, so the first member of a
            // column is its minimum and columns end up ordered by min id
            match columns
                .iter()
                .position(|c: &Vec<Vertex>| g.perp(c[0], v))
            {
                Some(i) => {
                    col_of.insert(v, i);
                    columns[i].push(v);
                }
                None => {
                    col_of.insert(v, columns.len());
                    columns.push(vec![v]);
                }
            }
        }
        let mut splits = BTreeMap::new();
        for p in 0..columns.len() {
            for q in 0..columns.len() {
                if p == q {
                    continue;
                }
                let mut cells: Vec<Vec<Vertex>> = Vec::new();
                for &x in &columns[p] {
                    // signature of x against the first vertex of each cell
                    match cells.iter().position(|cell| {
                        columns[q]
                            .iter()
                            .all(|&y| g.forward(x, y) == g.forward(cell[0], y))
                    }) {
                        Some(i) => cells[i].push(x),
                        None => cells.push(vec![x]),
                    }
                }
                splits.insert((p, q), cells);
            }
        }
        ColumnView {
            columns,
            col_of,
            splits,
        }
    }

    pub fn columns(&self) -> &[Vec<Vertex>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn col_of(&self, v: Vertex) -> Option<usize> {
        self.col_of.get(&v).copied()
    }

    /// Cells of the split of column `p` against column `q` (1 or 2).
    pub fn split(&self, p: usize, q: usize) -> &[Vec<Vertex>] {
        &self.splits[&(p, q)]
    }

    /// x ~ x' against column q: identical edge directions into q.
    pub fn same_class(&self, q: usize, x: Vertex, x2: Vertex) -> bool {
        let p = self.col_of[&x];
        debug_assert_eq!(p, self.col_of[&x2]);
        self.splits[&(p, q)]
            .iter()
            .any(|cell| cell.contains(&x) && cell.contains(&x2))
    }
}

/// Returns the pair (forall side, exists side) of the display that the
/// parity condition makes equivalent on the generic structure:
/// `(forall y in Q: x -> y iff x' -> y, exists y in Q: x -> y and x' -> y)`.
pub fn exists_forall_check(
    g: &SemiDigraph,
    view: &ColumnView,
    p: usize,
    q: usize,
    x: Vertex,
    x2: Vertex,
) -> Result<(bool, bool), GraphOpError> {
    if p == q {
        return Err(GraphOpError::ColumnsNotDistinct);
    }
    let cols = view.columns();
    if p >= cols.len() {
        return Err(GraphOpError::NoSuchColumn(p));
    }
    if q >= cols.len() {
        return Err(GraphOpError::NoSuchColumn(q));
    }
    if view.col_of(x) != Some(p) {
        return Err(GraphOpError::VertexNotInColumn(x));
    }
    if view.col_of(x2) != Some(p) {
        return Err(GraphOpError::VertexNotInColumn(x2));
    }
    let forall = cols[q].iter().all(|&y| g.forward(x, y) == g.forward(x2, y));
    let exists = cols[q].iter().any(|&y| g.forward(x, y) && g.forward(x2, y));
    Ok((forall, exists))
}

/// True iff `pairs` is an injective map preserving the relation in both
/// directions between vertices of `g`.
pub fn is_partial_iso(g: &SemiDigraph, pairs: &[(Vertex, Vertex)]) -> bool {
    let dom: BTreeSet<Vertex> = pairs.iter().map(|&(a, _)| a).collect();
    let rng: BTreeSet<Vertex> = pairs.iter().map(|&(_, b)| b).collect();
    if dom.len() != pairs.len() || rng.len() != pairs.len() {
        return false;
    }
    if !dom.iter().chain(rng.iter()).all(|&v| g.contains(v)) {
        return false;
    }
    for (i, &(a, fa)) in pairs.iter().enumerate() {
        for &(b, fb) in &pairs[i + 1..] {
            if g.rel(a, b) != g.rel(fa, fb) {
                return false;
            }
        }
    }
    true
}
