//! Constructive extension machinery: realizing prescribed edge patterns
//! with new vertices, cloning a vertex inside its column, disjoint
//! copies, saturated generic approximations, and one-point extension of
//! partial isomorphisms.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{is_partial_iso, SemiDigraph, Vertex, Violation};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExtError {
    #[error("invalid demand: {0}")]
    InvalidDemand(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("construction produced an invalid structure: {0}")]
    Internal(Violation),
}

/// Column a new vertex should land in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnTarget {
    /// the column of this existing vertex
    Existing(Vertex),
    Fresh,
}

/// A batch of points to realize: k anchored existing vertices in
/// pairwise distinct columns, n-k target columns, and prescribed edge
/// bits eps[(i, j)] (positions 0-based, i < j, j >= k) meaning
/// "point i points at point j".
#[derive(Clone, Debug)]
pub struct ExtensionDemand {
    pub base: SemiDigraph,
    pub anchored: Vec<Vertex>,
    pub targets: Vec<ColumnTarget>,
    pub eps: BTreeMap<(usize, usize), bool>,
}

impl ExtensionDemand {
    fn check(&self) -> Result<(), ExtError> {
        let g = &self.base;
        let k = self.anchored.len();
        let n = k + self.targets.len();
        for &y in &self.anchored {
            if !g.contains(y) {
                return Err(ExtError::UnknownVertex(y));
            }
        }
        for t in &self.targets {
            if let ColumnTarget::Existing(v) = *t {
                if !g.contains(v) {
                    return Err(ExtError::UnknownVertex(v));
                }
            }
        }
        // pairwise distinct columns across anchors and targets
        let mut reps: Vec<Option<Vertex>> = Vec::new();
        for &y in &self.anchored {
            reps.push(Some(y));
        }
        for t in &self.targets {
            reps.push(match *t {
                ColumnTarget::Existing(v) => Some(v),
                ColumnTarget::Fresh => None,
            });
        }
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                if let (Some(a), Some(b)) = (reps[i], reps[j]) {
                    if g.perp(a, b) {
                        return Err(ExtError::InvalidDemand(format!(
                            "positions {i} and {j} share a column"
                        )));
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1).max(k)..n {
                if !self.eps.contains_key(&(i, j)) {
                    return Err(ExtError::InvalidDemand(format!(
                        "missing eps bit for pair ({i}, {j})"
                    )));
                }
            }
        }
        for &(i, j) in self.eps.keys() {
            if i >= j || j < k || j >= n {
                return Err(ExtError::InvalidDemand(format!(
                    "eps bit ({i}, {j}) out of range"
                )));
            }
        }
        Ok(())
    }
}

/// Realize the demand: new vertices are added to the prescribed columns
/// (or fresh singleton columns) so that every eps bit holds exactly.
///
/// Each new vertex with a pre-populated target column copies a resident
/// companion column-by-column, flipping whole columns where a
/// prescribed edge disagrees with the companion's; flipped copies keep
/// all even counts even. Fresh-column vertices are unconstrained and
/// take incoming edges from everything not prescribed.
pub fn lemma1_extend(d: &ExtensionDemand) -> Result<(SemiDigraph, Vec<Vertex>), ExtError> {
    d.check()?;
    let g = &d.base;
    let k = d.anchored.len();
    let n = k + d.targets.len();
    let first_id = g.next_free_id();
    let new_ids: Vec<Vertex> = (0..d.targets.len()).map(|t| first_id + t as Vertex).collect();
    let point = |i: usize| -> Vertex {
        if i < k {
            d.anchored[i]
        } else {
            new_ids[i - k]
        }
    };
    // companion: the minimal resident of an existing target column
    let companion: Vec<Option<Vertex>> = d
        .targets
        .iter()
        .map(|t| match *t {
        ColumnTarget::Existing(v) => g
                .vertices()
                .iter()
                .copied()
                .find(|&w| g.perp(w, v)),
            ColumnTarget::Fresh => None,
        })
        .collect();
    let eps = |i: usize, j: usize| d.eps[&(i, j)];
    // forward(i points at j) among the n demand points
    let point_edge = |i: usize, j: usize| -> bool {
        debug_assert!(i < j);
        if j < k {
            g.forward(point(i), point(j))
        } else {
            eps(i, j)
        }
    };

    let mut edges = g.edges().clone();
    let mut vertices = g.vertices().clone();
    vertices.extend(new_ids.iter().copied());
    let mut add = |a: Vertex, b: Vertex, a_to_b: bool| {
        if a_to_b {
            edges.insert((a, b));
        } else {
            edges.insert((b, a));
        }
    };

    // edges among new points
    for i in k..n {
        for j in i + 1..n {
            add(point(i), point(j), point_edge(i, j));
        }
    }
    for j in k..n {
        let z = point(j);
        // anchored points
        for i in 0..k {
            add(point(i), z, point_edge(i, j));
        }
        // companions of the other targets: treat the companion of an
        // earlier point like that point; give later points' companions
        // the direction their own point receives
        for i in k..n {
            if i == j {
                continue;
            }
            if let Some(ci) = companion[i - k] {
                let cj = companion[j - k];
                let dir_z_to_ci = if i < j {
                    // c_i -> z copies c_i -> c_j
                    match cj {
                        Some(cj) => !g.forward(ci, cj) && g.forward(cj, ci),
                        // fresh column for z: unconstrained, default in-edge
                        None => false,
                    }
                } else {
                    // z -> c_i copies z -> z_i
                    point_edge(j, i)
                };
                add(z, ci, dir_z_to_ci);
            }
        }
        // remaining existing vertices, column by column
        let comp = companion[j - k];
        let special: BTreeSet<Vertex> = (0..n)
            .map(point)
            .chain(companion.iter().flatten().copied())
            .collect();
        for &w in g.vertices() {
            if special.contains(&w) {
                continue;
            }
            if let Some(c) = comp {
                if g.perp(w, c) {
                    continue; // z's own column
                }
                // flip of w's column: fixed by the special vertex there, if any
                let mut flip = false;
                for i in 0..n {
                    let anchor = if i < k {
                        point(i)
                    } else {
                        match companion[i - k] {
                            Some(ci) => ci,
                            None => continue,
                        }
                    };
                    if i != j && g.perp(anchor, w) {
                        let z_to_anchor = if i < k {
                            point_edge(i.min(j), i.max(j)) == (i > j)
                        } else if i < j {
                            // z -> c_i copies c_j -> c_i (rule above)
                            g.forward(c, anchor)
                        } else {
                            point_edge(j, i)
                        };
                        flip = z_to_anchor != g.forward(c, anchor);
                        break;
                    }
                }
                add(z, w, g.forward(c, w) != flip);
            } else {
                // fresh singleton column: no constraints, default in-edge
                add(z, w, false);
            }
        }
    }

    let out = SemiDigraph::try_from_parts(vertices, edges).map_err(ExtError::Internal)?;
    Ok((out, new_ids))
}

/// Add `count` exact clones of `a` inside its column. For every u in
/// `others` outside a's column (and in fact for every vertex outside
/// it), each clone points wherever `a` points.
pub fn clone_in_column(
    g: &SemiDigraph,
    a: Vertex,
    others: &[Vertex],
    count: usize,
) -> Result<(SemiDigraph, Vec<Vertex>), ExtError> {
    if !g.contains(a) {
        return Err(ExtError::UnknownVertex(a));
    }
    for &u in others {
        if !g.contains(u) {
            return Err(ExtError::UnknownVertex(u));
        }
    }
    let first_id = g.next_free_id();
    let clones: Vec<Vertex> = (0..count).map(|t| first_id + t as Vertex).collect();
    let mut vertices = g.vertices().clone();
    let mut edges = g.edges().clone();
    for &b in &clones {
        vertices.insert(b);
        for &w in g.vertices() {
            if g.forward(a, w) {
                edges.insert((b, w));
            } else if g.forward(w, a) {
                edges.insert((w, b));
            }
        }
    }
    let out = SemiDigraph::try_from_parts(vertices, edges).map_err(ExtError::Internal)?;
    Ok((out, clones))
}

/// Add a disjoint isomorphic copy of the induced structure on `a_set`,
/// in entirely fresh columns, with every edge between old and new
/// vertices directed old -> new. Returns the copy map.
pub fn disjoint_copy(
    g: &SemiDigraph,
    a_set: &BTreeSet<Vertex>,
) -> Result<(SemiDigraph, BTreeMap<Vertex, Vertex>), ExtError> {
    for &v in a_set {
        if !g.contains(v) {
            return Err(ExtError::UnknownVertex(v));
        }
    }
    let first_id = g.next_free_id();
    let copy_map: BTreeMap<Vertex, Vertex> = a_set
        .iter()
        .enumerate()
        .map(|(t, &v)| (v, first_id + t as Vertex))
        .collect();
    let mut vertices = g.vertices().clone();
    let mut edges = g.edges().clone();
    for (&v, &cv) in &copy_map {
        vertices.insert(cv);
        // internal edges of the copy
        for (&w, &cw) in &copy_map {
            if g.forward(v, w) {
                edges.insert((cv, cw));
            }
        }
        // all old-to-new cross edges
        for &w in g.vertices() {
            edges.insert((w, cv));
        }
    }
    let out = SemiDigraph::try_from_parts(vertices, edges).map_err(ExtError::Internal)?;
    Ok((out, copy_map))
}

/// Add one vertex with a prescribed pattern: perp to the column of
/// `perp_anchor` (or in a fresh singleton column when `None`), and with
/// `rels` giving, per anchor vertex in another column, whether the new
/// vertex points at it. Non-anchored vertices are completed by copying a
/// column resident with per-column flips (or by default incoming edges
/// in the fresh case).
pub fn extend_one_point(
    g: &SemiDigraph,
    perp_anchor: Option<Vertex>,
    rels: &[(Vertex, bool)],
) -> Result<(SemiDigraph, Vertex), ExtError> {
    extend_one_point_inner(g, perp_anchor, rels, true)
}

/// `check = false` skips the O(n^3) defensive re-validation; used by the
/// generic builder, which validates its final output once instead of
/// after each of hundreds of growth steps.
fn extend_one_point_inner(
    g: &SemiDigraph,
    perp_anchor: Option<Vertex>,
    rels: &[(Vertex, bool)],
    check: bool,
) -> Result<(SemiDigraph, Vertex), ExtError> {
    for &(a, _) in rels {
        if !g.contains(a) {
            return Err(ExtError::UnknownVertex(a));
        }
    }
    let z = g.next_free_id();
    let mut vertices = g.vertices().clone();
    vertices.insert(z);
    let mut edges = g.edges().clone();
    let prescribed: BTreeMap<Vertex, bool> = rels.iter().copied().collect();
    if prescribed.len() != rels.len() {
        return Err(ExtError::InvalidDemand("duplicate anchor vertex".into()));
    }
    match perp_anchor {
        None => {
            for &w in g.vertices() {
                match prescribed.get(&w) {
                    Some(&out) if out => edges.insert((z, w)),
                    _ if prescribed.contains_key(&w) => edges.insert((w, z)),
                    _ => edges.insert((w, z)),
                };
            }
        }
        Some(cv) => {
            if !g.contains(cv) {
                return Err(ExtError::UnknownVertex(cv));
            }
            let comp = g
                .vertices()
                .iter()
                .copied()
                .find(|&w| g.perp(w, cv))
                .expect("column has a resident");
            // per-column flips fixed by the anchors; anchors sharing a
            // column must agree
            let mut flips: BTreeMap<Vertex, bool> = BTreeMap::new();
            for (&a, &out) in &prescribed {
                if g.perp(a, cv) {
                    return Err(ExtError::InvalidDemand(format!(
                        "anchor {a} lies in the target column"
                    )));
                }
                let rep = g
                    .vertices()
                    .iter()
                    .copied()
                    .find(|&w| g.perp(w, a))
                    .unwrap();
                let flip = out != g.forward(comp, a);
                match flips.get(&rep) {
                    Some(&f) if f != flip => {
                        return Err(ExtError::InvalidDemand(format!(
                            "anchors in the column of {rep} demand incompatible flips"
                        )));
                    }
                    _ => {
                        flips.insert(rep, flip);
                    }
                }
            }
            for &w in g.vertices() {
                if g.perp(w, cv) {
                    continue; // same column as z
                }
                let dir = match prescribed.get(&w) {
                    Some(&out) => out,
                    None => {
                        let rep = g
                            .vertices()
                            .iter()
                            .copied()
                            .find(|&v| g.perp(v, w))
                            .unwrap();
                        g.forward(comp, w) != flips.get(&rep).copied().unwrap_or(false)
                    }
                };
                if dir {
                    edges.insert((z, w));
                } else {
                    edges.insert((w, z));
                }
            }
        }
    }
    let out = if check {
        SemiDigraph::try_from_parts(vertices, edges).map_err(ExtError::Internal)?
    } else {
        SemiDigraph::from_parts_untrusted(vertices, edges)
    };
    Ok((out, z))
}

/// A finite relation-preserving injection between vertex sets of one
/// graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PartialIso {
    pairs: BTreeMap<Vertex, Vertex>,
}

impl PartialIso {
    pub fn new() -> PartialIso {
        PartialIso::default()
    }

    pub fn from_pairs(g: &SemiDigraph, pairs: &[(Vertex, Vertex)]) -> Option<PartialIso> {
        if is_partial_iso(g, pairs) {
            Some(PartialIso {
                pairs: pairs.iter().copied().collect(),
            })
        } else {
            None
        }
    }

    pub fn pairs(&self) -> Vec<(Vertex, Vertex)> {
        self.pairs.iter().map(|(&a, &b)| (a, b)).collect()
    }

    pub fn domain(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.pairs.keys().copied()
    }

    pub fn image(&self, v: Vertex) -> Option<Vertex> {
        self.pairs.get(&v).copied()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// One back-and-forth step: extend `f` to cover `x`, reusing an
/// existing vertex realizing the required pattern when possible and
/// growing `g` by one point otherwise.
pub fn extend_iso(
    g: &SemiDigraph,
    f: &PartialIso,
    x: Vertex,
) -> Result<(SemiDigraph, PartialIso), ExtError> {
    if !g.contains(x) {
        return Err(ExtError::UnknownVertex(x));
    }
    if f.image(x).is_some() {
        return Ok((g.clone(), f.clone()));
    }
    let range: BTreeSet<Vertex> = f.pairs.values().copied().collect();
    let matches = |w: Vertex| -> bool {
        !range.contains(&w)
            && f.pairs
                .iter()
                .all(|(&a, &fa)| w != fa && g.rel(x, a) == g.rel(w, fa))
    };
    if let Some(w) = g.vertices().iter().copied().find(|&w| matches(w)) {
        let mut pairs = f.pairs.clone();
        pairs.insert(x, w);
        return Ok((g.clone(), PartialIso { pairs }));
    }
    // grow by one point with the pattern transported along f
    let perp_anchor = f
        .pairs
        .iter()
        .find(|&(&a, _)| g.perp(x, a))
        .map(|(_, &fa)| fa);
    let rels: Vec<(Vertex, bool)> = f
        .pairs
        .iter()
        .filter(|&(&a, _)| !g.perp(x, a))
        .map(|(&a, &fa)| (fa, g.forward(x, a)))
        .collect();
    let (g2, z) = extend_one_point(g, perp_anchor, &rels)?;
    let mut pairs = f.pairs.clone();
    pairs.insert(x, z);
    Ok((g2, PartialIso { pairs }))
}

/// A one-point extension demand over a subset of the initial segment.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandDescriptor {
    pub subset: Vec<Vertex>,
    /// `Some(v)`: the column of v (a subset member); `None`: a fresh column
    pub target: Option<Vertex>,
    /// anchors outside the target column and whether the new point
    /// points at them
    pub pattern: Vec<(Vertex, bool)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SaturationReport {
    pub saturated: bool,
    pub missing_demands: Vec<DemandDescriptor>,
    pub steps_used: usize,
}

const SEGMENT_SIZE: usize = 10;

/// Grow a generic approximation from the empty structure: realize every
/// admissible one-point extension demand over subsets (of size at most
/// `max_demand_size`) of the initial segment, spending at most `steps`
/// growth operations.
pub fn build_generic(
    steps: usize,
    max_demand_size: usize,
    seed: u64,
) -> (SemiDigraph, SaturationReport) {
    build_generic_over(SemiDigraph::empty(), steps, max_demand_size, SEGMENT_SIZE, seed)
}

pub fn build_generic_over(
    start: SemiDigraph,
    steps: usize,
    max_demand_size: usize,
    segment_size: usize,
    seed: u64,
) -> (SemiDigraph, SaturationReport) {
    let mut g = start;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut used = 0usize;
    let finish = |g: SemiDigraph, report: SaturationReport| {
        debug_assert!(g.check_class().is_ok());
        g.check_class().expect("growth steps preserve validity");
        (g, report)
    };
    loop {
        let mut demands = enumerate_demands(&g, max_demand_size, segment_size);
        demands.shuffle(&mut rng);
        let mut progressed = false;
        for d in &demands {
            if find_witness(&g, d).is_some() {
                continue;
            }
            if used == steps {
                let missing = enumerate_demands(&g, max_demand_size, segment_size)
                    .into_iter()
                    .filter(|d| find_witness(&g, d).is_none())
                    .collect();
                return finish(
                    g,
                    SaturationReport {
                        saturated: false,
                        missing_demands: missing,
                        steps_used: used,
                    },
                );
            }
            g = realize_demand(&g, d).expect("admissible demand realizes");
            used += 1;
            progressed = true;
        }
        if !progressed {
            return finish(
                g,
                SaturationReport {
                    saturated: true,
                    missing_demands: vec![],
                    steps_used: used,
                },
            );
        }
    }
}

/// All admissible demands over subsets of the initial segment, in
/// canonical order (size, subset, target, pattern bits).
pub fn enumerate_demands(
    g: &SemiDigraph,
    max_demand_size: usize,
    segment_size: usize,
) -> Vec<DemandDescriptor> {
    use itertools::Itertools;
    let seg: Vec<Vertex> = g.vertices().iter().copied().take(segment_size).collect();
    let mut out = Vec::new();
    for size in 0..=max_demand_size {
        for subset in seg.iter().copied().combinations(size) {
            // target options: each distinct column of the subset, then fresh
            let mut col_reps: Vec<Vertex> = Vec::new();
            for &a in &subset {
                if !col_reps.iter().any(|&r| g.perp(r, a)) {
                    col_reps.push(a);
                }
            }
            let mut targets: Vec<Option<Vertex>> = col_reps.iter().copied().map(Some).collect();
            targets.push(None);
            for target in targets {
                let anchors: Vec<Vertex> = subset
                    .iter()
                    .copied()
                    .filter(|&a| match target {
                        Some(t) => !g.perp(a, t),
                        None => true,
                    })
                    .collect();
                for mask in 0u32..(1 << anchors.len()) {
                    let pattern: Vec<(Vertex, bool)> = anchors
                        .iter()
                        .enumerate()
                        .map(|(t, &a)| (a, mask >> t & 1 == 1))
                        .collect();
                    let d = DemandDescriptor {
                        subset: subset.clone(),
                        target,
                        pattern,
                    };
                    if demand_admissible(g, &d) {
                        out.push(d);
                    }
                }
            }
        }
    }
    out
}

/// A demand is admissible when the abstract one-point extension of the
/// induced subset is itself a class member.
fn demand_admissible(g: &SemiDigraph, d: &DemandDescriptor) -> bool {
    use crate::digraph::RawGraph;
    let z = g.next_free_id();
    let mut vertices: Vec<Vertex> = d.subset.clone();
    vertices.push(z);
    let mut edges: Vec<(Vertex, Vertex)> = Vec::new();
    for (i, &a) in d.subset.iter().enumerate() {
        for &b in &d.subset[i + 1..] {
            if g.forward(a, b) {
                edges.push((a, b));
            } else if g.forward(b, a) {
                edges.push((b, a));
            }
        }
    }
    for &(a, out) in &d.pattern {
        if out {
            edges.push((z, a));
        } else {
            edges.push((a, z));
        }
    }
    SemiDigraph::validate(&RawGraph { vertices, edges }).is_ok()
}

/// A vertex of `g` realizing the demand, if any.
pub fn find_witness(g: &SemiDigraph, d: &DemandDescriptor) -> Option<Vertex> {
    g.vertices().iter().copied().find(|&w| {
        if d.subset.contains(&w) {
            return false;
        }
        let col_ok = match d.target {
            Some(t) => g.perp(w, t),
            None => d.subset.iter().all(|&a| !g.perp(w, a)),
        };
        col_ok && d.pattern.iter().all(|&(a, out)| g.forward(w, a) == out)
    })
}

fn realize_demand(g: &SemiDigraph, d: &DemandDescriptor) -> Result<SemiDigraph, ExtError> {
    let (g2, _) = extend_one_point_inner(g, d.target, &d.pattern, false)?;
    Ok(g2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::{ColumnView, RawGraph};

    fn graph(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> SemiDigraph {
        SemiDigraph::validate(&RawGraph {
            vertices: vertices.to_vec(),
            edges: edges.to_vec(),
        })
        .unwrap()
    }

    fn revalidate(g: &SemiDigraph) {
        assert!(SemiDigraph::validate(&g.to_raw()).is_ok());
    }

    #[test]
    fn two_fresh_points_with_an_edge() {
        let d = ExtensionDemand {
            base: SemiDigraph::empty(),
            anchored: vec![],
            targets: vec![ColumnTarget::Fresh, ColumnTarget::Fresh],
            eps: [((0, 1), true)].into_iter().collect(),
        };
        let (g, ys) = lemma1_extend(&d).unwrap();
        assert_eq!(ys.len(), 2);
        assert!(g.forward(ys[0], ys[1]));
        revalidate(&g);
    }

    #[test]
    fn anchored_point_with_existing_target_column() {
        // base: columns {1} and {2}, edge 1 -> 2
        let base = graph(&[1, 2], &[(1, 2)]);
        let d = ExtensionDemand {
            base,
            anchored: vec![1],
            targets: vec![ColumnTarget::Existing(2)],
            eps: [((0, 1), false)].into_iter().collect(),
        };
        let (g, ys) = lemma1_extend(&d).unwrap();
        let y2 = ys[0];
        assert!(g.perp(y2, 2));
        assert!(g.forward(y2, 1), "eps=0 forces y2 -> y1");
        revalidate(&g);
    }

    #[test]
    fn demand_validation_rejects_overlaps() {
        let base = graph(&[1, 2], &[(1, 2)]);
        let d = ExtensionDemand {
            base: base.clone(),
            anchored: vec![1],
            targets: vec![ColumnTarget::Existing(1)],
            eps: [((0, 1), false)].into_iter().collect(),
        };
        assert!(matches!(lemma1_extend(&d), Err(ExtError::InvalidDemand(_))));
        let d = ExtensionDemand {
            base,
            anchored: vec![1],
            targets: vec![ColumnTarget::Existing(2)],
            eps: BTreeMap::new(),
        };
        assert!(matches!(lemma1_extend(&d), Err(ExtError::InvalidDemand(_))));
    }

    #[test]
    fn clone_is_a_duplicate() {
        let g = graph(&[1, 2, 3], &[(1, 3), (2, 3)]);
        let others: Vec<Vertex> = vec![3];
        let (g2, bs) = clone_in_column(&g, 1, &others, 1).unwrap();
        let b = bs[0];
        assert!(g2.perp(b, 1));
        assert_eq!(g2.forward(b, 3), g2.forward(1, 3));
        revalidate(&g2);
        // count = 0 leaves the graph unchanged
        let (g3, bs) = clone_in_column(&g, 1, &others, 0).unwrap();
        assert!(bs.is_empty());
        assert_eq!(g3, g);
    }

    #[test]
    fn clone_three_times_grows_column() {
        let g = graph(
            &[1, 2, 3, 4, 5, 6],
            &[(1, 3), (1, 4), (2, 3), (2, 4), (1, 5), (2, 5), (3, 5), (4, 5), (1, 6), (2, 6), (3, 6), (4, 6)],
        );
        let view_before = ColumnView::new(&g);
        let col_len = view_before.columns()[view_before.col_of(1).unwrap()].len();
        let (g2, bs) = clone_in_column(&g, 1, &[], 3).unwrap();
        assert_eq!(bs.len(), 3);
        let view = ColumnView::new(&g2);
        assert_eq!(
            view.columns()[view.col_of(1).unwrap()].len(),
            col_len + 3
        );
        revalidate(&g2);
    }

    #[test]
    fn disjoint_copy_is_isomorphic() {
        let g = graph(&[1, 2, 3], &[(1, 3), (3, 2)]);
        let (g2, map) = disjoint_copy(&g, &[1, 2, 3].into_iter().collect()).unwrap();
        let pairs: Vec<(Vertex, Vertex)> = map.iter().map(|(&a, &b)| (a, b)).collect();
        assert!(is_partial_iso(&g2, &pairs));
        for (&v, &cv) in &map {
            assert!(g2.forward(v, cv));
        }
        revalidate(&g2);
        // single vertex: one fresh column, one inbound edge
        let (g3, map) = disjoint_copy(&g, &[1].into_iter().collect()).unwrap();
        let c = map[&1];
        assert!(g3.vertices().iter().all(|&w| w == c || g3.forward(w, c)));
        revalidate(&g3);
    }

    #[test]
    fn extend_iso_identity_and_idempotence() {
        let g = graph(&[1, 2, 3], &[(1, 3), (3, 2)]);
        let f = PartialIso::from_pairs(&g, &[(1, 1)]).unwrap();
        let (g2, f2) = extend_iso(&g, &f, 2).unwrap();
        assert!(is_partial_iso(&g2, &f2.pairs()));
        assert!(f2.image(2).is_some());
        // idempotent on covered points
        let (g3, f3) = extend_iso(&g2, &f2, 2).unwrap();
        assert_eq!(f3, f2);
        assert_eq!(g3, g2);
    }

    #[test]
    fn extend_iso_finds_existing_clone() {
        // all-forward two-pair instance plus a clone of each side
        let g = graph(&[1, 2, 3, 4], &[(1, 3), (1, 4), (2, 3), (2, 4)]);
        let f = PartialIso::from_pairs(&g, &[(1, 2), (3, 4)]).unwrap();
        // 2 is a clone of 1; its image must be found without growth
        let (g2, f2) = extend_iso(&g, &f, 2).unwrap();
        assert_eq!(g2, g, "no growth expected");
        assert_eq!(f2.image(2), Some(1));
    }

    #[test]
    fn extend_iso_covers_all_vertices() {
        let g = graph(&[1, 2, 3], &[(1, 3), (3, 2)]);
        let mut cur = g.clone();
        let mut f = PartialIso::from_pairs(&g, &[(1, 2)]).unwrap();
        for &v in g.vertices() {
            let (next, nf) = extend_iso(&cur, &f, v).unwrap();
            cur = next;
            f = nf;
        }
        assert!(is_partial_iso(&cur, &f.pairs()));
        assert!(g.vertices().iter().all(|&v| f.image(v).is_some()));
        revalidate(&cur);
    }

    #[test]
    fn build_generic_zero_steps_is_empty() {
        let (g, report) = build_generic(0, 1, 7);
        assert!(g.is_empty());
        assert!(!report.saturated);
        assert!(!report.missing_demands.is_empty());
    }

    #[test]
    fn build_generic_size_one_saturates() {
        let (g, report) = build_generic(10_000, 1, 7);
        assert!(report.saturated);
        let view = ColumnView::new(&g);
        assert!(view.len() >= 2);
        // both directions appear somewhere
        assert!(g.edges().iter().any(|&(u, v)| u < v));
        assert!(g.edges().iter().any(|&(u, v)| u > v));
        revalidate(&g);
        // every demand now has a witness
        for d in enumerate_demands(&g, 1, SEGMENT_SIZE) {
            assert!(find_witness(&g, &d).is_some());
        }
    }

    #[test]
    fn random_demands_realize_exactly() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let cols = 1 + rng.gen_range(0..3);
            let base = crate::instances::random_instance(&mut rng, cols, 10);
            let d = crate::instances::random_demand(&mut rng, base, 6);
            let k = d.anchored.len();
            let (g, ys) = lemma1_extend(&d).unwrap();
            revalidate(&g);
            for (&(i, j), &bit) in &d.eps {
                let a = if i < k { d.anchored[i] } else { ys[i - k] };
                let b = ys[j - k];
                assert_eq!(g.forward(a, b), bit, "eps ({i},{j}) not realized");
            }
        }
    }
}
