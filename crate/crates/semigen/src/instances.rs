//! Instance generation for tests and sweeps: exhaustive enumeration of
//! small class members (up to isomorphism via canonical vertex
//! partitions) and seeded random members.
//!
//! Cross-column edge patterns are built from per-vertex bits: directing
//! x -> y exactly when eps(x) xor delta(y) holds keeps every quadruple
//! count even, and every valid pattern between two columns arises this
//! way.

use std::collections::BTreeMap;

use rand::Rng;

use crate::digraph::{RawGraph, SemiDigraph, Vertex};
use crate::extension::{ColumnTarget, ExtensionDemand};

/// Non-increasing column size profiles with at most `max_cols` columns
/// and at most `max_vertices` vertices in total, the empty profile
/// included.
pub fn size_profiles(max_cols: usize, max_vertices: usize) -> Vec<Vec<usize>> {
    fn rec(max_cols: usize, budget: usize, cap: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(cur.clone());
        if max_cols == 0 {
            return;
        }
        for s in (1..=budget.min(cap)).rev() {
            cur.push(s);
            rec(max_cols - 1, budget - s, s, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(max_cols, max_vertices, max_vertices, &mut Vec::new(), &mut out);
    out.sort();
    out.dedup();
    out
}

/// Consecutive vertex blocks 1.. for a size profile.
fn blocks(profile: &[usize]) -> Vec<Vec<Vertex>> {
    let mut next = 1;
    profile
        .iter()
        .map(|&s| {
            let b: Vec<Vertex> = (next..next + s as Vertex).collect();
            next += s as Vertex;
            b
        })
        .collect()
}

/// Every valid instance with the given canonical vertex partition:
/// all cross-column orientation patterns, filtered by validation.
pub fn instances_for_profile(profile: &[usize]) -> Vec<SemiDigraph> {
    let cols = blocks(profile);
    let vertices: Vec<Vertex> = cols.iter().flatten().copied().collect();
    let mut cross: Vec<(Vertex, Vertex)> = Vec::new();
    for (i, p) in cols.iter().enumerate() {
        for q in &cols[i + 1..] {
            for &x in p {
                for &y in q {
                    cross.push((x, y));
                }
            }
        }
    }
    assert!(cross.len() < 26, "profile too large to sweep");
    let mut out = Vec::new();
    for mask in 0u64..(1 << cross.len()) {
        let edges: Vec<(Vertex, Vertex)> = cross
            .iter()
            .enumerate()
            .map(|(t, &(x, y))| if mask >> t & 1 == 1 { (x, y) } else { (y, x) })
            .collect();
        if let Ok(g) = SemiDigraph::validate(&RawGraph {
            vertices: vertices.clone(),
            edges,
        }) {
            out.push(g);
        }
    }
    out
}

/// Every valid instance (up to isomorphism, with duplicates possible)
/// within the size bounds.
pub fn all_instances(max_cols: usize, max_vertices: usize) -> Vec<SemiDigraph> {
    size_profiles(max_cols, max_vertices)
        .iter()
        .flat_map(|p| instances_for_profile(p))
        .collect()
}

/// A random valid instance with `num_cols` columns and at most
/// `max_vertices` vertices.
pub fn random_instance<R: Rng>(rng: &mut R, num_cols: usize, max_vertices: usize) -> SemiDigraph {
    let mut sizes = Vec::new();
    let mut budget = max_vertices.max(num_cols);
    for c in 0..num_cols {
        let spare = budget - (num_cols - c - 1);
        let s = rng.gen_range(1..=spare.min(3));
        sizes.push(s);
        budget -= s;
    }
    let cols = blocks(&sizes);
    let vertices: Vec<Vertex> = cols.iter().flatten().copied().collect();
    let mut edges = Vec::new();
    for (i, p) in cols.iter().enumerate() {
        for q in &cols[i + 1..] {
            let eps: BTreeMap<Vertex, bool> =
                p.iter().map(|&x| (x, rng.gen_bool(0.5))).collect();
            let delta: BTreeMap<Vertex, bool> =
                q.iter().map(|&y| (y, rng.gen_bool(0.5))).collect();
            for &x in p {
                for &y in q {
                    if eps[&x] != delta[&y] {
                        edges.push((x, y));
                    } else {
                        edges.push((y, x));
                    }
                }
            }
        }
    }
    SemiDigraph::validate(&RawGraph { vertices, edges }).expect("construction is always valid")
}

/// A random extension demand over `base` with at most `max_points`
/// total points (anchored plus new).
pub fn random_demand<R: Rng>(
    rng: &mut R,
    base: SemiDigraph,
    max_points: usize,
) -> ExtensionDemand {
    // column representatives of the base, by minimum id
    let mut reps: Vec<Vertex> = Vec::new();
    for &v in base.vertices() {
        if !reps.iter().any(|&r| base.perp(r, v)) {
            reps.push(v);
        }
    }
    let mut free: Vec<Vertex> = reps.clone();
    let max_anchor = free.len().min(2).min(max_points.saturating_sub(1));
    let mut anchored = Vec::new();
    for _ in 0..rng.gen_range(0..=max_anchor) {
        let idx = rng.gen_range(0..free.len());
        let r = free.remove(idx);
        // any resident of the column will do as an anchor
        let col: Vec<Vertex> = base
            .vertices()
            .iter()
            .copied()
            .filter(|&w| w == r || base.perp(w, r))
            .collect();
        anchored.push(col[rng.gen_range(0..col.len())]);
    }
    let n_new = rng.gen_range(1..=max_points - anchored.len());
    let mut targets = Vec::new();
    for _ in 0..n_new {
        if !free.is_empty() && rng.gen_bool(0.5) {
            let idx = rng.gen_range(0..free.len());
            targets.push(ColumnTarget::Existing(free.remove(idx)));
        } else {
            targets.push(ColumnTarget::Fresh);
        }
    }
    let k = anchored.len();
    let n = k + targets.len();
    let eps = (0..n)
        .flat_map(|i| ((i + 1).max(k)..n).map(move |j| (i, j)))
        .map(|ij| (ij, rng.gen_bool(0.5)))
        .collect();
    ExtensionDemand {
        base,
        anchored,
        targets,
        eps,
    }
}
