//! Cylinder sets over the expansion space, the uniform measure, the
//! brute-force counting oracle, uniform sampling, and Monte Carlo
//! estimation.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::digraph::{ColumnView, SemiDigraph, Vertex};
use crate::star::{enumerate_expansions, StarError, StarExpansion};

/// Exact measure values: reduced arbitrary-precision rationals.
pub type Rat = BigRational;

pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

fn factorial(n: usize) -> BigInt {
    (1..=n).map(BigInt::from).product()
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum MeasureError {
    #[error("unknown vertex {0}")]
    UnknownVertex(Vertex),
    #[error("inconsistent cylinders: {0}")]
    InconsistentCylinders(String),
    #[error("vertex {0} is not in the column of {1}")]
    ColumnMismatch(Vertex, Vertex),
    #[error(transparent)]
    Star(#[from] StarError),
}

/// Base points in pairwise distinct columns plus one bit per point
/// pair. The event: the columns appear in listed order, and for i < j
/// the expansion relation between x_i and x_j agrees with the edge
/// direction exactly when `eps[(i, j)]` holds.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct UCylinder {
    pub base_points: Vec<Vertex>,
    pub eps: BTreeMap<(usize, usize), bool>,
}

impl UCylinder {
    /// All-true bits over the listed points.
    pub fn agreeing(points: Vec<Vertex>) -> UCylinder {
        let n = points.len();
        let eps = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| ((i, j), true)))
            .collect();
        UCylinder {
            base_points: points,
            eps,
        }
    }
}

/// One ordered tuple per column; the event: each tuple appears in its
/// listed relative order within the column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VCylinder {
    pub tuples: Vec<Vec<Vertex>>,
}

/// Basic event: optional U-part and optional V-part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cylinder {
    pub u: Option<UCylinder>,
    pub v: Option<VCylinder>,
}

pub fn mu0_u(n: usize) -> Rat {
    let pairs = n * n.saturating_sub(1) / 2;
    Rat::new(BigInt::one(), factorial(n) * (BigInt::one() << pairs))
}

pub fn mu0_v(sizes: &[usize]) -> Rat {
    Rat::new(
        BigInt::one(),
        sizes.iter().map(|&s| factorial(s)).product(),
    )
}

pub fn check_u(g: &SemiDigraph, u: &UCylinder) -> Result<(), MeasureError> {
    let n = u.base_points.len();
    for &x in &u.base_points {
        if !g.contains(x) {
            return Err(MeasureError::UnknownVertex(x));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (u.base_points[i], u.base_points[j]);
            if a == b || g.perp(a, b) {
                return Err(MeasureError::InconsistentCylinders(format!(
                    "base points {a} and {b} share a column"
                )));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            if !u.eps.contains_key(&(i, j)) {
                return Err(MeasureError::InconsistentCylinders(format!(
                    "missing eps bit ({i}, {j})"
                )));
            }
        }
    }
    if u.eps.keys().any(|&(i, j)| i >= j || j >= n) {
        return Err(MeasureError::InconsistentCylinders(
            "eps bit out of range".into(),
        ));
    }
    Ok(())
}

pub fn check_v(g: &SemiDigraph, v: &VCylinder) -> Result<(), MeasureError> {
    for t in &v.tuples {
        if t.is_empty() {
            return Err(MeasureError::InconsistentCylinders("empty tuple".into()));
        }
        for &x in t {
            if !g.contains(x) {
                return Err(MeasureError::UnknownVertex(x));
            }
        }
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                if t[i] == t[j] {
                    return Err(MeasureError::InconsistentCylinders(format!(
                        "tuple repeats vertex {}",
                        t[i]
                    )));
                }
                if !g.perp(t[i], t[j]) {
                    return Err(MeasureError::ColumnMismatch(t[j], t[i]));
                }
            }
        }
    }
    for (a, b) in v
        .tuples
        .iter()
        .enumerate()
        .flat_map(|(i, s)| v.tuples[i + 1..].iter().map(move |t| (s, t)))
    {
        if a[0] == b[0] || g.perp(a[0], b[0]) {
            return Err(MeasureError::InconsistentCylinders(format!(
                "tuples led by {} and {} share a column",
                a[0], b[0]
            )));
        }
    }
    Ok(())
}

/// Exact measure: 1/(n!·2^C(n,2)) · prod 1/i_j!. Within-column order is
/// independent of everything else, so tuples inside U-columns still
/// contribute their factor; singleton tuples impose nothing.
pub fn mu0_cyl(
    g: &SemiDigraph,
    u: Option<&UCylinder>,
    v: Option<&VCylinder>,
) -> Result<Rat, MeasureError> {
    let mut out = Rat::one();
    if let Some(u) = u {
        check_u(g, u)?;
        out *= mu0_u(u.base_points.len());
    }
    if let Some(v) = v {
        check_v(g, v)?;
        let sizes: Vec<usize> = v.tuples.iter().map(|t| t.len()).collect();
        out *= mu0_v(&sizes);
    }
    Ok(out)
}

/// Membership of an expansion in the U-event, read off the stored order
/// and the materialized relation.
pub fn in_u(g: &SemiDigraph, view: &ColumnView, u: &UCylinder, e: &StarExpansion) -> bool {
    let n = u.base_points.len();
    let rank = |x: Vertex| e.rank_of_col(view.col_of(x).unwrap());
    for i in 0..n {
        for j in i + 1..n {
            let (xi, xj) = (u.base_points[i], u.base_points[j]);
            if rank(xi) >= rank(xj) {
                return false;
            }
            let agrees = e.r_holds(g, view, xi, xj) == g.forward(xi, xj);
            if agrees != u.eps[&(i, j)] {
                return false;
            }
        }
    }
    true
}

pub fn in_v(view: &ColumnView, v: &VCylinder, e: &StarExpansion) -> bool {
    v.tuples.iter().all(|t| {
        let c = view.col_of(t[0]).unwrap();
        let w = &e.within[c];
        let pos = |x: Vertex| w.iter().position(|&y| y == x).unwrap();
        t.windows(2).all(|ab| pos(ab[0]) < pos(ab[1]))
    })
}

pub fn cyl_contains(
    g: &SemiDigraph,
    view: &ColumnView,
    u: Option<&UCylinder>,
    v: Option<&VCylinder>,
    e: &StarExpansion,
) -> bool {
    u.map_or(true, |u| in_u(g, view, u, e)) && v.map_or(true, |v| in_v(view, v, e))
}

/// Counting oracle: exact fraction of expansions inside the event.
pub fn brute_measure(
    g: &SemiDigraph,
    u: Option<&UCylinder>,
    v: Option<&VCylinder>,
) -> Result<Rat, MeasureError> {
    if let Some(u) = u {
        check_u(g, u)?;
    }
    if let Some(v) = v {
        check_v(g, v)?;
    }
    let view = ColumnView::new(g);
    let es = enumerate_expansions(g, &view)?;
    let hits = es
        .iter()
        .filter(|e| cyl_contains(g, &view, u, v, e))
        .count();
    Ok(Rat::new(BigInt::from(hits), BigInt::from(es.len())))
}

/// Same ~-class with respect to the column of `c`: y and y2 point the
/// same way at every resident of that column.
pub fn same_class_wrt(g: &SemiDigraph, c: Vertex, y: Vertex, y2: Vertex) -> bool {
    g.vertices()
        .iter()
        .filter(|&&z| z == c || g.perp(z, c))
        .all(|&z| g.forward(y, z) == g.forward(y2, z))
}

/// Replace base points by same-column points, adjusting bits so the
/// event is extensionally unchanged. The bit on (i, j) flips exactly
/// when the j-th point's ~-class with respect to the i-th column
/// changes; replacing the i-th point alone never flips (its class
/// change cancels against the edge flip).
pub fn rebase(
    g: &SemiDigraph,
    u: &UCylinder,
    replacements: &[(Vertex, Vertex)],
) -> Result<UCylinder, MeasureError> {
    check_u(g, u)?;
    let map: BTreeMap<Vertex, Vertex> = replacements.iter().copied().collect();
    if map.len() != replacements.len() {
        return Err(MeasureError::InconsistentCylinders(
            "duplicate replacement source".into(),
        ));
    }
    for (&old, &new) in &map {
        if !u.base_points.contains(&old) {
            return Err(MeasureError::UnknownVertex(old));
        }
        if !g.contains(new) {
            return Err(MeasureError::UnknownVertex(new));
        }
        if old != new && !g.perp(old, new) {
            return Err(MeasureError::ColumnMismatch(new, old));
        }
    }
    let new_points: Vec<Vertex> = u
        .base_points
        .iter()
        .map(|x| map.get(x).copied().unwrap_or(*x))
        .collect();
    let mut eps = BTreeMap::new();
    for (&(i, j), &bit) in &u.eps {
        let anchor = new_points[i]; // same column as the old i-th point
        let flip = !same_class_wrt(g, anchor, u.base_points[j], new_points[j]);
        eps.insert((i, j), bit != flip);
    }
    Ok(UCylinder {
        base_points: new_points,
        eps,
    })
}

/// All n!·2^C(n,2) U-cylinders over a base, in canonical order.
pub fn all_u_cylinders(base_points: &[Vertex]) -> Vec<UCylinder> {
    use itertools::Itertools;
    let n = base_points.len();
    let pairs = n * n.saturating_sub(1) / 2;
    let mut out = Vec::new();
    for perm in base_points.iter().copied().permutations(n) {
        for mask in 0u64..(1 << pairs) {
            let mut eps = BTreeMap::new();
            let mut t = 0;
            for i in 0..n {
                for j in i + 1..n {
                    eps.insert((i, j), mask >> t & 1 == 1);
                    t += 1;
                }
            }
            out.push(UCylinder {
                base_points: perm.clone(),
                eps,
            });
        }
    }
    out
}

/// True iff the U-cylinders over the base put every expansion in
/// exactly one cell.
pub fn partition_check(g: &SemiDigraph, base_points: &[Vertex]) -> Result<bool, MeasureError> {
    check_u(g, &UCylinder::agreeing(base_points.to_vec()))?;
    let view = ColumnView::new(g);
    let es = enumerate_expansions(g, &view)?;
    let cells = all_u_cylinders(base_points);
    Ok(es.iter().all(|e| {
        cells
            .iter()
            .filter(|u| in_u(g, &view, u, e))
            .count()
            == 1
    }))
}

const INTERSECT_MAX_COLUMNS: usize = 5;

/// Intersection of two U-events as a disjoint union of basic events
/// over the merged point family. Shared columns are first rebased onto
/// u1's points; the result then enumerates every interleaving and bit
/// pattern consistent with both.
pub fn intersect_u(
    u1: &UCylinder,
    u2: &UCylinder,
    g: &SemiDigraph,
) -> Result<Vec<Cylinder>, MeasureError> {
    use itertools::Itertools;
    check_u(g, u1)?;
    check_u(g, u2)?;
    let same_col = |a: Vertex, b: Vertex| a == b || g.perp(a, b);
    // pull u2's points onto u1's in shared columns
    let repl: Vec<(Vertex, Vertex)> = u2
        .base_points
        .iter()
        .filter_map(|&y| {
            u1.base_points
                .iter()
                .copied()
                .find(|&x| same_col(x, y))
                .filter(|&x| x != y)
                .map(|x| (y, x))
        })
        .collect();
    let u2 = rebase(g, u2, &repl)?;
    let mut points = u1.base_points.clone();
    for &y in &u2.base_points {
        if !points.iter().any(|&x| same_col(x, y)) {
            points.push(y);
        }
    }
    let n = points.len();
    if n > INTERSECT_MAX_COLUMNS {
        return Err(MeasureError::InconsistentCylinders(format!(
            "merged base spans {n} columns (limit {INTERSECT_MAX_COLUMNS})"
        )));
    }
    // per ordered vertex pair: required precedence and forced bit
    let mut forced: BTreeMap<(Vertex, Vertex), bool> = BTreeMap::new();
    for u in [u1, &u2] {
        for (&(i, j), &bit) in &u.eps {
            let key = (u.base_points[i], u.base_points[j]);
            if forced.contains_key(&(key.1, key.0)) {
                return Ok(vec![]); // opposite orders demanded
            }
            match forced.get(&key) {
                Some(&b) if b != bit => return Ok(vec![]),
                _ => {
                    forced.insert(key, bit);
                }
            }
        }
    }
    let mut out = Vec::new();
    'perm: for perm in points.iter().copied().permutations(n) {
        let pos = |x: Vertex| perm.iter().position(|&y| y == x).unwrap();
        for &(a, b) in forced.keys() {
            if pos(a) > pos(b) {
                continue 'perm;
            }
        }
        let mut free_pairs = Vec::new();
        let mut base = BTreeMap::new();
        for i in 0..n {
            for j in i + 1..n {
                match forced.get(&(perm[i], perm[j])) {
                    Some(&bit) => {
                        base.insert((i, j), bit);
                    }
                    None => free_pairs.push((i, j)),
                }
            }
        }
        for mask in 0u64..(1 << free_pairs.len()) {
            let mut eps = base.clone();
            for (t, &ij) in free_pairs.iter().enumerate() {
                eps.insert(ij, mask >> t & 1 == 1);
            }
            out.push(Cylinder {
                u: Some(UCylinder {
                    base_points: perm.clone(),
                    eps,
                }),
                v: None,
            });
        }
    }
    Ok(out)
}

/// One uniform draw from the expansion space without enumeration:
/// independent uniform column order, within-column orders, and a fair
/// coin per column pair.
pub fn sample_expansion<R: Rng>(
    _g: &SemiDigraph,
    view: &ColumnView,
    rng: &mut R,
) -> StarExpansion {
    let k = view.len();
    let mut column_order: Vec<usize> = (0..k).collect();
    column_order.shuffle(rng);
    let within: Vec<Vec<Vertex>> = view
        .columns()
        .iter()
        .map(|col| {
            let mut w = col.clone();
            w.shuffle(rng);
            w
        })
        .collect();
    let mut choices = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let (p, q) = (column_order[i], column_order[j]);
            let cells = view.split(p, q);
            let coin = rng.gen_bool(0.5) as usize;
            let class = if cells.len() == 2 {
                cells[coin].clone()
            } else if coin == 0 {
                cells[0].clone()
            } else {
                Vec::new()
            };
            choices.insert((p, q), class);
        }
    }
    StarExpansion {
        column_order,
        within,
        choices,
    }
}

pub fn sample_expansion_seeded(g: &SemiDigraph, view: &ColumnView, seed: u64) -> StarExpansion {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_expansion(g, view, &mut rng)
}

const MC_STREAMS: u64 = 8;

/// Monte Carlo estimate of a cylinder measure with a 3-sigma interval.
/// Draws are split over a fixed number of generator streams (stream s
/// of the root seed handles every s-th sample), so the result depends
/// only on (seed, samples), not on the worker count.
pub fn mc_measure(
    g: &SemiDigraph,
    u: Option<&UCylinder>,
    v: Option<&VCylinder>,
    samples: u64,
    seed: u64,
) -> Result<(f64, (f64, f64)), MeasureError> {
    use rayon::prelude::*;
    if let Some(u) = u {
        check_u(g, u)?;
    }
    if let Some(v) = v {
        check_v(g, v)?;
    }
    let view = ColumnView::new(g);
    let hits: u64 = (0..MC_STREAMS)
        .into_par_iter()
        .map(|s| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(s);
            let count = samples / MC_STREAMS + u64::from(s < samples % MC_STREAMS);
            (0..count)
                .filter(|_| {
                    let e = sample_expansion(g, &view, &mut rng);
                    cyl_contains(g, &view, u, v, &e)
                })
                .count() as u64
        })
        .sum();
    let p = hits as f64 / samples as f64;
    let sigma = (p * (1.0 - p) / samples as f64).sqrt();
    Ok((p, ((p - 3.0 * sigma).max(0.0), (p + 3.0 * sigma).min(1.0))))
}

/// Both sides of the independence computation for the orderings of two
/// disjoint point sets sharing a column: the direct count
/// C(i+i', i)/(i+i')! and the product 1/i!·1/i'!.
pub fn ordering_independence(i: usize, i2: usize) -> (Rat, Rat) {
    let binom = factorial(i + i2) / (factorial(i) * factorial(i2));
    (
        Rat::new(binom, factorial(i + i2)),
        Rat::new(BigInt::one(), factorial(i) * factorial(i2)),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::RawGraph;

    fn graph(vertices: &[Vertex], edges: &[(Vertex, Vertex)]) -> SemiDigraph {
        SemiDigraph::validate(&RawGraph {
            vertices: vertices.to_vec(),
            edges: edges.to_vec(),
        })
        .unwrap()
    }

    #[test]
    fn mu0_u_values() {
        assert_eq!(mu0_u(0), rat(1, 1));
        assert_eq!(mu0_u(1), rat(1, 1));
        assert_eq!(mu0_u(2), rat(1, 4));
        assert_eq!(mu0_u(3), rat(1, 48));
    }

    #[test]
    fn mu0_v_values() {
        assert_eq!(mu0_v(&[1, 1, 1]), rat(1, 1));
        assert_eq!(mu0_v(&[3]), rat(1, 6));
        assert_eq!(mu0_v(&[2, 3]), rat(1, 12));
    }

    #[test]
    fn mu0_cyl_examples() {
        // u over two (1,1) columns, v a pair in a third column
        let g = graph(
            &[1, 2, 3, 4],
            &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4)],
        );
        let u = UCylinder::agreeing(vec![1, 2]);
        let v = VCylinder {
            tuples: vec![vec![3, 4]],
        };
        assert_eq!(mu0_cyl(&g, Some(&u), Some(&v)).unwrap(), rat(1, 8));
        assert_eq!(mu0_cyl(&g, None, None).unwrap(), rat(1, 1));
        // singleton tuples in the U-columns impose nothing
        let v = VCylinder {
            tuples: vec![vec![1], vec![2]],
        };
        assert_eq!(mu0_cyl(&g, Some(&u), Some(&v)).unwrap(), rat(1, 4));
    }

    #[test]
    fn cylinder_validation() {
        let g = graph(&[1, 2, 3], &[(1, 3), (2, 3)]);
        let u = UCylinder::agreeing(vec![1, 2]); // same column
        assert!(matches!(
            check_u(&g, &u),
            Err(MeasureError::InconsistentCylinders(_))
        ));
        let v = VCylinder {
            tuples: vec![vec![1, 3]],
        };
        assert!(matches!(
            check_v(&g, &v),
            Err(MeasureError::ColumnMismatch(3, 1))
        ));
        assert!(matches!(
            check_u(&g, &UCylinder::agreeing(vec![9])),
            Err(MeasureError::UnknownVertex(9))
        ));
    }

    #[test]
    fn brute_one_one_all_cylinders_quarter() {
        let g = graph(&[1, 2], &[(1, 2)]);
        for pts in [[1, 2], [2, 1]] {
            for bit in [false, true] {
                let u = UCylinder {
                    base_points: pts.to_vec(),
                    eps: [((0, 1), bit)].into_iter().collect(),
                };
                assert_eq!(brute_measure(&g, Some(&u), None).unwrap(), rat(1, 4));
            }
        }
    }

    #[test]
    fn brute_single_column_order() {
        let g = graph(&[1, 2, 3], &[]);
        let v = VCylinder {
            tuples: vec![vec![1, 2, 3]],
        };
        assert_eq!(brute_measure(&g, None, Some(&v)).unwrap(), rat(1, 6));
    }

    #[test]
    fn brute_mixed_matches_mu0() {
        // columns {1,2} and {3}
        let g = graph(&[1, 2, 3], &[(1, 3), (2, 3)]);
        let u = UCylinder::agreeing(vec![1, 3]);
        let v = VCylinder {
            tuples: vec![vec![1, 2]],
        };
        assert_eq!(brute_measure(&g, Some(&u), Some(&v)).unwrap(), rat(1, 8));
        assert_eq!(
            brute_measure(&g, Some(&u), Some(&v)).unwrap(),
            mu0_cyl(&g, Some(&u), Some(&v)).unwrap()
        );
    }

    #[test]
    fn rebase_identity_and_flip() {
        // columns {1,2} and {3,4}: 1 -> {3,4}, {3,4} -> 2 makes 1 ≁ 2;
        // 3 and 4 get opposite edges to column one so 3 ≁ 4 as well
        let g = graph(&[1, 2, 3, 4], &[(1, 3), (1, 4), (3, 2), (4, 2)]);
        let u = UCylinder::agreeing(vec![1, 3]);
        assert_eq!(rebase(&g, &u, &[]).unwrap(), u);
        assert_eq!(rebase(&g, &u, &[(1, 1), (3, 3)]).unwrap(), u);
        // replacing the left point never flips the bit
        let r = rebase(&g, &u, &[(1, 2)]).unwrap();
        assert_eq!(r.base_points, vec![2, 3]);
        assert_eq!(r.eps[&(0, 1)], true);
        // replacing the right point by a class-changing one flips it
        let g2 = graph(&[1, 2, 3, 4], &[(1, 3), (4, 1), (3, 2), (2, 4)]);
        assert!(!same_class_wrt(&g2, 1, 3, 4));
        let r = rebase(&g2, &u, &[(3, 4)]).unwrap();
        assert_eq!(r.eps[&(0, 1)], false);
        // column mismatch rejected
        assert!(matches!(
            rebase(&g, &u, &[(1, 3)]),
            Err(MeasureError::ColumnMismatch(3, 1))
        ));
    }

    #[test]
    fn rebase_extensionally_equal_exhaustive() {
        // (2,2)-column instance with nontrivial splits both ways
        let g = graph(&[1, 2, 3, 4], &[(1, 3), (4, 1), (3, 2), (2, 4)]);
        let view = ColumnView::new(&g);
        let es = enumerate_expansions(&g, &view).unwrap();
        for bit in [false, true] {
            let u = UCylinder {
                base_points: vec![1, 3],
                eps: [((0, 1), bit)].into_iter().collect(),
            };
            for a in [1, 2] {
                for b in [3, 4] {
                    let r = rebase(&g, &u, &[(1, a), (3, b)]).unwrap();
                    for e in &es {
                        assert_eq!(
                            in_u(&g, &view, &u, e),
                            in_u(&g, &view, &r, e),
                            "rebase to ({a}, {b}) changed the event"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn partition_examples() {
        let g = graph(&[1, 2], &[(1, 2)]);
        assert!(partition_check(&g, &[1]).unwrap());
        assert!(partition_check(&g, &[1, 2]).unwrap());
        let g3 = graph(&[1, 2, 3], &[(1, 2), (1, 3), (2, 3)]);
        assert!(partition_check(&g3, &[1, 2, 3]).unwrap());
        assert_eq!(all_u_cylinders(&[1, 2, 3]).len(), 48);
    }

    #[test]
    fn intersect_self_and_contradiction() {
        let g = graph(&[1, 2], &[(1, 2)]);
        let u = UCylinder::agreeing(vec![1, 2]);
        let cells = intersect_u(&u, &u, &g).unwrap();
        assert_eq!(cells.len(), 1);
        assert_eq!(cells[0].u.as_ref().unwrap(), &u);
        let mut u2 = u.clone();
        u2.eps.insert((0, 1), false);
        assert!(intersect_u(&u, &u2, &g).unwrap().is_empty());
        // opposite listed orders are also contradictory
        let u3 = UCylinder::agreeing(vec![2, 1]);
        assert!(intersect_u(&u, &u3, &g).unwrap().is_empty());
    }

    #[test]
    fn intersect_covers_and_is_disjoint() {
        // three columns: {1,2}, {3}, {4}
        let g = graph(
            &[1, 2, 3, 4],
            &[(1, 3), (2, 3), (1, 4), (2, 4), (3, 4)],
        );
        let view = ColumnView::new(&g);
        let es = enumerate_expansions(&g, &view).unwrap();
        let u1 = UCylinder::agreeing(vec![1, 3]);
        let u2 = UCylinder {
            base_points: vec![2, 4],
            eps: [((0, 1), false)].into_iter().collect(),
        };
        let cells = intersect_u(&u1, &u2, &g).unwrap();
        for e in &es {
            let want = in_u(&g, &view, &u1, e) && in_u(&g, &view, &u2, e);
            let got = cells
                .iter()
                .filter(|c| cyl_contains(&g, &view, c.u.as_ref(), c.v.as_ref(), e))
                .count();
            assert_eq!(got, usize::from(want), "cover/disjointness broken");
        }
    }

    #[test]
    fn sampling_matches_uniform() {
        use statrs::distribution::{ChiSquared, ContinuousCDF};
        // (2,1) columns: 8 expansions
        let g = graph(&[1, 2, 3], &[(1, 3), (2, 3)]);
        let view = ColumnView::new(&g);
        let es = enumerate_expansions(&g, &view).unwrap();
        assert_eq!(es.len(), 8);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 16_000usize;
        let mut counts = vec![0usize; es.len()];
        for _ in 0..n {
            let e = sample_expansion(&g, &view, &mut rng);
            let idx = es.binary_search(&e).expect("sample is a listed expansion");
            counts[idx] += 1;
        }
        let expect = n as f64 / es.len() as f64;
        let stat: f64 = counts
            .iter()
            .map(|&c| (c as f64 - expect).powi(2) / expect)
            .sum();
        let threshold = ChiSquared::new((es.len() - 1) as f64)
            .unwrap()
            .inverse_cdf(0.999);
        assert!(stat < threshold, "chi-square {stat} over {threshold}");
    }

    #[test]
    fn mc_interval_contains_exact() {
        let g = graph(&[1, 2, 3], &[(1, 3), (2, 3)]);
        let u = UCylinder::agreeing(vec![1, 3]);
        let exact = brute_measure(&g, Some(&u), None).unwrap();
        let exact_f = exact.numer().to_string().parse::<f64>().unwrap()
            / exact.denom().to_string().parse::<f64>().unwrap();
        let (_, (lo, hi)) = mc_measure(&g, Some(&u), None, 40_000, 5).unwrap();
        assert!(lo <= exact_f && exact_f <= hi);
        // reproducible for a fixed seed
        assert_eq!(
            mc_measure(&g, Some(&u), None, 10_000, 9).unwrap(),
            mc_measure(&g, Some(&u), None, 10_000, 9).unwrap()
        );
    }

    #[test]
    fn ordering_independence_values() {
        assert_eq!(ordering_independence(0, 4), (rat(1, 24), rat(1, 24)));
        assert_eq!(ordering_independence(2, 3), (rat(1, 12), rat(1, 12)));
        for i in 0..=8 {
            for j in 0..=8 {
                let (a, b) = ordering_independence(i, j);
                assert_eq!(a, b);
            }
        }
    }
}
