//! The ordered expansion class: a column-convex linear order plus a
//! binary relation R that labels, for each ordered column pair, one of
//! the two split classes of the lower column. Expansions are stored in
//! normal form (per-pair chosen class); R is materialized on demand.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::digraph::{ColumnView, SemiDigraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum StarError {
    #[error("instance too large to enumerate ({0} expansions predicted)")]
    ScaleExceeded(u128),
    #[error("labels are inconsistent: {0}")]
    InconsistentLabels(String),
    #[error("columns {0} and {1} are not ordered low before high")]
    ColumnsNotOrdered(usize, usize),
}

/// First violated expansion condition, with a witness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StarViolation {
    /// order is not a permutation of the vertex set
    OrderNotLinear,
    /// some column is not an interval of the order
    OrderNotConvex(Vertex, Vertex, Vertex),
    /// (a): R(x, .) varies inside a column: witness (x, y, y')
    ColumnConstancy(Vertex, Vertex, Vertex),
    /// (b): the R-positive part of the low column is not a split class
    ClassChoice(usize, usize),
    /// (c): back direction formula broken: witness (y, x)
    BackFormula(Vertex, Vertex),
    /// (d): R holds inside a column: witness (x, y)
    PerpPositive(Vertex, Vertex),
}

/// An admissible expansion in normal form.
///
/// `column_order[r]` is the column index occupying rank r; `within[c]`
/// is the linear order of column `c`; `choices[(p, q)]` (p before q in
/// the column order) is the chosen split class of p against q, possibly
/// empty.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct StarExpansion {
    pub column_order: Vec<usize>,
    pub within: Vec<Vec<Vertex>>,
    pub choices: BTreeMap<(usize, usize), Vec<Vertex>>,
}

impl StarExpansion {
    pub fn rank_of_col(&self, c: usize) -> usize {
        self.column_order.iter().position(|&d| d == c).unwrap()
    }

    /// Position of v in the full vertex order.
    pub fn lt(&self, view: &ColumnView, a: Vertex, b: Vertex) -> bool {
        let ca = view.col_of(a).unwrap();
        let cb = view.col_of(b).unwrap();
        if ca != cb {
            self.rank_of_col(ca) < self.rank_of_col(cb)
        } else {
            let w = &self.within[ca];
            w.iter().position(|&v| v == a) < w.iter().position(|&v| v == b)
        }
    }

    /// Materialized R. Within a column R never holds; across columns it
    /// is read off the chosen class and the back-direction formula.
    pub fn r_holds(&self, g: &SemiDigraph, view: &ColumnView, x: Vertex, y: Vertex) -> bool {
        let cx = view.col_of(x).unwrap();
        let cy = view.col_of(y).unwrap();
        if cx == cy {
            return false;
        }
        if self.rank_of_col(cx) < self.rank_of_col(cy) {
            self.choices[&(cx, cy)].contains(&x)
        } else {
            let u = &self.choices[&(cy, cx)];
            match u.first() {
                Some(&x1) => g.forward(x, x1),
                None => false,
            }
        }
    }

    /// Extensional R over all ordered vertex pairs.
    pub fn r_set(&self, g: &SemiDigraph, view: &ColumnView) -> BTreeSet<(Vertex, Vertex)> {
        let mut out = BTreeSet::new();
        for &x in g.vertices() {
            for &y in g.vertices() {
                if x != y && self.r_holds(g, view, x, y) {
                    out.insert((x, y));
                }
            }
        }
        out
    }

    /// Full vertex order, lowest first.
    pub fn order_vec(&self) -> Vec<Vertex> {
        self.column_order
            .iter()
            .flat_map(|&c| self.within[c].iter().copied())
            .collect()
    }
}

/// Number of admissible expansions: k! * prod(sizes!) * 2^C(k,2).
pub fn expansion_count(sizes: &[usize]) -> u128 {
    let k = sizes.len() as u128;
    let fact = |n: u128| (1..=n).product::<u128>().max(1);
    let pairs = k * (k.saturating_sub(1)) / 2;
    fact(k) * sizes.iter().map(|&s| fact(s as u128)).product::<u128>() * (1u128 << pairs)
}

const ENUMERATION_LIMIT: u128 = 2_000_000;

/// All admissible expansions in canonical (lexicographic) order.
pub fn enumerate_expansions(
    _g: &SemiDigraph,
    view: &ColumnView,
) -> Result<Vec<StarExpansion>, StarError> {
    let sizes: Vec<usize> = view.columns().iter().map(|c| c.len()).collect();
    let predicted = expansion_count(&sizes);
    if predicted > ENUMERATION_LIMIT {
        return Err(StarError::ScaleExceeded(predicted));
    }
    let k = view.len();
    let within_options: Vec<Vec<Vec<Vertex>>> = view
        .columns()
        .iter()
        .map(|col| col.iter().copied().permutations(col.len()).collect())
        .collect();
    let mut out = Vec::with_capacity(predicted as usize);
    for col_order in (0..k).permutations(k) {
        // ordered pairs (low, high) under this column order
        let mut pairs = Vec::new();
        for i in 0..k {
            for j in i + 1..k {
                pairs.push((col_order[i], col_order[j]));
            }
        }
        let pair_options: Vec<[Vec<Vertex>; 2]> = pairs
            .iter()
            .map(|&(p, q)| {
                let cells = view.split(p, q);
                if cells.len() == 2 {
                    [cells[0].clone(), cells[1].clone()]
                } else {
                    [cells[0].clone(), Vec::new()]
                }
            })
            .collect();
        for within in product(&within_options) {
            for mask in 0u64..(1 << pairs.len()) {
                let choices = pairs
                    .iter()
                    .enumerate()
                    .map(|(t, &pq)| (pq, pair_options[t][(mask >> t & 1) as usize].clone()))
                    .collect();
                out.push(StarExpansion {
                    column_order: col_order.clone(),
                    within: within.iter().map(|w| (*w).clone()).collect(),
                    choices,
                });
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Cartesian product over a list of option sets; a zero-length list
/// yields the single empty selection.
fn product<T>(options: &[Vec<T>]) -> Vec<Vec<&T>> {
    let mut acc: Vec<Vec<&T>> = vec![Vec::new()];
    for opts in options {
        acc = acc
            .into_iter()
            .flat_map(|sel| {
                opts.iter().map(move |o| {
                    let mut s = sel.clone();
                    s.push(o);
                    s
                })
            })
            .collect();
    }
    acc
}

/// Independent validator: checks an extensionally given (order, R)
/// against the expansion conditions, reporting the first violation.
pub fn check_star(
    g: &SemiDigraph,
    view: &ColumnView,
    order: &[Vertex],
    r: &BTreeSet<(Vertex, Vertex)>,
) -> Result<(), StarViolation> {
    // linear
    let listed: BTreeSet<Vertex> = order.iter().copied().collect();
    if listed != *g.vertices() || listed.len() != order.len() {
        return Err(StarViolation::OrderNotLinear);
    }
    // convex: columns are intervals
    for (i, &a) in order.iter().enumerate() {
        for (j, &b) in order.iter().enumerate().skip(i + 1) {
            if !g.perp(a, b) {
                continue;
            }
            for &c in &order[i + 1..j] {
                if !g.perp(a, c) {
                    return Err(StarViolation::OrderNotConvex(a, c, b));
                }
            }
        }
    }
    let rh = |x: Vertex, y: Vertex| r.contains(&(x, y));
    // (d)
    for &x in order {
        for &y in order {
            if x != y && g.perp(x, y) && rh(x, y) {
                return Err(StarViolation::PerpPositive(x, y));
            }
        }
    }
    // (a)
    for &x in order {
        for &y in order {
            for &y2 in order {
                if y >= y2 || y == x || y2 == x || !g.perp(y, y2) {
                    continue;
                }
                if rh(x, y) != rh(x, y2) {
                    return Err(StarViolation::ColumnConstancy(x, y, y2));
                }
            }
        }
    }
    // column ranks under the order
    let cols = view.columns();
    let rank = |c: usize| {
        order
            .iter()
            .position(|&v| view.col_of(v) == Some(c))
            .unwrap()
    };
    for p in 0..cols.len() {
        for q in 0..cols.len() {
            if p == q || rank(p) > rank(q) {
                continue;
            }
            // (b): the R-positive subset of p must be empty or one cell
            let u: Vec<Vertex> = cols[p]
                .iter()
                .copied()
                .filter(|&x| cols[q].iter().all(|&y| rh(x, y)))
                .collect();
            let exact = cols[p]
                .iter()
                .all(|&x| cols[q].iter().all(|&y| rh(x, y) == u.contains(&x)));
            let is_class = u.is_empty() || view.split(p, q).iter().any(|cell| *cell == u);
            if !exact || !is_class {
                return Err(StarViolation::ClassChoice(p, q));
            }
            // (c): back direction
            let x1 = u.first().copied();
            for &y in &cols[q] {
                for &x in &cols[p] {
                    let expect = match x1 {
                        Some(x1) => g.forward(y, x1),
                        None => false,
                    };
                    if rh(y, x) != expect {
                        return Err(StarViolation::BackFormula(y, x));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Canonical decomposition of a column pair with p before q:
/// `(p0, p1, q0, q1)` where p1 carries R toward all of q and q1 carries
/// R back toward all of p.
pub fn canonical_split(
    g: &SemiDigraph,
    view: &ColumnView,
    e: &StarExpansion,
    p: usize,
    q: usize,
) -> Result<(Vec<Vertex>, Vec<Vertex>, Vec<Vertex>, Vec<Vertex>), StarError> {
    if e.rank_of_col(p) >= e.rank_of_col(q) {
        return Err(StarError::ColumnsNotOrdered(p, q));
    }
    let cols = view.columns();
    let p1: Vec<Vertex> = cols[p]
        .iter()
        .copied()
        .filter(|&x| cols[q].iter().all(|&y| e.r_holds(g, view, x, y)))
        .collect();
    let p0: Vec<Vertex> = cols[p].iter().copied().filter(|x| !p1.contains(x)).collect();
    let q1: Vec<Vertex> = cols[q]
        .iter()
        .copied()
        .filter(|&y| cols[p].iter().all(|&x| e.r_holds(g, view, y, x)))
        .collect();
    let q0: Vec<Vertex> = cols[q].iter().copied().filter(|y| !q1.contains(y)).collect();
    Ok((p0, p1, q0, q1))
}

/// Edge directions predicted from a canonical decomposition alone:
/// q1 -> p1, p1 -> q0, p0 -> q1, q0 -> p0, given as (from, to) blocks.
/// With the empty class chosen (p1 = ∅) the derivation has no anchor
/// point in p1 and predicts nothing.
pub fn recover_edges(
    split: &(Vec<Vertex>, Vec<Vertex>, Vec<Vertex>, Vec<Vertex>),
) -> Vec<(Vertex, Vertex)> {
    let (p0, p1, q0, q1) = split;
    if p1.is_empty() {
        return Vec::new();
    }
    let mut out = Vec::new();
    let block = |from: &[Vertex], to: &[Vertex], out: &mut Vec<(Vertex, Vertex)>| {
        for &a in from {
            for &b in to {
                out.push((a, b));
            }
        }
    };
    block(q1, p1, &mut out);
    block(p1, q0, &mut out);
    block(p0, q1, &mut out);
    block(q0, p0, &mut out);
    out
}

/// Recover both R values on (x, y) from the single stored bit on base
/// points (x_k, x_l), where x shares a column with x_k, y with x_l, and
/// x_k's column comes first.
pub fn recover_r(
    g: &SemiDigraph,
    view: &ColumnView,
    xk: Vertex,
    xl: Vertex,
    r_kl: bool,
    x: Vertex,
    y: Vertex,
) -> Result<(bool, bool), StarError> {
    let ck = view.col_of(xk);
    let cl = view.col_of(xl);
    if view.col_of(x) != ck {
        return Err(StarError::InconsistentLabels(format!(
            "vertex {x} is not in the column of base point {xk}"
        )));
    }
    if view.col_of(y) != cl {
        return Err(StarError::InconsistentLabels(format!(
            "vertex {y} is not in the column of base point {xl}"
        )));
    }
    let cp = ck.unwrap();
    let cl = cl.unwrap();
    let rxy = view.same_class(cl, xk, x) == r_kl;
    // back direction: R(y, .) is y -> x1 for x1 in the chosen class; a
    // false bit over a one-cell split means the empty class was chosen
    let ryx = if view.split(cp, cl).len() == 1 && !r_kl {
        false
    } else if g.forward(y, xk) {
        r_kl
    } else {
        !r_kl
    };
    Ok((rxy, ryx))
}

/// The unary-predicate form: each vertex of the i-th column carries the
/// 0/1 function recording R toward every other column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarStarForm {
    pub column_order: Vec<usize>,
    pub within: Vec<Vec<Vertex>>,
    /// labels[v][c] = R(v, y) for all y in column c
    pub labels: BTreeMap<Vertex, BTreeMap<usize, bool>>,
}

pub fn to_starstar(g: &SemiDigraph, view: &ColumnView, e: &StarExpansion) -> StarStarForm {
    let mut labels = BTreeMap::new();
    for &v in g.vertices() {
        let cv = view.col_of(v).unwrap();
        let mut f = BTreeMap::new();
        for c in 0..view.len() {
            if c == cv {
                continue;
            }
            let y = view.columns()[c][0];
            f.insert(c, e.r_holds(g, view, v, y));
        }
        labels.insert(v, f);
    }
    StarStarForm {
        column_order: e.column_order.clone(),
        within: e.within.clone(),
        labels,
    }
}

pub fn from_starstar(
    g: &SemiDigraph,
    view: &ColumnView,
    s: &StarStarForm,
) -> Result<StarExpansion, StarError> {
    let rank: BTreeMap<usize, usize> = s
        .column_order
        .iter()
        .enumerate()
        .map(|(r, &c)| (c, r))
        .collect();
    let mut choices = BTreeMap::new();
    for &p in &s.column_order {
        for &q in &s.column_order {
            if p == q || rank[&p] > rank[&q] {
                continue;
            }
            let u: Vec<Vertex> = view.columns()[p]
                .iter()
                .copied()
                .filter(|x| s.labels[x][&q])
                .collect();
            if !u.is_empty() && !view.split(p, q).iter().any(|cell| *cell == u) {
                return Err(StarError::InconsistentLabels(format!(
                    "label-positive part of column {p} against {q} is not a split class"
                )));
            }
            choices.insert((p, q), u);
        }
    }
    let e = StarExpansion {
        column_order: s.column_order.clone(),
        within: s.within.clone(),
        choices,
    };
    // the high-side labels must agree with the back-direction formula
    let r = e.r_set(g, view);
    for (&x, f) in &s.labels {
        for (&c, &bit) in f {
            let y = view.columns()[c][0];
            if r.contains(&(x, y)) != bit {
                return Err(StarError::InconsistentLabels(format!(
                    "label of {x} toward column {c} contradicts the back formula"
                )));
            }
        }
    }
    Ok(e)
}

/// Wire format for one expansion, keyed by column representatives
/// (minimum ids).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpansionJson {
    pub column_order: Vec<Vertex>,
    pub within: BTreeMap<Vertex, Vec<Vertex>>,
    pub choices: Vec<ChoiceJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ChoiceJson {
    pub low: Vertex,
    pub high: Vertex,
    pub class: Vec<Vertex>,
}

pub fn expansion_to_json(view: &ColumnView, e: &StarExpansion) -> ExpansionJson {
    let rep = |c: usize| view.columns()[c][0];
    ExpansionJson {
        column_order: e.column_order.iter().map(|&c| rep(c)).collect(),
        within: e
            .within
            .iter()
            .enumerate()
            .map(|(c, w)| (rep(c), w.clone()))
            .collect(),
        choices: e
            .choices
            .iter()
            .map(|(&(p, q), u)| ChoiceJson {
                low: rep(p),
                high: rep(q),
                class: u.clone(),
            })
            .collect(),
    }
}
